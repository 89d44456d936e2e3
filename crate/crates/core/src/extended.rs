//! The extended ring generated over the equivariant classes by `a` and `u`,
//! with the Conner-Floyd operation `Gamma` and the relation `u m = res(m) u + a Gamma(m)`.

use crate::context::C2Context;
use crate::equivariant::{eq, geometric_fixed, restrict, EqClass};
use crate::error::{Error, Result};
use crate::kernel::{F2Poly, Monomial};

/// Which `d`-factor `gamma` splits off a monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Peel {
    First,
    Last,
}

/// `Gamma` on one monomial of the `eq` table.
fn gamma_monomial(ctx: &C2Context, m: &Monomial, peel: Peel) -> Result<F2Poly> {
    let eqv = ctx.eq_vars();
    let ds: Vec<usize> = m
        .factors()
        .filter(|&(v, _)| !ctx.is_x_var(v))
        .map(|(v, _)| v)
        .collect();
    let pick = match peel {
        Peel::First => ds.first(),
        Peel::Last => ds.last(),
    };
    let Some(&v) = pick else {
        // Classes with trivial action.
        return Ok(F2Poly::zero(eqv));
    };
    let (i, j) = ctx.d_of_var(v).expect("d variable");
    let rest = m
        .div(&Monomial::var(v))
        .expect("contains the peeled factor");
    let next = ctx.d_var(i, j + 1)?;
    let mut out = F2Poly::monomial(eqv, rest.mul(&Monomial::var(next)));
    let c = ctx.c_eq(i, j as i32)?;
    if !c.is_zero() {
        out += &c.mul(&gamma_monomial(ctx, &rest, peel)?, ctx.trunc())?;
    }
    Ok(out)
}

/// The `Omega_*`-linear operator with `Gamma(1) = 0`, `Gamma(d(i,j)) = d(i,j+1)` and
/// `Gamma(d(i,j) mu) = c_{i,j} Gamma(mu) + d(i,j+1) mu`.
pub fn gamma_with(ctx: &C2Context, m: &EqClass, peel: Peel) -> Result<EqClass> {
    let degree = m.degree() + 1;
    if degree > ctx.n() as i64 {
        return Err(Error::TruncationExceeded(format!(
            "Gamma raises degree to {degree} > {}",
            ctx.n()
        )));
    }
    let mut out = F2Poly::zero(ctx.eq_vars());
    for mono in m.poly().monomials() {
        out += &gamma_monomial(ctx, mono, peel)?;
    }
    EqClass::new(ctx, out, degree)
}

pub fn gamma(ctx: &C2Context, m: &EqClass) -> Result<EqClass> {
    gamma_with(ctx, m, Peel::First)
}

pub fn gamma_pow(ctx: &C2Context, m: &EqClass, k: u32) -> Result<EqClass> {
    let mut out = m.clone();
    for _ in 0..k {
        out = gamma(ctx, &out)?;
    }
    Ok(out)
}

/// `u m = r u + g a` with `r = res(m)` and `g = Gamma(m)`.
pub fn push_u(ctx: &C2Context, m: &EqClass) -> Result<(F2Poly, EqClass)> {
    Ok((restrict(ctx, m)?, gamma(ctx, m)?))
}

/// `sum_{j<s} lambda_j a^j u^{s-j} + a^s m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtClass {
    s: u32,
    t: i64,
    lambdas: Vec<F2Poly>,
    m: EqClass,
}

impl ExtClass {
    pub fn from_eq(m: EqClass) -> Self {
        ExtClass {
            s: 0,
            t: m.degree(),
            lambdas: Vec::new(),
            m,
        }
    }

    /// Validates degrees: `lambda_j` over the `x(g)` of degree `t - (s - j)`, `m` of degree `t`.
    pub fn new(ctx: &C2Context, s: u32, t: i64, lambdas: Vec<F2Poly>, m: EqClass) -> Result<Self> {
        if lambdas.len() != s as usize {
            return Err(Error::InvalidInput(format!(
                "expected {s} coefficients, got {}",
                lambdas.len()
            )));
        }
        for (j, l) in lambdas.iter().enumerate() {
            if l.vars() != ctx.x_vars() {
                return Err(Error::VarTableMismatch);
            }
            let want = t - (s as i64 - j as i64);
            if !l.is_homogeneous_of(want) {
                return Err(Error::Inhomogeneous(format!(
                    "lambda_{j} should have degree {want}: {l}"
                )));
            }
        }
        if !m.is_literally_zero() && m.degree() != t {
            return Err(Error::Inhomogeneous(format!("m should have degree {t}")));
        }
        let m = if m.degree() == t {
            m
        } else {
            EqClass::zero(ctx, t)
        };
        Ok(ExtClass { s, t, lambdas, m })
    }

    pub fn zero(ctx: &C2Context, s: u32, t: i64) -> Self {
        ExtClass {
            s,
            t,
            lambdas: vec![F2Poly::zero(ctx.x_vars()); s as usize],
            m: EqClass::zero(ctx, t),
        }
    }

    pub fn a(ctx: &C2Context) -> Self {
        ExtClass {
            s: 1,
            t: 0,
            lambdas: vec![F2Poly::zero(ctx.x_vars())],
            m: EqClass::one(ctx),
        }
    }

    pub fn u(ctx: &C2Context) -> Self {
        ExtClass {
            s: 1,
            t: 1,
            lambdas: vec![F2Poly::one(ctx.x_vars())],
            m: EqClass::zero(ctx, 1),
        }
    }

    pub fn sigma_weight(&self) -> u32 {
        self.s
    }

    pub fn degree(&self) -> i64 {
        self.t
    }

    pub fn lambdas(&self) -> &[F2Poly] {
        &self.lambdas
    }

    pub fn m(&self) -> &EqClass {
        &self.m
    }

    /// Equality of normal forms: coefficients literally, `m` through the embedding.
    pub fn equals(&self, ctx: &C2Context, other: &ExtClass) -> Result<bool> {
        Ok(self.s == other.s
            && self.t == other.t
            && self.lambdas == other.lambdas
            && eq(ctx, &self.m, &other.m)?)
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        let wrap = |p: &F2Poly| {
            if p.len() > 1 {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        let power = |name: &str, k: u32| match k {
            0 => None,
            1 => Some(name.to_string()),
            _ => Some(format!("{name}^{k}")),
        };
        let join = |coeff: String, factors: Vec<Option<String>>| {
            let mut fs: Vec<String> = Vec::new();
            if coeff != "1" {
                fs.push(coeff);
            }
            fs.extend(factors.into_iter().flatten());
            if fs.is_empty() {
                "1".to_string()
            } else {
                fs.join("*")
            }
        };
        for (j, l) in self.lambdas.iter().enumerate() {
            if l.is_zero() {
                continue;
            }
            let j = j as u32;
            parts.push(join(wrap(l), vec![power("a", j), power("u", self.s - j)]));
        }
        if !self.m.is_literally_zero() {
            parts.push(join(wrap(self.m.poly()), vec![power("a", self.s)]));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl std::fmt::Display for ExtClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

/// `u^p m = sum_{r<p} res(Gamma^r m) a^r u^{p-r} + a^p Gamma^p(m)`.
pub fn u_power_times(ctx: &C2Context, p: u32, m: &EqClass) -> Result<(Vec<F2Poly>, EqClass)> {
    let mut lambdas = Vec::with_capacity(p as usize);
    let mut g = m.clone();
    for _ in 0..p {
        lambdas.push(restrict(ctx, &g)?);
        g = gamma(ctx, &g)?;
    }
    Ok((lambdas, g))
}

/// The normal form of `a^{a_pow} u^{u_pow} coeff`.
pub fn ext_from(ctx: &C2Context, a_pow: u32, u_pow: u32, coeff: &EqClass) -> Result<ExtClass> {
    let s = a_pow + u_pow;
    let t = coeff.degree() + u_pow as i64;
    if t > ctx.n() as i64 {
        return Err(Error::TruncationExceeded(format!(
            "degree {t} > {}",
            ctx.n()
        )));
    }
    let (ls, g) = u_power_times(ctx, u_pow, coeff)?;
    let mut lambdas = vec![F2Poly::zero(ctx.x_vars()); s as usize];
    for (r, l) in ls.into_iter().enumerate() {
        lambdas[a_pow as usize + r] = l;
    }
    ExtClass::new(ctx, s, t, lambdas, g)
}

pub fn ext_add(ctx: &C2Context, x: &ExtClass, y: &ExtClass) -> Result<ExtClass> {
    if x.s != y.s || x.t != y.t {
        return Err(Error::Inhomogeneous(format!(
            "adding bidegrees ({}, {}) and ({}, {})",
            x.s, x.t, y.s, y.t
        )));
    }
    let lambdas = x
        .lambdas
        .iter()
        .zip(&y.lambdas)
        .map(|(a, b)| a.add(b))
        .collect::<Result<Vec<_>>>()?;
    ExtClass::new(ctx, x.s, x.t, lambdas, x.m.add(&y.m)?)
}

pub fn ext_mul(ctx: &C2Context, x: &ExtClass, y: &ExtClass) -> Result<ExtClass> {
    let s = x.s + y.s;
    let t = x.t + y.t;
    if t > ctx.n() as i64 {
        return Err(Error::TruncationExceeded(format!(
            "degree {t} > {}",
            ctx.n()
        )));
    }
    let tr = ctx.trunc();
    let mut out = ExtClass::zero(ctx, s, t);
    for (j, l) in x.lambdas.iter().enumerate() {
        for (k, l2) in y.lambdas.iter().enumerate() {
            out.lambdas[j + k] += &l.mul(l2, tr)?;
        }
    }
    // lambda_j a^j u^{s-j} times a^{s'} m', and symmetrically.
    let cross = |lams: &[F2Poly],
                 s_own: u32,
                 s_other: u32,
                 m_other: &EqClass,
                 out: &mut ExtClass|
     -> Result<()> {
        if m_other.is_literally_zero() {
            return Ok(());
        }
        for (j, l) in lams.iter().enumerate() {
            if l.is_zero() {
                continue;
            }
            let (ls, g) = u_power_times(ctx, s_own - j as u32, m_other)?;
            for (r, lr) in ls.iter().enumerate() {
                out.lambdas[j + s_other as usize + r] += &l.mul(lr, tr)?;
            }
            let lm = EqClass::from_omega(ctx, l, x_degree(ctx, l))?;
            out.m = out.m.add(&lm.mul(ctx, &g)?)?;
        }
        Ok(())
    };
    cross(&x.lambdas, x.s, y.s, &y.m, &mut out)?;
    cross(&y.lambdas, y.s, x.s, &x.m, &mut out)?;
    out.m = out.m.add(&x.m.mul(ctx, &y.m)?)?;
    ExtClass::new(ctx, s, t, out.lambdas, out.m)
}

fn x_degree(ctx: &C2Context, l: &F2Poly) -> i64 {
    l.monomials().next().map_or(0, |m| m.degree(ctx.x_vars()))
}

/// Restriction to `Omega_*[u]`: the coefficient of `u^s`.
pub fn ext_restrict(ctx: &C2Context, x: &ExtClass) -> Result<(F2Poly, u32)> {
    if x.s == 0 {
        Ok((restrict(ctx, &x.m)?, 0))
    } else {
        Ok((x.lambdas[0].clone(), x.s))
    }
}

/// The transfer `Omega_*[u] -> ` extended ring vanishes.
pub fn ext_transfer(ctx: &C2Context, coeff: &F2Poly, u_pow: u32) -> ExtClass {
    ExtClass::zero(ctx, u_pow, x_degree(ctx, coeff) + u_pow as i64)
}

/// Geometric fixed points normalized by `a`: `a -> 1`, `u -> d0`, `m -> eps(m)`.
pub fn ext_phi(ctx: &C2Context, x: &ExtClass) -> Result<F2Poly> {
    let phi = ctx.phi_vars();
    let d0 = ctx.phi_d(0);
    let mut out = geometric_fixed(ctx, &x.m)?;
    for (j, l) in x.lambdas.iter().enumerate() {
        let lb = ctx.x_to_b(l)?.lift_to(phi)?;
        out += &lb.mul_monomial(&Monomial::var_pow(d0, x.s - j as u32));
    }
    Ok(out.truncate(ctx.trunc()))
}

/// A term `a^p u^q m` before normalization.
#[derive(Clone, Debug)]
pub struct RawTerm {
    pub a_pow: u32,
    pub u_pow: u32,
    pub m: EqClass,
}

/// [`ext_phi`] applied termwise, without normalizing first.
pub fn ext_phi_raw(ctx: &C2Context, terms: &[RawTerm]) -> Result<F2Poly> {
    let d0 = ctx.phi_d(0);
    let mut out = F2Poly::zero(ctx.phi_vars());
    for term in terms {
        out += &geometric_fixed(ctx, &term.m)?.mul_monomial(&Monomial::var_pow(d0, term.u_pow));
    }
    Ok(out.truncate(ctx.trunc()))
}

/// `u (d(i,j) + c_{i,j}) + a d(i,j+1)` for every `d(i,j+1)` in range.
pub fn u_relations(ctx: &C2Context) -> Result<Vec<Vec<RawTerm>>> {
    let mut out = Vec::new();
    for ((i, j), v) in ctx.d_vars() {
        let Ok(next) = ctx.d_var(i, j + 1) else {
            continue;
        };
        let deg = (i + j + 1) as i64;
        let base = &F2Poly::var(ctx.eq_vars(), v) + &ctx.c_eq(i, j as i32)?;
        out.push(vec![
            RawTerm {
                a_pow: 0,
                u_pow: 1,
                m: EqClass::new(ctx, base, deg)?,
            },
            RawTerm {
                a_pow: 1,
                u_pow: 0,
                m: EqClass::new(ctx, F2Poly::var(ctx.eq_vars(), next), deg + 1)?,
            },
        ]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> C2Context {
        C2Context::build(6).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let c = ctx();
        assert!(gamma(&c, &EqClass::one(&c)).unwrap().is_literally_zero());
        let d10 = EqClass::d(&c, 1, 0).unwrap();
        assert_eq!(gamma(&c, &d10).unwrap().to_string(), "d(1,1)");
        let d20 = EqClass::d(&c, 2, 0).unwrap();
        let prod = d10.mul(&c, &d20).unwrap();
        let expected = {
            let c10 = EqClass::from_omega(&c, &c.c_x(1, 0).unwrap(), 2).unwrap();
            let a = c10.mul(&c, &EqClass::d(&c, 2, 1).unwrap()).unwrap();
            let b = EqClass::d(&c, 1, 1).unwrap().mul(&c, &d20).unwrap();
            a.add(&b).unwrap()
        };
        assert!(eq(&c, &gamma(&c, &prod).unwrap(), &expected).unwrap());
        let last = gamma_with(&c, &prod, Peel::Last).unwrap();
        assert!(eq(&c, &last, &expected).unwrap());
    }

    #[test]
    fn push_u_examples() {
        let c = ctx();
        let (r, g) = push_u(&c, &EqClass::one(&c)).unwrap();
        assert!(r.is_one() && g.is_literally_zero());
        let u_d10 = ext_from(&c, 0, 1, &EqClass::d(&c, 1, 0).unwrap()).unwrap();
        assert_eq!(u_d10.to_string(), "x(2)*u + d(1,1)*a");
        let a2 = ext_from(&c, 2, 0, &EqClass::one(&c)).unwrap();
        assert_eq!(a2.to_string(), "a^2");
    }

    #[test]
    fn products() {
        let c = ctx();
        let a = ExtClass::a(&c);
        let u = ExtClass::u(&c);
        let au = ext_mul(&c, &a, &u).unwrap();
        let ua = ext_mul(&c, &u, &a).unwrap();
        assert!(au.equals(&c, &ua).unwrap());
        assert_eq!(au.to_string(), "a*u");
        let d10 = ExtClass::from_eq(EqClass::d(&c, 1, 0).unwrap());
        let u2 = ext_mul(&c, &u, &u).unwrap();
        let lhs = ext_mul(&c, &u2, &d10).unwrap();
        let direct = ext_from(&c, 0, 2, &EqClass::d(&c, 1, 0).unwrap()).unwrap();
        assert!(lhs.equals(&c, &direct).unwrap());
        assert_eq!(lhs.m().to_string(), "d(1,2)");
        assert_eq!(lhs.lambdas()[1], c.c_x(1, 1).unwrap());
    }

    #[test]
    fn phi_and_restriction() {
        let c = ctx();
        assert!(ext_phi(&c, &ExtClass::a(&c)).unwrap().is_one());
        let u_d10 = ext_from(&c, 0, 1, &EqClass::d(&c, 1, 0).unwrap()).unwrap();
        assert_eq!(ext_phi(&c, &u_d10).unwrap().to_string(), "d0*d1 + d0^3");
        assert_eq!(ext_restrict(&c, &u_d10).unwrap(), (c.c_x(1, 0).unwrap(), 1));
        assert!(ext_restrict(&c, &ExtClass::a(&c)).unwrap().0.is_zero());
        for rel in u_relations(&c).unwrap() {
            assert!(ext_phi_raw(&c, &rel).unwrap().is_zero());
        }
    }
}
