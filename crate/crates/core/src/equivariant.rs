//! The ring of `C2`-equivariant cobordism classes, presented over `Omega_*` by the
//! `d(i,j)`, with equality decided through the embedding into geometric fixed points.

use std::collections::HashMap;

use rand::Rng;

use crate::context::C2Context;
use crate::error::{Error, Result};
use crate::fixed_points::hfp_image;
use crate::kernel::{
    graded_quotient_dim, monomials_of_degree, ESeries, Echelon, F2Poly, Monomial, MonomialIndex,
};

/// A homogeneous class, stored as an unreduced polynomial in the `eq` table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqClass {
    poly: F2Poly,
    degree: i64,
}

impl EqClass {
    /// Checks homogeneity; the zero polynomial takes the given degree.
    pub fn new(ctx: &C2Context, poly: F2Poly, degree: i64) -> Result<Self> {
        if poly.vars() != ctx.eq_vars() {
            return Err(Error::VarTableMismatch);
        }
        if !poly.is_homogeneous_of(degree) {
            return Err(Error::Inhomogeneous(format!(
                "expected degree {degree}: {poly}"
            )));
        }
        if degree > ctx.n() as i64 {
            return Err(Error::TruncationExceeded(format!(
                "degree {degree} > {}",
                ctx.n()
            )));
        }
        Ok(EqClass { poly, degree })
    }

    /// Infers the degree from a nonzero homogeneous polynomial.
    pub fn from_poly(ctx: &C2Context, poly: F2Poly) -> Result<Self> {
        let degree = poly
            .homogeneous_degree()?
            .ok_or_else(|| Error::InvalidInput("zero has no degree; use EqClass::zero".into()))?;
        Self::new(ctx, poly, degree)
    }

    pub fn zero(ctx: &C2Context, degree: i64) -> Self {
        EqClass {
            poly: F2Poly::zero(ctx.eq_vars()),
            degree,
        }
    }

    pub fn one(ctx: &C2Context) -> Self {
        EqClass {
            poly: F2Poly::one(ctx.eq_vars()),
            degree: 0,
        }
    }

    pub fn d(ctx: &C2Context, i: u32, j: u32) -> Result<Self> {
        let v = ctx.d_var(i, j)?;
        Ok(EqClass {
            poly: F2Poly::var(ctx.eq_vars(), v),
            degree: (i + j + 1) as i64,
        })
    }

    /// An element of `Omega_*` given in the `x(g)`, with trivial action.
    pub fn from_omega(ctx: &C2Context, w: &F2Poly, degree: i64) -> Result<Self> {
        Self::new(ctx, w.lift_to(ctx.eq_vars())?, degree)
    }

    pub fn poly(&self) -> &F2Poly {
        &self.poly
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// True when the stored polynomial is zero; `eq` decides whether the class is.
    pub fn is_literally_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn add(&self, other: &EqClass) -> Result<EqClass> {
        if self.degree != other.degree && !self.poly.is_zero() && !other.poly.is_zero() {
            return Err(Error::Inhomogeneous(format!(
                "adding degrees {} and {}",
                self.degree, other.degree
            )));
        }
        let degree = if self.poly.is_zero() {
            other.degree
        } else {
            self.degree
        };
        Ok(EqClass {
            poly: self.poly.add(&other.poly)?,
            degree,
        })
    }

    pub fn mul(&self, ctx: &C2Context, other: &EqClass) -> Result<EqClass> {
        let degree = self.degree + other.degree;
        if degree > ctx.n() as i64 {
            return Err(Error::TruncationExceeded(format!(
                "degree {degree} > {}",
                ctx.n()
            )));
        }
        Ok(EqClass {
            poly: self.poly.mul(&other.poly, ctx.trunc())?,
            degree,
        })
    }

    /// Squares every monomial; equals the square of the class in characteristic two.
    pub fn frobenius(&self, ctx: &C2Context) -> Result<EqClass> {
        let degree = 2 * self.degree;
        if degree > ctx.n() as i64 {
            return Err(Error::TruncationExceeded(format!(
                "degree {degree} > {}",
                ctx.n()
            )));
        }
        let poly =
            F2Poly::from_monomials(self.poly.vars(), self.poly.monomials().map(|m| m.mul(m)));
        Ok(EqClass { poly, degree })
    }
}

impl std::fmt::Display for EqClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.poly.fmt(f)
    }
}

/// `[Gamma^j RP^m_sigma]`: zero for `m = 1`, otherwise `d(m-1, j)`.
pub fn twisted_projective(ctx: &C2Context, m: u32, j: u32) -> Result<EqClass> {
    match m {
        0 => Err(Error::InvalidInput("RPs(m, j) needs m >= 1".into())),
        1 => {
            let degree = (1 + j) as i64;
            if degree > ctx.n() as i64 {
                return Err(Error::TruncationExceeded(format!(
                    "degree {degree} > {}",
                    ctx.n()
                )));
            }
            Ok(EqClass::zero(ctx, degree))
        }
        _ => EqClass::d(ctx, m - 1, j),
    }
}

/// The embedding into `Omega_*[d0, d1, ...]`.
pub fn geometric_fixed(ctx: &C2Context, c: &EqClass) -> Result<F2Poly> {
    ctx.epsilon(&c.poly)
}

pub fn eq(ctx: &C2Context, a: &EqClass, b: &EqClass) -> Result<bool> {
    Ok(geometric_fixed(ctx, a)? == geometric_fixed(ctx, b)?)
}

/// Underlying nonequivariant class, `d(i,j) -> c_{i,j}`, written in the `x(g)`.
pub fn restrict(ctx: &C2Context, c: &EqClass) -> Result<F2Poly> {
    let x = ctx.x_vars();
    let mut images = Vec::with_capacity(ctx.eq_vars().len());
    for v in 0..ctx.eq_vars().len() {
        images.push(match ctx.d_of_var(v) {
            Some((i, j)) => ctx.c_x(i, j as i32)?,
            None => F2Poly::var(x, v),
        });
    }
    Ok(c.poly.substitute(x, |v| images[v].clone(), ctx.trunc()))
}

/// The transfer from `Omega_*` vanishes.
pub fn transfer(ctx: &C2Context, _w: &F2Poly, degree: i64) -> EqClass {
    EqClass::zero(ctx, degree)
}

/// `sum_l [(Gamma^l M)^e] e^l`, certified through `e^min(k, N - deg)`.
pub fn homotopy_fixed(ctx: &C2Context, c: &EqClass, k: u32) -> Result<ESeries> {
    let hi = (k as i64).min(ctx.n() as i64 - c.degree).max(0) as i32;
    Ok(hfp_image(ctx, &c.poly)?.truncate_above(hi))
}

/// Coefficients of [`homotopy_fixed`], from `e^0` up to the certified top.
pub fn gamma_underlying_series(ctx: &C2Context, c: &EqClass, k: u32) -> Result<Vec<F2Poly>> {
    let s = homotopy_fixed(ctx, c, k)?;
    let (_, hi) = s.window();
    (0..=hi).map(|j| s.coeff(j)).collect()
}

/// `(d(i,j) + c_{i,j}) d(k,l+1) + d(i,j+1) (d(k,l) + c_{k,l})` for every pair
/// `(i,j) < (k,l)` with all generators in range.
pub fn relations(ctx: &C2Context) -> Result<Vec<F2Poly>> {
    let eqv = ctx.eq_vars();
    let t = ctx.trunc();
    let gens: Vec<(u32, u32)> = ctx
        .d_vars()
        .map(|(k, _)| k)
        .filter(|&(i, j)| ctx.d_var(i, j + 1).is_ok())
        .collect();
    let mut out = Vec::new();
    for (a, &(i, j)) in gens.iter().enumerate() {
        for &(k, l) in &gens[a + 1..] {
            if (i + j + 1) + (k + l + 2) > ctx.n() {
                continue;
            }
            let shifted = |p: u32, q: u32| -> Result<F2Poly> {
                Ok(&F2Poly::var(eqv, ctx.d_var(p, q)?) + &ctx.c_eq(p, q as i32)?)
            };
            let lhs = shifted(i, j)?.mul(&F2Poly::var(eqv, ctx.d_var(k, l + 1)?), t)?;
            let rhs = F2Poly::var(eqv, ctx.d_var(i, j + 1)?).mul(&shifted(k, l)?, t)?;
            let rel = &lhs + &rhs;
            if !rel.is_zero() {
                out.push(rel);
            }
        }
    }
    Ok(out)
}

fn all_gens(ctx: &C2Context) -> Vec<usize> {
    (0..ctx.eq_vars().len()).collect()
}

fn check_degree(ctx: &C2Context, n: i64) -> Result<()> {
    if n > ctx.n() as i64 {
        return Err(Error::TruncationExceeded(format!(
            "degree {n} > {}",
            ctx.n()
        )));
    }
    Ok(())
}

/// Dimension of the degree-`n` part of the presented ring.
pub fn dim_presented(ctx: &C2Context, n: i64) -> Result<usize> {
    check_degree(ctx, n)?;
    graded_quotient_dim(ctx.eq_vars(), &all_gens(ctx), &relations(ctx)?, n)
}

/// Images under the embedding of all monomials of degree `n`, memoized by prefix.
fn monomial_images(ctx: &C2Context, n: i64) -> Result<(Vec<Monomial>, Vec<F2Poly>)> {
    let monos = monomials_of_degree(ctx.eq_vars(), &all_gens(ctx), n);
    let mut cache: HashMap<Monomial, F2Poly> = HashMap::new();
    let t = ctx.trunc();
    fn image(
        ctx: &C2Context,
        m: &Monomial,
        cache: &mut HashMap<Monomial, F2Poly>,
        t: crate::kernel::TruncCtx,
    ) -> Result<F2Poly> {
        if m.is_one() {
            return Ok(F2Poly::one(ctx.phi_vars()));
        }
        if let Some(p) = cache.get(m) {
            return Ok(p.clone());
        }
        let v = m.max_var().expect("non-unit monomial");
        let rest = m
            .div(&Monomial::var(v))
            .expect("contains its largest variable");
        let img = image(ctx, &rest, cache, t)?.mul(ctx.epsilon_var(v), t)?;
        cache.insert(m.clone(), img.clone());
        Ok(img)
    }
    let mut images = Vec::with_capacity(monos.len());
    for m in &monos {
        images.push(image(ctx, m, &mut cache, t)?);
    }
    Ok((monos, images))
}

/// Rank of the image of the degree-`n` monomials in geometric fixed points.
pub fn dim_image(ctx: &C2Context, n: i64) -> Result<usize> {
    check_degree(ctx, n)?;
    let (_, images) = monomial_images(ctx, n)?;
    let mut cols = MonomialIndex::new();
    let mut ech = Echelon::new();
    for p in &images {
        ech.insert(cols.row(p));
    }
    Ok(ech.rank())
}

/// A preimage under the embedding of a homogeneous element of geometric fixed points.
pub fn membership(ctx: &C2Context, p: &F2Poly) -> Result<EqClass> {
    if p.vars() != ctx.phi_vars() {
        return Err(Error::VarTableMismatch);
    }
    let Some(n) = p.homogeneous_degree()? else {
        return Ok(EqClass::zero(ctx, 0));
    };
    check_degree(ctx, n)?;
    if n < 0 {
        return Err(Error::NotInImage);
    }
    let (monos, images) = monomial_images(ctx, n)?;
    let mut cols = MonomialIndex::new();
    let mut ech = Echelon::tracking();
    for img in &images {
        ech.insert(cols.row(img));
    }
    let mut target = crate::kernel::BitRow::new();
    for m in p.monomials() {
        match cols.get(m) {
            Some(c) => target.flip(c),
            None => return Err(Error::NotInImage),
        }
    }
    let combo = ech.solve(&target).ok_or(Error::NotInImage)?;
    let poly = F2Poly::from_monomials(ctx.eq_vars(), combo.into_iter().map(|k| monos[k].clone()));
    EqClass::new(ctx, poly, n)
}

/// A class of degree `n` summing up to `terms` random monomials.
pub fn random_class(ctx: &C2Context, rng: &mut impl Rng, n: i64, terms: usize) -> EqClass {
    let monos = monomials_of_degree(ctx.eq_vars(), &all_gens(ctx), n);
    let mut p = F2Poly::zero(ctx.eq_vars());
    if !monos.is_empty() {
        for _ in 0..terms {
            p.toggle(monos[rng.gen_range(0..monos.len())].clone());
        }
    }
    EqClass { poly: p, degree: n }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> C2Context {
        C2Context::build(6).unwrap()
    }

    #[test]
    fn projective_classes() {
        let c = ctx();
        assert!(twisted_projective(&c, 1, 0).unwrap().is_literally_zero());
        let d10 = twisted_projective(&c, 2, 0).unwrap();
        assert_eq!(d10.degree(), 2);
        assert_eq!(d10.to_string(), "d(1,0)");
        assert_eq!(twisted_projective(&c, 3, 2).unwrap().degree(), 5);
        assert!(twisted_projective(&c, 6, 1).is_err());
    }

    #[test]
    fn geometric_fixed_examples() {
        let c = ctx();
        let d10 = EqClass::d(&c, 1, 0).unwrap();
        assert_eq!(geometric_fixed(&c, &d10).unwrap().to_string(), "d1 + d0^2");
        let d20 = EqClass::d(&c, 2, 0).unwrap();
        // The c_{2,-1} d0 term is present because c_{2,-1} = b2.
        assert_eq!(
            geometric_fixed(&c, &d20).unwrap().to_string(),
            "d2 + d0^3 + b2*d0"
        );
    }

    #[test]
    fn restriction_and_series() {
        let c = ctx();
        let d10 = EqClass::d(&c, 1, 0).unwrap();
        assert_eq!(restrict(&c, &d10).unwrap(), c.c_x(1, 0).unwrap());
        let series = gamma_underlying_series(&c, &d10, 8).unwrap();
        assert_eq!(series.len(), 5);
        for (l, s) in series.iter().enumerate() {
            assert_eq!(*s, c.c_x(1, l as i32).unwrap());
        }
        assert!(restrict(&c, &EqClass::one(&c)).unwrap().is_one());
    }

    #[test]
    fn relations_are_killed() {
        let c = ctx();
        let rels = relations(&c).unwrap();
        assert!(!rels.is_empty());
        for r in &rels {
            assert!(c.epsilon(r).unwrap().is_zero(), "{r}");
        }
    }

    #[test]
    fn low_dimensions_agree() {
        let c = ctx();
        let expected = [1, 0, 2, 2];
        for n in 0..=5 {
            let p = dim_presented(&c, n).unwrap();
            let i = dim_image(&c, n).unwrap();
            assert_eq!(p, i, "degree {n}");
            if let Some(&e) = expected.get(n as usize) {
                assert_eq!(p, e);
            }
        }
    }

    #[test]
    fn membership_examples() {
        let c = ctx();
        let phi = c.phi_vars();
        let p = F2Poly::parse("d1 + d0^2", phi).unwrap();
        assert_eq!(membership(&c, &p).unwrap().to_string(), "d(1,0)");
        let q = F2Poly::parse("d1", phi).unwrap();
        assert_eq!(membership(&c, &q), Err(Error::NotInImage));
        assert!(membership(&c, &F2Poly::one(phi)).unwrap().poly().is_one());
    }
}
