//! The universal 2-torsion formal group law, modelled as
//! `F(y, z) = exp(log y + log z)` over `B = F2[b_1, b_2, ...]` with
//! `exp(x) = x + sum_k b_k x^{k+1}`, and the reciprocal table `c_{i,j}` of
//! `1/F(e, y)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{invert_f, F2Poly, Monomial, PowerSeries, TruncCtx, VarTable};

/// Tables `a_{i,j}` (coefficient of `y^i z^j` in `F`) and `c_{i,j}` (coefficient
/// of `y^i e^j` in `1/F(e, y)`) through truncation degree `n`.
#[derive(Clone, Debug)]
pub struct FglContext {
    n: u32,
    b: Arc<VarTable>,
    exp: PowerSeries,
    log: PowerSeries,
    a: BTreeMap<(u32, u32), F2Poly>,
    c: BTreeMap<(u32, i32), F2Poly>,
    c_window: Option<i32>,
}

/// Named pass/fail checks with a short detail for failures.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.checks.extend(other.checks);
    }
}

/// Outcome of the associativity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssocReport {
    pub max_degree: u32,
    /// Exponents of `x^i y^j z^k` and the nonzero difference of the two sides there.
    pub first_failure: Option<((u32, u32, u32), String)>,
}

impl AssocReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// The model ring `B = F2[b_1, ..., b_n]`.
pub fn b_table(n: u32) -> Arc<VarTable> {
    VarTable::from_ring_vars((1..=n).map(|k| (format!("b{k}"), k as i64)))
        .expect("distinct names, positive weights")
        .into_arc()
}

/// A table with the ring variables of `base` followed by series variables of weight -1.
fn with_series_vars(base: &VarTable, names: &[&str]) -> Arc<VarTable> {
    let mut t = base.clone();
    for name in names {
        t.push_series(*name, -1).expect("series names are fresh");
    }
    t.into_arc()
}

/// Total exponent of the series variables (those at index `>= first`).
fn series_degree(m: &Monomial, first: usize) -> i64 {
    m.factors()
        .filter(|&(v, _)| v >= first)
        .map(|(_, e)| e as i64)
        .sum()
}

impl FglContext {
    /// Builds `exp`, `log` and the `a`-table; `c` is filled by [`FglContext::with_c_table`].
    pub fn build_fgl(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "truncation degree must be >= 2, got {n}"
            )));
        }
        let b = b_table(n);
        let order = n as usize + 1;
        let mut coeffs = vec![F2Poly::zero(&b); order + 1];
        coeffs[1] = F2Poly::one(&b);
        for k in 1..=n as usize {
            coeffs[k + 1] = F2Poly::var(&b, k - 1);
        }
        let exp = PowerSeries::new(&b, coeffs)?;
        let log = exp.reversion(TruncCtx::new(order as i64))?;
        let a = compute_a_table(&b, &exp, &log, n)?;
        Ok(FglContext {
            n,
            b,
            exp,
            log,
            a,
            c: BTreeMap::new(),
            c_window: None,
        })
    }

    /// The full build: `a`-table plus the reciprocal table with the default window `n`.
    pub fn build(n: u32) -> Result<Self> {
        Self::build_fgl(n)?.with_c_table(n as i32)
    }

    /// Reassembles a context from stored tables. `exp` and `log` are recomputed.
    pub fn from_tables(
        n: u32,
        a: BTreeMap<(u32, u32), F2Poly>,
        c: BTreeMap<(u32, i32), F2Poly>,
        c_window: i32,
    ) -> Result<Self> {
        let fresh = Self::build_fgl(n)?;
        for p in a.values().chain(c.values()) {
            if p.vars() != &fresh.b {
                return Err(Error::VarTableMismatch);
            }
        }
        Ok(FglContext {
            a,
            c,
            c_window: Some(c_window),
            ..fresh
        })
    }

    /// Computes `c_{i,j}` for `i + j + 1 <= n`, `-i-1 <= j <= window_hi`.
    pub fn with_c_table(mut self, window_hi: i32) -> Result<Self> {
        let n = self.n;
        let mut f = BTreeMap::new();
        f.insert((1, 0), F2Poly::one(&self.b));
        f.insert((0, 1), F2Poly::one(&self.b));
        for (&(i, j), p) in &self.a {
            f.insert((i, j), p.clone());
        }
        let inv = invert_f(
            &self.b,
            &f,
            n + 1,
            n - 1,
            (-(n as i32), window_hi),
            TruncCtx::new(n as i64),
        )?;
        let mut c = BTreeMap::new();
        for i in 0..n {
            let hi = window_hi.min(n as i32 - 1 - i as i32);
            for j in -(i as i32) - 1..=hi {
                c.insert((i, j), inv.coeff(i, j)?);
            }
        }
        self.c = c;
        self.c_window = Some(window_hi);
        Ok(self)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn b_vars(&self) -> &Arc<VarTable> {
        &self.b
    }

    pub fn trunc(&self) -> TruncCtx {
        TruncCtx::new(self.n as i64)
    }

    pub fn exp(&self) -> &PowerSeries {
        &self.exp
    }

    pub fn log(&self) -> &PowerSeries {
        &self.log
    }

    pub fn a_table(&self) -> &BTreeMap<(u32, u32), F2Poly> {
        &self.a
    }

    pub fn c_table(&self) -> &BTreeMap<(u32, i32), F2Poly> {
        &self.c
    }

    pub fn c_window(&self) -> Option<i32> {
        self.c_window
    }

    /// `a_{i,j}`; zero outside `i, j >= 1`, with `a_{1,0} = a_{0,1} = 1`.
    pub fn a(&self, i: u32, j: u32) -> Result<F2Poly> {
        if (i, j) == (1, 0) || (i, j) == (0, 1) {
            return Ok(F2Poly::one(&self.b));
        }
        if i == 0 || j == 0 {
            return Ok(F2Poly::zero(&self.b));
        }
        if i + j - 1 > self.n {
            return Err(Error::TruncationExceeded(format!(
                "a({i},{j}) has degree {} > {}",
                i + j - 1,
                self.n
            )));
        }
        Ok(self
            .a
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| F2Poly::zero(&self.b)))
    }

    /// `c_{i,j}`. Entries of degree above `n` are reported as truncation errors,
    /// entries past the stored window as window errors.
    pub fn c(&self, i: u32, j: i32) -> Result<F2Poly> {
        if j < -(i as i32) - 1 {
            return Ok(F2Poly::zero(&self.b));
        }
        if i as i64 + j as i64 + 1 > self.n as i64 {
            return Err(Error::TruncationExceeded(format!(
                "c({i},{j}) has degree {} > {}",
                i as i64 + j as i64 + 1,
                self.n
            )));
        }
        let window = self.c_window.ok_or(Error::WindowInsufficient {
            requested: (j, j),
            certified: (0, -1),
        })?;
        if j > window {
            return Err(Error::WindowInsufficient {
                requested: (j, j),
                certified: (-(i as i32) - 1, window),
            });
        }
        Ok(self
            .c
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| F2Poly::zero(&self.b)))
    }

    /// Checks unitality, symmetry, 2-torsion, degrees and associativity of the `a`-table.
    pub fn validate_fgl(&self) -> Result<CheckReport> {
        let mut r = CheckReport::default();
        let n = self.n;

        let fxy = self.f_poly()?;
        let unit = fxy.filter(|m| m.exp(self.b.len() + 1) == 0);
        let y_only = F2Poly::var(fxy.vars(), self.b.len());
        r.push(
            "unitality F(x,0) = x",
            unit == y_only,
            if unit == y_only {
                String::new()
            } else {
                unit.to_string()
            },
        );

        let mut asym = None;
        for (&(i, j), p) in &self.a {
            if self.a.get(&(j, i)) != Some(p) {
                asym = Some(format!("a({i},{j}) != a({j},{i})"));
                break;
            }
        }
        r.push(
            "symmetry F(y,z) = F(z,y)",
            asym.is_none(),
            asym.unwrap_or_default(),
        );

        let mut inhom = None;
        for (&(i, j), p) in &self.a {
            if !p.is_homogeneous_of((i + j - 1) as i64) {
                inhom = Some(format!("a({i},{j}) = {p}"));
                break;
            }
        }
        r.push(
            "a(i,j) homogeneous of degree i+j-1",
            inhom.is_none(),
            inhom.unwrap_or_default(),
        );

        // F(x, x): substitute y = z = x.
        let t = with_series_vars(&self.b, &["x"]);
        let x = self.b.len();
        let fxx = fxy.substitute(
            &t,
            |v| {
                if v >= self.b.len() {
                    F2Poly::var(&t, x)
                } else {
                    F2Poly::var(&t, v)
                }
            },
            TruncCtx::unbounded(),
        );
        let fxx = fxx.filter(|m| series_degree(m, x) <= n as i64 + 1);
        r.push("2-torsion F(x,x) = 0", fxx.is_zero(), fxx.to_string());

        let a11 = self.a(1, 1)?;
        r.push("a(1,1) = 0", a11.is_zero(), a11.to_string());

        let assoc = check_associativity(&self.b, &self.a, n)?;
        let detail = match &assoc.first_failure {
            None => String::new(),
            Some(((i, j, k), d)) => format!("x^{i} y^{j} z^{k}: {d}"),
        };
        r.push(
            format!("associativity through degree {n}"),
            assoc.passed(),
            detail,
        );
        Ok(r)
    }

    /// Checks the reciprocal table: `F * (1/F) = 1`, degrees, and the pattern
    /// of negative-exponent coefficients.
    pub fn validate_c_table(&self) -> Result<CheckReport> {
        let mut r = CheckReport::default();
        let n = self.n as i32;
        if self.c_window.is_none() {
            r.push("reciprocal table present", false, "not built");
            return Ok(r);
        }

        let mut inhom = None;
        for (&(i, j), p) in &self.c {
            if !p.is_homogeneous_of((i as i32 + j + 1) as i64) {
                inhom = Some(format!("c({i},{j}) = {p}"));
                break;
            }
        }
        r.push(
            "c(i,j) homogeneous of degree i+j+1",
            inhom.is_none(),
            inhom.unwrap_or_default(),
        );

        let identity = self.check_inverse_identity()?;
        r.push(
            "F * (1/F) = 1",
            identity.is_none(),
            identity.unwrap_or_default(),
        );

        let mut lead = None;
        for i in 0..self.n {
            if !self.c(i, -(i as i32) - 1)?.is_one() {
                lead = Some(format!("c({i},{})", -(i as i32) - 1));
                break;
            }
        }
        r.push("c(i,-i-1) = 1", lead.is_none(), lead.unwrap_or_default());

        let mut neg = None;
        'outer: for i in 0..self.n {
            for l in -(i as i32)..0 {
                if i as i32 + l + 1 > n {
                    continue;
                }
                let p = self.c(i, l)?;
                if !p.is_zero() {
                    neg = Some(format!("c({i},{l}) = {p}"));
                    break 'outer;
                }
            }
        }
        r.push(
            "c(i,l) = 0 for negative l != -i-1",
            neg.is_none(),
            neg.unwrap_or_default(),
        );
        Ok(r)
    }

    /// First coefficient of `F(e,y) * sum c_{i,j} y^i e^j - 1` that is nonzero, if any.
    fn check_inverse_identity(&self) -> Result<Option<String>> {
        let n = self.n as i32;
        // The y^p e^q coefficient has degree p + q, so it is exact for p + q <= n.
        let window = self.c_window.unwrap_or(n);
        for p in 0..self.n {
            for q in -(p as i32)..=window.min(n - p as i32) {
                let mut acc = F2Poly::zero(&self.b);
                // F = e + y + sum a_{s,t} e^s y^t; contributions c_{p-t, q-s} a_{s,t}.
                let mut terms: Vec<(u32, u32, F2Poly)> =
                    vec![(1, 0, F2Poly::one(&self.b)), (0, 1, F2Poly::one(&self.b))];
                for (&(s, t), a) in &self.a {
                    terms.push((s, t, a.clone()));
                }
                for (s, t, a) in terms {
                    if t > p {
                        continue;
                    }
                    let ci = p - t;
                    let cj = q - s as i32;
                    if cj < -(ci as i32) - 1 {
                        continue;
                    }
                    if ci as i32 + cj + 1 > n {
                        continue;
                    }
                    let c = self.c(ci, cj)?;
                    acc += &a.mul(&c, self.trunc())?;
                }
                let expected = (p, q) == (0, 0);
                if acc.is_one() != expected || (!expected && !acc.is_zero()) {
                    return Ok(Some(format!("y^{p} e^{q}: {acc}")));
                }
            }
        }
        Ok(None)
    }

    /// `F(y, z)` as a polynomial over `B` and series variables `y, z`.
    fn f_poly(&self) -> Result<F2Poly> {
        let t = with_series_vars(&self.b, &["y", "z"]);
        let (y, z) = (self.b.len(), self.b.len() + 1);
        let mut p = F2Poly::var(&t, y);
        p += &F2Poly::var(&t, z);
        for (&(i, j), a) in &self.a {
            let m = Monomial::from_pairs([(y, i), (z, j)]);
            p += &a.lift_to(&t)?.mul_monomial(&m);
        }
        Ok(p)
    }

    /// True if every shared `a` and `c` entry agrees with `other` bit for bit.
    pub fn agrees_on_common_range(&self, other: &FglContext) -> bool {
        let small = if self.n <= other.n { self } else { other };
        let big = if self.n <= other.n { other } else { self };
        let lift = |p: &F2Poly| p.lift_to(&big.b).ok();
        small.a.iter().all(|(k, p)| {
            big.a
                .get(k)
                .map(|q| Some(q.clone()) == lift(p))
                .unwrap_or(false)
        }) && small.c.iter().all(|(k, p)| {
            big.c
                .get(k)
                .map(|q| Some(q.clone()) == lift(p))
                .unwrap_or(false)
        })
    }
}

fn compute_a_table(
    b: &Arc<VarTable>,
    exp: &PowerSeries,
    log: &PowerSeries,
    n: u32,
) -> Result<BTreeMap<(u32, u32), F2Poly>> {
    let t = with_series_vars(b, &["y", "z"]);
    let (y, z) = (b.len(), b.len() + 1);
    let cap = n as i64 + 1;
    let cost = |m: &Monomial| series_degree(m, y);

    let mut sum = F2Poly::zero(&t);
    for (k, lk) in log.coeffs().iter().enumerate().skip(1) {
        let lk = lk.lift_to(&t)?;
        sum += &lk.mul_monomial(&Monomial::var_pow(y, k as u32));
        sum += &lk.mul_monomial(&Monomial::var_pow(z, k as u32));
    }
    // Horner: exp(L) = L (1 + L (b1 + L (b2 + ...)))
    let coeffs = exp.coeffs();
    let mut acc = coeffs[coeffs.len() - 1].lift_to(&t)?;
    for k in (1..coeffs.len() - 1).rev() {
        acc = acc.mul_capped(&sum, cost, cap)?;
        acc += &coeffs[k].lift_to(&t)?;
    }
    let f = acc.mul_capped(&sum, cost, cap)?;

    let mut a = BTreeMap::new();
    for i in 1..=n {
        for j in 1..=(n + 1 - i) {
            a.insert((i, j), F2Poly::zero(b));
        }
    }
    for m in f.monomials() {
        let (i, j) = (m.exp(y), m.exp(z));
        if i == 0 || j == 0 {
            if !((i, j) == (1, 0) && m.total_exponent() == 1
                || (i, j) == (0, 1) && m.total_exponent() == 1)
            {
                return Err(Error::MalformedFgl("unexpected unmixed term in F".into()));
            }
            continue;
        }
        let coeff = m
            .div(&Monomial::from_pairs([(y, i), (z, j)]))
            .expect("monomial contains its own series part");
        a.get_mut(&(i, j))
            .expect("series degree capped at n + 1")
            .toggle(coeff);
    }
    Ok(a)
}

/// Verifies `F(F(x,y),z) = F(x,F(y,z))` through series degree `n + 1`, i.e. all
/// coefficients of degree at most `n`, for the law given by an `a`-table.
pub fn check_associativity(
    b: &Arc<VarTable>,
    a: &BTreeMap<(u32, u32), F2Poly>,
    n: u32,
) -> Result<AssocReport> {
    let t = with_series_vars(b, &["x", "y", "z"]);
    let (x, y, z) = (b.len(), b.len() + 1, b.len() + 2);
    let cap = n as i64 + 1;
    let cost = |m: &Monomial| series_degree(m, x);
    let mut lifted = BTreeMap::new();
    for (&k, p) in a {
        if p.vars() != b {
            return Err(Error::VarTableMismatch);
        }
        if !p.is_zero() && k.0 + k.1 <= n + 1 {
            lifted.insert(k, p.lift_to(&t)?);
        }
    }

    let law = |u: &F2Poly, v: &F2Poly| -> Result<F2Poly> {
        let mut upow = vec![F2Poly::one(&t)];
        let mut vpow = vec![F2Poly::one(&t)];
        for k in 1..=n as usize {
            upow.push(upow[k - 1].mul_capped(u, cost, cap)?);
            vpow.push(vpow[k - 1].mul_capped(v, cost, cap)?);
        }
        let mut out = u + v;
        // Group by the power of u to share work: sum_i u^i (sum_j a_{i,j} v^j).
        let mut by_i: BTreeMap<u32, F2Poly> = BTreeMap::new();
        for (&(i, j), c) in &lifted {
            let term = vpow[j as usize].mul_capped(c, cost, cap)?;
            *by_i.entry(i).or_insert_with(|| F2Poly::zero(&t)) += &term;
        }
        for (i, inner) in by_i {
            out += &upow[i as usize].mul_capped(&inner, cost, cap)?;
        }
        Ok(out)
    };

    let (px, py, pz) = (F2Poly::var(&t, x), F2Poly::var(&t, y), F2Poly::var(&t, z));
    let left = law(&law(&px, &py)?, &pz)?;
    let right = law(&px, &law(&py, &pz)?)?;
    let diff = &left + &right;

    let mut groups: BTreeMap<(i64, u32, u32, u32), F2Poly> = BTreeMap::new();
    for m in diff.monomials() {
        let key = (m.exp(x), m.exp(y), m.exp(z));
        let coeff = m
            .div(&Monomial::from_pairs([(x, key.0), (y, key.1), (z, key.2)]))
            .expect("divisible by its series part");
        let deg = (key.0 + key.1 + key.2) as i64;
        groups
            .entry((deg, key.0, key.1, key.2))
            .or_insert_with(|| F2Poly::zero(b))
            .toggle(coeff);
    }
    let first_failure = groups
        .into_iter()
        .find(|(_, p)| !p.is_zero())
        .map(|((_, i, j, k), p)| ((i, j, k), p.to_string()));
    Ok(AssocReport {
        max_degree: n,
        first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_coefficients_by_hand() {
        let ctx = FglContext::build(4).unwrap();
        let b = ctx.b_vars().clone();
        assert!(ctx.a(1, 1).unwrap().is_zero());
        let b2 = F2Poly::parse("b2", &b).unwrap();
        assert_eq!(ctx.a(1, 2).unwrap(), b2);
        assert_eq!(ctx.a(2, 1).unwrap(), b2);
        // log = x + b1 x^2 + b2 x^3 + ... through x^3
        assert_eq!(
            ctx.log().coeff(2).unwrap(),
            &F2Poly::parse("b1", &b).unwrap()
        );
        assert_eq!(
            ctx.log().coeff(3).unwrap(),
            &F2Poly::parse("b2", &b).unwrap()
        );
    }

    #[test]
    fn reciprocal_row_zero_and_one() {
        let ctx = FglContext::build(5).unwrap();
        assert!(ctx.c(0, -1).unwrap().is_one());
        for j in 0..=4 {
            assert!(ctx.c(0, j).unwrap().is_zero(), "c(0,{j})");
        }
        assert_eq!(ctx.c(1, 0).unwrap(), ctx.a(2, 1).unwrap());
        assert!(ctx.c(1, -2).unwrap().is_one());
    }

    #[test]
    fn rejects_small_truncation() {
        assert!(FglContext::build_fgl(1).is_err());
    }

    #[test]
    fn additive_law_is_associative() {
        let b = b_table(4);
        let r = check_associativity(&b, &BTreeMap::new(), 4).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn fgl_checks_pass() {
        let ctx = FglContext::build(6).unwrap();
        let r = ctx.validate_fgl().unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
