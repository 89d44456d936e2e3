//! Windowed Laurent series in `e`, and the reciprocal of a two-variable series `F(e, y)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::poly::{F2Poly, TruncCtx};
use super::vars::VarTable;
use crate::error::{Error, Result};

/// Marker for "known to all orders" (modulo ring truncation).
pub const INF: i32 = i32::MAX / 4;

fn sat_add(a: i32, b: i32) -> i32 {
    if a >= INF || b >= INF {
        INF
    } else {
        a + b
    }
}

/// A Laurent series `sum_j coeffs[j] e^j`.
///
/// Coefficients below `lo` are exactly zero; coefficients in `[lo, hi]` are
/// exact; nothing is claimed beyond `hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ESeries {
    vars: Arc<VarTable>,
    lo: i32,
    hi: i32,
    coeffs: BTreeMap<i32, F2Poly>,
}

impl ESeries {
    pub fn zero(vars: &Arc<VarTable>) -> Self {
        ESeries {
            vars: vars.clone(),
            lo: INF,
            hi: INF,
            coeffs: BTreeMap::new(),
        }
    }

    /// `c e^j`, exact to all orders.
    pub fn monomial(c: F2Poly, j: i32) -> Self {
        let vars = c.vars().clone();
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(j, c);
        }
        ESeries {
            vars,
            lo: j,
            hi: INF,
            coeffs,
        }
    }

    pub fn one(vars: &Arc<VarTable>) -> Self {
        Self::monomial(F2Poly::one(vars), 0)
    }

    /// Builds a series from coefficients, known on the window `[lo, hi]`.
    pub fn from_coeffs(
        vars: &Arc<VarTable>,
        lo: i32,
        hi: i32,
        coeffs: impl IntoIterator<Item = (i32, F2Poly)>,
    ) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidInput(format!("empty window [{lo}, {hi}]")));
        }
        let mut map = BTreeMap::new();
        for (j, c) in coeffs {
            if c.vars() != vars {
                return Err(Error::VarTableMismatch);
            }
            if j < lo {
                return Err(Error::InvalidInput(format!(
                    "coefficient at e^{j} lies below the window start {lo}"
                )));
            }
            if j <= hi && !c.is_zero() {
                map.insert(j, c);
            }
        }
        Ok(ESeries {
            vars: vars.clone(),
            lo,
            hi,
            coeffs: map,
        })
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    /// The certified window `(lo, hi)`.
    pub fn window(&self) -> (i32, i32) {
        (self.lo, self.hi)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `e^j`, or `WindowInsufficient` if `j > hi`.
    pub fn coeff(&self, j: i32) -> Result<F2Poly> {
        if j > self.hi {
            return Err(Error::WindowInsufficient {
                requested: (j, j),
                certified: (self.lo, self.hi),
            });
        }
        Ok(self
            .coeffs
            .get(&j)
            .cloned()
            .unwrap_or_else(|| F2Poly::zero(&self.vars)))
    }

    /// Nonzero coefficients in increasing `e`-exponent.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &F2Poly)> {
        self.coeffs.iter().map(|(&j, c)| (j, c))
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    /// Forgets everything above `e^hi`.
    pub fn truncate_above(&self, hi: i32) -> ESeries {
        let hi = hi.min(self.hi);
        ESeries {
            vars: self.vars.clone(),
            lo: self.lo.min(hi),
            hi,
            coeffs: self
                .coeffs
                .range(..=hi)
                .map(|(&j, c)| (j, c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &ESeries) -> Result<ESeries> {
        if self.vars != other.vars {
            return Err(Error::VarTableMismatch);
        }
        let hi = self.hi.min(other.hi);
        let mut coeffs = BTreeMap::new();
        for (&j, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if j > hi {
                continue;
            }
            let entry = coeffs.entry(j).or_insert_with(|| F2Poly::zero(&self.vars));
            *entry += c;
        }
        coeffs.retain(|_, c: &mut F2Poly| !c.is_zero());
        Ok(ESeries {
            vars: self.vars.clone(),
            lo: self.lo.min(other.lo),
            hi,
            coeffs,
        })
    }

    /// Product. Window: `lo1 + lo2` through `min(lo1 + hi2, lo2 + hi1)`.
    pub fn mul(&self, other: &ESeries, t: TruncCtx) -> Result<ESeries> {
        if self.vars != other.vars {
            return Err(Error::VarTableMismatch);
        }
        let lo = sat_add(self.lo, other.lo);
        let hi = sat_add(self.lo, other.hi).min(sat_add(other.lo, self.hi));
        let mut coeffs: BTreeMap<i32, F2Poly> = BTreeMap::new();
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                if i + j > hi {
                    break;
                }
                let p = a.mul(b, t)?;
                if !p.is_zero() {
                    *coeffs
                        .entry(i + j)
                        .or_insert_with(|| F2Poly::zero(&self.vars)) += &p;
                }
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(ESeries {
            vars: self.vars.clone(),
            lo,
            hi,
            coeffs,
        })
    }

    /// Multiplies every coefficient by a ring element.
    pub fn scale(&self, c: &F2Poly, t: TruncCtx) -> Result<ESeries> {
        let mut coeffs = BTreeMap::new();
        for (&j, a) in &self.coeffs {
            let p = a.mul(c, t)?;
            if !p.is_zero() {
                coeffs.insert(j, p);
            }
        }
        Ok(ESeries {
            vars: self.vars.clone(),
            lo: self.lo,
            hi: self.hi,
            coeffs,
        })
    }

    /// Multiplies by `e^k`.
    pub fn shift(&self, k: i32) -> ESeries {
        ESeries {
            vars: self.vars.clone(),
            lo: sat_add(self.lo, k),
            hi: sat_add(self.hi, k),
            coeffs: self
                .coeffs
                .iter()
                .map(|(&j, c)| (j + k, c.clone()))
                .collect(),
        }
    }

    /// Equality of the coefficients on the common certified window.
    pub fn agrees_with(&self, other: &ESeries) -> bool {
        let hi = self.hi.min(other.hi);
        let a: Vec<_> = self.coeffs.range(..=hi).collect();
        let b: Vec<_> = other.coeffs.range(..=hi).collect();
        a == b
    }
}

/// Coefficients `c_{i,j}` of `y^i e^j` in `1/F(e, y)`, with the certified window per row.
#[derive(Clone, Debug)]
pub struct InverseTable {
    vars: Arc<VarTable>,
    coeffs: BTreeMap<(u32, i32), F2Poly>,
    y_max: u32,
    e_hi: i32,
    total_cap: i32,
}

impl InverseTable {
    /// The certified `e`-window of row `i`. Coefficients below `-i-1` vanish exactly.
    pub fn row_window(&self, i: u32) -> Option<(i32, i32)> {
        if i > self.y_max {
            return None;
        }
        let lo = -(i as i32) - 1;
        let hi = self.e_hi.min(self.total_cap - i as i32);
        (lo <= hi).then_some((lo, hi))
    }

    pub fn coeff(&self, i: u32, j: i32) -> Result<F2Poly> {
        match self.row_window(i) {
            Some((_, hi)) if j <= hi => Ok(self
                .coeffs
                .get(&(i, j))
                .cloned()
                .unwrap_or_else(|| F2Poly::zero(&self.vars))),
            w => Err(Error::WindowInsufficient {
                requested: (j, j),
                certified: w.unwrap_or((0, -1)),
            }),
        }
    }

    pub fn y_max(&self) -> u32 {
        self.y_max
    }

    /// Nonzero certified entries in `(i, j)` order.
    pub fn entries(&self) -> impl Iterator<Item = ((u32, i32), &F2Poly)> {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }
}

/// Sparse two-variable Laurent polynomial in `(y, e)` with coefficients in a ring.
type BiPoly = BTreeMap<(u32, i32), F2Poly>;

fn bi_mul(a: &BiPoly, b: &BiPoly, y_max: u32, total_cap: i32, t: TruncCtx) -> Result<BiPoly> {
    let mut out: BiPoly = BTreeMap::new();
    for (&(ya, ea), ca) in a {
        for (&(yb, eb), cb) in b {
            let (y, e) = (ya + yb, ea + eb);
            if y > y_max || y as i32 + e > total_cap {
                continue;
            }
            let p = ca.mul(cb, t)?;
            if p.is_zero() {
                continue;
            }
            let vars = p.vars().clone();
            *out.entry((y, e)).or_insert_with(|| F2Poly::zero(&vars)) += &p;
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

fn bi_add(acc: &mut BiPoly, b: &BiPoly) {
    for (&k, c) in b {
        let vars = c.vars().clone();
        *acc.entry(k).or_insert_with(|| F2Poly::zero(&vars)) += c;
    }
    acc.retain(|_, c| !c.is_zero());
}

/// Inverts `F(e, y) = e + y + sum_{i,j >= 1} f_{i,j} e^i y^j`.
///
/// `f` maps `(i, j)` (the exponents of `e` and `y`) to coefficients and must be
/// exact for all `i + j <= precision`. Uses `1/F = e^{-1} sum_m G^m` with
/// `G = e^{-1}(F - e)`, which converges `y`-adically. Coefficients are certified
/// for `i <= y_max`, `j <= e_window.1` and `i + j <= precision - 2`; the lower
/// edge of `e_window` only needs to be sane, since row `i` vanishes below `-i-1`.
pub fn invert_f(
    vars: &Arc<VarTable>,
    f: &BTreeMap<(u32, u32), F2Poly>,
    precision: u32,
    y_max: u32,
    e_window: (i32, i32),
    t: TruncCtx,
) -> Result<InverseTable> {
    if e_window.0 > e_window.1 {
        return Err(Error::InvalidInput(format!("empty e-window {e_window:?}")));
    }
    if precision < 1 {
        return Err(Error::MalformedFgl("precision must be at least 1".into()));
    }
    let coeff = |i: u32, j: u32| -> F2Poly {
        f.get(&(i, j))
            .cloned()
            .unwrap_or_else(|| F2Poly::zero(vars))
    };
    if !coeff(1, 0).is_one() {
        return Err(Error::MalformedFgl("F(e, 0) must equal e".into()));
    }
    if !coeff(0, 1).is_one() {
        return Err(Error::MalformedFgl("F(0, y) must equal y".into()));
    }
    for (&(i, j), c) in f {
        if c.vars() != vars {
            return Err(Error::VarTableMismatch);
        }
        if (i == 0 || j == 0) && (i, j) != (1, 0) && (i, j) != (0, 1) && !c.is_zero() {
            return Err(Error::MalformedFgl(format!(
                "unexpected term e^{i} y^{j} outside the mixed part"
            )));
        }
    }
    let total_cap = precision as i32 - 2;
    // G = e^{-1} y + sum f_{i,j} e^{i-1} y^j
    let mut g: BiPoly = BTreeMap::new();
    for (&(i, j), c) in f {
        if j == 0 || c.is_zero() || i + j > precision {
            continue;
        }
        g.insert((j, i as i32 - 1), c.clone());
    }
    let mut sum: BiPoly = BTreeMap::new();
    let mut power: BiPoly = BTreeMap::new();
    power.insert((0, 0), F2Poly::one(vars));
    // e^{-1} G^m has y-degree >= m, so m <= y_max suffices.
    for m in 0..=y_max {
        if m > 0 {
            power = bi_mul(&power, &g, y_max, total_cap + 1, t)?;
        }
        bi_add(&mut sum, &power);
    }
    let mut coeffs = BTreeMap::new();
    for ((y, e), c) in sum {
        let j = e - 1;
        if y as i32 + j <= total_cap && j <= e_window.1 {
            coeffs.insert((y, j), c);
        }
    }
    let table = InverseTable {
        vars: vars.clone(),
        coeffs,
        y_max,
        e_hi: e_window.1,
        total_cap,
    };
    check_inverse(f, &table, precision, t)?;
    Ok(table)
}

/// Post-check: `F * (1/F) = 1` on every certified coefficient.
fn check_inverse(
    f: &BTreeMap<(u32, u32), F2Poly>,
    table: &InverseTable,
    precision: u32,
    t: TruncCtx,
) -> Result<()> {
    let mut fb: BiPoly = BTreeMap::new();
    for (&(i, j), c) in f {
        if i + j <= precision && !c.is_zero() {
            fb.insert((j, i as i32), c.clone());
        }
    }
    let cb: BiPoly = table.coeffs.clone();
    let cap = table.total_cap + 1;
    let prod = bi_mul(&fb, &cb, table.y_max, cap, t)?;
    for ((y, e), c) in &prod {
        // F has no negative e-powers, so (y, e) only sees inverse entries with exponent <= e.
        if *e > table.e_hi {
            continue;
        }
        let expected = (*y, *e) == (0, 0);
        if c.is_one() != expected || (!expected && !c.is_zero()) {
            return Err(Error::MalformedFgl(format!(
                "F * (1/F) has coefficient {c} at y^{y} e^{e}"
            )));
        }
    }
    if !prod.contains_key(&(0, 0)) {
        return Err(Error::MalformedFgl("F * (1/F) lacks the unit term".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Arc<VarTable> {
        VarTable::from_ring_vars([("p", 1), ("q", 2), ("r", 3)])
            .unwrap()
            .into_arc()
    }

    fn f_of(v: &Arc<VarTable>, extra: &[((u32, u32), &str)]) -> BTreeMap<(u32, u32), F2Poly> {
        let mut f = BTreeMap::new();
        f.insert((1, 0), F2Poly::one(v));
        f.insert((0, 1), F2Poly::one(v));
        for &(k, s) in extra {
            f.insert(k, F2Poly::parse(s, v).unwrap());
        }
        f
    }

    #[test]
    fn inverse_of_additive_law() {
        let v = table();
        let f = f_of(&v, &[]);
        let inv = invert_f(&v, &f, 6, 3, (-5, 4), TruncCtx::new(6)).unwrap();
        // 1/(e + y) = sum_k y^k e^{-1-k}
        assert!(inv.coeff(0, -1).unwrap().is_one());
        assert!(inv.coeff(0, 0).unwrap().is_zero());
        assert!(inv.coeff(2, -3).unwrap().is_one());
        assert!(inv.coeff(2, -2).unwrap().is_zero());
    }

    #[test]
    fn row_one_degree_zero_is_a21() {
        // With f_{1,1} = 0 the y^1 e^0 coefficient equals the coefficient of e^2 y.
        let v = table();
        let f = f_of(&v, &[((2, 1), "q"), ((1, 2), "q")]);
        let inv = invert_f(&v, &f, 4, 2, (-3, 4), TruncCtx::new(4)).unwrap();
        assert_eq!(inv.coeff(1, 0).unwrap(), F2Poly::parse("q", &v).unwrap());
    }

    #[test]
    fn out_of_window_reports_certified_range() {
        let v = table();
        let f = f_of(&v, &[((2, 1), "q"), ((1, 2), "q")]);
        let inv = invert_f(&v, &f, 4, 2, (-3, 4), TruncCtx::new(4)).unwrap();
        match inv.coeff(1, 2) {
            Err(Error::WindowInsufficient { certified, .. }) => assert_eq!(certified, (-2, 1)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(inv.coeff(3, 0).is_err());
    }

    #[test]
    fn rejects_malformed_input() {
        let v = table();
        let mut f = f_of(&v, &[]);
        f.remove(&(0, 1));
        assert!(matches!(
            invert_f(&v, &f, 4, 2, (-3, 2), TruncCtx::new(4)),
            Err(Error::MalformedFgl(_))
        ));
    }

    #[test]
    fn eseries_window_arithmetic() {
        let v = table();
        let a = ESeries::from_coeffs(&v, -1, 2, [(-1, F2Poly::one(&v))]).unwrap();
        let b = ESeries::monomial(F2Poly::var(&v, 0), 1);
        let ab = a.mul(&b, TruncCtx::new(6)).unwrap();
        assert_eq!(ab.window(), (0, 3));
        assert_eq!(ab.coeff(0).unwrap(), F2Poly::var(&v, 0));
        assert!(ab.coeff(4).is_err());
        assert!(a.add(&a).unwrap().is_zero());
    }
}
