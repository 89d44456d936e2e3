//! Sparse multivariate polynomials over F2.
//!
//! A polynomial is a set of monomials; presence of a monomial means its
//! coefficient is 1. Addition is symmetric difference.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul};
use std::sync::Arc;

use super::vars::VarTable;
use crate::error::{Error, Result};

/// A monomial as a sorted list of `(variable index, exponent)` with exponents `>= 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: usize) -> Self {
        Monomial(vec![(v as u32, 1)])
    }

    pub fn var_pow(v: usize, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v as u32, exp)])
        }
    }

    /// Builds a monomial from unsorted `(var, exp)` pairs; repeated variables accumulate.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut v: Vec<(u32, u32)> = pairs
            .into_iter()
            .filter(|&(_, e)| e > 0)
            .map(|(v, e)| (v as u32, e))
            .collect();
        v.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(v.len());
        for (var, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == var => last.1 += e,
                _ => out.push((var, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|&(v, e)| (v as usize, e))
    }

    pub fn exp(&self, v: usize) -> u32 {
        match self.0.binary_search_by_key(&(v as u32), |&(var, _)| var) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&(v, _)| v as usize)
    }

    pub fn total_exponent(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 == v {
                let f = other.0[j].1;
                if f > e {
                    return None;
                }
                if e > f {
                    out.push((v, e - f));
                }
                j += 1;
            } else if j < other.0.len() && other.0[j].0 < v {
                return None;
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn with_exp(&self, v: usize, exp: u32) -> Monomial {
        let mut pairs: Vec<(usize, u32)> = self.factors().filter(|&(w, _)| w != v).collect();
        pairs.push((v, exp));
        Monomial::from_pairs(pairs)
    }

    /// Weighted degree, series variables included.
    pub fn degree(&self, vars: &VarTable) -> i64 {
        self.0
            .iter()
            .map(|&(v, e)| vars.weight(v as usize) * e as i64)
            .sum()
    }

    /// Weighted degree over ring variables only; this is what truncation bounds.
    pub fn trunc_degree(&self, vars: &VarTable) -> i64 {
        self.0
            .iter()
            .filter(|&&(v, _)| !vars.is_series(v as usize))
            .map(|&(v, e)| vars.weight(v as usize) * e as i64)
            .sum()
    }

    pub fn render(&self, vars: &VarTable) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|&(v, e)| {
                if e == 1 {
                    vars.name(v as usize).to_string()
                } else {
                    format!("{}^{}", vars.name(v as usize), e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Graded lexicographic comparison: weighted degree first, then exponent
/// vectors compared by ascending variable index (smaller exponent first).
pub fn grlex_cmp(vars: &VarTable, a: &Monomial, b: &Monomial) -> Ordering {
    a.degree(vars).cmp(&b.degree(vars)).then_with(|| {
        let (x, y) = (&a.0, &b.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (x.get(i), y.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    })
}

/// Truncation context: the maximal ring-variable weighted degree retained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncCtx {
    max_degree: Option<i64>,
}

impl TruncCtx {
    pub fn new(n: i64) -> Self {
        TruncCtx {
            max_degree: Some(n),
        }
    }

    pub fn unbounded() -> Self {
        TruncCtx { max_degree: None }
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.max_degree
    }

    pub fn admits(&self, degree: i64) -> bool {
        self.max_degree.is_none_or(|n| degree <= n)
    }
}

/// A polynomial over F2 in the variables of a [`VarTable`].
#[derive(Clone)]
pub struct F2Poly {
    vars: Arc<VarTable>,
    terms: BTreeSet<Monomial>,
}

impl F2Poly {
    pub fn zero(vars: &Arc<VarTable>) -> Self {
        F2Poly {
            vars: vars.clone(),
            terms: BTreeSet::new(),
        }
    }

    pub fn one(vars: &Arc<VarTable>) -> Self {
        Self::monomial(vars, Monomial::one())
    }

    pub fn var(vars: &Arc<VarTable>, v: usize) -> Self {
        Self::monomial(vars, Monomial::var(v))
    }

    pub fn monomial(vars: &Arc<VarTable>, m: Monomial) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(m);
        F2Poly {
            vars: vars.clone(),
            terms,
        }
    }

    /// Sums the given monomials; repeated monomials cancel in pairs.
    pub fn from_monomials(vars: &Arc<VarTable>, ms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut p = Self::zero(vars);
        for m in ms {
            p.toggle(m);
        }
        p
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().unwrap().is_one()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains(m)
    }

    /// Monomials in storage order (not the canonical printing order).
    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter()
    }

    /// Monomials in canonical graded-lex order.
    pub fn sorted_monomials(&self) -> Vec<&Monomial> {
        let mut v: Vec<&Monomial> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex_cmp(&self.vars, a, b));
        v
    }

    pub fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn same_table(&self, other: &F2Poly) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || *self.vars == *other.vars
    }

    fn check(&self, other: &F2Poly) -> Result<()> {
        if self.same_table(other) {
            Ok(())
        } else {
            Err(Error::VarTableMismatch)
        }
    }

    pub fn add(&self, other: &F2Poly) -> Result<F2Poly> {
        self.check(other)?;
        Ok(F2Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .symmetric_difference(&other.terms)
                .cloned()
                .collect(),
        })
    }

    /// Product with all monomials of truncation degree above `t` discarded.
    pub fn mul(&self, other: &F2Poly, t: TruncCtx) -> Result<F2Poly> {
        let vars = self.vars.clone();
        self.mul_capped(
            other,
            |m| m.trunc_degree(&vars),
            t.max_degree().unwrap_or(i64::MAX),
        )
    }

    /// Product keeping only monomials whose `cost` is at most `cap`.
    /// `cost` must be additive under monomial multiplication.
    pub fn mul_capped(
        &self,
        other: &F2Poly,
        cost: impl Fn(&Monomial) -> i64,
        cap: i64,
    ) -> Result<F2Poly> {
        self.check(other)?;
        let mut out = F2Poly::zero(&self.vars);
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        let da: Vec<(&Monomial, i64)> = self.terms.iter().map(|m| (m, cost(m))).collect();
        let db: Vec<(&Monomial, i64)> = other.terms.iter().map(|m| (m, cost(m))).collect();
        for &(ma, ea) in &da {
            for &(mb, eb) in &db {
                if ea.saturating_add(eb) <= cap {
                    out.toggle(ma.mul(mb));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32, t: TruncCtx) -> Result<F2Poly> {
        let mut acc = F2Poly::one(&self.vars);
        for _ in 0..k {
            acc = acc.mul(self, t)?;
        }
        Ok(acc)
    }

    pub fn mul_monomial(&self, m: &Monomial) -> F2Poly {
        F2Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|t| t.mul(m)).collect(),
        }
    }

    pub fn truncate(&self, t: TruncCtx) -> F2Poly {
        F2Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|m| t.admits(m.trunc_degree(&self.vars)))
                .cloned()
                .collect(),
        }
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> F2Poly {
        F2Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().filter(|m| keep(m)).cloned().collect(),
        }
    }

    /// Weighted degree of the unique homogeneous component, `None` for zero.
    pub fn homogeneous_degree(&self) -> Result<Option<i64>> {
        let mut deg = None;
        for m in &self.terms {
            let d = m.degree(&self.vars);
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => {
                    return Err(Error::Inhomogeneous(format!(
                        "monomials of degrees {e} and {d} in {self}"
                    )))
                }
                _ => {}
            }
        }
        Ok(deg)
    }

    pub fn is_homogeneous_of(&self, n: i64) -> bool {
        self.terms.iter().all(|m| m.degree(&self.vars) == n)
    }

    pub fn homogeneous_component(&self, n: i64) -> F2Poly {
        self.filter(|m| m.degree(&self.vars) == n)
    }

    pub fn max_trunc_degree(&self) -> Option<i64> {
        self.terms.iter().map(|m| m.trunc_degree(&self.vars)).max()
    }

    /// Reinterprets the polynomial over a table that extends its own.
    pub fn lift_to(&self, vars: &Arc<VarTable>) -> Result<F2Poly> {
        if !self.vars.is_prefix_of(vars) {
            return Err(Error::VarTableMismatch);
        }
        Ok(F2Poly {
            vars: vars.clone(),
            terms: self.terms.clone(),
        })
    }

    /// Restricts to a prefix table; fails if a variable outside the prefix occurs.
    pub fn restrict_to(&self, vars: &Arc<VarTable>) -> Result<F2Poly> {
        if !vars.is_prefix_of(&self.vars) {
            return Err(Error::VarTableMismatch);
        }
        if self
            .terms
            .iter()
            .any(|m| m.max_var().is_some_and(|v| v >= vars.len()))
        {
            return Err(Error::VarTableMismatch);
        }
        Ok(F2Poly {
            vars: vars.clone(),
            terms: self.terms.clone(),
        })
    }

    /// Evaluates the polynomial in an arbitrary commutative algebra by
    /// substituting `image(v)` for each variable `v`.
    pub fn evaluate<T: Clone>(
        &self,
        zero: T,
        one: &T,
        image: impl Fn(usize) -> T,
        mul: impl Fn(&T, &T) -> T,
        add: impl Fn(&mut T, &T),
    ) -> T {
        let mut powers: HashMap<(usize, u32), T> = HashMap::new();
        let mut acc = zero;
        for m in &self.terms {
            let mut term = one.clone();
            for (v, e) in m.factors() {
                let p = power(&mut powers, v, e, &image, &mul);
                term = mul(&term, &p);
            }
            add(&mut acc, &term);
        }
        acc
    }

    /// Substitution homomorphism into polynomials over `target`.
    pub fn substitute(
        &self,
        target: &Arc<VarTable>,
        image: impl Fn(usize) -> F2Poly,
        t: TruncCtx,
    ) -> F2Poly {
        self.evaluate(
            F2Poly::zero(target),
            &F2Poly::one(target),
            image,
            |a, b| {
                a.mul(b, t)
                    .expect("substitution images share the target table")
            },
            |acc, x| *acc += x,
        )
    }

    /// Parses the canonical rendering (`b1^2*b3 + b2`, `0`, `1`).
    pub fn parse(text: &str, vars: &Arc<VarTable>) -> Result<F2Poly> {
        let text = text.trim();
        let mut p = F2Poly::zero(vars);
        if text == "0" {
            return Ok(p);
        }
        for term in text.split(" + ") {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::InvalidInput(format!("empty term in `{text}`")));
            }
            if term == "1" {
                p.toggle(Monomial::one());
                continue;
            }
            let mut pairs = Vec::new();
            for factor in term.split('*') {
                let (name, exp) = match factor.rsplit_once('^') {
                    Some((n, e)) => (
                        n,
                        e.parse::<u32>().map_err(|_| {
                            Error::InvalidInput(format!("bad exponent in `{factor}`"))
                        })?,
                    ),
                    None => (factor, 1),
                };
                let v = vars
                    .lookup(name)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown variable `{name}`")))?;
                pairs.push((v, exp));
            }
            p.toggle(Monomial::from_pairs(pairs));
        }
        Ok(p)
    }
}

fn power<T: Clone>(
    cache: &mut HashMap<(usize, u32), T>,
    v: usize,
    e: u32,
    image: &impl Fn(usize) -> T,
    mul: &impl Fn(&T, &T) -> T,
) -> T {
    if let Some(p) = cache.get(&(v, e)) {
        return p.clone();
    }
    let p = if e == 1 {
        image(v)
    } else {
        let prev = power(cache, v, e - 1, image, mul);
        let base = power(cache, v, 1, image, mul);
        mul(&prev, &base)
    };
    cache.insert((v, e), p.clone());
    p
}

impl PartialEq for F2Poly {
    fn eq(&self, other: &Self) -> bool {
        self.same_table(other) && self.terms == other.terms
    }
}

impl Eq for F2Poly {}

impl fmt::Display for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self
            .sorted_monomials()
            .into_iter()
            .map(|m| m.render(&self.vars))
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

impl fmt::Debug for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Poly({self})")
    }
}

/// Panics if the tables differ; use [`F2Poly::add`] for a checked sum.
impl Add for &F2Poly {
    type Output = F2Poly;
    fn add(self, rhs: &F2Poly) -> F2Poly {
        F2Poly::add(self, rhs).expect("variable table mismatch")
    }
}

impl AddAssign<&F2Poly> for F2Poly {
    fn add_assign(&mut self, rhs: &F2Poly) {
        assert!(self.same_table(rhs), "variable table mismatch");
        for m in &rhs.terms {
            self.toggle(m.clone());
        }
    }
}

/// Untruncated product; panics if the tables differ.
impl Mul for &F2Poly {
    type Output = F2Poly;
    fn mul(self, rhs: &F2Poly) -> F2Poly {
        F2Poly::mul(self, rhs, TruncCtx::unbounded()).expect("variable table mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq() -> Arc<VarTable> {
        VarTable::from_ring_vars([("x", 1), ("y", 1)])
            .unwrap()
            .into_arc()
    }

    #[test]
    fn characteristic_two_cancellation() {
        let t = pq();
        let s = &F2Poly::var(&t, 0) + &F2Poly::var(&t, 1);
        assert!((&s + &s).is_zero());
        assert_eq!(&s + &F2Poly::zero(&t), s);
        assert_eq!(s.to_string(), "y + x");
    }

    #[test]
    fn frobenius_and_truncation() {
        let t = pq();
        let s = &F2Poly::var(&t, 0) + &F2Poly::var(&t, 1);
        let sq = s.mul(&s, TruncCtx::new(2)).unwrap();
        assert_eq!(sq, F2Poly::parse("x^2 + y^2", &t).unwrap());
        let xy = F2Poly::var(&t, 0)
            .mul(&F2Poly::var(&t, 1), TruncCtx::new(1))
            .unwrap();
        assert!(xy.is_zero());
        assert_eq!(F2Poly::one(&t).mul(&s, TruncCtx::new(5)).unwrap(), s);
    }

    #[test]
    fn mismatched_tables_error() {
        let a = pq();
        let b = VarTable::from_ring_vars([("u", 1)]).unwrap().into_arc();
        let p = F2Poly::var(&a, 0);
        let q = F2Poly::var(&b, 0);
        assert_eq!(p.add(&q), Err(Error::VarTableMismatch));
        assert_eq!(
            p.mul(&q, TruncCtx::unbounded()),
            Err(Error::VarTableMismatch)
        );
    }

    #[test]
    fn canonical_rendering_order() {
        let t = VarTable::from_ring_vars([("d0", 1), ("d1", 2)])
            .unwrap()
            .into_arc();
        let p = F2Poly::parse("d0^2 + d1 + 1 + d0", &t).unwrap();
        assert_eq!(p.to_string(), "1 + d0 + d1 + d0^2");
        assert_eq!(F2Poly::parse(&p.to_string(), &t).unwrap(), p);
    }

    #[test]
    fn monomial_division() {
        let a = Monomial::from_pairs([(0, 2), (3, 1)]);
        let b = Monomial::from_pairs([(0, 1)]);
        assert_eq!(a.div(&b), Some(Monomial::from_pairs([(0, 1), (3, 1)])));
        assert_eq!(b.div(&a), None);
        assert_eq!(a.div(&Monomial::var(1)), None);
        assert_eq!(a.div(&a), Some(Monomial::one()));
    }

    #[test]
    fn homogeneity() {
        let t = pq();
        let p = F2Poly::parse("x^2 + x*y", &t).unwrap();
        assert_eq!(p.homogeneous_degree().unwrap(), Some(2));
        let q = F2Poly::parse("x^2 + y", &t).unwrap();
        assert!(q.homogeneous_degree().is_err());
    }
}
