//! Stiefel-Whitney numbers: of products of real projective spaces directly, and
//! of classes in `Omega_*` through the pairing with the `b`-monomials of `B`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{F2Poly, Monomial, TruncCtx, VarTable};
use crate::omega::OmegaBasis;

/// Tangential Stiefel-Whitney numbers `w_lambda[M]` for every partition `lambda` of the degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwProfile {
    pub degree: u32,
    /// Keyed by partitions with parts in decreasing order.
    pub values: BTreeMap<Vec<u32>, bool>,
}

impl SwProfile {
    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| !v)
    }
}

/// All partitions of `n`, parts in decreasing order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=max.min(left)).rev() {
            cur.push(p);
            go(left - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

fn binomial_parity(n: u32, k: u32) -> bool {
    // Lucas: C(n, k) is odd iff k's bits are a subset of n's.
    k <= n && (k & !n) == 0
}

/// Numbers of `RP^{d_1} x ... x RP^{d_k}` from `w(RP^d) = (1 + x)^{d+1}`.
pub fn sw_numbers_projective_product(dims: &[u32]) -> Result<SwProfile> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidInput(
            "dimensions must be nonempty and positive".into(),
        ));
    }
    let vars =
        VarTable::from_ring_vars(dims.iter().enumerate().map(|(k, _)| (format!("t{k}"), 1)))?
            .into_arc();
    let n: u32 = dims.iter().sum();
    let fits = |m: &Monomial| m.factors().all(|(v, e)| e <= dims[v]);
    // Total class of the product, graded pieces w_0..w_n.
    let mut total = F2Poly::one(&vars);
    for (k, &d) in dims.iter().enumerate() {
        let factor = F2Poly::from_monomials(
            &vars,
            (0..=d)
                .filter(|&i| binomial_parity(d + 1, i))
                .map(|i| Monomial::var_pow(k, i)),
        );
        total = (&total * &factor).filter(fits);
    }
    let w: Vec<F2Poly> = (0..=n as i64)
        .map(|i| total.homogeneous_component(i))
        .collect();
    let top = Monomial::from_pairs(dims.iter().enumerate().map(|(k, &d)| (k, d)));
    let mut values = BTreeMap::new();
    for lambda in partitions(n) {
        let mut prod = F2Poly::one(&vars);
        for &part in &lambda {
            prod = (&prod * &w[part as usize]).filter(fits);
        }
        values.insert(lambda, prod.contains(&top));
    }
    Ok(SwProfile { degree: n, values })
}

/// Parity of the number of 0/1 matrices with row sums `rows` and column sums `cols`.
/// This is the coefficient of `x^cols` in `prod_r e_{rows[r]}(x)`.
fn matrix_count_parity(rows: &[u32], cols: &[u32]) -> bool {
    fn go(rows: Vec<u32>, cols: &[u32], memo: &mut HashMap<(Vec<u32>, usize), bool>) -> bool {
        if cols.is_empty() {
            return rows.iter().all(|&r| r == 0);
        }
        let key = (rows.clone(), cols.len());
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let need = cols[0] as usize;
        let live: Vec<usize> = (0..rows.len()).filter(|&r| rows[r] > 0).collect();
        let mut parity = false;
        if need <= live.len() {
            // Enumerate subsets of the live rows of the needed size.
            let k = live.len();
            for mask in 0u64..(1u64 << k) {
                if mask.count_ones() as usize != need {
                    continue;
                }
                let mut next = rows.clone();
                for (bit, &r) in live.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        next[r] -= 1;
                    }
                }
                parity ^= go(next, &cols[1..], memo);
            }
        }
        memo.insert(key, parity);
        parity
    }
    let mut memo = HashMap::new();
    go(rows.to_vec(), cols, &mut memo)
}

/// Normal numbers `wbar_lambda` of an element of `B` via the pairing with `b`-monomials.
fn normal_numbers(elt: &F2Poly, n: u32) -> BTreeMap<Vec<u32>, bool> {
    let vars = elt.vars();
    let mut out = BTreeMap::new();
    for lambda in partitions(n) {
        let mut value = false;
        for m in elt.monomials() {
            let mut mu = Vec::new();
            for (v, e) in m.factors() {
                let k = vars.weight(v) as u32;
                mu.extend(std::iter::repeat_n(k, e as usize));
            }
            value ^= matrix_count_parity(&lambda, &mu);
        }
        out.insert(lambda, value);
    }
    out
}

/// Tangential classes `w_1..w_n` as polynomials in the normal classes `wbar_i`,
/// from `w = 1 / wbar`.
fn tangential_in_normal(n: u32) -> Result<(Arc<VarTable>, Vec<F2Poly>)> {
    let vars =
        VarTable::from_ring_vars((1..=n).map(|i| (format!("wbar{i}"), i as i64)))?.into_arc();
    let t = TruncCtx::new(n as i64);
    let mut rest = F2Poly::zero(&vars);
    for i in 0..n as usize {
        rest += &F2Poly::var(&vars, i);
    }
    // 1/(1 + r) = sum r^k over F2.
    let mut inv = F2Poly::one(&vars);
    let mut power = F2Poly::one(&vars);
    for _ in 0..n {
        power = power.mul(&rest, t)?;
        inv += &power;
    }
    Ok((
        vars.clone(),
        (0..=n as i64)
            .map(|i| inv.homogeneous_component(i))
            .collect(),
    ))
}

/// Tangential numbers of a class in `Omega_n`, given as an element of `B`.
pub fn sw_numbers_of_class(omega: &OmegaBasis, elt: &F2Poly, n: u32) -> Result<SwProfile> {
    if !elt.is_homogeneous_of(n as i64) {
        return Err(Error::Inhomogeneous(format!("expected degree {n}: {elt}")));
    }
    omega.express(elt)?;
    let normal = normal_numbers(elt, n);
    let (wvars, w) = tangential_in_normal(n)?;
    let t = TruncCtx::new(n as i64);
    let mut values = BTreeMap::new();
    for lambda in partitions(n) {
        let mut prod = F2Poly::one(&wvars);
        for &part in &lambda {
            prod = prod.mul(&w[part as usize], t)?;
        }
        let mut value = false;
        for m in prod.monomials() {
            let mut mu: Vec<u32> = Vec::new();
            for (v, e) in m.factors() {
                mu.extend(std::iter::repeat_n(v as u32 + 1, e as usize));
            }
            mu.sort_unstable_by(|a, b| b.cmp(a));
            value ^= normal[&mu];
        }
        values.insert(lambda, value);
    }
    Ok(SwProfile { degree: n, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(pairs: &[(&[u32], bool)]) -> BTreeMap<Vec<u32>, bool> {
        pairs.iter().map(|(k, v)| (k.to_vec(), *v)).collect()
    }

    #[test]
    fn projective_plane() {
        let p = sw_numbers_projective_product(&[2]).unwrap();
        assert_eq!(p.values, profile(&[(&[2], true), (&[1, 1], true)]));
    }

    #[test]
    fn odd_projective_spaces_bound() {
        assert!(sw_numbers_projective_product(&[1]).unwrap().is_zero());
        assert!(sw_numbers_projective_product(&[3]).unwrap().is_zero());
    }

    #[test]
    fn product_of_planes() {
        // RP^2 x RP^2 does not bound: w_2^2 = w_2(RP2)^2 cross terms give 1.
        let p = sw_numbers_projective_product(&[2, 2]).unwrap();
        assert!(p.values[&vec![2, 2]]);
    }

    #[test]
    fn matrix_parity() {
        // e_1(x1,x2)^2 has x1 x2 coefficient 2.
        assert!(!matrix_count_parity(&[1, 1], &[1, 1]));
        assert!(matrix_count_parity(&[2], &[1, 1]));
        assert!(matrix_count_parity(&[1, 1], &[2]));
    }

    #[test]
    fn partitions_of_four() {
        assert_eq!(partitions(4).len(), 5);
        assert_eq!(partitions(0), vec![Vec::<u32>::new()]);
    }
}
