//! Homotopy, Tate and geometric fixed points, the ring `R` presented by
//! `d(i,j) = c_{i,j} + e d(i,j+1)`, and windowed checks of the Tate square.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::context::C2Context;
use crate::error::{Error, Result};
use crate::kernel::{
    monomials_of_degree, BitRow, ESeries, Echelon, F2Poly, Monomial, TruncCtx, VarTable,
};

/// Evaluates `p` in series over `target`, propagating the first arithmetic error.
fn eval_series(
    p: &F2Poly,
    target: &Arc<VarTable>,
    image: impl Fn(usize) -> ESeries,
    t: TruncCtx,
) -> Result<ESeries> {
    let err = RefCell::new(None);
    let out = p.evaluate(
        ESeries::zero(target),
        &ESeries::one(target),
        image,
        |x, y| match x.mul(y, t) {
            Ok(z) => z,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                ESeries::zero(target)
            }
        },
        |acc, x| *acc = acc.add(x).expect("shared table"),
    );
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// `phi(d_i) = sum_j c_{i,j} e^j`, as a series over `B` exact modulo truncation.
fn phi_of_d(ctx: &C2Context, i: u32) -> Result<ESeries> {
    let b = ctx.b_vars();
    let n = ctx.n() as i32;
    let lo = -(i as i32) - 1;
    let coeffs = (lo..=n - 1 - i as i32)
        .map(|j| Ok((j, ctx.fgl().c(i, j)?)))
        .collect::<Result<Vec<_>>>()?;
    ESeries::from_coeffs(b, lo, crate::kernel::laurent::INF, coeffs)
}

/// The map to Tate fixed points, `d_i -> sum_j c_{i,j} e^j`, on a polynomial in the `phi` table.
pub fn phi_map(ctx: &C2Context, p: &F2Poly) -> Result<ESeries> {
    if p.vars() != ctx.phi_vars() {
        return Err(Error::VarTableMismatch);
    }
    let b = ctx.b_vars().clone();
    let nb = b.len();
    let t = ctx.trunc();
    let images: Vec<ESeries> = (0..ctx.n())
        .map(|i| phi_of_d(ctx, i))
        .collect::<Result<_>>()?;
    eval_series(
        p,
        &b,
        |v| {
            if v < nb {
                ESeries::monomial(F2Poly::var(&b, v), 0)
            } else {
                images[v - nb].clone()
            }
        },
        t,
    )
}

/// Localization `Omega_*[[e]] -> Omega_*((e))`: the identity on windows.
pub fn hfp_to_tate(h: &ESeries) -> ESeries {
    h.clone()
}

/// Homotopy fixed point image of a polynomial in the `r` (or `eq`) table, with
/// coefficients written in the `x(g)`: `d(i,j) -> sum_{l >= 0} c_{i,j+l} e^l`.
pub fn hfp_image(ctx: &C2Context, p: &F2Poly) -> Result<ESeries> {
    let x = ctx.x_vars().clone();
    let nx = x.len();
    let e_var = ctx.e_var();
    let t = ctx.trunc();
    if p.vars() != ctx.r_vars() && p.vars() != ctx.eq_vars() {
        return Err(Error::VarTableMismatch);
    }
    let mut images: HashMap<usize, ESeries> = HashMap::new();
    for ((i, j), v) in ctx.d_vars() {
        let top = ctx.n() as i32 - 1 - i as i32 - j as i32;
        let coeffs = (0..=top)
            .map(|l| Ok((l, ctx.c_x(i, j as i32 + l)?)))
            .collect::<Result<Vec<_>>>()?;
        images.insert(
            v,
            ESeries::from_coeffs(&x, 0, crate::kernel::laurent::INF, coeffs)?,
        );
    }
    eval_series(
        p,
        &x,
        |v| {
            if v < nx {
                ESeries::monomial(F2Poly::var(&x, v), 0)
            } else if v == e_var {
                ESeries::monomial(F2Poly::one(&x), 1)
            } else {
                images[&v].clone()
            }
        },
        t,
    )
}

/// An element `f0 + e f1` of `R`: `f0` has no `e`, `f1` involves only the
/// `x(g)`, `e` and the `d(i,0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RElem {
    pub f0: F2Poly,
    pub f1: F2Poly,
}

impl RElem {
    /// `f0 + e f1` as one polynomial in the `r` table.
    pub fn to_poly(&self, ctx: &C2Context) -> F2Poly {
        &self.f0 + &self.f1.mul_monomial(&Monomial::var(ctx.e_var()))
    }

    pub fn satisfies_invariants(&self, ctx: &C2Context) -> bool {
        let e = ctx.e_var();
        let f0_ok = self.f0.monomials().all(|m| m.exp(e) == 0);
        let f1_ok = self.f1.monomials().all(|m| {
            m.factors().all(|(v, _)| {
                v == e || ctx.is_x_var(v) || ctx.d_of_var(v).is_some_and(|(_, j)| j == 0)
            })
        });
        f0_ok && f1_ok
    }
}

/// Which `d(i,j)`, `j >= 1`, to rewrite against `e` when several are present.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteStrategy {
    First,
    Last,
    Seeded(u64),
}

/// Rewrites `e d(i,j) -> d(i,j-1) + c_{i,j-1}` until every monomial with `e`
/// has no `d(i,j)` with `j >= 1`.
pub fn r_normal_form(ctx: &C2Context, p: &F2Poly, strategy: RewriteStrategy) -> Result<RElem> {
    let p = if p.vars() == ctx.eq_vars() {
        p.lift_to(ctx.r_vars())?
    } else if p.vars() == ctx.r_vars() {
        p.clone()
    } else {
        return Err(Error::VarTableMismatch);
    };
    if let Some(d) = p.max_trunc_degree() {
        if d > ctx.n() as i64 {
            return Err(Error::TruncationExceeded(format!(
                "input has degree {d} > {}",
                ctx.n()
            )));
        }
    }
    let r = ctx.r_vars();
    let e = ctx.e_var();
    let mut rng = match strategy {
        RewriteStrategy::Seeded(s) => Some(StdRng::seed_from_u64(s)),
        _ => None,
    };
    let mut done = F2Poly::zero(r);
    let mut work: Vec<Monomial> = p.monomials().cloned().collect();
    while let Some(m) = work.pop() {
        let candidates: Vec<(usize, u32, u32)> = if m.exp(e) == 0 {
            Vec::new()
        } else {
            m.factors()
                .filter_map(|(v, _)| {
                    ctx.d_of_var(v)
                        .filter(|&(_, j)| j >= 1)
                        .map(|(i, j)| (v, i, j))
                })
                .collect()
        };
        if candidates.is_empty() {
            done.toggle(m);
            continue;
        }
        let (v, i, j) = match (&strategy, rng.as_mut()) {
            (RewriteStrategy::Last, _) => *candidates.last().unwrap(),
            (RewriteStrategy::Seeded(_), Some(g)) => candidates[g.gen_range(0..candidates.len())],
            _ => candidates[0],
        };
        let rest = m
            .div(&Monomial::from_pairs([(v, 1), (e, 1)]))
            .expect("monomial contains e and the chosen d");
        let mut replacement = ctx.c_eq(i, j as i32 - 1)?.lift_to(r)?;
        replacement += &F2Poly::var(r, ctx.d_var(i, j - 1)?);
        for t in replacement.mul_monomial(&rest).monomials() {
            work.push(t.clone());
        }
    }
    // Monomials can reappear through different rewrites; `done` already cancels pairs.
    let f0 = done.filter(|m| m.exp(e) == 0);
    let with_e = done.filter(|m| m.exp(e) > 0);
    let f1 = F2Poly::from_monomials(
        r,
        with_e
            .monomials()
            .map(|m| m.div(&Monomial::var(e)).expect("has e")),
    );
    Ok(RElem { f0, f1 })
}

/// Image of an `R` element in `Omega_*[d0^{+-1}, d1, ...]`, multiplied by `d0^shift`
/// so that it is polynomial. `shift` must be at least the largest `e`-exponent.
fn localized_image(ctx: &C2Context, p: &F2Poly, shift: u32) -> Result<F2Poly> {
    let e = ctx.e_var();
    let d0 = ctx.phi_d(0);
    let mut out = F2Poly::zero(ctx.phi_vars());
    for m in p.monomials() {
        let k = m.exp(e);
        let rest = m.with_exp(e, 0);
        let rest = F2Poly::monomial(ctx.r_vars(), rest).restrict_to(ctx.eq_vars())?;
        let img = ctx.epsilon(&rest)?;
        out += &img.mul_monomial(&Monomial::var_pow(d0, shift - k));
    }
    Ok(out)
}

/// Equality in `R`, decided by the images after inverting `e` and after completing at `e`.
pub fn r_equal(ctx: &C2Context, a: &RElem, b: &RElem) -> Result<bool> {
    let pa = a.to_poly(ctx);
    let pb = b.to_poly(ctx);
    let e = ctx.e_var();
    let shift = pa
        .monomials()
        .chain(pb.monomials())
        .map(|m| m.exp(e))
        .max()
        .unwrap_or(0);
    let loc_equal = localized_image(ctx, &pa, shift)? == localized_image(ctx, &pb, shift)?;
    let ha = hfp_image(ctx, &pa)?;
    let hb = hfp_image(ctx, &pb)?;
    Ok(loc_equal && ha.agrees_with(&hb))
}

/// Result of the `e`-regularity check on one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ERegularReport {
    pub degree: i64,
    pub window: u32,
    pub source_dim: usize,
    pub kernel_dim: usize,
}

impl ERegularReport {
    pub fn passed(&self) -> bool {
        self.kernel_dim == 0
    }
}

/// The defining relations `d(i,j) + c_{i,j} + e d(i,j+1)` among the available generators.
pub fn r_relations(ctx: &C2Context) -> Result<Vec<F2Poly>> {
    let r = ctx.r_vars();
    let e = ctx.e_var();
    let mut out = Vec::new();
    for ((i, j), v) in ctx.d_vars() {
        let Ok(next) = ctx.d_var(i, j + 1) else {
            continue;
        };
        let mut rel = F2Poly::var(r, v);
        rel += &ctx.c_eq(i, j as i32)?.lift_to(r)?;
        rel += &F2Poly::monomial(r, Monomial::from_pairs([(e, 1), (next, 1)]));
        out.push(rel);
    }
    Ok(out)
}

/// Monomials of degree `n` in `x(g)`, `d(i,j)` and `e` with ring degree at most `cap`.
fn r_slice(ctx: &C2Context, n: i64, cap: i64) -> Vec<Monomial> {
    let eq = ctx.eq_vars();
    let gens: Vec<usize> = (0..eq.len()).collect();
    let e = ctx.e_var();
    let mut out = Vec::new();
    for m in n.max(0)..=cap {
        for mono in monomials_of_degree(eq, &gens, m) {
            out.push(mono.with_exp(e, (m - n) as u32));
        }
    }
    out
}

/// Checks that multiplication by `e` is injective on the degree-`n` part of the
/// truncated presentation of `R` (plus optional extra relations), with
/// `e`-exponents up to `window`.
///
/// Only relations whose generators all lie within the truncation are imposed;
/// the source is cut at `e^{w}` and the target at `e^{w+1}`, `w = min(window, N - n)`.
pub fn check_e_regular(
    ctx: &C2Context,
    n: i64,
    window: u32,
    extra_relations: &[F2Poly],
) -> Result<ERegularReport> {
    let big_n = ctx.n() as i64;
    if n > big_n {
        return Err(Error::TruncationExceeded(format!("degree {n} > {big_n}")));
    }
    let w = (window as i64).min(big_n - n).max(0);
    let mut rels = r_relations(ctx)?;
    for r in extra_relations {
        if r.vars() != ctx.r_vars() {
            return Err(Error::VarTableMismatch);
        }
        rels.push(r.clone());
    }
    let e = ctx.e_var();
    let r = ctx.r_vars();

    // Ideal span in degree d, cut to ring degree <= cap.
    let ideal_rows =
        |d: i64, cap: i64, idx: &mut HashMap<Monomial, usize>, ech: &mut Echelon| -> Result<()> {
            let mut multipliers: HashMap<i64, Vec<Monomial>> = HashMap::new();
            for rel in &rels {
                // Relations are homogeneous; the multiplier has degree d - deg(rel).
                let Some(rd) = rel.homogeneous_degree()? else {
                    continue;
                };
                let low = rel
                    .monomials()
                    .map(|m| m.trunc_degree(r))
                    .min()
                    .unwrap_or(0);
                let ms = multipliers
                    .entry(d - rd)
                    .or_insert_with(|| r_slice(ctx, d - rd, cap));
                for m in ms.iter() {
                    if m.trunc_degree(r) + low > cap {
                        continue;
                    }
                    let prod = rel.mul_monomial(m).filter(|t| t.trunc_degree(r) <= cap);
                    let mut row = BitRow::new();
                    for t in prod.monomials() {
                        let next = idx.len();
                        let c = *idx.entry(t.clone()).or_insert(next);
                        row.flip(c);
                    }
                    ech.insert(row);
                }
            }
            Ok(())
        };

    // Source: degree n, ring degree <= n + w.
    let src = r_slice(ctx, n, n + w);
    let mut idx_n: HashMap<Monomial, usize> = src
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let mut j_n = Echelon::new();
    ideal_rows(n, n + w, &mut idx_n, &mut j_n)?;
    let source_dim = src.len() - j_n.rank();

    // Target: degree n - 1, ring degree <= n + w (e-exponent <= w + 1).
    let tgt = r_slice(ctx, n - 1, n + w);
    let mut idx_t: HashMap<Monomial, usize> = tgt
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let mut j_t = Echelon::new();
    ideal_rows(n - 1, n + w, &mut idx_t, &mut j_t)?;
    let base_rank = j_t.rank();
    for m in &src {
        let em = m.with_exp(e, m.exp(e) + 1);
        let c = idx_t[&em];
        j_t.insert(BitRow::from_bits([c]));
    }
    let image_dim = j_t.rank() - base_rank;
    Ok(ERegularReport {
        degree: n,
        window: w as u32,
        source_dim,
        kernel_dim: source_dim - image_dim,
    })
}

/// Result of the windowed Tate-square check in one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TateReport {
    pub degree: u32,
    pub window: u32,
    pub target_dim: usize,
    pub map_rank: usize,
    pub kernel_dim: usize,
    /// The same quantities recomputed with the window enlarged by one.
    pub stable: bool,
}

impl TateReport {
    pub fn surjective(&self) -> bool {
        self.map_rank == self.target_dim
    }
}

fn tate_once(ctx: &C2Context, n: u32, k: u32) -> Result<(usize, usize, usize)> {
    if k < n {
        return Err(Error::WindowInsufficient {
            requested: (-(n as i32), n as i32),
            certified: (-(k as i32), k as i32),
        });
    }
    let big_n = ctx.n();
    let hi = (k as i32).min(big_n as i32 - n as i32);
    let lo = -(k as i32);
    let om = ctx.omega();
    let b = ctx.b_vars();
    let t = ctx.trunc();

    let mut target_dim = 0;
    for j in lo.max(-(n as i32))..=hi {
        target_dim += om.dim((n as i32 + j) as u32);
    }

    let mut cols: HashMap<(i32, Monomial), usize> = HashMap::new();
    let mut row_of = |s: &ESeries| -> Result<BitRow> {
        let mut row = BitRow::new();
        for (j, c) in s.terms() {
            if j < lo || j > hi {
                if j < lo {
                    return Err(Error::WindowInsufficient {
                        requested: (j, hi),
                        certified: (lo, hi),
                    });
                }
                continue;
            }
            for m in c.monomials() {
                let next = cols.len();
                let col = *cols.entry((j, m.clone())).or_insert(next);
                row.flip(col);
            }
        }
        Ok(row)
    };

    let mut ech = Echelon::new();
    let mut source_dim = 0;
    // Homotopy fixed points: omega e^j for j in [0, hi].
    for j in 0..=hi {
        for w in om.basis((n as i32 + j) as u32) {
            source_dim += 1;
            ech.insert(row_of(&ESeries::monomial(w.clone(), j))?);
        }
    }
    // Geometric fixed points: Omega-basis element times d-monomial.
    let phi = ctx.phi_vars();
    let d_vars: Vec<usize> = (0..big_n).map(|i| ctx.phi_d(i)).collect();
    for a in 0..=n {
        let dmonos = monomials_of_degree(phi, &d_vars, (n - a) as i64);
        if dmonos.is_empty() {
            continue;
        }
        for w in om.basis(a) {
            let wl = w.lift_to(phi)?;
            for dm in &dmonos {
                let p = wl.mul_monomial(dm);
                source_dim += 1;
                ech.insert(row_of(&phi_map(ctx, &p)?)?);
            }
        }
    }
    let _ = (b, t);
    let rank = ech.rank();
    Ok((target_dim, rank, source_dim - rank))
}

/// Checks, on the degree-`n` slice with `e`-exponents in `[-k, min(k, N - n)]`,
/// that `Omega[[e]] + Omega[d] -> Omega((e))` is onto, and computes its kernel;
/// then repeats with window `k + 1`.
pub fn check_tate_square(ctx: &C2Context, n: u32, k: u32) -> Result<TateReport> {
    if n > ctx.n() {
        return Err(Error::TruncationExceeded(format!(
            "degree {n} > {}",
            ctx.n()
        )));
    }
    let (target_dim, map_rank, kernel_dim) = tate_once(ctx, n, k)?;
    let again = tate_once(ctx, n, k + 1)?;
    Ok(TateReport {
        degree: n,
        window: k,
        target_dim,
        map_rank,
        kernel_dim,
        stable: again == (target_dim, map_rank, kernel_dim),
    })
}

/// A random homogeneous element of the `r` table of degree `n`, mixing in powers of `e`.
pub fn random_r_element(ctx: &C2Context, rng: &mut impl Rng, n: i64, terms: usize) -> F2Poly {
    let cap = ctx.n() as i64;
    let slice = r_slice(ctx, n, cap);
    let mut p = F2Poly::zero(ctx.r_vars());
    if slice.is_empty() {
        return p;
    }
    for _ in 0..terms {
        p.toggle(slice[rng.gen_range(0..slice.len())].clone());
    }
    p
}

/// Truncation context for series arithmetic over the `x(g)`.
pub fn x_trunc(ctx: &C2Context) -> TruncCtx {
    ctx.trunc()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> C2Context {
        C2Context::build(6).unwrap()
    }

    #[test]
    fn phi_of_d0_is_inverse_euler_class() {
        let c = ctx();
        let d0 = F2Poly::var(c.phi_vars(), c.phi_d(0));
        let s = phi_map(&c, &d0).unwrap();
        assert_eq!(s.terms().count(), 1);
        assert!(s.coeff(-1).unwrap().is_one());
        let one = phi_map(&c, &F2Poly::one(c.phi_vars())).unwrap();
        assert!(one.coeff(0).unwrap().is_one());
    }

    #[test]
    fn normal_form_examples() {
        let c = ctx();
        let r = c.r_vars();
        let e = c.e_var();
        let d11 = c.d_var(1, 1).unwrap();
        let d10 = c.d_var(1, 0).unwrap();
        let p = F2Poly::monomial(r, Monomial::from_pairs([(e, 1), (d11, 1)]));
        let nf = r_normal_form(&c, &p, RewriteStrategy::First).unwrap();
        assert_eq!(nf.f0.to_string(), "d(1,0) + x(2)");
        assert!(nf.f1.is_zero());

        let q = F2Poly::monomial(r, Monomial::from_pairs([(e, 1), (d10, 1)]));
        let nf = r_normal_form(&c, &q, RewriteStrategy::First).unwrap();
        assert!(nf.f0.is_zero());
        assert_eq!(nf.f1.to_string(), "d(1,0)");
        assert!(nf.satisfies_invariants(&c));
    }

    #[test]
    fn e_regular_small_degrees() {
        let c = ctx();
        for n in 0..=4 {
            let rep = check_e_regular(&c, n, c.n(), &[]).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
    }

    #[test]
    fn fake_relation_breaks_regularity() {
        let c = ctx();
        let fake = F2Poly::monomial(
            c.r_vars(),
            Monomial::from_pairs([(c.e_var(), 1), (c.d_var(1, 0).unwrap(), 1)]),
        );
        let rep = check_e_regular(&c, 2, c.n(), &[fake]).unwrap();
        assert!(!rep.passed());
    }

    #[test]
    fn tate_square_low_degrees() {
        let c = ctx();
        let r0 = check_tate_square(&c, 0, 2).unwrap();
        assert_eq!(r0.kernel_dim, 1);
        assert!(r0.surjective() && r0.stable);
        let r2 = check_tate_square(&c, 2, 4).unwrap();
        assert_eq!(r2.kernel_dim, 2);
        assert!(r2.surjective());
    }
}
