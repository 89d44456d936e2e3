//! Verification suites shared by `verify` and the acceptance tests.

use c2bordism_core::context::C2Context;
use c2bordism_core::equivariant::{
    dim_image, dim_presented, eq, gamma_underlying_series, random_class, relations, restrict,
    EqClass,
};
use c2bordism_core::extended::{
    ext_mul, ext_phi, ext_phi_raw, ext_restrict, ext_transfer, gamma, gamma_with, u_relations,
    ExtClass, Peel,
};
use c2bordism_core::fixed_points::{check_e_regular, check_tate_square};
use c2bordism_core::formal_group::{check_associativity, CheckReport, FglContext};
use c2bordism_core::kernel::{graded_slice_rank, monomials_of_degree, F2Poly, Monomial};
use c2bordism_core::omega::{is_excluded_degree, thom_dimension, OmegaBasis};
use c2bordism_core::stiefel_whitney::{sw_numbers_of_class, sw_numbers_projective_product};
use c2bordism_core::Result;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Unitality, symmetry, 2-torsion, degrees and associativity through `max_degree`.
pub fn fgl(fgl: &FglContext, max_degree: u32) -> Result<CheckReport> {
    let mut r = CheckReport::default();
    for c in fgl.validate_fgl()?.checks {
        if !c.name.starts_with("associativity") {
            r.checks.push(c);
        }
    }
    let assoc = check_associativity(fgl.b_vars(), fgl.a_table(), max_degree.min(fgl.n()))?;
    let detail = match &assoc.first_failure {
        Some(((i, j, k), p)) => format!("first failure at x^{i} y^{j} z^{k}: {p}"),
        None => String::new(),
    };
    r.push(
        format!("associativity through degree {}", assoc.max_degree),
        assoc.passed(),
        detail,
    );
    Ok(r)
}

/// The reciprocal table, including the pattern of negative-exponent entries.
pub fn reciprocal(fgl: &FglContext) -> Result<CheckReport> {
    fgl.validate_c_table()
}

/// `dim Omega_n` against the partition count, and one new generator per admissible degree.
pub fn omega(fgl: &FglContext, max_degree: u32) -> CheckReport {
    let mut r = CheckReport::default();
    match OmegaBasis::build(fgl) {
        Err(e) => r.push("Omega_* bases", false, e.to_string()),
        Ok(om) => {
            for d in 0..=max_degree.min(fgl.n()) {
                let want = thom_dimension(d) as usize;
                r.push(
                    format!("dim Omega_{d} = {want}"),
                    om.dim(d) == want,
                    format!("computed {}", om.dim(d)),
                );
                if d >= 1 {
                    let gens = om.generators().iter().filter(|g| g.degree == d).count();
                    let want = usize::from(!is_excluded_degree(d));
                    r.push(
                        format!("generators in degree {d} = {want}"),
                        gens == want,
                        format!("found {gens}"),
                    );
                }
            }
        }
    }
    r
}

/// Surjectivity onto the windowed Tate slice, kernel against the image dimension, and stability.
pub fn tate(ctx: &C2Context, max_degree: u32, window: u32) -> Result<CheckReport> {
    let mut r = CheckReport::default();
    for n in 0..=max_degree.min(ctx.n()) {
        let k = window.max(n);
        let rep = check_tate_square(ctx, n, k)?;
        let img = dim_image(ctx, n as i64)?;
        r.push(
            format!("Tate square degree {n}"),
            rep.surjective() && rep.stable && rep.kernel_dim == img,
            format!(
                "window {k}: rank {}/{}, kernel {}, image dim {img}, stable {}",
                rep.map_rank, rep.target_dim, rep.kernel_dim, rep.stable
            ),
        );
    }
    Ok(r)
}

/// Multiplication by `e` is injective on every slice through `max_degree`.
pub fn e_regular(ctx: &C2Context, max_degree: u32, window: u32) -> Result<CheckReport> {
    let mut r = CheckReport::default();
    for n in 0..=max_degree.min(ctx.n()) {
        let rep = check_e_regular(ctx, n as i64, window, &[])?;
        r.push(
            format!("e-regular degree {n}"),
            rep.passed(),
            format!(
                "source dim {}, kernel dim {}, e-window {}",
                rep.source_dim, rep.kernel_dim, rep.window
            ),
        );
    }
    Ok(r)
}

/// The embedding kills both relation families.
pub fn relations_killed(ctx: &C2Context) -> Result<CheckReport> {
    let mut r = CheckReport::default();
    let rels = relations(ctx)?;
    let bad = rels
        .iter()
        .map(|p| ctx.epsilon(p).map(|img| (p, img)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .find(|(_, img)| !img.is_zero());
    r.push(
        format!("eps kills the {} product relations", rels.len()),
        bad.is_none(),
        bad.map(|(p, img)| format!("{p} -> {img}"))
            .unwrap_or_default(),
    );
    let urels = u_relations(ctx)?;
    let mut bad = None;
    for rel in &urels {
        let img = ext_phi_raw(ctx, rel)?;
        if !img.is_zero() {
            bad = Some(format!("u({}) + a*({}) -> {img}", rel[0].m, rel[1].m));
            break;
        }
    }
    r.push(
        format!(
            "normalized fixed points kill the {} u-relations",
            urels.len()
        ),
        bad.is_none(),
        bad.unwrap_or_default(),
    );
    Ok(r)
}

/// `dim_presented(n) = dim_image(n)`; the details form the per-degree table.
pub fn completeness(ctx: &C2Context, max_degree: u32) -> Result<CheckReport> {
    let mut r = CheckReport::default();
    for n in 0..=max_degree.min(ctx.n()) as i64 {
        let p = dim_presented(ctx, n)?;
        let i = dim_image(ctx, n)?;
        r.push(
            format!("degree {n}"),
            p == i,
            format!("presented {p}, image {i}"),
        );
    }
    Ok(r)
}

/// `Gamma` does not depend on which factor is peeled, for every pair of generators in range.
pub fn gamma_pairs(ctx: &C2Context) -> Result<CheckReport> {
    let mut r = CheckReport::default();
    let gens: Vec<(u32, u32)> = ctx.d_vars().map(|(k, _)| k).collect();
    let mut count = 0;
    let mut bad = None;
    for (a, &(i, j)) in gens.iter().enumerate() {
        for &(k, l) in &gens[a..] {
            if (i + j + 1) + (k + l + 1) + 1 > ctx.n() {
                continue;
            }
            let m = EqClass::d(ctx, i, j)?.mul(ctx, &EqClass::d(ctx, k, l)?)?;
            count += 1;
            if !eq(
                ctx,
                &gamma_with(ctx, &m, Peel::First)?,
                &gamma_with(ctx, &m, Peel::Last)?,
            )? {
                bad = Some(format!("d({i},{j})*d({k},{l})"));
                break;
            }
        }
    }
    r.push(
        format!("Gamma well defined on {count} generator pairs"),
        bad.is_none(),
        bad.unwrap_or_default(),
    );
    Ok(r)
}

/// Leibniz law and series consistency on random classes of degree `<= max_degree`.
pub fn gamma_random(
    ctx: &C2Context,
    samples: usize,
    max_degree: i64,
    seed: u64,
) -> Result<CheckReport> {
    let mut r = CheckReport::default();
    let mut rng = StdRng::seed_from_u64(seed);
    let top = max_degree.min(ctx.n() as i64);
    let mut leibniz_bad = None;
    let mut series_bad = None;
    let mut peel_bad = None;
    for _ in 0..samples {
        let dm = rng.gen_range(0..=top);
        let dn = rng.gen_range(0..=(ctx.n() as i64 - 1 - dm).min(top));
        let m = random_class(ctx, &mut rng, dm, 3);
        let n = random_class(ctx, &mut rng, dn, 3);
        let mn = m.mul(ctx, &n)?;
        let lhs = gamma(ctx, &mn)?;
        let rm = EqClass::from_omega(ctx, &restrict(ctx, &m)?, dm)?;
        let rhs = rm
            .mul(ctx, &gamma(ctx, &n)?)?
            .add(&gamma(ctx, &m)?.mul(ctx, &n)?)?;
        if leibniz_bad.is_none() && !eq(ctx, &lhs, &rhs)? {
            leibniz_bad = Some(format!("m = {m}, n = {n}"));
        }
        if peel_bad.is_none() && !eq(ctx, &lhs, &gamma_with(ctx, &mn, Peel::Last)?)? {
            peel_bad = Some(format!("{mn}"));
        }
        let series = gamma_underlying_series(ctx, &m, 4)?;
        let mut g = m.clone();
        for (k, entry) in series.iter().enumerate() {
            if restrict(ctx, &g)? != *entry {
                series_bad.get_or_insert(format!("m = {m}, entry {k}"));
                break;
            }
            if g.degree() < ctx.n() as i64 {
                g = gamma(ctx, &g)?;
            }
        }
    }
    r.push(
        format!("Gamma peeling order ({samples} products)"),
        peel_bad.is_none(),
        peel_bad.unwrap_or_default(),
    );
    r.push(
        format!("Leibniz law ({samples} pairs)"),
        leibniz_bad.is_none(),
        leibniz_bad.unwrap_or_default(),
    );
    r.push(
        format!("restrict(Gamma^n m) = series entry n ({samples} classes)"),
        series_bad.is_none(),
        series_bad.unwrap_or_default(),
    );
    Ok(r)
}

fn random_omega(ctx: &C2Context, rng: &mut StdRng, d: i64) -> F2Poly {
    let x = ctx.x_vars();
    if d < 0 {
        return F2Poly::zero(x);
    }
    let monos = ctx.omega().x_monomials(d as u32);
    let mut p = F2Poly::zero(x);
    if !monos.is_empty() {
        for _ in 0..2 {
            p.toggle(monos[rng.gen_range(0..monos.len())].clone());
        }
    }
    p
}

/// A random normal form of bidegree `(s, t)`.
pub fn random_ext(ctx: &C2Context, rng: &mut StdRng, s: u32, t: i64) -> Result<ExtClass> {
    let lambdas = (0..s)
        .map(|j| random_omega(ctx, rng, t - (s - j) as i64))
        .collect();
    let m = random_class(ctx, rng, t, 2);
    ExtClass::new(ctx, s, t, lambdas, m)
}

/// Bigrading, normalized fixed points and restriction on random products with
/// total `s <= max_s`, `t <= max_t`; also the vanishing transfer.
pub fn extended_random(
    ctx: &C2Context,
    samples: usize,
    max_s: u32,
    max_t: i64,
    seed: u64,
) -> Result<CheckReport> {
    let mut r = CheckReport::default();
    let mut rng = StdRng::seed_from_u64(seed);
    let max_t = max_t.min(ctx.n() as i64);
    let tr = ctx.trunc();
    let (mut grading_bad, mut phi_bad, mut res_bad) = (None, None, None);
    for _ in 0..samples {
        let s1 = rng.gen_range(0..=max_s);
        let s2 = rng.gen_range(0..=max_s - s1);
        let t1 = rng.gen_range(0..=max_t);
        let t2 = rng.gen_range(0..=max_t - t1);
        let x = random_ext(ctx, &mut rng, s1, t1)?;
        let y = random_ext(ctx, &mut rng, s2, t2)?;
        let xy = ext_mul(ctx, &x, &y)?;
        if grading_bad.is_none() && (xy.sigma_weight() != s1 + s2 || xy.degree() != t1 + t2) {
            grading_bad = Some(format!(
                "({x}) * ({y}) -> ({}, {})",
                xy.sigma_weight(),
                xy.degree()
            ));
        }
        let phi_prod = ext_phi(ctx, &x)?.mul(&ext_phi(ctx, &y)?, tr)?;
        if phi_bad.is_none() && ext_phi(ctx, &xy)? != phi_prod {
            phi_bad = Some(format!("({x}) * ({y})"));
        }
        let (rx, ux) = ext_restrict(ctx, &x)?;
        let (ry, uy) = ext_restrict(ctx, &y)?;
        let (rxy, uxy) = ext_restrict(ctx, &xy)?;
        if res_bad.is_none() && (uxy != ux + uy || rxy != rx.mul(&ry, tr)?) {
            res_bad = Some(format!("({x}) * ({y})"));
        }
    }
    r.push(
        format!("bigrading of {samples} products (s <= {max_s}, t <= {max_t})"),
        grading_bad.is_none(),
        grading_bad.unwrap_or_default(),
    );
    r.push(
        "normalized fixed points multiplicative",
        phi_bad.is_none(),
        phi_bad.unwrap_or_default(),
    );
    r.push(
        "restriction to Omega_*[u] multiplicative",
        res_bad.is_none(),
        res_bad.unwrap_or_default(),
    );
    let mut transfer_ok = true;
    for d in 0..=max_t {
        for s in 0..=max_s {
            let w = random_omega(ctx, &mut rng, d);
            let t = ext_transfer(ctx, &w, s);
            transfer_ok &= t.lambdas().iter().all(|l| l.is_zero()) && t.m().is_literally_zero();
        }
    }
    r.push("transfer vanishes", transfer_ok, "");
    Ok(r)
}

/// Underlying classes of the twisted projective spaces against real projective spaces.
pub fn stiefel_whitney(ctx: &C2Context) -> Result<CheckReport> {
    let mut r = CheckReport::default();
    let top = 6.min(ctx.n() - 1);
    for i in 1..=top {
        let c = ctx.fgl().c(i, 0)?;
        let ours = sw_numbers_of_class(ctx.omega(), &c, i + 1)?;
        let rp = sw_numbers_projective_product(&[i + 1])?;
        let mismatch: Vec<String> = rp
            .values
            .iter()
            .filter(|(k, v)| ours.values.get(*k) != Some(v))
            .map(|(k, v)| format!("w{k:?}: RP {} vs c {}", u8::from(*v), u8::from(!*v)))
            .collect();
        let detail = if mismatch.is_empty() {
            format!("c({i},0) = {c}")
        } else {
            format!("c({i},0) = {c}; {}", mismatch.join(", "))
        };
        r.push(
            format!("SW numbers of c({i},0) = RP^{}", i + 1),
            mismatch.is_empty(),
            detail,
        );
    }
    for k in [1, 3] {
        r.push(
            format!("RP^{k} bounds"),
            sw_numbers_projective_product(&[k])?.is_zero(),
            "",
        );
    }
    Ok(r)
}

/// Everything `verify --suite extended` runs.
pub fn extended(ctx: &C2Context, max_degree: u32, seed: u64) -> Result<CheckReport> {
    let mut r = relations_killed(ctx)?;
    r.checks.retain(|c| c.name.contains("u-relations"));
    r.extend(gamma_pairs(ctx)?);
    r.extend(gamma_random(ctx, 50, 4.min(max_degree as i64), seed)?);
    r.extend(extended_random(ctx, 100, 4, max_degree as i64, seed)?);
    Ok(r)
}

/// Rank of the normalized fixed-point map on the bidegree `(s, t)` part of the extended ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtPhiRank {
    pub s: u32,
    pub t: i64,
    pub dim: usize,
    pub rank: usize,
}

impl ExtPhiRank {
    pub fn injective(&self) -> bool {
        self.rank == self.dim
    }
}

/// The image is spanned by `lambda d0^k` (`1 <= k <= s`, `lambda` a monomial of `Omega_{t-k}`)
/// and the image of `Omega^{C2}_t`.
pub fn ext_phi_rank(ctx: &C2Context, s: u32, t: i64) -> Result<ExtPhiRank> {
    let xv = ctx.x_vars();
    let x_gens: Vec<usize> = (0..xv.len()).collect();
    let eq_gens: Vec<usize> = (0..ctx.eq_vars().len()).collect();
    let d0 = ctx.phi_d(0);
    let mut images = Vec::new();
    let mut dim = dim_image(ctx, t)?;
    for k in 1..=s as i64 {
        if t - k < 0 {
            continue;
        }
        for m in monomials_of_degree(xv, &x_gens, t - k) {
            let b = ctx
                .x_to_b(&F2Poly::monomial(xv, m))?
                .lift_to(ctx.phi_vars())?;
            images.push(b.mul_monomial(&Monomial::var_pow(d0, k as u32)));
            dim += 1;
        }
    }
    for m in monomials_of_degree(ctx.eq_vars(), &eq_gens, t) {
        images.push(ctx.epsilon(&F2Poly::monomial(ctx.eq_vars(), m))?);
    }
    let rank = graded_slice_rank(&images, t);
    Ok(ExtPhiRank { s, t, dim, rank })
}
