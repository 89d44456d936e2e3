//! The cobordism ring `Omega_*` as the subring of `B` generated by the `a_{i,j}`:
//! degreewise bases, polynomial generators `x(g)`, and expression in them.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formal_group::FglContext;
use crate::kernel::{
    monomials_of_degree, BitRow, Echelon, F2Poly, Monomial, MonomialIndex, TruncCtx, VarTable,
};

/// True for degrees of the form `2^k - 1`, which carry no generator.
pub fn is_excluded_degree(n: u32) -> bool {
    (n + 1).is_power_of_two()
}

/// Number of multisets of positive parts, none excluded, summing to `n`.
pub fn partition_count(n: u32, excluded: impl Fn(u32) -> bool) -> u64 {
    let mut ways = vec![0u64; n as usize + 1];
    ways[0] = 1;
    for part in 1..=n {
        if excluded(part) {
            continue;
        }
        for total in part as usize..=n as usize {
            ways[total] += ways[total - part as usize];
        }
    }
    ways[n as usize]
}

/// `dim Omega_n` predicted by the polynomial structure.
pub fn thom_dimension(n: u32) -> u64 {
    partition_count(n, is_excluded_degree)
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub degree: u32,
    /// The `a_{i,j}` chosen as representative.
    pub source: (u32, u32),
    pub rep: F2Poly,
}

#[derive(Clone, Debug)]
struct Slice {
    basis: Vec<F2Poly>,
    x_monomials: Vec<Monomial>,
    echelon: Echelon,
    columns: MonomialIndex,
}

/// Bases of `Omega_n` inside `B` for `n <= N`, generators and expression data.
#[derive(Clone, Debug)]
pub struct OmegaBasis {
    n: u32,
    b: Arc<VarTable>,
    a_vars: Arc<VarTable>,
    a_sources: Vec<(u32, u32)>,
    generators: Vec<Generator>,
    x_vars: Arc<VarTable>,
    slices: Vec<Slice>,
}

impl OmegaBasis {
    /// Computes the bases and checks every dimension against [`thom_dimension`],
    /// then chooses generators greedily.
    pub fn build(fgl: &FglContext) -> Result<Self> {
        let mut basis = Self::compute_omega_basis(fgl)?;
        basis.choose_generators(fgl)?;
        Ok(basis)
    }

    fn compute_omega_basis(fgl: &FglContext) -> Result<Self> {
        let n = fgl.n();
        let b = fgl.b_vars().clone();
        let t = fgl.trunc();
        let mut a_vars = VarTable::new();
        let mut a_sources = Vec::new();
        let mut images = Vec::new();
        for d in 1..=n {
            for i in 1..=d.div_ceil(2) {
                let j = d + 1 - i;
                a_vars.push(format!("a({i},{j})"), d as i64)?;
                a_sources.push((i, j));
                images.push(fgl.a(i, j)?);
            }
        }
        let a_vars = a_vars.into_arc();
        let all: Vec<usize> = (0..a_vars.len()).collect();
        let mut cache: HashMap<Monomial, F2Poly> = HashMap::new();
        let mut slices = Vec::new();
        for d in 0..=n {
            let mut ech = Echelon::new();
            let mut cols = MonomialIndex::new();
            let mut basis = Vec::new();
            for m in monomials_of_degree(&a_vars, &all, d as i64) {
                let img = monomial_image(&m, &images, &b, t, &mut cache)?;
                if ech.insert(cols.row(&img)) {
                    basis.push(img);
                }
            }
            let expected = thom_dimension(d) as usize;
            if basis.len() != expected {
                return Err(Error::DimensionMismatch {
                    degree: d as i64,
                    computed: basis.len(),
                    expected,
                });
            }
            slices.push(Slice {
                basis,
                x_monomials: Vec::new(),
                echelon: Echelon::tracking(),
                columns: MonomialIndex::new(),
            });
        }
        Ok(OmegaBasis {
            n,
            b,
            a_vars,
            a_sources,
            generators: Vec::new(),
            x_vars: VarTable::new().into_arc(),
            slices,
        })
    }

    fn choose_generators(&mut self, fgl: &FglContext) -> Result<()> {
        let t = fgl.trunc();
        let mut gens: Vec<Generator> = Vec::new();
        for g in 1..=self.n {
            // Decomposables: monomials in the generators chosen so far.
            let x_vars = x_table(&gens)?;
            let ids: Vec<usize> = (0..x_vars.len()).collect();
            let mut ech = Echelon::new();
            let mut cols = MonomialIndex::new();
            for m in monomials_of_degree(&x_vars, &ids, g as i64) {
                ech.insert(cols.row(&x_image(&m, &gens, &self.b, t)?));
            }
            let dim = self.slices[g as usize].basis.len();
            let new = dim - ech.rank();
            let expected = usize::from(!is_excluded_degree(g));
            if new != expected {
                return Err(Error::DimensionMismatch {
                    degree: g as i64,
                    computed: new,
                    expected,
                });
            }
            if new == 0 {
                continue;
            }
            let mut chosen = None;
            for (v, &(i, j)) in self.a_sources.iter().enumerate() {
                if self.a_vars.weight(v) != g as i64 {
                    continue;
                }
                let rep = fgl.a(i, j)?;
                if !ech.contains(&cols.row(&rep)) {
                    chosen = Some(Generator {
                        degree: g,
                        source: (i, j),
                        rep,
                    });
                    break;
                }
            }
            let gen = chosen.ok_or(Error::DimensionMismatch {
                degree: g as i64,
                computed: 0,
                expected: 1,
            })?;
            gens.push(gen);
        }
        self.x_vars = x_table(&gens)?;
        self.generators = gens;

        let ids: Vec<usize> = (0..self.x_vars.len()).collect();
        for d in 0..=self.n {
            let slice = &mut self.slices[d as usize];
            slice.x_monomials = monomials_of_degree(&self.x_vars, &ids, d as i64);
            for m in &slice.x_monomials {
                let img = x_image(m, &self.generators, &self.b, t)?;
                let row = slice.columns.row(&img);
                if !slice.echelon.insert(row) {
                    return Err(Error::DimensionMismatch {
                        degree: d as i64,
                        computed: slice.echelon.rank(),
                        expected: slice.x_monomials.len(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn b_vars(&self) -> &Arc<VarTable> {
        &self.b
    }

    /// Variables `x(g)`, one per generator, in increasing degree.
    pub fn x_vars(&self) -> &Arc<VarTable> {
        &self.x_vars
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, degree: u32) -> Option<&Generator> {
        self.generators.iter().find(|g| g.degree == degree)
    }

    /// Index of `x(g)` in [`OmegaBasis::x_vars`].
    pub fn x_index(&self, degree: u32) -> Option<usize> {
        self.generators.iter().position(|g| g.degree == degree)
    }

    pub fn basis(&self, d: u32) -> &[F2Poly] {
        &self.slices[d as usize].basis
    }

    pub fn dim(&self, d: u32) -> usize {
        self.slices[d as usize].basis.len()
    }

    /// Monomials in the `x(g)` of degree `d`; they form a basis of `Omega_d`.
    pub fn x_monomials(&self, d: u32) -> &[Monomial] {
        &self.slices[d as usize].x_monomials
    }

    /// Substitutes generator representatives into a polynomial in the `x(g)`.
    pub fn evaluate(&self, p: &F2Poly) -> Result<F2Poly> {
        if p.vars() != &self.x_vars {
            return Err(Error::VarTableMismatch);
        }
        let t = TruncCtx::new(self.n as i64);
        let mut out = F2Poly::zero(&self.b);
        for m in p.monomials() {
            out += &x_image(m, &self.generators, &self.b, t)?;
        }
        Ok(out)
    }

    /// Writes a homogeneous element of `B` as a polynomial in the `x(g)`.
    pub fn express(&self, elt: &F2Poly) -> Result<F2Poly> {
        if elt.vars() != &self.b {
            return Err(Error::VarTableMismatch);
        }
        let Some(d) = elt.homogeneous_degree()? else {
            return Ok(F2Poly::zero(&self.x_vars));
        };
        if d > self.n as i64 {
            return Err(Error::TruncationExceeded(format!(
                "degree {d} exceeds truncation {}",
                self.n
            )));
        }
        if d < 0 {
            return Err(Error::NotInSubring);
        }
        let slice = &self.slices[d as usize];
        let mut row = BitRow::new();
        for m in elt.monomials() {
            match slice.columns.get(m) {
                Some(c) => row.flip(c),
                None => return Err(Error::NotInSubring),
            }
        }
        let combo = slice.echelon.solve(&row).ok_or(Error::NotInSubring)?;
        Ok(F2Poly::from_monomials(
            &self.x_vars,
            combo.into_iter().map(|k| slice.x_monomials[k].clone()),
        ))
    }

    /// [`OmegaBasis::express`] for elements that need not be homogeneous.
    pub fn express_any(&self, elt: &F2Poly) -> Result<F2Poly> {
        let mut out = F2Poly::zero(&self.x_vars);
        let mut degrees: Vec<i64> = elt.monomials().map(|m| m.degree(&self.b)).collect();
        degrees.sort_unstable();
        degrees.dedup();
        for d in degrees {
            out += &self.express(&elt.homogeneous_component(d))?;
        }
        Ok(out)
    }
}

fn x_table(gens: &[Generator]) -> Result<Arc<VarTable>> {
    Ok(VarTable::from_ring_vars(
        gens.iter()
            .map(|g| (format!("x({})", g.degree), g.degree as i64)),
    )?
    .into_arc())
}

fn x_image(m: &Monomial, gens: &[Generator], b: &Arc<VarTable>, t: TruncCtx) -> Result<F2Poly> {
    let mut out = F2Poly::one(b);
    for (v, e) in m.factors() {
        for _ in 0..e {
            out = out.mul(&gens[v].rep, t)?;
        }
    }
    Ok(out)
}

fn monomial_image(
    m: &Monomial,
    images: &[F2Poly],
    b: &Arc<VarTable>,
    t: TruncCtx,
    cache: &mut HashMap<Monomial, F2Poly>,
) -> Result<F2Poly> {
    if m.is_one() {
        return Ok(F2Poly::one(b));
    }
    if let Some(p) = cache.get(m) {
        return Ok(p.clone());
    }
    let v = m.max_var().expect("non-unit monomial");
    let rest = m
        .div(&Monomial::var(v))
        .expect("contains its largest variable");
    let img = monomial_image(&rest, images, b, t, cache)?.mul(&images[v], t)?;
    cache.insert(m.clone(), img.clone());
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        assert_eq!(thom_dimension(0), 1);
        assert_eq!(thom_dimension(4), 2);
        assert_eq!(thom_dimension(7), 1);
        assert_eq!(partition_count(4, |_| false), 5);
    }

    #[test]
    fn low_degree_structure() {
        let fgl = FglContext::build(6).unwrap();
        let om = OmegaBasis::build(&fgl).unwrap();
        assert_eq!(om.dim(1), 0);
        assert_eq!(om.dim(4), 2);
        assert_eq!(om.generator(2).unwrap().source, (1, 2));
        assert!(om.generator(3).is_none());
        let degrees: Vec<u32> = om.generators().iter().map(|g| g.degree).collect();
        assert_eq!(degrees, vec![2, 4, 5, 6]);
    }

    #[test]
    fn express_examples() {
        let fgl = FglContext::build(6).unwrap();
        let om = OmegaBasis::build(&fgl).unwrap();
        let x2 = fgl.a(1, 2).unwrap();
        assert_eq!(om.express(&x2).unwrap().to_string(), "x(2)");
        let sq = &x2 * &x2;
        assert_eq!(om.express(&sq).unwrap().to_string(), "x(2)^2");
        let b1 = F2Poly::var(fgl.b_vars(), 0);
        assert_eq!(om.express(&b1), Err(Error::NotInSubring));
    }
}
