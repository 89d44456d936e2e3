//! Degreewise linear algebra over F2: bitset rows, incremental echelon forms,
//! monomial enumeration, graded ranks and quotient dimensions.

use std::collections::HashMap;
use std::sync::Arc;

use super::poly::{F2Poly, Monomial};
use super::vars::VarTable;
use crate::error::{Error, Result};

/// A growable bit vector.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    pub fn new() -> Self {
        BitRow { words: Vec::new() }
    }

    pub fn from_bits(bits: impl IntoIterator<Item = usize>) -> Self {
        let mut r = BitRow::new();
        for b in bits {
            r.flip(b);
        }
        r
    }

    pub fn get(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    pub fn flip(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] ^= 1 << (i % 64);
    }

    pub fn set(&mut self, i: usize) {
        if !self.get(i) {
            self.flip(i);
        }
    }

    pub fn xor_with(&mut self, other: &BitRow) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn lowest(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64)
                .filter(move |b| (w >> b) & 1 == 1)
                .map(move |b| i * 64 + b)
        })
    }
}

/// Incremental row echelon form; pivots are the lowest set bit of each row.
///
/// With tracking enabled every stored row remembers which inserted rows it
/// combines, so [`Echelon::solve`] can return a preimage.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<(BitRow, BitRow)>,
    pivots: HashMap<usize, usize>,
    inserted: usize,
    track: bool,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn tracking() -> Self {
        Echelon {
            track: true,
            ..Echelon::default()
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the stored rows; returns the residue and the combination used.
    pub fn reduce(&self, row: &BitRow) -> (BitRow, BitRow) {
        let mut r = row.clone();
        let mut combo = BitRow::new();
        while let Some(p) = self.first_reducible(&r) {
            let (ref prow, ref pcombo) = self.rows[self.pivots[&p]];
            r.xor_with(prow);
            if self.track {
                combo.xor_with(pcombo);
            }
        }
        (r, combo)
    }

    fn first_reducible(&self, r: &BitRow) -> Option<usize> {
        r.ones().find(|b| self.pivots.contains_key(b))
    }

    /// Inserts a row; returns true if it was independent of those already present.
    pub fn insert(&mut self, row: BitRow) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let (r, mut combo) = self.reduce(&row);
        if self.track {
            combo.flip(idx);
        }
        match r.lowest() {
            None => false,
            Some(p) => {
                self.pivots.insert(p, self.rows.len());
                self.rows.push((r, combo));
                true
            }
        }
    }

    pub fn contains(&self, row: &BitRow) -> bool {
        self.reduce(row).0.is_zero()
    }

    /// Indices of inserted rows summing to `target`, if it lies in the span.
    /// Requires tracking.
    pub fn solve(&self, target: &BitRow) -> Option<Vec<usize>> {
        assert!(self.track, "solve needs a tracking echelon");
        let (r, combo) = self.reduce(target);
        r.is_zero().then(|| combo.ones().collect())
    }
}

/// Assigns column indices to monomials on first sight.
#[derive(Clone, Debug, Default)]
pub struct MonomialIndex {
    index: HashMap<Monomial, usize>,
    list: Vec<Monomial>,
}

impl MonomialIndex {
    pub fn new() -> Self {
        MonomialIndex::default()
    }

    pub fn with_monomials(ms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut idx = MonomialIndex::new();
        for m in ms {
            idx.column(&m);
        }
        idx
    }

    pub fn column(&mut self, m: &Monomial) -> usize {
        if let Some(&c) = self.index.get(m) {
            return c;
        }
        let c = self.list.len();
        self.index.insert(m.clone(), c);
        self.list.push(m.clone());
        c
    }

    pub fn get(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn monomial(&self, c: usize) -> &Monomial {
        &self.list[c]
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn row(&mut self, p: &F2Poly) -> BitRow {
        let mut r = BitRow::new();
        for m in p.monomials() {
            let c = self.column(m);
            r.flip(c);
        }
        r
    }

    pub fn poly(&self, vars: &Arc<VarTable>, r: &BitRow) -> F2Poly {
        F2Poly::from_monomials(vars, r.ones().map(|c| self.list[c].clone()))
    }
}

/// All monomials of weighted degree exactly `n` in the given variables.
/// Every listed variable must have positive weight.
pub fn monomials_of_degree(vars: &VarTable, gens: &[usize], n: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn go(
        vars: &VarTable,
        gens: &[usize],
        k: usize,
        left: i64,
        current: &mut Vec<(usize, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        if left == 0 {
            out.push(Monomial::from_pairs(current.iter().copied()));
            return;
        }
        if k == gens.len() {
            return;
        }
        let w = vars.weight(gens[k]);
        debug_assert!(w > 0);
        let mut e = 0u32;
        while e as i64 * w <= left {
            if e > 0 {
                current.push((gens[k], e));
            }
            go(vars, gens, k + 1, left - e as i64 * w, current, out);
            if e > 0 {
                current.pop();
            }
            e += 1;
        }
    }
    if n >= 0 {
        go(vars, gens, 0, n, &mut current, &mut out);
    }
    out.sort_by(|a, b| super::poly::grlex_cmp(vars, a, b));
    out
}

/// Rank of the degree-`n` components of `vectors`.
pub fn graded_slice_rank(vectors: &[F2Poly], n: i64) -> usize {
    let mut idx = MonomialIndex::new();
    let mut ech = Echelon::new();
    for v in vectors {
        let row = idx.row(&v.homogeneous_component(n));
        ech.insert(row);
    }
    ech.rank()
}

/// Dimension of the degree-`n` part of `F2[gens] / (relations)`.
pub fn graded_quotient_dim(
    vars: &Arc<VarTable>,
    gens: &[usize],
    relations: &[F2Poly],
    n: i64,
) -> Result<usize> {
    let basis = monomials_of_degree(vars, gens, n);
    let mut idx = MonomialIndex::with_monomials(basis.iter().cloned());
    let mut ech = Echelon::new();
    let mut multipliers: HashMap<i64, Vec<Monomial>> = HashMap::new();
    for r in relations {
        let Some(d) = r.homogeneous_degree()? else {
            continue;
        };
        if d > n {
            continue;
        }
        let ms = multipliers
            .entry(n - d)
            .or_insert_with(|| monomials_of_degree(vars, gens, n - d));
        for m in ms.iter() {
            let row = idx.row(&r.mul_monomial(m));
            ech.insert(row);
        }
    }
    if idx.len() != basis.len() {
        return Err(Error::InvalidInput(
            "relation involves variables outside the generator list".into(),
        ));
    }
    Ok(basis.len() - ech.rank())
}
