//! Shared variable tables and precomputed images for the equivariant rings.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formal_group::FglContext;
use crate::kernel::{F2Poly, Monomial, TruncCtx, VarTable};
use crate::omega::OmegaBasis;

/// Everything needed to compute in the rings attached to the group of order two,
/// at a fixed truncation degree.
///
/// Variable tables:
/// - `phi`: `b1..bN, d0..d{N-1}` (geometric fixed points, coefficients in `B`);
/// - `eq`: `x(g)` for each generator, then `d(i,j)` for `i >= 1`, `i+j+1 <= N`;
/// - `r`: the `eq` table followed by the series variable `e` of weight -1.
#[derive(Clone, Debug)]
pub struct C2Context {
    fgl: FglContext,
    omega: OmegaBasis,
    phi_vars: Arc<VarTable>,
    eq_vars: Arc<VarTable>,
    r_vars: Arc<VarTable>,
    d_index: BTreeMap<(u32, u32), usize>,
    c_x: BTreeMap<(u32, i32), F2Poly>,
    eps: Vec<F2Poly>,
}

impl C2Context {
    pub fn build(n: u32) -> Result<Self> {
        Self::new(FglContext::build(n)?)
    }

    pub fn new(fgl: FglContext) -> Result<Self> {
        let n = fgl.n();
        if fgl.c_window().is_none() {
            return Err(Error::InvalidInput("reciprocal table missing".into()));
        }
        let omega = OmegaBasis::build(&fgl)?;
        let b = fgl.b_vars().clone();

        let mut phi = (*b).clone();
        for i in 0..n {
            phi.push(format!("d{i}"), i as i64 + 1)?;
        }
        let phi_vars = phi.into_arc();

        let mut eq = (**omega.x_vars()).clone();
        let mut d_index = BTreeMap::new();
        for i in 1..n {
            for j in 0..(n - i) {
                let v = eq.push(format!("d({i},{j})"), (i + j + 1) as i64)?;
                d_index.insert((i, j), v);
            }
        }
        let mut r = eq.clone();
        r.push_series("e", -1)?;
        let eq_vars = eq.into_arc();
        let r_vars = r.into_arc();

        let mut c_x = BTreeMap::new();
        for (&(i, j), p) in fgl.c_table() {
            c_x.insert((i, j), omega.express(p)?);
        }

        let mut ctx = C2Context {
            fgl,
            omega,
            phi_vars,
            eq_vars,
            r_vars,
            d_index,
            c_x,
            eps: Vec::new(),
        };
        ctx.eps = ctx.compute_epsilon_images()?;
        Ok(ctx)
    }

    /// `eps(x(g))` is the generator representative; `eps(d(i,j)) = d_i d0^j + sum_{l<j} c_{i,l} d0^{j-l}`.
    fn compute_epsilon_images(&self) -> Result<Vec<F2Poly>> {
        let mut out = Vec::with_capacity(self.eq_vars.len());
        for g in self.omega.generators() {
            out.push(g.rep.lift_to(&self.phi_vars)?);
        }
        let d0 = self.phi_d(0);
        for &(i, j) in self.d_index.keys() {
            let mut p = F2Poly::monomial(
                &self.phi_vars,
                Monomial::from_pairs([(self.phi_d(i), 1), (d0, j)]),
            );
            for l in -(i as i32) - 1..j as i32 {
                let c = self.fgl.c(i, l)?.lift_to(&self.phi_vars)?;
                p += &c.mul_monomial(&Monomial::var_pow(d0, (j as i32 - l) as u32));
            }
            out.push(p);
        }
        Ok(out)
    }

    pub fn n(&self) -> u32 {
        self.fgl.n()
    }

    pub fn trunc(&self) -> TruncCtx {
        self.fgl.trunc()
    }

    pub fn fgl(&self) -> &FglContext {
        &self.fgl
    }

    pub fn omega(&self) -> &OmegaBasis {
        &self.omega
    }

    pub fn b_vars(&self) -> &Arc<VarTable> {
        self.fgl.b_vars()
    }

    pub fn x_vars(&self) -> &Arc<VarTable> {
        self.omega.x_vars()
    }

    pub fn phi_vars(&self) -> &Arc<VarTable> {
        &self.phi_vars
    }

    pub fn eq_vars(&self) -> &Arc<VarTable> {
        &self.eq_vars
    }

    pub fn r_vars(&self) -> &Arc<VarTable> {
        &self.r_vars
    }

    /// Index of `e` in the `r` table.
    pub fn e_var(&self) -> usize {
        self.eq_vars.len()
    }

    /// Index of `d_i` in the `phi` table.
    pub fn phi_d(&self, i: u32) -> usize {
        self.b_vars().len() + i as usize
    }

    /// Index of `d(i,j)` in the `eq` (and `r`) table.
    pub fn d_var(&self, i: u32, j: u32) -> Result<usize> {
        if i == 0 {
            return Err(Error::InvalidInput("d(i,j) needs i >= 1".into()));
        }
        self.d_index.get(&(i, j)).copied().ok_or_else(|| {
            Error::TruncationExceeded(format!(
                "d({i},{j}) has degree {} > {}",
                i + j + 1,
                self.n()
            ))
        })
    }

    /// `(i, j)` for an `eq` variable that is a `d(i,j)`.
    pub fn d_of_var(&self, v: usize) -> Option<(u32, u32)> {
        self.d_index.iter().find(|(_, &w)| w == v).map(|(&k, _)| k)
    }

    pub fn d_vars(&self) -> impl Iterator<Item = ((u32, u32), usize)> + '_ {
        self.d_index.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_x_var(&self, v: usize) -> bool {
        v < self.x_vars().len()
    }

    /// `c_{i,j}` written in the generators `x(g)`.
    pub fn c_x(&self, i: u32, j: i32) -> Result<F2Poly> {
        if j < -(i as i32) - 1 {
            return Ok(F2Poly::zero(self.x_vars()));
        }
        match self.c_x.get(&(i, j)) {
            Some(p) => Ok(p.clone()),
            None => {
                // Produces the matching truncation or window error.
                self.fgl.c(i, j)?;
                Ok(F2Poly::zero(self.x_vars()))
            }
        }
    }

    /// `c_{i,j}` as an element of the `eq` table.
    pub fn c_eq(&self, i: u32, j: i32) -> Result<F2Poly> {
        self.c_x(i, j)?.lift_to(&self.eq_vars)
    }

    /// Maps a polynomial in the `x(g)` into `B`.
    pub fn x_to_b(&self, p: &F2Poly) -> Result<F2Poly> {
        self.omega.evaluate(p)
    }

    /// The embedding into geometric fixed points.
    pub fn epsilon(&self, p: &F2Poly) -> Result<F2Poly> {
        if p.vars() != &self.eq_vars {
            return Err(Error::VarTableMismatch);
        }
        Ok(p.substitute(&self.phi_vars, |v| self.eps[v].clone(), self.trunc()))
    }

    /// `eps` of a single `eq` variable.
    pub fn epsilon_var(&self, v: usize) -> &F2Poly {
        &self.eps[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_of_generators() {
        let ctx = C2Context::build(6).unwrap();
        let d10 = ctx.d_var(1, 0).unwrap();
        assert_eq!(ctx.epsilon_var(d10).to_string(), "d1 + d0^2");
        let d11 = ctx.d_var(1, 1).unwrap();
        // d1 d0 + d0^3 + c_{1,0} d0, with c_{1,0} = b2
        assert_eq!(ctx.epsilon_var(d11).to_string(), "d0*d1 + d0^3 + b2*d0");
        assert!(ctx.d_var(1, 5).is_err());
        assert!(ctx.d_var(0, 0).is_err());
    }
}
