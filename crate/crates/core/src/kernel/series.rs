//! Truncated one-variable power series with polynomial coefficients.

use std::sync::Arc;

use super::poly::{F2Poly, TruncCtx};
use super::vars::VarTable;
use crate::error::{Error, Result};

/// `sum_k coeffs[k] x^k`, known exactly through `x^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    vars: Arc<VarTable>,
    coeffs: Vec<F2Poly>,
}

impl PowerSeries {
    /// Coefficients past the last entry are taken to be unknown, so
    /// `coeffs.len() - 1` is the order.
    pub fn new(vars: &Arc<VarTable>, coeffs: Vec<F2Poly>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "series needs at least one coefficient".into(),
            ));
        }
        if coeffs.iter().any(|c| c.vars() != vars) {
            return Err(Error::VarTableMismatch);
        }
        Ok(PowerSeries {
            vars: vars.clone(),
            coeffs,
        })
    }

    /// The series `x` known through `x^order`.
    pub fn identity(vars: &Arc<VarTable>, order: usize) -> Self {
        let mut coeffs = vec![F2Poly::zero(vars); order.max(1) + 1];
        coeffs[1] = F2Poly::one(vars);
        coeffs.truncate(order + 1);
        PowerSeries {
            vars: vars.clone(),
            coeffs,
        }
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Option<&F2Poly> {
        self.coeffs.get(k)
    }

    pub fn coeffs(&self) -> &[F2Poly] {
        &self.coeffs
    }

    pub fn truncated(&self, order: usize) -> PowerSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        PowerSeries {
            vars: self.vars.clone(),
            coeffs,
        }
    }

    fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.coeffs.len())
    }

    fn cap(&self, t: TruncCtx, order: usize) -> usize {
        match t.max_degree() {
            Some(n) if n >= 0 => order.min(n as usize),
            _ => order,
        }
    }

    pub fn add(&self, other: &PowerSeries) -> Result<PowerSeries> {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|k| self.coeffs[k].add(&other.coeffs[k]))
            .collect::<Result<Vec<_>>>()?;
        Ok(PowerSeries {
            vars: self.vars.clone(),
            coeffs,
        })
    }

    /// Product, exact through the smaller order of the two factors (capped by `t`).
    pub fn mul(&self, other: &PowerSeries, t: TruncCtx) -> Result<PowerSeries> {
        let order = self.cap(t, self.order().min(other.order()));
        let vars = &self.vars;
        let mut coeffs = vec![F2Poly::zero(vars); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += &a.mul(b, TruncCtx::unbounded())?;
                }
            }
        }
        Ok(PowerSeries {
            vars: vars.clone(),
            coeffs,
        })
    }

    /// `self(g(x))`. The result order accounts for the precision of both inputs.
    pub fn compose(&self, g: &PowerSeries, t: TruncCtx) -> Result<PowerSeries> {
        if !g.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let val = g.valuation();
        let mut order = g.order();
        if val <= g.order() {
            order = order.min((self.order() + 1) * val - 1);
        }
        let order = self.cap(t, order);
        let tc = TruncCtx::new(order as i64);
        let vars = &self.vars;
        let mut acc = vec![F2Poly::zero(vars); order + 1];
        let mut power = PowerSeries::constant(vars, F2Poly::one(vars), order);
        let g = g.truncated(order);
        for (k, fk) in self.coeffs.iter().enumerate() {
            if k > 0 {
                if val.saturating_mul(k) > order {
                    break;
                }
                power = power.mul(&g, tc)?;
            }
            if fk.is_zero() {
                continue;
            }
            for (j, pj) in power.coeffs.iter().enumerate() {
                if !pj.is_zero() {
                    acc[j] += &fk.mul(pj, TruncCtx::unbounded())?;
                }
            }
        }
        Ok(PowerSeries {
            vars: vars.clone(),
            coeffs: acc,
        })
    }

    fn constant(vars: &Arc<VarTable>, c: F2Poly, order: usize) -> PowerSeries {
        let mut coeffs = vec![F2Poly::zero(vars); order + 1];
        coeffs[0] = c;
        PowerSeries {
            vars: vars.clone(),
            coeffs,
        }
    }

    /// Compositional inverse `g` with `self(g(x)) = x`, solved degree by degree.
    pub fn reversion(&self, t: TruncCtx) -> Result<PowerSeries> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        if self.order() < 1 || !self.coeffs[1].is_one() {
            return Err(Error::LeadingCoefficient);
        }
        let order = self.cap(t, self.order());
        let mut g = PowerSeries::identity(&self.vars, order);
        for k in 2..=order {
            // f(g + c x^k) = f(g) + c x^k mod x^{k+1}, and over F2 the correction is the error itself.
            let fg = self.compose(&g.truncated(k), TruncCtx::new(k as i64))?;
            let err = fg.coeffs[k].clone();
            g.coeffs[k] += &err;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Arc<VarTable> {
        VarTable::from_ring_vars([("b1", 1), ("b2", 2)])
            .unwrap()
            .into_arc()
    }

    fn series(vars: &Arc<VarTable>, text: &[&str]) -> PowerSeries {
        PowerSeries::new(
            vars,
            text.iter()
                .map(|s| F2Poly::parse(s, vars).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn compose_examples() {
        let v = table();
        let x = PowerSeries::identity(&v, 4);
        let g = series(&v, &["0", "1", "1", "0", "0"]);
        assert_eq!(x.compose(&g, TruncCtx::new(4)).unwrap(), g);

        let sq = series(&v, &["0", "0", "1", "0", "0"]);
        assert_eq!(
            sq.compose(&g, TruncCtx::new(4)).unwrap(),
            series(&v, &["0", "0", "1", "0", "1"])
        );
        assert_eq!(
            g.compose(&g, TruncCtx::new(4)).unwrap(),
            series(&v, &["0", "1", "0", "0", "1"])
        );
    }

    #[test]
    fn compose_rejects_constant_term() {
        let v = table();
        let g = series(&v, &["1", "1"]);
        assert_eq!(
            PowerSeries::identity(&v, 1).compose(&g, TruncCtx::new(1)),
            Err(Error::NonzeroConstantTerm)
        );
    }

    #[test]
    fn reversion_of_quadratic() {
        let v = table();
        let f = series(&v, &["0", "1", "b1", "0", "0", "0"]);
        let g = f.reversion(TruncCtx::new(5)).unwrap();
        // Catalan numbers mod 2: x + b1 x^2 + b1^3 x^4 + ...
        assert_eq!(g, series(&v, &["0", "1", "b1", "0", "b1^3", "0"]));
        assert_eq!(g.reversion(TruncCtx::new(5)).unwrap(), f);
    }

    #[test]
    fn reversion_rejects_bad_leading_term() {
        let v = table();
        let f = series(&v, &["0", "b1", "1"]);
        assert_eq!(
            f.reversion(TruncCtx::new(2)),
            Err(Error::LeadingCoefficient)
        );
    }
}
