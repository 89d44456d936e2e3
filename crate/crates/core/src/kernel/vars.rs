//! Variable tables: the naming and grading of the generators of a polynomial ring.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An ordered list of named, weighted variables.
///
/// Ring variables carry weight `>= 1`. Series variables (such as the Euler
/// class `e`) may carry any weight, and are excluded from truncation degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
    weights: Vec<i64>,
    series: Vec<bool>,
    index: HashMap<String, usize>,
}

impl VarTable {
    pub fn new() -> Self {
        VarTable {
            names: Vec::new(),
            weights: Vec::new(),
            series: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Appends a ring variable. Weight must be at least 1.
    pub fn push(&mut self, name: impl Into<String>, weight: i64) -> Result<usize> {
        if weight < 1 {
            return Err(Error::InvalidInput(format!(
                "ring variable weight must be >= 1, got {weight}"
            )));
        }
        self.insert(name.into(), weight, false)
    }

    /// Appends a series variable, which may have any weight.
    pub fn push_series(&mut self, name: impl Into<String>, weight: i64) -> Result<usize> {
        self.insert(name.into(), weight, true)
    }

    fn insert(&mut self, name: String, weight: i64, series: bool) -> Result<usize> {
        if self.index.contains_key(&name) {
            return Err(Error::InvalidInput(format!(
                "duplicate variable name `{name}`"
            )));
        }
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.weights.push(weight);
        self.series.push(series);
        Ok(id)
    }

    pub fn from_ring_vars<S: Into<String>>(
        vars: impl IntoIterator<Item = (S, i64)>,
    ) -> Result<Self> {
        let mut t = VarTable::new();
        for (name, w) in vars {
            t.push(name, w)?;
        }
        Ok(t)
    }

    pub fn into_arc(self) -> Arc<VarTable> {
        Arc::new(self)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn weight(&self, v: usize) -> i64 {
        self.weights[v]
    }

    pub fn is_series(&self, v: usize) -> bool {
        self.series[v]
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Indices of the ring (non-series) variables.
    pub fn ring_vars(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&v| !self.series[v])
    }

    /// True when `self` agrees with the first `self.len()` entries of `other`.
    pub fn is_prefix_of(&self, other: &VarTable) -> bool {
        self.len() <= other.len()
            && (0..self.len()).all(|v| {
                self.names[v] == other.names[v]
                    && self.weights[v] == other.weights[v]
                    && self.series[v] == other.series[v]
            })
    }
}

impl Default for VarTable {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_weights() {
        let mut t = VarTable::new();
        t.push("b1", 1).unwrap();
        assert!(t.push("b1", 2).is_err());
        assert!(t.push("z", 0).is_err());
        assert!(t.push_series("e", -1).is_ok());
        assert!(t.is_series(1));
        assert_eq!(t.ring_vars().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn prefix_relation() {
        let a = VarTable::from_ring_vars([("p", 1), ("q", 1)]).unwrap();
        let b = VarTable::from_ring_vars([("p", 1), ("q", 1), ("r", 2)]).unwrap();
        assert!(a.is_prefix_of(&b));
        assert!(!b.is_prefix_of(&a));
    }
}
