//! Solver-agnostic MILP models for the disjunction "λ lies in the convex
//! hull of one simplex", in the compact biclique/coloring form and five
//! textbook baselines.

mod formulations;
mod lp;
mod verify;

pub use formulations::{
    biclique_model, build_baseline, build_gib, build_log_scheme, incremental_ordering, Baseline, DisjunctionSpec,
};
pub(crate) use formulations::add_gib_block;
pub use lp::{format_coef, lp_string, parse_lp, read_lp, write_lp};
pub use verify::{verify_formulation, VerifyReport, MAX_VERIFY_BINARIES};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Sense::Le => lhs <= rhs + tol,
            Sense::Ge => lhs >= rhs - tol,
            Sense::Eq => (lhs - rhs).abs() <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub coefs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjSense {
    Minimize,
    Maximize,
}

/// Row, column, binary and nonzero counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSize {
    pub rows: usize,
    pub cols: usize,
    pub binaries: usize,
    pub nonzeros: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MilpModel {
    pub name: String,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub sense: ObjSense,
    pub objective: Vec<(usize, f64)>,
    /// Column of the convex weight of each mesh vertex, when the model has
    /// a single disjunction block.
    #[serde(default)]
    pub lambda: Vec<usize>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl MilpModel {
    pub fn new(name: impl Into<String>) -> Self {
        MilpModel {
            name: name.into(),
            variables: Vec::new(),
            constraints: Vec::new(),
            sense: ObjSense::Minimize,
            objective: Vec::new(),
            lambda: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Adds a variable; panics on a duplicate name, which is a builder bug.
    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lb: f64, ub: f64) -> usize {
        let name = name.into();
        let id = self.variables.len();
        let prev = self.index.insert(name.clone(), id);
        assert!(prev.is_none(), "duplicate variable {name}");
        self.variables.push(Variable { name, kind, lb, ub });
        id
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> usize {
        self.add_var(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lb: f64, ub: f64) -> usize {
        self.add_var(name, VarKind::Continuous, lb, ub)
    }

    /// Adds a row, merging repeated columns and dropping zero coefficients.
    pub fn add_constraint(&mut self, name: impl Into<String>, coefs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coefs.len());
        for (j, a) in coefs {
            debug_assert!(j < self.variables.len());
            match merged.iter_mut().find(|(k, _)| *k == j) {
                Some(e) => e.1 += a,
                None => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        self.constraints.push(Constraint {
            name: name.into(),
            coefs: merged,
            sense,
            rhs,
        });
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        match self.index.get(name) {
            Some(&j) => Some(j),
            // Deserialized models carry no index.
            None if self.index.len() != self.variables.len() => self.variables.iter().position(|v| v.name == name),
            None => None,
        }
    }

    pub fn binaries(&self) -> Vec<usize> {
        (0..self.variables.len())
            .filter(|&j| self.variables[j].kind == VarKind::Binary)
            .collect()
    }

    pub fn size(&self) -> ModelSize {
        ModelSize {
            rows: self.constraints.len(),
            cols: self.variables.len(),
            binaries: self.binaries().len(),
            nonzeros: self.constraints.iter().map(|c| c.coefs.len()).sum(),
        }
    }

    /// Checks name uniqueness and column references.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashMap::new();
        for (j, v) in self.variables.iter().enumerate() {
            if seen.insert(v.name.as_str(), j).is_some() {
                return Err(Error::Validation(format!("duplicate variable {}", v.name)));
            }
            if v.lb > v.ub {
                return Err(Error::Validation(format!("empty bounds on {}", v.name)));
            }
        }
        let n = self.variables.len();
        for c in &self.constraints {
            if c.coefs.iter().any(|&(j, _)| j >= n) {
                return Err(Error::Validation(format!("row {} references an unknown column", c.name)));
            }
        }
        if self.objective.iter().any(|&(j, _)| j >= n) || self.lambda.iter().any(|&j| j >= n) {
            return Err(Error::Validation("objective or weights reference an unknown column".into()));
        }
        Ok(())
    }

    /// Largest violation of bounds, rows and integrality at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &xj) in self.variables.iter().zip(x) {
            worst = worst.max(v.lb - xj).max(xj - v.ub);
            if v.kind == VarKind::Binary {
                worst = worst.max((xj - xj.round()).abs());
            }
        }
        for c in &self.constraints {
            let lhs: f64 = c.coefs.iter().map(|&(j, a)| a * x[j]).sum();
            let gap = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        worst
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

impl PartialEq for MilpModel {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name
            && self.variables == o.variables
            && self.constraints == o.constraints
            && self.sense == o.sense
            && self.objective == o.objective
            && self.lambda == o.lambda
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_merge_and_count() {
        let mut m = MilpModel::new("t");
        let x = m.add_continuous("x", 0.0, 1.0);
        let y = m.add_binary("y");
        m.add_constraint("c", vec![(x, 1.0), (y, 2.0), (x, -1.0)], Sense::Le, 1.0);
        assert_eq!(m.constraints[0].coefs, vec![(y, 2.0)]);
        assert_eq!(m.size(), ModelSize { rows: 1, cols: 2, binaries: 1, nonzeros: 1 });
        assert_eq!(m.var("y"), Some(1));
        assert!(m.validate().is_ok());
        assert_eq!(m.max_violation(&[0.5, 1.0]), 1.0);
        assert_eq!(m.max_violation(&[0.5, 0.0]), 0.0);
    }

    #[test]
    #[should_panic(expected = "duplicate variable")]
    fn duplicate_names_panic() {
        let mut m = MilpModel::new("t");
        m.add_binary("y");
        m.add_binary("y");
    }
}
