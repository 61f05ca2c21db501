use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Method;
use crate::normal::Sides;

pub const DEFAULT_REPS: u64 = 100_000;
pub const MAX_REPS: u64 = 100_000_000;

/// Dependence structure among the k test statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Design {
    #[default]
    Independent,
    /// Common-factor model with pairwise correlation `rho`.
    Equicorrelated { rho: f64 },
    /// Every treatment group is compared with one shared control group,
    /// giving pairwise correlation 1/2.
    SharedControl,
}

impl Design {
    pub fn label(&self) -> String {
        match self {
            Design::Independent => "independent".into(),
            Design::Equicorrelated { rho } => format!("equicorrelated(rho={rho})"),
            Design::SharedControl => "shared_control".into(),
        }
    }
}

/// Full Monte Carlo specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub k: usize,
    /// `true` where the null hypothesis holds.
    pub null_pattern: Vec<bool>,
    /// Standardized effects; zero wherever the null holds.
    pub deltas: Vec<f64>,
    /// Per-group sample size.
    pub n: u64,
    pub design: Design,
    pub sides: Sides,
    pub alpha_joint: f64,
    /// Procedure used for the disjunction decision.
    pub method: Method,
    pub reps: u64,
    pub seed: u64,
}

impl Scenario {
    /// All-null, independent, one-sided scenario with Šidák disjunction.
    pub fn all_null(k: usize, alpha_joint: f64, reps: u64, seed: u64) -> Self {
        Scenario {
            k,
            null_pattern: vec![true; k],
            deltas: vec![0.0; k],
            n: 50,
            design: Design::Independent,
            sides: Sides::OneSided,
            alpha_joint,
            method: Method::Sidak,
            reps,
            seed,
        }
    }

    pub fn with_design(mut self, design: Design) -> Self {
        self.design = design;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    /// Sets the effect of every test; tests with a nonzero effect become false nulls.
    pub fn with_effects(mut self, deltas: Vec<f64>) -> Self {
        self.null_pattern = deltas.iter().map(|&d| d == 0.0).collect();
        self.deltas = deltas;
        self
    }

    pub fn all_null_pattern(&self) -> bool {
        self.null_pattern.iter().all(|&b| b)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.null_pattern.len() != self.k {
            return bad(format!(
                "null_pattern has {} entries, expected k = {}",
                self.null_pattern.len(),
                self.k
            ));
        }
        if self.deltas.len() != self.k {
            return bad(format!(
                "deltas has {} entries, expected k = {}",
                self.deltas.len(),
                self.k
            ));
        }
        for (i, (&null, &d)) in self.null_pattern.iter().zip(&self.deltas).enumerate() {
            if !d.is_finite() {
                return bad(format!("deltas[{i}] is not finite"));
            }
            if null && d != 0.0 {
                return bad(format!("deltas[{i}] = {d} but null_pattern[{i}] is true"));
            }
        }
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if let Design::Equicorrelated { rho } = self.design {
            if !(0.0..1.0).contains(&rho) {
                return bad(format!("rho must lie in [0, 1), got {rho}"));
            }
        }
        if !(self.alpha_joint > 0.0 && self.alpha_joint < 1.0) {
            return bad(format!(
                "alpha_joint must lie in (0, 1), got {}",
                self.alpha_joint
            ));
        }
        if !self.method.controls_fwer() {
            return bad(format!(
                "method must be an FWER-controlling procedure for the disjunction decision, got {}",
                self.method
            ));
        }
        if self.reps == 0 || self.reps > MAX_REPS {
            return bad(format!("reps must lie in [1, {MAX_REPS}], got {}", self.reps));
        }
        Ok(())
    }
}
