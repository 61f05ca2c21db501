//! Decision rules for individual, disjunction and conjunction testing, plus
//! Benjamini-Hochberg screening.
//!
//! All rules reject at equality (`p <= threshold`). Step constants over the
//! ascending p values `p(1) <= ... <= p(m)`, with ties kept in battery order:
//!
//! | rule       | threshold at rank i | rejects                                   |
//! |------------|---------------------|-------------------------------------------|
//! | Bonferroni | α/m                 | every p at or below the threshold         |
//! | Šidák      | 1 − (1 − α)^(1/m)   | every p at or below the threshold         |
//! | Holm       | α/(m − i + 1)       | ranks 1..j−1, j the first failing rank    |
//! | Hochberg   | α/(m − i + 1)       | ranks 1..i for the largest passing i      |
//! | BH         | i·q/m               | ranks 1..i for the largest passing i      |

use std::fmt;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::model::{HypothesisId, Method, TestBattery, TestingMode};
use crate::rates::{bonferroni_adjust, sidak_adjust};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    Reject,
    Retain,
}

impl Verdict {
    pub fn is_reject(self) -> bool {
        self == Verdict::Reject
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Reject => "reject",
            Verdict::Retain => "retain",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum JointVerdict {
    Reject,
    Retain,
    NotApplicable,
}

impl fmt::Display for JointVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JointVerdict::Reject => "reject",
            JointVerdict::Retain => "retain",
            JointVerdict::NotApplicable => "not_applicable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Note {
    /// BH controls the false discovery rate, not the familywise error rate.
    FdrNotFwer,
    /// Constituent outcomes under disjunction testing license only the joint inference.
    JointInferenceOnly,
    /// Each constituent was tested at the joint alpha.
    UnadjustedConjunction,
}

impl Note {
    pub fn code(self) -> &'static str {
        match self {
            Note::FdrNotFwer => "FDR_CONTROL_NOT_FWER",
            Note::JointInferenceOnly => "JOINT_INFERENCE_ONLY",
            Note::UnadjustedConjunction => "CONSTITUENT_ALPHA_EQUALS_JOINT_ALPHA",
        }
    }

    pub fn text(self) -> &'static str {
        match self {
            Note::FdrNotFwer => "FDR control, not FWER",
            Note::JointInferenceOnly => {
                "significant constituents license only the joint inference, not claims about the individual constituents"
            }
            Note::UnadjustedConjunction => {
                "conjunction testing needs no alpha adjustment; each constituent is tested at the joint alpha"
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: HypothesisId,
    pub p: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    /// One entry per hypothesis, in battery order.
    pub outcomes: Vec<Outcome>,
    pub joint: JointVerdict,
    pub mode: TestingMode,
    pub method: Method,
    pub notes: Vec<Note>,
}

impl Decision {
    pub fn verdict(&self, id: &str) -> Option<Verdict> {
        self.outcomes
            .iter()
            .find(|o| o.id.as_str() == id)
            .map(|o| o.verdict)
    }

    pub fn threshold(&self, id: &str) -> Option<f64> {
        self.outcomes
            .iter()
            .find(|o| o.id.as_str() == id)
            .map(|o| o.threshold)
    }

    pub fn rejected(&self) -> impl Iterator<Item = &HypothesisId> {
        self.outcomes
            .iter()
            .filter(|o| o.verdict.is_reject())
            .map(|o| &o.id)
    }

    pub fn rejection_mask(&self) -> Vec<bool> {
        self.outcomes.iter().map(|o| o.verdict.is_reject()).collect()
    }

    /// Constituents whose rejection triggered a joint disjunction rejection.
    pub fn triggers(&self) -> Vec<&HypothesisId> {
        if self.mode == TestingMode::Disjunction {
            self.rejected().collect()
        } else {
            Vec::new()
        }
    }
}

/// Reusable buffers for the index-based rule kernel.
#[derive(Debug, Default)]
pub(crate) struct Workspace {
    order: Vec<usize>,
}

/// Fills `thresholds` and `reject` for the given p values under `method`.
/// `Method::None` compares every p with the unadjusted alpha.
pub(crate) fn apply_rule(
    method: Method,
    alpha: f64,
    ps: &[f64],
    thresholds: &mut [f64],
    reject: &mut [bool],
    ws: &mut Workspace,
) -> Result<()> {
    let m = ps.len();
    debug_assert_eq!(thresholds.len(), m);
    debug_assert_eq!(reject.len(), m);

    let single_step = |t: f64, thresholds: &mut [f64], reject: &mut [bool]| {
        for i in 0..m {
            thresholds[i] = t;
            reject[i] = ps[i] <= t;
        }
    };

    match method {
        Method::None => single_step(alpha, thresholds, reject),
        Method::Bonferroni => single_step(bonferroni_adjust(alpha, m as u64)?, thresholds, reject),
        Method::Sidak => single_step(sidak_adjust(alpha, m as u64)?, thresholds, reject),
        Method::Holm | Method::Hochberg | Method::BenjaminiHochberg => {
            let order = &mut ws.order;
            order.clear();
            order.extend(0..m);
            // stable: ties keep battery order
            order.sort_by(|&a, &b| ps[a].total_cmp(&ps[b]));

            let step = |rank: usize| match method {
                Method::BenjaminiHochberg => (rank + 1) as f64 * alpha / m as f64,
                _ => alpha / (m - rank) as f64,
            };

            let n_reject = match method {
                Method::Holm => order
                    .iter()
                    .enumerate()
                    .position(|(rank, &i)| ps[i] > step(rank))
                    .unwrap_or(m),
                _ => order
                    .iter()
                    .enumerate()
                    .rposition(|(rank, &i)| ps[i] <= step(rank))
                    .map_or(0, |rank| rank + 1),
            };

            for (rank, &i) in order.iter().enumerate() {
                thresholds[i] = step(rank);
                reject[i] = rank < n_reject;
            }
        }
    }
    Ok(())
}

fn check(battery: &TestBattery, alpha: f64) -> Result<()> {
    if battery.is_empty() {
        return Err(Error::InvalidBattery("battery has no entries".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

fn run(
    battery: &TestBattery,
    alpha: f64,
    method: Method,
) -> Result<Vec<Outcome>> {
    let ps = battery.p_values();
    let m = ps.len();
    let mut thresholds = vec![0.0; m];
    let mut reject = vec![false; m];
    apply_rule(method, alpha, &ps, &mut thresholds, &mut reject, &mut Workspace::default())?;
    Ok(battery
        .entries()
        .iter()
        .zip(thresholds.into_iter().zip(reject))
        .map(|((id, p), (threshold, r))| Outcome {
            id: id.clone(),
            p: *p,
            threshold,
            verdict: if r { Verdict::Reject } else { Verdict::Retain },
        })
        .collect())
}

/// One decision per hypothesis at the unadjusted alpha; no joint inference.
pub fn decide_individual(battery: &TestBattery, alpha_individual: f64) -> Result<Decision> {
    check(battery, alpha_individual)?;
    Ok(Decision {
        outcomes: run(battery, alpha_individual, Method::None)?,
        joint: JointVerdict::NotApplicable,
        mode: TestingMode::Individual,
        method: Method::None,
        notes: Vec::new(),
    })
}

/// Rejects the joint intersection null when at least one constituent is
/// rejected under an FWER-controlling procedure.
pub fn decide_disjunction(
    battery: &TestBattery,
    alpha_joint: f64,
    method: Method,
) -> Result<Decision> {
    if !method.controls_fwer() {
        return Err(Error::InvalidMethod(format!(
            "disjunction testing needs an FWER-controlling method (bonferroni, sidak, holm, hochberg), got {method}"
        )));
    }
    check(battery, alpha_joint)?;
    let outcomes = run(battery, alpha_joint, method)?;
    let any = outcomes.iter().any(|o| o.verdict.is_reject());
    Ok(Decision {
        outcomes,
        joint: if any {
            JointVerdict::Reject
        } else {
            JointVerdict::Retain
        },
        mode: TestingMode::Disjunction,
        method,
        notes: vec![Note::JointInferenceOnly],
    })
}

/// Rejects the joint union null only when every constituent is significant
/// at the unadjusted joint alpha.
pub fn decide_conjunction(battery: &TestBattery, alpha_joint: f64) -> Result<Decision> {
    check(battery, alpha_joint)?;
    let outcomes = run(battery, alpha_joint, Method::None)?;
    let all = outcomes.iter().all(|o| o.verdict.is_reject());
    Ok(Decision {
        outcomes,
        joint: if all {
            JointVerdict::Reject
        } else {
            JointVerdict::Retain
        },
        mode: TestingMode::Conjunction,
        method: Method::None,
        notes: vec![Note::UnadjustedConjunction],
    })
}

/// Benjamini-Hochberg step-up screening at level `q`.
pub fn apply_bh(battery: &TestBattery, q: f64) -> Result<Decision> {
    check(battery, q)?;
    Ok(Decision {
        outcomes: run(battery, q, Method::BenjaminiHochberg)?,
        joint: JointVerdict::NotApplicable,
        mode: TestingMode::Individual,
        method: Method::BenjaminiHochberg,
        notes: vec![Note::FdrNotFwer],
    })
}

/// Dispatches on mode and method.
pub fn decide(
    battery: &TestBattery,
    mode: TestingMode,
    alpha: f64,
    method: Method,
) -> Result<Decision> {
    match (mode, method) {
        (TestingMode::Individual, Method::None) => decide_individual(battery, alpha),
        (TestingMode::Individual, Method::BenjaminiHochberg) => apply_bh(battery, alpha),
        (TestingMode::Individual, m) => Err(Error::InvalidMethod(format!(
            "individual testing takes no alpha adjustment (got {m}); use bh for FDR screening"
        ))),
        (TestingMode::Conjunction, Method::None) => decide_conjunction(battery, alpha),
        (TestingMode::Conjunction, m) => Err(Error::InvalidMethod(format!(
            "conjunction testing takes no alpha adjustment (got {m})"
        ))),
        (TestingMode::Disjunction, m) => decide_disjunction(battery, alpha, m),
    }
}
