//! Multiple-testing decision engine.
//!
//! Three ways of running several significance tests are supported:
//!
//! * **individual** testing: one decision per hypothesis at an unadjusted alpha;
//! * **disjunction** (union-intersection) testing: the joint null is rejected
//!   when any constituent is significant, so constituent alphas must shrink;
//! * **conjunction** (intersection-union) testing: the joint null is rejected
//!   only when every constituent is significant, at the unadjusted alpha.
//!
//! [`rates`] holds the closed-form error rates, [`decision`] applies the rules
//! to a battery of p values and [`sim`] checks both by simulation.

pub mod classify;
pub mod decision;
pub mod error;
pub mod model;
pub mod normal;
pub mod rates;
pub mod sim;

pub use classify::{classify_testing_mode, ClassificationInput, Recommendation, RuleCode};
pub use decision::{
    apply_bh, decide, decide_conjunction, decide_disjunction, decide_individual, Decision,
    JointVerdict, Note, Outcome, Verdict,
};
pub use error::{Error, Result};
pub use model::{
    validate_family, AlphaConfig, FamilySpec, HypothesisId, Method, Severity, TestBattery,
    TestingMode, ValidationReport,
};
pub use normal::{normal_cdf, normal_quantile, p_from_z, Sides};
pub use rates::{
    bonferroni_adjust, conjunction_power, conjunction_type2, fwer_independent, optimal_alpha,
    per_family_rate, power_one_sided_z, sidak_adjust, table1_report, CostModel, ErrorRateReport,
    OptimalAlpha, PowerSpec,
};
pub use sim::{simulate, Design, Estimates, Scenario};
