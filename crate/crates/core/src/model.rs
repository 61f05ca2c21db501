//! Domain vocabulary: hypothesis ids, families, batteries and alpha settings.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-empty identifier of a hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct HypothesisId(String);

impl HypothesisId {
    pub fn new(token: impl Into<String>) -> Result<Self> {
        let token = token.into();
        if token.trim().is_empty() {
            return Err(Error::InvalidId("identifier must be non-empty".into()));
        }
        Ok(HypothesisId(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for HypothesisId {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        HypothesisId::new(value)
    }
}

impl From<HypothesisId> for String {
    fn from(id: HypothesisId) -> String {
        id.0
    }
}

impl fmt::Display for HypothesisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestingMode {
    /// One decision per hypothesis, no joint inference.
    Individual,
    /// Reject the joint null if at least one constituent is significant.
    Disjunction,
    /// Reject the joint null only if every constituent is significant.
    Conjunction,
}

impl TestingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TestingMode::Individual => "individual",
            TestingMode::Disjunction => "disjunction",
            TestingMode::Conjunction => "conjunction",
        }
    }

    pub fn is_joint(self) -> bool {
        !matches!(self, TestingMode::Individual)
    }
}

impl fmt::Display for TestingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "individual" => Ok(TestingMode::Individual),
            "disjunction" => Ok(TestingMode::Disjunction),
            "conjunction" => Ok(TestingMode::Conjunction),
            other => Err(Error::Domain(format!("unknown testing mode `{other}`"))),
        }
    }
}

/// Alpha adjustment method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(alias = "none")]
    None,
    #[serde(alias = "bonferroni")]
    Bonferroni,
    #[serde(alias = "sidak")]
    Sidak,
    #[serde(alias = "holm")]
    Holm,
    #[serde(alias = "hochberg")]
    Hochberg,
    #[serde(alias = "bh", alias = "benjamini-hochberg")]
    BenjaminiHochberg,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::None,
        Method::Bonferroni,
        Method::Sidak,
        Method::Holm,
        Method::Hochberg,
        Method::BenjaminiHochberg,
    ];

    /// Methods accepted for disjunction testing.
    pub fn controls_fwer(self) -> bool {
        matches!(
            self,
            Method::Bonferroni | Method::Sidak | Method::Holm | Method::Hochberg
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::None => "none",
            Method::Bonferroni => "bonferroni",
            Method::Sidak => "sidak",
            Method::Holm => "holm",
            Method::Hochberg => "hochberg",
            Method::BenjaminiHochberg => "bh",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Method::None),
            "bonferroni" => Ok(Method::Bonferroni),
            "sidak" | "dunn-sidak" | "šidák" => Ok(Method::Sidak),
            "holm" => Ok(Method::Holm),
            "hochberg" => Ok(Method::Hochberg),
            "bh" | "benjamini-hochberg" | "benjaminihochberg" => Ok(Method::BenjaminiHochberg),
            other => Err(Error::InvalidMethod(format!("unknown method `{other}`"))),
        }
    }
}

/// A joint hypothesis and its declared constituents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub joint_id: HypothesisId,
    pub constituents: Vec<HypothesisId>,
    pub mode: TestingMode,
    pub exchangeable: bool,
    pub independent: bool,
}

impl FamilySpec {
    pub fn k(&self) -> usize {
        self.constituents.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Warning)
    }

    /// First structural error as a typed [`Error`], if any.
    pub fn into_result(self) -> Result<Vec<Finding>> {
        for f in &self.findings {
            if f.severity == Severity::Error {
                return Err(match f.code {
                    "EmptyFamily" => Error::EmptyFamily,
                    "DuplicateConstituent" => Error::DuplicateConstituent(f.message.clone()),
                    _ => Error::Domain(f.message.clone()),
                });
            }
        }
        Ok(self.findings)
    }
}

pub const EXCHANGEABILITY_WARNING: &str = "constituents must be theoretically exchangeable \
with regards to inferences about the joint hypothesis; a significant result for any \
constituent must give the same logical basis for rejecting the joint null";

/// Structural checks on a declared family. Family membership itself is never inferred.
pub fn validate_family(spec: &FamilySpec) -> ValidationReport {
    let mut findings = Vec::new();

    if spec.constituents.is_empty() {
        findings.push(Finding {
            severity: Severity::Error,
            code: "EmptyFamily",
            message: format!("family `{}` has no constituent hypotheses", spec.joint_id),
        });
    }

    let mut seen = HashSet::new();
    let mut reported = HashSet::new();
    for id in &spec.constituents {
        if !seen.insert(id) && reported.insert(id) {
            findings.push(Finding {
                severity: Severity::Error,
                code: "DuplicateConstituent",
                message: id.to_string(),
            });
        }
    }

    if spec.mode == TestingMode::Individual {
        findings.push(Finding {
            severity: Severity::Error,
            code: "IndividualFamily",
            message: "a family must be disjunction or conjunction tested".into(),
        });
    }

    if spec.mode == TestingMode::Disjunction && !spec.exchangeable {
        findings.push(Finding {
            severity: Severity::Warning,
            code: "NotExchangeable",
            message: EXCHANGEABILITY_WARNING.into(),
        });
    }

    ValidationReport { findings }
}

/// Ordered (id, p) pairs to be judged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestBattery {
    entries: Vec<(HypothesisId, f64)>,
}

impl TestBattery {
    pub fn new(entries: Vec<(HypothesisId, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (id, p) in &entries {
            if !seen.insert(id) {
                return Err(Error::InvalidBattery(format!("duplicate id `{id}`")));
            }
            if !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidBattery(format!(
                    "p value {p} for `{id}` is outside [0, 1]"
                )));
            }
        }
        Ok(TestBattery { entries })
    }

    /// Builds a battery from raw p values with ids `h1`, `h2`, ...
    pub fn from_p_values(ps: &[f64]) -> Result<Self> {
        let entries = ps
            .iter()
            .enumerate()
            .map(|(i, &p)| Ok((HypothesisId::new(format!("h{}", i + 1))?, p)))
            .collect::<Result<Vec<_>>>()?;
        TestBattery::new(entries)
    }

    pub fn entries(&self) -> &[(HypothesisId, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn p_values(&self) -> Vec<f64> {
        self.entries.iter().map(|(_, p)| *p).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaConfig {
    pub alpha_joint: f64,
    pub method: Method,
    pub mode: TestingMode,
}

impl AlphaConfig {
    pub fn new(alpha_joint: f64, method: Method, mode: TestingMode) -> Result<Self> {
        let cfg = AlphaConfig {
            alpha_joint,
            method,
            mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_joint > 0.0 && self.alpha_joint < 1.0) {
            return Err(Error::InvalidAlphaConfig(format!(
                "alpha_joint must lie in (0, 1), got {}",
                self.alpha_joint
            )));
        }
        match self.mode {
            TestingMode::Conjunction | TestingMode::Individual if self.method != Method::None => {
                Err(Error::InvalidAlphaConfig(format!(
                    "{} testing takes no alpha adjustment (method must be none, got {})",
                    self.mode, self.method
                )))
            }
            TestingMode::Disjunction if self.method == Method::None => {
                Err(Error::InvalidAlphaConfig(
                    "disjunction testing requires an alpha adjustment method".into(),
                ))
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> HypothesisId {
        HypothesisId::new(s).unwrap()
    }

    fn family(ids: &[&str], mode: TestingMode, exchangeable: bool) -> FamilySpec {
        FamilySpec {
            joint_id: id("jelly beans cause acne"),
            constituents: ids.iter().map(|s| id(s)).collect(),
            mode,
            exchangeable,
            independent: true,
        }
    }

    #[test]
    fn empty_id_rejected() {
        assert!(HypothesisId::new("").is_err());
        assert!(HypothesisId::new("   ").is_err());
    }

    #[test]
    fn duplicate_constituent() {
        let report = validate_family(&family(&["g", "g"], TestingMode::Disjunction, true));
        assert!(!report.is_ok());
        assert_eq!(
            report.into_result(),
            Err(Error::DuplicateConstituent("g".into()))
        );
    }

    #[test]
    fn empty_family() {
        let report = validate_family(&family(&[], TestingMode::Conjunction, true));
        assert_eq!(report.into_result(), Err(Error::EmptyFamily));
    }

    #[test]
    fn non_exchangeable_disjunction_warns() {
        let spec = family(&["green", "red"], TestingMode::Disjunction, false);
        let report = validate_family(&spec);
        assert!(report.is_ok());
        let w: Vec<_> = report.warnings().collect();
        assert_eq!(w.len(), 1);
        assert!(w[0].message.contains("theoretically exchangeable"));

        // conjunction does not need exchangeability
        let spec = family(&["green", "red"], TestingMode::Conjunction, false);
        assert!(validate_family(&spec).findings.is_empty());
    }

    #[test]
    fn validate_is_idempotent() {
        let spec = family(&["a", "b", "a", "a"], TestingMode::Disjunction, false);
        let before = spec.clone();
        let r1 = validate_family(&spec);
        let r2 = validate_family(&spec);
        assert_eq!(r1, r2);
        assert_eq!(spec, before);
        assert_eq!(r1.errors().count(), 1);
    }

    #[test]
    fn battery_checks() {
        assert!(TestBattery::from_p_values(&[0.0, 1.0, 0.5]).is_ok());
        assert!(matches!(
            TestBattery::from_p_values(&[1.2]),
            Err(Error::InvalidBattery(_))
        ));
        assert!(TestBattery::from_p_values(&[f64::NAN]).is_err());
        let dup = TestBattery::new(vec![(id("a"), 0.1), (id("a"), 0.2)]);
        assert!(matches!(dup, Err(Error::InvalidBattery(_))));
    }

    #[test]
    fn alpha_config_contract() {
        assert!(AlphaConfig::new(0.05, Method::Sidak, TestingMode::Disjunction).is_ok());
        assert!(AlphaConfig::new(0.05, Method::None, TestingMode::Disjunction).is_err());
        assert!(AlphaConfig::new(0.05, Method::None, TestingMode::Conjunction).is_ok());
        assert!(AlphaConfig::new(0.05, Method::Holm, TestingMode::Conjunction).is_err());
        assert!(AlphaConfig::new(0.05, Method::Bonferroni, TestingMode::Individual).is_err());
        assert!(AlphaConfig::new(0.0, Method::None, TestingMode::Individual).is_err());
        assert!(AlphaConfig::new(1.0, Method::None, TestingMode::Individual).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
    }
}
