//! Scenario JSON and battery CSV readers.
//!
//! Scenario file layout (every section optional, unknown keys rejected):
//!
//! ```json
//! {
//!   "family": {"joint_id": "...", "constituents": ["..."], "mode": "disjunction",
//!              "exchangeable": true, "independent": true},
//!   "alpha": {"alpha_joint": 0.05, "method": "sidak", "mode": "disjunction"},
//!   "simulation": {"n": 50, "design": {"kind": "independent"}, "sides": "one_sided",
//!                  "null_pattern": [true, ...], "deltas": [0.0, ...],
//!                  "k": 20, "alpha_joint": 0.05, "method": "sidak",
//!                  "reps": 100000, "seed": 1},
//!   "classification": {"statistical_claim": true, "joint_inference": true,
//!                      "all_constituents_required": false, "exchangeable": true,
//!                      "family_theoretically_relevant": true}
//! }
//! ```

use std::fs;
use std::path::Path;

use alphagate::sim::{Design, Scenario, DEFAULT_REPS, MAX_REPS};
use alphagate::{
    validate_family, AlphaConfig, ClassificationInput, FamilySpec, HypothesisId, Method, Sides,
    TestBattery, TestingMode,
};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub k: Option<usize>,
    pub null_pattern: Option<Vec<bool>>,
    pub deltas: Option<Vec<f64>>,
    pub n: u64,
    #[serde(default)]
    pub design: Design,
    #[serde(default)]
    pub sides: Sides,
    pub alpha_joint: Option<f64>,
    pub method: Option<Method>,
    pub reps: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub family: Option<FamilySpec>,
    pub alpha: Option<AlphaConfig>,
    pub simulation: Option<SimulationSection>,
    pub classification: Option<ClassificationInput>,
}

/// A parsed scenario file with its source text, for line-anchored diagnostics.
#[derive(Debug)]
pub struct LoadedScenario {
    pub name: String,
    pub text: String,
    pub file: ScenarioFile,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: cannot read: {e}", path.display())))
}

/// 1-based line of `"key"` inside the first `"section"` object, if present.
fn locate(text: &str, section: &str, key: &str) -> Option<usize> {
    let start = text.find(&format!("\"{section}\""))?;
    let offset = if key.is_empty() {
        start
    } else {
        start + text[start..].find(&format!("\"{key}\""))?
    };
    Some(text[..offset].matches('\n').count() + 1)
}

impl LoadedScenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read(path)?;
        let name = path.display().to_string();
        Self::parse(name, text)
    }

    pub fn parse(name: String, text: String) -> Result<Self, CliError> {
        let file: ScenarioFile = serde_json::from_str(&text).map_err(|e| {
            CliError::Validation(format!("{name}:{}:{}: {e}", e.line(), e.column()))
        })?;
        let loaded = LoadedScenario { name, text, file };
        loaded.check_sections()?;
        Ok(loaded)
    }

    fn err(&self, section: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
        let path = if key.is_empty() {
            section.to_string()
        } else {
            format!("{section}.{key}")
        };
        match locate(&self.text, section, key) {
            Some(line) => CliError::Validation(format!("{}:{line}: {path}: {msg}", self.name)),
            None => CliError::Validation(format!("{}: {path}: {msg}", self.name)),
        }
    }

    fn check_sections(&self) -> Result<(), CliError> {
        if let Some(family) = &self.file.family {
            let report = validate_family(family);
            let first = report.errors().next().cloned();
            if let Some(first) = first {
                let key = match first.code {
                    "IndividualFamily" => "mode",
                    _ => "constituents",
                };
                return Err(self.err("family", key, format!("{}: {}", first.code, first.message)));
            }
        }
        if let Some(alpha) = &self.file.alpha {
            if let Err(e) = alpha.validate() {
                let key = if alpha.alpha_joint > 0.0 && alpha.alpha_joint < 1.0 {
                    "method"
                } else {
                    "alpha_joint"
                };
                return Err(self.err("alpha", key, e));
            }
            if let Some(family) = &self.file.family {
                if family.mode != alpha.mode {
                    return Err(self.err(
                        "alpha",
                        "mode",
                        format!(
                            "alpha mode `{}` does not match family mode `{}`",
                            alpha.mode, family.mode
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Non-fatal family findings, e.g. the exchangeability warning.
    pub fn family_warnings(&self) -> Vec<(String, String)> {
        self.file
            .family
            .as_ref()
            .map(|f| {
                validate_family(f)
                    .warnings()
                    .map(|w| (w.code.to_string(), w.message.clone()))
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn classification(&self) -> Result<ClassificationInput, CliError> {
        self.file.classification.ok_or_else(|| {
            CliError::Validation(format!("{}: missing `classification` section", self.name))
        })
    }

    /// Assembles the Monte Carlo scenario, applying CLI and environment overrides.
    pub fn scenario(
        &self,
        reps_override: Option<u64>,
        seed_override: Option<u64>,
    ) -> Result<Scenario, CliError> {
        let sim = self.file.simulation.as_ref().ok_or_else(|| {
            CliError::Validation(format!("{}: missing `simulation` section", self.name))
        })?;
        let family = self.file.family.as_ref();
        let alpha = self.file.alpha.as_ref();

        let mut k = sim.k;
        let mut agree = |key: &str, len: usize| -> Result<(), CliError> {
            match k {
                Some(existing) if existing != len => Err(self.err(
                    "simulation",
                    key,
                    format!("has length {len}, but k = {existing}"),
                )),
                _ => {
                    k = Some(len);
                    Ok(())
                }
            }
        };
        if let Some(f) = family {
            agree("k", f.k())?;
        }
        if let Some(p) = &sim.null_pattern {
            agree("null_pattern", p.len())?;
        }
        if let Some(d) = &sim.deltas {
            agree("deltas", d.len())?;
        }
        let k = k.ok_or_else(|| {
            self.err(
                "simulation",
                "",
                "cannot determine k: give simulation.k, null_pattern, deltas or a family",
            )
        })?;

        let deltas = sim.deltas.clone().unwrap_or_else(|| vec![0.0; k]);
        let null_pattern = sim
            .null_pattern
            .clone()
            .unwrap_or_else(|| deltas.iter().map(|&d| d == 0.0).collect());

        let alpha_joint = sim
            .alpha_joint
            .or(alpha.map(|a| a.alpha_joint))
            .ok_or_else(|| {
                self.err(
                    "simulation",
                    "",
                    "missing alpha: give simulation.alpha_joint or an `alpha` section",
                )
            })?;

        let method = match (sim.method, alpha.map(|a| a.method)) {
            (Some(m), _) => m,
            (None, Some(m)) if m.controls_fwer() => m,
            _ => default_disjunction_method(
                family.map_or(matches!(sim.design, Design::Independent), |f| f.independent),
            ),
        };

        let reps = reps_override.or(sim.reps).unwrap_or(DEFAULT_REPS);
        if reps == 0 || reps > MAX_REPS {
            return Err(CliError::Validation(format!(
                "reps must lie in [1, {MAX_REPS}], got {reps}"
            )));
        }
        let seed = seed_override.or(sim.seed).unwrap_or(0);

        let scenario = Scenario {
            k,
            null_pattern,
            deltas,
            n: sim.n,
            design: sim.design,
            sides: sim.sides,
            alpha_joint,
            method,
            reps,
            seed,
        };
        scenario.validate().map_err(|e| {
            let key = scenario_key(&e.to_string());
            self.err("simulation", key, e)
        })?;
        Ok(scenario)
    }

    /// Constituent labels for per-test rows.
    pub fn test_labels(&self, k: usize) -> Vec<String> {
        match &self.file.family {
            Some(f) if f.k() == k => f.constituents.iter().map(|c| c.to_string()).collect(),
            _ => (1..=k).map(|i| format!("h{i}")).collect(),
        }
    }
}

/// Maps a scenario validation message to the key it concerns.
fn scenario_key(msg: &str) -> &'static str {
    const KEYS: [(&str, &str); 7] = [
        ("null_pattern has", "null_pattern"),
        ("deltas", "deltas"),
        ("rho", "design"),
        ("n must", "n"),
        ("alpha_joint", "alpha_joint"),
        ("method", "method"),
        ("reps", "reps"),
    ];
    KEYS.iter()
        .find(|(needle, _)| msg.contains(needle))
        .map_or("", |(_, key)| key)
}

/// Šidák is exact under independence; Bonferroni holds under any dependence.
pub fn default_disjunction_method(independent: bool) -> Method {
    if independent {
        Method::Sidak
    } else {
        Method::Bonferroni
    }
}

#[derive(Debug, Deserialize)]
struct BatteryRow {
    id: String,
    p: String,
}

/// Reads a battery CSV with header `id,p`.
pub fn load_battery(path: &Path) -> Result<TestBattery, CliError> {
    let text = read(path)?;
    parse_battery(&path.display().to_string(), &text)
}

pub fn parse_battery(name: &str, text: &str) -> Result<TestBattery, CliError> {
    let bad = |line: u64, msg: String| CliError::Validation(format!("{name}:{line}: {msg}"));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| bad(1, format!("cannot read header: {e}")))?
        .clone();
    if headers.len() != 2 || &headers[0] != "id" || &headers[1] != "p" {
        return Err(bad(1, format!("header must be `id,p`, got `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }

    let mut entries: Vec<(HypothesisId, f64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            bad(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row: BatteryRow = record
            .deserialize(Some(&headers))
            .map_err(|e| bad(line, e.to_string()))?;
        let id = HypothesisId::new(row.id.clone()).map_err(|e| bad(line, e.to_string()))?;
        let p: f64 = row
            .p
            .parse()
            .map_err(|_| bad(line, format!("p value `{}` for `{}` is not a number", row.p, row.id)))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(bad(line, format!("p value {p} for `{}` is outside [0, 1]", row.id)));
        }
        if entries.iter().any(|(seen, _)| *seen == id) {
            return Err(bad(line, format!("duplicate id `{}`", row.id)));
        }
        entries.push((id, p));
    }
    if entries.is_empty() {
        return Err(CliError::Validation(format!("{name}: battery has no rows")));
    }
    Ok(TestBattery::new(entries)?)
}

pub fn mode_from_arg(mode: crate::args::ModeArg) -> TestingMode {
    use crate::args::ModeArg;
    match mode {
        ModeArg::Individual => TestingMode::Individual,
        ModeArg::Disjunction => TestingMode::Disjunction,
        ModeArg::Conjunction => TestingMode::Conjunction,
    }
}

pub fn method_from_arg(method: crate::args::MethodArg) -> Method {
    use crate::args::MethodArg;
    match method {
        MethodArg::None => Method::None,
        MethodArg::Bonferroni => Method::Bonferroni,
        MethodArg::Sidak => Method::Sidak,
        MethodArg::Holm => Method::Holm,
        MethodArg::Hochberg => Method::Hochberg,
        MethodArg::Bh => Method::BenjaminiHochberg,
    }
}
