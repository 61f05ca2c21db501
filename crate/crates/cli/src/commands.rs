use alphagate::sim::{simulate_with_threads, Estimates, Rate};
use alphagate::{
    bonferroni_adjust, classify_testing_mode, conjunction_power, conjunction_type2, decide,
    fwer_independent, optimal_alpha, per_family_rate, power_one_sided_z, sidak_adjust,
    table1_report, CostModel, Decision, Method, TestingMode,
};

use crate::args::{Command, MethodArg, ModeArg};
use crate::error::CliError;
use crate::input::{
    default_disjunction_method, load_battery, method_from_arg, mode_from_arg, LoadedScenario,
};
use crate::output::{Cell, Table};

/// What a command produced: the result table plus diagnostics for stderr.
pub struct Report {
    pub table: Table,
    pub diagnostics: Vec<String>,
}

impl From<Table> for Report {
    fn from(table: Table) -> Self {
        Report {
            table,
            diagnostics: Vec::new(),
        }
    }
}

pub struct Env {
    pub seed: Option<u64>,
    pub default_threads: usize,
}

pub fn execute(command: &Command, env: &Env) -> Result<Report, CliError> {
    match command {
        Command::Rates { alpha, k } => rates(*alpha, *k).map(Into::into),
        Command::Adjust { alpha, k, method } => adjust(*alpha, *k, *method).map(Into::into),
        Command::Table1 { t, h, alpha } => table1(*t, *h, *alpha).map(Into::into),
        Command::Decide {
            battery,
            mode,
            alpha,
            method,
            independent,
        } => {
            let battery = load_battery(battery)?;
            let (decision, defaulted) = run_decision(&battery, *mode, *alpha, *method, *independent)?;
            Ok(decision_table(&decision, defaulted).into())
        }
        Command::Classify { input } => classify(&LoadedScenario::load(input)?).map(Into::into),
        Command::Simulate {
            scenario,
            reps,
            seed,
            threads,
        } => {
            let loaded = LoadedScenario::load(scenario)?;
            let scenario = loaded.scenario(*reps, seed.or(env.seed))?;
            let threads = threads.map_or(env.default_threads, |t| t as usize);
            let est = simulate_with_threads(&scenario, threads).map_err(|e| match e {
                alphagate::Error::InvalidScenario(msg) if msg.starts_with("cannot start") => {
                    CliError::Runtime(msg)
                }
                other => other.into(),
            })?;
            Ok(Report {
                table: estimates_table(&est, &scenario, &loaded.test_labels(scenario.k)),
                diagnostics: vec![format!(
                    "simulated {} replications on {threads} thread(s) in {:.3} s",
                    est.reps,
                    est.elapsed.as_secs_f64()
                )],
            })
        }
        Command::Power {
            alpha,
            delta,
            n,
            k,
            conjunction,
            omega,
            alpha_min,
            alpha_max,
        } => power(*alpha, *delta, *n, k.filter(|_| *conjunction), *omega, (*alpha_min, *alpha_max))
            .map(Into::into),
    }
}

pub fn rates(alpha: f64, k: u64) -> Result<Table, CliError> {
    let mut t = Table::new(&["alpha", "k", "fwer", "per_family_rate"]);
    t.row(vec![
        alpha.into(),
        k.into(),
        fwer_independent(alpha, k)?.into(),
        per_family_rate(alpha, k)?.into(),
    ]);
    Ok(t)
}

pub fn adjust(alpha: f64, k: u64, method: MethodArg) -> Result<Table, CliError> {
    let method = method_from_arg(method);
    let mut t = Table::new(&["method", "alpha_joint", "k", "rank", "alpha_per_test"]);
    let single = |value: f64| -> Vec<Cell> {
        vec![method.as_str().into(), alpha.into(), k.into(), "all".into(), value.into()]
    };
    match method {
        Method::None => {
            // validates the inputs
            fwer_independent(alpha, k)?;
            t.row(single(alpha));
        }
        Method::Bonferroni => {
            t.row(single(bonferroni_adjust(alpha, k)?));
        }
        Method::Sidak => {
            t.row(single(sidak_adjust(alpha, k)?));
        }
        Method::Holm | Method::Hochberg | Method::BenjaminiHochberg => {
            bonferroni_adjust(alpha, k)?;
            if k > 100_000 {
                return Err(CliError::Validation(format!(
                    "stepwise thresholds are listed per rank; k = {k} exceeds the 100000-row limit"
                )));
            }
            for rank in 1..=k {
                let threshold = if method == Method::BenjaminiHochberg {
                    rank as f64 * alpha / k as f64
                } else {
                    alpha / (k - rank + 1) as f64
                };
                t.row(vec![method.as_str().into(), alpha.into(), k.into(), rank.into(), threshold.into()]);
            }
        }
    }
    Ok(t)
}

pub fn table1(t: u64, h: u64, alpha: f64) -> Result<Table, CliError> {
    let r = table1_report(t, h, alpha)?;
    let mut table = Table::new(&["t", "h", "k", "alpha_per_test", "per_family_rate", "fwer"]);
    table.row(vec![
        r.t.into(),
        r.h.into(),
        r.k.into(),
        r.alpha_per_test.into(),
        r.per_family_rate.into(),
        r.fwer.into(),
    ]);
    Ok(table)
}

pub fn run_decision(
    battery: &alphagate::TestBattery,
    mode: ModeArg,
    alpha: f64,
    method: Option<MethodArg>,
    independent: bool,
) -> Result<(Decision, bool), CliError> {
    let mode = mode_from_arg(mode);
    let (method, defaulted) = match (mode, method) {
        (_, Some(m)) => (method_from_arg(m), false),
        (TestingMode::Disjunction, None) => (default_disjunction_method(independent), true),
        (_, None) => (Method::None, false),
    };
    Ok((decide(battery, mode, alpha, method)?, defaulted))
}

pub fn decision_table(d: &Decision, method_defaulted: bool) -> Table {
    let mut t = Table::new(&["scope", "id", "p", "threshold", "decision"]);
    for o in &d.outcomes {
        t.row(vec![
            "constituent".into(),
            o.id.as_str().into(),
            o.p.into(),
            o.threshold.into(),
            o.verdict.to_string().into(),
        ]);
    }
    let label = format!("{}:{}", d.mode, d.method);
    t.row(vec!["joint".into(), label.into(), Cell::Missing, Cell::Missing, d.joint.to_string().into()]);
    if d.mode == TestingMode::Disjunction && d.joint == alphagate::JointVerdict::Reject {
        let ids: Vec<&str> = d.triggers().iter().map(|id| id.as_str()).collect();
        t.row(vec!["note".into(), "TRIGGERED_BY".into(), Cell::Missing, Cell::Missing, ids.join(",").into()]);
    }
    if method_defaulted {
        t.row(vec![
            "note".into(),
            "DEFAULT_METHOD".into(),
            Cell::Missing,
            Cell::Missing,
            format!("tool default {} (sidak when tests are declared independent, bonferroni otherwise)", d.method).into(),
        ]);
    }
    for n in &d.notes {
        t.row(vec!["note".into(), n.code().into(), Cell::Missing, Cell::Missing, n.text().into()]);
    }
    t
}

pub fn classify(loaded: &LoadedScenario) -> Result<Table, CliError> {
    let input = loaded.classification()?;
    let rec = classify_testing_mode(&input);
    let mut t = Table::new(&["item", "code", "text"]);
    t.row(vec!["mode".into(), rec.mode_label().into(), Cell::Missing]);
    t.row(vec!["adjust_alpha".into(), rec.adjust_alpha.into(), Cell::Missing]);
    for code in &rec.rationale {
        let item = if code.is_warning() { "warning" } else { "rationale" };
        t.row(vec![item.into(), code.as_str().into(), code.text().into()]);
    }
    for (code, message) in loaded.family_warnings() {
        t.row(vec!["family_warning".into(), code.into(), message.into()]);
    }
    Ok(t)
}

fn rate_row(metric: String, r: &Rate) -> Vec<Cell> {
    vec![metric.into(), r.rate.into(), r.ci95.0.into(), r.ci95.1.into(), r.count.into()]
}

fn text_row(metric: &str, value: String) -> Vec<Cell> {
    vec![metric.into(), value.into(), Cell::Missing, Cell::Missing, Cell::Missing]
}

pub fn estimates_table(e: &Estimates, s: &alphagate::Scenario, labels: &[String]) -> Table {
    let mut t = Table::new(&["metric", "value", "ci95_lower", "ci95_upper", "count"]);
    t.row(text_row("reps", e.reps.to_string()));
    t.row(text_row("seed", e.seed_echo.to_string()));
    t.row(text_row("k", s.k.to_string()));
    t.row(text_row("design", s.design.label()));
    t.row(text_row("sides", s.sides.to_string()));
    t.row(text_row("disjunction_method", e.disjunction_method.to_string()));
    t.row(vec!["alpha_joint".into(), s.alpha_joint.into(), Cell::Missing, Cell::Missing, Cell::Missing]);
    t.row(rate_row("fwer".into(), &e.fwer));
    t.row(vec![
        "mean_false_positives".into(),
        e.mean_false_positives.into(),
        Cell::Missing,
        Cell::Missing,
        Cell::Missing,
    ]);
    t.row(vec!["fdr".into(), e.fdr_hat.into(), Cell::Missing, Cell::Missing, Cell::Missing]);
    for mode in [TestingMode::Individual, TestingMode::Disjunction, TestingMode::Conjunction] {
        t.row(rate_row(format!("joint_reject.{mode}"), e.joint_reject_rate.get(mode)));
    }
    for (label, r) in labels.iter().zip(&e.per_test_rejection) {
        t.row(rate_row(format!("per_test_rejection.{label}"), r));
    }
    t
}

pub fn power(
    alpha: f64,
    delta: f64,
    n: u64,
    conjunction_k: Option<u64>,
    omega: Option<f64>,
    bounds: (f64, f64),
) -> Result<Table, CliError> {
    let mut t = Table::new(&["quantity", "value"]);
    let p = power_one_sided_z(alpha, delta, n)?;
    t.row(vec!["power_per_test".into(), p.into()]);
    t.row(vec!["type2_per_test".into(), (1.0 - p).into()]);
    if let Some(k) = conjunction_k {
        t.row(vec!["k".into(), k.into()]);
        if p > 0.0 && p < 1.0 {
            t.row(vec!["conjunction_power".into(), conjunction_power(p, k)?.into()]);
            t.row(vec!["conjunction_type2".into(), conjunction_type2(1.0 - p, k)?.into()]);
        } else {
            let joint = p.powf(k as f64);
            t.row(vec!["conjunction_power".into(), joint.into()]);
            t.row(vec!["conjunction_type2".into(), (1.0 - joint).into()]);
        }
    }
    if let Some(omega) = omega {
        let model = CostModel {
            omega,
            delta,
            n,
            alpha_bounds: bounds,
        };
        let best = optimal_alpha(&model)?;
        t.row(vec!["objective".into(), "weighted-sum: omega*alpha + (1-omega)*beta".into()]);
        t.row(vec!["optimal_alpha".into(), best.alpha.into()]);
        t.row(vec!["optimal_objective".into(), best.objective.into()]);
        t.row(vec!["power_at_optimal_alpha".into(), power_one_sided_z(best.alpha, delta, n)?.into()]);
    }
    Ok(t)
}
