//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints exactly one PASS or FAIL line; exits nonzero on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use alphagate::sim::{simulate, Design, Estimates, Scenario};
use alphagate::{
    bonferroni_adjust, classify_testing_mode, conjunction_power, conjunction_type2, decide,
    decide_individual, fwer_independent, normal_quantile, per_family_rate, sidak_adjust,
    ClassificationInput, Method, TestBattery, TestingMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const REPS: u64 = 200_000;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn sig6(v: f64) -> String {
    format!("{v:.5e}")
}

/// True when `printed` is a correct rounding of `v` at its own number of decimals.
fn rounds_to(v: f64, printed: &str) -> bool {
    let decimals = printed.split('.').nth(1).map_or(0, str::len) as i32;
    let p: f64 = printed.parse().unwrap();
    (v - p).abs() <= 0.5 * 10f64.powi(-decimals) * (1.0 + 1e-9)
}

fn three_sigma(est: f64, p: f64, reps: u64) -> bool {
    (est - p).abs() <= 3.0 * (p * (1.0 - p) / reps as f64).sqrt()
}

fn cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_alphagate"))
        .args(args)
        .env_remove("ALPHAGATE_SEED")
        .output()
        .expect("alphagate binary runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn cli_value(args: &[&str], column: usize) -> String {
    let out = String::from_utf8(cli(args)).unwrap();
    out.lines().nth(1).unwrap().split('\t').nth(column).unwrap().to_string()
}

fn run(s: &Scenario) -> Estimates {
    simulate(s).expect("valid scenario")
}

/// p values spread over (0, 1] with extra mass near zero and occasional ties.
fn random_battery(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut ps: Vec<f64> = (0..len)
        .map(|_| {
            let u: f64 = rng.gen_range(f64::EPSILON..=1.0);
            if rng.gen_bool(0.5) {
                u.powi(4)
            } else {
                u
            }
        })
        .collect();
    if len > 1 && rng.gen_bool(0.2) {
        let (i, j) = (rng.gen_range(0..len), rng.gen_range(0..len));
        ps[j] = ps[i];
    }
    ps
}

fn closed_forms() -> Check {
    let expect = [
        ("fwer(.05,2)", fwer_independent(0.05, 2), 0.0975, ".098"),
        ("fwer(.05,20)", fwer_independent(0.05, 20), 0.641514, ".64"),
        ("fwer(.05,100)", fwer_independent(0.05, 100), 0.994079, "0.9941"),
        ("per_family(.05,20)", per_family_rate(0.05, 20), 1.0, "1.00"),
        ("sidak(.05,2)", sidak_adjust(0.05, 2), 0.0253206, ".025"),
        ("conjunction_type2(.20,2)", conjunction_type2(0.2, 2), 0.36, ".36"),
        ("conjunction_power(.80,2)", conjunction_power(0.8, 2), 0.64, ".64"),
        ("fwer(1/20,20)", fwer_independent(1.0 / 20.0, 20), 0.641514, ".64"),
    ];
    for (name, got, formula, printed) in expect {
        let got = got.map_err(|e| format!("{name}: {e}"))?;
        ensure!(sig6(got) == sig6(formula), "{name} = {got}, expected {formula}");
        ensure!(rounds_to(got, printed), "{name} = {got} does not round to {printed}");
    }
    ensure!(rounds_to(fwer_independent(0.05, 20).unwrap(), ".6415"), "dice fwer != .6415");

    let b = bonferroni_adjust(0.05, 167_355).unwrap();
    ensure!(b == 0.05 / 167_355.0, "bonferroni is not alpha/k");
    ensure!(sig6(b) == "2.98766e-7", "bonferroni(.05,167355) = {b}");

    let printed = [
        (cli_value(&["rates", "--alpha", "0.05", "--k", "2"], 2), "0.097500"),
        (cli_value(&["rates", "--alpha", "0.05", "--k", "20"], 2), "0.641514"),
        (cli_value(&["rates", "--alpha", "0.05", "--k", "20"], 3), "1.000000"),
        (cli_value(&["rates", "--alpha", "0.05", "--k", "100"], 2), "0.994079"),
        (cli_value(&["adjust", "--alpha", "0.05", "--k", "2", "--method", "sidak"], 4), "0.025321"),
        (
            cli_value(&["adjust", "--alpha", "0.05", "--k", "167355", "--method", "bonferroni"], 4),
            "2.98766e-7",
        ),
    ];
    for (got, want) in printed {
        ensure!(got == want, "CLI printed {got}, expected {want}");
    }
    Ok("8 closed forms and 6 CLI outputs agree; bonferroni(.05,167355) = 2.98766e-7".into())
}

fn round_trips() -> Check {
    let mut worst = 0f64;
    for alpha in [0.001, 0.01, 0.05, 0.1] {
        for k in 1..=10_000u64 {
            let s = sidak_adjust(alpha, k).unwrap();
            let back = fwer_independent(s, k).unwrap();
            worst = worst.max((back - alpha).abs());
            ensure!(worst <= 1e-12, "fwer(sidak({alpha},{k})) = {back}");
            let b = bonferroni_adjust(alpha, k).unwrap();
            if k == 1 {
                ensure!(b == s, "k=1: bonferroni {b} != sidak {s}");
            } else {
                ensure!(b < s, "bonferroni {b} not below sidak {s} at alpha {alpha}, k {k}");
            }
        }
    }
    Ok(format!("40000 pairs, max |error| = {worst:.1e}"))
}

fn mc_vs_formula() -> Check {
    let mut detail = Vec::new();
    for (i, (alpha, k)) in [(0.05, 2usize), (0.05, 20), (0.01, 100)].into_iter().enumerate() {
        let est = run(&Scenario::all_null(k, alpha, REPS, 101 + i as u64));
        let exact = fwer_independent(alpha, k as u64).unwrap();
        let hat = est.fwer_hat();
        ensure!(three_sigma(hat, exact, REPS), "({alpha},{k}): fwer_hat {hat} vs {exact}");
        if k == 20 {
            ensure!((0.6375..=0.6455).contains(&hat), "k=20 fwer_hat {hat} outside [.6375,.6455]");
        }
        detail.push(format!("({alpha},{k}) {hat:.4} vs {exact:.4}"));
    }
    Ok(detail.join(", "))
}

fn dice_property() -> Check {
    let est = run(&Scenario::all_null(100, 0.05, REPS, 202));
    let (lo, hi) = est
        .per_test_rejection
        .iter()
        .fold((1f64, 0f64), |(lo, hi), r| (lo.min(r.rate), hi.max(r.rate)));
    ensure!(lo >= 0.048 && hi <= 0.052, "per-test rates span [{lo}, {hi}]");

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..1000 {
        let len = rng.gen_range(1..=30);
        let base = random_battery(&mut rng, len);
        let extra_len = rng.gen_range(1..=30);
        let extra = random_battery(&mut rng, extra_len);
        let alpha = rng.gen_range(0.001..0.2);
        let before = decide_individual(&TestBattery::from_p_values(&base).unwrap(), alpha).unwrap();
        let all: Vec<f64> = base.iter().chain(&extra).copied().collect();
        let after = decide_individual(&TestBattery::from_p_values(&all).unwrap(), alpha).unwrap();
        ensure!(
            before.rejection_mask()[..] == after.rejection_mask()[..len],
            "battery {case}: appending tests changed existing decisions"
        );
    }
    Ok(format!("per-test rates in [{lo:.4}, {hi:.4}]; 1000 appended batteries unchanged"))
}

fn adjustment_efficacy() -> Check {
    let est = run(&Scenario::all_null(20, 0.05, REPS, 303).with_method(Method::Sidak));
    let adjusted = est.joint_reject_rate.disjunction.rate;
    let unadjusted = est.joint_reject_rate.individual.rate;
    ensure!((adjusted - 0.05).abs() <= 0.003, "sidak disjunction rate {adjusted}");
    let exact = fwer_independent(0.05, 20).unwrap();
    ensure!(three_sigma(unadjusted, exact, REPS), "unadjusted rate {unadjusted} vs {exact}");
    Ok(format!("sidak {adjusted:.4}, unadjusted {unadjusted:.4}"))
}

fn conjunction() -> Check {
    let n = 50u64;
    // effect giving one-sided power .80 at alpha .05
    let delta = (normal_quantile(0.95) + normal_quantile(0.80)) / (n as f64 / 2.0).sqrt();

    let mut s = Scenario::all_null(2, 0.05, REPS, 404).with_effects(vec![0.0, delta]);
    s.n = n;
    let one_null = run(&s).joint_reject_rate.conjunction.rate;
    ensure!(one_null <= 0.053, "one true null: conjunction rate {one_null}");

    let mut s = Scenario::all_null(2, 0.05, REPS, 405).with_effects(vec![delta, delta]);
    s.n = n;
    let est = run(&s);
    let power = est.joint_reject_rate.conjunction.rate;
    ensure!((power - 0.64).abs() <= 0.01, "calibrated conjunction power {power}");
    Ok(format!("one true null {one_null:.4}, power {power:.4} (delta {delta:.4})"))
}

fn dependence() -> Check {
    let base = Scenario::all_null(20, 0.05, REPS, 505);
    let ind = run(&base);
    let ind_ci = ind.fwer.interval(REPS, 0.99).unwrap();
    let mut detail = vec![format!("independent {:.4}", ind.fwer_hat())];
    for design in [Design::Equicorrelated { rho: 0.5 }, Design::SharedControl] {
        let label = design.label();
        let est = run(&base.clone().with_design(design));
        let ci = est.fwer.interval(REPS, 0.99).unwrap();
        ensure!(est.fwer_hat() < ind.fwer_hat(), "{label}: {} not below independent", est.fwer_hat());
        ensure!(ci.1 < ind_ci.0, "{label}: 99% intervals overlap ({:?} vs {:?})", ci, ind_ci);
        detail.push(format!("{label} {:.4}", est.fwer_hat()));
    }
    Ok(detail.join(", "))
}

fn fdr_identity() -> Check {
    for (i, design) in [Design::Independent, Design::Equicorrelated { rho: 0.5 }, Design::SharedControl]
        .into_iter()
        .enumerate()
    {
        let est = run(&Scenario::all_null(20, 0.05, REPS, 606 + i as u64).with_design(design));
        ensure!(
            est.fdr_hat.to_bits() == est.fwer_hat().to_bits(),
            "all-null fdr {} != fwer {}",
            est.fdr_hat,
            est.fwer_hat()
        );
    }
    let deltas: Vec<f64> = (0..20).map(|i| if i < 10 { 0.4 } else { 0.0 }).collect();
    let est = run(&Scenario::all_null(20, 0.05, REPS, 609).with_effects(deltas));
    ensure!(est.fdr_hat <= est.fwer_hat(), "fdr {} > fwer {}", est.fdr_hat, est.fwer_hat());
    Ok(format!("bitwise equal under 3 null designs; 10/20 false: fdr {:.4} <= fwer {:.4}", est.fdr_hat, est.fwer_hat()))
}

fn dominance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0;
    for _ in 0..1000 {
        let len = rng.gen_range(1..=40);
        let battery = TestBattery::from_p_values(&random_battery(&mut rng, len)).unwrap();
        let alpha = rng.gen_range(0.001..0.3);
        let mask = |mode, method| decide(&battery, mode, alpha, method).unwrap().rejection_mask();
        let chain = [
            mask(TestingMode::Disjunction, Method::Bonferroni),
            mask(TestingMode::Disjunction, Method::Holm),
            mask(TestingMode::Disjunction, Method::Hochberg),
            mask(TestingMode::Individual, Method::BenjaminiHochberg),
        ];
        for pair in chain.windows(2) {
            violations += pair[0].iter().zip(&pair[1]).filter(|(a, b)| **a && !**b).count();
        }
    }
    ensure!(violations == 0, "{violations} dominance violations");
    Ok("Bonferroni ⊆ Holm ⊆ Hochberg ⊆ BH over 1000 batteries, 0 violations".into())
}

fn determinism() -> Check {
    let scenario = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/jelly_beans.json");
    let scenario = scenario.to_str().unwrap();
    let max = std::thread::available_parallelism().map_or(1, |n| n.get()).to_string();
    let go = |threads: &str| {
        cli(&["simulate", "--scenario", scenario, "--reps", "50000", "--seed", "2024", "--threads", threads])
    };
    let first = go("1");
    ensure!(go("1") == first, "two single-thread runs differ");
    for t in ["4", max.as_str()] {
        ensure!(go(t) == first, "{t} threads differ from 1 thread");
    }
    Ok(format!("identical bytes for threads 1, 1, 4, {max}"))
}

fn classifier() -> Check {
    let input = |joint, all_required, exchangeable| ClassificationInput {
        statistical_claim: true,
        joint_inference: joint,
        all_constituents_required: all_required,
        exchangeable,
        family_theoretically_relevant: true,
    };
    let worked = [
        ("per-colour", input(false, false, true), TestingMode::Individual, false),
        ("two-endpoint", input(true, true, false), TestingMode::Conjunction, false),
        ("20-colour", input(true, false, true), TestingMode::Disjunction, true),
    ];
    for (name, inp, mode, adjust) in worked {
        let rec = classify_testing_mode(&inp);
        ensure!(rec.mode == Some(mode) && rec.adjust_alpha == adjust, "{name}: got {rec:?}");
    }
    let mut adjusted = 0;
    for inp in ClassificationInput::all_combinations() {
        let rec = classify_testing_mode(&inp);
        if rec.adjust_alpha {
            adjusted += 1;
            ensure!(rec.mode == Some(TestingMode::Disjunction), "adjust without disjunction: {inp:?}");
        }
    }
    Ok(format!("3 worked cases; 32 combinations, {adjusted} adjust, all disjunction"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("closed-form reproduction", closed_forms),
        ("analytic round-trips", round_trips),
        ("monte carlo vs formula", mc_vs_formula),
        ("per-test invariance", dice_property),
        ("adjustment efficacy", adjustment_efficacy),
        ("conjunction validity and power", conjunction),
        ("dependence attenuation", dependence),
        ("fdr/fwer identity", fdr_identity),
        ("procedure dominance", dominance),
        ("determinism", determinism),
        ("classifier conformance", classifier),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("AC{:<2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("AC{:<2} FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
