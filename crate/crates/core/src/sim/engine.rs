use std::time::Duration;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::decision::{apply_rule, Workspace};
use crate::error::{Error, Result};
use crate::model::{Method, TestingMode};
use crate::normal::{normal_quantile_fast, p_from_z};
use crate::sim::scenario::{Design, Scenario};
use crate::sim::seed::derive_rep_seed;
use crate::sim::wilson::wilson_ci;

/// Replications per work unit. Fixed so that floating-point accumulation
/// order never depends on the thread count.
const CHUNK: u64 = 2048;

struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    fn new(rep_seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(rep_seed),
        }
    }

    /// Uniform on the open interval (0, 1).
    fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    fn normal(&mut self) -> f64 {
        normal_quantile_fast(self.uniform())
    }
}

fn fill_statistics(scenario: &Scenario, shifts: &[f64], rep_seed: u64, out: &mut [f64]) {
    let mut s = Sampler::new(rep_seed);
    match scenario.design {
        Design::Independent => {
            for (z, &shift) in out.iter_mut().zip(shifts) {
                *z = shift + s.normal();
            }
        }
        Design::Equicorrelated { rho } => {
            let common = rho.sqrt() * s.normal();
            let own = (1.0 - rho).sqrt();
            for (z, &shift) in out.iter_mut().zip(shifts) {
                *z = shift + common + own * s.normal();
            }
        }
        Design::SharedControl => {
            // (X̄ᵢ − X̄₀)/√(2/n) with X̄ = δ + G/√n reduces to δ√(n/2) + (Gᵢ − G₀)/√2
            let control = s.normal();
            for (z, &shift) in out.iter_mut().zip(shifts) {
                *z = shift + (s.normal() - control) * std::f64::consts::FRAC_1_SQRT_2;
            }
        }
    }
}

fn shifts(scenario: &Scenario) -> Vec<f64> {
    let scale = (scenario.n as f64 / 2.0).sqrt();
    scenario.deltas.iter().map(|d| d * scale).collect()
}

/// Test statistics for one replication.
pub fn sample_statistics(scenario: &Scenario, rep_seed: u64) -> Result<Vec<f64>> {
    scenario.validate()?;
    let mut out = vec![0.0; scenario.k];
    fill_statistics(scenario, &shifts(scenario), rep_seed, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rate {
    pub count: u64,
    pub rate: f64,
    /// Wilson 95% interval.
    pub ci95: (f64, f64),
}

impl Rate {
    fn new(count: u64, reps: u64) -> Self {
        Rate {
            count,
            rate: count as f64 / reps as f64,
            ci95: wilson_ci(count, reps, 0.95).expect("count <= reps"),
        }
    }

    /// Wilson interval at another confidence level.
    pub fn interval(&self, reps: u64, level: f64) -> Result<(f64, f64)> {
        wilson_ci(self.count, reps, level)
    }

    fn same_bits(&self, other: &Rate) -> bool {
        self.count == other.count
            && self.rate.to_bits() == other.rate.to_bits()
            && self.ci95.0.to_bits() == other.ci95.0.to_bits()
            && self.ci95.1.to_bits() == other.ci95.1.to_bits()
    }
}

/// Rates of rejecting the joint null, per testing mode.
///
/// `individual` is the rate of at least one unadjusted rejection: what an
/// analyst would see if unadjusted individual results were read as a joint claim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointRates {
    pub individual: Rate,
    pub disjunction: Rate,
    pub conjunction: Rate,
}

impl JointRates {
    pub fn get(&self, mode: TestingMode) -> &Rate {
        match mode {
            TestingMode::Individual => &self.individual,
            TestingMode::Disjunction => &self.disjunction,
            TestingMode::Conjunction => &self.conjunction,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Estimates {
    pub reps: u64,
    /// Probability of at least one false positive under unadjusted individual testing.
    pub fwer: Rate,
    /// Mean number of false positives per family.
    pub mean_false_positives: f64,
    /// Mean of V / max(R, 1).
    pub fdr_hat: f64,
    pub per_test_rejection: Vec<Rate>,
    pub joint_reject_rate: JointRates,
    pub disjunction_method: Method,
    pub seed_echo: u64,
    pub elapsed: Duration,
}

impl Estimates {
    pub fn fwer_hat(&self) -> f64 {
        self.fwer.rate
    }

    /// Bitwise equality of every estimate, ignoring `elapsed`.
    pub fn bit_identical(&self, other: &Estimates) -> bool {
        self.reps == other.reps
            && self.seed_echo == other.seed_echo
            && self.disjunction_method == other.disjunction_method
            && self.fwer.same_bits(&other.fwer)
            && self.mean_false_positives.to_bits() == other.mean_false_positives.to_bits()
            && self.fdr_hat.to_bits() == other.fdr_hat.to_bits()
            && self.per_test_rejection.len() == other.per_test_rejection.len()
            && self
                .per_test_rejection
                .iter()
                .zip(&other.per_test_rejection)
                .all(|(a, b)| a.same_bits(b))
            && [TestingMode::Individual, TestingMode::Disjunction, TestingMode::Conjunction]
                .iter()
                .all(|&m| {
                    self.joint_reject_rate
                        .get(m)
                        .same_bits(other.joint_reject_rate.get(m))
                })
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    any_false: u64,
    false_positives: u64,
    fdp_sum: f64,
    per_test: Vec<u64>,
    any_reject: u64,
    disjunction: u64,
    conjunction: u64,
}

impl Tally {
    fn new(k: usize) -> Self {
        Tally {
            per_test: vec![0; k],
            ..Default::default()
        }
    }

    fn merge(&mut self, other: &Tally) {
        self.any_false += other.any_false;
        self.false_positives += other.false_positives;
        self.fdp_sum += other.fdp_sum;
        for (a, b) in self.per_test.iter_mut().zip(&other.per_test) {
            *a += b;
        }
        self.any_reject += other.any_reject;
        self.disjunction += other.disjunction;
        self.conjunction += other.conjunction;
    }
}

fn run_chunk(scenario: &Scenario, shifts: &[f64], chunk: u64) -> Result<Tally> {
    let k = scenario.k;
    let start = chunk * CHUNK;
    let end = (start + CHUNK).min(scenario.reps);

    let mut tally = Tally::new(k);
    let mut z = vec![0.0; k];
    let mut p = vec![0.0; k];
    let mut thresholds = vec![0.0; k];
    let mut reject = vec![false; k];
    let mut ws = Workspace::default();

    for rep in start..end {
        fill_statistics(scenario, shifts, derive_rep_seed(scenario.seed, rep), &mut z);
        for (pi, &zi) in p.iter_mut().zip(&z) {
            *pi = p_from_z(zi, scenario.sides);
        }

        // individual testing at the unadjusted alpha; the conjunction decision
        // uses the same per-test comparisons
        apply_rule(Method::None, scenario.alpha_joint, &p, &mut thresholds, &mut reject, &mut ws)?;
        let mut v = 0u64;
        let mut r = 0u64;
        for (i, &rej) in reject.iter().enumerate() {
            if rej {
                r += 1;
                tally.per_test[i] += 1;
                if scenario.null_pattern[i] {
                    v += 1;
                }
            }
        }
        tally.false_positives += v;
        if v > 0 {
            tally.any_false += 1;
            tally.fdp_sum += v as f64 / r as f64;
        }
        if r > 0 {
            tally.any_reject += 1;
        }
        if r as usize == k {
            tally.conjunction += 1;
        }

        apply_rule(scenario.method, scenario.alpha_joint, &p, &mut thresholds, &mut reject, &mut ws)?;
        if reject.iter().any(|&b| b) {
            tally.disjunction += 1;
        }
    }
    Ok(tally)
}

fn finish(scenario: &Scenario, tallies: Vec<Result<Tally>>, started: Stopwatch) -> Result<Estimates> {
    let mut total = Tally::new(scenario.k);
    for t in tallies {
        total.merge(&t?);
    }
    let reps = scenario.reps;
    let n = reps as f64;
    Ok(Estimates {
        reps,
        fwer: Rate::new(total.any_false, reps),
        mean_false_positives: total.false_positives as f64 / n,
        fdr_hat: total.fdp_sum / n,
        per_test_rejection: total.per_test.iter().map(|&c| Rate::new(c, reps)).collect(),
        joint_reject_rate: JointRates {
            individual: Rate::new(total.any_reject, reps),
            disjunction: Rate::new(total.disjunction, reps),
            conjunction: Rate::new(total.conjunction, reps),
        },
        disjunction_method: scenario.method,
        seed_echo: scenario.seed,
        elapsed: started.elapsed(),
    })
}

/// Wall-clock timer. The browser target has no monotonic clock in std, so it reports zero there.
struct Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Stopwatch {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed(&self) -> Duration {
        #[cfg(not(target_arch = "wasm32"))]
        return self.start.elapsed();
        #[cfg(target_arch = "wasm32")]
        Duration::ZERO
    }
}

fn chunk_count(reps: u64) -> u64 {
    reps.div_ceil(CHUNK)
}

/// Runs the scenario on the current rayon pool.
pub fn simulate(scenario: &Scenario) -> Result<Estimates> {
    scenario.validate()?;
    let started = Stopwatch::start();
    let shifts = shifts(scenario);
    let tallies: Vec<_> = (0..chunk_count(scenario.reps))
        .into_par_iter()
        .map(|c| run_chunk(scenario, &shifts, c))
        .collect();
    finish(scenario, tallies, started)
}

/// Runs the scenario on a dedicated pool with `threads` workers.
pub fn simulate_with_threads(scenario: &Scenario, threads: usize) -> Result<Estimates> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidScenario(format!("cannot start worker threads: {e}")))?;
    pool.install(|| simulate(scenario))
}

/// Single-threaded reference run.
pub fn simulate_serial(scenario: &Scenario) -> Result<Estimates> {
    scenario.validate()?;
    let started = Stopwatch::start();
    let shifts = shifts(scenario);
    let tallies = (0..chunk_count(scenario.reps))
        .map(|c| run_chunk(scenario, &shifts, c))
        .collect();
    finish(scenario, tallies, started)
}
