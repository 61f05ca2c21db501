//! Closed-form error rates, alpha adjustments and power arithmetic.
//!
//! `(1 - a)^k` is always evaluated as `exp(k * ln(1 - a))` through `ln_1p` and
//! `exp_m1`, so tiny per-test alphas such as 5e-8 keep full precision.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::normal::{normal_cdf, normal_quantile};

/// Largest family size accepted by the closed-form routines.
pub const MAX_K: u64 = 10_000_000;

fn check_unit_open(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must lie in (0, 1), got {x}")))
    }
}

fn check_k(k: u64) -> Result<()> {
    if k == 0 {
        Err(domain("k must be at least 1"))
    } else if k > MAX_K {
        Err(domain(format!("k must not exceed {MAX_K}, got {k}")))
    } else {
        Ok(())
    }
}

/// `1 - (1 - x)^k`
fn one_minus_complement_pow(x: f64, k: u64) -> f64 {
    if k == 1 {
        return x;
    }
    -(k as f64 * (-x).ln_1p()).exp_m1()
}

/// Probability of at least one Type I error among `k` independent tests at `alpha`.
pub fn fwer_independent(alpha: f64, k: u64) -> Result<f64> {
    check_unit_open("alpha", alpha)?;
    check_k(k)?;
    Ok(one_minus_complement_pow(alpha, k))
}

/// Expected number of false positives among `k` true-null tests (`k * alpha`).
/// This is a count, so it may exceed 1.
pub fn per_family_rate(alpha: f64, k: u64) -> Result<f64> {
    check_unit_open("alpha", alpha)?;
    check_k(k)?;
    Ok(k as f64 * alpha)
}

/// Dunn-Šidák per-test alpha: `1 - (1 - alpha_joint)^(1/k)`.
pub fn sidak_adjust(alpha_joint: f64, k: u64) -> Result<f64> {
    check_unit_open("alpha", alpha_joint)?;
    check_k(k)?;
    if k == 1 {
        return Ok(alpha_joint);
    }
    Ok(-((-alpha_joint).ln_1p() / k as f64).exp_m1())
}

pub fn bonferroni_adjust(alpha_joint: f64, k: u64) -> Result<f64> {
    check_unit_open("alpha", alpha_joint)?;
    check_k(k)?;
    Ok(alpha_joint / k as f64)
}

/// Joint Type II error rate of a conjunction test over `k` independent constituents.
pub fn conjunction_type2(beta_constituent: f64, k: u64) -> Result<f64> {
    check_unit_open("beta", beta_constituent)?;
    check_k(k)?;
    Ok(one_minus_complement_pow(beta_constituent, k))
}

/// Joint power of a conjunction test: every constituent must reach significance.
pub fn conjunction_power(power_constituent: f64, k: u64) -> Result<f64> {
    check_unit_open("power", power_constituent)?;
    check_k(k)?;
    if k == 1 {
        return Ok(power_constituent);
    }
    Ok((k as f64 * power_constituent.ln()).exp())
}

/// Power of a one-sided two-sample z test with `n` observations per group
/// and standardized effect `delta`: `Φ(δ·√(n/2) − z₁₋α)`.
pub fn power_one_sided_z(alpha: f64, delta: f64, n: u64) -> Result<f64> {
    check_unit_open("alpha", alpha)?;
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(domain(format!("delta must be finite and >= 0, got {delta}")));
    }
    if n < 2 {
        return Err(domain(format!("n must be at least 2, got {n}")));
    }
    Ok(power_unchecked(alpha, delta, n as f64))
}

fn power_unchecked(alpha: f64, delta: f64, n: f64) -> f64 {
    // z_{1-α} = -z_α; the lower-tail form is exact for small alpha
    let z_crit = -normal_quantile(alpha);
    normal_cdf(delta * (n / 2.0).sqrt() - z_crit)
}

/// Per-test and joint Type II rates of a conjunction test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSpec {
    pub beta_constituent: f64,
    pub beta_joint: f64,
    pub k: u64,
}

impl PowerSpec {
    pub fn new(beta_constituent: f64, k: u64) -> Result<Self> {
        Ok(PowerSpec {
            beta_constituent,
            beta_joint: conjunction_type2(beta_constituent, k)?,
            k,
        })
    }

    pub fn joint_power(&self) -> f64 {
        1.0 - self.beta_joint
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModel {
    /// Relative weight of a Type I error; Type II errors weigh `1 - omega`.
    pub omega: f64,
    pub delta: f64,
    pub n: u64,
    pub alpha_bounds: (f64, f64),
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.omega) {
            return Err(domain(format!("omega must lie in [0, 1], got {}", self.omega)));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(domain(format!("delta must be finite and >= 0, got {}", self.delta)));
        }
        if self.n < 2 {
            return Err(domain(format!("n must be at least 2, got {}", self.n)));
        }
        let (lo, hi) = self.alpha_bounds;
        if !(lo > 0.0 && hi < 1.0 && lo <= hi) {
            return Err(domain(format!(
                "alpha bounds must satisfy 0 < lower <= upper < 1, got [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    /// Weighted cost `ω·α + (1−ω)·β(α)`.
    pub fn objective(&self, alpha: f64) -> f64 {
        let beta = 1.0 - power_unchecked(alpha, self.delta, self.n as f64);
        self.omega * alpha + (1.0 - self.omega) * beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalAlpha {
    pub alpha: f64,
    pub objective: f64,
}

const GOLDEN_TOL: f64 = 1e-9;

/// Minimizes the weighted error cost over the alpha bounds by golden-section
/// search. Ties go to the smaller alpha.
pub fn optimal_alpha(cost: &CostModel) -> Result<OptimalAlpha> {
    cost.validate()?;
    let f = |a: f64| cost.objective(a);
    let (lo, hi) = cost.alpha_bounds;

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let interior = 0.5 * (a + b);

    // the objective is monotone when omega is 0 or 1, so check the endpoints too
    let best = [lo, interior, hi]
        .into_iter()
        .map(|x| (x, f(x)))
        .fold(None::<(f64, f64)>, |best, (x, fx)| match best {
            Some((_, fb)) if fb <= fx => best,
            _ => Some((x, fx)),
        })
        .expect("non-empty candidate list");

    Ok(OptimalAlpha {
        alpha: best.0,
        objective: best.1,
    })
}

/// One column of the joint-versus-individual error rate table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRateReport {
    /// significance tests
    pub t: u64,
    /// primary hypotheses
    pub h: u64,
    /// tests per primary hypothesis
    pub k: u64,
    pub alpha_per_test: f64,
    /// expected false positives per primary hypothesis
    pub per_family_rate: f64,
    pub fwer: f64,
}

pub fn table1_report(t: u64, h: u64, alpha: f64) -> Result<ErrorRateReport> {
    if t == 0 || h == 0 {
        return Err(domain("t and h must both be at least 1"));
    }
    if !t.is_multiple_of(h) {
        return Err(domain(format!("h = {h} does not divide t = {t}")));
    }
    let k = t / h;
    Ok(ErrorRateReport {
        t,
        h,
        k,
        alpha_per_test: alpha,
        per_family_rate: per_family_rate(alpha, k)?,
        fwer: fwer_independent(alpha, k)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn fwer_examples() {
        assert_relative_eq!(fwer_independent(0.05, 2).unwrap(), 0.0975, max_relative = 1e-14);
        assert_relative_eq!(
            fwer_independent(0.05, 20).unwrap(),
            0.6415140775914578,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            fwer_independent(0.05, 100).unwrap(),
            0.994079470779666,
            max_relative = 1e-14
        );
        assert_eq!(fwer_independent(0.05, 1).unwrap(), 0.05);
        assert_eq!(fwer_independent(1.0 / 20.0, 20), fwer_independent(0.05, 20));
    }

    #[test]
    fn domain_errors() {
        for f in [fwer_independent, per_family_rate, sidak_adjust, bonferroni_adjust] {
            assert!(f(0.0, 2).is_err());
            assert!(f(1.0, 2).is_err());
            assert!(f(-0.1, 2).is_err());
            assert!(f(f64::NAN, 2).is_err());
            assert!(f(0.05, 0).is_err());
            assert!(f(0.05, MAX_K + 1).is_err());
        }
        assert!(conjunction_type2(0.2, 0).is_err());
        assert!(conjunction_power(1.0, 2).is_err());
    }

    #[test]
    fn per_family_examples() {
        assert_relative_eq!(per_family_rate(0.05, 20).unwrap(), 1.0, max_relative = 1e-15);
        assert_eq!(per_family_rate(0.05, 1).unwrap(), 0.05);
        assert_relative_eq!(per_family_rate(0.05, 100).unwrap(), 5.0, max_relative = 1e-15);
    }

    #[test]
    fn adjustment_examples() {
        assert_relative_eq!(
            sidak_adjust(0.05, 2).unwrap(),
            0.02532056551910361,
            max_relative = 1e-14
        );
        assert_eq!(sidak_adjust(0.05, 1).unwrap(), 0.05);
        assert_relative_eq!(sidak_adjust(0.0975, 2).unwrap(), 0.05, max_relative = 1e-13);
        assert_relative_eq!(
            bonferroni_adjust(0.05, 167_355).unwrap(),
            2.987660960234232e-7,
            max_relative = 1e-14
        );
        assert_relative_eq!(bonferroni_adjust(0.05, 1_000_000).unwrap(), 5.0e-8, max_relative = 1e-15);
        assert_eq!(bonferroni_adjust(0.05, 1).unwrap(), 0.05);
    }

    #[test]
    fn conjunction_examples() {
        assert_relative_eq!(conjunction_type2(0.20, 2).unwrap(), 0.36, max_relative = 1e-14);
        assert_eq!(conjunction_type2(0.3, 1).unwrap(), 0.3);
        assert_relative_eq!(conjunction_type2(0.5, 3).unwrap(), 0.875, max_relative = 1e-15);
        assert_relative_eq!(conjunction_power(0.8, 2).unwrap(), 0.64, max_relative = 1e-14);
        assert_eq!(conjunction_power(0.7, 1).unwrap(), 0.7);
        assert_relative_eq!(conjunction_power(0.9, 3).unwrap(), 0.729, max_relative = 1e-14);
        let spec = PowerSpec::new(0.2, 2).unwrap();
        assert_relative_eq!(spec.joint_power(), 0.64, max_relative = 1e-14);
    }

    #[test]
    fn power_examples() {
        assert!((power_one_sided_z(0.05, 0.0, 30).unwrap() - 0.05).abs() < 1e-12);
        // mpmath: Φ(0.5·√32 − z_.95)
        assert!((power_one_sided_z(0.05, 0.5, 64).unwrap() - 0.8817090317783468).abs() < 1e-12);
        assert!(power_one_sided_z(0.05, 10.0, 100).unwrap() > 1.0 - 1e-12);
        assert!(power_one_sided_z(0.05, 0.5, 1).is_err());
        assert!(power_one_sided_z(0.05, -0.1, 10).is_err());
    }

    #[test]
    fn power_monotone_on_grid() {
        let alphas = [0.001, 0.01, 0.025, 0.05, 0.1, 0.2];
        let deltas = [0.0, 0.1, 0.25, 0.5, 1.0];
        let ns = [2, 5, 10, 50, 200];
        for (i, &a) in alphas.iter().enumerate() {
            for (j, &d) in deltas.iter().enumerate() {
                for (l, &n) in ns.iter().enumerate() {
                    let p = power_one_sided_z(a, d, n).unwrap();
                    if i > 0 {
                        assert!(power_one_sided_z(alphas[i - 1], d, n).unwrap() <= p);
                    }
                    if j > 0 {
                        assert!(power_one_sided_z(a, deltas[j - 1], n).unwrap() <= p);
                    }
                    if l > 0 {
                        assert!(power_one_sided_z(a, d, ns[l - 1]).unwrap() <= p);
                    }
                }
            }
        }
    }

    #[test]
    fn table1_columns() {
        let joint = table1_report(20, 1, 0.05).unwrap();
        assert_eq!(joint.k, 20);
        assert_relative_eq!(joint.per_family_rate, 1.0, max_relative = 1e-15);
        assert_eq!(format!("{:.4}", joint.fwer), "0.6415");

        let individual = table1_report(20, 20, 0.05).unwrap();
        assert_eq!(individual.k, 1);
        assert_eq!(individual.per_family_rate, 0.05);
        assert_eq!(individual.fwer, 0.05);

        let single = table1_report(1, 1, 0.05).unwrap();
        assert_eq!((single.k, single.fwer), (1, 0.05));

        assert!(table1_report(20, 3, 0.05).is_err());
        assert!(table1_report(0, 1, 0.05).is_err());
    }

    fn model(omega: f64) -> CostModel {
        CostModel {
            omega,
            delta: 0.5,
            n: 64,
            alpha_bounds: (1e-6, 0.2),
        }
    }

    #[test]
    fn optimal_alpha_extremes() {
        assert_eq!(optimal_alpha(&model(1.0)).unwrap().alpha, 1e-6);
        assert_eq!(optimal_alpha(&model(0.0)).unwrap().alpha, 0.2);
    }

    #[test]
    fn optimal_alpha_rejects_bad_models() {
        let mut m = model(0.5);
        m.alpha_bounds = (0.0, 0.2);
        assert!(optimal_alpha(&m).is_err());
        m = model(1.5);
        assert!(optimal_alpha(&m).is_err());
        m = model(0.5);
        m.n = 1;
        assert!(optimal_alpha(&m).is_err());
    }

    #[test]
    fn bonferroni_never_exceeds_sidak() {
        for k in 1..=2000u64 {
            let b = bonferroni_adjust(0.05, k).unwrap();
            let s = sidak_adjust(0.05, k).unwrap();
            if k == 1 {
                assert_eq!(b, s);
            } else {
                assert!(b < s, "k = {k}");
            }
        }
    }

    proptest! {
        #[test]
        fn fwer_bounded_by_per_family(alpha in 1e-9f64..0.999, k in 1u64..100_000) {
            let f = fwer_independent(alpha, k).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!(f <= per_family_rate(alpha, k).unwrap() * (1.0 + 1e-15));
        }

        #[test]
        fn fwer_increasing(alpha in 1e-6f64..0.05, k in 1u64..200) {
            let f = fwer_independent(alpha, k).unwrap();
            prop_assert!(fwer_independent(alpha, k + 1).unwrap() > f);
            prop_assert!(fwer_independent(alpha * 1.01, k).unwrap() > f);
        }

        #[test]
        fn power_and_type2_complement(p in 0.001f64..0.999, k in 1u64..1000) {
            let s = conjunction_power(p, k).unwrap() + conjunction_type2(1.0 - p, k).unwrap();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
