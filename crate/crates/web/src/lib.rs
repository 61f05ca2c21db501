//! Browser bindings for the alphagate demo page.
//!
//! Each exported function takes plain numbers and returns a JSON string, so
//! the page needs no generated TypeScript types. The logic lives in ordinary
//! Rust functions that are tested natively.

use alphagate::sim::{simulate_serial, Design, Scenario};
use alphagate::{
    bonferroni_adjust, conjunction_power, fwer_independent, power_one_sided_z, sidak_adjust,
    Method,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Upper bound on replications per browser run; the page runs on the UI thread.
pub const MAX_WEB_REPS: u64 = 2_000_000;

#[derive(Debug, Serialize)]
pub struct ErrorCurves {
    pub k: Vec<u64>,
    pub fwer: Vec<f64>,
    pub sidak: Vec<f64>,
    pub bonferroni: Vec<f64>,
}

/// FWER of unadjusted tests and the Šidák and Bonferroni per-test alphas for k = 1..=k_max.
pub fn error_curves(alpha: f64, k_max: u64) -> Result<ErrorCurves, String> {
    if !(1..=10_000).contains(&k_max) {
        return Err("k_max must be between 1 and 10000".into());
    }
    let mut out = ErrorCurves {
        k: Vec::new(),
        fwer: Vec::new(),
        sidak: Vec::new(),
        bonferroni: Vec::new(),
    };
    for k in 1..=k_max {
        out.k.push(k);
        out.fwer.push(fwer_independent(alpha, k).map_err(|e| e.to_string())?);
        out.sidak.push(sidak_adjust(alpha, k).map_err(|e| e.to_string())?);
        out.bonferroni.push(bonferroni_adjust(alpha, k).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct PowerCurves {
    pub n: Vec<u64>,
    pub power: Vec<f64>,
    pub conjunction: Vec<f64>,
}

/// Per-test and conjunction power of one-sided z tests for n = 2..=n_max per group.
pub fn power_curves(alpha: f64, delta: f64, n_max: u64, k: u64) -> Result<PowerCurves, String> {
    if !(2..=100_000).contains(&n_max) {
        return Err("n_max must be between 2 and 100000".into());
    }
    if k == 0 {
        return Err("k must be at least 1".into());
    }
    let mut out = PowerCurves {
        n: Vec::new(),
        power: Vec::new(),
        conjunction: Vec::new(),
    };
    for n in 2..=n_max {
        let p = power_one_sided_z(alpha, delta, n).map_err(|e| e.to_string())?;
        let joint = if p > 0.0 && p < 1.0 {
            conjunction_power(p, k).map_err(|e| e.to_string())?
        } else {
            p.powf(k as f64)
        };
        out.n.push(n);
        out.power.push(p);
        out.conjunction.push(joint);
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct SimulationSummary {
    pub reps: u64,
    pub seed: u64,
    pub design: String,
    pub method: String,
    pub fwer: f64,
    pub fwer_ci95: (f64, f64),
    pub fwer_formula: f64,
    pub disjunction: f64,
    pub conjunction: f64,
    pub fdr: f64,
    pub mean_false_positives: f64,
}

/// All-null Monte Carlo run. `design` is "independent", "equicorrelated" or "shared_control";
/// `rho` is used only by the equicorrelated design.
pub fn simulate_null(
    k: usize,
    alpha: f64,
    design: &str,
    rho: f64,
    method: &str,
    reps: u64,
    seed: u64,
) -> Result<SimulationSummary, String> {
    if reps > MAX_WEB_REPS {
        return Err(format!("reps is limited to {MAX_WEB_REPS} in the browser"));
    }
    let design = match design {
        "independent" => Design::Independent,
        "equicorrelated" => Design::Equicorrelated { rho },
        "shared_control" => Design::SharedControl,
        other => return Err(format!("unknown design {other:?}")),
    };
    let method: Method = method.parse().map_err(|e: alphagate::Error| e.to_string())?;
    let scenario = Scenario::all_null(k, alpha, reps, seed)
        .with_design(design)
        .with_method(method);
    let est = simulate_serial(&scenario).map_err(|e| e.to_string())?;
    Ok(SimulationSummary {
        reps: est.reps,
        seed: est.seed_echo,
        design: scenario.design.label(),
        method: est.disjunction_method.to_string(),
        fwer: est.fwer.rate,
        fwer_ci95: est.fwer.ci95,
        fwer_formula: fwer_independent(alpha, k as u64).map_err(|e| e.to_string())?,
        disjunction: est.joint_reject_rate.disjunction.rate,
        conjunction: est.joint_reject_rate.conjunction.rate,
        fdr: est.fdr_hat,
        mean_false_positives: est.mean_false_positives,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = errorCurves)]
pub fn error_curves_js(alpha: f64, k_max: u32) -> Result<String, JsValue> {
    to_js(error_curves(alpha, k_max.into()))
}

#[wasm_bindgen(js_name = powerCurves)]
pub fn power_curves_js(alpha: f64, delta: f64, n_max: u32, k: u32) -> Result<String, JsValue> {
    to_js(power_curves(alpha, delta, n_max.into(), k.into()))
}

/// `seed` arrives as a double from JavaScript; integers up to 2^53 are exact.
#[wasm_bindgen(js_name = simulateNull)]
pub fn simulate_null_js(
    k: u32,
    alpha: f64,
    design: &str,
    rho: f64,
    method: &str,
    reps: u32,
    seed: f64,
) -> Result<String, JsValue> {
    if !(seed >= 0.0 && seed.fract() == 0.0 && seed <= 9_007_199_254_740_992.0) {
        return Err(JsValue::from_str("seed must be a non-negative integer"));
    }
    to_js(simulate_null(k as usize, alpha, design, rho, method, reps.into(), seed as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_match_closed_forms() {
        let c = error_curves(0.05, 20).unwrap();
        assert_eq!(c.k.len(), 20);
        assert!((c.fwer[1] - 0.0975).abs() < 1e-15);
        assert!((c.fwer[19] - 0.6415140775914581).abs() < 1e-12);
        assert!((c.sidak[1] - 0.025320565519103).abs() < 1e-12);
        assert_eq!(c.bonferroni[19], 0.05 / 20.0);
        assert!(error_curves(0.05, 0).is_err());
        assert!(error_curves(1.5, 3).is_err());
    }

    #[test]
    fn power_rises_with_n() {
        let c = power_curves(0.05, 0.5, 200, 2).unwrap();
        assert!(c.power.windows(2).all(|w| w[1] >= w[0]));
        let i = c.n.iter().position(|&n| n == 64).unwrap();
        assert!((c.conjunction[i] - c.power[i] * c.power[i]).abs() < 1e-12);
        assert!(power_curves(0.05, 0.5, 1, 2).is_err());
    }

    #[test]
    fn simulation_summary() {
        let s = simulate_null(20, 0.05, "independent", 0.0, "sidak", 20_000, 3).unwrap();
        assert!((s.fwer - s.fwer_formula).abs() < 0.02);
        assert!((s.disjunction - 0.05).abs() < 0.01);
        assert_eq!(s.fdr.to_bits(), s.fwer.to_bits());
        let d = simulate_null(20, 0.05, "equicorrelated", 0.5, "bonferroni", 20_000, 3).unwrap();
        assert!(d.fwer < s.fwer);
        assert!(simulate_null(20, 0.05, "bogus", 0.0, "sidak", 10, 3).is_err());
        assert!(simulate_null(20, 0.05, "independent", 0.0, "holm", MAX_WEB_REPS + 1, 3).is_err());
    }

    #[test]
    fn json_shape() {
        let json = to_js(error_curves(0.05, 2)).unwrap();
        assert!(json.starts_with("{\"k\":[1,2],\"fwer\":[0.05,"));
    }
}
