use crate::error::{domain, Result};
use crate::normal::normal_quantile;

/// Wilson score interval for a binomial proportion.
pub fn wilson_ci(successes: u64, trials: u64, level: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(domain("wilson interval needs at least one trial"));
    }
    if successes > trials {
        return Err(domain(format!(
            "successes ({successes}) exceed trials ({trials})"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(domain(format!("confidence level must lie in (0, 1), got {level}")));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = normal_quantile(1.0 - (1.0 - level) / 2.0);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();

    let lower = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let upper = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(wilson_ci(0, 100, 0.95).unwrap().0, 0.0);
        assert_eq!(wilson_ci(100, 100, 0.95).unwrap().1, 1.0);
        // mpmath evaluation of the score interval
        let (lo, hi) = wilson_ci(50, 100, 0.95).unwrap();
        assert!((lo - 0.4038315303659956).abs() < 1e-12);
        assert!((hi - 0.5961684696340044).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(wilson_ci(1, 0, 0.95).is_err());
        assert!(wilson_ci(5, 4, 0.95).is_err());
        assert!(wilson_ci(1, 4, 1.0).is_err());
    }

    #[test]
    fn wider_at_higher_level() {
        let (a, b) = wilson_ci(30, 200, 0.95).unwrap();
        let (c, d) = wilson_ci(30, 200, 0.99).unwrap();
        assert!(c < a && d > b);
    }
}
