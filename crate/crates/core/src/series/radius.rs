use serde::Serialize;

use super::sequence::CoefficientSequence;

/// Smallest cutoff accepted by the root-test window.
pub const MIN_WINDOW_CUTOFF: usize = 16;

/// Log-log slope of `a(m)^(1/m)` beyond which the window is read as a trend
/// towards 0 (negative) or towards infinity (positive).
pub const TREND_SLOPE: f64 = 0.5;

const WINDOW_SAMPLES: usize = 64;

/// How a radius of convergence was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaMethod {
    ClosedForm,
    RootTestEstimate,
}

impl SigmaMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SigmaMethod::ClosedForm => "closed-form",
            SigmaMethod::RootTestEstimate => "root-test-estimate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusEstimate {
    /// Radius in `[0, +inf]`.
    pub sigma: f64,
    pub method: SigmaMethod,
    /// Largest `a(m)^(1/m)` seen in the window (root-test estimates only).
    pub window_max_root: Option<f64>,
    /// Least-squares slope of `ln a(m)^(1/m)` against `ln m` over the window.
    pub window_trend: Option<f64>,
}

/// Radius of convergence `1 / limsup a(m)^(1/m)`.
///
/// Closed forms are returned whenever the sequence's structure fixes them.
/// Otherwise the limsup is replaced by the maximum of `a(m)^(1/m)` over the
/// window `[m_max/2, m_max]`. Two guards catch limits the window cannot
/// reach: maxima below `1/m_max` (or a clear downward power trend) report
/// `+inf`, minima above `m_max` (or a clear upward trend) report `0`.
pub fn radius_of_convergence(seq: &CoefficientSequence, m_max: usize) -> RadiusEstimate {
    if let Some(sigma) = seq.sigma_closed_form() {
        return RadiusEstimate {
            sigma,
            method: SigmaMethod::ClosedForm,
            window_max_root: None,
            window_trend: None,
        };
    }
    let m_max = m_max.max(MIN_WINDOW_CUTOFF);
    let lo = (m_max / 2).max(1);
    let samples = window_indices(lo, m_max);

    let roots: Vec<(f64, f64)> = samples
        .iter()
        .map(|&m| ((m as f64).ln(), seq.ln_a(m) / m as f64))
        .collect();
    let max_ln_root = roots.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let min_ln_root = roots.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let trend = log_log_slope(&roots);

    let ln_cut = (m_max as f64).ln();
    let sigma = if max_ln_root < -ln_cut || trend.is_some_and(|p| p <= -TREND_SLOPE) {
        f64::INFINITY
    } else if min_ln_root > ln_cut || trend.is_some_and(|p| p >= TREND_SLOPE) {
        0.0
    } else {
        (-max_ln_root).exp()
    };
    RadiusEstimate {
        sigma,
        method: SigmaMethod::RootTestEstimate,
        window_max_root: Some(max_ln_root.exp()),
        window_trend: trend,
    }
}

fn window_indices(lo: usize, hi: usize) -> Vec<usize> {
    if hi - lo < WINDOW_SAMPLES {
        return (lo..=hi).collect();
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..WINDOW_SAMPLES)
        .map(|k| {
            let t = k as f64 / (WINDOW_SAMPLES - 1) as f64;
            (a + t * (b - a)).exp().round() as usize
        })
        .collect();
    out.dedup();
    *out.last_mut().unwrap() = hi;
    out
}

// Slope of y against x; `None` unless every y is finite.
fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|p| !p.1.is_finite()) {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TailRule;

    fn ln_factorial(m: usize) -> f64 {
        (1..=m).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn harmonic_radius_is_one() {
        let r = radius_of_convergence(&CoefficientSequence::harmonic(), 100);
        assert_eq!(r.sigma, 1.0);
        assert_eq!(r.method, SigmaMethod::ClosedForm);
    }

    #[test]
    fn geometric_radius_is_inverse_ratio() {
        let s = CoefficientSequence::geometric(2.0).unwrap();
        assert_eq!(radius_of_convergence(&s, 100).sigma, 0.5);
    }

    #[test]
    fn inverse_factorial_has_infinite_radius() {
        let s = CoefficientSequence::from_ln_fn(1.0, |m| -ln_factorial(m)).unwrap();
        let r = radius_of_convergence(&s, 200);
        assert_eq!(r.method, SigmaMethod::RootTestEstimate);
        assert!(r.sigma.is_infinite());
        // The raw window maximum is still of order e/m, which is why the
        // trend guard is needed.
        let w = r.window_max_root.unwrap();
        assert!(w > 1e-2 && w < 3e-2, "window max {w}");
        assert!(r.window_trend.unwrap() < -0.9);
    }

    #[test]
    fn self_power_has_zero_radius() {
        let s = CoefficientSequence::from_ln_fn(1.0, |m| m as f64 * (m as f64).ln()).unwrap();
        let r = radius_of_convergence(&s, 200);
        assert_eq!(r.sigma, 0.0);
    }

    #[test]
    fn root_test_recovers_slowly_varying_radius() {
        // a(m) = 3^m / m^2 given through a formula: radius 1/3.
        let s =
            CoefficientSequence::from_ln_fn(3.0, |m| m as f64 * 3f64.ln() - 2.0 * (m as f64).ln())
                .unwrap();
        let r = radius_of_convergence(&s, 4000);
        assert!((r.sigma - 1.0 / 3.0).abs() < 2e-3, "{}", r.sigma);
    }

    #[test]
    fn structured_custom_tail_uses_closed_form() {
        let s =
            CoefficientSequence::custom(vec![1.0, 0.5, 0.2], TailRule::RepeatLastRatio).unwrap();
        let r = radius_of_convergence(&s, 100);
        assert_eq!(r.method, SigmaMethod::ClosedForm);
        assert!((r.sigma - 2.5).abs() < 1e-12);
    }
}
