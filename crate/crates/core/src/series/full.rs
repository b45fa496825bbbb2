use super::partial::PartialSum;
use super::radius::radius_of_convergence;
use super::sequence::CoefficientSequence;
use crate::error::{Error, Result};

/// Cutoff used for root-test radius estimates inside the full-series
/// evaluators.
pub const DEFAULT_RADIUS_CUTOFF: usize = 4096;

/// Hard cap on the number of terms summed adaptively.
pub const MAX_TERMS: usize = 50_000_000;

// Consecutive terms whose majorant must sit below tol before stopping.
const QUIET_RUN: usize = 8;

fn radius_for(seq: &CoefficientSequence) -> f64 {
    seq.sigma_closed_form()
        .unwrap_or_else(|| radius_of_convergence(seq, DEFAULT_RADIUS_CUTOFF).sigma)
}

/// `a(m) s^k` given `pw = s^k`, switching to log form when either factor
/// leaves f64 range.
fn term(seq: &CoefficientSequence, m: usize, k: usize, pw: f64, ln_s: f64) -> f64 {
    let a = seq.a(m);
    if a.is_finite() && pw > 0.0 && pw.is_finite() {
        a * pw
    } else {
        (seq.ln_a(m) + k as f64 * ln_s).exp()
    }
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Full series `Q(s) = sum_{m>=1} a(m) s^m` for `0 <= s < sigma`.
///
/// Terms are added until the geometric majorant `a(m) s^m / (1 - s/sigma)`
/// stays below `tol` for several consecutive indices.
pub fn q_full(seq: &CoefficientSequence, s: f64, tol: f64) -> Result<f64> {
    adaptive_sum(seq, s, tol, false)
}

/// `Q'(s) = sum m a(m) s^(m-1)`.
///
/// With `n = Some(n)` the partial-sum derivative `Q_n'(s)` is returned for
/// any `s >= 0`; otherwise the full series is summed with the same adaptive
/// truncation as [`q_full`].
pub fn q_derivative(seq: &CoefficientSequence, s: f64, tol: f64, n: Option<usize>) -> Result<f64> {
    if let Some(n) = n {
        if !(s >= 0.0) {
            return Err(Error::Domain {
                what: "partial-sum derivative",
                value: s,
                radius: f64::INFINITY,
            });
        }
        return Ok(PartialSum::new(seq, n).derivative(s));
    }
    adaptive_sum(seq, s, tol, true)
}

fn adaptive_sum(seq: &CoefficientSequence, s: f64, tol: f64, derivative: bool) -> Result<f64> {
    let what = if derivative {
        "series derivative"
    } else {
        "series"
    };
    let sigma = radius_for(seq);
    if !(s >= 0.0) || s >= sigma {
        return Err(Error::Domain {
            what,
            value: s,
            radius: sigma,
        });
    }
    if s == 0.0 {
        return Ok(if derivative { seq.a(1) } else { 0.0 });
    }
    let geometric = 1.0 / (1.0 - s / sigma);
    let ln_s = s.ln();
    let mut acc = CompensatedSum::default();
    let mut pw = 1.0;
    let mut quiet = 0;
    for m in 1..=MAX_TERMS {
        // pw holds s^(m-1) at the top of the loop.
        let t = if derivative {
            m as f64 * term(seq, m, m - 1, pw, ln_s)
        } else {
            term(seq, m, m, pw * s, ln_s)
        };
        acc.add(t);
        pw *= s;
        if t * geometric < tol {
            quiet += 1;
            if quiet >= QUIET_RUN {
                return Ok(acc.value());
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NoConvergence {
        what,
        iterations: MAX_TERMS,
    })
}
