use super::sequence::CoefficientSequence;
use crate::error::{Error, Result};

/// Default iteration cap for [`PartialSum::inverse`].
pub const DEFAULT_INVERSE_MAX_ITER: usize = 200;

/// The truncated power series `Q_n(s) = sum_{m=1}^{n} a(m) s^m`.
///
/// Coefficients are gathered once so that repeated evaluation (nodewise
/// inversion over a grid) costs `O(n)` per call.
#[derive(Clone, Debug)]
pub struct PartialSum {
    coeffs: Vec<f64>,
    // Present when some coefficient overflows f64; evaluation then sums
    // exp(ln a(m) + m ln s) term by term instead of Horner.
    ln_coeffs: Option<Vec<f64>>,
}

impl PartialSum {
    pub fn new(seq: &CoefficientSequence, n: usize) -> Self {
        assert!(n >= 1, "partial sum needs n >= 1");
        let coeffs = seq.coefficients(n);
        let ln_coeffs = if coeffs.iter().all(|c| c.is_finite()) {
            None
        } else {
            Some((1..=n).map(|m| seq.ln_a(m)).collect())
        };
        Self { coeffs, ln_coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn leading_coefficient(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.eval_with_derivative(s).0
    }

    pub fn derivative(&self, s: f64) -> f64 {
        self.eval_with_derivative(s).1
    }

    /// `(Q_n(s), Q_n'(s))`.
    pub fn eval_with_derivative(&self, s: f64) -> (f64, f64) {
        if s == 0.0 {
            return (0.0, self.coeffs[0]);
        }
        if let Some(ln_c) = &self.ln_coeffs {
            return eval_log_domain(ln_c, s);
        }
        // Q(s) = s P(s) with P(s) = sum a(m) s^(m-1); Horner on P and P'.
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.coeffs.iter().rev() {
            dp = dp * s + p;
            p = p * s + c;
        }
        (s * p, p + s * dp)
    }

    /// Solves `Q_n(s) = y` for `s >= 0`.
    ///
    /// Bracketed Newton in log-log coordinates: the root lies in
    /// `[0, y/a(1) + 1]` because `Q_n(s) >= a(1) s`; steps that leave the
    /// bracket or hit a non-finite value fall back to bisection. Once
    /// `|Q_n(s) - y| <= tol * max(1, y)` a final Newton step is taken.
    pub fn inverse(&self, y: f64, tol: f64, max_iter: usize) -> Result<f64> {
        if !(y >= 0.0) || !y.is_finite() {
            return Err(Error::Domain {
                what: "partial-sum inverse",
                value: y,
                radius: f64::INFINITY,
            });
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let a1 = self.coeffs[0];
        let mut lo = 0.0_f64;
        let mut hi = y / a1 + 1.0;
        let mut s = y / a1;
        let accept = tol * y.max(1.0);

        for _ in 0..max_iter {
            let (q, dq) = self.eval_with_derivative(s);
            let r = q - y;
            if r == 0.0 {
                return Ok(s);
            }
            let newton_ok = q.is_finite() && dq.is_finite() && dq > 0.0;
            if r.abs() <= accept && newton_ok {
                // One more Newton step lands at machine precision.
                let polished = s - r / dq;
                return Ok(if polished >= 0.0 { polished } else { s });
            }
            if r < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            // Newton on ln Q against ln s: that curve is convex and close to
            // linear for high degree, where plain Newton crawls by s/n.
            let newton = s * (-(q.ln() - y.ln()) * q / (s * dq)).exp();
            s = if newton_ok && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                // Bracket collapsed without meeting the tolerance.
                break;
            }
        }
        Err(Error::NoConvergence {
            what: "partial-sum inverse",
            iterations: max_iter,
        })
    }
}

fn eval_log_domain(ln_c: &[f64], s: f64) -> (f64, f64) {
    let ln_s = s.ln();
    let mut q = 0.0;
    let mut dq = ln_c[0].exp();
    for (k, &lc) in ln_c.iter().enumerate() {
        let m = (k + 1) as f64;
        q += (lc + m * ln_s).exp();
        if k > 0 {
            dq += m * (lc + (m - 1.0) * ln_s).exp();
        }
    }
    (q, dq)
}

/// `Q_n(s)` evaluated by Horner's rule.
pub fn q_partial(seq: &CoefficientSequence, n: usize, s: f64) -> f64 {
    PartialSum::new(seq, n).eval(s)
}

/// Inverse of `Q_n` with the default iteration cap.
pub fn q_partial_inverse(seq: &CoefficientSequence, n: usize, y: f64, tol: f64) -> Result<f64> {
    PartialSum::new(seq, n).inverse(y, tol, DEFAULT_INVERSE_MAX_ITER)
}
