use serde::Serialize;

use super::full::CompensatedSum;
use super::sequence::{CoefficientSequence, SequenceKind, Tail};
use crate::error::{Error, Result};

/// Partial sums above this value are taken as evidence of divergence.
pub const DIVERGENCE_CEILING: f64 = 1e15;

const RATIO_WINDOW: usize = 16;

/// Which argument settled the status of `K = sum a(m) sigma^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// Exact closed-form tail (telescoping or geometric).
    ClosedFormTail,
    /// Tail squeezed between two integrals of a monotone power.
    IntegralComparison,
    /// Successive-term ratios bounded by `q < 1` over the final window.
    GeometricTail,
    /// Terms dominate a constant multiple of `1/m`.
    HarmonicComparison,
    /// Terms do not tend to zero.
    NonvanishingTerms,
    /// Partial sums exceeded [`DIVERGENCE_CEILING`].
    Ceiling,
    /// `sigma = +inf`: the boundary sum is infinite by convention.
    InfiniteRadius,
    /// `sigma = 0`: every term vanishes.
    ZeroRadius,
}

/// Status of the boundary sum `K`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundarySum {
    Finite {
        value: f64,
        tail_bound: f64,
        certificate: Certificate,
    },
    Divergent {
        partial_sum: f64,
        cutoff: usize,
        certificate: Certificate,
    },
    /// Neither certificate fired within the cutoff.
    Inconclusive { partial_sum: f64, cutoff: usize },
}

impl BoundarySum {
    pub fn finite_value(&self) -> Option<f64> {
        match self {
            BoundarySum::Finite { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, BoundarySum::Divergent { .. })
    }

    pub fn status_str(&self) -> &'static str {
        match self {
            BoundarySum::Finite { .. } => "finite",
            BoundarySum::Divergent { .. } => "divergent",
            BoundarySum::Inconclusive { .. } => "inconclusive",
        }
    }
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Decides whether `K = sum_{m>=1} a(m) sigma^m` converges, and bounds it.
///
/// Built-in kinds evaluated at their own radius use exact comparisons:
/// telescoping for the log kind, harmonic comparison and integral brackets
/// for power laws, constant terms for geometric sequences. Structured custom
/// tails are summed in closed form. Everything else goes through a
/// geometric-ratio tail test with a partial-sum ceiling for divergence. A
/// status is never guessed; without a certificate the result is
/// [`BoundarySum::Inconclusive`].
pub fn boundary_sum(
    seq: &CoefficientSequence,
    sigma: f64,
    tol: f64,
    m_max: usize,
) -> Result<BoundarySum> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain {
            what: "boundary sum",
            value: sigma,
            radius: sigma,
        });
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!(
            "series tolerance must be positive, got {tol}"
        )));
    }
    let m_max = m_max.max(1);
    let at_radius = seq.sigma_closed_form().is_some_and(|s| rel_close(s, sigma));

    match (seq.kind(), seq.tail()) {
        (SequenceKind::Harmonic, _) if at_radius => Ok(BoundarySum::Divergent {
            partial_sum: partial(seq, sigma, m_max),
            cutoff: m_max,
            certificate: Certificate::HarmonicComparison,
        }),
        (SequenceKind::Geometric { .. }, _) if at_radius => Ok(BoundarySum::Divergent {
            partial_sum: partial(seq, sigma, m_max),
            cutoff: m_max,
            certificate: Certificate::NonvanishingTerms,
        }),
        (SequenceKind::LogKind, _) if at_radius => {
            // sum_{m=2}^{M} 1/(m(m-1)) = 1 - 1/M, so the tail past M is 1/M.
            let cut = m_max.min(1024);
            let head = partial(seq, 1.0, cut);
            let value = head + 1.0 / cut as f64;
            Ok(BoundarySum::Finite {
                value,
                tail_bound: rounding(value, cut),
                certificate: Certificate::ClosedFormTail,
            })
        }
        (SequenceKind::PowerLaw { exponent }, _) if at_radius => Ok(p_series(
            CompensatedSum::default(),
            0,
            1.0,
            *exponent,
            tol,
            m_max,
        )),
        (SequenceKind::Custom { values, .. }, Tail::Ratio { ln_ratio, .. }) => {
            let len = values.len();
            let x = (ln_ratio + sigma.ln()).exp();
            if x >= 1.0 || rel_close(x, 1.0) {
                return Ok(BoundarySum::Divergent {
                    partial_sum: partial(seq, sigma, m_max),
                    cutoff: m_max,
                    certificate: Certificate::NonvanishingTerms,
                });
            }
            let head = partial(seq, sigma, len);
            let t_len = (seq.ln_a(len) + len as f64 * sigma.ln()).exp();
            let value = head + t_len * x / (1.0 - x);
            Ok(BoundarySum::Finite {
                value,
                tail_bound: rounding(value, len),
                certificate: Certificate::ClosedFormTail,
            })
        }
        (SequenceKind::Custom { values, .. }, Tail::Power { last, exponent }) => {
            let len = values.len();
            if rel_close(sigma, 1.0) {
                let mut head = CompensatedSum::default();
                for m in 1..=len {
                    head.add(seq.a(m));
                }
                let scale = last / (len as f64).powf(*exponent);
                Ok(p_series(head, len, scale, *exponent, tol, m_max))
            } else if sigma > 1.0 {
                Ok(BoundarySum::Divergent {
                    partial_sum: partial(seq, sigma, m_max),
                    cutoff: m_max,
                    certificate: Certificate::NonvanishingTerms,
                })
            } else {
                Ok(ratio_test(seq, sigma, tol, m_max, Some(sigma)))
            }
        }
        _ => {
            let limit_ratio = seq.sigma_closed_form().map(|s| sigma / s);
            if limit_ratio.is_some_and(|q| q > 1.0) {
                return Ok(BoundarySum::Divergent {
                    partial_sum: partial(seq, sigma, m_max),
                    cutoff: m_max,
                    certificate: Certificate::NonvanishingTerms,
                });
            }
            Ok(ratio_test(seq, sigma, tol, m_max, limit_ratio))
        }
    }
}

fn term(seq: &CoefficientSequence, m: usize, ln_sigma: f64) -> f64 {
    (seq.ln_a(m) + m as f64 * ln_sigma).exp()
}

fn partial(seq: &CoefficientSequence, sigma: f64, n: usize) -> f64 {
    let ln_sigma = sigma.ln();
    let mut acc = CompensatedSum::default();
    for m in 1..=n {
        acc.add(term(seq, m, ln_sigma));
    }
    acc.value()
}

fn rounding(value: f64, terms: usize) -> f64 {
    4.0 * f64::EPSILON * value.abs() * (terms as f64).log2().max(1.0)
}

/// Tail of `sum scale * m^p` for `m > start`, added to `head`.
fn p_series(
    mut head: CompensatedSum,
    start: usize,
    scale: f64,
    p: f64,
    tol: f64,
    m_max: usize,
) -> BoundarySum {
    let mut m = start;
    if p >= -1.0 {
        for k in start + 1..=m_max {
            head.add(scale * (k as f64).powf(p));
        }
        return BoundarySum::Divergent {
            partial_sum: head.value(),
            cutoff: m_max,
            certificate: Certificate::HarmonicComparison,
        };
    }
    let q = -(p + 1.0);
    loop {
        if m >= 1 {
            // x^p is convex, so Hermite-Hadamard brackets sum_{k>m} k^p
            // between int_{m+1}^inf x^p + (m+1)^p / 2 and int_{m+1/2}^inf x^p.
            let m1 = (m + 1) as f64;
            let upper = scale * (m as f64 + 0.5).powf(-q) / q;
            let lower = scale * (m1.powf(-q) / q + 0.5 * m1.powf(p));
            let mid = 0.5 * (upper + lower);
            let half = 0.5 * (upper - lower);
            let value = head.value() + mid;
            let bound = half + rounding(value, m);
            if bound < tol * value {
                return BoundarySum::Finite {
                    value,
                    tail_bound: bound,
                    certificate: Certificate::IntegralComparison,
                };
            }
        }
        if m >= m_max {
            return BoundarySum::Inconclusive {
                partial_sum: head.value(),
                cutoff: m_max,
            };
        }
        m += 1;
        head.add(scale * (m as f64).powf(p));
    }
}

/// Geometric-ratio tail test. `limit_ratio`, when known, is an upper bound
/// on every later term ratio and is folded into the window maximum.
fn ratio_test(
    seq: &CoefficientSequence,
    sigma: f64,
    tol: f64,
    m_max: usize,
    limit_ratio: Option<f64>,
) -> BoundarySum {
    let ln_sigma = sigma.ln();
    let mut acc = CompensatedSum::default();
    let mut window: std::collections::VecDeque<f64> =
        std::collections::VecDeque::with_capacity(RATIO_WINDOW + 1);
    for m in 1..=m_max {
        let t = term(seq, m, ln_sigma);
        if !t.is_finite() {
            return BoundarySum::Divergent {
                partial_sum: f64::INFINITY,
                cutoff: m,
                certificate: Certificate::Ceiling,
            };
        }
        acc.add(t);
        let s = acc.value();
        if s > DIVERGENCE_CEILING {
            return BoundarySum::Divergent {
                partial_sum: s,
                cutoff: m,
                certificate: Certificate::Ceiling,
            };
        }
        window.push_back(t);
        if window.len() > RATIO_WINDOW {
            window.pop_front();
        }
        if window.len() == RATIO_WINDOW && window.iter().all(|&x| x > 0.0) {
            let mut q = window
                .iter()
                .zip(window.iter().skip(1))
                .map(|(a, b)| b / a)
                .fold(0.0_f64, f64::max);
            if let Some(l) = limit_ratio {
                q = q.max(l);
            }
            if q < 1.0 {
                let bound = t * q / (1.0 - q);
                if bound < tol * s {
                    return BoundarySum::Finite {
                        value: s,
                        tail_bound: bound,
                        certificate: Certificate::GeometricTail,
                    };
                }
            }
        }
    }
    BoundarySum::Inconclusive {
        partial_sum: acc.value(),
        cutoff: m_max,
    }
}
