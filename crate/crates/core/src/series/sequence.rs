use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Closure returning `ln a(m)` for indices past an explicit list.
pub type LnCoefficientFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// How a [`SequenceKind::Custom`] sequence continues past its explicit values.
#[derive(Clone)]
pub enum TailRule {
    /// All coefficients past the list vanish. Always rejected: the sequence
    /// must have infinitely many nonzero entries.
    Zero,
    /// Continue geometrically with the ratio of the last two listed values.
    RepeatLastRatio,
    /// `a(m) = a(L) (m / L)^exponent` for `m > L`, `L` the list length.
    PowerLaw { exponent: f64 },
    /// Arbitrary tail given in log form, `m -> ln a(m)`. Working in logs
    /// keeps fast-growing or fast-decaying coefficients representable.
    LnFormula(LnCoefficientFn),
}

impl fmt::Debug for TailRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailRule::Zero => write!(f, "Zero"),
            TailRule::RepeatLastRatio => write!(f, "RepeatLastRatio"),
            TailRule::PowerLaw { exponent } => f
                .debug_struct("PowerLaw")
                .field("exponent", exponent)
                .finish(),
            TailRule::LnFormula(_) => write!(f, "LnFormula(..)"),
        }
    }
}

/// The family a coefficient sequence belongs to.
#[derive(Clone, Debug)]
pub enum SequenceKind {
    /// `a(m) = 1/m`.
    Harmonic,
    /// `a(1) = 1`, `a(m) = 1/(m(m-1))` for `m >= 2`.
    LogKind,
    /// `a(m) = ratio^m`.
    Geometric { ratio: f64 },
    /// `a(m) = m^exponent`.
    PowerLaw { exponent: f64 },
    /// Explicit leading values `a(1), .., a(L)` followed by a tail rule.
    Custom { values: Vec<f64>, tail: TailRule },
}

#[derive(Clone)]
pub(crate) enum Tail {
    None,
    Ratio { last: f64, ln_ratio: f64 },
    Power { last: f64, exponent: f64 },
    Formula(LnCoefficientFn),
}

impl fmt::Debug for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tail::None => write!(f, "None"),
            Tail::Ratio { last, ln_ratio } => f
                .debug_struct("Ratio")
                .field("last", last)
                .field("ln_ratio", ln_ratio)
                .finish(),
            Tail::Power { last, exponent } => f
                .debug_struct("Power")
                .field("last", last)
                .field("exponent", exponent)
                .finish(),
            Tail::Formula(_) => write!(f, "Formula(..)"),
        }
    }
}

/// A validated sequence of nonnegative coefficients `{a(m)}`, `m >= 1`, with
/// `a(1) > 0` and infinitely many nonzero terms.
#[derive(Clone, Debug)]
pub struct CoefficientSequence {
    kind: SequenceKind,
    tail: Tail,
}

/// Builds a sequence from a kind specification, checking its invariants.
pub fn make_sequence(kind: SequenceKind) -> Result<CoefficientSequence> {
    CoefficientSequence::new(kind)
}

impl CoefficientSequence {
    pub fn new(kind: SequenceKind) -> Result<Self> {
        let tail = match &kind {
            SequenceKind::Harmonic | SequenceKind::LogKind => Tail::None,
            SequenceKind::Geometric { ratio } => {
                if !(ratio.is_finite() && *ratio > 0.0) {
                    return Err(Error::InvalidSequence(format!(
                        "geometric ratio must be positive and finite, got {ratio}"
                    )));
                }
                Tail::None
            }
            SequenceKind::PowerLaw { exponent } => {
                if !exponent.is_finite() {
                    return Err(Error::InvalidSequence(format!(
                        "power-law exponent must be finite, got {exponent}"
                    )));
                }
                Tail::None
            }
            SequenceKind::Custom { values, tail } => validate_custom(values, tail)?,
        };
        Ok(Self { kind, tail })
    }

    pub fn harmonic() -> Self {
        Self {
            kind: SequenceKind::Harmonic,
            tail: Tail::None,
        }
    }

    pub fn log_kind() -> Self {
        Self {
            kind: SequenceKind::LogKind,
            tail: Tail::None,
        }
    }

    pub fn geometric(ratio: f64) -> Result<Self> {
        Self::new(SequenceKind::Geometric { ratio })
    }

    pub fn power_law(exponent: f64) -> Result<Self> {
        Self::new(SequenceKind::PowerLaw { exponent })
    }

    pub fn custom(values: Vec<f64>, tail: TailRule) -> Result<Self> {
        Self::new(SequenceKind::Custom { values, tail })
    }

    /// Custom sequence with `a(1) = first` and `ln a(m) = ln_a(m)` for `m >= 2`.
    pub fn from_ln_fn<F>(first: f64, ln_a: F) -> Result<Self>
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        Self::custom(vec![first], TailRule::LnFormula(Arc::new(ln_a)))
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    /// Short lowercase name used in reports.
    pub fn label(&self) -> &'static str {
        match self.kind {
            SequenceKind::Harmonic => "harmonic",
            SequenceKind::LogKind => "log",
            SequenceKind::Geometric { .. } => "geometric",
            SequenceKind::PowerLaw { .. } => "power-law",
            SequenceKind::Custom { .. } => "custom",
        }
    }

    /// Radius of convergence when it is known exactly from the sequence's
    /// structure.
    pub fn sigma_closed_form(&self) -> Option<f64> {
        match (&self.kind, &self.tail) {
            (SequenceKind::Harmonic, _)
            | (SequenceKind::LogKind, _)
            | (SequenceKind::PowerLaw { .. }, _) => Some(1.0),
            (SequenceKind::Geometric { ratio }, _) => Some(1.0 / ratio),
            (SequenceKind::Custom { .. }, Tail::Ratio { ln_ratio, .. }) => Some((-ln_ratio).exp()),
            (SequenceKind::Custom { .. }, Tail::Power { .. }) => Some(1.0),
            (SequenceKind::Custom { .. }, _) => None,
        }
    }

    /// Coefficient `a(m)`; `a(0)` is defined as zero.
    pub fn a(&self, m: usize) -> f64 {
        if m == 0 {
            return 0.0;
        }
        let mf = m as f64;
        match &self.kind {
            SequenceKind::Harmonic => 1.0 / mf,
            SequenceKind::LogKind => {
                if m == 1 {
                    1.0
                } else {
                    1.0 / (mf * (mf - 1.0))
                }
            }
            SequenceKind::Geometric { ratio } => ratio.powf(mf),
            SequenceKind::PowerLaw { exponent } => mf.powf(*exponent),
            SequenceKind::Custom { values, .. } => {
                if m <= values.len() {
                    values[m - 1]
                } else {
                    self.ln_a(m).exp()
                }
            }
        }
    }

    /// `ln a(m)`, `-inf` for vanishing coefficients.
    pub fn ln_a(&self, m: usize) -> f64 {
        if m == 0 {
            return f64::NEG_INFINITY;
        }
        let mf = m as f64;
        match &self.kind {
            SequenceKind::Harmonic => -mf.ln(),
            SequenceKind::LogKind => {
                if m == 1 {
                    0.0
                } else {
                    -(mf.ln() + (mf - 1.0).ln())
                }
            }
            SequenceKind::Geometric { ratio } => mf * ratio.ln(),
            SequenceKind::PowerLaw { exponent } => exponent * mf.ln(),
            SequenceKind::Custom { values, .. } => {
                let len = values.len();
                if m <= len {
                    return values[m - 1].ln();
                }
                match &self.tail {
                    Tail::Ratio { last, ln_ratio } => last.ln() + (m - len) as f64 * ln_ratio,
                    Tail::Power { last, exponent } => {
                        last.ln() + exponent * (mf.ln() - (len as f64).ln())
                    }
                    Tail::Formula(g) => g(m),
                    Tail::None => f64::NEG_INFINITY,
                }
            }
        }
    }

    /// `a(1), .., a(n)`.
    pub fn coefficients(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|m| self.a(m)).collect()
    }

    pub(crate) fn tail(&self) -> &Tail {
        &self.tail
    }
}

fn validate_custom(values: &[f64], tail: &TailRule) -> Result<Tail> {
    if values.is_empty() {
        return Err(Error::InvalidSequence(
            "custom sequence needs at least a(1)".into(),
        ));
    }
    if let Some((i, v)) = values
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
    {
        return Err(Error::InvalidSequence(format!(
            "a({}) = {v} is not a finite nonnegative number",
            i + 1
        )));
    }
    if values[0] <= 0.0 {
        return Err(Error::InvalidSequence("a(1) must be positive".into()));
    }
    let len = values.len();
    let last = values[len - 1];
    match tail {
        TailRule::Zero => Err(Error::InvalidSequence(
            "zero tail leaves only finitely many nonzero coefficients".into(),
        )),
        TailRule::RepeatLastRatio => {
            if len < 2 {
                return Err(Error::InvalidSequence(
                    "repeat-last-ratio tail needs at least two listed values".into(),
                ));
            }
            let prev = values[len - 2];
            if prev <= 0.0 || last <= 0.0 {
                return Err(Error::InvalidSequence(
                    "repeat-last-ratio tail needs the last two values positive".into(),
                ));
            }
            Ok(Tail::Ratio {
                last,
                ln_ratio: (last / prev).ln(),
            })
        }
        TailRule::PowerLaw { exponent } => {
            if !exponent.is_finite() {
                return Err(Error::InvalidSequence(format!(
                    "power-law tail exponent must be finite, got {exponent}"
                )));
            }
            if last <= 0.0 {
                return Err(Error::InvalidSequence(
                    "power-law tail needs the last listed value positive".into(),
                ));
            }
            Ok(Tail::Power {
                last,
                exponent: *exponent,
            })
        }
        TailRule::LnFormula(g) => {
            // Spot-check the formula on a spread of indices past the list.
            let mut any_nonzero = false;
            let mut m = len + 1;
            while m <= (1 << 24) {
                let v = g(m);
                if v.is_nan() || v == f64::INFINITY {
                    return Err(Error::InvalidSequence(format!(
                        "tail formula gives ln a({m}) = {v}"
                    )));
                }
                any_nonzero |= v > f64::NEG_INFINITY;
                m = if m < len + 64 { m + 1 } else { m * 2 };
            }
            if !any_nonzero {
                return Err(Error::InvalidSequence(
                    "tail formula vanishes on every sampled index".into(),
                ));
            }
            Ok(Tail::Formula(g.clone()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_values() {
        let s = CoefficientSequence::harmonic();
        assert_eq!(s.a(1), 1.0);
        assert_eq!(s.a(2), 0.5);
        assert!((s.a(3) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(s.sigma_closed_form(), Some(1.0));
    }

    #[test]
    fn log_kind_values() {
        let s = CoefficientSequence::log_kind();
        assert_eq!(s.a(1), 1.0);
        assert_eq!(s.a(2), 0.5);
        assert!((s.a(3) - 1.0 / 6.0).abs() < 1e-16);
        assert!((s.ln_a(3) - (1.0f64 / 6.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn geometric_closed_form_radius() {
        let s = CoefficientSequence::geometric(2.0).unwrap();
        assert_eq!(s.sigma_closed_form(), Some(0.5));
        assert_eq!(s.a(3), 8.0);
        assert!(CoefficientSequence::geometric(0.0).is_err());
        assert!(CoefficientSequence::geometric(-1.0).is_err());
    }

    #[test]
    fn zero_leading_coefficient_rejected() {
        let err = CoefficientSequence::custom(vec![0.0, 1.0], TailRule::Zero).unwrap_err();
        assert!(matches!(err, Error::InvalidSequence(_)));
        let err =
            CoefficientSequence::custom(vec![0.0, 1.0], TailRule::RepeatLastRatio).unwrap_err();
        assert!(matches!(err, Error::InvalidSequence(_)));
    }

    #[test]
    fn finite_support_rejected() {
        let err = CoefficientSequence::custom(vec![1.0, 0.5], TailRule::Zero).unwrap_err();
        assert!(matches!(err, Error::InvalidSequence(_)));
        let err = CoefficientSequence::from_ln_fn(1.0, |_| f64::NEG_INFINITY).unwrap_err();
        assert!(matches!(err, Error::InvalidSequence(_)));
    }

    #[test]
    fn negative_entry_rejected() {
        let err = CoefficientSequence::custom(
            vec![1.0, -0.5, 0.2],
            TailRule::PowerLaw { exponent: -2.0 },
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidSequence(_)));
    }

    #[test]
    fn repeat_last_ratio_tail() {
        let s =
            CoefficientSequence::custom(vec![1.0, 0.5, 0.25], TailRule::RepeatLastRatio).unwrap();
        assert!((s.a(4) - 0.125).abs() < 1e-15);
        assert!((s.a(10) - 0.5f64.powi(9)).abs() < 1e-15);
        assert!((s.sigma_closed_form().unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn power_law_tail() {
        let s = CoefficientSequence::custom(vec![1.0, 0.25], TailRule::PowerLaw { exponent: -2.0 })
            .unwrap();
        assert!((s.a(4) - 0.0625).abs() < 1e-15);
        assert_eq!(s.sigma_closed_form(), Some(1.0));
    }

    #[test]
    fn ln_formula_handles_huge_coefficients() {
        let s = CoefficientSequence::from_ln_fn(1.0, |m| m as f64 * (m as f64).ln()).unwrap();
        assert_eq!(s.a(1), 1.0);
        assert!((s.a(3) - 27.0).abs() < 1e-12);
        assert!(s.a(400).is_infinite());
        assert!((s.ln_a(400) - 400.0 * 400f64.ln()).abs() < 1e-9);
        assert_eq!(s.sigma_closed_form(), None);
    }
}
