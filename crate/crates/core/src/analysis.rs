//! Existence diagnostics for `-div(A grad psi(u)) = lambda f`,
//! `psi(s) = sum a(m) s^m`.
//!
//! The radius `sigma` and the boundary sum `K` decide the regime. With `K`
//! finite, two thresholds bracket the critical load: below
//! `K / sup v1` the constructive scheme stays under `sigma`, above
//! `K * lambda1(A, f)` no weak solution exists. Between them nothing is
//! claimed.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::elliptic::{solve_linear_with, CgOptions, EllipticProblem, GridFunction};
use crate::error::{Error, Result};
use crate::series::{BoundarySum, CoefficientSequence, SeriesProfile, DEFAULT_M_MAX};
use crate::spectral::{principal_eigenpair_with, DEFAULT_EIG_MAX_ITER};

/// Numerical settings shared by the analysis and pipeline layers.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// CG relative residual.
    pub tol_linear: f64,
    /// Relative change of successive eigenvalue estimates.
    pub tol_eig: f64,
    /// Series truncation and partial-sum inversion tolerance.
    pub tol_series: f64,
    /// Cutoff for the radius and boundary-sum computations.
    pub m_max: usize,
    /// Relative half-width of the band around each threshold classified as
    /// indeterminate. Never narrower than `10 * max(tol_linear, tol_eig)`.
    pub band: f64,
    pub jacobi: bool,
    pub cg_max_iter: Option<usize>,
    pub eig_max_iter: usize,
    /// Also compute `sup v1` and `lambda1` on the grid with half the cells.
    pub coarse_check: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_linear: 1e-10,
            tol_eig: 1e-10,
            tol_series: 1e-10,
            m_max: DEFAULT_M_MAX,
            band: 0.0,
            jacobi: false,
            cg_max_iter: None,
            eig_max_iter: DEFAULT_EIG_MAX_ITER,
            coarse_check: true,
        }
    }
}

impl Tolerances {
    pub fn cg_options(&self) -> CgOptions {
        CgOptions {
            tol: self.tol_linear,
            max_iter: self.cg_max_iter,
            jacobi: self.jacobi,
        }
    }

    pub fn effective_band(&self) -> f64 {
        self.band
            .max(10.0 * self.tol_linear)
            .max(10.0 * self.tol_eig)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol_linear", self.tol_linear),
            ("tol_eig", self.tol_eig),
            ("tol_series", self.tol_series),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if !(self.band >= 0.0 && self.band < 1.0) {
            return Err(Error::Config(format!(
                "band must lie in [0, 1), got {}",
                self.band
            )));
        }
        Ok(())
    }
}

/// Classification of a load factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Verdict {
    ExistsCertified,
    Indeterminate,
    NonexistenceProven,
    /// `sigma = 0`: only `u = 0` is admissible.
    TrivialOnly,
    /// `K` divergent (or `sigma = +inf`): solutions exist for all data.
    ExistsAllData,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ExistsCertified => "ExistsCertified",
            Verdict::Indeterminate => "Indeterminate",
            Verdict::NonexistenceProven => "NonexistenceProven",
            Verdict::TrivialOnly => "TrivialOnly",
            Verdict::ExistsAllData => "ExistsAllData",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `sup v1` and `lambda1` recomputed on the coarsened grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoarseEstimate {
    pub grid_n: usize,
    pub sup_v1: f64,
    pub lambda1: f64,
}

#[derive(Clone, Debug)]
pub struct DiagnosisReport {
    pub series: SeriesProfile,
    /// The classified load factor.
    pub lambda: f64,
    /// `sup v1` with `-div(A grad v1) = f`; `None` when no solve was needed.
    pub sup_v1: Option<f64>,
    pub lambda1: Option<f64>,
    /// `K / sup v1`; `+inf` for divergent `K`, NaN when unknown.
    pub lambda_exist: f64,
    /// `K * lambda1`; `+inf` for divergent `K`, NaN when unknown.
    pub lambda_nonexist: f64,
    pub verdict: Verdict,
    /// Why the verdict is indeterminate independently of `lambda`.
    pub cause: Option<String>,
    /// `|{lambda v1 >= K}|`, 0 when `K` is not finite.
    pub flat_zone_measure: f64,
    pub grid_n: Vec<usize>,
    pub coarse: Option<CoarseEstimate>,
    pub band: f64,
    pub tolerances: Tolerances,
}

impl DiagnosisReport {
    /// Verdict for another load factor with the same datum.
    pub fn classify(&self, lambda: f64) -> Verdict {
        match self.verdict {
            Verdict::TrivialOnly | Verdict::ExistsAllData => return self.verdict,
            _ if self.cause.is_some() => return Verdict::Indeterminate,
            _ => {}
        }
        classify_against(lambda, self.lambda_exist, self.lambda_nonexist, self.band)
    }

    /// Bracket `[lambda_exist, lambda_nonexist]` around the critical load.
    pub fn bracket(&self) -> (f64, f64) {
        (self.lambda_exist, self.lambda_nonexist)
    }

    /// Flat JSON object; non-finite numbers become `null`.
    pub fn to_json(&self) -> Map<String, Value> {
        let (k_value, k_tail) = match self.series.k {
            BoundarySum::Finite {
                value, tail_bound, ..
            } => (value, tail_bound),
            BoundarySum::Divergent { partial_sum, .. } => (f64::INFINITY, partial_sum),
            BoundarySum::Inconclusive { partial_sum, .. } => (partial_sum, f64::NAN),
        };
        let k_tail = if self.series.k.is_divergent() {
            f64::NAN
        } else {
            k_tail
        };
        let mut m = Map::new();
        m.insert("sigma".into(), num(self.series.sigma()));
        m.insert(
            "sigma_method".into(),
            json!(self.series.sigma.method.as_str()),
        );
        m.insert("K_status".into(), json!(self.series.k.status_str()));
        m.insert("K_value".into(), num(k_value));
        m.insert("K_tail_bound".into(), num(k_tail));
        m.insert("sup_v1".into(), opt(self.sup_v1));
        m.insert("lambda1".into(), opt(self.lambda1));
        m.insert("lambda_exist".into(), num(self.lambda_exist));
        m.insert("lambda_nonexist".into(), num(self.lambda_nonexist));
        m.insert("lambda".into(), num(self.lambda));
        m.insert("verdict".into(), json!(self.verdict.as_str()));
        m.insert("cause".into(), json!(self.cause));
        m.insert("flat_zone_measure".into(), num(self.flat_zone_measure));
        let grid_n = if self.grid_n.iter().all(|&n| n == self.grid_n[0]) {
            json!(self.grid_n[0])
        } else {
            json!(self.grid_n)
        };
        m.insert("grid_n".into(), grid_n);
        m.insert("tol_linear".into(), num(self.tolerances.tol_linear));
        m.insert("tol_eig".into(), num(self.tolerances.tol_eig));
        m.insert("tol_series".into(), num(self.tolerances.tol_series));
        m.insert("band".into(), num(self.band));
        if let Some(c) = &self.coarse {
            m.insert("coarse_grid_n".into(), json!(c.grid_n));
            m.insert("sup_v1_coarse".into(), num(c.sup_v1));
            m.insert("lambda1_coarse".into(), num(c.lambda1));
        }
        m
    }
}

fn num(x: f64) -> Value {
    // serde_json maps non-finite floats to null.
    json!(x)
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn classify_against(lambda: f64, exist: f64, nonexist: f64, band: f64) -> Verdict {
    if lambda < exist * (1.0 - band) {
        Verdict::ExistsCertified
    } else if lambda > nonexist * (1.0 + band) {
        Verdict::NonexistenceProven
    } else {
        Verdict::Indeterminate
    }
}

/// Solves `-div(A grad v1) = f` (load factor 1).
pub fn unit_response(problem: &EllipticProblem, tols: &Tolerances) -> Result<GridFunction> {
    let op = problem.operator()?;
    Ok(solve_linear_with(&op, problem.f(), &tols.cg_options())?.0)
}

fn sup_and_lambda1(problem: &EllipticProblem, tols: &Tolerances) -> Result<(f64, f64)> {
    let op = problem.operator()?;
    let v1 = solve_linear_with(&op, problem.f(), &tols.cg_options())?.0;
    let eig = principal_eigenpair_with(&op, problem.f(), tols.tol_eig, tols.eig_max_iter)?;
    Ok((v1.sup_norm(), eig.lambda1))
}

/// Classifies `problem.lambda()`.
///
/// `sigma = 0` returns [`Verdict::TrivialOnly`] and divergent `K` returns
/// [`Verdict::ExistsAllData`], both without any linear solve. An
/// inconclusive `K` gives [`Verdict::Indeterminate`] with the cause
/// recorded. Otherwise one linear solve and one eigen solve produce the
/// thresholds.
pub fn diagnose(
    seq: &CoefficientSequence,
    problem: &EllipticProblem,
    tols: &Tolerances,
) -> Result<DiagnosisReport> {
    tols.validate()?;
    let series = SeriesProfile::compute(seq, tols.m_max, tols.tol_series)?;
    let grid = problem.grid();
    let grid_n: Vec<usize> = (0..grid.dim()).map(|a| grid.n_cells(a)).collect();
    let band = tols.effective_band();
    let mut report = DiagnosisReport {
        series,
        lambda: problem.lambda(),
        sup_v1: None,
        lambda1: None,
        lambda_exist: f64::NAN,
        lambda_nonexist: f64::NAN,
        verdict: Verdict::Indeterminate,
        cause: None,
        flat_zone_measure: 0.0,
        grid_n,
        coarse: None,
        band,
        tolerances: tols.clone(),
    };

    if report.series.sigma() == 0.0 {
        report.verdict = Verdict::TrivialOnly;
        report.lambda_exist = 0.0;
        report.lambda_nonexist = 0.0;
        return Ok(report);
    }
    let k = match report.series.k {
        BoundarySum::Divergent { .. } => {
            report.verdict = Verdict::ExistsAllData;
            report.lambda_exist = f64::INFINITY;
            report.lambda_nonexist = f64::INFINITY;
            return Ok(report);
        }
        BoundarySum::Inconclusive { cutoff, .. } => {
            report.cause = Some(format!("boundary sum inconclusive at cutoff {cutoff}"));
            return Ok(report);
        }
        BoundarySum::Finite { value, .. } => value,
    };

    if problem.datum_is_zero() {
        return Err(Error::InvalidWeight(
            "datum vanishes identically; the weighted eigenvalue is undefined".into(),
        ));
    }
    let op = problem.operator()?;
    let v1 = solve_linear_with(&op, problem.f(), &tols.cg_options())?.0;
    let eig = principal_eigenpair_with(&op, problem.f(), tols.tol_eig, tols.eig_max_iter)?;
    let sup_v1 = v1.sup_norm();
    report.sup_v1 = Some(sup_v1);
    report.lambda1 = Some(eig.lambda1);
    report.lambda_exist = k / sup_v1;
    report.lambda_nonexist = k * eig.lambda1;
    report.verdict = classify_against(
        problem.lambda(),
        report.lambda_exist,
        report.lambda_nonexist,
        band,
    );
    report.flat_zone_measure = v1.scaled(problem.lambda()).measure_above(k);

    if tols.coarse_check {
        if let Some(coarse) = problem.coarsened() {
            let (s, l) = sup_and_lambda1(&coarse, tols)?;
            report.coarse = Some(CoarseEstimate {
                grid_n: coarse.grid().n_cells(0),
                sup_v1: s,
                lambda1: l,
            });
        }
    }
    Ok(report)
}

/// Verdicts over a list of load factors from a single diagnosis
/// (`v_lambda = lambda v1` by linearity).
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub entries: Vec<(f64, Verdict)>,
    pub bracket: (f64, f64),
    pub report: DiagnosisReport,
}

pub fn lambda_sweep(
    seq: &CoefficientSequence,
    problem: &EllipticProblem,
    lambdas: &[f64],
    tols: &Tolerances,
) -> Result<SweepResult> {
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(Error::Config(format!(
            "sweep values must be positive, got {l}"
        )));
    }
    let report = diagnose(seq, problem, tols)?;
    let entries = lambdas.iter().map(|&l| (l, report.classify(l))).collect();
    Ok(SweepResult {
        entries,
        bracket: report.bracket(),
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fast() -> Tolerances {
        Tolerances {
            coarse_check: false,
            m_max: 4096,
            ..Tolerances::default()
        }
    }

    #[test]
    fn log_kind_thresholds() {
        let p = EllipticProblem::unit_constant(1, 128, 1.0, 10.0).unwrap();
        let r = diagnose(&CoefficientSequence::log_kind(), &p, &Tolerances::default()).unwrap();
        assert!((r.lambda_exist - 16.0).abs() < 1e-6);
        assert!((r.lambda_nonexist - 2.0 * PI * PI).abs() < 0.01 * 2.0 * PI * PI);
        assert_eq!(r.verdict, Verdict::ExistsCertified);
        assert_eq!(r.classify(17.0), Verdict::Indeterminate);
        assert_eq!(r.classify(25.0), Verdict::NonexistenceProven);
        assert!(r.coarse.is_some());
        let j = r.to_json();
        assert_eq!(j["verdict"], "ExistsCertified");
        assert_eq!(j["K_status"], "finite");
    }

    #[test]
    fn sweep_pattern() {
        let p = EllipticProblem::unit_constant(1, 128, 1.0, 1.0).unwrap();
        let s = lambda_sweep(
            &CoefficientSequence::log_kind(),
            &p,
            &[8.0, 16.0, 18.0, 20.0],
            &fast(),
        )
        .unwrap();
        let v: Vec<Verdict> = s.entries.iter().map(|e| e.1).collect();
        assert_eq!(
            v,
            [
                Verdict::ExistsCertified,
                Verdict::Indeterminate,
                Verdict::Indeterminate,
                Verdict::NonexistenceProven
            ]
        );
        assert!(s.bracket.0 < s.bracket.1);
        let empty = lambda_sweep(&CoefficientSequence::log_kind(), &p, &[], &fast()).unwrap();
        assert!(empty.entries.is_empty());
    }

    #[test]
    fn regimes_without_solves() {
        let p = EllipticProblem::unit_constant(1, 16, 1.0, 3.0).unwrap();
        let h = diagnose(&CoefficientSequence::harmonic(), &p, &fast()).unwrap();
        assert_eq!(h.verdict, Verdict::ExistsAllData);
        assert!(h.sup_v1.is_none());
        assert_eq!(h.to_json()["lambda_exist"], Value::Null);
        let z = CoefficientSequence::from_ln_fn(1.0, |m| m as f64 * (m as f64).ln()).unwrap();
        let t = diagnose(&z, &p, &fast()).unwrap();
        assert_eq!(t.verdict, Verdict::TrivialOnly);
        assert!(t.sup_v1.is_none() && t.lambda1.is_none());
    }

    #[test]
    fn scale_covariance() {
        let seq = CoefficientSequence::log_kind();
        let base = EllipticProblem::unit_constant(1, 64, 1.0, 1.0).unwrap();
        let scaled = base.with_datum(base.f().scaled(2.5)).unwrap();
        let a = diagnose(&seq, &base, &fast()).unwrap();
        let b = diagnose(&seq, &scaled, &fast()).unwrap();
        assert!((a.lambda_exist / 2.5 - b.lambda_exist).abs() < 1e-8 * a.lambda_exist);
        assert!((a.lambda_nonexist / 2.5 - b.lambda_nonexist).abs() < 1e-8 * a.lambda_nonexist);
        for lam in [1.0, 6.0, 7.0, 8.0, 9.0] {
            assert_eq!(a.classify(lam * 2.5), b.classify(lam));
        }
    }
}
