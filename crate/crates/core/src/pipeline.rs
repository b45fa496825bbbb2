//! The approximating solutions `u_n = Q_n^{-1}(v)` with
//! `-div(A grad v) = lambda f`, their convergence, the truncated weak
//! residual, flat zones and tail-measure decay.

use std::io::Write;

use crate::analysis::Tolerances;
use crate::elliptic::{fmt_num, solve_linear_with, EllipticProblem, GridFunction, SparseOperator};
use crate::error::{Error, Result};
use crate::series::{
    q_full, BoundarySum, CoefficientSequence, PartialSum, SeriesProfile, DEFAULT_INVERSE_MAX_ITER,
};
use crate::spectral::principal_eigenpair_with;

/// One linear solve shared by every `n`.
#[derive(Clone, Debug)]
pub struct Scheme {
    seq: CoefficientSequence,
    problem: EllipticProblem,
    tols: Tolerances,
    op: SparseOperator,
    v: GridFunction,
}

impl Scheme {
    pub fn new(
        seq: &CoefficientSequence,
        problem: &EllipticProblem,
        tols: &Tolerances,
    ) -> Result<Self> {
        tols.validate()?;
        let op = problem.operator()?;
        let v = solve_linear_with(&op, &problem.load(), &tols.cg_options())?.0;
        Ok(Self {
            seq: seq.clone(),
            problem: problem.clone(),
            tols: tols.clone(),
            op,
            v,
        })
    }

    pub fn v(&self) -> &GridFunction {
        &self.v
    }

    pub fn operator(&self) -> &SparseOperator {
        &self.op
    }

    pub fn problem(&self) -> &EllipticProblem {
        &self.problem
    }

    pub fn sequence(&self) -> &CoefficientSequence {
        &self.seq
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tols
    }

    /// `u_n = Q_n^{-1}(v)` node by node.
    pub fn u(&self, n: usize) -> Result<GridFunction> {
        if n == 0 {
            return Err(Error::Config(
                "approximation index n must be at least 1".into(),
            ));
        }
        let q = PartialSum::new(&self.seq, n);
        let mut vals = Vec::with_capacity(self.v.values().len());
        for &y in self.v.values() {
            // Round-off in CG can leave tiny negative values at nodes where
            // the discrete solution is exactly 0.
            vals.push(q.inverse(y.max(0.0), self.tols.tol_series, DEFAULT_INVERSE_MAX_ITER)?);
        }
        GridFunction::new(self.v.grid().clone(), vals)
    }
}

pub fn approximate_solution(
    seq: &CoefficientSequence,
    problem: &EllipticProblem,
    n: usize,
    tols: &Tolerances,
) -> Result<GridFunction> {
    Scheme::new(seq, problem, tols)?.u(n)
}

/// Discrete hat functions at five interior nodes spread along the grid
/// diagonal, followed by the lowest discrete sine mode.
pub fn default_test_set(problem: &EllipticProblem) -> Vec<GridFunction> {
    let g = problem.grid();
    let mut set = Vec::with_capacity(6);
    for k in 1..=5 {
        let i = (k * g.n_cells(0) / 6).max(1);
        let j = if g.dim() == 2 {
            (k * g.n_cells(1) / 6).max(1)
        } else {
            0
        };
        let mut hat = GridFunction::zeros(g);
        hat.values_mut()[g.node_index(i, j)] = 1.0;
        set.push(hat);
    }
    let ext: Vec<(f64, f64)> = (0..g.dim()).map(|a| g.extent(a)).collect();
    set.push(GridFunction::from_fn_dirichlet(g, |x| {
        x.iter()
            .zip(&ext)
            .map(|(xi, (a, b))| (std::f64::consts::PI * (xi - a) / (b - a)).sin())
            .product()
    }));
    set
}

/// [`default_test_set`] plus the principal weighted eigenfunction.
pub fn test_set_with_eigenfunction(
    problem: &EllipticProblem,
    tols: &Tolerances,
) -> Result<Vec<GridFunction>> {
    let mut set = default_test_set(problem);
    if !problem.datum_is_zero() {
        let eig = principal_eigenpair_with(
            &problem.operator()?,
            problem.f(),
            tols.tol_eig,
            tols.eig_max_iter,
        )?;
        set.push(eig.phi1);
    }
    Ok(set)
}

fn check_tests(problem: &EllipticProblem, tests: &[GridFunction]) -> Result<()> {
    for (index, t) in tests.iter().enumerate() {
        if t.grid() != problem.grid() {
            return Err(Error::GridMismatch(format!(
                "test function {index} lives on a different grid"
            )));
        }
        if !t.boundary_is_zero() {
            return Err(Error::BoundaryViolation { index });
        }
    }
    Ok(())
}

fn residual_of(
    op: &SparseOperator,
    load: &GridFunction,
    w: &GridFunction,
    tests: &[GridFunction],
) -> f64 {
    let vol = op.grid().cell_volume();
    tests
        .iter()
        .map(|phi| {
            let lhs = op.energy(w, phi);
            let rhs: f64 = load
                .values()
                .iter()
                .zip(phi.values())
                .map(|(f, p)| f * p)
                .sum::<f64>()
                * vol;
            (lhs - rhs).abs() / (1.0 + phi.h1_seminorm())
        })
        .fold(0.0, f64::max)
}

/// `max_phi |sum_{m<=M} a(m) E(u^m, phi) - int lambda f phi| / (1 + |phi|_H1)`.
///
/// `E` is the face-averaged energy pairing of the operator; by linearity
/// the sum equals `E(Q_M(u), phi)`.
pub fn weak_residual(
    seq: &CoefficientSequence,
    problem: &EllipticProblem,
    u: &GridFunction,
    m_terms: usize,
    tests: &[GridFunction],
) -> Result<f64> {
    check_tests(problem, tests)?;
    if u.grid() != problem.grid() {
        return Err(Error::GridMismatch(
            "candidate lives on a different grid".into(),
        ));
    }
    if m_terms == 0 {
        return Err(Error::Config(
            "weak residual needs at least one series term".into(),
        ));
    }
    let q = PartialSum::new(seq, m_terms);
    let w = u.map(|s| q.eval(s));
    Ok(residual_of(
        &problem.operator()?,
        &problem.load(),
        &w,
        tests,
    ))
}

/// Weak residual of the full series, truncated adaptively at `tol`. Needs
/// `u < sigma` everywhere.
pub fn weak_residual_full(
    seq: &CoefficientSequence,
    problem: &EllipticProblem,
    u: &GridFunction,
    tol: f64,
    tests: &[GridFunction],
) -> Result<f64> {
    check_tests(problem, tests)?;
    if u.grid() != problem.grid() {
        return Err(Error::GridMismatch(
            "candidate lives on a different grid".into(),
        ));
    }
    let vals = u
        .values()
        .iter()
        .map(|&s| q_full(seq, s, tol))
        .collect::<Result<Vec<_>>>()?;
    let w = GridFunction::new(u.grid().clone(), vals)?;
    Ok(residual_of(
        &problem.operator()?,
        &problem.load(),
        &w,
        tests,
    ))
}

/// Histories of a run over an increasing schedule of `n`.
#[derive(Clone, Debug)]
pub struct ApproximationRun {
    pub v: GridFunction,
    pub u_by_n: Vec<(usize, GridFunction)>,
    pub sup_history: Vec<(usize, f64)>,
    pub h1_history: Vec<(usize, f64)>,
    /// Truncated weak residual at `M = n` against the default test set.
    pub residuals: Vec<(usize, f64)>,
    pub converged_n: usize,
    pub converged_u: GridFunction,
    /// The stopping tolerance was never met.
    pub schedule_exhausted: bool,
    pub flat_zone: Option<FlatZone>,
}

impl ApproximationRun {
    /// `u_{n+1} <= u_n + slack` at every node for consecutive entries.
    pub fn is_pointwise_monotone(&self, slack: f64) -> bool {
        self.u_by_n.windows(2).all(|w| {
            w[1].1
                .values()
                .iter()
                .zip(w[0].1.values())
                .all(|(next, prev)| *next <= prev + slack)
        })
    }

    pub fn sup_nonincreasing(&self, slack: f64) -> bool {
        self.sup_history
            .windows(2)
            .all(|w| w[1].1 <= w[0].1 + slack)
    }

    /// Writes `n,sup_u,h1_seminorm,residual,measure_above_M`; the last
    /// column is filled only when a tail level is given.
    pub fn write_history_csv<W: Write>(
        &self,
        mut out: W,
        comment: Option<&str>,
        tail_level: Option<f64>,
    ) -> std::io::Result<()> {
        if let Some(c) = comment {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "n,sup_u,h1_seminorm,residual,measure_above_M")?;
        for (k, (n, u)) in self.u_by_n.iter().enumerate() {
            let measure = tail_level.map_or(String::new(), |m| fmt_num(u.measure_above(m)));
            let residual = self
                .residuals
                .get(k)
                .map_or(String::new(), |r| fmt_num(r.1));
            writeln!(
                out,
                "{n},{},{},{residual},{measure}",
                fmt_num(self.sup_history[k].1),
                fmt_num(self.h1_history[k].1)
            )?;
        }
        Ok(())
    }
}

fn validate_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::Config("n schedule is empty".into()));
    }
    if schedule[0] == 0 || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(
            "n schedule must be strictly increasing and start at n >= 1".into(),
        ));
    }
    Ok(())
}

/// Runs the scheme along `schedule`, stopping once consecutive iterates
/// differ by at most `stop_tol` in the sup norm.
pub fn converge(
    seq: &CoefficientSequence,
    problem: &EllipticProblem,
    schedule: &[usize],
    stop_tol: f64,
    tols: &Tolerances,
) -> Result<ApproximationRun> {
    validate_schedule(schedule)?;
    let scheme = Scheme::new(seq, problem, tols)?;
    converge_scheme(&scheme, schedule, stop_tol)
}

pub fn converge_scheme(
    scheme: &Scheme,
    schedule: &[usize],
    stop_tol: f64,
) -> Result<ApproximationRun> {
    validate_schedule(schedule)?;
    let tests = default_test_set(scheme.problem());
    let load = scheme.problem().load();
    let mut run = ApproximationRun {
        v: scheme.v().clone(),
        u_by_n: Vec::new(),
        sup_history: Vec::new(),
        h1_history: Vec::new(),
        residuals: Vec::new(),
        converged_n: schedule[0],
        converged_u: GridFunction::zeros(scheme.v().grid()),
        schedule_exhausted: true,
        flat_zone: None,
    };
    for &n in schedule {
        let u = scheme.u(n)?;
        let q = PartialSum::new(scheme.sequence(), n);
        let w = u.map(|s| q.eval(s));
        run.sup_history.push((n, u.sup_norm()));
        run.h1_history.push((n, u.h1_seminorm()));
        run.residuals
            .push((n, residual_of(scheme.operator(), &load, &w, &tests)));
        let done = run
            .u_by_n
            .last()
            .is_some_and(|(_, prev): &(usize, GridFunction)| prev.max_abs_diff(&u) <= stop_tol);
        run.u_by_n.push((n, u));
        if done {
            run.schedule_exhausted = false;
            break;
        }
    }
    let (n, u) = run.u_by_n.last().cloned().expect("schedule is nonempty");
    run.converged_n = n;
    run.converged_u = u;
    let profile = SeriesProfile::compute(
        scheme.sequence(),
        scheme.tolerances().m_max,
        scheme.tolerances().tol_series,
    )?;
    run.flat_zone = flat_zone_of(&profile, scheme.v(), &run.converged_u, n).ok();
    Ok(run)
}

/// Whether a flat-zone analysis applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZoneStatus {
    Applicable,
    /// `K` is divergent or inconclusive.
    NotApplicable,
}

impl ZoneStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ZoneStatus::Applicable => "Applicable",
            ZoneStatus::NotApplicable => "NotApplicable",
        }
    }
}

/// The set `{v >= K}` where `u_n` tends to `sigma`.
#[derive(Clone, Debug)]
pub struct FlatZone {
    pub status: ZoneStatus,
    pub level: f64,
    pub sigma: f64,
    pub n: usize,
    pub measure: f64,
    /// Mean of `|u_n - sigma|` over the zone; `None` for an empty zone.
    pub mean_gap: Option<f64>,
    /// 1 on the zone, 0 elsewhere.
    pub mask: GridFunction,
}

/// Mean of `|u - sigma|` over the nodes where `v >= level`.
pub fn zone_gap(u: &GridFunction, v: &GridFunction, level: f64, sigma: f64) -> Option<f64> {
    let gaps: Vec<f64> = u
        .values()
        .iter()
        .zip(v.values())
        .filter(|(_, &vi)| vi >= level)
        .map(|(ui, _)| (ui - sigma).abs())
        .collect();
    (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64)
}

fn flat_zone_of(
    profile: &SeriesProfile,
    v: &GridFunction,
    u: &GridFunction,
    n: usize,
) -> Result<FlatZone> {
    let sigma = profile.sigma();
    let Some(k) = profile.k_finite().or_else(|| (sigma == 0.0).then_some(0.0)) else {
        return Err(Error::Config(
            "flat zone needs a finite boundary sum".into(),
        ));
    };
    let mask = v.map(|x| if x >= k { 1.0 } else { 0.0 });
    Ok(FlatZone {
        status: ZoneStatus::Applicable,
        level: k,
        sigma,
        n,
        measure: v.measure_above(k),
        mean_gap: zone_gap(u, v, k, sigma),
        mask,
    })
}

/// Flat zone of `u_{n_large}`. Divergent or inconclusive `K` yields
/// [`ZoneStatus::NotApplicable`] with an empty mask.
pub fn flat_zone(
    seq: &CoefficientSequence,
    problem: &EllipticProblem,
    n_large: usize,
    tols: &Tolerances,
) -> Result<FlatZone> {
    let profile = SeriesProfile::compute(seq, tols.m_max, tols.tol_series)?;
    let applicable = profile.sigma() == 0.0 || matches!(profile.k, BoundarySum::Finite { .. });
    if !applicable {
        return Ok(FlatZone {
            status: ZoneStatus::NotApplicable,
            level: f64::NAN,
            sigma: profile.sigma(),
            n: n_large,
            measure: 0.0,
            mean_gap: None,
            mask: GridFunction::zeros(problem.grid()),
        });
    }
    let scheme = Scheme::new(seq, problem, tols)?;
    let u = scheme.u(n_large)?;
    flat_zone_of(&profile, scheme.v(), &u, n_large)
}

/// First `n` in `schedule` with mean `|u_n - sigma| <= gap_tol` on
/// `{v >= level}`, if any.
pub fn flat_zone_entry(
    scheme: &Scheme,
    schedule: &[usize],
    level: f64,
    sigma: f64,
    gap_tol: f64,
) -> Result<Option<(usize, f64)>> {
    for &n in schedule {
        let u = scheme.u(n)?;
        if let Some(gap) = zone_gap(&u, scheme.v(), level, sigma) {
            if gap <= gap_tol {
                return Ok(Some((n, gap)));
            }
        }
    }
    Ok(None)
}

/// `(n, |{u_n >= M}|, envelope)` rows.
#[derive(Clone, Debug)]
pub struct TailDecay {
    pub level: f64,
    pub rows: Vec<(usize, f64, f64)>,
    pub pass: bool,
}

/// Compares `|{u_n >= M}|` with the envelope `c n (sigma/M)^n`, `c` chosen
/// to match the first row. Passes when every later measure lies on or below
/// the envelope. For `sigma = 0` the envelope vanishes past the first row, so
/// the check instead asks for nonincreasing measures ending at 0.
pub fn tail_decay_check(run: &ApproximationRun, level: f64, sigma: f64) -> Result<TailDecay> {
    if !(level > sigma) {
        return Err(Error::Config(format!(
            "tail level {level} must exceed sigma = {sigma}"
        )));
    }
    let measures: Vec<(usize, f64)> = run
        .u_by_n
        .iter()
        .map(|(n, u)| (*n, u.measure_above(level)))
        .collect();
    let ratio = sigma / level;
    let shape = |n: usize| n as f64 * ratio.powi(n as i32);
    let (n0, m0) = measures[0];
    let c = if m0 == 0.0 { 0.0 } else { m0 / shape(n0) };
    let rows: Vec<(usize, f64, f64)> = measures
        .iter()
        .map(|&(n, m)| {
            (
                n,
                m,
                if (sigma == 0.0 && n != n0) || m0 == 0.0 {
                    0.0
                } else {
                    c * shape(n)
                },
            )
        })
        .collect();
    let pass = if sigma == 0.0 {
        measures.windows(2).all(|w| w[1].1 <= w[0].1) && measures.last().is_some_and(|m| m.1 == 0.0)
    } else {
        rows.iter().skip(1).all(|&(_, m, env)| m <= env)
    };
    Ok(TailDecay { level, rows, pass })
}

/// A level `gamma < sigma` with `sup u_n <= gamma` for all large `n` when
/// `sup v` lies below `K`: the full-series inverse of the midpoint of
/// `sup v` and `K` (of `2 sup v` when `K` diverges).
pub fn certified_ceiling(
    seq: &CoefficientSequence,
    sup_v: f64,
    tols: &Tolerances,
) -> Result<Option<f64>> {
    let profile = SeriesProfile::compute(seq, tols.m_max, tols.tol_series)?;
    let sigma = profile.sigma();
    if sigma == 0.0 {
        return Ok(None);
    }
    let target = match profile.k {
        BoundarySum::Finite { value, .. } if sup_v < value => 0.5 * (sup_v + value),
        BoundarySum::Divergent { .. } => 2.0 * sup_v,
        _ => return Ok(None),
    };
    if target == 0.0 {
        return Ok(Some(0.0));
    }
    let mut lo = 0.0;
    let mut hi = if sigma.is_finite() { sigma } else { 1.0 };
    if sigma.is_infinite() {
        while q_full(seq, hi, tols.tol_series)? < target {
            lo = hi;
            hi *= 2.0;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if q_full(seq, mid, tols.tol_series)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tols() -> Tolerances {
        Tolerances {
            coarse_check: false,
            m_max: 4096,
            ..Tolerances::default()
        }
    }

    #[test]
    fn log_kind_n2_centre() {
        let p = EllipticProblem::unit_constant(1, 64, 2.0, 1.0).unwrap();
        let u = approximate_solution(&CoefficientSequence::log_kind(), &p, 2, &tols()).unwrap();
        assert!((u.values()[32] - (1.5f64.sqrt() - 1.0)).abs() < 1e-9);
        assert!(u.boundary_is_zero());
    }

    #[test]
    fn first_iterate_is_v() {
        let p = EllipticProblem::unit_constant(2, 16, 1.0, 3.0).unwrap();
        let s = Scheme::new(&CoefficientSequence::harmonic(), &p, &tols()).unwrap();
        assert!(s.u(1).unwrap().max_abs_diff(s.v()) < 1e-15);
    }

    #[test]
    fn harmonic_limit() {
        let p = EllipticProblem::unit_constant(1, 128, 2.0, 1.0).unwrap();
        let seq = CoefficientSequence::harmonic();
        let run = converge(&seq, &p, &[1, 2, 4, 8, 16, 32, 64], 1e-12, &tols()).unwrap();
        let exact = GridFunction::from_fn(p.grid(), |x| 1.0 - (-x[0] * (1.0 - x[0])).exp());
        assert!(run.converged_u.max_abs_diff(&exact) < 1e-6);
        assert!(run.sup_nonincreasing(0.0));
        assert!(run.is_pointwise_monotone(2e-10));
        assert!(run.flat_zone.is_none());
        for (_, r) in &run.residuals {
            assert!(*r < 1e-8, "{r}");
        }
        let tests = default_test_set(&p);
        let full = weak_residual_full(&seq, &p, &run.converged_u, 1e-12, &tests).unwrap();
        assert!(full < 1e-6);
        let gamma = certified_ceiling(&seq, run.v.sup_norm(), &tols())
            .unwrap()
            .unwrap();
        assert!(run.converged_u.sup_norm() <= gamma && gamma < 1.0);
    }

    #[test]
    fn residual_edge_cases() {
        let p = EllipticProblem::unit_constant(1, 32, 1.0, 1.0).unwrap();
        let seq = CoefficientSequence::log_kind();
        let zero = GridFunction::zeros(p.grid());
        assert_eq!(
            weak_residual(&seq, &p, &zero, 3, std::slice::from_ref(&zero)).unwrap(),
            0.0
        );
        assert!(weak_residual(&seq, &p, &zero, 3, &default_test_set(&p)).unwrap() > 0.0);
        let bad = GridFunction::constant(p.grid(), 1.0);
        assert!(matches!(
            weak_residual(&seq, &p, &zero, 3, &[zero.clone(), bad]),
            Err(Error::BoundaryViolation { index: 1 })
        ));
    }

    #[test]
    fn flat_zone_of_log_kind() {
        let n = 128;
        let p = EllipticProblem::unit_constant(1, n, 32.0, 1.0).unwrap();
        let z = flat_zone(&CoefficientSequence::log_kind(), &p, 1000, &tols()).unwrap();
        assert_eq!(z.status, ZoneStatus::Applicable);
        // 16 x (1 - x) >= 2 on |x - 1/2| <= sqrt(2)/4.
        let h = 1.0 / n as f64;
        assert!(
            (z.measure - 2f64.sqrt() / 2.0).abs() <= 2.0 * h,
            "{}",
            z.measure
        );
        assert!(z.mean_gap.unwrap() < 0.05);
        let h = flat_zone(&CoefficientSequence::harmonic(), &p, 10, &tols()).unwrap();
        assert_eq!(h.status, ZoneStatus::NotApplicable);
    }

    #[test]
    fn tail_decay_log_kind() {
        let p = EllipticProblem::unit_constant(1, 64, 32.0, 1.0).unwrap();
        let run = converge(
            &CoefficientSequence::log_kind(),
            &p,
            &[1, 2, 4, 8, 16, 32, 64],
            0.0,
            &tols(),
        )
        .unwrap();
        assert!(run.schedule_exhausted);
        let t = tail_decay_check(&run, 1.2, 1.0).unwrap();
        assert!(t.pass, "{:?}", t.rows);
        assert_eq!(t.rows.last().unwrap().1, 0.0);
        let huge = tail_decay_check(&run, 10.0, 1.0).unwrap();
        assert!(huge.pass && huge.rows.iter().all(|r| r.1 == 0.0));
    }

    #[test]
    fn zero_radius_collapse() {
        let seq = CoefficientSequence::from_ln_fn(1.0, |m| m as f64 * (m as f64).ln()).unwrap();
        let p = EllipticProblem::unit_constant(1, 32, 32.0, 1.0).unwrap();
        let run = converge(&seq, &p, &[1, 2, 4, 8, 16, 32, 64, 128], 0.0, &tols()).unwrap();
        assert!(run.sup_nonincreasing(0.0));
        let last = run.sup_history.last().unwrap().1;
        assert!(last < 0.1, "{last}");
        let t = tail_decay_check(&run, 0.5, 0.0).unwrap();
        assert!(t.pass, "{:?}", t.rows);
    }

    #[test]
    fn history_csv_columns() {
        let p = EllipticProblem::unit_constant(1, 8, 1.0, 1.0).unwrap();
        let run = converge(&CoefficientSequence::log_kind(), &p, &[1, 2], 0.0, &tols()).unwrap();
        let mut out = Vec::new();
        run.write_history_csv(&mut out, None, None).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,sup_u,h1_seminorm,residual,measure_above_M");
        assert!(lines[1].starts_with("1,") && lines[1].ends_with(','));
    }
}
