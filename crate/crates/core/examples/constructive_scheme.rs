//! The approximating solutions u_n = Q_n^{-1}(v) for the harmonic series,
//! whose limit is u = 1 - exp(-v).

use gpme::analysis::Tolerances;
use gpme::elliptic::{EllipticProblem, GridFunction};
use gpme::pipeline::{converge, default_test_set, weak_residual, weak_residual_full};
use gpme::series::CoefficientSequence;

fn main() -> gpme::Result<()> {
    let seq = CoefficientSequence::harmonic();
    let problem = EllipticProblem::unit_constant(1, 128, 2.0, 1.0)?;
    let tols = Tolerances::default();
    let run = converge(&seq, &problem, &[1, 2, 4, 8, 16, 32, 64], 1e-13, &tols)?;

    println!(
        "{:>4} {:>14} {:>14} {:>12}",
        "n", "sup u_n", "h1", "residual"
    );
    for k in 0..run.u_by_n.len() {
        println!(
            "{:>4} {:>14.10} {:>14.10} {:>12.3e}",
            run.sup_history[k].0, run.sup_history[k].1, run.h1_history[k].1, run.residuals[k].1
        );
    }
    let exact = GridFunction::from_fn(problem.grid(), |x| 1.0 - (-x[0] * (1.0 - x[0])).exp());
    println!(
        "stopped at n = {} (exhausted: {}), max error vs 1 - exp(-v): {:.3e}",
        run.converged_n,
        run.schedule_exhausted,
        run.converged_u.max_abs_diff(&exact)
    );

    let tests = default_test_set(&problem);
    let u4 = &run.u_by_n[2].1;
    println!(
        "residual of u_4 with 4 terms:  {:.3e}",
        weak_residual(&seq, &problem, u4, 4, &tests)?
    );
    println!(
        "residual of u_4, full series:  {:.3e}",
        weak_residual_full(&seq, &problem, u4, 1e-12, &tests)?
    );
    println!(
        "residual of the limit, full:   {:.3e}",
        weak_residual_full(&seq, &problem, &run.converged_u, 1e-12, &tests)?
    );
    Ok(())
}
