//! a(m) = m^m has zero radius of convergence: the only admissible solution
//! is u = 0 and the approximating solutions collapse onto it.

use gpme::analysis::{diagnose, Tolerances};
use gpme::elliptic::EllipticProblem;
use gpme::pipeline::converge;
use gpme::series::CoefficientSequence;

fn main() -> gpme::Result<()> {
    let seq = CoefficientSequence::from_ln_fn(1.0, |m| m as f64 * (m as f64).ln())?;
    let problem = EllipticProblem::unit_constant(1, 64, 32.0, 1.0)?;
    let tols = Tolerances::default();

    let report = diagnose(&seq, &problem, &tols)?;
    println!(
        "sigma = {} ({}), verdict {}",
        report.series.sigma(),
        report.series.sigma.method.as_str(),
        report.verdict
    );

    let run = converge(
        &seq,
        &problem,
        &[1, 2, 4, 8, 16, 32, 64, 128, 256],
        0.0,
        &tols,
    )?;
    for (n, s) in &run.sup_history {
        println!("n = {n:4}: sup u_n = {s:.6e}");
    }
    Ok(())
}
