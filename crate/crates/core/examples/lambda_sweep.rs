//! Classifies a range of load factors with one linear solve and one
//! eigenvalue solve.

use gpme::analysis::{lambda_sweep, Tolerances};
use gpme::elliptic::{build_grid, CoefficientField, DataFamily, DomainSpec, EllipticProblem};
use gpme::series::CoefficientSequence;

fn main() -> gpme::Result<()> {
    let grid = build_grid(&DomainSpec::unit_square(32))?;
    let field = CoefficientField::isotropic(&grid, 1.0, 2.0, |x| 1.0 + x[0] * x[1])?;
    let f = DataFamily::Bump {
        center: vec![0.5, 0.5],
        width: 0.3,
        amplitude: 1.0,
    }
    .evaluate(&grid)?;
    let problem = EllipticProblem::new(grid, field, f, 1.0)?;
    let lambdas: Vec<f64> = (1..=12).map(|k| 10.0 * k as f64).collect();
    let sweep = lambda_sweep(
        &CoefficientSequence::log_kind(),
        &problem,
        &lambdas,
        &Tolerances::default(),
    )?;
    println!("bracket [{:.4}, {:.4}]", sweep.bracket.0, sweep.bracket.1);
    for (l, v) in &sweep.entries {
        println!("{l:6.1}  {v}");
    }
    Ok(())
}
