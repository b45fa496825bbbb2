//! Principal weighted eigenvalue of -div(A grad phi) = lambda f phi on the
//! unit interval and square, against pi^2 and 2 pi^2.

use std::f64::consts::PI;

use gpme::elliptic::{assemble_operator, build_grid, CoefficientField, DomainSpec, GridFunction};
use gpme::spectral::{principal_eigenpair, rayleigh_quotient};

fn main() -> gpme::Result<()> {
    for n in [32, 64, 128] {
        let grid = build_grid(&DomainSpec::unit_interval(n))?;
        let op = assemble_operator(&grid, &CoefficientField::constant(&grid, 1.0)?)?;
        let e = principal_eigenpair(&op, &GridFunction::constant(&grid, 1.0), 1e-10)?;
        let h = 1.0 / n as f64;
        let discrete = 2.0 * (1.0 - (PI * h).cos()) / (h * h);
        println!(
            "1D n = {n:3}: lambda1 = {:.8} (discrete {:.8}, pi^2 {:.8}), {} iterations",
            e.lambda1,
            discrete,
            PI * PI,
            e.iterations
        );
    }

    let grid = build_grid(&DomainSpec::unit_square(64))?;
    let op = assemble_operator(&grid, &CoefficientField::constant(&grid, 1.0)?)?;
    let f = GridFunction::constant(&grid, 1.0);
    let e = principal_eigenpair(&op, &f, 1e-10)?;
    println!(
        "2D n = 64: lambda1 = {:.6}, 2 pi^2 = {:.6}",
        e.lambda1,
        2.0 * PI * PI
    );

    // Any other admissible function has a larger quotient.
    let w = GridFunction::from_fn(&grid, |x| x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]));
    println!(
        "quotient of x(1-x)y(1-y): {:.6}",
        rayleigh_quotient(&op, &f, &w)?
    );

    // A weight concentrated on the left half raises the eigenvalue.
    let left = GridFunction::from_fn(&grid, |x| if x[0] < 0.5 { 1.0 } else { 0.0 });
    println!(
        "weight on x < 1/2: lambda1 = {:.6}",
        principal_eigenpair(&op, &left, 1e-10)?.lambda1
    );
    Ok(())
}
