//! Solves -v'' = 2 on (0,1) and compares with x(1-x); the three-point
//! stencil is exact on quadratics. Then checks second-order convergence for
//! a variable coefficient.

use gpme::elliptic::{
    assemble_operator, build_grid, solve_linear, CoefficientField, DomainSpec, GridFunction,
};

fn main() -> gpme::Result<()> {
    let grid = build_grid(&DomainSpec::unit_interval(128))?;
    let op = assemble_operator(&grid, &CoefficientField::constant(&grid, 1.0)?)?;
    let v = solve_linear(&op, &GridFunction::constant(&grid, 2.0), 1e-12)?;
    let exact = GridFunction::from_fn(&grid, |x| x[0] * (1.0 - x[0]));
    println!(
        "constant coefficient: max error {:.3e}",
        v.max_abs_diff(&exact)
    );

    // -(a v')' = f with a = 1 + x and v = sin(pi x).
    let pi = std::f64::consts::PI;
    let mut last = None;
    for n in [16, 32, 64, 128] {
        let grid = build_grid(&DomainSpec::unit_interval(n))?;
        let field = CoefficientField::isotropic(&grid, 1.0, 2.0, |x| 1.0 + x[0])?;
        let op = assemble_operator(&grid, &field)?;
        let f = GridFunction::from_fn(&grid, |x| {
            let x = x[0];
            -pi * (pi * x).cos() + (1.0 + x) * pi * pi * (pi * x).sin()
        });
        let v = solve_linear(&op, &f, 1e-12)?;
        let err = v.max_abs_diff(&GridFunction::from_fn_dirichlet(&grid, |x| {
            (pi * x[0]).sin()
        }));
        match last {
            Some(prev) => println!("n = {n:4}: error {err:.3e}, ratio {:.2}", prev / err),
            None => println!("n = {n:4}: error {err:.3e}"),
        }
        last = Some(err);
    }
    Ok(())
}
