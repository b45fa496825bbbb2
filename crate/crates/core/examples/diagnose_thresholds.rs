//! Existence and nonexistence thresholds for the log-kind series on (0,1)
//! with f = 1, and the verdicts of the three regimes.

use gpme::analysis::{diagnose, Tolerances};
use gpme::elliptic::EllipticProblem;
use gpme::series::CoefficientSequence;

fn main() -> gpme::Result<()> {
    let tols = Tolerances::default();
    let log = CoefficientSequence::log_kind();
    for lambda in [10.0, 17.0, 25.0] {
        let problem = EllipticProblem::unit_constant(1, 128, 1.0, lambda)?;
        let r = diagnose(&log, &problem, &tols)?;
        println!(
            "lambda = {lambda:5}: {:<18} bracket [{:.6}, {:.6}]",
            r.verdict.as_str(),
            r.lambda_exist,
            r.lambda_nonexist
        );
    }

    let problem = EllipticProblem::unit_constant(1, 128, 1.0, 25.0)?;
    let r = diagnose(&log, &problem, &tols)?;
    if let Some(c) = &r.coarse {
        println!(
            "coarse grid n = {}: sup v1 {:.8} vs {:.8}, lambda1 {:.8} vs {:.8}",
            c.grid_n,
            c.sup_v1,
            r.sup_v1.unwrap_or(f64::NAN),
            c.lambda1,
            r.lambda1.unwrap_or(f64::NAN)
        );
    }
    println!("{}", serde_json::Value::Object(r.to_json()));

    let h = diagnose(&CoefficientSequence::harmonic(), &problem, &tols)?;
    println!("harmonic: {}", h.verdict);
    Ok(())
}
