//! Radius of convergence and boundary sum for the built-in sequences and a
//! few custom ones.

use gpme::series::{CoefficientSequence, SeriesProfile, TailRule};

fn main() -> gpme::Result<()> {
    let ln_factorial = |m: usize| -> f64 { (1..=m).map(|k| (k as f64).ln()).sum() };
    let sequences = vec![
        ("harmonic 1/m", CoefficientSequence::harmonic()),
        ("log 1/(m(m-1))", CoefficientSequence::log_kind()),
        ("geometric 2^m", CoefficientSequence::geometric(2.0)?),
        ("power m^-2", CoefficientSequence::power_law(-2.0)?),
        (
            "custom, ratio tail 1/2",
            CoefficientSequence::custom(vec![1.0, 0.3, 0.5, 0.25], TailRule::RepeatLastRatio)?,
        ),
        (
            "1/m!",
            CoefficientSequence::from_ln_fn(1.0, move |m| -ln_factorial(m))?,
        ),
        (
            "m^m",
            CoefficientSequence::from_ln_fn(1.0, |m| m as f64 * (m as f64).ln())?,
        ),
    ];

    println!(
        "{:<24} {:>10} {:<20} {:<13} {:>14}",
        "sequence", "sigma", "method", "K", "value"
    );
    for (name, seq) in &sequences {
        let p = SeriesProfile::compute(seq, 4096, 1e-10)?;
        let value =
            p.k.finite_value()
                .map_or("-".to_string(), |k| format!("{k:.10}"));
        println!(
            "{name:<24} {:>10.6} {:<20} {:<13} {value:>14}",
            p.sigma(),
            p.sigma.method.as_str(),
            p.k.status_str()
        );
    }
    Ok(())
}
