//! Log-kind series with f = 32 on (0,1): v = 16 x (1 - x) exceeds K = 2 on a
//! middle band, and u_n flattens to sigma = 1 there.

use gpme::analysis::Tolerances;
use gpme::elliptic::EllipticProblem;
use gpme::pipeline::{converge_scheme, flat_zone, tail_decay_check, zone_gap, Scheme};
use gpme::series::CoefficientSequence;

fn main() -> gpme::Result<()> {
    let seq = CoefficientSequence::log_kind();
    let problem = EllipticProblem::unit_constant(1, 128, 32.0, 1.0)?;
    let tols = Tolerances::default();

    let zone = flat_zone(&seq, &problem, 10_000, &tols)?;
    println!(
        "zone {{v >= {}}}: measure {:.6} (exact sqrt(2)/2 = {:.6})",
        zone.level,
        zone.measure,
        2f64.sqrt() / 2.0
    );

    let scheme = Scheme::new(&seq, &problem, &tols)?;
    let schedule = [1, 2, 4, 8, 16, 32, 64, 128, 1000, 10_000];
    println!("{:>6} {:>10} {:>14}", "n", "sup u_n", "gap on v>=2.1");
    for &n in &schedule {
        let u = scheme.u(n)?;
        let gap = zone_gap(&u, scheme.v(), 2.1, 1.0).unwrap_or(f64::NAN);
        println!("{n:>6} {:>10.6} {gap:>14.6}", u.sup_norm());
    }

    let run = converge_scheme(&scheme, &schedule[..8], 0.0)?;
    let decay = tail_decay_check(&run, 1.2, 1.0)?;
    println!("measure of {{u_n >= 1.2}} against n (1/1.2)^n:");
    for (n, m, env) in &decay.rows {
        println!("{n:>6} {m:>10.6} {env:>10.6}");
    }
    println!("envelope respected: {}", decay.pass);
    Ok(())
}
