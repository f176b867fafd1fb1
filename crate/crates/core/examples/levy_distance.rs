//! Lévy distances between step distribution functions, checked against the
//! grid oracle, plus weak convergence of a shrinking step.

use pmstat::distfn::{levy_distance, weakly_converges, StepDistFn, DEFAULT_LEVY_TOL};
use pmstat::harness::oracle_dl;

fn main() -> pmstat::Result<()> {
    let e0 = StepDistFn::eps0();
    let e3 = StepDistFn::unit_step(0.3)?;
    let f = StepDistFn::new(vec![(0.5, 0.5), (1.0, 1.0)])?;
    let g = StepDistFn::new(vec![(0.25, 0.4), (2.0, 1.0)])?;

    println!("d_L(eps_0.3, eps_0) = {} (closed form)", e3.levy_to_eps0());
    for (name, a, b) in [("f, g", &f, &g), ("f, eps_0", &f, &e0), ("g, eps_0.3", &g, &e3)] {
        let fast = levy_distance(a, b, DEFAULT_LEVY_TOL)?;
        let slow = oracle_dl(a, b, 1e-3)?;
        println!("d_L({name}) = {fast:.6}   oracle on a 1e-3 grid: {slow:.3}");
    }

    // eps_{1/n} -> eps_0 weakly, and d_L follows.
    let seq: Vec<StepDistFn> = (1..=50).map(|n| StepDistFn::unit_step(1.0 / n as f64)).collect::<Result<_, _>>()?;
    let last = levy_distance(&seq[49], &e0, DEFAULT_LEVY_TOL)?;
    println!("d_L(eps_1/50, eps_0) = {last:.6}");
    let weak = weakly_converges(&seq, &e0, 50, 0.05, &[0.1, 0.5, 1.0, 2.0])?;
    println!(
        "weak convergence over n in [25, 50]: {} (pointwise gap {}, largest d_L {:.4})",
        weak.converged, weak.max_pointwise_gap, weak.max_levy_distance
    );
    Ok(())
}
