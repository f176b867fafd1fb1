//! Building probabilistic metric spaces, checking their axioms, and working
//! with strong neighbourhoods, vicinities and closures.

use pmstat::distfn::StepDistFn;
use pmstat::pmspace::{halving_grid, FinitePMSpace, PointId};

fn main() -> pmstat::Result<()> {
    // A metric line: F_pq = eps_{|p - q|}.
    let line = FinitePMSpace::line(&[0.0, 0.25, 0.5, 1.0])?;
    println!("line axioms: {:?}", line.validate_axioms());
    let p = line.point("0")?;
    for t in line.gap_grid() {
        let nbhd = line.strong_neighborhood(p, t)?;
        let names: Vec<&str> = nbhd.iter().map(|&q| line.name(q)).collect();
        println!("N_0({t:.3}) = {names:?}");
    }

    let u = 0.6;
    let alpha = line.vicinity_composition_alpha(u, &halving_grid(u, 40))?;
    println!("V({alpha}) o V({alpha}) lies inside V({u})");

    let set = [PointId(1), PointId(2)];
    println!("closure of {set:?} = {:?}", line.strong_closure(&set));
    println!("limit points of {set:?} = {:?}", line.set_limit_points(&set));

    // Every pair at the same distance distribution.
    let f = StepDistFn::new(vec![(0.5, 0.5), (1.0, 1.0)])?;
    let tri = FinitePMSpace::build_equilateral(vec!["a".into(), "b".into(), "c".into()], f)?;
    println!("equilateral axioms pass: {}", tri.validate_axioms().passed);
    println!("equilateral as JSON:\n{}", tri.to_json());

    // A table that breaks the triangle inequality is rejected up front.
    let bad = FinitePMSpace::build_metric_induced(
        vec!["x".into(), "y".into(), "z".into()],
        vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]],
    );
    println!("triangle-violating metric: {}", bad.unwrap_err());
    Ok(())
}
