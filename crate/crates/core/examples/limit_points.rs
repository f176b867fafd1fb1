//! Statistical limit points, cluster points and ordinary limit points of a
//! sequence, and statistical boundedness.

use pmstat::convergence::{
    gamma_set, lambda_set, stat_bounded_check, strong_limit_point_set, IndexedSequence, LambdaCandidate, Recipe,
    Setting,
};
use pmstat::pmspace::{FinitePMSpace, PointId};
use pmstat::summability::{Ideal, IndexSet, SummMatrix};

fn names(space: &FinitePMSpace, pts: &[PointId]) -> String {
    pts.iter().map(|&p| space.name(p)).collect::<Vec<_>>().join(", ")
}

fn main() -> pmstat::Result<()> {
    let space = FinitePMSpace::line(&[0.0, 1.0, 2.0, 3.0])?;
    let pts: Vec<PointId> = space.points().collect();
    let matrix = SummMatrix::Cesaro;
    let ideal = Ideal::DensityZero(SummMatrix::Cesaro);
    let setting = Setting::new(&space, &matrix, &ideal, 10_000, 0.02)?;

    // 0 on k = 0 mod 3, 1 on the rest, and 3 on the squares: 3 recurs forever
    // but on a thin index set.
    let x = IndexedSequence::new(
        "thin visits to 3",
        Recipe::Alternate {
            parts: vec![(IndexSet::Squares, pts[3]), (IndexSet::residues(3, &[0]), pts[0])],
            default: pts[1],
        },
    );
    let xs = setting.terms(&x);

    let candidates: Vec<LambdaCandidate> = x
        .recipe
        .natural_witnesses()
        .into_iter()
        .map(|(point, w)| LambdaCandidate {
            point,
            witness: Some(w),
        })
        .collect();
    let lambda = lambda_set(&setting, &xs, &candidates)?;
    let gamma = gamma_set(&setting, &xs)?;
    let limits = strong_limit_point_set(&xs, setting.horizon);
    println!("Lambda = {{{}}}", names(&space, &lambda.members));
    println!("Gamma  = {{{}}}", names(&space, &gamma.members));
    println!("L_x    = {{{}}}", names(&space, &limits));

    let bounded = stat_bounded_check(&setting, &xs, &pts[..2])?;
    println!("statistically bounded by {{0, 1}}: {}", bounded.status);
    let bounded = stat_bounded_check(&setting, &xs, &pts[..1])?;
    println!("statistically bounded by {{0}}: {}", bounded.status);
    Ok(())
}
