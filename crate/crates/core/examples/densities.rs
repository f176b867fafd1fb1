//! Regularity of summability matrices and A^I-densities of index sets.

use pmstat::summability::{ai_density, check_regularity, Ideal, IndexSet, SummMatrix};

fn main() -> pmstat::Result<()> {
    let n = 10_000;
    for m in [SummMatrix::Cesaro, SummMatrix::Identity, SummMatrix::FirstColumn] {
        let r = check_regularity(&m, n, 2e-3)?;
        let verdicts: Vec<String> = r
            .conditions
            .iter()
            .map(|c| format!("{} {}", c.condition, if c.passed { "ok" } else { "fails" }))
            .collect();
        println!("{:<13} {}", m.name(), verdicts.join(", "));
    }

    let sets: Vec<IndexSet> = ["evens", "mod:3:0,1", "squares", "pow2", "finite:1,2,3,10", "not:squares"]
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let ideals = [Ideal::Fin, Ideal::DensityZero(SummMatrix::Cesaro)];
    let half_squares = SummMatrix::block(IndexSet::Squares, 0.5)?;
    for set in &sets {
        for ideal in &ideals {
            let d = ai_density(&SummMatrix::Cesaro, ideal, set, n, 0.02)?;
            println!("delta[{}, {}]({set}) = {:.4} ({})", "cesaro-1", ideal.name(), d.value, d.status);
        }
        let d = ai_density(&half_squares, &Ideal::Fin, set, n, 0.02)?;
        println!("delta[{}, fin]({set}) = {:.4} ({})", half_squares.name(), d.value, d.status);
    }
    Ok(())
}
