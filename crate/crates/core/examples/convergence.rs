//! Strong and A^I-statistical convergence and Cauchyness of sequences in a
//! probabilistic metric space.

use pmstat::convergence::{
    ai_stat_cauchy_detect, ai_stat_conv_detect, metric_cauchy_forms, splice, strong_conv_detect, IndexedSequence,
    MetricFormsOptions, Recipe, Setting,
};
use pmstat::pmspace::FinitePMSpace;
use pmstat::summability::{Ideal, IndexSet, SummMatrix};

fn main() -> pmstat::Result<()> {
    let space = FinitePMSpace::line(&[0.0, 0.5, 1.0])?;
    let (a, b, c) = (space.point("0")?, space.point("0.5")?, space.point("1")?);
    let matrix = SummMatrix::Cesaro;
    let ideal = Ideal::Fin;
    let setting = Setting::new(&space, &matrix, &ideal, 10_000, 0.02)?;

    // a everywhere except on the squares, where it visits c.
    let x = IndexedSequence::new(
        "a off the squares",
        Recipe::Except {
            limit: a,
            exceptional: IndexSet::Squares,
            visits: vec![c],
        },
    );
    // b on the evens, c on the odds.
    let y = IndexedSequence::new(
        "alternator",
        Recipe::Alternate {
            parts: vec![(IndexSet::Evens, b)],
            default: c,
        },
    );
    // y kept only on the squares, a elsewhere.
    let z = splice(&y, IndexSet::Squares, a);

    for seq in [&x, &y, &z] {
        let xs = setting.terms(seq);
        println!("{}:", seq.description);
        for p in space.points() {
            let stat = ai_stat_conv_detect(&setting, &xs, p)?;
            let strong = strong_conv_detect(&space, &xs, p, setting.horizon);
            println!(
                "  -> {:<4} statistical {:<12} strong {}",
                space.name(p),
                stat.status.to_string(),
                strong.status
            );
        }
        let cauchy = ai_stat_cauchy_detect(&setting, &xs)?;
        let forms = metric_cauchy_forms(&setting, &xs, &MetricFormsOptions::default())?;
        println!(
            "  Cauchy: {} (witness {:?}); metric forms agree: {}",
            cauchy.status,
            cauchy.witness,
            forms.agree()
        );
    }
    Ok(())
}
