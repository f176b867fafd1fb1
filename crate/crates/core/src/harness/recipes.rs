//! Ground-truth instances. Each recipe's annotations follow from how the
//! sequence is built:
//!
//! * off-null-set: `x_k = L` except on a set of `C_1`-density zero, so every
//!   defect set is null, `Γ = Λ = {L}`, and `x` is Cauchy.
//! * alternator: `p` on residues `R (mod m)`, `q` elsewhere. Both index sets
//!   have density at least `1/m`, so there is no limit and `Γ = {p, q}`.
//! * spliced: an alternator kept only on a null set `E` and `L` elsewhere;
//!   it agrees with the constant `L` off `E`.
//! * thin-visit: an alternator that also visits `r` on the squares; `r` is
//!   a strong limit point but not a cluster point.
//! * block-matrix: `L` off the squares and `r` on them, summed by a matrix
//!   that gives the squares density `1/2`. Statistically convergent under
//!   `C_1`, but with no `A`-statistical limit and `Γ = {L, r}`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::convergence::{splice, Annotations, IndexedSequence, Recipe};
use crate::distfn::StepDistFn;
use crate::pmspace::{FinitePMSpace, PointId};
use crate::summability::{Ideal, IndexSet, SummMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecipeKind {
    OffNullSet,
    Alternator,
    Spliced,
    ThinVisit,
    BlockMatrix,
}

impl RecipeKind {
    pub const ALL: [RecipeKind; 5] = [
        RecipeKind::OffNullSet,
        RecipeKind::Alternator,
        RecipeKind::Spliced,
        RecipeKind::ThinVisit,
        RecipeKind::BlockMatrix,
    ];
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub id: usize,
    pub kind: RecipeKind,
    pub space: FinitePMSpace,
    pub sequence: IndexedSequence,
    /// A second sequence over the same space converging to its own
    /// annotated limit, for checks on pairs of sequences.
    pub companion: IndexedSequence,
    pub matrix: SummMatrix,
    pub ideal: Ideal,
}

impl Instance {
    pub fn expected(&self) -> &Annotations {
        &self.sequence.annotations
    }
}

/// A random distance distribution function with one to three jumps on the
/// grid `k/8`, `0 < k ≤ 24`; occasionally defective (final value below 1).
pub fn random_step_fn<R: Rng>(rng: &mut R) -> StepDistFn {
    let count = rng.gen_range(1..=3);
    let mut locs: Vec<u32> = (1..=24).collect();
    locs.shuffle(rng);
    let mut locs: Vec<f64> = locs[..count].iter().map(|&k| f64::from(k) / 8.0).collect();
    locs.sort_by(f64::total_cmp);
    let mut values: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..1.0)).collect();
    values.sort_by(f64::total_cmp);
    if rng.gen_bool(0.8) {
        values[count - 1] = 1.0;
    }
    StepDistFn::new(locs.into_iter().zip(values).collect()).expect("sorted grid jumps are valid")
}

/// Random step functions for metric checks: mostly [`random_step_fn`], with
/// unit steps at arbitrary real points and `ε_0` mixed in.
pub fn random_levy_input<R: Rng>(rng: &mut R) -> StepDistFn {
    match rng.gen_range(0..10) {
        0 => StepDistFn::eps0(),
        1 | 2 => StepDistFn::unit_step(rng.gen_range(0.0..2.5)).expect("finite location"),
        _ => random_step_fn(rng),
    }
}

fn random_space<R: Rng>(rng: &mut R) -> FinitePMSpace {
    let n = rng.gen_range(3..=5);
    if rng.gen_bool(0.5) {
        let names = (0..n).map(|i| format!("e{i}")).collect();
        FinitePMSpace::build_equilateral(names, random_step_fn(rng)).expect("non-degenerate F")
    } else {
        // Dyadic positions keep every distance sum exact in binary.
        let mut slots: Vec<u32> = (0..=64).collect();
        slots.shuffle(rng);
        let mut pos: Vec<f64> = slots[..n].iter().map(|&k| f64::from(k) / 16.0).collect();
        pos.sort_by(f64::total_cmp);
        FinitePMSpace::line(&pos).expect("distinct points on a line")
    }
}

fn null_set<R: Rng>(rng: &mut R) -> IndexSet {
    match rng.gen_range(0..3) {
        0 => IndexSet::Squares,
        1 => IndexSet::PowersOfTwo,
        _ => IndexSet::SparseBlocks { exponent: 4 },
    }
}

fn residue_split<R: Rng>(rng: &mut R) -> IndexSet {
    let m = rng.gen_range(2..=5usize);
    let mut all: Vec<usize> = (0..m).collect();
    all.shuffle(rng);
    let take = rng.gen_range(1..m);
    let mut chosen = all[..take].to_vec();
    chosen.sort_unstable();
    IndexSet::residues(m, &chosen)
}

fn sorted(mut v: Vec<PointId>) -> Vec<PointId> {
    v.sort();
    v.dedup();
    v
}

fn off_null(limit: PointId, exceptional: IndexSet, visits: Vec<PointId>, label: &str) -> IndexedSequence {
    let description = format!("{label}: {limit} off {exceptional}, visiting {visits:?}");
    IndexedSequence::new(
        description,
        Recipe::Except {
            limit,
            exceptional: exceptional.clone(),
            visits,
        },
    )
    .with_annotations(Annotations {
        limit: Some(limit),
        gamma: Some(vec![limit]),
        cauchy: Some(true),
        null_set: Some(exceptional.clone()),
        agreement: None,
        lambda_witnesses: vec![(limit, exceptional.complement())],
    })
}

fn alternator(p: PointId, q: PointId, split: IndexSet) -> IndexedSequence {
    let recipe = Recipe::Alternate {
        parts: vec![(split.clone(), p)],
        default: q,
    };
    let witnesses = recipe.natural_witnesses();
    IndexedSequence::new(format!("alternator: {p} on {split}, {q} elsewhere"), recipe).with_annotations(Annotations {
        limit: None,
        gamma: Some(sorted(vec![p, q])),
        cauchy: Some(false),
        null_set: None,
        agreement: None,
        lambda_witnesses: witnesses,
    })
}

fn build<R: Rng>(id: usize, kind: RecipeKind, rng: &mut R) -> Instance {
    let space = random_space(rng);
    let mut pts: Vec<PointId> = space.points().collect();
    pts.shuffle(rng);
    let (l, p, q) = (pts[0], pts[1], pts[2]);
    let ideal = if rng.gen_bool(0.5) {
        Ideal::Fin
    } else {
        Ideal::DensityZero(SummMatrix::Cesaro)
    };
    let mut matrix = SummMatrix::Cesaro;
    let sequence = match kind {
        RecipeKind::OffNullSet => {
            let visits = if rng.gen_bool(0.5) { vec![p] } else { vec![p, q] };
            off_null(l, null_set(rng), visits, "off-null-set")
        }
        RecipeKind::Alternator => alternator(p, q, residue_split(rng)),
        RecipeKind::Spliced => {
            let e = null_set(rng);
            let base = alternator(p, q, residue_split(rng));
            let mut y = splice(&base, e.clone(), l);
            y.annotations = Annotations {
                limit: Some(l),
                gamma: Some(vec![l]),
                cauchy: Some(true),
                null_set: Some(e.clone()),
                agreement: Some(e.clone()),
                lambda_witnesses: vec![(l, e.complement())],
            };
            y
        }
        RecipeKind::ThinVisit => {
            let split = residue_split(rng);
            let recipe = Recipe::Alternate {
                parts: vec![(IndexSet::Squares, l), (split.clone(), p)],
                default: q,
            };
            let witnesses = recipe.natural_witnesses();
            IndexedSequence::new(format!("thin-visit: {p} on {split}, {q} elsewhere, {l} on squares"), recipe)
                .with_annotations(Annotations {
                    limit: None,
                    gamma: Some(sorted(vec![p, q])),
                    cauchy: Some(false),
                    null_set: None,
                    agreement: None,
                    lambda_witnesses: witnesses,
                })
        }
        RecipeKind::BlockMatrix => {
            matrix = SummMatrix::block(IndexSet::Squares, 0.5).expect("weight in range");
            let recipe = Recipe::Except {
                limit: l,
                exceptional: IndexSet::Squares,
                visits: vec![p],
            };
            let witnesses = recipe.natural_witnesses();
            IndexedSequence::new(format!("block-matrix: {l} off squares, {p} on squares"), recipe).with_annotations(
                Annotations {
                    limit: None,
                    gamma: Some(sorted(vec![l, p])),
                    cauchy: Some(false),
                    null_set: None,
                    agreement: None,
                    lambda_witnesses: witnesses,
                },
            )
        }
    };
    let companion_limit = pts[rng.gen_range(0..pts.len())];
    let companion_visit = *pts.iter().find(|&&c| c != companion_limit).expect("at least two points");
    let companion = off_null(companion_limit, IndexSet::PowersOfTwo, vec![companion_visit], "companion");
    Instance {
        id,
        kind,
        space,
        sequence,
        companion,
        matrix,
        ideal,
    }
}

/// `size` instances cycling through the recipes in [`RecipeKind::ALL`]
/// order, drawn deterministically from `seed`.
pub fn generate_suite(seed: u64, size: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|i| build(i, RecipeKind::ALL[i % RecipeKind::ALL.len()], &mut rng))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_instance_is_eventually_constant() {
        let s = generate_suite(1, 1);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].kind, RecipeKind::OffNullSet);
        assert!(s[0].expected().limit.is_some());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_suite(7, 10);
        let b = generate_suite(7, 10);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.space, y.space);
            assert_eq!(x.sequence, y.sequence);
            assert_eq!(x.ideal.name(), y.ideal.name());
        }
    }

    #[test]
    fn spaces_are_valid_and_recipes_fit() {
        for inst in generate_suite(3, 25) {
            assert!(inst.space.validate_axioms().passed);
            inst.sequence.recipe.validate(inst.space.len()).unwrap();
            inst.companion.recipe.validate(inst.space.len()).unwrap();
        }
    }

    #[test]
    fn random_functions_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..200 {
            let f = random_step_fn(&mut rng);
            assert!(!f.is_eps0() && !f.is_eps_inf());
        }
    }
}
