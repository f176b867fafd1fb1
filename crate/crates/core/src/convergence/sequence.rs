//! Sequences `k ↦ x_k` over a finite carrier, built from recipes that carry
//! their intended limit behaviour.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmspace::PointId;
use crate::summability::IndexSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recipe {
    Constant {
        point: PointId,
    },
    /// `limit` off `exceptional`; on it, `visits[k mod visits.len()]`.
    Except {
        limit: PointId,
        exceptional: IndexSet,
        visits: Vec<PointId>,
    },
    /// The first part whose set contains `k` decides `x_k`; `default`
    /// otherwise.
    Alternate {
        parts: Vec<(IndexSet, PointId)>,
        default: PointId,
    },
    /// Periodic extension of a finite list.
    Explicit {
        points: Vec<PointId>,
    },
    /// `base` on `agree`, `fill` elsewhere.
    Spliced {
        base: Box<Recipe>,
        agree: IndexSet,
        fill: PointId,
    },
}

impl Recipe {
    pub fn at(&self, k: usize) -> PointId {
        match self {
            Recipe::Constant { point } => *point,
            Recipe::Except {
                limit,
                exceptional,
                visits,
            } => {
                if exceptional.contains(k) && !visits.is_empty() {
                    visits[k % visits.len()]
                } else {
                    *limit
                }
            }
            Recipe::Alternate { parts, default } => parts
                .iter()
                .find(|(set, _)| set.contains(k))
                .map_or(*default, |(_, p)| *p),
            Recipe::Explicit { points } => points[(k.max(1) - 1) % points.len()],
            Recipe::Spliced { base, agree, fill } => {
                if agree.contains(k) {
                    base.at(k)
                } else {
                    *fill
                }
            }
        }
    }

    pub fn validate(&self, carrier: usize) -> Result<()> {
        let check = |p: &PointId| {
            if p.0 < carrier {
                Ok(())
            } else {
                Err(Error::UnknownPoint(p.0))
            }
        };
        match self {
            Recipe::Constant { point } => check(point),
            Recipe::Except {
                limit,
                exceptional,
                visits,
            } => {
                exceptional.validate()?;
                check(limit)?;
                visits.iter().try_for_each(check)
            }
            Recipe::Alternate { parts, default } => {
                check(default)?;
                parts.iter().try_for_each(|(s, p)| {
                    s.validate()?;
                    check(p)
                })
            }
            Recipe::Explicit { points } => {
                if points.is_empty() {
                    return Err(Error::Empty("explicit sequence"));
                }
                points.iter().try_for_each(check)
            }
            Recipe::Spliced { base, agree, fill } => {
                agree.validate()?;
                check(fill)?;
                base.validate(carrier)
            }
        }
    }

    /// Index sets on which the recipe is constant, paired with that point.
    /// These are the natural witnesses for statistical limit points.
    pub fn natural_witnesses(&self) -> Vec<(PointId, IndexSet)> {
        match self {
            Recipe::Constant { point } => vec![(*point, IndexSet::All)],
            Recipe::Except {
                limit,
                exceptional,
                visits,
            } => {
                let mut out = vec![(*limit, exceptional.complement())];
                if visits.len() == 1 {
                    out.push((visits[0], exceptional.clone()));
                }
                out
            }
            Recipe::Alternate { parts, default } => {
                let mut out = Vec::new();
                let mut earlier: Vec<IndexSet> = Vec::new();
                for (set, p) in parts {
                    let own = if earlier.is_empty() {
                        set.clone()
                    } else {
                        IndexSet::Intersection {
                            sets: std::iter::once(set.clone())
                                .chain(earlier.iter().map(IndexSet::complement))
                                .collect(),
                        }
                    };
                    out.push((*p, own));
                    earlier.push(set.clone());
                }
                let rest = IndexSet::Intersection {
                    sets: earlier.iter().map(IndexSet::complement).collect(),
                };
                out.push((*default, rest));
                out
            }
            Recipe::Explicit { points } => {
                let period = points.len();
                let mut out: Vec<(PointId, IndexSet)> = Vec::new();
                for (i, p) in points.iter().enumerate() {
                    let r = (i + 1) % period;
                    match out.iter_mut().find(|(q, _)| q == p) {
                        Some((_, IndexSet::Residues { residues, .. })) => residues.push(r),
                        _ => out.push((*p, IndexSet::residues(period, &[r]))),
                    }
                }
                out
            }
            Recipe::Spliced { base, agree, fill } => {
                let mut out: Vec<(PointId, IndexSet)> = base
                    .natural_witnesses()
                    .into_iter()
                    .map(|(p, s)| (p, IndexSet::intersection(s, agree.clone())))
                    .collect();
                out.push((*fill, agree.complement()));
                out
            }
        }
    }
}

/// What a recipe forces analytically, recorded when the sequence is built.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Annotations {
    /// Intended `A^I`-statistical limit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<PointId>,
    /// Intended cluster set `Γ`, sorted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<PointId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cauchy: Option<bool>,
    /// A null index set off which the sequence settles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub null_set: Option<IndexSet>,
    /// Agreement set recorded by [`splice`](super::splice).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<IndexSet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lambda_witnesses: Vec<(PointId, IndexSet)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexedSequence {
    pub description: String,
    pub recipe: Recipe,
    #[serde(default)]
    pub annotations: Annotations,
}

impl IndexedSequence {
    pub fn new(description: impl Into<String>, recipe: Recipe) -> Self {
        Self {
            description: description.into(),
            recipe,
            annotations: Annotations::default(),
        }
    }

    pub fn with_annotations(mut self, annotations: Annotations) -> Self {
        self.annotations = annotations;
        self
    }

    pub fn constant(point: PointId) -> Self {
        Self::new(format!("constant {point}"), Recipe::Constant { point }).with_annotations(Annotations {
            limit: Some(point),
            gamma: Some(vec![point]),
            cauchy: Some(true),
            null_set: Some(IndexSet::Empty),
            agreement: None,
            lambda_witnesses: vec![(point, IndexSet::All)],
        })
    }

    /// `x_k = point_at(k)`, 1-based.
    pub fn at(&self, k: usize) -> PointId {
        self.recipe.at(k)
    }

    /// `x_1, …, x_len`.
    pub fn take(&self, len: usize) -> Vec<PointId> {
        (1..=len).map(|k| self.recipe.at(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recipes_evaluate() {
        let p = PointId(0);
        let q = PointId(1);
        let r = PointId(2);
        let alt = Recipe::Alternate {
            parts: vec![(IndexSet::Evens, p)],
            default: q,
        };
        assert_eq!(IndexedSequence::new("alt", alt.clone()).take(4), vec![q, p, q, p]);

        let ex = Recipe::Except {
            limit: p,
            exceptional: IndexSet::Squares,
            visits: vec![q, r],
        };
        let xs = IndexedSequence::new("ex", ex).take(9);
        assert_eq!(xs, vec![r, p, p, q, p, p, p, p, r]);

        let explicit = Recipe::Explicit { points: vec![p, q, r] };
        assert_eq!(explicit.at(4), p);
        assert_eq!(explicit.at(6), r);

        let spliced = Recipe::Spliced {
            base: Box::new(alt),
            agree: IndexSet::Evens,
            fill: r,
        };
        assert_eq!(IndexedSequence::new("s", spliced).take(4), vec![r, p, r, p]);
    }

    #[test]
    fn natural_witnesses_partition_indices() {
        let recipe = Recipe::Alternate {
            parts: vec![(IndexSet::Squares, PointId(2)), (IndexSet::Evens, PointId(0))],
            default: PointId(1),
        };
        let w = recipe.natural_witnesses();
        for k in 1..200 {
            let owners: Vec<PointId> = w.iter().filter(|(_, s)| s.contains(k)).map(|(p, _)| *p).collect();
            assert_eq!(owners, vec![recipe.at(k)], "k={k}");
        }
        let explicit = Recipe::Explicit {
            points: vec![PointId(0), PointId(1), PointId(0)],
        };
        for (p, s) in explicit.natural_witnesses() {
            for k in 1..30 {
                assert_eq!(s.contains(k), explicit.at(k) == p);
            }
        }
    }

    #[test]
    fn validation_rejects_points_outside_carrier() {
        assert!(Recipe::Constant { point: PointId(3) }.validate(3).is_err());
        assert!(Recipe::Explicit { points: vec![] }.validate(3).is_err());
        assert!(Recipe::Constant { point: PointId(2) }.validate(3).is_ok());
    }
}
