//! Three equivalent readings of statistical Cauchyness in a metric `ρ`.

use std::collections::HashMap;

use serde::Serialize;

use super::{all_thin, check_of, Detection, Setting, ThresholdCheck};
use crate::distfn::{levy_distance, StepDistFn, DEFAULT_LEVY_TOL};
use crate::error::{Error, Result};
use crate::pmspace::PointId;
use crate::summability::{DensityEstimate, IndexSet, Status};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricCauchyForms {
    /// `∃ k_0`: every `{k : ρ(x_k, x_{k_0}) ≥ γ}` is null.
    pub p1: Detection,
    /// A null `M` with `ρ(x_m, x_n) < γ` for all `m, n ∉ M`.
    pub p2: Detection,
    /// `{j : D_j(γ) not null}` is null, `D_j(γ) = {k : ρ(x_k, x_j) ≥ γ}`.
    pub p3: Detection,
    pub gamma_grid: Vec<f64>,
}

impl MetricCauchyForms {
    pub fn agree(&self) -> bool {
        self.p1.converged() == self.p2.converged() && self.p2.converged() == self.p3.converged()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricFormsOptions {
    /// Null set for `p2`; built from the `p1` witness when absent.
    pub null_set: Option<IndexSet>,
    /// Use `ρ(p, q) = d_L(F_pq, ε_0)` when the space carries no metric.
    pub levy_fallback: bool,
    pub levy_tol: f64,
}

impl Default for MetricFormsOptions {
    fn default() -> Self {
        Self {
            null_set: None,
            levy_fallback: false,
            levy_tol: DEFAULT_LEVY_TOL,
        }
    }
}

/// `r_1/2`, midpoints of consecutive distinct positive values, `r_max + 1/2`;
/// `[0.5]` when there are none. Every threshold comparison against the
/// values is decided by one grid point per gap.
pub fn value_gap_grid(values: &[f64]) -> Vec<f64> {
    let mut r: Vec<f64> = values.iter().copied().filter(|&x| x > 0.0).collect();
    r.sort_by(f64::total_cmp);
    r.dedup();
    let Some((&first, &last)) = r.first().zip(r.last()) else {
        return vec![0.5];
    };
    let mut grid = vec![0.5 * first];
    grid.extend(r.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    grid.push(last + 0.5);
    grid
}

/// The three metric Cauchy forms for any sequence of values with a metric `rho`. Values
/// are grouped into distinct classes first, so `rho` is called once per pair
/// of distinct values.
pub fn metric_cauchy_forms_of<T: PartialEq>(
    setting: &Setting,
    values: &[T],
    rho: impl Fn(&T, &T) -> Result<f64>,
    null_set: Option<&IndexSet>,
) -> Result<MetricCauchyForms> {
    let span = setting.span();
    if values.len() < span {
        return Err(Error::HorizonTooLarge { horizon: span, len: values.len() });
    }
    let mut reps: Vec<&T> = Vec::new();
    let mut first: Vec<usize> = Vec::new();
    let class: Vec<usize> = values[..span]
        .iter()
        .enumerate()
        .map(|(i, v)| match reps.iter().position(|r| *r == v) {
            Some(c) => c,
            None => {
                reps.push(v);
                first.push(i + 1);
                reps.len() - 1
            }
        })
        .collect();
    let n = reps.len();
    let mut dist = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let d = rho(reps[a], reps[b])?;
            dist[a][b] = d;
            dist[b][a] = d;
        }
    }
    let grid = value_gap_grid(&dist.iter().flatten().copied().collect::<Vec<_>>());

    let mut cache: HashMap<Vec<bool>, DensityEstimate> = HashMap::new();
    let mut density_of = |classes: Vec<bool>| -> Result<DensityEstimate> {
        if let Some(d) = cache.get(&classes) {
            return Ok(*d);
        }
        let mask: Vec<bool> = class.iter().map(|&c| classes[c]).collect();
        let d = setting.density(&mask)?;
        cache.insert(classes, d);
        Ok(d)
    };
    let far = |centre: usize, g: f64| -> Vec<bool> { (0..n).map(|c| dist[c][centre] >= g).collect() };

    let mut p1_best: Option<(usize, Detection)> = None;
    for centre in (0..n).filter(|&c| first[c] <= setting.horizon) {
        let mut checks = Vec::new();
        let mut ds = Vec::new();
        for &g in &grid {
            let d = density_of(far(centre, g))?;
            checks.push(check_of(g, &d));
            ds.push(d);
        }
        let det = all_thin(checks, &ds, setting.tol, Some(first[centre]));
        let better = p1_best.as_ref().is_none_or(|(_, b)| det.residual < b.residual);
        let done = det.converged();
        if done || better {
            p1_best = Some((centre, det));
        }
        if done {
            break;
        }
    }
    let (centre, mut p1) = p1_best.ok_or(Error::Empty("sequence"))?;
    if !p1.converged() {
        p1.witness = None;
    }

    let null_mask = match null_set {
        Some(m) => m.indicator(span),
        None => class.iter().map(|&c| c != centre).collect(),
    };
    let null_density = setting.density(&null_mask)?;
    let mut present: Vec<usize> = (0..setting.horizon.min(span))
        .filter(|&i| !null_mask[i])
        .map(|i| class[i])
        .collect();
    present.sort_unstable();
    present.dedup();
    let spread = present
        .iter()
        .flat_map(|&a| present.iter().map(move |&b| (a, b)))
        .map(|(a, b)| dist[a][b])
        .fold(0.0, f64::max);
    let mut p2_checks = vec![check_of(0.0, &null_density)];
    let mut pairs_ok = true;
    for &g in &grid {
        let ok = spread < g;
        pairs_ok &= ok;
        p2_checks.push(ThresholdCheck {
            t: g,
            value: spread,
            residual: if ok { 0.0 } else { spread - g },
            status: if ok { Status::Converged } else { Status::Diverged },
        });
    }
    let p2 = if pairs_ok {
        all_thin(p2_checks, &[null_density], setting.tol, None)
    } else {
        Detection {
            status: Status::Diverged,
            residual: null_density.value.max(spread),
            witness: None,
            checks: p2_checks,
        }
    };

    let mut p3_checks = Vec::new();
    let mut p3_ds = Vec::new();
    for &g in &grid {
        let mut bad = vec![false; n];
        for (j, flag) in bad.iter_mut().enumerate() {
            *flag = !density_of(far(j, g))?.is_thin(setting.tol);
        }
        let d = density_of(bad)?;
        p3_checks.push(check_of(g, &d));
        p3_ds.push(d);
    }
    let p3 = all_thin(p3_checks, &p3_ds, setting.tol, None);

    Ok(MetricCauchyForms {
        p1,
        p2,
        p3,
        gamma_grid: grid,
    })
}

/// The three metric Cauchy forms for a sequence of points, in the carrier's metric when
/// it is metric-induced, otherwise in `ρ(p, q) = d_L(F_pq, ε_0)` if
/// `levy_fallback` is set.
pub fn metric_cauchy_forms(setting: &Setting, xs: &[PointId], opts: &MetricFormsOptions) -> Result<MetricCauchyForms> {
    let space = setting.space;
    match space.metric() {
        Some(d) => metric_cauchy_forms_of(setting, xs, |a, b| Ok(d[a.0][b.0]), opts.null_set.as_ref()),
        None if opts.levy_fallback => {
            let e0 = StepDistFn::eps0();
            metric_cauchy_forms_of(
                setting,
                xs,
                |a, b| levy_distance(space.dist(*a, *b), &e0, opts.levy_tol),
                opts.null_set.as_ref(),
            )
        }
        None => Err(Error::NotMetricSpace),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::{IndexedSequence, Recipe};
    use crate::pmspace::FinitePMSpace;
    use crate::summability::{Ideal, SummMatrix};

    const N: usize = 10_000;

    fn line() -> FinitePMSpace {
        FinitePMSpace::line(&[0.0, 0.5, 1.5]).unwrap()
    }

    #[test]
    fn gap_grid_of_values() {
        assert_eq!(value_gap_grid(&[0.0, 1.0, 0.5, 1.0]), vec![0.25, 0.75, 1.5]);
        assert_eq!(value_gap_grid(&[0.0]), vec![0.5]);
    }

    #[test]
    fn predicates_agree_on_examples() {
        let s = line();
        let c1 = SummMatrix::Cesaro;
        let fin = Ideal::Fin;
        let setting = Setting::new(&s, &c1, &fin, N, 0.02).unwrap();

        let constant = vec![PointId(1); N];
        let r = metric_cauchy_forms(&setting, &constant, &MetricFormsOptions::default()).unwrap();
        assert!(r.p1.converged() && r.p2.converged() && r.p3.converged());

        let alt = IndexedSequence::new(
            "alt",
            Recipe::Alternate {
                parts: vec![(IndexSet::Evens, PointId(0))],
                default: PointId(2),
            },
        )
        .take(N);
        let r = metric_cauchy_forms(&setting, &alt, &MetricFormsOptions::default()).unwrap();
        assert!(!r.p1.converged() && !r.p2.converged() && !r.p3.converged());

        let off = IndexedSequence::new(
            "off",
            Recipe::Except {
                limit: PointId(0),
                exceptional: IndexSet::PowersOfTwo,
                visits: vec![PointId(2)],
            },
        )
        .take(N);
        let opts = MetricFormsOptions {
            null_set: Some(IndexSet::PowersOfTwo),
            ..MetricFormsOptions::default()
        };
        let r = metric_cauchy_forms(&setting, &off, &opts).unwrap();
        assert!(r.p1.converged() && r.p2.converged() && r.p3.converged(), "{r:?}");
    }

    #[test]
    fn non_metric_space_needs_fallback() {
        let names = vec!["a".to_string(), "b".to_string()];
        let s = FinitePMSpace::build_equilateral(names, StepDistFn::unit_step(0.4).unwrap()).unwrap();
        let c1 = SummMatrix::Cesaro;
        let fin = Ideal::Fin;
        let setting = Setting::new(&s, &c1, &fin, 1000, 0.02).unwrap();
        let xs = vec![PointId(0); 1000];
        assert_eq!(
            metric_cauchy_forms(&setting, &xs, &MetricFormsOptions::default()),
            Err(Error::NotMetricSpace)
        );
        let opts = MetricFormsOptions {
            levy_fallback: true,
            ..MetricFormsOptions::default()
        };
        assert!(metric_cauchy_forms(&setting, &xs, &opts).unwrap().agree());
    }
}
