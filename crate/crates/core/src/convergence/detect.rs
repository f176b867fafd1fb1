use serde::Serialize;

use super::{all_thin, check_of, DensityCache, Detection, IndexedSequence, Recipe, Setting, ThresholdCheck};
use crate::distfn::{levy_distance, StepDistFn};
use crate::error::{Error, Result};
use crate::pmspace::{halving_grid, FinitePMSpace, PointId};
use crate::summability::{DensityEstimate, IndexSet, Status};

fn inside(space: &FinitePMSpace, centre: PointId, t: f64) -> Vec<bool> {
    space.points().map(|q| space.in_neighborhood(centre, q, t)).collect()
}

fn verdict_from_witness(k0: usize, last_defect: usize, horizon: usize) -> Status {
    if k0 <= horizon / 2 {
        Status::Converged
    } else if last_defect >= 3 * horizon / 4 {
        Status::Diverged
    } else {
        Status::Inconclusive
    }
}

/// Strong convergence of `x|K` to `l` (all indices when `within` is `None`):
/// for each gap-grid `t`, `k_0(t)` is one past the last index `≤ N` in `K`
/// with `x_k ∉ N_l(t)`. Converged iff `max_t k_0(t) ≤ N/2`.
fn strong_conv_on(space: &FinitePMSpace, xs: &[PointId], l: PointId, horizon: usize, within: Option<&[bool]>) -> Detection {
    let horizon = horizon.min(xs.len());
    let mut checks = Vec::new();
    let mut k0 = 1usize;
    let mut last = 0usize;
    for t in space.gap_grid() {
        let near = inside(space, l, t);
        let last_t = (1..=horizon)
            .rev()
            .find(|&k| within.is_none_or(|w| w[k - 1]) && !near[xs[k - 1].0])
            .unwrap_or(0);
        checks.push(ThresholdCheck {
            t,
            value: (last_t + 1) as f64,
            residual: last_t as f64 / horizon as f64,
            status: verdict_from_witness(last_t + 1, last_t, horizon),
        });
        k0 = k0.max(last_t + 1);
        last = last.max(last_t);
    }
    Detection {
        status: verdict_from_witness(k0, last, horizon),
        residual: (k0 - 1) as f64 / horizon as f64,
        witness: Some(k0),
        checks,
    }
}

/// Strong convergence `x_k → l`: some `k_0 ≤ N/2` has `x_k ∈ N_l(t)` for
/// all `k ∈ [k_0, N]` and every gap-grid `t`.
pub fn strong_conv_detect(space: &FinitePMSpace, xs: &[PointId], l: PointId, horizon: usize) -> Detection {
    strong_conv_on(space, xs, l, horizon, None)
}

/// Strong Cauchyness of `x|K`: for each `t`, `k_0(t)` is one past the last
/// index whose point fails `F_{x_m x_n}(t) > 1 - t` against some later term.
pub fn strong_cauchy_detect(space: &FinitePMSpace, xs: &[PointId], horizon: usize, within: Option<&[bool]>) -> Detection {
    let horizon = horizon.min(xs.len());
    let mut checks = Vec::new();
    let mut k0 = 1usize;
    let mut last = 0usize;
    for t in space.gap_grid() {
        let mut later: Vec<PointId> = Vec::new();
        let mut last_t = 0usize;
        for k in (1..=horizon).rev() {
            if within.is_some_and(|w| !w[k - 1]) {
                continue;
            }
            let p = xs[k - 1];
            if later.iter().any(|&q| !space.in_neighborhood(p, q, t)) {
                last_t = k;
                break;
            }
            if !later.contains(&p) {
                later.push(p);
            }
        }
        checks.push(ThresholdCheck {
            t,
            value: (last_t + 1) as f64,
            residual: last_t as f64 / horizon as f64,
            status: verdict_from_witness(last_t + 1, last_t, horizon),
        });
        k0 = k0.max(last_t + 1);
        last = last.max(last_t);
    }
    Detection {
        status: verdict_from_witness(k0, last, horizon),
        residual: (k0 - 1) as f64 / horizon as f64,
        witness: Some(k0),
        checks,
    }
}

fn stat_conv_cached(setting: &Setting, cache: &mut DensityCache, l: PointId) -> Result<Detection> {
    let mut checks = Vec::new();
    let mut densities = Vec::new();
    for t in setting.space.gap_grid() {
        let outside: Vec<bool> = inside(setting.space, l, t).into_iter().map(|b| !b).collect();
        let d = cache.get(outside)?;
        checks.push(check_of(t, &d));
        densities.push(d);
    }
    Ok(all_thin(checks, &densities, setting.tol, None))
}

/// Strong `A^I`-statistical convergence to `l`: for each gap-grid `t`, the
/// defect set `{k : F_{x_k l}(t) ≤ 1 - t}` has `A^I`-density zero.
pub fn ai_stat_conv_detect(setting: &Setting, xs: &[PointId], l: PointId) -> Result<Detection> {
    setting.check_terms(xs)?;
    stat_conv_cached(setting, &mut DensityCache::new(setting, xs), l)
}

/// The same test with defect sets `{k : d_L(F_{x_k l}, ε_0) ≥ t}`, where
/// `d_L` is found by bisection rather than the closed form.
pub fn ai_stat_conv_levy(setting: &Setting, xs: &[PointId], l: PointId, levy_tol: f64) -> Result<Detection> {
    setting.check_terms(xs)?;
    let e0 = StepDistFn::eps0();
    let radii = setting
        .space
        .points()
        .map(|q| levy_distance(setting.space.dist(q, l), &e0, levy_tol))
        .collect::<Result<Vec<f64>>>()?;
    let mut cache = DensityCache::new(setting, xs);
    let mut checks = Vec::new();
    let mut densities = Vec::new();
    for t in setting.space.gap_grid() {
        let d = cache.get(radii.iter().map(|&r| r >= t).collect())?;
        checks.push(check_of(t, &d));
        densities.push(d);
    }
    Ok(all_thin(checks, &densities, setting.tol, None))
}

/// First index `≤ N` at which each distinct point occurs, in index order.
fn first_occurrences(xs: &[PointId], horizon: usize) -> Vec<(usize, PointId)> {
    let mut out: Vec<(usize, PointId)> = Vec::new();
    for (i, &p) in xs[..horizon.min(xs.len())].iter().enumerate() {
        if !out.iter().any(|&(_, q)| q == p) {
            out.push((i + 1, p));
        }
    }
    out
}

/// Strong `A^I`-statistical Cauchyness: some `k_0 ≤ N` makes every
/// `{k : x_k ∉ N_{x_{k_0}}(t)}` null. The defect sets depend on `x_{k_0}`
/// only, so one `k_0` per distinct point is tried.
pub fn ai_stat_cauchy_detect(setting: &Setting, xs: &[PointId]) -> Result<Detection> {
    setting.check_terms(xs)?;
    let mut cache = DensityCache::new(setting, xs);
    let mut best: Option<Detection> = None;
    for (k0, p) in first_occurrences(xs, setting.horizon) {
        let mut d = stat_conv_cached(setting, &mut cache, p)?;
        d.witness = Some(k0);
        if d.converged() {
            return Ok(d);
        }
        if best.as_ref().is_none_or(|b| d.residual < b.residual) {
            best = Some(d);
        }
    }
    let mut best = best.ok_or(Error::Empty("sequence"))?;
    best.witness = None;
    Ok(best)
}

/// `y_k = x_k` on `agree`, `l` elsewhere.
pub fn splice(x: &IndexedSequence, agree: IndexSet, l: PointId) -> IndexedSequence {
    let mut y = IndexedSequence::new(
        format!("splice({}, {agree}, {l})", x.description),
        Recipe::Spliced {
            base: Box::new(x.recipe.clone()),
            agree: agree.clone(),
            fill: l,
        },
    );
    y.annotations.agreement = Some(agree);
    y
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", content = "limit", rename_all = "snake_case")]
pub enum StarMode {
    /// `x|K` strongly converges to the given point.
    Conv(PointId),
    /// `x|K` is strongly Cauchy.
    Cauchy,
}

/// `A^{I*}` check against a given witness `K`: `δ_{A^I}(Kᶜ) = 0` and `x|K`
/// strongly converges (or is strongly Cauchy).
pub fn ai_star_detect(setting: &Setting, xs: &[PointId], k: &IndexSet, mode: StarMode) -> Result<Detection> {
    setting.check_terms(xs)?;
    let member = k.indicator(setting.span());
    let complement: Vec<bool> = member.iter().map(|b| !b).collect();
    let d = setting.density(&complement)?;
    let check = check_of(0.0, &d);
    if d.status == Status::Inconclusive && !d.is_nonthin(setting.tol) {
        return Err(Error::InconclusiveWitness(format!(
            "complement of {k} has density estimate {} with residual {}",
            d.value, d.residual
        )));
    }
    if !d.is_thin(setting.tol) {
        return Ok(Detection {
            status: Status::Diverged,
            residual: d.value,
            witness: None,
            checks: vec![check],
        });
    }
    let mut inner = match mode {
        StarMode::Conv(l) => strong_conv_on(setting.space, xs, l, setting.horizon, Some(&member)),
        StarMode::Cauchy => strong_cauchy_detect(setting.space, xs, setting.horizon, Some(&member)),
    };
    inner.checks.insert(0, check);
    Ok(inner)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaCandidate {
    pub point: PointId,
    pub witness: Option<IndexSet>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaResult {
    pub members: Vec<PointId>,
    pub warnings: Vec<String>,
    /// `(candidate, witness density, subsequence convergence)` for each
    /// candidate that had a witness.
    pub evidence: Vec<(PointId, DensityEstimate, Detection)>,
}

/// Statistical limit points among `candidates`: `c` is kept when its
/// witness `K` is nonthin and `x|K` strongly converges to `c`. Candidates
/// without a witness are skipped with a warning; the search is not
/// exhaustive.
pub fn lambda_set(setting: &Setting, xs: &[PointId], candidates: &[LambdaCandidate]) -> Result<LambdaResult> {
    setting.check_terms(xs)?;
    let mut out = LambdaResult {
        members: Vec::new(),
        warnings: Vec::new(),
        evidence: Vec::new(),
    };
    for c in candidates {
        let Some(w) = &c.witness else {
            out.warnings.push(format!("no witness for {}, skipped", setting.space.name(c.point)));
            continue;
        };
        let member = w.indicator(setting.span());
        let d = setting.density(&member)?;
        let sub = strong_conv_on(setting.space, xs, c.point, setting.horizon, Some(&member));
        if d.is_nonthin(setting.tol) && sub.converged() {
            out.members.push(c.point);
        }
        out.evidence.push((c.point, d, sub));
    }
    out.members.sort();
    out.members.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaResult {
    pub members: Vec<PointId>,
    /// Members admitted only because some hit density was inconclusive.
    pub undetermined: Vec<PointId>,
    pub evidence: Vec<(PointId, Vec<ThresholdCheck>)>,
}

/// Statistical cluster points: `ν` is kept unless, for some gap-grid `t`,
/// `{k : F_{x_k ν}(t) > 1 - t}` has `A^I`-density zero. Exhaustive over the
/// carrier.
pub fn gamma_set(setting: &Setting, xs: &[PointId]) -> Result<GammaResult> {
    setting.check_terms(xs)?;
    let mut cache = DensityCache::new(setting, xs);
    let mut out = GammaResult {
        members: Vec::new(),
        undetermined: Vec::new(),
        evidence: Vec::new(),
    };
    let grid = setting.space.gap_grid();
    for nu in setting.space.points() {
        let mut checks = Vec::new();
        let mut thin = false;
        let mut unsure = false;
        for &t in &grid {
            let d = cache.get(inside(setting.space, nu, t))?;
            checks.push(check_of(t, &d));
            thin |= d.is_thin(setting.tol);
            unsure |= !d.is_nonthin(setting.tol);
        }
        if !thin {
            out.members.push(nu);
            if unsure {
                out.undetermined.push(nu);
            }
        }
        out.evidence.push((nu, checks));
    }
    Ok(out)
}

/// Strong limit points at horizon `N`: on a finite carrier a subsequence
/// strongly converges to `c` iff `c` recurs in every tail, read here as
/// "occurs in `[N/2, N]`".
pub fn strong_limit_point_set(xs: &[PointId], horizon: usize) -> Vec<PointId> {
    let horizon = horizon.min(xs.len());
    if horizon == 0 {
        return Vec::new();
    }
    let mut out: Vec<PointId> = xs[(horizon / 2).max(1) - 1..horizon].to_vec();
    out.sort();
    out.dedup();
    out
}

/// Statistical boundedness with respect to `C`: `{k : x_k ∉ C}` is null.
pub fn stat_bounded_check(setting: &Setting, xs: &[PointId], c: &[PointId]) -> Result<Detection> {
    setting.check_terms(xs)?;
    let outside: Vec<bool> = setting.space.points().map(|p| !c.contains(&p)).collect();
    let d = setting.density_of_points(xs, &outside)?;
    Ok(all_thin(vec![check_of(0.0, &d)], &[d], setting.tol, None))
}

/// `A^I`-statistical convergence of a real sequence `z` to `l`: each
/// `{k : |z_k - l| ≥ ε}` over the grid is null. `z` must cover the span.
pub fn ai_stat_limit_real(setting: &Setting, z: &[f64], l: f64, eps_grid: &[f64]) -> Result<Detection> {
    if z.len() < setting.span() {
        return Err(Error::HorizonTooLarge {
            horizon: setting.span(),
            len: z.len(),
        });
    }
    let mut checks = Vec::new();
    let mut densities = Vec::new();
    for &eps in eps_grid {
        let mask: Vec<bool> = z[..setting.span()].iter().map(|v| (v - l).abs() >= eps).collect();
        let d = setting.density(&mask)?;
        checks.push(check_of(eps, &d));
        densities.push(d);
    }
    Ok(all_thin(checks, &densities, setting.tol, None))
}

/// Null set built from a Cauchy witness for one threshold `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectSet {
    pub t: f64,
    /// Radius with `V(α) ∘ V(α) ⊆ V(t)`.
    pub alpha: f64,
    pub density: DensityEstimate,
    /// First `(m, j)` outside the set with `F_{x_m x_j}(t) ≤ 1 - t`.
    pub counterexample: Option<(usize, usize)>,
}

/// For each gap-grid `t`, `P_t = {k : x_k ∉ N_{x_{k_0}}(α)}` with `α` from
/// the vicinity composition. Any two indices outside `P_t` are then within
/// `t` of each other; pairs up to the horizon are checked.
pub fn cauchy_defect_sets(setting: &Setting, xs: &[PointId], k0: usize) -> Result<Vec<DefectSet>> {
    setting.check_terms(xs)?;
    if k0 == 0 || k0 > setting.horizon {
        return Err(Error::HorizonTooLarge {
            horizon: k0,
            len: setting.horizon,
        });
    }
    let space = setting.space;
    let centre = xs[k0 - 1];
    let mut out = Vec::new();
    for t in space.gap_grid() {
        let alpha = space.vicinity_composition_alpha(t, &halving_grid(t, 60))?;
        let near = inside(space, centre, alpha);
        let outside: Vec<bool> = near.iter().map(|b| !b).collect();
        let density = setting.density_of_points(xs, &outside)?;
        let kept: Vec<(usize, PointId)> = first_occurrences(xs, setting.horizon)
            .into_iter()
            .filter(|(_, p)| near[p.0])
            .collect();
        let mut counterexample = None;
        'pairs: for &(m, a) in &kept {
            for &(j, b) in &kept {
                if !space.in_neighborhood(a, b, t) {
                    counterexample = Some((m, j));
                    break 'pairs;
                }
            }
        }
        out.push(DefectSet {
            t,
            alpha,
            density,
            counterexample,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summability::{Ideal, SummMatrix};

    const N: usize = 10_000;
    const TOL: f64 = 0.02;

    fn space() -> FinitePMSpace {
        let names = ["p", "q", "r"].iter().map(|s| s.to_string()).collect();
        FinitePMSpace::build_equilateral(names, StepDistFn::unit_step(1.0).unwrap()).unwrap()
    }

    const P: PointId = PointId(0);
    const Q: PointId = PointId(1);
    const R: PointId = PointId(2);

    fn alternator() -> Vec<PointId> {
        IndexedSequence::new(
            "alt",
            Recipe::Alternate {
                parts: vec![(IndexSet::Evens, P)],
                default: Q,
            },
        )
        .take(N)
    }

    fn off_squares() -> Vec<PointId> {
        IndexedSequence::new(
            "off squares",
            Recipe::Except {
                limit: P,
                exceptional: IndexSet::Squares,
                visits: vec![R],
            },
        )
        .take(N)
    }

    #[test]
    fn strong_convergence_examples() {
        let s = space();
        let c = vec![P; N];
        let d = strong_conv_detect(&s, &c, P, N);
        assert!(d.converged());
        assert_eq!(d.witness, Some(1));

        let mut late = vec![Q; 10];
        late.extend(vec![P; N - 10]);
        let d = strong_conv_detect(&s, &late, P, N);
        assert!(d.converged());
        assert_eq!(d.witness, Some(11));

        let alt = alternator();
        assert!(!strong_conv_detect(&s, &alt, P, N).converged());
        assert!(!strong_conv_detect(&s, &alt, Q, N).converged());
    }

    #[test]
    fn statistical_convergence_examples() {
        let s = space();
        let c1 = SummMatrix::Cesaro;
        let fin = Ideal::Fin;
        let setting = Setting::new(&s, &c1, &fin, N, TOL).unwrap();

        let xs = off_squares();
        assert!(ai_stat_conv_detect(&setting, &xs, P).unwrap().converged());
        assert!(!ai_stat_conv_detect(&setting, &xs, R).unwrap().converged());
        assert!(!strong_conv_detect(&s, &xs, P, N).converged());
        assert!(ai_stat_conv_levy(&setting, &xs, P, 1e-7).unwrap().converged());

        let alt = alternator();
        for l in [P, Q, R] {
            let d = ai_stat_conv_detect(&setting, &alt, l).unwrap();
            assert_eq!(d.status, Status::Diverged, "{l}");
        }
    }

    #[test]
    fn cauchy_examples() {
        let s = space();
        let c1 = SummMatrix::Cesaro;
        let fin = Ideal::Fin;
        let setting = Setting::new(&s, &c1, &fin, N, TOL).unwrap();
        let d = ai_stat_cauchy_detect(&setting, &vec![Q; N]).unwrap();
        assert!(d.converged());
        assert_eq!(d.witness, Some(1));
        // x_1 = r sits on a square, so the first good witness is k = 2.
        assert_eq!(ai_stat_cauchy_detect(&setting, &off_squares()).unwrap().witness, Some(2));
        assert!(!ai_stat_cauchy_detect(&setting, &alternator()).unwrap().converged());

        let sets = cauchy_defect_sets(&setting, &off_squares(), 2).unwrap();
        assert!(sets.iter().all(|d| d.density.is_thin(TOL) && d.counterexample.is_none()));
    }

    #[test]
    fn star_examples() {
        let s = space();
        let c1 = SummMatrix::Cesaro;
        let fin = Ideal::Fin;
        let setting = Setting::new(&s, &c1, &fin, N, TOL).unwrap();
        let xs = off_squares();
        let k = IndexSet::Squares.complement();
        assert!(ai_star_detect(&setting, &xs, &k, StarMode::Conv(P)).unwrap().converged());
        assert!(ai_star_detect(&setting, &xs, &k, StarMode::Cauchy).unwrap().converged());
        assert!(ai_star_detect(&setting, &vec![P; N], &IndexSet::All, StarMode::Conv(P))
            .unwrap()
            .converged());
        let d = ai_star_detect(&setting, &alternator(), &IndexSet::Evens, StarMode::Conv(P)).unwrap();
        assert_eq!(d.status, Status::Diverged);
        assert!((d.residual - 0.5).abs() < 1e-3);
    }

    #[test]
    fn limit_and_cluster_sets() {
        let s = space();
        let c1 = SummMatrix::Cesaro;
        let fin = Ideal::Fin;
        let setting = Setting::new(&s, &c1, &fin, N, TOL).unwrap();

        let alt = alternator();
        let cands = vec![
            LambdaCandidate {
                point: P,
                witness: Some(IndexSet::Evens),
            },
            LambdaCandidate {
                point: Q,
                witness: Some(IndexSet::Odds),
            },
            LambdaCandidate { point: R, witness: None },
        ];
        let lam = lambda_set(&setting, &alt, &cands).unwrap();
        assert_eq!(lam.members, vec![P, Q]);
        assert_eq!(lam.warnings.len(), 1);
        assert_eq!(gamma_set(&setting, &alt).unwrap().members, vec![P, Q]);
        assert_eq!(strong_limit_point_set(&alt, N), vec![P, Q]);

        let xs = off_squares();
        let thin = [LambdaCandidate {
            point: R,
            witness: Some(IndexSet::Squares),
        }];
        assert!(lambda_set(&setting, &xs, &thin).unwrap().members.is_empty());
        assert_eq!(gamma_set(&setting, &xs).unwrap().members, vec![P]);
        assert_eq!(strong_limit_point_set(&xs, N), vec![P, R]);
    }

    #[test]
    fn boundedness_examples() {
        let s = space();
        let c1 = SummMatrix::Cesaro;
        let fin = Ideal::Fin;
        let setting = Setting::new(&s, &c1, &fin, N, TOL).unwrap();
        assert!(stat_bounded_check(&setting, &alternator(), &[P, Q, R]).unwrap().converged());
        assert!(stat_bounded_check(&setting, &off_squares(), &[P]).unwrap().converged());
        assert!(!stat_bounded_check(&setting, &alternator(), &[P]).unwrap().converged());
    }

    #[test]
    fn splice_examples() {
        let x = IndexedSequence::new(
            "alt",
            Recipe::Alternate {
                parts: vec![(IndexSet::Evens, P)],
                default: Q,
            },
        );
        assert_eq!(splice(&x, IndexSet::All, R).take(50), x.take(50));
        assert_eq!(splice(&x, IndexSet::Empty, R).take(50), vec![R; 50]);
        let y = splice(&x, IndexSet::Evens, P);
        assert_eq!(y.take(50), vec![P; 50]);
        assert_eq!(y.annotations.agreement, Some(IndexSet::Evens));
    }
}
