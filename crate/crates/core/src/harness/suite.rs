//! The property suite: every invariant of the detectors, checked on
//! generated instances, plus module-level checks and negative controls.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::oracle::{oracle_density, oracle_dl};
use super::recipes::{generate_suite, random_levy_input, random_step_fn, Instance, RecipeKind};
use crate::convergence::{
    ai_star_detect, ai_stat_cauchy_detect, ai_stat_conv_detect, ai_stat_conv_levy, ai_stat_limit_real,
    cauchy_defect_sets, gamma_set, lambda_set, metric_cauchy_forms, metric_cauchy_forms_of, splice, stat_bounded_check,
    strong_conv_detect, strong_limit_point_set, value_gap_grid, Detection, IndexedSequence, LambdaCandidate,
    MetricFormsOptions, Recipe, Setting, StarMode,
};
use crate::distfn::{levy_distance, StepDistFn};
use crate::error::{Error, Result};
use crate::pmspace::{FinitePMSpace, PointId};
use crate::summability::{ai_density, check_regularity, Ideal, IndexSet, SummMatrix};
use crate::triangle::{check_triangle_axioms, TNorm, TriangleFn, TriangleOp};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub size: usize,
    pub horizon: usize,
    pub tol: f64,
    /// Bisection tolerance for `d_L`.
    pub dl_tol: f64,
    /// Step of the `d_L` oracle's `a`-grid.
    pub dl_grid: f64,
    pub levy_pairs: usize,
    pub density_pairs: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            size: 30,
            horizon: 10_000,
            tol: 0.02,
            dl_tol: 1e-7,
            dl_grid: 1e-3,
            levy_pairs: 200,
            density_pairs: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<usize>,
    /// Negative controls are expected to fail.
    pub negative_control: bool,
    pub passed: bool,
    pub residual: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(check: &str, instance: Option<usize>, outcome: Result<(bool, f64, String)>) -> Self {
        let (passed, residual, detail) = outcome.unwrap_or_else(|e| (false, f64::NAN, format!("error: {e}")));
        Self {
            check: check.to_string(),
            instance,
            negative_control: false,
            passed,
            residual,
            detail,
        }
    }

    fn control(mut self) -> Self {
        self.negative_control = true;
        self
    }

    /// A positive check that passed, or a control that failed.
    pub fn as_expected(&self) -> bool {
        self.passed != self.negative_control
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckSummary {
    pub check: String,
    pub negative_control: bool,
    pub runs: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub id: usize,
    pub recipe: RecipeKind,
    pub space: Vec<String>,
    pub tau: String,
    pub matrix: String,
    pub ideal: String,
    pub sequence: String,
    pub expected_limit: Option<String>,
    pub expected_gamma: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub instances: Vec<InstanceSummary>,
    pub summary: Vec<CheckSummary>,
    pub checks: Vec<CheckResult>,
    pub positive_checks_passed: bool,
    pub negative_controls_failed: bool,
}

impl SuiteReport {
    /// Every positive check passed and every negative control failed.
    pub fn ok(&self) -> bool {
        self.positive_checks_passed && self.negative_controls_failed
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.as_expected())
    }

    pub fn summary_for(&self, check: &str) -> Option<&CheckSummary> {
        self.summary.iter().find(|s| s.check == check)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per check name: `check,negative_control,runs,passed,failed`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for s in &self.summary {
            w.serialize(s).map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

fn names(space: &FinitePMSpace, pts: &[PointId]) -> String {
    let v: Vec<&str> = pts.iter().map(|&p| space.name(p)).collect();
    format!("{{{}}}", v.join(", "))
}

fn is_subset(a: &[PointId], b: &[PointId]) -> bool {
    a.iter().all(|p| b.contains(p))
}

fn ok(passed: bool, residual: f64, detail: impl Into<String>) -> Result<(bool, f64, String)> {
    Ok((passed, residual, detail.into()))
}

struct Run<'a> {
    inst: &'a Instance,
    setting: Setting<'a>,
    xs: Vec<PointId>,
    config: &'a SuiteConfig,
    out: Vec<CheckResult>,
}

impl<'a> Run<'a> {
    fn record(&mut self, check: &str, outcome: Result<(bool, f64, String)>) {
        self.out.push(CheckResult::new(check, Some(self.inst.id), outcome));
    }

    fn space(&self) -> &'a FinitePMSpace {
        &self.inst.space
    }

    fn statuses(&self) -> Result<Vec<(PointId, Detection)>> {
        self.space()
            .points()
            .map(|c| Ok((c, ai_stat_conv_detect(&self.setting, &self.xs, c)?)))
            .collect()
    }

    fn lambda_of(&self, seq: &IndexedSequence, xs: &[PointId]) -> Result<Vec<PointId>> {
        let mut cands: Vec<LambdaCandidate> = seq
            .recipe
            .natural_witnesses()
            .into_iter()
            .chain(seq.annotations.lambda_witnesses.iter().cloned())
            .map(|(point, w)| LambdaCandidate { point, witness: Some(w) })
            .collect();
        cands.dedup();
        Ok(lambda_set(&self.setting, xs, &cands)?.members)
    }
}

fn instance_checks(inst: &Instance, config: &SuiteConfig) -> Vec<CheckResult> {
    let setting = match Setting::new(&inst.space, &inst.matrix, &inst.ideal, config.horizon, config.tol) {
        Ok(s) => s,
        Err(e) => return vec![CheckResult::new("setting", Some(inst.id), Err(e))],
    };
    let xs = setting.terms(&inst.sequence);
    let mut run = Run {
        inst,
        setting,
        xs,
        config,
        out: Vec::new(),
    };
    structural_checks(&mut run);
    let statuses = run.statuses();
    let gamma = gamma_set(&run.setting, &run.xs).map(|g| g.members);
    let lambda = run.lambda_of(&inst.sequence, &run.xs);
    match (statuses, gamma, lambda) {
        (Ok(statuses), Ok(gamma), Ok(lambda)) => {
            convergence_checks(&mut run, &statuses);
            cauchy_checks(&mut run, &statuses);
            limit_point_checks(&mut run, &gamma, &lambda);
        }
        (s, g, l) => {
            let err = s.err().or(g.err()).or(l.err()).expect("one branch failed");
            run.record("detectors", Err(err));
        }
    }
    run.out
}

fn structural_checks(run: &mut Run) {
    let space = run.space();
    let report = space.validate_axioms();
    run.record(
        "space_axioms",
        ok(report.passed, 0.0, format!("{:?}", report.violation)),
    );

    let dl_tol = run.config.dl_tol;
    let forms = (|| {
        for t in space.gap_grid() {
            for p in space.points() {
                let a = space.strong_neighborhood(p, t)?;
                let b = space.strong_neighborhood_levy(p, t, dl_tol)?;
                if a != b {
                    return ok(false, t, format!("N_{p}({t}): {a:?} vs {b:?}"));
                }
            }
        }
        ok(true, 0.0, "closed form and bisection agree on the gap grid")
    })();
    run.record("neighborhood_forms_agree", forms);

    let n = space.len();
    let mut bad = None;
    for bits in 0u32..(1 << n) {
        let m: Vec<PointId> = (0..n).filter(|i| bits >> i & 1 == 1).map(PointId).collect();
        if space.strong_closure(&m) != m || !space.set_limit_points(&m).is_empty() {
            bad = Some(m);
            break;
        }
    }
    run.record(
        "closure_on_finite_carrier",
        ok(bad.is_none(), 0.0, format!("first failing subset: {bad:?}")),
    );

    // Re-derive the construction's annotations from brute-force densities.
    let inst = run.inst;
    let tol = run.config.tol;
    let rederive = (|| {
        let mut gamma = Vec::new();
        let mut limits = Vec::new();
        for c in space.points() {
            let hits = IndexSet::Mask {
                bits: run.xs.iter().map(|&x| x == c).collect(),
            };
            let (lo, _) = oracle_density(&inst.matrix, &hits, run.config.horizon, 129)?;
            if lo > tol {
                gamma.push(c);
            }
            let (_, hi) = oracle_density(&inst.matrix, &hits.complement(), run.config.horizon, 129)?;
            if hi <= tol {
                limits.push(c);
            }
        }
        let want_gamma = inst.expected().gamma.clone().unwrap_or_default();
        let want_limit: Vec<PointId> = inst.expected().limit.into_iter().collect();
        ok(
            gamma == want_gamma && limits == want_limit,
            0.0,
            format!(
                "oracle Γ {} limit {}; annotated Γ {} limit {}",
                names(space, &gamma),
                names(space, &limits),
                names(space, &want_gamma),
                names(space, &want_limit)
            ),
        )
    })();
    run.record("annotation_rederivation", rederive);
}

fn convergence_checks(run: &mut Run, statuses: &[(PointId, Detection)]) {
    let space = run.space();
    let expected = run.inst.expected().limit;
    let converged: Vec<PointId> = statuses.iter().filter(|(_, d)| d.converged()).map(|(c, _)| *c).collect();
    let worst = statuses.iter().map(|(_, d)| d.residual).fold(0.0, f64::max);

    run.record(
        "limit_recovery",
        ok(
            converged == expected.into_iter().collect::<Vec<_>>(),
            worst,
            format!("converged to {}, annotated {:?}", names(space, &converged), expected),
        ),
    );
    run.record(
        "limit_uniqueness",
        ok(converged.len() <= 1, worst, format!("converged to {}", names(space, &converged))),
    );

    let dl_tol = run.config.dl_tol;
    let cross = (|| {
        for (c, d) in statuses {
            let via_levy = ai_stat_conv_levy(&run.setting, &run.xs, *c, dl_tol)?;
            if via_levy.status != d.status {
                return ok(false, 0.0, format!("{c}: {} vs {}", d.status, via_levy.status));
            }
        }
        ok(true, 0.0, "defect sets agree in both forms")
    })();
    run.record("levy_defect_cross_check", cross);

    // A strongly convergent sequence derived from x, plus x itself.
    let strong = (|| {
        let fill = expected.unwrap_or(run.xs[0]);
        let y = splice(&run.inst.sequence, IndexSet::Range { lo: 1, hi: 20 }, fill);
        let ys = run.setting.terms(&y);
        let s = strong_conv_detect(space, &ys, fill, run.setting.horizon);
        let a = ai_stat_conv_detect(&run.setting, &ys, fill)?;
        if !(s.converged() && a.converged()) {
            return ok(false, a.residual, format!("prefix splice: strong {} statistical {}", s.status, a.status));
        }
        for (c, d) in statuses {
            if strong_conv_detect(space, &run.xs, *c, run.setting.horizon).converged() && !d.converged() {
                return ok(false, d.residual, format!("strong but not statistical at {c}"));
            }
        }
        ok(true, a.residual, "strong convergence implies statistical convergence")
    })();
    run.record("strong_implies_statistical", strong);

    // x → c iff some strongly convergent y agrees with x off a null set.
    let equiv = (|| {
        for (c, d) in statuses {
            let y = splice(&run.inst.sequence, IndexSet::Range { lo: 1, hi: 20 }, *c);
            let ys = run.setting.terms(&y);
            let y_strong = strong_conv_detect(space, &ys, *c, run.setting.horizon).converged();
            let differ: Vec<bool> = run.xs.iter().zip(&ys).map(|(a, b)| a != b).collect();
            let thin = run.setting.density(&differ)?.is_thin(run.config.tol);
            if d.converged() != (y_strong && thin) {
                return ok(
                    false,
                    d.residual,
                    format!("{c}: statistical {} but witness strong={y_strong} null-difference={thin}", d.status),
                );
            }
        }
        ok(true, 0.0, "both directions hold for every carrier point")
    })();
    run.record("splice_equivalence", equiv);

    if let Some(l) = expected {
        let companion = &run.inst.companion;
        let pairs = (|| {
            let q = companion.annotations.limit.ok_or(Error::Empty("companion limit"))?;
            let ys = run.setting.terms(companion);
            let target = space.dist(l, q);
            let mut cache: BTreeMap<(usize, usize), f64> = BTreeMap::new();
            let mut z = Vec::with_capacity(ys.len());
            for (a, b) in run.xs.iter().zip(&ys) {
                let v = match cache.get(&(a.0, b.0)) {
                    Some(v) => *v,
                    None => {
                        let v = levy_distance(space.dist(*a, *b), target, dl_tol)?;
                        cache.insert((a.0, b.0), v);
                        v
                    }
                };
                z.push(v);
            }
            let grid = value_gap_grid(&cache.values().copied().collect::<Vec<_>>());
            let d = ai_stat_limit_real(&run.setting, &z, 0.0, &grid)?;
            ok(d.converged(), d.residual, format!("d_L(F_xy, F_{l}{q}) → 0: {}", d.status))
        })();
        run.record("levy_of_pairs_converges", pairs);

        if let Some(e) = run.inst.expected().null_set.clone() {
            let star = (|| {
                let k = e.complement();
                let conv = ai_star_detect(&run.setting, &run.xs, &k, StarMode::Conv(l))?;
                let cauchy = ai_star_detect(&run.setting, &run.xs, &k, StarMode::Cauchy)?;
                let stat = statuses.iter().find(|(c, _)| *c == l).map(|(_, d)| d.converged());
                let stat_cauchy = ai_stat_cauchy_detect(&run.setting, &run.xs)?.converged();
                ok(
                    conv.converged() && cauchy.converged() && stat == Some(true) && stat_cauchy,
                    conv.residual,
                    format!("witness {k}: conv {} cauchy {}", conv.status, cauchy.status),
                )
            })();
            run.record("star_witness_implies_statistical", star);
        }
    }
}

fn cauchy_checks(run: &mut Run, statuses: &[(PointId, Detection)]) {
    let space = run.space();
    let cauchy = match ai_stat_cauchy_detect(&run.setting, &run.xs) {
        Ok(c) => c,
        Err(e) => {
            run.record("cauchy_detect", Err(e));
            return;
        }
    };
    let any_conv = statuses.iter().any(|(_, d)| d.converged());
    run.record(
        "convergent_implies_cauchy",
        ok(!any_conv || cauchy.converged(), cauchy.residual, format!("cauchy {}", cauchy.status)),
    );
    let expected = run.inst.expected().cauchy;
    run.record(
        "cauchy_recovery",
        ok(
            expected.is_none_or(|e| e == cauchy.converged()),
            cauchy.residual,
            format!("detected {}, annotated {expected:?}", cauchy.status),
        ),
    );

    if let (true, Some(k0)) = (cauchy.converged(), cauchy.witness) {
        let defect = (|| {
            let sets = cauchy_defect_sets(&run.setting, &run.xs, k0)?;
            let worst = sets.iter().map(|d| d.density.value).fold(0.0, f64::max);
            match sets
                .iter()
                .find(|d| !d.density.is_thin(run.config.tol) || d.counterexample.is_some())
            {
                Some(d) => ok(false, worst, format!("t={} α={} counterexample {:?}", d.t, d.alpha, d.counterexample)),
                None => ok(true, worst, format!("{} thresholds, witness k0={k0}", sets.len())),
            }
        })();
        run.record("cauchy_null_defect_set", defect);
    }

    if expected == Some(true) {
        let dl_tol = run.config.dl_tol;
        let in_dplus = (|| {
            let ys = run.setting.terms(&run.inst.companion);
            let values: Vec<&StepDistFn> = run.xs.iter().zip(&ys).map(|(a, b)| space.dist(*a, *b)).collect();
            let r = metric_cauchy_forms_of(&run.setting, &values, |f, g| levy_distance(f, g, dl_tol), None)?;
            ok(
                r.p1.converged() && r.p2.converged() && r.p3.converged(),
                r.p1.residual.max(r.p2.residual).max(r.p3.residual),
                format!("p1 {} p2 {} p3 {}", r.p1.status, r.p2.status, r.p3.status),
            )
        })();
        run.record("cauchy_pairs_in_levy_metric", in_dplus);
    }

    let forms = (|| {
        let opts = MetricFormsOptions {
            null_set: run.inst.expected().null_set.clone(),
            levy_fallback: true,
            levy_tol: run.config.dl_tol,
        };
        let r = metric_cauchy_forms(&run.setting, &run.xs, &opts)?;
        ok(
            r.agree() && r.p1.converged() == cauchy.converged(),
            0.0,
            format!("p1 {} p2 {} p3 {} detector {}", r.p1.status, r.p2.status, r.p3.status, cauchy.status),
        )
    })();
    run.record("cauchy_forms_agree", forms);
}

fn limit_point_checks(run: &mut Run, gamma: &[PointId], lambda: &[PointId]) {
    let space = run.space();
    let horizon = run.setting.horizon;
    let limit_points = strong_limit_point_set(&run.xs, horizon);
    run.record(
        "lambda_gamma_limit_chain",
        ok(
            is_subset(lambda, gamma) && is_subset(gamma, &limit_points),
            0.0,
            format!(
                "Λ {} Γ {} L {}",
                names(space, lambda),
                names(space, gamma),
                names(space, &limit_points)
            ),
        ),
    );
    let want = run.inst.expected().gamma.clone().unwrap_or_default();
    run.record(
        "cluster_set_matches_construction",
        ok(
            gamma == want && lambda == want,
            0.0,
            format!("Λ {} Γ {} annotated {}", names(space, lambda), names(space, gamma), names(space, &want)),
        ),
    );
    if let Some(l) = run.inst.expected().limit {
        run.record(
            "convergent_cluster_singleton",
            ok(
                gamma == [l] && lambda == [l],
                0.0,
                format!("Λ {} Γ {}", names(space, lambda), names(space, gamma)),
            ),
        );
    }

    let perturb = (|| {
        // Odd powers of two: null under C_1 and disjoint from the squares
        // that block matrices weight.
        let changed = IndexSet::intersection(IndexSet::PowersOfTwo, IndexSet::Squares.complement());
        let fill = PointId(space.len() - 1);
        let y = IndexedSequence::new(
            "perturbed on odd powers of two",
            Recipe::Spliced {
                base: Box::new(run.inst.sequence.recipe.clone()),
                agree: changed.complement(),
                fill,
            },
        );
        let ys = run.setting.terms(&y);
        let differ: Vec<bool> = run.xs.iter().zip(&ys).map(|(a, b)| a != b).collect();
        let d = run.setting.density(&differ)?;
        let gy = gamma_set(&run.setting, &ys)?.members;
        let ly = run.lambda_of(&y, &ys)?;
        ok(
            d.is_thin(run.config.tol) && gy == gamma && ly == lambda,
            d.value,
            format!("perturbed Λ {} Γ {}", names(space, &ly), names(space, &gy)),
        )
    })();
    run.record("null_perturbation_invariance", perturb);

    let closure = space.strong_closure(gamma);
    run.record(
        "cluster_set_closed",
        ok(closure == gamma, 0.0, format!("k(Γ) {}", names(space, &closure))),
    );

    let outside: Vec<PointId> = space.points().filter(|p| !gamma.contains(p)).collect();
    let disjoint = (|| {
        let mut worst = 0.0f64;
        for bits in 1u32..(1 << outside.len()) {
            let c: Vec<PointId> = (0..outside.len())
                .filter(|i| bits >> i & 1 == 1)
                .map(|i| outside[i])
                .collect();
            let flags: Vec<bool> = space.points().map(|p| c.contains(&p)).collect();
            let d = run.setting.density_of_points(&run.xs, &flags)?;
            worst = worst.max(d.value);
            if !d.is_thin(run.config.tol) {
                return ok(false, d.value, format!("C = {} has density {}", names(space, &c), d.value));
            }
        }
        ok(true, worst, format!("{} subsets of the complement of Γ", (1u32 << outside.len()) - 1))
    })();
    run.record("compact_disjoint_null", disjoint);

    // Bounding sets: the carrier, the annotated Γ, and Γ plus one outsider.
    let mut bounding: Vec<Vec<PointId>> = vec![space.points().collect(), want.clone()];
    if let Some(extra) = outside.first() {
        let mut c = want.clone();
        c.push(*extra);
        c.sort();
        bounding.push(c);
    }
    let bounded: Result<Vec<(Vec<PointId>, Detection)>> = bounding
        .into_iter()
        .map(|c| {
            let b = stat_bounded_check(&run.setting, &run.xs, &c)?;
            Ok((c, b))
        })
        .collect();
    match bounded {
        Ok(bounded) => {
            let unbounded = bounded.iter().find(|(_, b)| !b.converged());
            let nonempty = unbounded.is_none() && !gamma.is_empty();
            let contained = unbounded.is_none() && bounded.iter().all(|(c, _)| is_subset(gamma, c));
            let detail = match unbounded {
                Some((c, b)) => format!("not bounded with respect to {} ({})", names(space, c), b.residual),
                None => format!("Γ {}", names(space, gamma)),
            };
            run.record("nonthin_bounded_nonempty", ok(nonempty, 0.0, detail.clone()));
            run.record("stat_bounded_compact_cluster", ok(contained, 0.0, detail));
        }
        Err(e) => run.record("nonthin_bounded_nonempty", Err(e)),
    }
}

/// `d_L` against the brute-force oracle, metric axioms, and the closed form
/// `d_L(f, ε_0) < t ⟺ f(t) > 1 - t`.
pub fn levy_checks<R: Rng>(rng: &mut R, pairs: usize, grid: f64, dl_tol: f64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    let mut witness = String::new();
    let oracle = (|| {
        for _ in 0..pairs {
            let f = random_levy_input(rng);
            let g = random_levy_input(rng);
            let fast = levy_distance(&f, &g, dl_tol)?;
            let slow = oracle_dl(&f, &g, grid)?;
            let gap = (fast - slow).abs();
            if gap > worst {
                worst = gap;
                witness = format!("f={:?} g={:?} fast={fast} oracle={slow}", f.jumps(), g.jumps());
            }
        }
        let bound = grid + 1e-6;
        ok(worst <= bound, worst, format!("{pairs} pairs, worst gap {worst} (bound {bound}) {witness}"))
    })();
    out.push(CheckResult::new("levy_matches_oracle", None, oracle));

    let axioms = (|| {
        let mut worst_tri = 0.0f64;
        for _ in 0..pairs {
            let f = random_levy_input(rng);
            let g = random_levy_input(rng);
            let h = random_levy_input(rng);
            let fg = levy_distance(&f, &g, dl_tol)?;
            let gf = levy_distance(&g, &f, dl_tol)?;
            if fg != gf {
                return ok(false, (fg - gf).abs(), format!("asymmetric on {:?} {:?}", f.jumps(), g.jumps()));
            }
            if levy_distance(&f, &f, dl_tol)? != 0.0 {
                return ok(false, 1.0, format!("d_L(f, f) ≠ 0 for {:?}", f.jumps()));
            }
            let excess = fg - levy_distance(&f, &h, dl_tol)? - levy_distance(&h, &g, dl_tol)?;
            worst_tri = worst_tri.max(excess);
        }
        ok(worst_tri <= 3e-6, worst_tri, format!("triangle excess {worst_tri}"))
    })();
    out.push(CheckResult::new("levy_metric_axioms", None, axioms));

    let equivalence = (|| {
        let mut violations = 0usize;
        let mut banded = 0usize;
        let draws = pairs.max(1) * 2;
        for _ in 0..draws {
            let f = random_levy_input(rng);
            let t: f64 = rng.gen_range(0.001..1.5);
            let d = levy_distance(&f, &StepDistFn::eps0(), dl_tol)?;
            if (d - t).abs() <= dl_tol {
                banded += 1;
                continue;
            }
            if (d < t) != (f.evaluate(t) > 1.0 - t) {
                violations += 1;
            }
        }
        ok(
            violations == 0,
            violations as f64,
            format!("{draws} draws, {violations} violations, {banded} inside the tolerance band"),
        )
    })();
    out.push(CheckResult::new("levy_neighbourhood_equivalence", None, equivalence));
    out
}

/// `op(f, g) = f`: associative and monotone, but not commutative, and
/// `op(ε_0, g) = ε_0`.
struct LeftProjection;

impl TriangleOp for LeftProjection {
    fn apply(&self, f: &StepDistFn, _g: &StepDistFn) -> StepDistFn {
        f.clone()
    }
}

fn triangle_checks<R: Rng>(rng: &mut R) -> Vec<CheckResult> {
    let sample: Vec<StepDistFn> = (0..4).map(|_| random_step_fn(rng)).chain([StepDistFn::eps0()]).collect();
    let mut ops: Vec<(String, TriangleFn)> = vec![("maximal".into(), TriangleFn::Maximal)];
    for t in [TNorm::Min, TNorm::Product, TNorm::Lukasiewicz] {
        ops.push((t.tag().into(), TriangleFn::sup_conv(t, 1e-3).expect("positive grid")));
    }
    let mut out: Vec<CheckResult> = ops
        .into_iter()
        .map(|(name, op)| {
            let r = check_triangle_axioms(&op, &name, &sample, 1e-6).map(|rep| {
                let worst = rep.axioms.iter().map(|a| a.worst_residual).fold(0.0, f64::max);
                (rep.all_passed(), worst, format!("{name}: {:?}", rep.axioms.iter().map(|a| (a.axiom, a.passed)).collect::<Vec<_>>()))
            });
            CheckResult::new(&format!("triangle_axioms_{name}"), None, r)
        })
        .collect();
    let control = check_triangle_axioms(&LeftProjection, "left-projection", &sample, 1e-6)
        .map(|rep| (rep.all_passed(), 0.0, format!("commutativity passed: {:?}", rep.get("commutativity").map(|a| a.passed))));
    out.push(CheckResult::new("control_non_commutative_op", None, control).control());
    out
}

fn regularity_checks(horizon: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for m in [SummMatrix::Cesaro, SummMatrix::Identity] {
        let r = check_regularity(&m, horizon, 2e-3).map(|rep| {
            let worst = rep.conditions.iter().map(|c| c.residual).fold(0.0, f64::max);
            (rep.all_passed(), worst, format!("{}: {:?}", rep.matrix, rep.conditions))
        });
        out.push(CheckResult::new("regularity", None, r));
    }
    let r = check_regularity(&SummMatrix::FirstColumn, horizon, 2e-3).map(|rep| {
        let c = rep.get("vanishing-columns").expect("condition present");
        let others = rep.conditions.iter().filter(|x| x.condition != "vanishing-columns").all(|x| x.passed);
        (!c.passed && others, c.residual, "constant first column fails only the column condition".to_string())
    });
    out.push(CheckResult::new("regularity_violator_detected", None, r));
    out
}

fn random_dense_set<R: Rng>(rng: &mut R) -> IndexSet {
    let m = rng.gen_range(2..=6usize);
    let mut all: Vec<usize> = (0..m).collect();
    all.shuffle(rng);
    let take = rng.gen_range(1..m);
    IndexSet::residues(m, &all[..take])
}

fn random_null_set<R: Rng>(rng: &mut R) -> IndexSet {
    match rng.gen_range(0..4) {
        0 => IndexSet::Squares,
        1 => IndexSet::PowersOfTwo,
        2 => IndexSet::SparseBlocks { exponent: 4 },
        _ => IndexSet::finite(&(1..=rng.gen_range(1..30)).collect::<Vec<_>>()),
    }
}

/// Density calculus on constructed set pairs: finite changes, disjoint
/// additivity, complements, unions of null sets and intersections of full
/// sets. Pairs whose densities do not converge are skipped.
pub fn density_property_checks<R: Rng>(rng: &mut R, pairs: usize, horizon: usize, tol: f64) -> Vec<CheckResult> {
    let a = SummMatrix::Cesaro;
    let ideals = [Ideal::Fin, Ideal::DensityZero(SummMatrix::Cesaro)];
    let mut out = Vec::new();
    for i in 0..pairs {
        let ideal = &ideals[i % ideals.len()];
        let m1 = random_dense_set(rng);
        let m2 = random_dense_set(rng);
        let n1 = random_null_set(rng);
        let n2 = random_null_set(rng);
        let finite = IndexSet::finite(&(1..=rng.gen_range(1..20)).map(|_| rng.gen_range(1..200)).collect::<Vec<_>>());
        let r = (|| {
            let d = |s: &IndexSet| ai_density(&a, ideal, s, horizon, tol);
            let d1 = d(&m1)?;
            let d2 = d(&m2)?;
            if !(d1.verdict().converged() && d2.verdict().converged()) {
                return ok(true, 0.0, "skipped: densities not settled");
            }
            let changed = IndexSet::union(
                IndexSet::intersection(m1.clone(), finite.complement()),
                IndexSet::intersection(m1.complement(), finite.clone()),
            );
            let finite_change = (d(&changed)?.value - d1.value).abs();

            let part = IndexSet::intersection(m1.clone(), m2.complement());
            let union = IndexSet::union(part.clone(), m2.clone());
            let additivity = (d(&union)?.value - d(&part)?.value - d2.value).abs();

            let complement = (d(&m1.complement())?.value - (1.0 - d1.value)).abs();

            let null_union = d(&IndexSet::union(n1.clone(), n2.clone()))?;
            let full_meet = d(&IndexSet::intersection(n1.complement(), n2.complement()))?;
            let worst = finite_change
                .max(additivity)
                .max(complement)
                .max(null_union.value)
                .max(1.0 - full_meet.value);
            ok(
                finite_change <= tol
                    && additivity <= tol
                    && complement <= tol
                    && null_union.is_thin(tol)
                    && full_meet.verdict().converged()
                    && full_meet.value >= 1.0 - tol,
                worst,
                format!(
                    "{m1} / {m2} / {n1} / {n2} under {ideal}: finite {finite_change:.2e} additive {additivity:.2e} complement {complement:.2e} null-union {:.2e} full-meet {:.4}",
                    null_union.value, full_meet.value
                ),
            )
        })();
        out.push(CheckResult::new("density_properties", None, r));
    }
    out
}

fn negative_controls(instances: &[Instance], config: &SuiteConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    if let Some(inst) = instances.iter().find(|i| i.expected().limit.is_some()) {
        let l = inst.expected().limit.expect("filtered");
        let r = (|| {
            let s = Setting::new(&inst.space, &inst.matrix, &inst.ideal, config.horizon, f64::MIN_POSITIVE)?;
            let xs = s.terms(&inst.sequence);
            let d = ai_stat_conv_detect(&s, &xs, l)?;
            ok(d.converged(), d.residual, format!("instance {} with tolerance ~0: {}", inst.id, d.status))
        })();
        out.push(CheckResult::new("control_zero_tolerance", Some(inst.id), r).control());
    }
    if let Some(inst) = instances.iter().find(|i| i.kind == RecipeKind::Alternator) {
        let r = (|| {
            let s = Setting::new(&inst.space, &inst.matrix, &inst.ideal, config.horizon, config.tol)?;
            let xs = s.terms(&inst.sequence);
            let claimed = xs[1];
            let d = ai_stat_conv_detect(&s, &xs, claimed)?;
            ok(d.converged(), d.residual, format!("alternator claimed convergent to {claimed}: {}", d.status))
        })();
        out.push(CheckResult::new("control_alternator_claimed_convergent", Some(inst.id), r).control());
    }
    let d = vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]];
    let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let built = FinitePMSpace::build_metric_induced(names.clone(), d.clone());
    let table = d
        .iter()
        .map(|row| row.iter().map(|&x| StepDistFn::unit_step(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>();
    let r = table.and_then(|table| {
        let tau = TriangleFn::sup_conv(TNorm::Min, 1e-3)?;
        let raw = FinitePMSpace::from_table_unchecked(names, table, tau)?;
        let report = raw.validate_axioms();
        ok(
            built.is_ok() || report.passed,
            0.0,
            format!("build: {:?}; table check: {:?}", built.err(), report.violation),
        )
    });
    out.push(CheckResult::new("control_triangle_violating_metric", None, r).control());
    out
}

fn summarize(checks: &[CheckResult]) -> Vec<CheckSummary> {
    let mut by_name: BTreeMap<(String, bool), (usize, usize)> = BTreeMap::new();
    for c in checks {
        let e = by_name.entry((c.check.clone(), c.negative_control)).or_default();
        e.0 += 1;
        e.1 += usize::from(c.passed);
    }
    by_name
        .into_iter()
        .map(|((check, negative_control), (runs, passed))| CheckSummary {
            check,
            negative_control,
            runs,
            passed,
            failed: runs - passed,
        })
        .collect()
}

fn describe(inst: &Instance) -> InstanceSummary {
    let space = &inst.space;
    let e = inst.expected();
    InstanceSummary {
        id: inst.id,
        recipe: inst.kind,
        space: space.names().to_vec(),
        tau: space.tau().tag().to_string(),
        matrix: inst.matrix.name(),
        ideal: inst.ideal.name(),
        sequence: inst.sequence.description.clone(),
        expected_limit: e.limit.map(|l| space.name(l).to_string()),
        expected_gamma: e
            .gamma
            .iter()
            .flatten()
            .map(|&p| space.name(p).to_string())
            .collect(),
    }
}

/// Runs every check on `instances` (in parallel, results in instance order)
/// followed by the module-level checks and negative controls. An empty
/// instance list gives an empty report.
pub fn run_theorem_suite(instances: &[Instance], config: &SuiteConfig) -> SuiteReport {
    let mut checks: Vec<CheckResult> = Vec::new();
    if !instances.is_empty() {
        let per_instance: Vec<Vec<CheckResult>> = instances.par_iter().map(|i| instance_checks(i, config)).collect();
        checks.extend(per_instance.into_iter().flatten());
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(0x5eed));
        checks.extend(levy_checks(&mut rng, config.levy_pairs, config.dl_grid, config.dl_tol));
        checks.extend(triangle_checks(&mut rng));
        checks.extend(regularity_checks(config.horizon));
        checks.extend(density_property_checks(&mut rng, config.density_pairs, config.horizon, config.tol));
        checks.extend(negative_controls(instances, config));
    }
    let positive_checks_passed = checks.iter().filter(|c| !c.negative_control).all(|c| c.passed);
    let negative_controls_failed = checks.iter().filter(|c| c.negative_control).all(|c| !c.passed);
    SuiteReport {
        config: config.clone(),
        instances: instances.iter().map(describe).collect(),
        summary: summarize(&checks),
        checks,
        positive_checks_passed,
        negative_controls_failed,
    }
}

/// [`generate_suite`] followed by [`run_theorem_suite`].
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    if config.size == 0 {
        return Err(Error::Empty("suite size"));
    }
    if !(config.tol > 0.0) {
        return Err(Error::NonPositiveTolerance(config.tol));
    }
    Ok(run_theorem_suite(&generate_suite(config.seed, config.size), config))
}
