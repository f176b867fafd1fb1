//! Triangle functions on D+: sup-convolutions of continuous t-norms and the
//! maximal triangle function, with a sampled axiom checker.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distfn::{self, levy_distance, pointwise_excess, StepDistFn, DEFAULT_LEVY_TOL};
use crate::error::{Error, Result};

/// Default resolution carried by sup-convolution triangle functions.
pub const DEFAULT_GRID: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TNorm {
    Min,
    #[serde(rename = "prod")]
    Product,
    #[serde(rename = "luka")]
    Lukasiewicz,
}

impl TNorm {
    #[inline]
    pub fn apply(self, x: f64, y: f64) -> f64 {
        match self {
            TNorm::Min => x.min(y),
            TNorm::Product => x * y,
            // 1 is an exact identity; x + 1 - 1 can round away from x.
            TNorm::Lukasiewicz if x == 1.0 => y,
            TNorm::Lukasiewicz if y == 1.0 => x,
            TNorm::Lukasiewicz => (x + y - 1.0).max(0.0),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            TNorm::Min => "min",
            TNorm::Product => "prod",
            TNorm::Lukasiewicz => "luka",
        }
    }
}

/// A binary operation on D+. Implemented by [`TriangleFn`]; test code
/// implements it for deliberately broken operations.
pub trait TriangleOp {
    fn apply(&self, f: &StepDistFn, g: &StepDistFn) -> StepDistFn;

    /// Tolerance (in `d_L`) within which the axioms are expected to hold.
    fn resolution(&self) -> f64 {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TriangleFn {
    /// `τ_T(f, g)(t) = sup_{u+v=t} T(f(u), g(v))`.
    SupConv { tnorm: TNorm, grid: f64 },
    /// Pointwise minimum.
    Maximal,
}

impl TriangleFn {
    pub fn sup_conv(tnorm: TNorm, grid: f64) -> Result<Self> {
        if !(grid > 0.0) {
            return Err(Error::NonPositive {
                name: "grid",
                value: grid,
            });
        }
        Ok(TriangleFn::SupConv { tnorm, grid })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            TriangleFn::SupConv { tnorm, .. } => tnorm.tag(),
            TriangleFn::Maximal => "maximal",
        }
    }

    /// `true` when the realization is exact on step functions, so pointwise
    /// comparisons need no slack beyond floating-point rounding of sums.
    pub fn is_step_exact(&self) -> bool {
        true
    }
}

impl TriangleOp for TriangleFn {
    fn apply(&self, f: &StepDistFn, g: &StepDistFn) -> StepDistFn {
        match *self {
            TriangleFn::Maximal => apply_maximal(f, g),
            TriangleFn::SupConv { tnorm, .. } => sup_convolve(tnorm, f, g),
        }
    }

    fn resolution(&self) -> f64 {
        match *self {
            TriangleFn::Maximal => 0.0,
            TriangleFn::SupConv { grid, .. } => grid,
        }
    }
}

impl fmt::Display for TriangleFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for TriangleFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maximal" => Ok(TriangleFn::Maximal),
            "min" => Ok(TriangleFn::SupConv {
                tnorm: TNorm::Min,
                grid: DEFAULT_GRID,
            }),
            "prod" | "product" => Ok(TriangleFn::SupConv {
                tnorm: TNorm::Product,
                grid: DEFAULT_GRID,
            }),
            "luka" | "lukasiewicz" => Ok(TriangleFn::SupConv {
                tnorm: TNorm::Lukasiewicz,
                grid: DEFAULT_GRID,
            }),
            other => Err(Error::UnknownTNorm(other.to_string())),
        }
    }
}

/// The maximal triangle function: `M(f, g)(t) = min(f(t), g(t))`.
pub fn apply_maximal(f: &StepDistFn, g: &StepDistFn) -> StepDistFn {
    distfn::combine(f, g, f64::min)
}

/// Sup-convolution `τ_T(f, g)` checked for a positive resolution.
pub fn apply_supconv(tnorm: TNorm, f: &StepDistFn, g: &StepDistFn, grid: f64) -> Result<StepDistFn> {
    TriangleFn::sup_conv(tnorm, grid)?;
    Ok(sup_convolve(tnorm, f, g))
}

/// For step inputs `sup_{u+v=t} T(f(u), g(v))` is the maximum of
/// `T(f_i, g_j)` over jump pairs with `l_i + m_j < t`: any admissible split
/// puts `u` past some jump of `f` and `v` past some jump of `g`, and `T` is
/// monotone. The result therefore jumps only on the sum-set.
fn sup_convolve(tnorm: TNorm, f: &StepDistFn, g: &StepDistFn) -> StepDistFn {
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(f.jumps().len() * g.jumps().len());
    for &(lf, vf) in f.jumps() {
        for &(lg, vg) in g.jumps() {
            let v = tnorm.apply(vf, vg);
            if v > 0.0 {
                pairs.push((lf + lg, v));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut best = 0.0_f64;
    let mut i = 0;
    while i < pairs.len() {
        let loc = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == loc {
            best = best.max(pairs[i].1);
            i += 1;
        }
        if out.last().map_or(0.0, |&(_, v)| v) < best {
            out.push((loc, best));
        }
    }
    StepDistFn::new(out).expect("sup-convolution of step functions is a step function")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomResult {
    pub axiom: &'static str,
    pub passed: bool,
    pub worst_residual: f64,
    /// Sample indices of the worst case.
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub operation: String,
    pub tol: f64,
    pub axioms: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.axioms.iter().all(|a| a.passed)
    }

    pub fn get(&self, axiom: &str) -> Option<&AxiomResult> {
        self.axioms.iter().find(|a| a.axiom == axiom)
    }
}

struct Worst {
    axiom: &'static str,
    residual: f64,
    witness: Option<Vec<usize>>,
}

impl Worst {
    fn new(axiom: &'static str) -> Self {
        Self {
            axiom,
            residual: 0.0,
            witness: None,
        }
    }

    fn record(&mut self, residual: f64, witness: &[usize]) {
        if residual > self.residual {
            self.residual = residual;
            self.witness = Some(witness.to_vec());
        }
    }

    fn finish(self, tol: f64) -> AxiomResult {
        AxiomResult {
            axiom: self.axiom,
            passed: self.residual <= tol,
            worst_residual: self.residual,
            witness: self.witness,
        }
    }
}

/// `d_L` between two results, short-circuiting exact equality.
fn result_gap(a: &StepDistFn, b: &StepDistFn) -> f64 {
    if a == b || distfn::sup_distance(a, b) == 0.0 {
        return 0.0;
    }
    levy_distance(a, b, DEFAULT_LEVY_TOL).unwrap_or(1.0)
}

/// Checks commutativity, associativity, monotonicity and the `ε_0` identity of
/// `op` on every pair and triple drawn from `sample`.
///
/// Equalities are measured in `d_L`; monotonicity compares `op(min(f,g), h)`
/// against `op(f, h)` pointwise. Each axiom passes when its worst residual is
/// at most `tol` plus the operation's resolution.
pub fn check_triangle_axioms<T: TriangleOp + ?Sized>(
    op: &T,
    name: &str,
    sample: &[StepDistFn],
    tol: f64,
) -> Result<AxiomReport> {
    if sample.is_empty() {
        return Err(Error::Empty("axiom sample"));
    }
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let slack = tol + op.resolution();
    let e0 = StepDistFn::eps0();
    let n = sample.len();

    let mut identity = Worst::new("identity");
    let mut commut = Worst::new("commutativity");
    let mut monotone = Worst::new("monotonicity");
    let mut assoc = Worst::new("associativity");

    let mut pair = vec![vec![StepDistFn::eps0(); n]; n];
    for i in 0..n {
        identity.record(result_gap(&op.apply(&e0, &sample[i]), &sample[i]), &[i]);
        identity.record(result_gap(&op.apply(&sample[i], &e0), &sample[i]), &[i]);
        for j in 0..n {
            pair[i][j] = op.apply(&sample[i], &sample[j]);
        }
    }
    for i in 0..n {
        for j in 0..n {
            if j > i {
                commut.record(result_gap(&pair[i][j], &pair[j][i]), &[i, j]);
            }
            let lower = apply_maximal(&sample[i], &sample[j]);
            for (k, h) in sample.iter().enumerate() {
                monotone.record(pointwise_excess(&op.apply(&lower, h), &pair[i][k]), &[i, j, k]);
                let left = op.apply(&pair[i][j], h);
                let right = op.apply(&sample[i], &pair[j][k]);
                assoc.record(result_gap(&left, &right), &[i, j, k]);
            }
        }
    }

    Ok(AxiomReport {
        operation: name.to_string(),
        tol,
        axioms: vec![
            commut.finish(slack),
            assoc.finish(slack),
            monotone.finish(slack),
            identity.finish(slack),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distfn::pointwise_le;

    fn step(j: &[(f64, f64)]) -> StepDistFn {
        StepDistFn::new(j.to_vec()).unwrap()
    }

    fn eps(b: f64) -> StepDistFn {
        StepDistFn::unit_step(b).unwrap()
    }

    /// Brute-force `sup_{u+v=t} T(f(u), g(v))` over a fine split grid.
    fn brute_supconv(t: TNorm, f: &StepDistFn, g: &StepDistFn, at: f64) -> f64 {
        let steps = 4000;
        (0..=steps)
            .map(|i| {
                let u = at * i as f64 / steps as f64;
                t.apply(f.evaluate(u), g.evaluate(at - u))
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn maximal_examples() {
        let g = step(&[(0.5, 0.3), (1.0, 1.0)]);
        assert_eq!(apply_maximal(&StepDistFn::eps0(), &g), g);
        assert_eq!(apply_maximal(&eps(2.0), &eps(3.0)), eps(3.0));
        let f = step(&[(1.0, 0.5), (2.0, 1.0)]);
        let g = step(&[(1.5, 1.0)]);
        assert_eq!(apply_maximal(&f, &g), step(&[(1.5, 0.5), (2.0, 1.0)]));
    }

    #[test]
    fn supconv_unit_steps_add() {
        let r = apply_supconv(TNorm::Min, &eps(0.5), &eps(1.25), 1e-3).unwrap();
        assert_eq!(r, eps(1.75));
        let f = step(&[(0.3, 0.2), (1.1, 1.0)]);
        assert_eq!(apply_supconv(TNorm::Min, &StepDistFn::eps0(), &f, 1e-3).unwrap(), f);
        let e0 = StepDistFn::eps0();
        assert_eq!(apply_supconv(TNorm::Product, &e0, &e0, 1e-3).unwrap(), e0);
        assert!(apply_supconv(TNorm::Min, &e0, &e0, 0.0).is_err());
    }

    #[test]
    fn supconv_matches_brute_force() {
        let f = step(&[(0.25, 0.4), (0.75, 0.8), (1.5, 1.0)]);
        let g = step(&[(0.5, 0.5), (1.0, 0.9)]);
        for t in [TNorm::Min, TNorm::Product, TNorm::Lukasiewicz] {
            let r = sup_convolve(t, &f, &g);
            for i in 1..60 {
                // Stay off the sum-set so the split grid resolves every piece.
                let at = i as f64 * 0.05 + 0.0123;
                let brute = brute_supconv(t, &f, &g, at);
                assert!((r.evaluate(at) - brute).abs() < 1e-12, "{t:?} at {at}");
            }
        }
    }

    #[test]
    fn maximal_dominates_supconv() {
        let f = step(&[(0.25, 0.4), (0.75, 0.8), (1.5, 1.0)]);
        let g = step(&[(0.5, 0.5), (1.0, 0.9)]);
        let m = apply_maximal(&f, &g);
        for t in [TNorm::Min, TNorm::Product, TNorm::Lukasiewicz] {
            assert!(pointwise_le(&sup_convolve(t, &f, &g), &m));
        }
    }

    #[test]
    fn unknown_tag_is_rejected() {
        assert!(matches!("hamacher".parse::<TriangleFn>(), Err(Error::UnknownTNorm(_))));
        assert_eq!("luka".parse::<TriangleFn>().unwrap().tag(), "luka");
    }

    struct LeftProjection;

    impl TriangleOp for LeftProjection {
        fn apply(&self, f: &StepDistFn, _g: &StepDistFn) -> StepDistFn {
            f.clone()
        }
    }

    #[test]
    fn broken_operation_fails_commutativity() {
        let sample = vec![eps(0.5), eps(1.0), step(&[(0.2, 0.5), (0.9, 1.0)])];
        let report = check_triangle_axioms(&LeftProjection, "left", &sample, 1e-9).unwrap();
        assert!(!report.get("commutativity").unwrap().passed);
        assert!(!report.all_passed());
    }

    #[test]
    fn unit_step_sample_passes_exactly() {
        let sample: Vec<_> = [0.0, 0.25, 0.5, 1.0, 2.0].iter().map(|&b| eps(b)).collect();
        let op = TriangleFn::sup_conv(TNorm::Min, 1e-3).unwrap();
        let report = check_triangle_axioms(&op, "min", &sample, 1e-9).unwrap();
        assert!(report.all_passed(), "{report:?}");
        assert!(report.axioms.iter().all(|a| a.worst_residual == 0.0));
    }
}
