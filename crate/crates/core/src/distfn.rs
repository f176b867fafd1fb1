//! Distance distribution functions represented as left-continuous step
//! functions on `[0, ∞]`, plus the modified Lévy metric between them.
//!
//! A [`StepDistFn`] is stored as a sorted list of `(location, value)` jumps:
//! the function is `0` on `[0, l_1]`, equals `v_i` on `(l_i, l_{i+1}]` and
//! `v_last` on `(l_last, ∞)`. The value at `∞` is always `1`, so a final value
//! below one describes a defective distribution (the empty list is `ε_∞`).
//!
//! For the Lévy metric every function is extended by `0` to the negative
//! axis. Both sides of every defining inequality vanish or hold trivially for
//! `ξ ≤ 0`, so restricting the scan to the positive axis loses nothing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bisection tolerance for [`levy_distance`].
pub const DEFAULT_LEVY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct StepDistFn {
    jumps: Vec<(f64, f64)>,
}

impl StepDistFn {
    /// Builds a step function from `(location, cumulative value)` pairs.
    ///
    /// Locations must be finite, non-negative and strictly increasing; values
    /// must lie in `[0, 1]` and be non-decreasing. Jumps that do not raise the
    /// value are dropped so equal functions compare equal.
    pub fn new(jumps: Vec<(f64, f64)>) -> Result<Self> {
        let mut prev_loc = f64::NEG_INFINITY;
        let mut prev_val = 0.0_f64;
        let mut canon = Vec::with_capacity(jumps.len());
        for &(loc, val) in &jumps {
            if !loc.is_finite() {
                return Err(Error::InvalidDistFn(format!("non-finite location {loc}")));
            }
            if loc < 0.0 {
                return Err(Error::NegativeLocation(loc));
            }
            if loc <= prev_loc {
                return Err(Error::InvalidDistFn(format!(
                    "locations must be strictly increasing ({prev_loc} then {loc})"
                )));
            }
            if !(0.0..=1.0).contains(&val) {
                return Err(Error::InvalidDistFn(format!("value {val} outside [0, 1]")));
            }
            if val < prev_val {
                return Err(Error::InvalidDistFn(format!(
                    "values must be non-decreasing ({prev_val} then {val})"
                )));
            }
            if val > prev_val {
                canon.push((loc, val));
                prev_val = val;
            }
            prev_loc = loc;
        }
        Ok(Self { jumps: canon })
    }

    /// Like [`StepDistFn::new`], but a final value below one is completed by a
    /// jump to `1` at `cap`. Used to approximate distributions whose mass
    /// escapes to infinity only in the limit.
    pub fn with_tail_cap(mut jumps: Vec<(f64, f64)>, cap: f64) -> Result<Self> {
        let last = jumps.last().copied();
        match last {
            Some((loc, val)) if val < 1.0 => {
                if cap <= loc {
                    return Err(Error::InvalidDistFn(format!(
                        "tail cap {cap} must exceed last location {loc}"
                    )));
                }
                jumps.push((cap, 1.0));
            }
            None => jumps.push((cap, 1.0)),
            _ => {}
        }
        Self::new(jumps)
    }

    /// `ε_b`: zero on `[0, b]`, one on `(b, ∞]`.
    pub fn unit_step(b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::InvalidDistFn(format!("non-finite step location {b}")));
        }
        if b < 0.0 {
            return Err(Error::NegativeLocation(b));
        }
        Ok(Self {
            jumps: vec![(b, 1.0)],
        })
    }

    /// `ε_0`, the identity of every triangle function.
    pub fn eps0() -> Self {
        Self {
            jumps: vec![(0.0, 1.0)],
        }
    }

    /// `ε_∞`: zero at every finite point.
    pub fn eps_inf() -> Self {
        Self { jumps: Vec::new() }
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    pub fn locations(&self) -> impl Iterator<Item = f64> + '_ {
        self.jumps.iter().map(|&(l, _)| l)
    }

    pub fn is_eps0(&self) -> bool {
        self.jumps.len() == 1 && self.jumps[0] == (0.0, 1.0)
    }

    pub fn is_eps_inf(&self) -> bool {
        self.jumps.is_empty()
    }

    /// Value approached as `t → ∞` through finite arguments.
    pub fn limit_value(&self) -> f64 {
        self.jumps.last().map_or(0.0, |&(_, v)| v)
    }

    /// Left-continuous evaluation: the value of the last jump strictly below
    /// `t`. Non-positive arguments give `0`, `+∞` gives `1`.
    pub fn evaluate(&self, t: f64) -> f64 {
        if t == f64::INFINITY {
            return 1.0;
        }
        if t.is_nan() || t <= 0.0 {
            return 0.0;
        }
        let idx = self.jumps.partition_point(|&(l, _)| l < t);
        if idx == 0 {
            0.0
        } else {
            self.jumps[idx - 1].1
        }
    }

    /// Right limit at `x`: the value on the piece that starts at `x`.
    pub fn value_after(&self, x: f64) -> f64 {
        let idx = self.jumps.partition_point(|&(l, _)| l <= x);
        if idx == 0 {
            0.0
        } else {
            self.jumps[idx - 1].1
        }
    }

    /// Exact `d_L(f, ε_0)`, i.e. `inf { t > 0 : f(t) > 1 - t }`.
    ///
    /// `f(t) + t` is strictly increasing, so the set of admissible `t` is a
    /// ray; on a piece `(a, b]` with value `v` it starts at `max(a, 1 - v)`.
    pub fn levy_to_eps0(&self) -> f64 {
        let mut start = 0.0_f64;
        let mut value = 0.0_f64;
        for &(loc, next) in &self.jumps {
            let h = start.max(1.0 - value);
            if h < loc {
                return h.min(1.0);
            }
            start = loc;
            value = next;
        }
        start.max(1.0 - value).min(1.0)
    }
}

impl TryFrom<Vec<(f64, f64)>> for StepDistFn {
    type Error = Error;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<StepDistFn> for Vec<(f64, f64)> {
    fn from(f: StepDistFn) -> Self {
        f.jumps
    }
}

/// Sorted, deduplicated union of the jump locations of both functions.
pub(crate) fn merged_locations(f: &StepDistFn, g: &StepDistFn) -> Vec<f64> {
    let mut locs: Vec<f64> = f.locations().chain(g.locations()).collect();
    locs.sort_by(f64::total_cmp);
    locs.dedup();
    locs
}

/// Pointwise combination `op(f(t), g(t))` of two step functions. `op` must be
/// non-decreasing in both arguments so the result stays in D+.
pub(crate) fn combine(
    f: &StepDistFn,
    g: &StepDistFn,
    op: impl Fn(f64, f64) -> f64,
) -> StepDistFn {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut prev = op(0.0, 0.0);
    for loc in merged_locations(f, g) {
        let v = op(f.value_after(loc), g.value_after(loc)).clamp(0.0, 1.0);
        if v > prev {
            out.push((loc, v));
            prev = v;
        }
    }
    StepDistFn { jumps: out }
}

/// `sup_t |f(t) - g(t)|` over finite `t`.
pub fn sup_distance(f: &StepDistFn, g: &StepDistFn) -> f64 {
    let mut worst = 0.0_f64;
    for loc in merged_locations(f, g) {
        worst = worst.max((f.value_after(loc) - g.value_after(loc)).abs());
    }
    worst
}

/// Pointwise order `f ≤ g` on `[0, ∞)`, decided exactly on the merged jumps.
pub fn pointwise_le(f: &StepDistFn, g: &StepDistFn) -> bool {
    pointwise_excess(f, g) <= 0.0
}

/// Largest amount by which `f` exceeds `g` anywhere (`0` if `f ≤ g`).
pub fn pointwise_excess(f: &StepDistFn, g: &StepDistFn) -> f64 {
    merged_locations(f, g)
        .into_iter()
        .map(|loc| f.value_after(loc) - g.value_after(loc))
        .fold(0.0_f64, f64::max)
}

/// Whether `a` satisfies the four Lévy inequalities for every
/// `ξ ∈ (-1/a, 1/a)`.
///
/// All four compositions are left-continuous step functions of `ξ` whose
/// breakpoints lie in `{l, l ± a}` over the jump locations `l` of both
/// functions, so checking one interior point per piece is exact.
pub fn levy_feasible(f: &StepDistFn, g: &StepDistFn, a: f64) -> bool {
    let hi = 1.0 / a;
    let lo = -hi;
    let mut pts: Vec<f64> = Vec::with_capacity(3 * (f.jumps.len() + g.jumps.len()) + 2);
    pts.push(lo);
    pts.push(hi);
    for l in f.locations().chain(g.locations()) {
        for p in [l, l - a, l + a] {
            if p > lo && p < hi {
                pts.push(p);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.windows(2).all(|w| {
        let xi = 0.5 * (w[0] + w[1]);
        let (fm, fx, fp) = (f.evaluate(xi - a), f.evaluate(xi), f.evaluate(xi + a));
        let (gm, gx, gp) = (g.evaluate(xi - a), g.evaluate(xi), g.evaluate(xi + a));
        fm - a <= gx && gx <= fp + a && gm - a <= fx && fx <= gp + a
    })
}

/// Modified Lévy distance, found by bisection on the monotone feasibility
/// predicate. The result is within `tol / 2` of the infimum.
pub fn levy_distance(f: &StepDistFn, g: &StepDistFn, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    if f == g {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if levy_feasible(f, g, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakConvergence {
    pub converged: bool,
    /// Worst `|f_k(ξ) - f(ξ)|` over the tail window and sample points.
    pub max_pointwise_gap: f64,
    /// Worst `d_L(f_k, f)` over the tail window.
    pub max_levy_distance: f64,
}

/// Sample grid `0.05, 0.10, …, 5.0` used by [`weakly_converges`] when the
/// caller has nothing better.
pub fn default_weak_grid() -> Vec<f64> {
    (1..=100).map(|i| i as f64 * 0.05).collect()
}

/// Finite-horizon weak convergence test of `fs` (indexed from 1) towards `f`.
///
/// Continuity points of `f` are sampled at the midpoints between its jumps,
/// one point past its last jump and every grid point that is not a jump of
/// `f`. The verdict holds when every term in `[horizon/2, horizon]` stays
/// within `tol` of `f` at all sample points.
pub fn weakly_converges(
    fs: &[StepDistFn],
    f: &StepDistFn,
    horizon: usize,
    tol: f64,
    grid: &[f64],
) -> Result<WeakConvergence> {
    if fs.is_empty() {
        return Err(Error::Empty("sequence of distribution functions"));
    }
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    if horizon == 0 || horizon > fs.len() {
        return Err(Error::HorizonTooLarge {
            horizon,
            len: fs.len(),
        });
    }
    let jumps: Vec<f64> = f.locations().collect();
    let mut samples: Vec<f64> = jumps.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    if let Some(&last) = jumps.last() {
        samples.push(last + 1.0);
    }
    samples.extend(grid.iter().copied().filter(|&x| x > 0.0 && !jumps.contains(&x)));

    let first = (horizon / 2).max(1);
    let mut gap = 0.0_f64;
    let mut levy = 0.0_f64;
    for fk in &fs[first - 1..horizon] {
        for &xi in &samples {
            gap = gap.max((fk.evaluate(xi) - f.evaluate(xi)).abs());
        }
        levy = levy.max(levy_distance(fk, f, DEFAULT_LEVY_TOL)?);
    }
    Ok(WeakConvergence {
        converged: gap <= tol,
        max_pointwise_gap: gap,
        max_levy_distance: levy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(j: &[(f64, f64)]) -> StepDistFn {
        StepDistFn::new(j.to_vec()).unwrap()
    }

    #[test]
    fn unit_step_semantics() {
        let e0 = StepDistFn::unit_step(0.0).unwrap();
        assert_eq!(e0, StepDistFn::eps0());
        assert_eq!(e0.evaluate(0.0), 0.0);
        assert_eq!(e0.evaluate(0.5), 1.0);
        assert_eq!(e0.evaluate(1e-300), 1.0);

        let e = StepDistFn::unit_step(0.3).unwrap();
        assert_eq!(e.evaluate(0.3), 0.0);
        assert_eq!(e.evaluate(0.30001), 1.0);

        let e2 = StepDistFn::unit_step(2.0).unwrap();
        assert_eq!(e2.evaluate(2.0), 0.0);
        assert!(StepDistFn::unit_step(-0.1).is_err());
    }

    #[test]
    fn evaluate_lookup() {
        let f = step(&[(1.0, 0.4), (2.0, 1.0)]);
        assert_eq!(f.evaluate(1.5), 0.4);
        assert_eq!(f.evaluate(1.0), 0.0);
        assert_eq!(f.evaluate(2.0), 0.4);
        assert_eq!(f.evaluate(2.5), 1.0);
        assert_eq!(f.evaluate(f64::INFINITY), 1.0);
        assert_eq!(f.evaluate(0.0), 0.0);
        assert_eq!(StepDistFn::eps_inf().evaluate(1e9), 0.0);
        assert_eq!(StepDistFn::eps_inf().evaluate(f64::INFINITY), 1.0);
    }

    #[test]
    fn construction_rejects_malformed_input() {
        assert!(StepDistFn::new(vec![(1.0, 0.5), (0.5, 1.0)]).is_err());
        assert!(StepDistFn::new(vec![(1.0, 0.5), (2.0, 0.4)]).is_err());
        assert!(StepDistFn::new(vec![(1.0, 1.5)]).is_err());
        assert!(StepDistFn::new(vec![(-1.0, 0.5)]).is_err());
        assert!(StepDistFn::new(vec![(f64::NAN, 0.5)]).is_err());
    }

    #[test]
    fn canonical_form_drops_flat_jumps() {
        let f = step(&[(0.5, 0.0), (1.0, 0.5), (1.5, 0.5), (2.0, 1.0)]);
        assert_eq!(f, step(&[(1.0, 0.5), (2.0, 1.0)]));
    }

    #[test]
    fn tail_cap_completes_defective_functions() {
        let f = StepDistFn::with_tail_cap(vec![(1.0, 0.5)], 100.0).unwrap();
        assert_eq!(f.jumps(), &[(1.0, 0.5), (100.0, 1.0)]);
        assert!(StepDistFn::with_tail_cap(vec![(1.0, 0.5)], 0.5).is_err());
    }

    #[test]
    fn levy_identity_and_unit_steps() {
        let e0 = StepDistFn::eps0();
        assert_eq!(levy_distance(&e0, &e0, 1e-6).unwrap(), 0.0);
        let d = levy_distance(&StepDistFn::unit_step(0.3).unwrap(), &e0, 1e-6).unwrap();
        assert!((d - 0.3).abs() <= 1e-6, "{d}");
        let d = levy_distance(&StepDistFn::unit_step(5.0).unwrap(), &e0, 1e-6).unwrap();
        assert!((d - 1.0).abs() <= 1e-6, "{d}");
        assert!(levy_distance(&e0, &e0, 0.0).is_err());
    }

    #[test]
    fn levy_to_eps0_closed_forms() {
        assert_eq!(StepDistFn::eps0().levy_to_eps0(), 0.0);
        assert_eq!(StepDistFn::unit_step(0.3).unwrap().levy_to_eps0(), 0.3);
        assert_eq!(StepDistFn::unit_step(7.0).unwrap().levy_to_eps0(), 1.0);
        assert_eq!(StepDistFn::eps_inf().levy_to_eps0(), 1.0);
        assert_eq!(step(&[(0.2, 0.5), (3.0, 1.0)]).levy_to_eps0(), 0.5);
    }

    #[test]
    fn levy_to_eps0_matches_bisection() {
        let fs = [
            step(&[(0.2, 0.5), (3.0, 1.0)]),
            step(&[(0.05, 0.9), (0.5, 1.0)]),
            step(&[(0.6, 0.1)]),
            step(&[(0.0, 0.3), (0.4, 0.7), (2.0, 1.0)]),
        ];
        for f in &fs {
            let exact = f.levy_to_eps0();
            let bis = levy_distance(f, &StepDistFn::eps0(), 1e-7).unwrap();
            assert!((exact - bis).abs() < 1e-6, "{f:?}: {exact} vs {bis}");
        }
    }

    #[test]
    fn pointwise_order() {
        let f = step(&[(1.0, 0.5), (2.0, 1.0)]);
        let g = step(&[(0.5, 0.5), (1.5, 1.0)]);
        assert!(pointwise_le(&f, &g));
        assert!(!pointwise_le(&g, &f));
        assert!(pointwise_le(&f, &f));
        assert!(pointwise_le(&StepDistFn::eps_inf(), &f));
        assert!(pointwise_le(&f, &StepDistFn::eps0()));
        assert_eq!(sup_distance(&f, &g), 0.5);
    }

    #[test]
    fn weak_convergence_examples() {
        let e0 = StepDistFn::eps0();
        let grid = default_weak_grid();
        let shrinking: Vec<_> = (1..=200)
            .map(|k| StepDistFn::unit_step(1.0 / k as f64).unwrap())
            .collect();
        let w = weakly_converges(&shrinking, &e0, 200, 1e-3, &grid).unwrap();
        assert!(w.converged);
        assert!(w.max_levy_distance <= 0.01 + 1e-6);

        let constant = vec![e0.clone(); 50];
        assert!(weakly_converges(&constant, &e0, 50, 1e-3, &grid).unwrap().converged);

        let e1 = StepDistFn::unit_step(1.0).unwrap();
        let alternating: Vec<_> = (1..=100)
            .map(|k| if k % 2 == 0 { e0.clone() } else { e1.clone() })
            .collect();
        let w = weakly_converges(&alternating, &e0, 100, 1e-3, &grid).unwrap();
        assert!(!w.converged);
        assert!((w.max_levy_distance - 1.0).abs() < 1e-6);

        assert!(weakly_converges(&[], &e0, 1, 1e-3, &grid).is_err());
    }

    #[test]
    fn json_is_a_pair_array() {
        let f = step(&[(1.0, 0.4), (2.0, 1.0)]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, "[[1.0,0.4],[2.0,1.0]]");
        let back: StepDistFn = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<StepDistFn>("[[2.0,0.4],[1.0,1.0]]").is_err());
    }
}
