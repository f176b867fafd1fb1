//! Brute-force references. Nothing here calls the fast paths it checks.

use crate::distfn::StepDistFn;
use crate::error::{Error, Result};
use crate::summability::{IndexSet, SummMatrix};

/// `f(x)` by linear scan: value of the last jump strictly left of `x`.
fn eval_scan(f: &StepDistFn, x: f64) -> f64 {
    let mut v = 0.0;
    for &(l, h) in f.jumps() {
        if l < x {
            v = h;
        }
    }
    v
}

fn feasible_by_probing(f: &StepDistFn, g: &StepDistFn, a: f64) -> bool {
    let lim = 1.0 / a;
    let mut marks: Vec<f64> = vec![-lim, lim, 0.0, a, -a];
    for l in f.locations().chain(g.locations()) {
        marks.extend([l, l - a, l + a]);
    }
    marks.retain(|m| m.is_finite());
    marks.sort_by(f64::total_cmp);
    marks.dedup();
    let mut probes: Vec<f64> = marks.clone();
    probes.extend(marks.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let holds = |p: &StepDistFn, q: &StepDistFn, x: f64| {
        eval_scan(p, x - a) - a <= eval_scan(q, x) && eval_scan(q, x) <= eval_scan(p, x + a) + a
    };
    probes
        .into_iter()
        .filter(|&x| -lim < x && x < lim)
        .all(|x| holds(f, g, x) && holds(g, f, x))
}

/// Smallest `a ∈ {step, 2·step, …, 1}` at which the Lévy band condition holds,
/// checked at every breakpoint and gap midpoint of both functions shifted by
/// `±a`.
pub fn oracle_dl(f: &StepDistFn, g: &StepDistFn, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::NonPositive { name: "grid-step", value: step });
    }
    let count = (1.0 / step).ceil() as usize;
    for i in 1..=count {
        let a = (i as f64 * step).min(1.0);
        if feasible_by_probing(f, g, a) {
            return Ok(a);
        }
    }
    Ok(1.0)
}

/// `(min, max)` of `y_n = Σ_{k ∈ M} a_nk` over `n ∈ [N/2, N]`, summing
/// matrix entries one by one. Windows longer than `max_rows` are sampled at
/// evenly spaced rows, always including `N/2` and `N`.
pub fn oracle_density(a: &SummMatrix, set: &IndexSet, horizon: usize, max_rows: usize) -> Result<(f64, f64)> {
    if horizon < 100 {
        return Err(Error::Parse(format!("oracle density needs horizon ≥ 100, got {horizon}")));
    }
    let lo = horizon / 2;
    let width = horizon - lo;
    let rows: Vec<usize> = if width < max_rows.max(2) {
        (lo..=horizon).collect()
    } else {
        let m = max_rows.max(2) - 1;
        (0..=m).map(|i| lo + i * width / m).collect()
    };
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for n in rows {
        let mut y = 0.0;
        for k in 1..=a.support(n) {
            if set.contains(k) {
                y += a.entry(n, k)?;
            }
        }
        min = min.min(y);
        max = max.max(y);
    }
    Ok((min, max))
}
