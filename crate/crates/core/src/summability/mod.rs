//! Summability matrices, ideals on ℕ, and finite-horizon `A`- and
//! `A^I`-densities.
//!
//! Every asymptotic notion is read at a finite horizon `N` through the tail
//! window `[N/2, N]`; see [`fin_limit`].

mod index_set;
mod matrix;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use index_set::IndexSet;
pub use matrix::{check_regularity, ConditionResult, RegularityReport, SummMatrix};

use crate::error::{Error, Result};

pub const DEFAULT_HORIZON: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-2;
/// Thresholds `ε` used when testing `{k : |y_k - L| ≥ ε} ∈ I`.
pub const DEFAULT_EPS_GRID: [f64; 3] = [0.5, 0.25, 0.1];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    Inconclusive,
    Diverged,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Converged => "converged",
            Status::Inconclusive => "inconclusive",
            Status::Diverged => "diverged",
        })
    }
}

/// A finite-horizon limit claim. `status == Converged` implies
/// `residual ≤ tol` for the tolerance it was computed with.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub value: f64,
    pub residual: f64,
    pub status: Status,
}

impl Verdict {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

/// Tail window `[N/2, N]` as a 0-based slice range of a length-`N` sequence.
fn window(len: usize) -> std::ops::Range<usize> {
    (len / 2).max(1) - 1..len
}

fn late_window(len: usize) -> std::ops::Range<usize> {
    (3 * len / 4).max(1) - 1..len
}

fn max_dev(y: &[f64], l: f64) -> f64 {
    y.iter().map(|v| (v - l).abs()).fold(0.0, f64::max)
}

/// Ordinary limit read at `L`: residual is `max |y_n - L|` over `[N/2, N]`.
/// Diverged when the deviation persists into `[3N/4, N]`.
pub fn fin_limit_at(y: &[f64], l: f64, tol: f64) -> Result<Verdict> {
    if y.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let residual = max_dev(&y[window(y.len())], l);
    let status = if residual <= tol {
        Status::Converged
    } else if max_dev(&y[late_window(y.len())], l) > tol {
        Status::Diverged
    } else {
        Status::Inconclusive
    };
    Ok(Verdict {
        value: l,
        residual,
        status,
    })
}

/// Ordinary limit estimated by the last term `y_N`.
pub fn fin_limit(y: &[f64], tol: f64) -> Result<Verdict> {
    let last = *y.last().ok_or(Error::Empty("sequence"))?;
    fin_limit_at(y, last, tol)
}

/// `(min, max)` of `y` over `[N/2, N]`.
pub fn tail_bounds(y: &[f64]) -> (f64, f64) {
    y[window(y.len())]
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

fn tail_median(y: &[f64]) -> f64 {
    let mut t = y[window(y.len())].to_vec();
    t.sort_by(f64::total_cmp);
    t[t.len() / 2]
}

type MembershipFn = dyn Fn(&[bool]) -> bool + Send + Sync;

/// An ideal given only by a decision procedure on finite index masks.
#[derive(Clone)]
pub struct PredicateIdeal {
    pub name: String,
    test: Arc<MembershipFn>,
}

impl PredicateIdeal {
    /// `test` receives `mask[k - 1] = (k ∈ S)` for `k = 1..=N`.
    pub fn new(name: impl Into<String>, test: impl Fn(&[bool]) -> bool + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            test: Arc::new(test),
        }
    }
}

impl fmt::Debug for PredicateIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PredicateIdeal").field("name", &self.name).finish()
    }
}

#[derive(Clone, Debug)]
pub enum Ideal {
    /// Finite sets. At horizon `N`, `S` is finite when it has no member in
    /// `(N/2, N]`.
    Fin,
    /// Sets of `B`-density zero.
    DensityZero(SummMatrix),
    Predicate(PredicateIdeal),
}

impl Ideal {
    pub fn name(&self) -> String {
        match self {
            Ideal::Fin => "fin".into(),
            Ideal::DensityZero(b) => format!("density:{}", b.name()),
            Ideal::Predicate(p) => p.name.clone(),
        }
    }

    /// Membership of `S ∩ [1, N]` given as `mask[k - 1]`, `N = mask.len()`.
    pub fn contains(&self, mask: &[bool], tol: f64) -> Result<bool> {
        if mask.is_empty() {
            return Ok(true);
        }
        match self {
            Ideal::Fin => Ok(!mask[mask.len() / 2..].iter().any(|&b| b)),
            Ideal::DensityZero(b) => {
                let y = b.density_partial_mask(mask, mask.len())?;
                let v = fin_limit(&y, tol)?;
                Ok(v.converged() && v.value <= tol)
            }
            Ideal::Predicate(p) => Ok((p.test)(mask)),
        }
    }

    /// Admissibility at horizon `N`: the singleton `{1}` is in the ideal.
    pub fn is_admissible(&self, horizon: usize, tol: f64) -> Result<bool> {
        let mut singleton = vec![false; horizon.max(1)];
        singleton[0] = true;
        self.contains(&singleton, tol)
    }

    /// Filter membership: `S ∈ F(I)` iff `ℕ ∖ S ∈ I`.
    pub fn filter_contains(&self, mask: &[bool], tol: f64) -> Result<bool> {
        let complement: Vec<bool> = mask.iter().map(|b| !b).collect();
        self.contains(&complement, tol)
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `fin` or `density:<matrix>`.
impl FromStr for Ideal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "fin" {
            return Ok(Ideal::Fin);
        }
        if let Some(m) = s.strip_prefix("density:") {
            return Ok(Ideal::DensityZero(m.parse()?));
        }
        Err(Error::Parse(format!("unknown ideal `{s}` (expected fin or density:<matrix>)")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitOptions {
    /// Candidate limits. `None` tries `y_N` and the median of the tail window.
    pub candidates: Option<Vec<f64>>,
    pub eps_grid: Vec<f64>,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            candidates: None,
            eps_grid: DEFAULT_EPS_GRID.to_vec(),
        }
    }
}

fn ideal_limit_at(y: &[f64], l: f64, ideal: &Ideal, tol: f64, eps_grid: &[f64]) -> Result<Verdict> {
    let mut residual = 0.0f64;
    let mut status = Status::Converged;
    for &eps in eps_grid {
        let mask: Vec<bool> = y.iter().map(|v| (v - l).abs() >= eps).collect();
        match ideal {
            Ideal::Fin => unreachable!("handled by fin_limit_at"),
            Ideal::DensityZero(b) => {
                let d = fin_limit(&b.density_partial_mask(&mask, y.len())?, tol)?;
                residual = residual.max(d.value).max(d.residual);
                let s = match d.status {
                    Status::Converged if d.value <= tol => Status::Converged,
                    Status::Converged => Status::Diverged,
                    other => other,
                };
                status = worse(status, s);
            }
            Ideal::Predicate(p) => {
                if !(p.test)(&mask) {
                    residual = residual.max(eps);
                    status = Status::Diverged;
                }
            }
        }
    }
    Ok(Verdict {
        value: l,
        residual,
        status,
    })
}

fn worse(a: Status, b: Status) -> Status {
    match (a, b) {
        (Status::Diverged, _) | (_, Status::Diverged) => Status::Diverged,
        (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
        _ => Status::Converged,
    }
}

fn rank(v: &Verdict) -> (u8, f64) {
    let s = match v.status {
        Status::Converged => 0,
        Status::Inconclusive => 1,
        Status::Diverged => 2,
    };
    (s, v.residual)
}

/// `I`-limit of a real sequence `y_1..y_N` at horizon `N = y.len()`.
///
/// For `Fin` this is [`fin_limit`] (or [`fin_limit_at`] per candidate). For
/// other ideals a candidate `L` is accepted outright when `y_n → L`
/// ordinarily and the ideal is admissible, since `I`-limits extend ordinary
/// limits. Otherwise, for `DensityZero(B)`, `L` is accepted when every
/// `{k : |y_k - L| ≥ ε}` on the grid has `B`-density converged to at most
/// `tol`. Predicate ideals need explicit candidates. The best candidate is
/// returned.
pub fn ideal_limit(y: &[f64], ideal: &Ideal, tol: f64, opts: &LimitOptions) -> Result<Verdict> {
    if y.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let candidates = match (&opts.candidates, ideal) {
        (Some(c), _) if !c.is_empty() => c.clone(),
        (_, Ideal::Fin) => return fin_limit(y, tol),
        (_, Ideal::DensityZero(_)) => vec![y[y.len() - 1], tail_median(y)],
        (_, Ideal::Predicate(p)) => return Err(Error::UnsupportedIdeal(p.name.clone())),
    };
    let admissible = ideal.is_admissible(y.len(), tol)?;
    let mut best: Option<Verdict> = None;
    for l in candidates {
        let ordinary = fin_limit_at(y, l, tol)?;
        let v = match ideal {
            Ideal::Fin => ordinary,
            _ if admissible && ordinary.converged() => ordinary,
            _ => ideal_limit_at(y, l, ideal, tol, &opts.eps_grid)?,
        };
        if best.as_ref().is_none_or(|b| rank(&v) < rank(b)) {
            best = Some(v);
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// `A^I`-density estimate of an index set, with the tail range of the
/// partial `A`-densities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub residual: f64,
    pub status: Status,
    pub liminf: f64,
    pub limsup: f64,
}

impl DensityEstimate {
    pub fn verdict(&self) -> Verdict {
        Verdict {
            value: self.value,
            residual: self.residual,
            status: self.status,
        }
    }

    /// `δ = 0` within `tol`, i.e. membership in the derived ideal `J(A^I)`.
    pub fn is_thin(&self, tol: f64) -> bool {
        self.status == Status::Converged && self.value <= tol
    }

    /// "Does not have density zero": a converged positive estimate, or an
    /// unsettled one whose partial densities stay above `tol`.
    pub fn is_nonthin(&self, tol: f64) -> bool {
        match self.status {
            Status::Converged => self.value > tol,
            _ => self.liminf > tol,
        }
    }
}

/// `δ_{A^I}(M)` with `M` given as `member[k - 1]`.
pub fn ai_density_mask(a: &SummMatrix, ideal: &Ideal, member: &[bool], horizon: usize, tol: f64) -> Result<DensityEstimate> {
    let y = a.density_partial_mask(member, horizon)?;
    let v = ideal_limit(&y, ideal, tol, &LimitOptions::default())?;
    let (liminf, limsup) = tail_bounds(&y);
    Ok(DensityEstimate {
        value: v.value,
        residual: v.residual,
        status: v.status,
        liminf,
        limsup,
    })
}

/// `δ_{A^I}(M)` for a declarative index set.
pub fn ai_density(a: &SummMatrix, ideal: &Ideal, set: &IndexSet, horizon: usize, tol: f64) -> Result<DensityEstimate> {
    let member = set.indicator(a.max_support(horizon));
    ai_density_mask(a, ideal, &member, horizon, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const N: usize = 10_000;

    #[test]
    fn fin_limit_examples() {
        let y: Vec<f64> = (1..=N).map(|k| 1.0 / k as f64).collect();
        let v = ideal_limit(&y, &Ideal::Fin, 1e-2, &LimitOptions::default()).unwrap();
        assert!(v.converged());
        assert_abs_diff_eq!(v.value, 0.0, epsilon = 1e-3);

        let alt: Vec<f64> = (1..=N).map(|k| (k % 2) as f64).collect();
        let v = ideal_limit(&alt, &Ideal::Fin, 1e-2, &LimitOptions::default()).unwrap();
        assert_eq!(v.status, Status::Diverged);
    }

    #[test]
    fn density_zero_limit_ignores_squares() {
        let y: Vec<f64> = (1..=N).map(|k| f64::from(u8::from(IndexSet::Squares.contains(k)))).collect();
        let ideal = Ideal::DensityZero(SummMatrix::Cesaro);
        let v = ideal_limit(&y, &ideal, 1e-2, &LimitOptions::default()).unwrap();
        assert!(v.converged(), "{v:?}");
        assert_eq!(v.value, 0.0);
        // The ordinary limit does not exist.
        assert!(!fin_limit(&y, 1e-2).unwrap().converged());
    }

    #[test]
    fn predicate_ideal_needs_candidates() {
        let ideal = Ideal::Predicate(PredicateIdeal::new("tail-empty", |m: &[bool]| !m[m.len() / 2..].contains(&true)));
        let y = vec![0.0; 100];
        assert!(matches!(
            ideal_limit(&y, &ideal, 1e-2, &LimitOptions::default()),
            Err(Error::UnsupportedIdeal(_))
        ));
        let opts = LimitOptions {
            candidates: Some(vec![1.0, 0.0]),
            ..LimitOptions::default()
        };
        let v = ideal_limit(&y, &ideal, 1e-2, &opts).unwrap();
        assert!(v.converged());
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn density_examples() {
        let c1 = SummMatrix::Cesaro;
        let evens = ai_density(&c1, &Ideal::Fin, &IndexSet::Evens, N, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(evens.value, 0.5, epsilon = 1e-3);
        assert!(evens.is_nonthin(DEFAULT_TOL));

        let all = ai_density(&c1, &Ideal::Fin, &IndexSet::All, N, DEFAULT_TOL).unwrap();
        assert_eq!(all.value, 1.0);

        let empty = ai_density(&c1, &Ideal::Fin, &IndexSet::Empty, N, DEFAULT_TOL).unwrap();
        assert_eq!(empty.value, 0.0);
        assert!(empty.is_thin(DEFAULT_TOL));

        let finite = ai_density(&c1, &Ideal::Fin, &IndexSet::finite(&[1, 2, 3]), N, DEFAULT_TOL).unwrap();
        assert!(finite.value <= 1e-3 && finite.is_thin(DEFAULT_TOL));

        let squares = ai_density(&c1, &Ideal::Fin, &IndexSet::Squares, N, DEFAULT_TOL).unwrap();
        assert!(squares.is_thin(DEFAULT_TOL), "{squares:?}");
        assert_abs_diff_eq!(squares.value, 0.01, epsilon = 1e-12);
    }

    #[test]
    fn ideal_membership() {
        let tail_hit: Vec<bool> = (1..=100).map(|k| k == 90).collect();
        assert!(!Ideal::Fin.contains(&tail_hit, 1e-2).unwrap());
        assert!(Ideal::DensityZero(SummMatrix::Cesaro).contains(&tail_hit, 1e-2).unwrap());
        assert!(Ideal::Fin.contains(&[], 1e-2).unwrap());
        let evens = IndexSet::Evens.indicator(1000);
        assert!(!Ideal::DensityZero(SummMatrix::Cesaro).contains(&evens, 1e-2).unwrap());
        let almost_all = IndexSet::Squares.complement().indicator(N);
        assert!(Ideal::DensityZero(SummMatrix::Cesaro).filter_contains(&almost_all, 1e-2).unwrap());
    }

    #[test]
    fn slow_ordinary_limits_carry_over_to_density_ideals() {
        // ⌊√n⌋/n + 26/n stays ≥ 0.1 away from its limit for a few hundred
        // terms; that finite stretch has C1 partial density above 0.02 at 10⁴.
        let y: Vec<f64> = (1..=N).map(|n| ((n.isqrt() + 26) as f64 / n as f64).min(1.0)).collect();
        let ideal = Ideal::DensityZero(SummMatrix::Cesaro);
        let v = ideal_limit(&y, &ideal, 0.02, &LimitOptions::default()).unwrap();
        assert!(v.converged(), "{v:?}");
        assert!(ideal.is_admissible(100, 0.02).unwrap());
        assert!(!Ideal::DensityZero(SummMatrix::FirstColumn).is_admissible(100, 0.02).unwrap());
    }

    #[test]
    fn parse_ideals() {
        assert!(matches!("fin".parse::<Ideal>().unwrap(), Ideal::Fin));
        assert!(matches!(
            "density:cesaro".parse::<Ideal>().unwrap(),
            Ideal::DensityZero(SummMatrix::Cesaro)
        ));
        assert!("maximal".parse::<Ideal>().is_err());
    }

    #[test]
    fn converged_implies_residual_within_tol() {
        let y: Vec<f64> = (1..=500).map(|k| (k as f64).sin() / k as f64).collect();
        for tol in [1e-4, 1e-3, 1e-2, 0.1] {
            for ideal in [Ideal::Fin, Ideal::DensityZero(SummMatrix::Cesaro)] {
                let v = ideal_limit(&y, &ideal, tol, &LimitOptions::default()).unwrap();
                assert!(!v.converged() || v.residual <= tol);
            }
        }
    }
}
