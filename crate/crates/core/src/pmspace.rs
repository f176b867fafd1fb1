//! Finite probabilistic metric spaces under the strong topology.
//!
//! On a finite carrier every strong neighbourhood `N_p(t)` is determined by
//! the exact radii `r_pq = d_L(F_pq, ε_0)`: `q ∈ N_p(t)` iff `r_pq < t`. The
//! radii take finitely many values, so any statement quantified over all
//! `t > 0` reduces to one representative `t` per gap between consecutive
//! radii (see [`FinitePMSpace::gap_grid`]).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distfn::{levy_distance, pointwise_excess, StepDistFn};
use crate::error::{Error, Result};
use crate::triangle::{TNorm, TriangleFn, TriangleOp, DEFAULT_GRID};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "axiom")]
pub enum AxiomViolation {
    /// `F(a, a) ≠ ε_0`.
    P1 { a: usize },
    /// `F(a, b) = ε_0` for `a ≠ b`.
    P2 { a: usize, b: usize },
    /// `F(a, b) ≠ F(b, a)`.
    P3 { a: usize, b: usize },
    /// `F(a, c) ≱ τ(F(a, b), F(b, c))`, by `excess` at the worst point.
    P4 { a: usize, b: usize, c: usize, excess: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpaceReport {
    pub passed: bool,
    pub violation: Option<AxiomViolation>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FinitePMSpace {
    names: Vec<String>,
    table: Vec<Vec<StepDistFn>>,
    tau: TriangleFn,
    metric: Option<Vec<Vec<f64>>>,
    radius: Vec<Vec<f64>>,
}

/// On-disk form: `{"points": [...], "F": [[jumps, ...], ...], "tnorm": "maximal"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub points: Vec<String>,
    #[serde(rename = "F")]
    pub distributions: Vec<Vec<StepDistFn>>,
    pub tnorm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
}

fn radii(table: &[Vec<StepDistFn>]) -> Vec<Vec<f64>> {
    table
        .iter()
        .map(|row| row.iter().map(StepDistFn::levy_to_eps0).collect())
        .collect()
}

impl FinitePMSpace {
    /// Builds a space from a full distribution table without checking the
    /// axioms. Use [`FinitePMSpace::validate_axioms`] before relying on it.
    pub fn from_table_unchecked(
        names: Vec<String>,
        table: Vec<Vec<StepDistFn>>,
        tau: TriangleFn,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Empty("point set"));
        }
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::Parse(format!("distribution table must be {n}x{n}")));
        }
        let radius = radii(&table);
        Ok(Self {
            names,
            table,
            tau,
            metric: None,
            radius,
        })
    }

    /// Builds a space from a table and rejects it unless P-1…P-4 hold.
    pub fn from_table(names: Vec<String>, table: Vec<Vec<StepDistFn>>, tau: TriangleFn) -> Result<Self> {
        let space = Self::from_table_unchecked(names, table, tau)?;
        match space.validate_axioms().violation {
            None => Ok(space),
            Some(v) => Err(Error::InvalidDistFn(format!("space violates {v:?}"))),
        }
    }

    /// Equilateral space: `F_uv = F` off the diagonal, `ε_0` on it, with the
    /// maximal triangle function.
    pub fn build_equilateral(names: Vec<String>, f: StepDistFn) -> Result<Self> {
        let n = names.len();
        if n >= 2 {
            if f.is_eps0() {
                return Err(Error::ZeroDistance(0, 1));
            }
            if f.is_eps_inf() {
                return Err(Error::DegenerateDistribution);
            }
        }
        let table = (0..n)
            .map(|u| {
                (0..n)
                    .map(|v| if u == v { StepDistFn::eps0() } else { f.clone() })
                    .collect()
            })
            .collect();
        Self::from_table(names, table, TriangleFn::Maximal)
    }

    /// Embeds a finite metric space: `F_pq = ε_{d(p,q)}` with the
    /// sup-convolution of `min`, under which P-4 is the triangle inequality.
    pub fn build_metric_induced(names: Vec<String>, d: Vec<Vec<f64>>) -> Result<Self> {
        let n = names.len();
        if d.len() != n || d.iter().any(|r| r.len() != n) {
            return Err(Error::NotAMetric(format!("distance table must be {n}x{n}")));
        }
        for p in 0..n {
            if d[p][p] != 0.0 {
                return Err(Error::NotAMetric(format!("d({p},{p}) = {} ≠ 0", d[p][p])));
            }
            for q in 0..n {
                let v = d[p][q];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::NotAMetric(format!("d({p},{q}) = {v}")));
                }
                if v != d[q][p] {
                    return Err(Error::NotAMetric(format!("d({p},{q}) ≠ d({q},{p})")));
                }
                if p != q && v == 0.0 {
                    return Err(Error::ZeroDistance(p, q));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    let via = d[p][q] + d[q][r];
                    if d[p][r] > via {
                        return Err(Error::TriangleViolation {
                            p,
                            q,
                            r,
                            direct: d[p][r],
                            via,
                        });
                    }
                }
            }
        }
        let table = d
            .iter()
            .map(|row| row.iter().map(|&x| StepDistFn::unit_step(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let tau = TriangleFn::SupConv {
            tnorm: TNorm::Min,
            grid: DEFAULT_GRID,
        };
        let mut space = Self::from_table(names, table, tau)?;
        space.metric = Some(d);
        Ok(space)
    }

    /// Metric-induced space of points on the real line.
    pub fn line(positions: &[f64]) -> Result<Self> {
        let names = positions.iter().map(|x| format!("{x}")).collect();
        let d = positions
            .iter()
            .map(|a| positions.iter().map(|b| (a - b).abs()).collect())
            .collect();
        Self::build_metric_induced(names, d)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> + '_ {
        (0..self.names.len()).map(PointId)
    }

    pub fn name(&self, p: PointId) -> &str {
        &self.names[p.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn point(&self, name: &str) -> Result<PointId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(PointId)
            .or_else(|| {
                name.parse::<usize>()
                    .ok()
                    .filter(|&i| i < self.names.len())
                    .map(PointId)
            })
            .ok_or_else(|| Error::UnknownPointName(name.to_string()))
    }

    pub fn tau(&self) -> TriangleFn {
        self.tau
    }

    pub fn metric(&self) -> Option<&[Vec<f64>]> {
        self.metric.as_deref()
    }

    /// `F_pq`.
    pub fn dist(&self, p: PointId, q: PointId) -> &StepDistFn {
        &self.table[p.0][q.0]
    }

    /// Exact `d_L(F_pq, ε_0)`.
    pub fn radius(&self, p: PointId, q: PointId) -> f64 {
        self.radius[p.0][q.0]
    }

    /// Checks P-1…P-4 over all pairs and triples; returns the first violation.
    pub fn validate_axioms(&self) -> SpaceReport {
        let violation = self.first_violation();
        SpaceReport {
            passed: violation.is_none(),
            violation,
        }
    }

    fn first_violation(&self) -> Option<AxiomViolation> {
        let n = self.len();
        for a in 0..n {
            if !self.table[a][a].is_eps0() {
                return Some(AxiomViolation::P1 { a });
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && self.table[a][b].is_eps0() {
                    return Some(AxiomViolation::P2 { a, b });
                }
                if self.table[a][b] != self.table[b][a] {
                    return Some(AxiomViolation::P3 { a, b });
                }
            }
        }
        let slack = if self.tau.is_step_exact() { 0.0 } else { self.tau.resolution() };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let composed = self.tau.apply(&self.table[a][b], &self.table[b][c]);
                    let excess = pointwise_excess(&composed, &self.table[a][c]);
                    if excess > slack {
                        return Some(AxiomViolation::P4 { a, b, c, excess });
                    }
                }
            }
        }
        None
    }

    /// Membership `q ∈ N_p(t)`, evaluated as `F_pq(t) > 1 - t`.
    pub fn in_neighborhood(&self, p: PointId, q: PointId, t: f64) -> bool {
        self.table[p.0][q.0].evaluate(t) > 1.0 - t
    }

    /// Strong `t`-neighbourhood `{q : F_pq(t) > 1 - t}`.
    pub fn strong_neighborhood(&self, p: PointId, t: f64) -> Result<Vec<PointId>> {
        if !(t > 0.0) {
            return Err(Error::NonPositive { name: "t", value: t });
        }
        Ok(self.points().filter(|&q| self.in_neighborhood(p, q, t)).collect())
    }

    /// The same neighbourhood through `d_L(F_pq, ε_0) < t`, with `d_L` found
    /// by bisection.
    pub fn strong_neighborhood_levy(&self, p: PointId, t: f64, tol: f64) -> Result<Vec<PointId>> {
        if !(t > 0.0) {
            return Err(Error::NonPositive { name: "t", value: t });
        }
        let e0 = StepDistFn::eps0();
        let mut out = Vec::new();
        for q in self.points() {
            if levy_distance(self.dist(p, q), &e0, tol)? < t {
                out.push(q);
            }
        }
        Ok(out)
    }

    /// Strong `u`-vicinity `{(p, q) : F_pq(u) > 1 - u}`.
    pub fn strong_vicinity(&self, u: f64) -> Result<Vec<(PointId, PointId)>> {
        if !(u > 0.0) {
            return Err(Error::NonPositive { name: "u", value: u });
        }
        let mut out = Vec::new();
        for p in self.points() {
            for q in self.points() {
                if self.in_neighborhood(p, q, u) {
                    out.push((p, q));
                }
            }
        }
        Ok(out)
    }

    fn composition_within(&self, alpha: f64, u: f64) -> bool {
        let n = self.len();
        let inside: Vec<Vec<bool>> = (0..n)
            .map(|p| (0..n).map(|q| self.in_neighborhood(PointId(p), PointId(q), alpha)).collect())
            .collect();
        (0..n).all(|p| {
            (0..n).all(|q| {
                !inside[p][q]
                    || (0..n).all(|r| !inside[q][r] || self.in_neighborhood(PointId(p), PointId(r), u))
            })
        })
    }

    /// Largest `α` on `grid` (scanned from the top, restricted to `(0, u]`)
    /// with `V(α) ∘ V(α) ⊆ V(u)`.
    pub fn vicinity_composition_alpha(&self, u: f64, grid: &[f64]) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::NonPositive { name: "u", value: u });
        }
        let mut candidates: Vec<f64> = grid.iter().copied().filter(|&a| a > 0.0 && a <= u).collect();
        candidates.sort_by(|a, b| b.total_cmp(a));
        let mut smallest = u;
        for alpha in candidates {
            smallest = alpha;
            if self.composition_within(alpha, u) {
                return Ok(alpha);
            }
        }
        Err(Error::AlphaSearchExhausted { smallest })
    }

    fn min_radius_to(&self, c: PointId, set: &[PointId], skip_self: bool) -> Option<f64> {
        set.iter()
            .filter(|&&e| !(skip_self && e == c))
            .map(|&e| self.radius(c, e))
            .min_by(f64::total_cmp)
    }

    /// Strong closure `k(M)`.
    ///
    /// `c ∈ k(M)` iff every `N_c(t)` meets `M`, i.e. iff
    /// `min_{e ∈ M} d_L(F_ce, ε_0) = 0`. Outside `M` that minimum is a positive
    /// gap whenever P-2 holds, so valid finite spaces give `k(M) = M`.
    pub fn strong_closure(&self, set: &[PointId]) -> Vec<PointId> {
        self.points()
            .filter(|&c| set.contains(&c) || self.min_radius_to(c, set, false) == Some(0.0))
            .collect()
    }

    /// Strong limit points `L_M`: points whose every neighbourhood meets
    /// `M ∖ {l}`.
    pub fn set_limit_points(&self, set: &[PointId]) -> Vec<PointId> {
        self.points()
            .filter(|&l| self.min_radius_to(l, set, true) == Some(0.0))
            .collect()
    }

    pub fn is_strongly_closed(&self, set: &[PointId]) -> bool {
        let mut s = set.to_vec();
        s.sort();
        s.dedup();
        self.strong_closure(&s) == s
    }

    /// Every subset of a finite carrier is strongly compact.
    pub fn is_strongly_compact(&self, _set: &[PointId]) -> bool {
        true
    }

    /// Smallest positive radius between distinct points.
    pub fn gap(&self) -> Option<f64> {
        self.distinct_radii().first().copied()
    }

    fn distinct_radii(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self.radius.iter().flatten().copied().filter(|&x| x > 0.0).collect();
        r.sort_by(f64::total_cmp);
        r.dedup();
        r
    }

    /// One `t` strictly inside each interval on which all neighbourhoods are
    /// constant: `r_1/2`, the midpoints `(r_i + r_{i+1})/2`, and `r_max + 1/2`.
    pub fn gap_grid(&self) -> Vec<f64> {
        let r = self.distinct_radii();
        let Some((&first, &last)) = r.first().zip(r.last()) else {
            return vec![0.5];
        };
        let mut grid = vec![0.5 * first];
        grid.extend(r.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        grid.push(last + 0.5);
        grid
    }

    pub fn to_file(&self) -> SpaceFile {
        SpaceFile {
            points: self.names.clone(),
            distributions: self.table.clone(),
            tnorm: self.tau.tag().to_string(),
            metric: self.metric.clone(),
        }
    }

    pub fn from_file(file: SpaceFile) -> Result<Self> {
        if let Some(d) = file.metric {
            return Self::build_metric_induced(file.points, d);
        }
        let tau: TriangleFn = file.tnorm.parse()?;
        Self::from_table(file.points, file.distributions, tau)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("space serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(s)?)
    }
}

/// Descending grid `u, u/2, u/4, …` with `steps` entries.
pub fn halving_grid(u: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|i| u * 0.5_f64.powi(i as i32)).collect()
}
