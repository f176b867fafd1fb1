//! Finite-horizon detectors for strong `A^I`-statistical convergence,
//! Cauchyness, limit points and cluster points of sequences over a finite
//! PM space.
//!
//! "For every `t > 0`" is checked on [`FinitePMSpace::gap_grid`], which is
//! exact on a finite carrier: neighbourhoods only change at the radii.

mod detect;
mod metric_forms;
mod sequence;

use std::collections::HashMap;

use serde::Serialize;

pub use detect::{
    ai_star_detect, ai_stat_cauchy_detect, ai_stat_conv_detect, ai_stat_conv_levy, ai_stat_limit_real,
    cauchy_defect_sets, gamma_set, lambda_set, splice, stat_bounded_check, strong_cauchy_detect,
    strong_conv_detect, strong_limit_point_set, DefectSet, GammaResult, LambdaCandidate, LambdaResult, StarMode,
};
pub use metric_forms::{metric_cauchy_forms, metric_cauchy_forms_of, value_gap_grid, MetricCauchyForms, MetricFormsOptions};
pub use sequence::{Annotations, IndexedSequence, Recipe};

use crate::error::{Error, Result};
use crate::pmspace::{FinitePMSpace, PointId};
use crate::summability::{ai_density_mask, DensityEstimate, Ideal, Status, SummMatrix};

/// Everything a detector needs besides the sequence.
#[derive(Clone, Copy, Debug)]
pub struct Setting<'a> {
    pub space: &'a FinitePMSpace,
    pub matrix: &'a SummMatrix,
    pub ideal: &'a Ideal,
    pub horizon: usize,
    pub tol: f64,
}

impl<'a> Setting<'a> {
    pub fn new(space: &'a FinitePMSpace, matrix: &'a SummMatrix, ideal: &'a Ideal, horizon: usize, tol: f64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Empty("horizon"));
        }
        if !(tol > 0.0) {
            return Err(Error::NonPositiveTolerance(tol));
        }
        Ok(Self {
            space,
            matrix,
            ideal,
            horizon,
            tol,
        })
    }

    /// Number of terms the detectors read: the horizon, or the matrix
    /// support at the horizon if that is larger.
    pub fn span(&self) -> usize {
        self.horizon.max(self.matrix.max_support(self.horizon))
    }

    /// `x_1, …, x_span`.
    pub fn terms(&self, x: &IndexedSequence) -> Vec<PointId> {
        x.take(self.span())
    }

    fn check_terms(&self, xs: &[PointId]) -> Result<()> {
        if xs.len() < self.span() {
            return Err(Error::HorizonTooLarge {
                horizon: self.span(),
                len: xs.len(),
            });
        }
        if let Some(p) = xs.iter().find(|p| p.0 >= self.space.len()) {
            return Err(Error::UnknownPoint(p.0));
        }
        Ok(())
    }

    /// `δ_{A^I}` of an arbitrary index mask over `1..=span`.
    pub fn density(&self, mask: &[bool]) -> Result<DensityEstimate> {
        ai_density_mask(self.matrix, self.ideal, mask, self.horizon, self.tol)
    }

    /// `δ_{A^I}({k : x_k ∈ P})` with `P` given as a flag per carrier point.
    pub fn density_of_points(&self, xs: &[PointId], points: &[bool]) -> Result<DensityEstimate> {
        let mask: Vec<bool> = xs[..self.span()].iter().map(|p| points[p.0]).collect();
        self.density(&mask)
    }
}

/// Caches densities of `{k : x_k ∈ P}` by `P`; different thresholds often
/// select the same point set.
pub(crate) struct DensityCache<'s, 'a> {
    setting: &'s Setting<'a>,
    xs: &'s [PointId],
    seen: HashMap<Vec<bool>, DensityEstimate>,
}

impl<'s, 'a> DensityCache<'s, 'a> {
    pub(crate) fn new(setting: &'s Setting<'a>, xs: &'s [PointId]) -> Self {
        Self {
            setting,
            xs,
            seen: HashMap::new(),
        }
    }

    pub(crate) fn get(&mut self, points: Vec<bool>) -> Result<DensityEstimate> {
        if let Some(d) = self.seen.get(&points) {
            return Ok(*d);
        }
        let d = self.setting.density_of_points(self.xs, &points)?;
        self.seen.insert(points, d);
        Ok(d)
    }
}

/// Per-threshold evidence behind a [`Detection`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdCheck {
    pub t: f64,
    pub value: f64,
    pub residual: f64,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Detection {
    pub status: Status,
    /// Largest defect density over the thresholds (or, for strong
    /// convergence, the fraction of the horizon before the witness).
    pub residual: f64,
    /// Witness index `k_0`, when the notion has one.
    pub witness: Option<usize>,
    pub checks: Vec<ThresholdCheck>,
}

impl Detection {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

/// Combines per-threshold density verdicts where every defect set must be
/// thin.
pub(crate) fn all_thin(checks: Vec<ThresholdCheck>, densities: &[DensityEstimate], tol: f64, witness: Option<usize>) -> Detection {
    let status = if densities.iter().all(|d| d.is_thin(tol)) {
        Status::Converged
    } else if densities.iter().any(|d| d.is_nonthin(tol)) {
        Status::Diverged
    } else {
        Status::Inconclusive
    };
    let residual = densities.iter().map(|d| d.value.max(0.0)).fold(0.0, f64::max);
    Detection {
        status,
        residual,
        witness,
        checks,
    }
}

pub(crate) fn check_of(t: f64, d: &DensityEstimate) -> ThresholdCheck {
    ThresholdCheck {
        t,
        value: d.value,
        residual: d.residual,
        status: d.status,
    }
}
