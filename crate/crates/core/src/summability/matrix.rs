//! Row-generated non-negative summability matrices.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::IndexSet;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SummMatrix {
    /// `a_nk = 1/n` for `k ≤ n`.
    Cesaro,
    Identity,
    /// `a_n1 = 1` for every row. Row sums are 1 but the first column does
    /// not vanish, so it is not regular.
    FirstColumn,
    /// `(1 - weight)` times the Cesàro row plus `weight` spread uniformly over
    /// `set ∩ [1, n]`; rows where that intersection is empty are pure Cesàro.
    Block { set: IndexSet, weight: f64 },
    /// Explicit rows; `rows[n - 1]` lists `(k, a_nk)` pairs. Only the listed
    /// rows exist.
    Rows { name: String, rows: Vec<Vec<(usize, f64)>> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RowsFile {
    #[serde(default)]
    name: Option<String>,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SummMatrix {
    pub fn block(set: IndexSet, weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::Parse(format!("block weight {weight} outside [0, 1]")));
        }
        set.validate()?;
        Ok(SummMatrix::Block { set, weight })
    }

    pub fn from_rows(name: impl Into<String>, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            for &(k, a) in row {
                if k == 0 {
                    return Err(Error::Parse(format!("row {}: column indices start at 1", i + 1)));
                }
                if !(a >= 0.0) || !a.is_finite() {
                    return Err(Error::Parse(format!("row {}: entry a_{},{k} = {a} is not non-negative", i + 1, i + 1)));
                }
            }
        }
        Ok(SummMatrix::Rows {
            name: name.into(),
            rows,
        })
    }

    /// Reads `{"name": ..., "rows": [[[k, a], ...], ...]}`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: RowsFile = serde_json::from_str(&text)?;
        let name = file.name.unwrap_or_else(|| path.display().to_string());
        Self::from_rows(name, file.rows)
    }

    pub fn name(&self) -> String {
        match self {
            SummMatrix::Cesaro => "cesaro-1".into(),
            SummMatrix::Identity => "identity".into(),
            SummMatrix::FirstColumn => "first-column".into(),
            SummMatrix::Block { set, weight } => format!("block:{set}:{weight}"),
            SummMatrix::Rows { name, .. } => name.clone(),
        }
    }

    fn check_rows(&self, horizon: usize) -> Result<()> {
        if let SummMatrix::Rows { name, rows } = self {
            if horizon > rows.len() {
                return Err(Error::HorizonExceedsRows {
                    name: name.clone(),
                    rows: rows.len(),
                    horizon,
                });
            }
        }
        Ok(())
    }

    /// Largest column index with a possibly non-zero entry in row `n`.
    pub fn support(&self, n: usize) -> usize {
        match self {
            SummMatrix::Rows { rows, .. } => rows
                .get(n.wrapping_sub(1))
                .and_then(|r| r.iter().map(|&(k, _)| k).max())
                .unwrap_or(0),
            SummMatrix::FirstColumn => 1,
            _ => n,
        }
    }

    /// Largest support over rows `1..=horizon`.
    pub fn max_support(&self, horizon: usize) -> usize {
        match self {
            SummMatrix::Rows { .. } => (1..=horizon).map(|n| self.support(n)).max().unwrap_or(0),
            SummMatrix::FirstColumn => 1.min(horizon),
            _ => horizon,
        }
    }

    /// `a_nk`.
    pub fn entry(&self, n: usize, k: usize) -> Result<f64> {
        self.check_rows(n)?;
        if n == 0 || k == 0 {
            return Ok(0.0);
        }
        Ok(match self {
            SummMatrix::Cesaro => {
                if k <= n {
                    1.0 / n as f64
                } else {
                    0.0
                }
            }
            SummMatrix::Identity => f64::from(u8::from(k == n)),
            SummMatrix::FirstColumn => f64::from(u8::from(k == 1)),
            SummMatrix::Block { set, weight } => {
                if k > n {
                    return Ok(0.0);
                }
                let hits = set.count_upto(n);
                if hits == 0 {
                    1.0 / n as f64
                } else {
                    let extra = if set.contains(k) { weight / hits as f64 } else { 0.0 };
                    (1.0 - weight) / n as f64 + extra
                }
            }
            SummMatrix::Rows { rows, .. } => rows[n - 1].iter().filter(|&&(c, _)| c == k).map(|&(_, a)| a).sum(),
        })
    }

    /// Partial densities `y_n = Σ_{k ∈ M} a_nk` for `n = 1..=horizon`, where
    /// `member[k - 1]` decides `k ∈ M`. `member` must cover
    /// [`SummMatrix::max_support`]`(horizon)`.
    pub fn density_partial_mask(&self, member: &[bool], horizon: usize) -> Result<Vec<f64>> {
        self.check_rows(horizon)?;
        let need = self.max_support(horizon);
        if member.len() < need {
            return Err(Error::HorizonTooLarge {
                horizon: need,
                len: member.len(),
            });
        }
        let mut prefix = Vec::with_capacity(need + 1);
        prefix.push(0usize);
        for &b in &member[..need] {
            prefix.push(prefix.last().unwrap() + usize::from(b));
        }
        let out = match self {
            SummMatrix::Cesaro => (1..=horizon).map(|n| prefix[n] as f64 / n as f64).collect(),
            SummMatrix::Identity => (1..=horizon).map(|n| f64::from(u8::from(member[n - 1]))).collect(),
            SummMatrix::FirstColumn => {
                let v = f64::from(u8::from(member.first().copied().unwrap_or(false)));
                vec![v; horizon]
            }
            SummMatrix::Block { set, weight } => {
                let mut hits = 0usize;
                let mut both = 0usize;
                (1..=horizon)
                    .map(|n| {
                        if set.contains(n) {
                            hits += 1;
                            both += usize::from(member[n - 1]);
                        }
                        let ces = prefix[n] as f64 / n as f64;
                        if hits == 0 {
                            ces
                        } else {
                            (1.0 - weight) * ces + weight * both as f64 / hits as f64
                        }
                    })
                    .collect()
            }
            SummMatrix::Rows { rows, .. } => rows[..horizon]
                .iter()
                .map(|row| row.iter().filter(|&&(k, _)| member[k - 1]).map(|&(_, a)| a).sum())
                .collect(),
        };
        Ok(out)
    }

    /// Partial densities of a declarative index set.
    pub fn density_partial(&self, set: &IndexSet, horizon: usize) -> Result<Vec<f64>> {
        self.check_rows(horizon)?;
        let member = set.indicator(self.max_support(horizon));
        self.density_partial_mask(&member, horizon)
    }

    /// Row sums `Σ_k a_nk` for `n = 1..=horizon`.
    pub fn row_sums(&self, horizon: usize) -> Result<Vec<f64>> {
        self.density_partial(&IndexSet::All, horizon)
    }
}

impl fmt::Display for SummMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `cesaro`, `identity`, `first-column`, `block:<set>:<weight>`,
/// `file:<path>`.
impl FromStr for SummMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "cesaro" | "c1" | "cesaro-1" => return Ok(SummMatrix::Cesaro),
            "identity" => return Ok(SummMatrix::Identity),
            "first-column" => return Ok(SummMatrix::FirstColumn),
            _ => {}
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Self::load(Path::new(path));
        }
        if let Some(rest) = s.strip_prefix("block:") {
            let (set, weight) = rest
                .rsplit_once(':')
                .ok_or_else(|| Error::Parse(format!("expected block:<set>:<weight>, got `{s}`")))?;
            let weight: f64 = weight
                .parse()
                .map_err(|_| Error::Parse(format!("bad block weight `{weight}`")))?;
            return Self::block(set.parse()?, weight);
        }
        Err(Error::Parse(format!("unknown matrix `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionResult {
    pub condition: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport {
    pub matrix: String,
    pub horizon: usize,
    pub tol: f64,
    pub conditions: Vec<ConditionResult>,
}

impl RegularityReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn get(&self, condition: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.condition == condition)
    }
}

/// Columns probed for the vanishing-column condition: powers of two up to
/// a quarter of the horizon, so each probed column has a long tail below it.
fn sampled_columns(horizon: usize) -> Vec<usize> {
    let cap = (horizon / 4).max(1);
    let mut cols: Vec<usize> = std::iter::successors(Some(1usize), |k| k.checked_mul(2))
        .take_while(|&k| k <= cap)
        .collect();
    for k in [3, 5, 7, 10, cap] {
        if k <= cap && !cols.contains(&k) {
            cols.push(k);
        }
    }
    cols.sort_unstable();
    cols
}

/// Finite-horizon Silverman–Toeplitz check on the tail window
/// `[horizon/2, horizon]`:
///
/// * `bounded-row-sums`: the running supremum of `Σ_k |a_nk|` does not grow
///   over the second half of the rows;
/// * `vanishing-columns`: `max_n a_nk ≤ tol` on the window for sampled `k`;
/// * `unit-row-sums`: `max_n |Σ_k a_nk - 1| ≤ tol` on the window.
///
/// Entries are non-negative, so absolute row sums equal row sums.
pub fn check_regularity(matrix: &SummMatrix, horizon: usize, tol: f64) -> Result<RegularityReport> {
    if horizon < 10 {
        return Err(Error::Parse(format!("regularity check needs horizon ≥ 10, got {horizon}")));
    }
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let sums = matrix.row_sums(horizon)?;
    let half = horizon / 2;
    let sup_all = sums.iter().copied().fold(0.0, f64::max);
    let sup_half = sums[..half].iter().copied().fold(0.0, f64::max);
    let growth = sup_all - sup_half;
    let bounded = ConditionResult {
        condition: "bounded-row-sums",
        passed: growth <= tol && sup_all.is_finite(),
        residual: growth,
        detail: format!("running sup {sup_all}"),
    };

    let mut worst_col = 0usize;
    let mut worst_entry = 0.0f64;
    for k in sampled_columns(horizon) {
        for n in half.max(1)..=horizon {
            let a = matrix.entry(n, k)?;
            if a > worst_entry {
                worst_entry = a;
                worst_col = k;
            }
        }
    }
    let columns = ConditionResult {
        condition: "vanishing-columns",
        passed: worst_entry <= tol,
        residual: worst_entry,
        detail: if worst_entry > 0.0 {
            format!("largest tail entry in column {worst_col}")
        } else {
            "all sampled tail entries are zero".into()
        },
    };

    let deviation = sums[half.max(1) - 1..]
        .iter()
        .map(|s| (s - 1.0).abs())
        .fold(0.0, f64::max);
    let unit = ConditionResult {
        condition: "unit-row-sums",
        passed: deviation <= tol,
        residual: deviation,
        detail: format!("row sum at n={horizon} is {}", sums[horizon - 1]),
    };

    Ok(RegularityReport {
        matrix: matrix.name(),
        horizon,
        tol,
        conditions: vec![bounded, columns, unit],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cesaro_and_identity_are_regular() {
        for m in [SummMatrix::Cesaro, SummMatrix::Identity] {
            let r = check_regularity(&m, 10_000, 2e-3).unwrap();
            assert!(r.all_passed(), "{r:?}");
        }
    }

    #[test]
    fn first_column_fails_vanishing_columns_only() {
        let r = check_regularity(&SummMatrix::FirstColumn, 1000, 1e-2).unwrap();
        assert!(r.get("bounded-row-sums").unwrap().passed);
        assert!(r.get("unit-row-sums").unwrap().passed);
        let c = r.get("vanishing-columns").unwrap();
        assert!(!c.passed);
        assert_eq!(c.residual, 1.0);
    }

    #[test]
    fn block_matrix_is_regular_but_slow() {
        let m = SummMatrix::block(IndexSet::Squares, 0.5).unwrap();
        let r = check_regularity(&m, 10_000, 1e-2).unwrap();
        assert!(r.all_passed(), "{r:?}");
    }

    #[test]
    fn cesaro_partial_densities() {
        let y = SummMatrix::Cesaro.density_partial(&IndexSet::Evens, 1000).unwrap();
        assert_abs_diff_eq!(y[999], 0.5, epsilon = 1e-3);
        let y = SummMatrix::Cesaro.density_partial(&IndexSet::finite(&[1, 2, 3]), 50).unwrap();
        for (i, v) in y.iter().enumerate().skip(2) {
            assert_abs_diff_eq!(*v, 3.0 / (i + 1) as f64, epsilon = 1e-15);
        }
        assert!(SummMatrix::Cesaro
            .density_partial(&IndexSet::All, 100)
            .unwrap()
            .iter()
            .all(|&v| v == 1.0));
    }

    #[test]
    fn block_matrix_gives_squares_positive_density() {
        let m = SummMatrix::block(IndexSet::Squares, 0.5).unwrap();
        let y = m.density_partial(&IndexSet::Squares, 10_000).unwrap();
        // 0.5 · 100/10⁴ + 0.5
        assert_abs_diff_eq!(y[9999], 0.505, epsilon = 1e-12);
    }

    #[test]
    fn partial_densities_match_entrywise_sums() {
        let m = SummMatrix::block(IndexSet::PowersOfTwo, 0.3).unwrap();
        let set = IndexSet::residues(3, &[1]);
        let y = m.density_partial(&set, 64).unwrap();
        for n in 1..=64 {
            let direct: f64 = (1..=n).filter(|&k| set.contains(k)).map(|k| m.entry(n, k).unwrap()).sum();
            assert_abs_diff_eq!(y[n - 1], direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn explicit_rows_stop_at_their_length() {
        let m = SummMatrix::from_rows("two", vec![vec![(1, 1.0)], vec![(1, 0.5), (2, 0.5)]]).unwrap();
        assert_eq!(m.density_partial(&IndexSet::Evens, 2).unwrap(), vec![0.0, 0.5]);
        assert!(matches!(
            m.density_partial(&IndexSet::Evens, 3),
            Err(Error::HorizonExceedsRows { rows: 2, horizon: 3, .. })
        ));
        assert!(SummMatrix::from_rows("neg", vec![vec![(1, -0.1)]]).is_err());
    }

    #[test]
    fn parse_matrices() {
        assert_eq!("cesaro".parse::<SummMatrix>().unwrap(), SummMatrix::Cesaro);
        assert_eq!(
            "block:mod:3:0:0.25".parse::<SummMatrix>().unwrap(),
            SummMatrix::Block {
                set: IndexSet::residues(3, &[0]),
                weight: 0.25
            }
        );
        assert!("block:squares:2".parse::<SummMatrix>().is_err());
        assert!("hilbert".parse::<SummMatrix>().is_err());
    }

    #[test]
    fn load_rows_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        std::fs::write(&path, r#"{"name": "tiny", "rows": [[[1, 1.0]], [[2, 1.0]]]}"#).unwrap();
        let m: SummMatrix = format!("file:{}", path.display()).parse().unwrap();
        assert_eq!(m.name(), "tiny");
        std::fs::write(&path, r#"{"rows": [], "extra": 1}"#).unwrap();
        assert!(SummMatrix::load(&path).is_err());
    }
}
