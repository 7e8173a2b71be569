//! Weighted SVD shared by every analysis.
//!
//! With margin weights `r`, `c` and total `s` of a table `F`, the solution is
//! the SVD `D_r^{-1/2} (F - r c^T / s) D_c^{-1/2} = U Λ V^T`. Standard
//! coordinates are `X = D_r^{-1/2} U_k`, `Y = D_c^{-1/2} V_k` and principal
//! coordinates `G = X Λ_k`, `H = Y Λ_k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{scale_rows_cols, svd, Matrix};
use crate::recode::{RecodedMatrix, RecodingKind};

/// Relative cut below which singular values count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

pub const DEFAULT_DIMS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    MarginDerived,
    FixedDiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    MarginCentering,
    NoCentering,
}

/// Diagonal row and column weights plus the grand total.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightModel {
    pub mode: WeightMode,
    pub row_weights: Vec<f64>,
    pub col_weights: Vec<f64>,
    pub total: f64,
    pub centering: Centering,
}

impl WeightModel {
    /// Margins of a non-negative table. Zero margins are reported by label.
    pub fn from_margins(f: &Matrix, row_labels: &[String], col_labels: &[String]) -> Result<Self> {
        let row_weights = f.row_sums();
        let col_weights = f.col_sums();
        let zero_rows: Vec<usize> = zero_positions(&row_weights);
        if !zero_rows.is_empty() {
            return Err(Error::DegenerateRow {
                labels: pick(row_labels, &zero_rows),
                indices: zero_rows,
            });
        }
        let zero_cols: Vec<usize> = zero_positions(&col_weights);
        if !zero_cols.is_empty() {
            return Err(Error::DegenerateColumn {
                labels: pick(col_labels, &zero_cols),
                indices: zero_cols,
            });
        }
        Ok(WeightModel {
            mode: WeightMode::MarginDerived,
            total: row_weights.iter().sum(),
            row_weights,
            col_weights,
            centering: Centering::MarginCentering,
        })
    }

    /// Constant weights `p(p-1)` for rows and `n(p-1)` for columns, used with
    /// dominance tables whose margins vanish.
    pub fn fixed_diagonal(n: usize, p: usize) -> Self {
        let pm1 = (p - 1) as f64;
        let row = p as f64 * pm1;
        WeightModel {
            mode: WeightMode::FixedDiagonal,
            row_weights: vec![row; n],
            col_weights: vec![n as f64 * pm1; p],
            total: n as f64 * row,
            centering: Centering::NoCentering,
        }
    }
}

fn zero_positions(sums: &[f64]) -> Vec<usize> {
    sums.iter()
        .enumerate()
        .filter(|(_, &x)| x <= 0.0)
        .map(|(i, _)| i)
        .collect()
}

fn pick(labels: &[String], idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| labels[i].clone()).collect()
}

/// Margin-derived weights for a re-coded table.
pub fn derive_weights(f: &RecodedMatrix) -> Result<WeightModel> {
    if f.kind() == RecodingKind::Dominance {
        return Err(Error::UnsupportedKind(f.kind()));
    }
    WeightModel::from_margins(f.data(), f.row_labels(), f.col_labels())
}

/// Explained-variance proportions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Explained {
    pub per_dimension: Vec<f64>,
    pub cumulative: Vec<f64>,
}

/// Squared-singular-value shares over all non-zero singular values.
pub fn explained_from_singular_values(singular_values: &[f64]) -> Result<Explained> {
    let cut = rank_cut(singular_values);
    let squares: Vec<f64> = singular_values
        .iter()
        .filter(|&&s| s > cut)
        .map(|s| s * s)
        .collect();
    if squares.is_empty() {
        return Err(Error::DegenerateSolution);
    }
    let total: f64 = squares.iter().sum();
    let per_dimension: Vec<f64> = squares.iter().map(|x| x / total).collect();
    let cumulative = per_dimension
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    Ok(Explained {
        per_dimension,
        cumulative,
    })
}

fn rank_cut(singular_values: &[f64]) -> f64 {
    let largest = singular_values.iter().cloned().fold(0.0, f64::max);
    RANK_TOLERANCE * largest.max(1.0)
}

/// Result of [`solve`].
#[derive(Debug, Clone)]
pub struct ScalingSolution {
    /// Non-zero singular values of the centred, scaled table.
    pub singular_values: Vec<f64>,
    /// X
    pub row_standard: Matrix,
    /// Y
    pub col_standard: Matrix,
    /// G
    pub row_principal: Matrix,
    /// H
    pub col_principal: Matrix,
    pub explained: Vec<f64>,
    pub cumulative_explained: Vec<f64>,
    pub k: usize,
    pub weights: WeightModel,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl ScalingSolution {
    pub fn with_labels(mut self, rows: &[String], cols: &[String]) -> Self {
        assert_eq!(rows.len(), self.row_standard.rows());
        assert_eq!(cols.len(), self.col_standard.rows());
        self.row_labels = rows.to_vec();
        self.col_labels = cols.to_vec();
        self
    }

    /// Numerical rank of the analysed table.
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }
}

/// `F - r c^T / s` for margin centring, `F` itself otherwise.
pub fn centered(f: &Matrix, w: &WeightModel) -> Matrix {
    match w.centering {
        Centering::NoCentering => f.clone(),
        Centering::MarginCentering => Matrix::from_fn(f.rows(), f.cols(), |i, j| {
            f[(i, j)] - w.row_weights[i] * w.col_weights[j] / w.total
        }),
    }
}

/// Decomposes `f` under weights `w` and keeps `k` dimensions.
pub fn solve(f: &Matrix, w: &WeightModel, k: usize) -> Result<ScalingSolution> {
    if w.row_weights.len() != f.rows() || w.col_weights.len() != f.cols() {
        return Err(Error::InvalidMatrix(format!(
            "weights of length {}/{} do not match a {}x{} table",
            w.row_weights.len(),
            w.col_weights.len(),
            f.rows(),
            f.cols()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidMatrix("at least one dimension is required".into()));
    }
    let scaled = scale_rows_cols(&centered(f, w), &w.row_weights, &w.col_weights)?;
    let dec = svd(&scaled)?;

    let cut = rank_cut(&dec.singular_values);
    let rank = dec.singular_values.iter().take_while(|&&s| s > cut).count();
    if rank == 0 {
        return Err(Error::DegenerateSolution);
    }
    if k > rank {
        return Err(Error::RankExceeded {
            requested: k,
            actual_rank: rank,
        });
    }

    let singular_values = dec.singular_values[..rank].to_vec();
    let explained = explained_from_singular_values(&singular_values)?;
    let inv_sqrt = |ws: &[f64]| -> Vec<f64> { ws.iter().map(|x| x.sqrt().recip()).collect() };
    let row_standard = dec
        .left_vectors
        .leading_cols(k)
        .scale_rows(&inv_sqrt(&w.row_weights));
    let col_standard = dec
        .right_vectors
        .leading_cols(k)
        .scale_rows(&inv_sqrt(&w.col_weights));
    let lambda = &singular_values[..k];

    Ok(ScalingSolution {
        row_principal: row_standard.scale_cols(lambda),
        col_principal: col_standard.scale_cols(lambda),
        row_standard,
        col_standard,
        explained: explained.per_dimension,
        cumulative_explained: explained.cumulative,
        k,
        weights: w.clone(),
        row_labels: crate::recode::generated_labels("row", f.rows()),
        col_labels: crate::recode::generated_labels("col", f.cols()),
        singular_values,
    })
}

pub fn explained_variance(sol: &ScalingSolution) -> Result<Explained> {
    explained_from_singular_values(&sol.singular_values)
}
