//! Re-codings of rating data into non-negative tables.
//!
//! All values produced here are integers or halves, so they are exact in
//! binary floating point and can be compared with `==`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const PLUS: &str = "+";
pub const MINUS: &str = "\u{2212}";

/// `n x p` integer ratings on a `1..=q` scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingMatrix {
    n: usize,
    p: usize,
    q: u32,
    ratings: Vec<u32>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl RatingMatrix {
    pub fn new(
        rows: Vec<Vec<u32>>,
        q: u32,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if q < 2 {
            return Err(Error::InvalidMatrix(format!(
                "scale maximum must be at least 2, got {q}"
            )));
        }
        if n < 2 || p < 2 {
            return Err(Error::InvalidMatrix(format!(
                "need at least 2 respondents and 2 objects, got {n}x{p}"
            )));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::InvalidMatrix(format!(
                "row {i} has {} ratings, expected {p}",
                rows[i].len()
            )));
        }
        if row_labels.len() != n || col_labels.len() != p {
            return Err(Error::InvalidMatrix(format!(
                "{} row labels and {} column labels for a {n}x{p} matrix",
                row_labels.len(),
                col_labels.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &value) in row.iter().enumerate() {
                if value < 1 || value > q {
                    return Err(Error::RatingOutOfRange {
                        row: i,
                        col: j,
                        value: value.into(),
                        q,
                    });
                }
            }
        }
        Ok(RatingMatrix {
            n,
            p,
            q,
            ratings: rows.into_iter().flatten().collect(),
            row_labels,
            col_labels,
        })
    }

    /// Ratings with generated labels `ind_1..` and `obj_1..`.
    pub fn unlabeled(rows: Vec<Vec<u32>>, q: u32) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        Self::new(rows, q, generated_labels("ind", n), generated_labels("obj", p))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.ratings[i * self.p + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.ratings[i * self.p..(i + 1) * self.p]
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column_mean(&self, j: usize) -> f64 {
        let total: u32 = (0..self.n).map(|i| self.get(i, j)).sum();
        f64::from(total) / self.n as f64
    }

    /// Keeps only the listed respondents, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let rows = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        let labels = idx.iter().map(|&i| self.row_labels[i].clone()).collect();
        Self::new(rows, self.q, labels, self.col_labels.clone())
    }

    /// Keeps only the listed objects, in the given order.
    pub fn select_cols(&self, idx: &[usize]) -> Result<Self> {
        let rows = (0..self.n)
            .map(|i| idx.iter().map(|&j| self.get(i, j)).collect())
            .collect();
        let labels = idx.iter().map(|&j| self.col_labels[j].clone()).collect();
        Self::new(rows, self.q, self.row_labels.clone(), labels)
    }

    /// Ratings as reals, without any shift.
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.n, self.p, |i, j| f64::from(self.get(i, j)))
    }
}

pub(crate) fn generated_labels(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}_{i}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecodingKind {
    /// `T = R - 1`
    ShiftedCounts,
    /// `S = (q - 1) - T`
    ReversedCounts,
    /// `T*`, zero-based within-row midranks
    RankOrder,
    /// `S*`
    ReversedRankOrder,
    /// `R_SCD`, joint ranks of ratings and category boundaries
    SuccessiveCategory,
    /// `E = T* - S*`
    Dominance,
    /// `F_r`, top block stacked over its reversal
    RowDoubled,
    /// `F_c = [T | S]`
    ColumnDoubled,
}

impl RecodingKind {
    pub fn symbol(self) -> &'static str {
        match self {
            RecodingKind::ShiftedCounts => "T",
            RecodingKind::ReversedCounts => "S",
            RecodingKind::RankOrder => "T*",
            RecodingKind::ReversedRankOrder => "S*",
            RecodingKind::SuccessiveCategory => "R_SCD",
            RecodingKind::Dominance => "E",
            RecodingKind::RowDoubled => "F_r",
            RecodingKind::ColumnDoubled => "F_c",
        }
    }
}

/// A re-coded table together with the ratings it came from.
#[derive(Debug, Clone)]
pub struct RecodedMatrix {
    data: Matrix,
    kind: RecodingKind,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    origin: Arc<RatingMatrix>,
}

impl RecodedMatrix {
    fn build(
        data: Matrix,
        kind: RecodingKind,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        origin: Arc<RatingMatrix>,
    ) -> Self {
        debug_assert_eq!(data.rows(), row_labels.len());
        debug_assert_eq!(data.cols(), col_labels.len());
        debug_assert!(kind == RecodingKind::Dominance || data.as_slice().iter().all(|&x| x >= 0.0));
        RecodedMatrix {
            data,
            kind,
            row_labels,
            col_labels,
            origin,
        }
    }

    pub fn data(&self) -> &Matrix {
        &self.data
    }

    pub fn kind(&self) -> RecodingKind {
        self.kind
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn origin(&self) -> &RatingMatrix {
        &self.origin
    }

    fn same_source(&self, other: &RecodedMatrix) -> bool {
        (Arc::ptr_eq(&self.origin, &other.origin) || self.origin == other.origin)
            && self.data.shape() == other.data.shape()
    }
}

fn expect_kind(m: &RecodedMatrix, kind: RecodingKind) -> Result<()> {
    if m.kind == kind {
        Ok(())
    } else {
        Err(Error::MismatchedRecodings(format!(
            "expected {}, got {}",
            kind.symbol(),
            m.kind.symbol()
        )))
    }
}

fn check_pair(a: &RecodedMatrix, b: &RecodedMatrix) -> Result<()> {
    if a.same_source(b) {
        Ok(())
    } else {
        Err(Error::MismatchedRecodings(format!(
            "{} ({}x{}) and {} ({}x{}) do not come from the same ratings",
            a.kind.symbol(),
            a.data.rows(),
            a.data.cols(),
            b.kind.symbol(),
            b.data.rows(),
            b.data.cols()
        )))
    }
}

/// `T = R - 1`: the number of scale points below each rating.
pub fn shift_counts(r: &RatingMatrix) -> RecodedMatrix {
    let data = Matrix::from_fn(r.n, r.p, |i, j| f64::from(r.get(i, j) - 1));
    RecodedMatrix::build(
        data,
        RecodingKind::ShiftedCounts,
        r.row_labels.clone(),
        r.col_labels.clone(),
        Arc::new(r.clone()),
    )
}

/// `S = (q - 1) - T`.
pub fn reverse_counts(t: &RecodedMatrix) -> Result<RecodedMatrix> {
    expect_kind(t, RecodingKind::ShiftedCounts)?;
    let top = f64::from(t.origin.q - 1);
    Ok(RecodedMatrix::build(
        t.data.map(|x| top - x),
        RecodingKind::ReversedCounts,
        t.row_labels.clone(),
        t.col_labels.clone(),
        t.origin.clone(),
    ))
}

/// `F_c = [T | S]`, labels suffixed `+` and `−`.
pub fn double_columns(t: &RecodedMatrix, s: &RecodedMatrix) -> Result<RecodedMatrix> {
    expect_kind(t, RecodingKind::ShiftedCounts)?;
    expect_kind(s, RecodingKind::ReversedCounts)?;
    check_pair(t, s)?;
    let cols = suffixed(&t.col_labels, PLUS)
        .chain(suffixed(&s.col_labels, MINUS))
        .collect();
    Ok(RecodedMatrix::build(
        t.data.hstack(&s.data),
        RecodingKind::ColumnDoubled,
        t.row_labels.clone(),
        cols,
        t.origin.clone(),
    ))
}

/// `F_r = [top; bottom]`, labels suffixed `+` and `−`.
///
/// Accepts `(T, S)` and `(T*, S*)` pairs, the latter also in successive
/// category form.
pub fn double_rows(top: &RecodedMatrix, bottom: &RecodedMatrix) -> Result<RecodedMatrix> {
    use RecodingKind::*;
    match (top.kind, bottom.kind) {
        (ShiftedCounts, ReversedCounts) | (RankOrder, ReversedRankOrder) => {}
        (a, b) => {
            return Err(Error::MismatchedRecodings(format!(
                "cannot row-double {} over {}",
                a.symbol(),
                b.symbol()
            )))
        }
    }
    check_pair(top, bottom)?;
    let rows = suffixed(&top.row_labels, PLUS)
        .chain(suffixed(&bottom.row_labels, MINUS))
        .collect();
    Ok(RecodedMatrix::build(
        top.data.vstack(&bottom.data),
        RowDoubled,
        rows,
        top.col_labels.clone(),
        top.origin.clone(),
    ))
}

fn suffixed<'a>(labels: &'a [String], suffix: &'a str) -> impl Iterator<Item = String> + 'a {
    labels.iter().map(move |l| format!("{l}{suffix}"))
}

/// Ascending one-based ranks; tied values share the mean of the ranks they span.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Within-row ranks `T*` (zero-based midranks) and their reversal `S* = (p - 1) - T*`.
pub fn rank_rows(r: &RatingMatrix) -> (RecodedMatrix, RecodedMatrix) {
    let origin = Arc::new(r.clone());
    let mut data = Vec::with_capacity(r.n * r.p);
    for i in 0..r.n {
        let row: Vec<f64> = r.row(i).iter().map(|&x| f64::from(x)).collect();
        data.extend(midranks(&row).into_iter().map(|x| x - 1.0));
    }
    let tstar = Matrix::new(r.n, r.p, data).expect("finite ranks");
    let top = (r.p - 1) as f64;
    let sstar = tstar.map(|x| top - x);
    (
        RecodedMatrix::build(
            tstar,
            RecodingKind::RankOrder,
            r.row_labels.clone(),
            r.col_labels.clone(),
            origin.clone(),
        ),
        RecodedMatrix::build(
            sstar,
            RecodingKind::ReversedRankOrder,
            r.row_labels.clone(),
            r.col_labels.clone(),
            origin,
        ),
    )
}

/// `E = T* - S*`; rows sum to zero.
pub fn dominance(tstar: &RecodedMatrix, sstar: &RecodedMatrix) -> Result<RecodedMatrix> {
    expect_kind(tstar, RecodingKind::RankOrder)?;
    expect_kind(sstar, RecodingKind::ReversedRankOrder)?;
    check_pair(tstar, sstar)?;
    Ok(RecodedMatrix::build(
        tstar.data.zip_with(&sstar.data, |a, b| a - b),
        RecodingKind::Dominance,
        tstar.row_labels.clone(),
        tstar.col_labels.clone(),
        tstar.origin.clone(),
    ))
}

/// Value assigned to the boundary between scale points `k` and `k + 1`.
pub fn boundary_value(k: u32) -> f64 {
    f64::from(k) + 0.5
}

pub fn boundary_label(k: u32) -> String {
    format!("b{}", boundary_value(k))
}

/// Joint one-based midranks of each respondent's ratings and the `q - 1`
/// category boundaries. Objects come first, boundaries after.
pub fn successive_categories(r: &RatingMatrix) -> RecodedMatrix {
    let m = r.p + r.q as usize - 1;
    let mut data = Vec::with_capacity(r.n * m);
    for i in 0..r.n {
        let joint: Vec<f64> = r
            .row(i)
            .iter()
            .map(|&x| f64::from(x))
            .chain((1..r.q).map(boundary_value))
            .collect();
        data.extend(midranks(&joint));
    }
    let mut cols = r.col_labels.clone();
    cols.extend((1..r.q).map(boundary_label));
    RecodedMatrix::build(
        Matrix::new(r.n, m, data).expect("finite ranks"),
        RecodingKind::SuccessiveCategory,
        r.row_labels.clone(),
        cols,
        Arc::new(r.clone()),
    )
}

/// Turns successive category ranks into the rank pair `T*_SCD = R_SCD - 1`,
/// `S*_SCD = (m - 1) - T*_SCD` with `m = p + q - 1`.
pub fn scd_to_rank_pair(scd: &RecodedMatrix) -> Result<(RecodedMatrix, RecodedMatrix)> {
    expect_kind(scd, RecodingKind::SuccessiveCategory)?;
    let top = (scd.data.cols() - 1) as f64;
    let tstar = scd.data.map(|x| x - 1.0);
    let sstar = tstar.map(|x| top - x);
    Ok((
        RecodedMatrix::build(
            tstar,
            RecodingKind::RankOrder,
            scd.row_labels.clone(),
            scd.col_labels.clone(),
            scd.origin.clone(),
        ),
        RecodedMatrix::build(
            sstar,
            RecodingKind::ReversedRankOrder,
            scd.row_labels.clone(),
            scd.col_labels.clone(),
            scd.origin.clone(),
        ),
    ))
}

/// Maps every rating `r` to `q + 1 - r`.
pub fn reverse_scale(r: &RatingMatrix) -> RatingMatrix {
    RatingMatrix {
        ratings: r.ratings.iter().map(|&x| r.q + 1 - x).collect(),
        ..r.clone()
    }
}
