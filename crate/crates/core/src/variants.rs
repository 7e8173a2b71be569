//! End-to-end analyses of rating data.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::Serialize;

use crate::engine::{self, ScalingSolution, WeightModel, DEFAULT_DIMS};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::recode::{self, RatingMatrix, RecodedMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    /// Rank re-coding, row-wise doubled.
    #[serde(rename = "ds1")]
    Ds1,
    /// Rank re-coding analysed through the dominance table.
    #[serde(rename = "ds1e")]
    Ds1Dominance,
    /// Successive category re-coding, row-wise doubled.
    #[serde(rename = "ds2")]
    Ds2,
    /// Count re-coding, row-wise doubled.
    #[serde(rename = "ds3")]
    Ds3,
    /// Count re-coding, column-wise doubled.
    #[serde(rename = "car")]
    Car,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Ds1,
        Variant::Ds1Dominance,
        Variant::Ds2,
        Variant::Ds3,
        Variant::Car,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Ds1 => "ds1",
            Variant::Ds1Dominance => "ds1e",
            Variant::Ds2 => "ds2",
            Variant::Ds3 => "ds3",
            Variant::Car => "car",
        }
    }

    pub fn is_row_doubled(self) -> bool {
        matches!(self, Variant::Ds1 | Variant::Ds2 | Variant::Ds3)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown variant {s:?} (expected ds1, ds1e, ds2, ds3 or car)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VariantConfig {
    pub variant: Variant,
    pub k: usize,
    pub drop_degenerate: bool,
}

impl VariantConfig {
    pub fn new(variant: Variant) -> Self {
        VariantConfig {
            variant,
            k: DEFAULT_DIMS,
            drop_degenerate: false,
        }
    }

    pub fn with_dims(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_drop_degenerate(mut self, drop: bool) -> Self {
        self.drop_degenerate = drop;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Objects,
    Individuals,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointTag {
    Plain,
    /// Original scale direction of a doubled object.
    Plus,
    /// Reversed scale direction of a doubled object.
    Minus,
    /// Category boundary of successive category data.
    Boundary,
}

/// Coordinates for one side of the table with their interpretation.
#[derive(Debug, Clone)]
pub struct CoordinateView {
    pub role: Role,
    /// Whether the standard coordinates are optimal scaling values.
    pub optimal_scaling: bool,
    pub labels: Vec<String>,
    pub tags: Vec<PointTag>,
    pub standard: Matrix,
    pub principal: Matrix,
    /// Weights (margins) of the listed points.
    pub masses: Vec<f64>,
}

impl CoordinateView {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn rows_of(sol: &ScalingSolution, range: Range<usize>, labels: Vec<String>, optimal: bool) -> Self {
        let idx: Vec<usize> = range.collect();
        CoordinateView {
            role: Role::Individuals,
            optimal_scaling: optimal,
            tags: vec![PointTag::Plain; idx.len()],
            labels,
            standard: sol.row_standard.select_rows(&idx),
            principal: sol.row_principal.select_rows(&idx),
            masses: idx.iter().map(|&i| sol.weights.row_weights[i]).collect(),
        }
    }

    fn cols_of(sol: &ScalingSolution, tags: Vec<PointTag>, optimal: bool) -> Self {
        CoordinateView {
            role: Role::Objects,
            optimal_scaling: optimal,
            labels: sol.col_labels.clone(),
            tags,
            standard: sol.col_standard.clone(),
            principal: sol.col_principal.clone(),
            masses: sol.weights.col_weights.clone(),
        }
    }
}

/// Output of one analysis, with the full chain of intermediate tables.
#[derive(Debug, Clone)]
pub struct VariantResult {
    pub config: VariantConfig,
    /// Ratings actually analysed (after any degenerate removals).
    pub ratings: RatingMatrix,
    pub solution: ScalingSolution,
    pub recodings: Vec<RecodedMatrix>,
    pub objects_view: CoordinateView,
    pub individuals_view: CoordinateView,
    /// Rows of the solution holding the reversed-direction copy of each
    /// respondent, for row-doubled variants.
    pub mirrored_rows: Option<Range<usize>>,
    /// Labels removed under `drop_degenerate`.
    pub dropped: Vec<String>,
}

impl VariantResult {
    /// The analysed table (last entry of the recoding chain).
    pub fn analysed(&self) -> &RecodedMatrix {
        self.recodings.last().expect("non-empty recoding chain")
    }
}

pub fn run(r: &RatingMatrix, cfg: &VariantConfig) -> Result<VariantResult> {
    match cfg.variant {
        Variant::Ds1 => run_ds1(r, cfg),
        Variant::Ds1Dominance => run_ds1_dominance(r, cfg),
        Variant::Ds2 => run_ds2(r, cfg),
        Variant::Ds3 => run_ds3(r, cfg),
        Variant::Car => run_car(r, cfg),
    }
}

/// Ranks within respondents, row-doubled, margin weights.
pub fn run_ds1(r: &RatingMatrix, cfg: &VariantConfig) -> Result<VariantResult> {
    let (tstar, sstar) = recode::rank_rows(r);
    let fr = recode::double_rows(&tstar, &sstar)?;
    row_doubled(r.clone(), cfg, Variant::Ds1, vec![tstar, sstar], fr, Vec::new())
}

/// Ranks within respondents, dominance table, constant weights, no centring.
pub fn run_ds1_dominance(r: &RatingMatrix, cfg: &VariantConfig) -> Result<VariantResult> {
    let (tstar, sstar) = recode::rank_rows(r);
    let e = recode::dominance(&tstar, &sstar)?;
    let weights = WeightModel::fixed_diagonal(r.n(), r.p());
    let solution = engine::solve(e.data(), &weights, cfg.k)?.with_labels(e.row_labels(), e.col_labels());
    let objects_view = CoordinateView::cols_of(&solution, vec![PointTag::Plain; r.p()], true);
    let individuals_view = CoordinateView::rows_of(&solution, 0..r.n(), r.row_labels().to_vec(), false);
    Ok(VariantResult {
        config: VariantConfig {
            variant: Variant::Ds1Dominance,
            ..*cfg
        },
        ratings: r.clone(),
        solution,
        recodings: vec![tstar, sstar, e],
        objects_view,
        individuals_view,
        mirrored_rows: None,
        dropped: Vec::new(),
    })
}

/// Successive categories, row-doubled, margin weights. Boundaries receive
/// coordinates alongside the objects.
pub fn run_ds2(r: &RatingMatrix, cfg: &VariantConfig) -> Result<VariantResult> {
    let scd = recode::successive_categories(r);
    let (tstar, sstar) = recode::scd_to_rank_pair(&scd)?;
    let fr = recode::double_rows(&tstar, &sstar)?;
    row_doubled(
        r.clone(),
        cfg,
        Variant::Ds2,
        vec![scd, tstar, sstar],
        fr,
        Vec::new(),
    )
}

/// Counts `T`, row-doubled with `S`, margin weights.
pub fn run_ds3(r: &RatingMatrix, cfg: &VariantConfig) -> Result<VariantResult> {
    let (r, dropped) = if cfg.drop_degenerate {
        let keep: Vec<usize> = (0..r.n())
            .filter(|&i| !is_constant_extreme(r.row(i), r.q()))
            .collect();
        drop_rows(r, &keep)?
    } else {
        (r.clone(), Vec::new())
    };
    let t = recode::shift_counts(&r);
    let s = recode::reverse_counts(&t)?;
    let fr = recode::double_rows(&t, &s)?;
    row_doubled(r, cfg, Variant::Ds3, vec![t, s], fr, dropped)
}

/// Counts `T`, column-doubled with `S`, margin weights.
pub fn run_car(r: &RatingMatrix, cfg: &VariantConfig) -> Result<VariantResult> {
    let (r, dropped) = if cfg.drop_degenerate {
        let keep: Vec<usize> = (0..r.p())
            .filter(|&j| {
                let col: Vec<u32> = (0..r.n()).map(|i| r.get(i, j)).collect();
                !is_constant_extreme(&col, r.q())
            })
            .collect();
        if keep.len() == r.p() {
            (r.clone(), Vec::new())
        } else {
            let dropped = (0..r.p())
                .filter(|j| !keep.contains(j))
                .map(|j| r.col_labels()[j].clone())
                .collect();
            (r.select_cols(&keep)?, dropped)
        }
    } else {
        (r.clone(), Vec::new())
    };
    let t = recode::shift_counts(&r);
    let s = recode::reverse_counts(&t)?;
    let fc = recode::double_columns(&t, &s)?;
    let weights = engine::derive_weights(&fc)?;
    let solution = engine::solve(fc.data(), &weights, cfg.k)?.with_labels(fc.row_labels(), fc.col_labels());
    let p = r.p();
    let tags = std::iter::repeat_n(PointTag::Plus, p)
        .chain(std::iter::repeat_n(PointTag::Minus, p))
        .collect();
    let objects_view = CoordinateView::cols_of(&solution, tags, false);
    let individuals_view = CoordinateView::rows_of(&solution, 0..r.n(), r.row_labels().to_vec(), true);
    Ok(VariantResult {
        config: VariantConfig {
            variant: Variant::Car,
            ..*cfg
        },
        ratings: r,
        solution,
        recodings: vec![t, s, fc],
        objects_view,
        individuals_view,
        mirrored_rows: None,
        dropped,
    })
}

/// Every entry equal to 1 or every entry equal to q.
fn is_constant_extreme(values: &[u32], q: u32) -> bool {
    values.iter().all(|&x| x == 1) || values.iter().all(|&x| x == q)
}

fn drop_rows(r: &RatingMatrix, keep: &[usize]) -> Result<(RatingMatrix, Vec<String>)> {
    if keep.len() == r.n() {
        return Ok((r.clone(), Vec::new()));
    }
    let dropped = (0..r.n())
        .filter(|i| !keep.contains(i))
        .map(|i| r.row_labels()[i].clone())
        .collect();
    Ok((r.select_rows(keep)?, dropped))
}

fn row_doubled(
    r: RatingMatrix,
    cfg: &VariantConfig,
    variant: Variant,
    mut chain: Vec<RecodedMatrix>,
    fr: RecodedMatrix,
    dropped: Vec<String>,
) -> Result<VariantResult> {
    let weights = engine::derive_weights(&fr)?;
    let solution = engine::solve(fr.data(), &weights, cfg.k)?.with_labels(fr.row_labels(), fr.col_labels());
    let n = r.n();
    let tags = (0..fr.data().cols())
        .map(|j| {
            if j < r.p() {
                PointTag::Plain
            } else {
                PointTag::Boundary
            }
        })
        .collect();
    let objects_view = CoordinateView::cols_of(&solution, tags, true);
    let individuals_view = CoordinateView::rows_of(&solution, 0..n, r.row_labels().to_vec(), false);
    chain.push(fr);
    Ok(VariantResult {
        config: VariantConfig { variant, ..*cfg },
        ratings: r,
        solution,
        recodings: chain,
        objects_view,
        individuals_view,
        mirrored_rows: Some(n..2 * n),
        dropped,
    })
}

/// Mean rating of one object read off its doubled-pair axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanRating {
    pub label: String,
    pub plus_mass: f64,
    pub minus_mass: f64,
    /// Position of the origin along the segment from the `−` to the `+` point.
    pub t: f64,
    pub mean: f64,
}

/// For each object of a column-doubled analysis, `1 + (q-1) c+ / (c+ + c−)`.
pub fn estimate_mean_ratings(res: &VariantResult) -> Result<Vec<MeanRating>> {
    if res.config.variant != Variant::Car {
        return Err(Error::WrongVariant { expected: "car" });
    }
    let p = res.ratings.p();
    let q = f64::from(res.ratings.q());
    let masses = &res.solution.weights.col_weights;
    Ok((0..p)
        .map(|j| {
            let plus = masses[j];
            let minus = masses[j + p];
            let t = plus / (plus + minus);
            MeanRating {
                label: res.ratings.col_labels()[j].clone(),
                plus_mass: plus,
                minus_mass: minus,
                t,
                mean: 1.0 + (q - 1.0) * t,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> RatingMatrix {
        RatingMatrix::unlabeled(
            vec![vec![2, 4, 5], vec![3, 3, 1], vec![2, 1, 4], vec![1, 5, 3]],
            5,
        )
        .unwrap()
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("pca".parse::<Variant>().is_err());
    }

    #[test]
    fn fully_tied_respondents_are_degenerate_for_ds1() {
        let r = RatingMatrix::unlabeled(vec![vec![3, 3, 3], vec![1, 1, 1], vec![5, 5, 5]], 5).unwrap();
        let cfg = VariantConfig::new(Variant::Ds1);
        assert!(matches!(run_ds1(&r, &cfg), Err(Error::DegenerateSolution)));
    }

    #[test]
    fn tied_row_is_legal_for_dominance() {
        let r = RatingMatrix::unlabeled(
            vec![vec![3, 3, 3], vec![1, 2, 5], vec![4, 1, 2], vec![2, 5, 1]],
            5,
        )
        .unwrap();
        let res = run_ds1_dominance(&r, &VariantConfig::new(Variant::Ds1Dominance)).unwrap();
        assert_eq!(res.recodings[2].data().row(0), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn ds3_degenerate_respondent() {
        let r = RatingMatrix::unlabeled(
            vec![vec![1, 1, 1], vec![2, 4, 5], vec![3, 3, 1], vec![2, 1, 4]],
            5,
        )
        .unwrap();
        let cfg = VariantConfig::new(Variant::Ds3);
        match run_ds3(&r, &cfg) {
            Err(Error::DegenerateRow { labels, .. }) => assert_eq!(labels, vec!["ind_1+"]),
            other => panic!("unexpected {other:?}"),
        }
        let res = run_ds3(&r, &cfg.with_drop_degenerate(true)).unwrap();
        assert_eq!(res.dropped, vec!["ind_1"]);
        assert_eq!(res.individuals_view.len(), 3);
    }

    #[test]
    fn car_degenerate_object_dropped() {
        let r = RatingMatrix::unlabeled(
            vec![vec![2, 4, 5], vec![3, 3, 5], vec![2, 1, 5], vec![1, 5, 5]],
            5,
        )
        .unwrap();
        let cfg = VariantConfig::new(Variant::Car);
        assert!(matches!(run_car(&r, &cfg), Err(Error::DegenerateColumn { .. })));
        let res = run_car(&r, &cfg.with_drop_degenerate(true).with_dims(1)).unwrap();
        assert_eq!(res.dropped, vec!["obj_3"]);
        assert_eq!(res.objects_view.len(), 4);
        let means = estimate_mean_ratings(&res).unwrap();
        assert_eq!(means.len(), 2);
    }

    #[test]
    fn toy_mean_rating_of_first_object() {
        let res = run_car(&toy(), &VariantConfig::new(Variant::Car)).unwrap();
        let means = estimate_mean_ratings(&res).unwrap();
        assert_eq!(means[0].plus_mass, 4.0);
        assert_eq!(means[0].minus_mass, 12.0);
        assert_eq!(means[0].mean, 2.0);
        let ds3 = run_ds3(&toy(), &VariantConfig::new(Variant::Ds3)).unwrap();
        assert!(matches!(
            estimate_mean_ratings(&ds3),
            Err(Error::WrongVariant { .. })
        ));
    }

    #[test]
    fn views_have_expected_shapes() {
        let r = toy();
        let ds2 = run_ds2(&r, &VariantConfig::new(Variant::Ds2)).unwrap();
        assert_eq!(ds2.objects_view.len(), 3 + 4);
        assert_eq!(ds2.objects_view.tags[3], PointTag::Boundary);
        assert_eq!(ds2.individuals_view.len(), 4);
        assert_eq!(ds2.mirrored_rows, Some(4..8));
        let car = run_car(&r, &VariantConfig::new(Variant::Car)).unwrap();
        assert_eq!(car.objects_view.len(), 6);
        assert_eq!(car.objects_view.tags[4], PointTag::Minus);
        assert!(car.individuals_view.optimal_scaling);
        assert!(!car.objects_view.optimal_scaling);
    }
}
