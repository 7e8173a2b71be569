mod common;

use common::*;
use dsrating::data::builtin;
use dsrating::engine::{self, centered, solve, WeightModel};
use dsrating::matrix::svd;
use dsrating::recode::{self, RatingMatrix};
use dsrating::variants::{self, Variant, VariantConfig, VariantResult};
use dsrating::Matrix;
use proptest::prelude::*;

fn run(r: &RatingMatrix, v: Variant) -> VariantResult {
    variants::run(r, &VariantConfig::new(v)).unwrap()
}

fn identity_gap(m: &Matrix) -> f64 {
    m.max_abs_diff(&Matrix::identity(m.rows()))
}

#[test]
fn toy_car_matches_oracle() {
    let o = &oracle()["toy_car"];
    let res = run(&builtin("toy").unwrap(), Variant::Car);
    let sol = &res.solution;
    assert!(max_vec_diff(&sol.singular_values, &vec_from_json(&o["singular_values"])) < 1e-8);
    for (name, got) in [
        ("row_standard", &sol.row_standard),
        ("col_standard", &sol.col_standard),
        ("row_principal", &sol.row_principal),
        ("col_principal", &sol.col_principal),
    ] {
        let want = matrix_from_json(&o[name]);
        assert!(max_diff_up_to_sign(&want, got) < 1e-8, "{name}");
    }
}

fn check_solution(res: &VariantResult) {
    let sol = &res.solution;
    let w = &sol.weights;
    assert!(identity_gap(&weighted_gram(&sol.row_standard, &w.row_weights)) < 1e-8);
    assert!(identity_gap(&weighted_gram(&sol.col_standard, &w.col_weights)) < 1e-8);
    let lambda = &sol.singular_values[..sol.k];
    assert!(
        sol.row_standard
            .scale_cols(lambda)
            .max_abs_diff(&sol.row_principal)
            < 1e-10
    );
    assert!(
        sol.col_standard
            .scale_cols(lambda)
            .max_abs_diff(&sol.col_principal)
            < 1e-10
    );
    let inv: Vec<f64> = w.row_weights.iter().map(|x| 1.0 / x).collect();
    let g = centered(res.analysed().data(), w)
        .scale_rows(&inv)
        .matmul(&sol.col_standard);
    assert!(g.max_abs_diff(&sol.row_principal) < 1e-8);
    let total: f64 = sol.explained.iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn margin_weighted_solutions_are_consistent() {
    for (name, v) in [
        ("toy", Variant::Ds1),
        ("toy", Variant::Ds2),
        ("toy", Variant::Ds3),
        ("toy", Variant::Car),
        ("crimes", Variant::Ds3),
        ("crimes_no_homicide", Variant::Ds1),
        ("crimes_no_homicide", Variant::Ds2),
        ("crimes_no_homicide", Variant::Car),
    ] {
        check_solution(&run(&builtin(name).unwrap(), v));
    }
}

#[test]
fn doubled_pairs_balance_at_origin() {
    for name in ["toy", "crimes_no_homicide"] {
        let res = run(&builtin(name).unwrap(), Variant::Car);
        let p = res.ratings.p();
        let c = &res.solution.weights.col_weights;
        let h = &res.solution.col_principal;
        for j in 0..p {
            for d in 0..res.solution.k {
                let centroid = c[j] * h[(j, d)] + c[j + p] * h[(j + p, d)];
                assert!(centroid.abs() < 1e-8, "{name} object {j}");
            }
        }
    }
}

#[test]
fn ranking_and_dominance_paths_agree() {
    for name in ["toy", "crimes_no_homicide", "crimes"] {
        let r = builtin(name).unwrap();
        let a = run(&r, Variant::Ds1);
        let b = run(&r, Variant::Ds1Dominance);
        let diff = max_diff_up_to_sign(&a.solution.col_standard, &b.solution.col_standard);
        assert!(diff < 1e-8, "{name}: {diff}");
        assert!(max_vec_diff(&a.solution.singular_values, &b.solution.singular_values) < 1e-8);
    }
}

#[test]
fn dominance_singular_values_are_rescaled_svd() {
    let r = builtin("crimes_no_homicide").unwrap();
    let res = run(&r, Variant::Ds1Dominance);
    let (n, p) = (r.n() as f64, r.p() as f64);
    let scale = 1.0 / (p * (p - 1.0) * n * (p - 1.0)).sqrt();
    let raw = svd(res.analysed().data()).unwrap().singular_values;
    let want: Vec<f64> = raw[..res.solution.rank()].iter().map(|s| s * scale).collect();
    assert!(max_vec_diff(&res.solution.singular_values, &want) < 1e-12);
}

#[test]
fn mirrored_block_for_ranked_variants() {
    for name in ["toy", "crimes_no_homicide"] {
        for v in [Variant::Ds1, Variant::Ds2] {
            let res = run(&builtin(name).unwrap(), v);
            let x = &res.solution.row_standard;
            let n = res.ratings.n();
            for i in 0..n {
                for d in 0..res.solution.k {
                    assert!((x[(i + n, d)] + x[(i, d)]).abs() < 1e-8, "{name} {v} row {i}");
                }
            }
        }
    }
}

#[test]
fn count_doubling_mirrors_with_mass_weights() {
    for name in ["toy", "crimes"] {
        let res = run(&builtin(name).unwrap(), Variant::Ds3);
        let x = &res.solution.row_standard;
        let r = &res.solution.weights.row_weights;
        let n = res.ratings.n();
        for i in 0..n {
            for d in 0..res.solution.k {
                assert!((r[i] * x[(i, d)] + r[i + n] * x[(i + n, d)]).abs() < 1e-8);
            }
        }
    }
}

/// Largest difference between `a` and `b` with rows of `b` reindexed by
/// `perm` and columns flipped to best agree.
fn diff_permuted(a: &Matrix, b: &Matrix, perm: &[usize]) -> f64 {
    max_diff_up_to_sign(a, &b.select_rows(perm))
}

#[test]
fn reversing_the_scale_swaps_directions() {
    for name in ["toy", "crimes_no_homicide"] {
        let r = builtin(name).unwrap();
        let rev = recode::reverse_scale(&r);

        let a = run(&r, Variant::Ds3);
        let b = run(&rev, Variant::Ds3);
        let n = r.n();
        let swap: Vec<usize> = (n..2 * n).chain(0..n).collect();
        assert!(max_vec_diff(&a.solution.singular_values, &b.solution.singular_values) < 1e-10);
        assert!(diff_permuted(&a.solution.row_standard, &b.solution.row_standard, &swap) < 1e-8);
        assert!(max_diff_up_to_sign(&a.solution.col_standard, &b.solution.col_standard) < 1e-8);

        let a = run(&r, Variant::Car);
        let b = run(&rev, Variant::Car);
        let p = r.p();
        let swap: Vec<usize> = (p..2 * p).chain(0..p).collect();
        assert!(max_vec_diff(&a.solution.singular_values, &b.solution.singular_values) < 1e-10);
        assert!(diff_permuted(&a.solution.col_standard, &b.solution.col_standard, &swap) < 1e-8);
        assert!(max_diff_up_to_sign(&a.solution.row_standard, &b.solution.row_standard) < 1e-8);
    }
}

#[test]
fn zero_margin_in_a_table_is_reported() {
    let f = Matrix::from_rows(&[[1.0, 2.0, 0.0], [3.0, 1.0, 0.0]]);
    let rows = vec!["a".to_string(), "b".to_string()];
    let cols = vec!["x".to_string(), "y".to_string(), "z".to_string()];
    let err = WeightModel::from_margins(&f, &rows, &cols).unwrap_err();
    assert_eq!(err.name(), "DegenerateColumn");
    assert!(err.to_string().contains('z'));
}

/// Random ratings that `v` can analyse in at least two dimensions.
fn rating_matrix(n: usize, p: usize, q: u32, v: Variant) -> impl Strategy<Value = RatingMatrix> {
    proptest::collection::vec(proptest::collection::vec(1..=q, p), n).prop_filter_map(
        "needs variation",
        move |rows| {
            let r = RatingMatrix::unlabeled(rows, q).ok()?;
            let res = variants::run(&r, &VariantConfig::new(v)).ok()?;
            (res.solution.rank() >= 2).then_some(r)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_car_solutions_are_consistent(r in rating_matrix(6, 4, 5, Variant::Car)) {
        let res = run(&r, Variant::Car);
        check_solution(&res);
    }

    #[test]
    fn respondent_order_does_not_matter(r in rating_matrix(6, 4, 5, Variant::Car), seed in 0usize..720) {
        let mut perm: Vec<usize> = (0..r.n()).collect();
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            perm.swap(i, s % (i + 1));
            s /= i + 1;
        }
        let shuffled = r.select_rows(&perm).unwrap();
        let a = run(&r, Variant::Car);
        let b = run(&shuffled, Variant::Car);
        prop_assert!(max_vec_diff(&a.solution.singular_values, &b.solution.singular_values) < 1e-10);
        let gap = max_diff_up_to_sign(&a.solution.row_standard.select_rows(&perm), &b.solution.row_standard);
        // near-equal leading singular values leave the basis ambiguous
        let sv = &a.solution.singular_values;
        if sv.windows(2).take(2).all(|w| w[0] - w[1] > 1e-6) {
            prop_assert!(gap < 1e-6, "gap {}", gap);
        }
    }

    #[test]
    fn explained_shares_sum_to_one(r in rating_matrix(5, 3, 4, Variant::Ds3)) {
        let res = run(&r, Variant::Ds3);
        let e = engine::explained_variance(&res.solution).unwrap();
        prop_assert!((e.cumulative.last().unwrap() - 1.0).abs() < 1e-12);
        prop_assert!(e.per_dimension.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn solve_ignores_weight_scale(r in rating_matrix(5, 3, 4, Variant::Car), factor in 0.5f64..4.0) {
        let res = run(&r, Variant::Car);
        let f = res.analysed().data().map(|x| x * factor);
        let w = WeightModel::from_margins(&f, res.analysed().row_labels(), res.analysed().col_labels()).unwrap();
        let sol = solve(&f, &w, 2).unwrap();
        prop_assert!(max_vec_diff(&sol.singular_values, &res.solution.singular_values) < 1e-9);
    }
}
