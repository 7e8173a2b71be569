#![allow(dead_code)]

use dsrating::Matrix;
use serde_json::Value;

pub fn oracle() -> Value {
    serde_json::from_str(include_str!("../fixtures/oracle.json")).unwrap()
}

pub fn matrix_from_json(v: &Value) -> Matrix {
    let rows: Vec<Vec<f64>> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            r.as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap())
                .collect()
        })
        .collect();
    Matrix::from_rows(&rows)
}

pub fn vec_from_json(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

/// Largest element-wise difference after flipping each column of `b` to
/// best match the corresponding column of `a`.
pub fn max_diff_up_to_sign(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let mut worst = 0.0f64;
    for j in 0..a.cols() {
        let (ca, cb) = (a.column(j), b.column(j));
        let dot: f64 = ca.iter().zip(&cb).map(|(x, y)| x * y).sum();
        let s = if dot < 0.0 { -1.0 } else { 1.0 };
        for (x, y) in ca.iter().zip(&cb) {
            worst = worst.max((x - s * y).abs());
        }
    }
    worst
}

pub fn max_vec_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `A^T diag(w) A`
pub fn weighted_gram(a: &Matrix, w: &[f64]) -> Matrix {
    a.transpose().matmul(&a.scale_rows(w))
}
