#![allow(dead_code)]

use nalgebra::DMatrix;
use ndarray::ArrayView2;

pub fn to_na(m: ArrayView2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

/// Σ rrᵀ + λI assembled directly with nalgebra.
pub fn regularized_gram(dim: usize, rows: &[Vec<f64>], lambda: f64) -> DMatrix<f64> {
    let mut g = DMatrix::<f64>::identity(dim, dim) * lambda;
    for r in rows {
        let v = nalgebra::DVector::from_column_slice(r);
        g += &v * v.transpose();
    }
    g
}

pub fn quad(m_inv: &DMatrix<f64>, v: &[f64]) -> f64 {
    let v = nalgebra::DVector::from_column_slice(v);
    (v.transpose() * m_inv * &v)[(0, 0)]
}

pub fn rel_fro(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn unit(d: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[k] = 1.0;
    v
}
