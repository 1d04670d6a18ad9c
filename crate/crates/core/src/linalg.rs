//! Dense helpers shared by the constraint, solver, and rounding code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// `exp(j * theta * index)`.
///
/// Every Doppler phase ramp in the crate goes through here so that null
/// constraints and CAF evaluation see bit-identical phasors.
#[inline]
pub fn phasor(theta: f64, index: usize) -> Complex64 {
    let (s, c) = (theta * index as f64).sin_cos();
    Complex64::new(c, s)
}

/// Full orthogonal factor `Q` (rows x rows) of a Householder QR of `w`.
///
/// The first `w.ncols()` columns span `range(w)`; the rest span its
/// orthogonal complement.
pub fn householder_full_q(w: &DMatrix<f64>) -> DMatrix<f64> {
    let (rows, cols) = w.shape();
    let mut r = w.clone();
    let mut reflectors: Vec<DVector<f64>> = Vec::with_capacity(cols);
    for j in 0..cols.min(rows) {
        let x = r.view((j, j), (rows - j, 1)).clone_owned();
        let norm = x.norm();
        let mut v = DVector::zeros(rows - j);
        v.copy_from(&x.column(0));
        if norm == 0.0 {
            reflectors.push(DVector::zeros(rows - j));
            continue;
        }
        let alpha = if x[(0, 0)] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vnorm = v.norm();
        if vnorm == 0.0 {
            reflectors.push(DVector::zeros(rows - j));
            continue;
        }
        v /= vnorm;
        // R[j.., j..] -= 2 v (v^T R[j.., j..])
        let mut block = r.view_mut((j, j), (rows - j, cols - j));
        let proj = v.transpose() * &block;
        block -= (&v * proj) * 2.0;
        reflectors.push(v);
    }
    let mut q = DMatrix::<f64>::identity(rows, rows);
    for (j, v) in reflectors.iter().enumerate().rev() {
        if v.iter().all(|&e| e == 0.0) {
            continue;
        }
        let mut block = q.view_mut((j, 0), (rows - j, rows));
        let proj = v.transpose() * &block;
        block -= (v * proj) * 2.0;
    }
    q
}

/// Eigenpairs of a symmetric matrix, eigenvalues sorted in descending order.
pub struct SortedEigen {
    pub values: Vec<f64>,
    /// Column `i` pairs with `values[i]`.
    pub vectors: DMatrix<f64>,
}

pub fn symmetric_eigen_desc(a: &DMatrix<f64>) -> SortedEigen {
    let n = a.nrows();
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps the decomposition deterministic on ties.
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    SortedEigen { values, vectors }
}

/// Largest `|a_ij - a_ji|`.
pub fn symmetry_deviation(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            dev = dev.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    dev
}

pub fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

/// Largest absolute entry, the scale used for relative tolerances.
pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}
