//! Unit-diagonal SDP relaxation of the two-way partitioning problem:
//!
//! ```text
//! primal:  max tr(C X)   s.t. diag(X) = 1, X psd
//! dual:    min sum(y)    s.t. Z = Diag(y) - C psd
//! ```
//!
//! Solved with a primal-dual path-following interior-point method. The
//! iterates stay strictly feasible on both sides, so `sum(y)` is a certified
//! upper bound at every step and `sum(y) - tr(C X) = tr(X Z)` is the gap.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, symmetric_eigen_desc, symmetrize, symmetry_deviation};
use crate::nullspec::QuadraticForm;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpOptions {
    /// Relative duality gap at which the solve stops, in `(0, 1e-2]`.
    pub tol: f64,
    pub max_iter: usize,
    /// Record one [`IterationRecord`] per iteration.
    pub trace: bool,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpResiduals {
    /// `max_j |S_jj - 1|`.
    pub diag_deviation: f64,
    pub min_eigenvalue: f64,
    /// `(dual - primal) / max(|dual|, max|C|)`.
    pub relative_gap: f64,
    /// Dual objective `sum(y)`, an upper bound on the relaxation optimum.
    pub dual_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub primal: f64,
    pub dual: f64,
    pub relative_gap: f64,
    pub mu: f64,
    pub primal_step: f64,
    pub dual_step: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub s_matrix: DMatrix<f64>,
    /// `tr(C S)`.
    pub objective: f64,
    pub residuals: SdpResiduals,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
}

impl SdpSolution {
    fn finish(
        c: &DMatrix<f64>,
        x: DMatrix<f64>,
        dual: f64,
        iterations: usize,
        trace: Vec<IterationRecord>,
    ) -> Self {
        let objective = c.component_mul(&x).sum();
        let diag_deviation = x
            .diagonal()
            .iter()
            .map(|d| (d - 1.0).abs())
            .fold(0.0, f64::max);
        let min_eigenvalue = symmetric_eigen_desc(&x)
            .values
            .last()
            .copied()
            .unwrap_or(0.0);
        let relative_gap = relative_gap(dual, objective, max_abs(c));
        Self {
            s_matrix: x,
            objective,
            residuals: SdpResiduals {
                diag_deviation,
                min_eigenvalue,
                relative_gap,
                dual_bound: dual,
            },
            iterations,
            trace,
        }
    }
}

fn relative_gap(dual: f64, primal: f64, scale: f64) -> f64 {
    let denom = dual.abs().max(scale);
    if denom == 0.0 {
        0.0
    } else {
        (dual - primal) / denom
    }
}

/// Largest step in `(0, 1]` keeping `base + step * dir` positive definite,
/// found by backtracking with factor 0.8 and pulled back by 5% when short.
fn step_length(base: &DMatrix<f64>, dir: &DMatrix<f64>) -> f64 {
    let mut alpha = 1.0;
    for _ in 0..200 {
        if Cholesky::new(base + dir * alpha).is_some() {
            return if alpha < 1.0 { 0.95 * alpha } else { alpha };
        }
        alpha *= 0.8;
    }
    0.0
}

pub fn solve_partition_sdp(form: &QuadraticForm, options: &SdpOptions) -> Result<SdpSolution> {
    if !(options.tol > 0.0 && options.tol <= 1e-2) {
        return Err(Error::InvalidParameter(format!(
            "tol must lie in (0, 1e-2], got {}",
            options.tol
        )));
    }
    if options.max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be positive".into()));
    }
    let mut c = form.matrix().clone();
    let n = c.nrows();
    let scale = max_abs(&c);
    let deviation = symmetry_deviation(&c);
    if deviation > 1e-8 * scale {
        return Err(Error::NotSymmetric { deviation });
    }
    symmetrize(&mut c);

    let mut x = DMatrix::<f64>::identity(n, n);
    if scale == 0.0 {
        return Ok(SdpSolution::finish(&c, x, 0.0, 0, vec![]));
    }

    // Strictly diagonally dominant start, so Z is positive definite.
    let mut y = DVector::from_fn(n, |i, _| 1.1 * c.row(i).abs().sum() + 0.1 * scale);
    let mut z = DMatrix::from_diagonal(&y) - &c;
    let ones = DVector::from_element(n, 1.0);
    let mut mu = x.component_mul(&z).sum() / (2.0 * n as f64);
    let mut trace = Vec::new();

    for iteration in 1..=options.max_iter {
        let dual = y.sum();
        let primal = c.component_mul(&x).sum();
        if relative_gap(dual, primal, scale) <= options.tol {
            return Ok(SdpSolution::finish(&c, x, dual, iteration - 1, trace));
        }

        let stalled = |x: DMatrix<f64>, trace: Vec<IterationRecord>| Error::SdpNotConverged {
            best: Box::new(SdpSolution::finish(&c, x, dual, iteration - 1, trace)),
        };

        let Some(z_chol) = Cholesky::new(z.clone()) else {
            return Err(stalled(x, trace));
        };
        let mut z_inv = z_chol.inverse();
        symmetrize(&mut z_inv);

        // Schur complement of the diagonal constraints: (Z^-1 o X) dy = mu diag(Z^-1) - 1.
        let schur = z_inv.component_mul(&x);
        let rhs = z_inv.diagonal() * mu - &ones;
        let Some(schur_chol) = Cholesky::<f64, Dyn>::new(schur) else {
            return Err(stalled(x, trace));
        };
        let dy = schur_chol.solve(&rhs);

        let mut dx = -(&z_inv * DMatrix::from_diagonal(&dy) * &x) + &z_inv * mu - &x;
        symmetrize(&mut dx);
        let dz = DMatrix::from_diagonal(&dy);

        let alpha_p = step_length(&x, &dx);
        let alpha_d = step_length(&z, &dz);
        if alpha_p == 0.0 && alpha_d == 0.0 {
            return Err(stalled(x, trace));
        }
        x += &dx * alpha_p;
        y += &dy * alpha_d;
        z += &dz * alpha_d;

        mu = x.component_mul(&z).sum() / (2.0 * n as f64);
        if alpha_p + alpha_d > 1.6 {
            mu *= 0.5;
        }
        if alpha_p + alpha_d > 1.9 {
            mu /= 5.0;
        }

        if options.trace {
            let dual = y.sum();
            let primal = c.component_mul(&x).sum();
            trace.push(IterationRecord {
                iteration,
                primal,
                dual,
                relative_gap: relative_gap(dual, primal, scale),
                mu,
                primal_step: alpha_p,
                dual_step: alpha_d,
            });
        }
    }

    let dual = y.sum();
    let primal = c.component_mul(&x).sum();
    if relative_gap(dual, primal, scale) <= options.tol {
        return Ok(SdpSolution::finish(&c, x, dual, options.max_iter, trace));
    }
    Err(Error::SdpNotConverged {
        best: Box::new(SdpSolution::finish(&c, x, dual, options.max_iter, trace)),
    })
}
