//! Doppler null constraints on the signed weight vector `y = s o w`.
//!
//! A null of order `k` at Doppler `theta` means the polynomial
//! `Y(z) = sum_m y_m z^m` vanishes to order `k` at `z = exp(j theta)`.
//! The admissible `y` form the column space of the convolution matrix of
//! the annihilating polynomial; [`ConstraintBasis`] carries that matrix and
//! an orthonormal basis of its range.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{householder_full_q, phasor, symmetrize};
use crate::sequences::WindowTemplate;

/// A null of order `order` at `theta` (and, by realness, at `-theta`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DopplerNull {
    pub theta: f64,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NullSpec {
    /// Null order at zero Doppler.
    pub k0: usize,
    #[serde(default)]
    pub nulls: Vec<DopplerNull>,
}

impl NullSpec {
    pub fn zero_only(k0: usize) -> Self {
        Self { k0, nulls: vec![] }
    }

    pub fn with_null(mut self, theta: f64, order: usize) -> Self {
        self.nulls.push(DopplerNull { theta, order });
        self
    }

    /// `K = k0 + 2 * sum k_i`, the degree of the annihilator.
    pub fn total_order(&self) -> usize {
        self.k0 + 2 * self.nulls.iter().map(|n| n.order).sum::<usize>()
    }

    /// Checks angle ranges, orders, and `K <= m - 1`.
    pub fn validate(&self, m: usize) -> Result<()> {
        for (i, null) in self.nulls.iter().enumerate() {
            if !(null.theta > 0.0 && null.theta < PI) {
                return Err(Error::InvalidNullSpec(format!(
                    "null angle {} rad is outside the open interval (0, pi)",
                    null.theta
                )));
            }
            if null.order == 0 {
                return Err(Error::InvalidNullSpec(format!(
                    "null at {} rad has order 0",
                    null.theta
                )));
            }
            if self.nulls[..i].iter().any(|o| o.theta == null.theta) {
                return Err(Error::InvalidNullSpec(format!(
                    "null angle {} rad listed twice",
                    null.theta
                )));
            }
        }
        let total = self.total_order();
        if m == 0 || total > m - 1 {
            return Err(Error::NullOrderTooHigh { total, m });
        }
        Ok(())
    }
}

/// Which quadratic factor represents a null pair at `+-theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorForm {
    /// `1 - 2 z cos(theta) + z^2`, roots exactly at `exp(+-j theta)`.
    #[default]
    Exact,
    /// `1 - z cos(theta) + z^2` as literally printed in the source
    /// derivation; its roots sit at `arccos(cos(theta) / 2)`.
    Legacy,
}

impl FactorForm {
    /// Linear coefficient `c` of the factor `1 + c z + z^2`.
    fn linear_coeff(self, theta: f64) -> f64 {
        match self {
            FactorForm::Exact => -2.0 * theta.cos(),
            FactorForm::Legacy => -theta.cos(),
        }
    }

    /// Angle on the unit circle where the factor actually vanishes.
    pub fn root_angle(self, theta: f64) -> f64 {
        match self {
            FactorForm::Exact => theta,
            FactorForm::Legacy => (theta.cos() / 2.0).acos(),
        }
    }
}

/// Root angles with multiplicities: `(0, k0)` first, then one entry per null.
pub fn root_angles(spec: &NullSpec, form: FactorForm) -> Vec<(f64, usize)> {
    let mut out = Vec::with_capacity(1 + spec.nulls.len());
    if spec.k0 > 0 {
        out.push((0.0, spec.k0));
    }
    out.extend(
        spec.nulls
            .iter()
            .map(|n| (form.root_angle(n.theta), n.order)),
    );
    out
}

/// Linear convolution of two coefficient sequences.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `(1 - z)^k0 * prod_i (1 + c_i z + z^2)^k_i`, lowest power first.
pub fn annihilator_coeffs(spec: &NullSpec, form: FactorForm) -> Vec<f64> {
    let mut a = vec![1.0];
    for _ in 0..spec.k0 {
        a = convolve(&a, &[1.0, -1.0]);
    }
    for null in &spec.nulls {
        let c = form.linear_coeff(null.theta);
        for _ in 0..null.order {
            a = convolve(&a, &[1.0, c, 1.0]);
        }
    }
    a
}

/// `m x (m - K)` Toeplitz matrix with first column `[a, 0...]` and first row `[a_0, 0...]`.
pub fn toeplitz_convolution(a: &[f64], m: usize) -> Result<DMatrix<f64>> {
    if a.is_empty() || a.len() > m {
        return Err(Error::NullOrderTooHigh {
            total: a.len().saturating_sub(1),
            m,
        });
    }
    let cols = m + 1 - a.len();
    Ok(DMatrix::from_fn(m, cols, |i, j| {
        if i >= j && i - j < a.len() {
            a[i - j]
        } else {
            0.0
        }
    }))
}

/// Orthonormal discrete polynomials of degree `0..degree` on `0..m`.
///
/// Arnoldi on the diagonal matrix of centered sample positions, with two
/// passes of Gram-Schmidt per step.
fn discrete_polynomials(m: usize, degree: usize) -> Vec<DVector<f64>> {
    let scale = if m > 1 { (m - 1) as f64 } else { 1.0 };
    let x = DVector::from_fn(m, |i, _| (2.0 * i as f64 - (m as f64 - 1.0)) / scale);
    let mut basis = Vec::with_capacity(degree);
    if degree == 0 {
        return basis;
    }
    basis.push(DVector::from_element(m, 1.0 / (m as f64).sqrt()));
    while basis.len() < degree.min(m) {
        let mut v = x.component_mul(basis.last().unwrap());
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
            }
        }
        let norm = v.norm();
        v /= norm;
        basis.push(v);
    }
    basis
}

/// The linear null functionals, one real vector per constraint.
///
/// For a root angle `phi` of order `k`, the functionals are
/// `g_p(m) cos(phi m)` and `g_p(m) sin(phi m)` for `p < k` (only the cosine
/// family at `phi = 0`), where `g_p` are discrete orthonormal polynomials.
/// They span the same space as the moment conditions
/// `sum_m m^p y_m exp(j phi m) = 0` but are well conditioned.
fn null_functionals(spec: &NullSpec, form: FactorForm, m: usize) -> DMatrix<f64> {
    let roots = root_angles(spec, form);
    let degree = roots.iter().map(|&(_, k)| k).max().unwrap_or(0);
    let polys = discrete_polynomials(m, degree);
    let total = spec.total_order();
    let mut w = DMatrix::zeros(m, total);
    let mut col = 0;
    for &(phi, k) in &roots {
        if phi == 0.0 {
            for poly in polys.iter().take(k) {
                w.set_column(col, poly);
                col += 1;
            }
        } else {
            for parts in [0usize, 1] {
                for poly in polys.iter().take(k) {
                    for i in 0..m {
                        let z = phasor(phi, i);
                        let trig = if parts == 0 { z.re } else { z.im };
                        w[(i, col)] = poly[i] * trig;
                    }
                    col += 1;
                }
            }
        }
    }
    debug_assert_eq!(col, total);
    w
}

/// Convolution matrix of the annihilator together with an orthonormal basis
/// of its range.
#[derive(Debug, Clone)]
pub struct ConstraintBasis {
    a: Vec<f64>,
    toeplitz: DMatrix<f64>,
    orthonormal: DMatrix<f64>,
    m: usize,
}

/// Generic construction from raw coefficients: Householder QR of `A`.
///
/// Fine for low-order annihilators. High-order nulls make `A` badly
/// conditioned; use [`ConstraintBasis::for_spec`] there.
pub fn constraint_basis(a: &[f64], m: usize) -> Result<ConstraintBasis> {
    let toeplitz = toeplitz_convolution(a, m)?;
    let cols = toeplitz.ncols();
    let q = householder_full_q(&toeplitz);
    let orthonormal = q.columns(0, cols).clone_owned();
    Ok(ConstraintBasis {
        a: a.to_vec(),
        toeplitz,
        orthonormal,
        m,
    })
}

impl ConstraintBasis {
    /// Builds the basis as the orthogonal complement of the null functionals.
    ///
    /// Every functional lies in the removed subspace to working precision,
    /// so `y = Abar b` meets the null conditions to roundoff regardless of
    /// how ill-conditioned `A` itself is.
    pub fn for_spec(spec: &NullSpec, m: usize, form: FactorForm) -> Result<Self> {
        spec.validate(m)?;
        let a = annihilator_coeffs(spec, form);
        let toeplitz = toeplitz_convolution(&a, m)?;
        let total = spec.total_order();
        let orthonormal = if total == 0 {
            DMatrix::identity(m, m)
        } else {
            let w = null_functionals(spec, form, m);
            let q = householder_full_q(&w);
            q.columns(total, m - total).clone_owned()
        };
        Ok(Self {
            a,
            toeplitz,
            orthonormal,
            m,
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.a
    }

    /// `A`, the Toeplitz convolution matrix.
    pub fn toeplitz(&self) -> &DMatrix<f64> {
        &self.toeplitz
    }

    /// `Abar`, orthonormal columns spanning `range(A)`.
    pub fn orthonormal(&self) -> &DMatrix<f64> {
        &self.orthonormal
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Dimension of the free coefficient vector, `M - K`.
    pub fn dim(&self) -> usize {
        self.orthonormal.ncols()
    }

    /// `max |Abar^T Abar - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.orthonormal.transpose() * &self.orthonormal;
        (g - DMatrix::identity(self.dim(), self.dim())).amax()
    }

    /// Largest relative residual of a column of `A` after projection onto `range(Abar)`.
    pub fn span_residual(&self) -> f64 {
        self.toeplitz
            .column_iter()
            .map(|col| {
                let proj = &self.orthonormal * (self.orthonormal.transpose() * col);
                (col - proj).norm() / col.norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `Atilde = D Abar Abar^T D` with `D = Diag(window)`.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    matrix: DMatrix<f64>,
}

impl QuadraticForm {
    /// Wraps an arbitrary matrix; symmetry is checked by the solver.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "quadratic form must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `s^T Atilde s`.
    pub fn evaluate(&self, s: &[i8]) -> f64 {
        let n = self.dim();
        let mut total = 0.0;
        for i in 0..n {
            let row: f64 = s[..n]
                .iter()
                .enumerate()
                .map(|(j, &sj)| self.matrix[(i, j)] * f64::from(sj))
                .sum();
            total += f64::from(s[i]) * row;
        }
        total
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            matrix: &self.matrix * c,
        }
    }
}

pub fn quadratic_form(basis: &ConstraintBasis, window: &WindowTemplate) -> Result<QuadraticForm> {
    if window.len() != basis.m() {
        return Err(Error::Dimension(format!(
            "window length {} does not match pulse count {}",
            window.len(),
            basis.m()
        )));
    }
    let d = DVector::from_column_slice(window.values());
    let mut weighted = basis.orthonormal().clone();
    for (i, mut row) in weighted.row_iter_mut().enumerate() {
        row *= d[i];
    }
    let mut matrix = &weighted * weighted.transpose();
    symmetrize(&mut matrix);
    Ok(QuadraticForm { matrix })
}

/// One scaled Hermite condition of the divisibility test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullResidual {
    pub angle: f64,
    pub derivative: usize,
    /// `|sum_m (m / M)^p y_m exp(j angle m)|`.
    pub value: f64,
}

/// Residuals of every condition `Y^(p)(exp(j phi)) = 0`, `p < k`, in scaled
/// moment form.
///
/// `Y(z)` is divisible by the annihilator iff all of these vanish. They
/// measure the remainder in a basis that stays well conditioned for
/// high-order nulls, where monomial long division amplifies roundoff.
pub fn null_residuals(y: &[f64], spec: &NullSpec, form: FactorForm) -> Vec<NullResidual> {
    let m = y.len();
    let mut out = Vec::new();
    for (phi, k) in root_angles(spec, form) {
        for p in 0..k {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &v) in y.iter().enumerate() {
                let t = (i as f64 / m as f64).powi(p as i32);
                acc += phasor(phi, i) * (t * v);
            }
            out.push(NullResidual {
                angle: phi,
                derivative: p,
                value: acc.norm(),
            });
        }
    }
    out
}

pub fn max_null_residual(y: &[f64], spec: &NullSpec, form: FactorForm) -> f64 {
    null_residuals(y, spec, form)
        .iter()
        .map(|r| r.value)
        .fold(0.0, f64::max)
}

/// Tolerance for [`max_null_residual`]: `1e-8 * M`.
pub fn null_tolerance(m: usize) -> f64 {
    1e-8 * m as f64
}
