//! Transmit-order / receive-weight design.
//!
//! [`design_nm_drcw`] chains the null constraints, the partitioning SDP,
//! Gaussian hyperplane rounding, and closed-form amplitude recovery. The
//! PTM, binomial, and uniform baselines are closed-form.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen_desc;
use crate::nullspec::{quadratic_form, ConstraintBasis, FactorForm, NullSpec, QuadraticForm};
use crate::sdp::{solve_partition_sdp, SdpOptions, SdpSolution};
use crate::sequences::{binomial_weights, ptm_order, standard_order, WindowKind, WindowTemplate};

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_MU: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NmDrcw,
    Ptm,
    Bd,
    Uniform,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::NmDrcw => "nm_drcw",
            Method::Ptm => "ptm",
            Method::Bd => "bd",
            Method::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    /// `s^T Atilde s` of the rounded sign vector.
    pub rounded_objective: Option<f64>,
    /// `tr(Atilde S)` of the SDP solution.
    pub sdp_bound: Option<f64>,
    /// Dual objective of the SDP, a certified upper bound.
    pub dual_bound: Option<f64>,
    pub sdp_iterations: Option<usize>,
    /// Null structure the design satisfies.
    pub null_spec: NullSpec,
    pub factor_form: FactorForm,
    pub window: Option<WindowKind>,
    pub rank_one_shortcut: bool,
    /// Negative eigenvalues of the SDP solution were clamped before factoring.
    pub clamped_eigenvalues: bool,
}

impl Provenance {
    fn closed_form(null_spec: NullSpec) -> Self {
        Self {
            seed: None,
            trials: None,
            rounded_objective: None,
            sdp_bound: None,
            dual_bound: None,
            sdp_iterations: None,
            null_spec,
            factor_form: FactorForm::Exact,
            window: None,
            rank_one_shortcut: false,
            clamped_eigenvalues: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    pub transmit_order: Vec<i8>,
    pub weights: Vec<f64>,
    /// `transmit_order o weights`.
    pub y: Vec<f64>,
    pub method: Method,
    pub provenance: Provenance,
}

impl DesignResult {
    pub fn m(&self) -> usize {
        self.y.len()
    }

    fn from_order_and_weights(
        transmit_order: Vec<i8>,
        weights: Vec<f64>,
        method: Method,
        provenance: Provenance,
    ) -> Self {
        let y = transmit_order
            .iter()
            .zip(&weights)
            .map(|(&s, &w)| f64::from(s) * w)
            .collect();
        Self {
            transmit_order,
            weights,
            y,
            method,
            provenance,
        }
    }

    /// Splits `y` into `sign(y)` (`+1` at zeros) and `|y|`.
    pub fn from_signed(y: Vec<f64>, method: Method, provenance: Provenance) -> Self {
        let transmit_order = y.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect();
        let weights = y.iter().map(|v| v.abs()).collect();
        Self {
            transmit_order,
            weights,
            y,
            method,
            provenance,
        }
    }
}

/// Output of [`round_solution`].
#[derive(Debug, Clone, PartialEq)]
pub struct Rounding {
    pub signs: Vec<i8>,
    pub objective: f64,
    pub rank_one: bool,
    pub clamped: bool,
    /// Trial that produced `signs`; `None` for the rank-one shortcut.
    pub best_trial: Option<usize>,
}

fn sign_vector(v: impl Iterator<Item = f64>) -> Vec<i8> {
    v.map(|x| if x < 0.0 { -1 } else { 1 }).collect()
}

/// Per-trial generator: stream `trial` of the master seed.
fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Extracts a sign vector from an SDP solution.
///
/// Numerically rank-one solutions (`lambda_0 / sum_{i>0} lambda_i >= mu`)
/// return the sign of the leading eigenvector. Otherwise `S = V V^T` is
/// factored and `trials` random hyperplanes `sign(V r)` are scored by
/// `s^T Atilde s`; the best wins, ties going to the lowest trial index.
pub fn round_solution(
    solution: &SdpSolution,
    form: &QuadraticForm,
    trials: usize,
    seed: u64,
    mu: f64,
) -> Result<Rounding> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let n = form.dim();
    if solution.s_matrix.nrows() != n {
        return Err(Error::Dimension(format!(
            "SDP solution is {}x{}, quadratic form is {n}x{n}",
            solution.s_matrix.nrows(),
            solution.s_matrix.ncols()
        )));
    }
    let eig = symmetric_eigen_desc(&solution.s_matrix);
    let lead = eig.values[0].max(0.0);
    let floor = -1e-8 * lead.max(1.0);
    let clamped = eig.values.iter().any(|&l| l < floor);
    let rest: f64 = eig.values[1..].iter().map(|l| l.max(0.0)).sum();

    if rest == 0.0 || lead / rest >= mu {
        let signs = sign_vector(eig.vectors.column(0).iter().copied());
        let objective = form.evaluate(&signs);
        return Ok(Rounding {
            signs,
            objective,
            rank_one: true,
            clamped,
            best_trial: None,
        });
    }

    let mut factor = eig.vectors.clone();
    for (j, mut col) in factor.column_iter_mut().enumerate() {
        col *= eig.values[j].max(0.0).sqrt();
    }

    let mut best: Option<(usize, Vec<i8>, f64)> = None;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let r = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let candidate = sign_vector((&factor * r).iter().copied());
        let value = form.evaluate(&candidate);
        if best.as_ref().is_none_or(|(_, _, v)| value > *v) {
            best = Some((trial, candidate, value));
        }
    }
    let (trial, signs, objective) = best.expect("trials > 0");
    Ok(Rounding {
        signs,
        objective,
        rank_one: false,
        clamped,
        best_trial: Some(trial),
    })
}

/// `b = alpha Abar^T D s` with `alpha` chosen so `||b||^2 = M`, and `y = Abar b`.
pub fn recover_amplitudes(
    signs: &[i8],
    basis: &ConstraintBasis,
    window: &WindowTemplate,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = basis.m();
    if signs.len() != m || window.len() != m {
        return Err(Error::Dimension(format!(
            "sign vector {} / window {} / basis {m}",
            signs.len(),
            window.len()
        )));
    }
    let weighted = DVector::from_fn(m, |i, _| window.values()[i] * f64::from(signs[i]));
    let u = basis.orthonormal().transpose() * weighted;
    let norm = u.norm();
    let wmax = window.values().iter().fold(0.0f64, |a, &v| a.max(v));
    if norm <= 1e-12 * wmax * (m as f64).sqrt() {
        return Err(Error::Degenerate(
            "window-weighted sign vector is orthogonal to the admissible subspace".into(),
        ));
    }
    let b = u * ((m as f64).sqrt() / norm);
    let y = basis.orthonormal() * &b;
    Ok((b.iter().copied().collect(), y.iter().copied().collect()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmDrcwConfig {
    pub trials: usize,
    pub seed: u64,
    pub mu: f64,
    pub sdp: SdpOptions,
    pub factor_form: FactorForm,
}

impl Default for NmDrcwConfig {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            seed: 0,
            mu: DEFAULT_MU,
            sdp: SdpOptions::default(),
            factor_form: FactorForm::Exact,
        }
    }
}

/// Everything [`design_nm_drcw_detailed`] computes on the way.
#[derive(Debug, Clone)]
pub struct NmDrcwRun {
    pub design: DesignResult,
    pub basis: ConstraintBasis,
    pub form: QuadraticForm,
    pub sdp: SdpSolution,
    pub rounding: Rounding,
    pub b: Vec<f64>,
}

pub fn design_nm_drcw(
    m: usize,
    spec: &NullSpec,
    window: &WindowTemplate,
    config: &NmDrcwConfig,
) -> Result<DesignResult> {
    design_nm_drcw_detailed(m, spec, window, config).map(|run| run.design)
}

pub fn design_nm_drcw_detailed(
    m: usize,
    spec: &NullSpec,
    window: &WindowTemplate,
    config: &NmDrcwConfig,
) -> Result<NmDrcwRun> {
    spec.validate(m)?;
    if window.len() != m {
        return Err(Error::Dimension(format!(
            "window length {} does not match pulse count {m}",
            window.len()
        )));
    }
    let basis = ConstraintBasis::for_spec(spec, m, config.factor_form)?;
    let form = quadratic_form(&basis, window)?;
    let sdp = solve_partition_sdp(&form, &config.sdp)?;
    let rounding = round_solution(&sdp, &form, config.trials, config.seed, config.mu)?;
    let (b, y) = recover_amplitudes(&rounding.signs, &basis, window)?;
    let provenance = Provenance {
        seed: Some(config.seed),
        trials: Some(config.trials),
        rounded_objective: Some(rounding.objective),
        sdp_bound: Some(sdp.objective),
        dual_bound: Some(sdp.residuals.dual_bound),
        sdp_iterations: Some(sdp.iterations),
        null_spec: spec.clone(),
        factor_form: config.factor_form,
        window: Some(window.kind()),
        rank_one_shortcut: rounding.rank_one,
        clamped_eigenvalues: rounding.clamped,
    };
    let design = DesignResult::from_signed(y, Method::NmDrcw, provenance);
    Ok(NmDrcwRun {
        design,
        basis,
        form,
        sdp,
        rounding,
        b,
    })
}

/// PTM transmit order with unit weights; `log2(m)`-order null at zero Doppler.
pub fn design_ptm(m: usize) -> Result<DesignResult> {
    let order = ptm_order(m)?;
    let k0 = m.trailing_zeros() as usize;
    Ok(DesignResult::from_order_and_weights(
        order,
        vec![1.0; m],
        Method::Ptm,
        Provenance::closed_form(NullSpec::zero_only(k0)),
    ))
}

/// Standard order with binomial weights; `(m-1)`-order null at zero Doppler.
pub fn design_bd(m: usize) -> Result<DesignResult> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "pulse count must be positive".into(),
        ));
    }
    Ok(DesignResult::from_order_and_weights(
        standard_order(m),
        binomial_weights(m),
        Method::Bd,
        Provenance::closed_form(NullSpec::zero_only(m - 1)),
    ))
}

/// Standard order, unit weights.
pub fn design_uniform(m: usize) -> Result<DesignResult> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "pulse count must be positive".into(),
        ));
    }
    let k0 = usize::from(m.is_multiple_of(2));
    Ok(DesignResult::from_order_and_weights(
        standard_order(m),
        vec![1.0; m],
        Method::Uniform,
        Provenance::closed_form(NullSpec::zero_only(k0)),
    ))
}
