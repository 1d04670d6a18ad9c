//! Versioned JSON document describing one design and its metrics.

use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, AnalysisOptions, MetricsReport, PrslNorm, Rsba};
use crate::design::{DesignResult, Method, Provenance};
use crate::error::{Error, Result};
use crate::nullspec::{max_null_residual, null_tolerance, FactorForm, NullSpec};
use crate::sequences::{generate_golay_pair, WindowKind};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSettings {
    pub grid_points: usize,
    pub prsl_norm: PrslNorm,
    pub threshold_db: f64,
}

impl From<AnalysisSettings> for AnalysisOptions {
    fn from(s: AnalysisSettings) -> Self {
        AnalysisOptions {
            grid_points: s.grid_points,
            prsl_norm: s.prsl_norm,
            threshold_db: s.threshold_db,
        }
    }
}

impl From<AnalysisOptions> for AnalysisSettings {
    fn from(o: AnalysisOptions) -> Self {
        AnalysisSettings {
            grid_points: o.grid_points,
            prsl_norm: o.prsl_norm,
            threshold_db: o.threshold_db,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignDocument {
    pub schema_version: u32,
    pub method: Method,
    pub m: usize,
    /// Golay sequence length.
    pub n: usize,
    pub null_spec: NullSpec,
    pub factor_form: FactorForm,
    pub window: Option<WindowKind>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub s: Vec<i8>,
    pub w: Vec<f64>,
    /// Rounded objective `s^T Atilde s`.
    pub objective: Option<f64>,
    /// SDP relaxation value `tr(Atilde S)`.
    pub sdp_bound: Option<f64>,
    pub analysis: AnalysisSettings,
    pub metrics: MetricsReport,
}

impl DesignDocument {
    pub fn from_design(design: &DesignResult, n: usize, options: &AnalysisOptions) -> Result<Self> {
        let pair = generate_golay_pair(n)?;
        let report = analyze(design, &pair, options)?;
        let p = &design.provenance;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            method: design.method,
            m: design.m(),
            n,
            null_spec: p.null_spec.clone(),
            factor_form: p.factor_form,
            window: p.window,
            seed: p.seed,
            trials: p.trials,
            s: design.transmit_order.clone(),
            w: design.weights.clone(),
            objective: p.rounded_objective,
            sdp_bound: p.sdp_bound,
            analysis: (*options).into(),
            metrics: report.metrics,
        })
    }

    /// Structural checks: version, lengths, binary order, finite nonnegative weights.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Document(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.s.len() != self.m || self.w.len() != self.m || self.m == 0 {
            return Err(Error::Document(format!(
                "arrays must have length m = {} (s: {}, w: {})",
                self.m,
                self.s.len(),
                self.w.len()
            )));
        }
        if let Some(i) = self.s.iter().position(|&v| v != 1 && v != -1) {
            return Err(Error::Document(format!(
                "s[{i}] = {} is not +-1",
                self.s[i]
            )));
        }
        if let Some(i) = self.w.iter().position(|&v| !(v.is_finite() && v >= 0.0)) {
            return Err(Error::Document(format!(
                "w[{i}] = {} is not a finite nonnegative value",
                self.w[i]
            )));
        }
        if self.n == 0 || !self.n.is_power_of_two() {
            return Err(Error::Document(format!(
                "n = {} is not a power of two",
                self.n
            )));
        }
        Ok(())
    }

    pub fn to_design(&self) -> DesignResult {
        let y = self
            .s
            .iter()
            .zip(&self.w)
            .map(|(&s, &w)| f64::from(s) * w)
            .collect();
        DesignResult {
            transmit_order: self.s.clone(),
            weights: self.w.clone(),
            y,
            method: self.method,
            provenance: Provenance {
                seed: self.seed,
                trials: self.trials,
                rounded_objective: self.objective,
                sdp_bound: self.sdp_bound,
                dual_bound: None,
                sdp_iterations: None,
                null_spec: self.null_spec.clone(),
                factor_form: self.factor_form,
                window: self.window,
                rank_one_shortcut: false,
                clamped_eigenvalues: false,
            },
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s =
            serde_json::to_string_pretty(self).map_err(|e| Error::Document(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(Check {
            name,
            passed,
            detail,
        });
    }
}

/// Complementarity of the generated pair of length `n`.
pub fn verify_golay(n: usize) -> Result<VerificationReport> {
    let pair = generate_golay_pair(n)?;
    let r = pair.verify();
    let mut report = VerificationReport::default();
    report.push(
        "complementarity",
        r.complementary,
        format!(
            "N = {n}, max |R1+R2-2N delta| = {} at lag {}",
            r.max_violation, r.worst_lag
        ),
    );
    Ok(report)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn rsba_close(a: &Option<Rsba>, b: &Option<Rsba>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => {
            close(x.center, y.center, tol) && close(x.lo, y.lo, tol) && close(x.hi, y.hi, tol)
        }
        _ => false,
    }
}

fn option_close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => close(x, y, tol),
        _ => false,
    }
}

/// Metrics agree within `tol` (absolute, in the metric's own units).
pub fn metrics_agree(a: &MetricsReport, b: &MetricsReport, tol: f64) -> bool {
    a.rsba.len() == b.rsba.len()
        && a.rsba
            .iter()
            .zip(&b.rsba)
            .all(|(x, y)| rsba_close(x, y, tol))
        && option_close(a.dmbr, b.dmbr, tol)
        && option_close(a.pdsl, b.pdsl, tol)
        && close(a.nag, b.nag, tol)
}

/// Complementarity, null-order, energy, and metric-consistency checks.
pub fn verify_document(doc: &DesignDocument) -> Result<VerificationReport> {
    doc.validate()?;
    let mut report = verify_golay(doc.n)?;
    let design = doc.to_design();
    let m = doc.m;

    match doc.null_spec.validate(m) {
        Ok(()) => {
            let residual = max_null_residual(&design.y, &doc.null_spec, doc.factor_form);
            let tol = null_tolerance(m);
            report.push(
                "null-order",
                residual <= tol,
                format!(
                    "K = {}, max scaled Hermite residual {residual:.3e} (tolerance {tol:.1e})",
                    doc.null_spec.total_order()
                ),
            );
        }
        Err(e) => report.push("null-order", false, e.to_string()),
    }

    if doc.method == Method::NmDrcw {
        let energy: f64 = design.y.iter().map(|v| v * v).sum();
        let tol = 1e-8 * m as f64;
        report.push(
            "energy",
            close(energy, m as f64, tol),
            format!("||y||^2 = {energy:.12} (expected {m})"),
        );
    }

    let pair = generate_golay_pair(doc.n)?;
    let fresh = analyze(&design, &pair, &doc.analysis.into())?;
    report.push(
        "metrics",
        metrics_agree(&fresh.metrics, &doc.metrics, 1e-9),
        "re-analysis of (s, w) against embedded metrics, tolerance 1e-9".into(),
    );
    Ok(report)
}
