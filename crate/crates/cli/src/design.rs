use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use drcw_core::analysis::{AnalysisOptions, MetricsReport, DEFAULT_GRID_POINTS};
use drcw_core::design::{
    design_bd, design_nm_drcw_detailed, design_ptm, design_uniform, DesignResult, NmDrcwConfig,
};
use drcw_core::document::DesignDocument;
use drcw_core::nullspec::{FactorForm, NullSpec};
use drcw_core::sdp::{IterationRecord, SdpOptions};
use drcw_core::sequences::{window_template, WindowKind};

use crate::args::{DesignArgs, Global, MethodArg, NormArg};
use crate::failure::{CmdResult, Failure};
use crate::output::{fmt_num, write_file, Csv};

pub fn factor_form(global: &Global) -> FactorForm {
    if global.legacy {
        FactorForm::Legacy
    } else {
        FactorForm::Exact
    }
}

pub fn analysis_options(global: &Global) -> AnalysisOptions {
    AnalysisOptions {
        grid_points: global.grid.unwrap_or(DEFAULT_GRID_POINTS),
        prsl_norm: global.prsl_norm.unwrap_or(NormArg::Global).into(),
        ..Default::default()
    }
}

pub fn nm_config(global: &Global, seed: u64) -> NmDrcwConfig {
    NmDrcwConfig {
        trials: global.trials,
        seed,
        sdp: SdpOptions {
            tol: global.tol,
            max_iter: global.max_iter,
            trace: global.sdp_trace.is_some(),
        },
        factor_form: factor_form(global),
        ..Default::default()
    }
}

/// Runs one nm design, writing the SDP trace if requested (also on solver failure).
pub fn run_nm(
    m: usize,
    spec: &NullSpec,
    window: WindowKind,
    config: &NmDrcwConfig,
    trace_path: Option<&Path>,
) -> CmdResult<DesignResult> {
    spec.validate(m)?;
    let template = window_template(window, m)?;
    match design_nm_drcw_detailed(m, spec, &template, config) {
        Ok(run) => {
            if let Some(path) = trace_path {
                write_file(path, &trace_csv(&run.sdp.trace))?;
            }
            Ok(run.design)
        }
        Err(drcw_core::Error::SdpNotConverged { best }) => {
            if let Some(path) = trace_path {
                write_file(path, &trace_csv(&best.trace))?;
            }
            Err(drcw_core::Error::SdpNotConverged { best }.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn trace_csv(trace: &[IterationRecord]) -> String {
    let mut csv = Csv::new(&[
        "iteration",
        "primal",
        "dual",
        "relative_gap",
        "mu",
        "primal_step",
        "dual_step",
    ]);
    for r in trace {
        csv.row(&[
            r.iteration.to_string(),
            fmt_num(r.primal),
            fmt_num(r.dual),
            fmt_num(r.relative_gap),
            fmt_num(r.mu),
            fmt_num(r.primal_step),
            fmt_num(r.dual_step),
        ]);
    }
    csv.into_string()
}

pub fn run(args: &DesignArgs, global: &Global) -> CmdResult {
    let design = match args.method {
        MethodArg::Nm => {
            let spec = NullSpec {
                k0: args.k0,
                nulls: args.nulls.clone(),
            };
            run_nm(
                args.m,
                &spec,
                args.window,
                &nm_config(global, global.seed),
                global.sdp_trace.as_deref(),
            )?
        }
        MethodArg::Ptm => design_ptm(args.m)?,
        MethodArg::Bd => design_bd(args.m)?,
        MethodArg::Uniform => design_uniform(args.m)?,
    };
    let doc = DesignDocument::from_design(&design, args.n, &analysis_options(global))?;
    let json = doc.to_json()?;
    let summary = summary(&doc);
    match &global.out {
        Some(path) => {
            write_file(path, &json)?;
            print!("{summary}");
            println!("wrote {}", path.display());
        }
        None => {
            eprint!("{summary}");
            std::io::stdout()
                .write_all(json.as_bytes())
                .map_err(|e| Failure::usage(anyhow::Error::from(e)))?;
        }
    }
    Ok(())
}

pub fn pi_multiple(theta: f64) -> String {
    format!("{:.4}pi", theta / PI)
}

fn summary(doc: &DesignDocument) -> String {
    let mut out = format!(
        "method {}, M = {}, N = {}, K0 = {}",
        doc.method.name(),
        doc.m,
        doc.n,
        doc.null_spec.k0
    );
    for null in &doc.null_spec.nulls {
        out += &format!(", null {}:{}", pi_multiple(null.theta), null.order);
    }
    if let Some(w) = doc.window {
        out += &format!(", window {w}");
    }
    if let Some(seed) = doc.seed {
        out += &format!(", seed {seed}");
    }
    out.push('\n');
    if let (Some(obj), Some(bound)) = (doc.objective, doc.sdp_bound) {
        out += &format!("objective {obj:.6} (SDP bound {bound:.6})\n");
    }
    out += &metrics_line(&doc.metrics);
    out
}

pub fn metrics_line(m: &MetricsReport) -> String {
    let mut out = String::from("RSBA");
    for r in &m.rsba {
        match r {
            Some(r) => out += &format!(" [{}, {}]", pi_multiple(r.lo), pi_multiple(r.hi)),
            None => out += " none",
        }
    }
    let opt = |v: Option<f64>, unit: &str| match v {
        Some(v) => format!("{v:.2} {unit}"),
        None => "n/a".into(),
    };
    out += &format!(
        "; DMBR {}; PDSL {}; NAG {:.3} dB\n",
        opt(m.dmbr, "%"),
        opt(m.pdsl, "dB"),
        m.nag
    );
    out
}
