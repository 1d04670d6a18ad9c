use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use anyhow::anyhow;
use drcw_core::analysis::{analyze, MetricsReport};
use drcw_core::derive_seed;
use drcw_core::nullspec::NullSpec;
use drcw_core::sequences::{generate_golay_pair, WindowKind};
use serde_json::json;

use crate::args::{Format, Global, TableArgs};
use crate::design::{analysis_options, nm_config, run_nm};
use crate::failure::{CmdResult, Failure};
use crate::output::{fmt_num, write_file, Csv};

#[derive(Debug, Clone)]
pub struct Cell {
    pub window: WindowKind,
    pub k0: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub cell: Cell,
    pub metrics: MetricsReport,
}

impl Row {
    /// Half-width of the zero-Doppler blanking area in multiples of pi.
    pub fn rsba_pi(&self) -> Option<f64> {
        self.metrics
            .rsba
            .first()
            .and_then(|r| r.as_ref())
            .map(|r| r.half_width() / PI)
    }
}

/// Seed of the `(window, k0)` cell, independent of which other cells are requested.
pub fn cell_seed(master: u64, window: WindowKind, k0: usize) -> u64 {
    let w = WindowKind::ALL
        .iter()
        .position(|&k| k == window)
        .unwrap_or(0) as u64;
    derive_seed(master, (w << 32) | k0 as u64)
}

/// Cells in output order: windows outer, `k0` inner.
pub fn cells(args: &TableArgs, master_seed: u64) -> CmdResult<Vec<Cell>> {
    if args.k0.is_empty() {
        return Err(Failure::usage(anyhow!("the k0 list is empty")));
    }
    if args.windows.is_empty() {
        return Err(Failure::usage(anyhow!("the window list is empty")));
    }
    for &k0 in &args.k0 {
        NullSpec::zero_only(k0).validate(args.m)?;
    }
    let mut out = Vec::new();
    for &window in &args.windows {
        for &k0 in &args.k0 {
            out.push(Cell {
                window,
                k0,
                seed: cell_seed(master_seed, window, k0),
            });
        }
    }
    Ok(out)
}

pub fn compute(args: &TableArgs, global: &Global) -> CmdResult<Vec<Row>> {
    let cells = cells(args, global.seed)?;
    let pair = generate_golay_pair(args.n)?;
    let options = analysis_options(global);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<CmdResult<Row>>>> =
        Mutex::new((0..cells.len()).map(|_| None).collect());
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(cells.len());

    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell) = cells.get(i) else { break };
                let result = (|| {
                    let design = run_nm(
                        args.m,
                        &NullSpec::zero_only(cell.k0),
                        cell.window,
                        &nm_config(global, cell.seed),
                        None,
                    )?;
                    let analysis = analyze(&design, &pair, &options)?;
                    Ok(Row {
                        cell: cell.clone(),
                        metrics: analysis.metrics,
                    })
                })();
                results.lock().expect("result lock")[i] = Some(result);
            });
        }
    });

    results
        .into_inner()
        .expect("result lock")
        .into_iter()
        .map(|r| r.expect("every cell is computed"))
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

pub fn render(rows: &[Row], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut csv = Csv::new(&[
                "window",
                "k0",
                "seed",
                "rsba_half_width_pi",
                "dmbr_pct",
                "pdsl_db",
                "nag_db",
            ]);
            for r in rows {
                csv.row(&[
                    r.cell.window.to_string(),
                    r.cell.k0.to_string(),
                    r.cell.seed.to_string(),
                    opt(r.rsba_pi()),
                    opt(r.metrics.dmbr),
                    opt(r.metrics.pdsl),
                    fmt_num(r.metrics.nag),
                ]);
            }
            csv.into_string()
        }
        Format::Md => {
            let mut out = String::from(
                "| window | K0 | RSBA | DMBR (%) | PDSL (dB) | NAG (dB) |\n\
                 |---|---:|---|---:|---:|---:|\n",
            );
            let md = |v: Option<f64>, digits: usize| match v {
                Some(v) => format!("{v:.digits$}"),
                None => "n/a".into(),
            };
            for r in rows {
                let rsba = match r.rsba_pi() {
                    Some(h) => format!("[0, {h:.2}pi]"),
                    None => "none".into(),
                };
                out += &format!(
                    "| {} | {} | {} | {} | {} | {:.2} |\n",
                    r.cell.window,
                    r.cell.k0,
                    rsba,
                    md(r.metrics.dmbr, 1),
                    md(r.metrics.pdsl, 2),
                    r.metrics.nag
                );
            }
            out
        }
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "window": r.cell.window,
                        "k0": r.cell.k0,
                        "seed": r.cell.seed,
                        "rsba_half_width_pi": r.rsba_pi(),
                        "dmbr_pct": r.metrics.dmbr,
                        "pdsl_db": r.metrics.pdsl,
                        "nag_db": r.metrics.nag,
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&items).expect("table serializes");
            s.push('\n');
            s
        }
    }
}

pub fn run(args: &TableArgs, global: &Global) -> CmdResult {
    let rows = compute(args, global)?;
    let text = render(&rows, global.format.unwrap_or(Format::Md));
    match &global.out {
        Some(path) => {
            write_file(path, &text)?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}
