use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use drcw_core::analysis::{
    amplitude_db, analyze, composite_ambiguity, doppler_factor, relative_db, AnalysisOptions,
    DopplerGrid,
};
use drcw_core::document::DesignDocument;
use drcw_core::sequences::generate_golay_pair;

use crate::args::{AnalyzeArgs, Global};
use crate::design::metrics_line;
use crate::failure::CmdResult;
use crate::output::{fmt_num, heatmap, line_plot, write_file, Csv};

/// Widest heatmap the SVG export renders; wider CAF grids are max-pooled.
const HEATMAP_COLUMNS: usize = 256;
const HEATMAP_FLOOR_DB: f64 = -120.0;

pub fn read_document(path: &Path) -> CmdResult<DesignDocument> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let doc = DesignDocument::from_json(&text)
        .with_context(|| format!("{} is not a valid design document", path.display()))?;
    Ok(doc)
}

pub fn run(args: &AnalyzeArgs, global: &Global) -> CmdResult {
    let doc = read_document(&args.document)?;
    let design = doc.to_design();
    let pair = generate_golay_pair(doc.n)?;
    let options = AnalysisOptions {
        grid_points: global.grid.unwrap_or(doc.analysis.grid_points),
        prsl_norm: global.prsl_norm.map_or(doc.analysis.prsl_norm, Into::into),
        threshold_db: doc.analysis.threshold_db,
    };
    let analysis = analyze(&design, &pair, &options)?;
    let caf_grid = DopplerGrid::uniform(args.caf_grid)?;
    let caf = composite_ambiguity(&design, &pair, &caf_grid)?;

    let dir = global.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;

    let thetas = analysis.grid.points();
    let mut prsl = Csv::new(&["theta_rad", "prsl_db"]);
    for (t, v) in thetas.iter().zip(&analysis.prsl_curve) {
        prsl.row(&[fmt_num(*t), fmt_num(*v)]);
    }
    let g_db = relative_db(&doppler_factor(&design, thetas));
    let mut doppler = Csv::new(&["theta_rad", "g_db"]);
    for (t, v) in thetas.iter().zip(&g_db) {
        doppler.row(&[fmt_num(*t), fmt_num(*v)]);
    }
    let peak = caf.peak();
    let mut caf_csv = Csv::new(&["lag", "theta_rad", "re", "im", "mag_db"]);
    let mut mags = Vec::with_capacity(caf.lags().len());
    for (li, &lag) in caf.lags().iter().enumerate() {
        let mut row = Vec::with_capacity(caf_grid.len());
        for (ti, &t) in caf_grid.points().iter().enumerate() {
            let v = caf.at(li, ti);
            let db = amplitude_db(v.norm() / peak);
            row.push(db);
            caf_csv.row(&[
                lag.to_string(),
                fmt_num(t),
                fmt_num(v.re),
                fmt_num(v.im),
                fmt_num(db),
            ]);
        }
        mags.push(row);
    }

    let files = [
        ("prsl.csv", prsl.into_string()),
        ("doppler.csv", doppler.into_string()),
        ("caf.csv", caf_csv.into_string()),
    ];
    for (name, text) in &files {
        let path = dir.join(name);
        write_file(&path, text)?;
        println!("wrote {}", path.display());
    }

    if args.svg {
        let prsl_points: Vec<(f64, f64)> = thetas
            .iter()
            .zip(&analysis.prsl_curve)
            .map(|(&t, &v)| (t, v))
            .collect();
        let g_points: Vec<(f64, f64)> = thetas.iter().zip(&g_db).map(|(&t, &v)| (t, v)).collect();
        let pooled = pool_columns(&mags, HEATMAP_COLUMNS);
        let lags = caf.lags();
        let plots = [
            (
                "prsl.svg",
                line_plot(&prsl_points, "PRSL vs Doppler", "theta (rad)", "PRSL (dB)"),
            ),
            (
                "doppler.svg",
                line_plot(&g_points, "Doppler profile", "theta (rad)", "|G| (dB)"),
            ),
            (
                "caf.svg",
                heatmap(
                    &pooled,
                    (
                        caf_grid.points()[0],
                        *caf_grid.points().last().unwrap_or(&0.0),
                    ),
                    (lags[0] as f64, *lags.last().unwrap_or(&0) as f64),
                    HEATMAP_FLOOR_DB,
                    "Composite ambiguity (dB)",
                    "theta (rad)",
                    "lag",
                ),
            ),
        ];
        for (name, svg) in &plots {
            let path = dir.join(name);
            write_file(&path, svg)?;
            println!("wrote {}", path.display());
        }
    }
    print!("{}", metrics_line(&analysis.metrics));
    Ok(())
}

/// Max-pools each row down to at most `width` columns.
fn pool_columns(rows: &[Vec<f64>], width: usize) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|row| {
            if row.len() <= width {
                return row.clone();
            }
            (0..width)
                .map(|c| {
                    let lo = c * row.len() / width;
                    let hi = ((c + 1) * row.len() / width).max(lo + 1);
                    row[lo..hi]
                        .iter()
                        .copied()
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pooling_keeps_maxima() {
        let rows = vec![vec![1.0, 5.0, 2.0, 3.0]];
        assert_eq!(pool_columns(&rows, 2), vec![vec![5.0, 3.0]]);
        assert_eq!(pool_columns(&rows, 8), rows);
    }
}
