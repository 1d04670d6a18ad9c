//! Discrete composite ambiguity function and the four waveform metrics.
//!
//! For a design `(s, w)` and Golay pair `(x1, x2)` the CAF is
//! `R(k, theta) = sum_m w_m R_{x(m)}[k] exp(j theta m)` where pulse `m`
//! carries `x1` when `s_m = +1` and `x2` otherwise. Grouping pulses by
//! sequence gives `R = R1[k] G1(theta) + R2[k] G2(theta)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::design::DesignResult;
use crate::error::{Error, Result};
use crate::linalg::phasor;
use crate::sequences::{acf, GolayPair};

pub const DEFAULT_GRID_POINTS: usize = 8192;
pub const RSBA_THRESHOLD_DB: f64 = -60.0;
/// Value reported for exact zeros.
pub const DB_FLOOR: f64 = -300.0;

pub fn amplitude_db(ratio: f64) -> f64 {
    if ratio <= 0.0 {
        DB_FLOOR
    } else {
        (20.0 * ratio.log10()).max(DB_FLOOR)
    }
}

/// Uniform Doppler samples `theta_i = 2 pi (i - floor(n/2)) / n`, which always include 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DopplerGrid {
    points: Vec<f64>,
    resolution: f64,
    zero_index: usize,
}

impl DopplerGrid {
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Analysis(format!(
                "Doppler grid needs at least 3 points, got {n}"
            )));
        }
        let resolution = 2.0 * PI / n as f64;
        let zero_index = n / 2;
        let points = (0..n)
            .map(|i| (i as f64 - zero_index as f64) * resolution)
            .collect();
        Ok(Self {
            points,
            resolution,
            zero_index,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn zero_index(&self) -> usize {
        self.zero_index
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the grid point closest to `theta`.
    pub fn nearest(&self, theta: f64) -> usize {
        let idx = (theta / self.resolution).round() as i64 + self.zero_index as i64;
        idx.clamp(0, self.points.len() as i64 - 1) as usize
    }
}

/// `sum_m coeffs[m] exp(j theta m)` at each `theta`.
fn dtft(coeffs: &[f64], thetas: &[f64]) -> Vec<Complex64> {
    thetas
        .iter()
        .map(|&theta| {
            coeffs
                .iter()
                .enumerate()
                .map(|(m, &c)| phasor(theta, m) * c)
                .sum()
        })
        .collect()
}

/// `F(theta) = sum_m s_m w_m exp(j theta m)`.
pub fn range_factor(design: &DesignResult, thetas: &[f64]) -> Vec<Complex64> {
    dtft(&design.y, thetas)
}

/// `G(theta) = sum_m w_m exp(j theta m)`.
pub fn doppler_factor(design: &DesignResult, thetas: &[f64]) -> Vec<Complex64> {
    dtft(&design.weights, thetas)
}

/// `|values|` in dB relative to their maximum magnitude.
pub fn relative_db(values: &[Complex64]) -> Vec<f64> {
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    values
        .iter()
        .map(|v| {
            if peak == 0.0 {
                DB_FLOOR
            } else {
                amplitude_db(v.norm() / peak)
            }
        })
        .collect()
}

/// CAF samples over lags `-(N-1)..=N-1` and a Doppler grid.
#[derive(Debug, Clone)]
pub struct CafGrid {
    lags: Vec<isize>,
    grid: DopplerGrid,
    /// Row-major, one row per lag.
    values: Vec<Complex64>,
}

impl CafGrid {
    pub fn lags(&self) -> &[isize] {
        &self.lags
    }

    pub fn grid(&self) -> &DopplerGrid {
        &self.grid
    }

    /// Value at lag index `li` (into [`CafGrid::lags`]) and Doppler index `ti`.
    pub fn at(&self, li: usize, ti: usize) -> Complex64 {
        self.values[li * self.grid.len() + ti]
    }

    pub fn zero_lag_index(&self) -> usize {
        self.lags.len() / 2
    }

    /// `|R(0, 0)|`, the global peak.
    pub fn peak(&self) -> f64 {
        self.at(self.zero_lag_index(), self.grid.zero_index())
            .norm()
    }
}

/// Per-lag rows of the CAF at arbitrary Doppler values.
fn caf_rows(
    design: &DesignResult,
    pair: &GolayPair,
    thetas: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    let w1: Vec<f64> = design
        .transmit_order
        .iter()
        .zip(&design.weights)
        .map(|(&s, &w)| if s == 1 { w } else { 0.0 })
        .collect();
    let w2: Vec<f64> = design
        .transmit_order
        .iter()
        .zip(&design.weights)
        .map(|(&s, &w)| if s == 1 { 0.0 } else { w })
        .collect();
    let g1 = dtft(&w1, thetas);
    let g2 = dtft(&w2, thetas);
    let r1 = acf(pair.x1())?;
    let r2 = acf(pair.x2())?;
    Ok(r1
        .lags()
        .map(|k| {
            let (a, b) = (r1.at(k) as f64, r2.at(k) as f64);
            g1.iter().zip(&g2).map(|(u, v)| u * a + v * b).collect()
        })
        .collect())
}

pub fn composite_ambiguity(
    design: &DesignResult,
    pair: &GolayPair,
    grid: &DopplerGrid,
) -> Result<CafGrid> {
    if grid.is_empty() {
        return Err(Error::Analysis("empty Doppler grid".into()));
    }
    let rows = caf_rows(design, pair, grid.points())?;
    let n = pair.n() as isize;
    Ok(CafGrid {
        lags: (-(n - 1)..n).collect(),
        grid: grid.clone(),
        values: rows.into_iter().flatten().collect(),
    })
}

/// Reference level for PRSL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrslNorm {
    /// Zero-lag, zero-Doppler peak `|R(0, 0)|`.
    #[default]
    Global,
    /// Zero-lag response at the same Doppler, `|R(0, theta)|`.
    PerDoppler,
}

fn prsl_from_rows(
    rows: &[Vec<Complex64>],
    zero_lag: usize,
    global_peak: f64,
    norm: PrslNorm,
) -> Vec<f64> {
    let n_theta = rows.first().map_or(0, Vec::len);
    (0..n_theta)
        .map(|t| {
            let side = rows
                .iter()
                .enumerate()
                .filter(|&(li, _)| li != zero_lag)
                .map(|(_, row)| row[t].norm())
                .fold(0.0, f64::max);
            let reference = match norm {
                PrslNorm::Global => global_peak,
                PrslNorm::PerDoppler => rows[zero_lag][t].norm(),
            };
            if side == 0.0 {
                DB_FLOOR
            } else if reference == 0.0 {
                -DB_FLOOR
            } else {
                amplitude_db(side / reference)
            }
        })
        .collect()
}

/// `PRSL(theta) = 20 log10(max_{k != 0} |R(k, theta)| / reference)`.
pub fn prsl_curve(caf: &CafGrid, norm: PrslNorm) -> Vec<f64> {
    let n_theta = caf.grid.len();
    let rows: Vec<Vec<Complex64>> = caf
        .values
        .chunks(n_theta)
        .map(<[Complex64]>::to_vec)
        .collect();
    prsl_from_rows(&rows, caf.zero_lag_index(), caf.peak(), norm)
}

/// PRSL at arbitrary Doppler values (e.g. off-grid null centres).
pub fn prsl_at(
    design: &DesignResult,
    pair: &GolayPair,
    thetas: &[f64],
    norm: PrslNorm,
) -> Result<Vec<f64>> {
    let rows = caf_rows(design, pair, thetas)?;
    let zero_lag = pair.n() - 1;
    let peak = caf_rows(design, pair, &[0.0])?[zero_lag][0].norm();
    Ok(prsl_from_rows(&rows, zero_lag, peak, norm))
}

/// A blanking interval around `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rsba {
    pub center: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Rsba {
    /// Distance from the centre to the nearer edge.
    pub fn half_width(&self) -> f64 {
        (self.center - self.lo).min(self.hi - self.center)
    }
}

/// Maximal contiguous run of grid points around `center_index` with `curve < threshold`.
pub fn rsba(
    curve: &[f64],
    grid: &DopplerGrid,
    center_index: usize,
    threshold: f64,
) -> Option<Rsba> {
    if center_index >= curve.len() || curve[center_index] >= threshold {
        return None;
    }
    let mut lo = center_index;
    while lo > 0 && curve[lo - 1] < threshold {
        lo -= 1;
    }
    let mut hi = center_index;
    while hi + 1 < curve.len() && curve[hi + 1] < threshold {
        hi += 1;
    }
    let p = grid.points();
    Some(Rsba {
        center: p[center_index],
        lo: p[lo],
        hi: p[hi],
    })
}

/// Width of the `-3 dB` mainlobe around `theta = 0`, by linear interpolation.
pub fn mainlobe_width(magnitude: &[f64], grid: &DopplerGrid) -> Result<f64> {
    let z = grid.zero_index();
    let peak = magnitude[z];
    if peak <= 0.0 {
        return Err(Error::Analysis("zero Doppler response is zero".into()));
    }
    let level = peak / 2f64.sqrt();
    let p = grid.points();
    let crossing = |step: isize| -> Result<f64> {
        let mut j = z as isize;
        loop {
            let next = j + step;
            if next < 0 || next as usize >= magnitude.len() {
                return Err(Error::Analysis(
                    "-3 dB mainlobe edge not found on the grid".into(),
                ));
            }
            if magnitude[next as usize] < level {
                break;
            }
            j = next;
        }
        if j == z as isize {
            return Err(Error::Analysis(
                "mainlobe narrower than the grid spacing; use a finer grid".into(),
            ));
        }
        let (a, b) = (magnitude[j as usize], magnitude[(j + step) as usize]);
        let t = (a - level) / (a - b);
        let (ta, tb) = (p[j as usize], p[(j + step) as usize]);
        Ok(ta + t * (tb - ta))
    };
    Ok(crossing(1)? - crossing(-1)?)
}

/// Percent increase of the `-3 dB` Doppler mainlobe width over a reference.
pub fn dmbr(g: &[f64], g_ref: &[f64], grid: &DopplerGrid) -> Result<f64> {
    if g.len() != grid.len() || g_ref.len() != grid.len() {
        return Err(Error::Dimension(
            "Doppler profiles must match the grid".into(),
        ));
    }
    let width = mainlobe_width(g, grid)?;
    let reference = mainlobe_width(g_ref, grid)?;
    Ok((width / reference - 1.0) * 100.0)
}

/// Peak Doppler sidelobe level: largest `|G|` beyond the first local minimum on
/// each side of `theta = 0`, relative to `|G(0)|`.
pub fn pdsl(g: &[f64], grid: &DopplerGrid) -> Result<f64> {
    let z = grid.zero_index();
    let peak = g[z];
    if peak <= 0.0 {
        return Err(Error::Analysis("zero Doppler response is zero".into()));
    }
    let mut right = z;
    while right + 1 < g.len() && g[right + 1] < g[right] {
        right += 1;
    }
    let mut left = z;
    while left > 0 && g[left - 1] < g[left] {
        left -= 1;
    }
    if right == z || left == z || right + 1 >= g.len() || left == 0 {
        return Err(Error::Analysis(
            "no local minimum beside the Doppler mainlobe".into(),
        ));
    }
    let side = g[right + 1..]
        .iter()
        .chain(&g[..left])
        .fold(0.0f64, |a, &b| a.max(b));
    Ok(amplitude_db(side / peak))
}

/// Normalized accumulation gain `10 log10((sum w)^2 / (M sum w^2))`.
pub fn nag(weights: &[f64]) -> Result<f64> {
    let energy: f64 = weights.iter().map(|w| w * w).sum();
    if weights.is_empty() || energy == 0.0 {
        return Err(Error::Analysis("weights are all zero".into()));
    }
    let sum: f64 = weights.iter().sum();
    Ok(10.0 * (sum * sum / (weights.len() as f64 * energy)).log10())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub grid_points: usize,
    pub prsl_norm: PrslNorm,
    pub threshold_db: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_GRID_POINTS,
            prsl_norm: PrslNorm::Global,
            threshold_db: RSBA_THRESHOLD_DB,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// One entry per requested null centre (zero Doppler first); `None` when
    /// the centre itself is above threshold.
    pub rsba: Vec<Option<Rsba>>,
    /// Percent; `None` when the mainlobe cannot be resolved.
    pub dmbr: Option<f64>,
    /// dB; `None` when no sidelobe region exists.
    pub pdsl: Option<f64>,
    pub nag: f64,
}

/// Curves and metrics of one design.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub grid: DopplerGrid,
    pub caf: CafGrid,
    pub range_factor: Vec<Complex64>,
    pub doppler_factor: Vec<Complex64>,
    /// PRSL in dB over the grid.
    pub prsl_curve: Vec<f64>,
    pub metrics: MetricsReport,
}

/// Null centres used for RSBA: zero Doppler, then each requested null angle.
pub fn rsba_centers(design: &DesignResult) -> Vec<f64> {
    std::iter::once(0.0)
        .chain(design.provenance.null_spec.nulls.iter().map(|n| n.theta))
        .collect()
}

pub fn analyze(
    design: &DesignResult,
    pair: &GolayPair,
    options: &AnalysisOptions,
) -> Result<Analysis> {
    if design.m() == 0 {
        return Err(Error::Analysis("empty design".into()));
    }
    let grid = DopplerGrid::uniform(options.grid_points)?;
    let caf = composite_ambiguity(design, pair, &grid)?;
    let curve = prsl_curve(&caf, options.prsl_norm);
    let f = range_factor(design, grid.points());
    let g = doppler_factor(design, grid.points());
    let g_mag: Vec<f64> = g.iter().map(|v| v.norm()).collect();
    let uniform = vec![1.0; design.m()];
    let g_ref: Vec<f64> = dtft(&uniform, grid.points())
        .iter()
        .map(|v| v.norm())
        .collect();

    let rsba = rsba_centers(design)
        .into_iter()
        .map(|c| rsba(&curve, &grid, grid.nearest(c), options.threshold_db))
        .collect();
    let metrics = MetricsReport {
        rsba,
        dmbr: dmbr(&g_mag, &g_ref, &grid).ok(),
        pdsl: pdsl(&g_mag, &grid).ok(),
        nag: nag(&design.weights)?,
    };
    Ok(Analysis {
        grid,
        caf,
        range_factor: f,
        doppler_factor: g,
        prsl_curve: curve,
        metrics,
    })
}
