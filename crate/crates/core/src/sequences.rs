//! Golay complementary pairs, transmit orders, and receive-weight templates.
//!
//! Everything here is exact where it can be: ACFs are integer sums and
//! complementarity is checked without tolerance.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aperiodic autocorrelation indexed by lag `-(n-1)..=(n-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Acf {
    values: Vec<i64>,
}

impl Acf {
    /// Largest lag magnitude, `n - 1`.
    pub fn max_lag(&self) -> usize {
        self.values.len() / 2
    }

    /// Value at lag `k`; zero outside the support.
    pub fn at(&self, k: isize) -> i64 {
        let idx = k + self.max_lag() as isize;
        if idx < 0 || idx as usize >= self.values.len() {
            0
        } else {
            self.values[idx as usize]
        }
    }

    /// All values ordered from lag `-(n-1)` to `n-1`.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn lags(&self) -> impl Iterator<Item = isize> {
        let l = self.max_lag() as isize;
        -l..=l
    }
}

/// `R[k] = sum_n seq[n] * seq[n + k]`, out-of-range terms zero.
pub fn acf(seq: &[i8]) -> Result<Acf> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let n = seq.len();
    let mut values = vec![0i64; 2 * n - 1];
    for k in 0..n {
        let r: i64 = (0..n - k)
            .map(|i| i64::from(seq[i]) * i64::from(seq[i + k]))
            .sum();
        values[n - 1 + k] = r;
        values[n - 1 - k] = r;
    }
    Ok(Acf { values })
}

/// Outcome of an exact complementarity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplementarityReport {
    pub complementary: bool,
    /// Largest `|R1[k] + R2[k] - 2N delta[k]|` over all lags.
    pub max_violation: i64,
    /// Lag where `max_violation` occurs (first one on ties).
    pub worst_lag: isize,
}

fn check_binary(seq: &[i8]) -> Result<()> {
    match seq.iter().position(|&v| v != 1 && v != -1) {
        Some(index) => Err(Error::NotBinary {
            index,
            value: i64::from(seq[index]),
        }),
        None => Ok(()),
    }
}

/// Checks `R1[k] + R2[k] = 2N delta[k]` in integer arithmetic.
pub fn verify_complementary(x1: &[i8], x2: &[i8]) -> Result<ComplementarityReport> {
    if x1.len() != x2.len() {
        return Err(Error::LengthMismatch(x1.len(), x2.len()));
    }
    check_binary(x1)?;
    check_binary(x2)?;
    let r1 = acf(x1)?;
    let r2 = acf(x2)?;
    let n = x1.len() as i64;
    let mut report = ComplementarityReport {
        complementary: true,
        max_violation: 0,
        worst_lag: 0,
    };
    for k in r1.lags() {
        let target = if k == 0 { 2 * n } else { 0 };
        let violation = (r1.at(k) + r2.at(k) - target).abs();
        if violation > report.max_violation {
            report.max_violation = violation;
            report.worst_lag = k;
        }
    }
    report.complementary = report.max_violation == 0;
    Ok(report)
}

/// A binary Golay complementary pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GolayPair {
    x1: Vec<i8>,
    x2: Vec<i8>,
}

impl GolayPair {
    /// Builds a pair, rejecting sequences that are not exactly complementary.
    pub fn new(x1: Vec<i8>, x2: Vec<i8>) -> Result<Self> {
        let report = verify_complementary(&x1, &x2)?;
        if !report.complementary {
            return Err(Error::NotComplementary {
                lag: report.worst_lag,
                violation: report.max_violation,
            });
        }
        Ok(Self { x1, x2 })
    }

    pub fn x1(&self) -> &[i8] {
        &self.x1
    }

    pub fn x2(&self) -> &[i8] {
        &self.x2
    }

    pub fn n(&self) -> usize {
        self.x1.len()
    }

    pub fn verify(&self) -> ComplementarityReport {
        verify_complementary(&self.x1, &self.x2).expect("pair invariants hold")
    }

    /// Largest out-of-phase ACF magnitude of `x1` (equal to that of `x2`).
    pub fn peak_sidelobe(&self) -> i64 {
        let r = acf(&self.x1).expect("nonempty");
        r.lags()
            .filter(|&k| k != 0)
            .map(|k| r.at(k).abs())
            .max()
            .unwrap_or(0)
    }
}

fn check_power_of_two(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        Err(Error::NotPowerOfTwo(n))
    } else {
        Ok(())
    }
}

/// Deterministic pair by recursive doubling `(a, b) -> (a|b, a|-b)` from `([1], [1])`.
pub fn generate_golay_pair(n: usize) -> Result<GolayPair> {
    check_power_of_two(n)?;
    let mut a = vec![1i8];
    let mut b = vec![1i8];
    while a.len() < n {
        let mut na = a.clone();
        na.extend_from_slice(&b);
        let mut nb = a;
        nb.extend(b.iter().map(|v| -v));
        a = na;
        b = nb;
    }
    Ok(GolayPair { x1: a, x2: b })
}

/// Prouhet-Thue-Morse order: `s_j = (-1)^(popcount j)`.
pub fn ptm_order(m: usize) -> Result<Vec<i8>> {
    check_power_of_two(m)?;
    Ok((0..m)
        .map(|j| if j.count_ones() % 2 == 0 { 1 } else { -1 })
        .collect())
}

/// The alternating order `1, -1, 1, -1, ...`.
pub fn standard_order(m: usize) -> Vec<i8> {
    (0..m).map(|j| if j % 2 == 0 { 1 } else { -1 }).collect()
}

fn normalize_energy(values: &mut [f64]) {
    let m = values.len() as f64;
    let energy: f64 = values.iter().map(|v| v * v).sum();
    if energy > 0.0 {
        let scale = (m / energy).sqrt();
        values.iter_mut().for_each(|v| *v *= scale);
    }
}

/// Weights proportional to `C(m-1, j)`, scaled to `sum w^2 = m`.
pub fn binomial_weights(m: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(m);
    let mut c = 1.0f64;
    for j in 0..m {
        w.push(c);
        // C(n, j+1) = C(n, j) * (n - j) / (j + 1); exact while below 2^53.
        c = c * (m - 1 - j) as f64 / (j + 1) as f64;
    }
    normalize_energy(&mut w);
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Rectangular,
    Hamming,
    Hanning,
    Blackman,
}

impl WindowKind {
    pub const ALL: [WindowKind; 4] = [
        WindowKind::Rectangular,
        WindowKind::Hamming,
        WindowKind::Hanning,
        WindowKind::Blackman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WindowKind::Rectangular => "rectangular",
            WindowKind::Hamming => "hamming",
            WindowKind::Hanning => "hanning",
            WindowKind::Blackman => "blackman",
        }
    }

    // Cosine-sum coefficients a_0, a_1, a_2.
    fn cosine_terms(self) -> [f64; 3] {
        match self {
            WindowKind::Rectangular => [1.0, 0.0, 0.0],
            WindowKind::Hamming => [0.54, 0.46, 0.0],
            WindowKind::Hanning => [0.5, 0.5, 0.0],
            WindowKind::Blackman => [0.42, 0.5, 0.08],
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rectangular" | "rect" => Ok(WindowKind::Rectangular),
            "hamming" | "ham" => Ok(WindowKind::Hamming),
            "hanning" | "hann" => Ok(WindowKind::Hanning),
            "blackman" => Ok(WindowKind::Blackman),
            _ => Err(Error::UnknownWindow(s.to_string())),
        }
    }
}

/// Similarity target for the receive weights, normalized to `sum w^2 = M`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowTemplate {
    kind: WindowKind,
    values: Vec<f64>,
}

impl WindowTemplate {
    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Symmetric cosine-sum window over denominator `m - 1`, rescaled to energy `m`.
pub fn window_template(kind: WindowKind, m: usize) -> Result<WindowTemplate> {
    let min = if kind == WindowKind::Rectangular {
        1
    } else {
        2
    };
    if m < min {
        return Err(Error::WindowTooShort {
            kind: kind.name(),
            min,
            got: m,
        });
    }
    let [a0, a1, a2] = kind.cosine_terms();
    let mut values: Vec<f64> = if kind == WindowKind::Rectangular {
        vec![1.0; m]
    } else {
        let denom = (m - 1) as f64;
        (0..m)
            .map(|j| {
                let x = 2.0 * PI * j as f64 / denom;
                (a0 - a1 * x.cos() + a2 * (2.0 * x).cos()).max(0.0)
            })
            .collect()
    };
    normalize_energy(&mut values);
    Ok(WindowTemplate { kind, values })
}
