//! Library results against independent brute-force computations.

use std::f64::consts::PI;

use drcw_core::analysis::{composite_ambiguity, doppler_factor, range_factor, DopplerGrid};
use drcw_core::design::{
    design_bd, design_ptm, design_uniform, round_solution, DesignResult, Method, Provenance,
};
use drcw_core::nullspec::{quadratic_form, ConstraintBasis, FactorForm, NullSpec, QuadraticForm};
use drcw_core::sdp::{solve_partition_sdp, SdpOptions};
use drcw_core::sequences::{generate_golay_pair, window_template, GolayPair, WindowKind};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// CAF by correlating the expanded fast-time pulse train against the weighted
/// receive filter, with the Doppler phase applied per pulse.
fn expanded_caf(design: &DesignResult, pair: &GolayPair, lag: isize, theta: f64) -> Complex64 {
    let n = pair.n();
    let pri = 2 * n;
    let m = design.m();
    let len = m * pri;
    let mut tx = vec![Complex64::new(0.0, 0.0); len];
    let mut rx = vec![0.0; len];
    for p in 0..m {
        let code = if design.transmit_order[p] == 1 {
            pair.x1()
        } else {
            pair.x2()
        };
        let doppler = Complex64::from_polar(1.0, theta * p as f64);
        for (c, &chip) in code.iter().enumerate() {
            tx[p * pri + c] = doppler * f64::from(chip);
            rx[p * pri + c] = design.weights[p] * f64::from(chip);
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for t in 0..len as isize {
        let u = t + lag;
        if u >= 0 && (u as usize) < len {
            acc += tx[u as usize] * rx[t as usize];
        }
    }
    acc
}

fn random_design(rng: &mut ChaCha8Rng, m: usize) -> DesignResult {
    let y: Vec<f64> = (0..m)
        .map(|_| {
            let mag: f64 = rng.random_range(0.05..2.0);
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect();
    let provenance = design_uniform(1).unwrap().provenance;
    DesignResult::from_signed(y, Method::NmDrcw, provenance)
}

#[test]
fn caf_matches_expanded_pulse_train() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let n = 1 << rng.random_range(0..=3);
        let m = rng.random_range(1..=8);
        let pair = generate_golay_pair(n).unwrap();
        let design = random_design(&mut rng, m);
        let grid = DopplerGrid::uniform(17).unwrap();
        let caf = composite_ambiguity(&design, &pair, &grid).unwrap();
        let f = range_factor(&design, grid.points());
        let g = doppler_factor(&design, grid.points());
        let r1 = drcw_core::sequences::acf(pair.x1()).unwrap();
        let r2 = drcw_core::sequences::acf(pair.x2()).unwrap();
        for (li, &lag) in caf.lags().iter().enumerate() {
            for (ti, &theta) in grid.points().iter().enumerate() {
                let got = caf.at(li, ti);
                let want = expanded_caf(&design, &pair, lag, theta);
                let scale = want.norm().max(caf.peak());
                assert!(
                    (got - want).norm() <= 1e-10 * scale,
                    "lag {lag} theta {theta}"
                );
                // Sum and difference decomposition.
                let (a, b) = (r1.at(lag) as f64, r2.at(lag) as f64);
                let split = g[ti] * (0.5 * (a + b)) + f[ti] * (0.5 * (a - b));
                assert!((got - split).norm() <= 1e-10 * scale);
            }
        }
    }
}

/// `(1 - z)^k` coefficients in exact integers.
fn binomial_row(k: usize) -> Vec<i128> {
    let mut row = vec![1i128];
    for _ in 0..k {
        let mut next = vec![0i128; row.len() + 1];
        for (i, &c) in row.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c;
        }
        row = next;
    }
    row
}

#[test]
fn bd_is_scaled_binomial_polynomial() {
    for m in [2usize, 5, 16, 33, 50] {
        let d = design_bd(m).unwrap();
        let exact = binomial_row(m - 1);
        let scale = d.y[0] / exact[0] as f64;
        for (y, &c) in d.y.iter().zip(&exact) {
            let ratio = y / scale;
            assert_eq!(ratio.round() as i128, c, "M = {m}");
            assert!(
                (ratio - c as f64).abs() <= 1e-12 * (c as f64).abs(),
                "M = {m}"
            );
        }
    }
}

#[test]
fn ptm_moments_vanish() {
    for k in 1..=8u32 {
        let m = 1usize << k;
        let d = design_ptm(m).unwrap();
        for p in 0..k {
            let moment: i128 = d
                .transmit_order
                .iter()
                .enumerate()
                .map(|(j, &s)| i128::from(s) * (j as i128).pow(p))
                .sum();
            assert_eq!(moment, 0, "M = {m}, p = {p}");
        }
        assert!(d.weights.iter().all(|&w| w == 1.0));
    }
}

#[test]
fn uniform_nag_is_zero() {
    for m in [1usize, 7, 50] {
        let d = design_uniform(m).unwrap();
        assert_eq!(drcw_core::analysis::nag(&d.weights).unwrap(), 0.0);
    }
}

fn exhaustive(form: &QuadraticForm) -> f64 {
    let n = form.dim();
    (0u32..1 << (n - 1))
        .map(|bits| {
            let s: Vec<i8> = (0..n)
                .map(|i| {
                    if i > 0 && bits >> (i - 1) & 1 == 1 {
                        -1
                    } else {
                        1
                    }
                })
                .collect();
            form.evaluate(&s)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn sdp_and_rounding_against_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut matched = 0;
    let instances = 20;
    for i in 0..instances {
        let m = rng.random_range(4..=12);
        let k0 = rng.random_range(0..m / 2);
        let mut spec = NullSpec::zero_only(k0);
        if spec.total_order() + 2 < m && rng.random_bool(0.5) {
            spec = spec.with_null(rng.random_range(0.2..0.9) * PI, 1);
        }
        let kind = WindowKind::ALL[rng.random_range(0..4)];
        let basis = ConstraintBasis::for_spec(&spec, m, FactorForm::Exact).unwrap();
        let form = quadratic_form(&basis, &window_template(kind, m).unwrap()).unwrap();
        let sol = solve_partition_sdp(&form, &SdpOptions::default()).unwrap();
        let best = exhaustive(&form);
        let scale = sol.residuals.dual_bound.abs().max(1e-300);
        assert!(sol.objective >= best - 1e-6 * scale, "instance {i}");
        let r = round_solution(&sol, &form, 1000, i as u64, 1e8).unwrap();
        assert!(
            r.objective >= 0.9 * best,
            "instance {i}: {} vs {best}",
            r.objective
        );
        if r.objective >= best - 1e-9 * scale {
            matched += 1;
        }
    }
    assert!(
        matched * 10 >= instances * 8,
        "matched {matched} of {instances}"
    );
}

#[test]
fn provenance_survives_from_signed() {
    let p = Provenance {
        seed: Some(3),
        ..design_uniform(1).unwrap().provenance
    };
    let d = DesignResult::from_signed(vec![0.0, -1.0], Method::NmDrcw, p.clone());
    assert_eq!(d.transmit_order, vec![1, -1]);
    assert_eq!(d.provenance, p);
}
