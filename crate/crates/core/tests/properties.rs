use std::f64::consts::PI;

use drcw_core::analysis::{prsl_at, PrslNorm, DB_FLOOR};
use drcw_core::design::{design_nm_drcw, design_nm_drcw_detailed, NmDrcwConfig};
use drcw_core::nullspec::{
    max_null_residual, null_tolerance, quadratic_form, ConstraintBasis, FactorForm, NullSpec,
    QuadraticForm,
};
use drcw_core::sdp::{solve_partition_sdp, SdpOptions};
use drcw_core::sequences::{
    acf, binomial_weights, generate_golay_pair, ptm_order, window_template, WindowKind,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn window_kind() -> impl Strategy<Value = WindowKind> {
    prop::sample::select(WindowKind::ALL.to_vec())
}

/// Random valid null spec for `m` pulses: a zero-Doppler order plus up to two
/// well-separated Doppler nulls.
fn null_spec(m: usize) -> impl Strategy<Value = NullSpec> {
    let budget = m - 1;
    (
        0..=budget.min(24),
        prop::collection::vec((0.1f64..0.95, 1usize..=4), 0..=2),
    )
        .prop_map(move |(k0, raw)| {
            let mut spec = NullSpec::zero_only(k0);
            for (frac, order) in raw {
                let theta = frac * PI;
                let separated = spec.nulls.iter().all(|n| (n.theta - theta).abs() > 0.1);
                if separated && spec.total_order() + 2 * order <= budget {
                    spec = spec.with_null(theta, order);
                }
            }
            spec
        })
}

fn config() -> impl Strategy<Value = (usize, NullSpec, WindowKind)> {
    (8usize..=50)
        .prop_flat_map(|m| (Just(m), null_spec(m), window_kind()))
        .prop_filter("at least one free dimension", |(m, spec, _)| {
            spec.total_order() < *m
        })
}

fn exhaustive_max(form: &QuadraticForm) -> f64 {
    let n = form.dim();
    let mut best = f64::NEG_INFINITY;
    // s and -s give the same value, so fix s_0 = +1.
    for bits in 0u32..(1 << (n - 1)) {
        let s: Vec<i8> = (0..n)
            .map(|i| {
                if i > 0 && bits >> (i - 1) & 1 == 1 {
                    -1
                } else {
                    1
                }
            })
            .collect();
        best = best.max(form.evaluate(&s));
    }
    best
}

fn psd_form(n: usize, entries: &[f64]) -> QuadraticForm {
    let g = DMatrix::from_column_slice(n, n, &entries[..n * n]);
    QuadraticForm::from_matrix(&g * g.transpose()).unwrap()
}

#[test]
fn golay_pairs_complementary_up_to_1024() {
    for k in 0..=10 {
        let n = 1usize << k;
        let pair = generate_golay_pair(n).unwrap();
        let r1 = acf(pair.x1()).unwrap();
        let r2 = acf(pair.x2()).unwrap();
        for lag in r1.lags() {
            let expected = if lag == 0 { 2 * n as i64 } else { 0 };
            assert_eq!(r1.at(lag) + r2.at(lag), expected, "N = {n}, lag {lag}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ptm_self_similar(k in 0u32..10) {
        let m = 1usize << k;
        let small = ptm_order(m).unwrap();
        let big = ptm_order(2 * m).unwrap();
        prop_assert_eq!(&big[..m], &small[..]);
        for j in 0..m {
            prop_assert_eq!(big[m + j], -small[j]);
        }
    }

    #[test]
    fn windows_have_energy_m_and_symmetry(kind in window_kind(), m in 2usize..300) {
        let w = window_template(kind, m).unwrap();
        let v = w.values();
        let energy: f64 = v.iter().map(|x| x * x).sum();
        prop_assert!((energy - m as f64).abs() <= 1e-9 * m as f64);
        for j in 0..m {
            prop_assert!((v[j] - v[m - 1 - j]).abs() <= 1e-12 * m as f64);
            prop_assert!(v[j] >= -1e-15);
        }
    }

    #[test]
    fn binomial_weights_have_energy_m(m in 1usize..120) {
        let w = binomial_weights(m);
        let energy: f64 = w.iter().map(|x| x * x).sum();
        prop_assert!((energy - m as f64).abs() <= 1e-9 * m as f64);
    }

    #[test]
    fn acf_symmetric_and_sums_to_square(bits in prop::collection::vec(any::<bool>(), 1..64)) {
        let x: Vec<i8> = bits.iter().map(|&b| if b { 1 } else { -1 }).collect();
        let r = acf(&x).unwrap();
        let n = x.len() as isize;
        prop_assert_eq!(r.at(0), n as i64);
        for k in 1..n {
            prop_assert_eq!(r.at(k), r.at(-k));
        }
        let total: i64 = r.lags().map(|k| r.at(k)).sum();
        let s: i64 = x.iter().map(|&v| i64::from(v)).sum();
        prop_assert_eq!(total, s * s);
    }

    #[test]
    fn basis_vectors_satisfy_nulls((m, spec, _) in config()) {
        let basis = ConstraintBasis::for_spec(&spec, m, FactorForm::Exact).unwrap();
        prop_assert_eq!(basis.dim(), m - spec.total_order());
        prop_assert!(basis.orthonormality_error() < 1e-10);
        let q = basis.orthonormal();
        for c in 0..basis.dim() {
            let y: Vec<f64> = q.column(c).iter().map(|v| v * (m as f64).sqrt()).collect();
            let r = max_null_residual(&y, &spec, FactorForm::Exact);
            prop_assert!(r <= null_tolerance(m), "column {c}: residual {r:e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn designs_meet_nulls_and_energy((m, spec, kind) in config(), seed in any::<u64>()) {
        let window = window_template(kind, m).unwrap();
        let config = NmDrcwConfig { trials: 50, seed, ..Default::default() };
        let d = match design_nm_drcw(m, &spec, &window, &config) {
            Ok(d) => d,
            // A sign vector orthogonal to a tiny subspace is a legitimate outcome.
            Err(drcw_core::Error::Degenerate(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let energy: f64 = d.y.iter().map(|v| v * v).sum();
        prop_assert!((energy - m as f64).abs() <= 1e-8 * m as f64);
        let r = max_null_residual(&d.y, &spec, FactorForm::Exact);
        prop_assert!(r <= null_tolerance(m), "residual {r:e}");
        for (&s, (&w, &y)) in d.transmit_order.iter().zip(d.weights.iter().zip(&d.y)) {
            prop_assert!(w >= 0.0);
            prop_assert_eq!(f64::from(s) * w, y);
        }
        let pair = generate_golay_pair(8).unwrap();
        let centres: Vec<f64> = std::iter::once(0.0)
            .chain(spec.nulls.iter().flat_map(|n| [n.theta, -n.theta]))
            .collect();
        let prsl = prsl_at(&d, &pair, &centres, PrslNorm::Global).unwrap();
        for (i, &v) in prsl.iter().enumerate() {
            // Zero Doppler is only a null when k0 > 0.
            if i > 0 || spec.k0 > 0 {
                prop_assert!(v <= -120.0, "PRSL {v} dB at {}", centres[i]);
            }
        }
    }

    #[test]
    fn sdp_dominates_binary_optimum(n in 2usize..=9, entries in prop::collection::vec(-1.0f64..1.0, 81)) {
        let form = psd_form(n, &entries);
        let sol = solve_partition_sdp(&form, &SdpOptions::default()).unwrap();
        let best = exhaustive_max(&form);
        let dual = sol.residuals.dual_bound;
        let scale = form.matrix().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        // The dual is a certified bound; the primal trails it by at most the stopping gap.
        prop_assert!(dual >= best - 1e-12 * dual.abs());
        prop_assert!(sol.objective >= best - 1e-6 * dual.abs().max(scale),
            "sdp {} < binary {}", sol.objective, best);
        prop_assert!(sol.residuals.dual_bound >= sol.objective - 1e-9 * scale);
        prop_assert!(sol.residuals.diag_deviation < 1e-8);
        prop_assert!(sol.residuals.min_eigenvalue > -1e-8);
    }

    #[test]
    fn sdp_scale_equivariant(n in 2usize..=8, entries in prop::collection::vec(-1.0f64..1.0, 64), c in 0.01f64..100.0) {
        let form = psd_form(n, &entries);
        let a = solve_partition_sdp(&form, &SdpOptions::default()).unwrap();
        let b = solve_partition_sdp(&form.scaled(c), &SdpOptions::default()).unwrap();
        let rel = (b.objective - c * a.objective).abs() / (c * a.objective.abs()).max(1e-300);
        prop_assert!(rel < 1e-5, "relative mismatch {rel:e}");
    }

    #[test]
    fn rounding_never_beats_relaxation((m, spec, kind) in config(), seed in any::<u64>()) {
        prop_assume!(m <= 30);
        let window = window_template(kind, m).unwrap();
        let config = NmDrcwConfig { trials: 100, seed, ..Default::default() };
        match design_nm_drcw_detailed(m, &spec, &window, &config) {
            Ok(run) => {
                let scale = run.form.matrix().iter().fold(0.0f64, |a, v| a.max(v.abs()));
                prop_assert!(run.rounding.objective <= run.sdp.residuals.dual_bound + 1e-9 * scale);
                prop_assert_eq!(run.rounding.objective, run.form.evaluate(&run.rounding.signs));
            }
            Err(drcw_core::Error::Degenerate(_)) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn same_seed_same_design((m, spec, kind) in config(), seed in any::<u64>()) {
        let window = window_template(kind, m).unwrap();
        let config = NmDrcwConfig { trials: 40, seed, ..Default::default() };
        let a = design_nm_drcw(m, &spec, &window, &config);
        let b = design_nm_drcw(m, &spec, &window, &config);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
            _ => prop_assert!(false, "outcomes differ"),
        }
    }
}

#[test]
fn prsl_floor_at_zero_doppler_for_bd() {
    let d = drcw_core::design::design_bd(20).unwrap();
    let pair = generate_golay_pair(16).unwrap();
    let v = prsl_at(&d, &pair, &[0.0], PrslNorm::Global).unwrap();
    assert_eq!(v[0], DB_FLOOR);
}

#[test]
fn quadratic_form_is_psd() {
    let spec = NullSpec::zero_only(5).with_null(0.6 * PI, 2);
    let basis = ConstraintBasis::for_spec(&spec, 20, FactorForm::Exact).unwrap();
    let w = window_template(WindowKind::Hamming, 20).unwrap();
    let form = quadratic_form(&basis, &w).unwrap();
    let eig = nalgebra::SymmetricEigen::new(form.matrix().clone());
    assert!(eig.eigenvalues.iter().all(|&l| l > -1e-12));
}
