use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use sinecap::capacity::{alpha_c, capacity_denominator, classical_alpha_c};
use sinecap::cli::{
    emit_csv, parse_csv, CapacityRecord, CircuitRecord, LimitRecord, McRecord, Record, SaddleRecord,
};
use sinecap::digamma_approx::{lorentzian_gaussian_gap, phi_tilde, phi_tilde_complex};
use sinecap::gardner_mc::{estimate_volume, sample_patterns, satisfies_all, PatternSet};
use sinecap::quantum_sim::{
    expect_pauli, full_circuit_output, output_state_lambda, rotation_angle, theta_gate_output_generic, Activation,
    Axis, BinaryPattern, WeightVector,
};
use sinecap::replica::{
    alpha_of_q, ln_psi, phi_psi_average, psi, psi_interval, psi_series, ReplicaPoint, SeriesConfig,
};
use sinecap::specfun::{digamma, erf, gauss_mass, GaussInterval};

fn cfg() -> SeriesConfig {
    SeriesConfig::default()
}

fn mass(a: f64, b: f64) -> f64 {
    gauss_mass(GaussInterval::new(a, b).unwrap())
}

fn signs(n: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1i8 } else { -1 }), n)
}

proptest! {
    #[test]
    fn gauss_mass_is_additive(mut v in prop::array::uniform3(-12.0f64..12.0)) {
        v.sort_by(f64::total_cmp);
        let [a, b, c] = v;
        prop_assert!((mass(a, b) + mass(b, c) - mass(a, c)).abs() <= 1e-13);
    }

    #[test]
    fn erf_is_odd(z in -6.0f64..6.0) {
        prop_assert_eq!(erf(-z), -erf(z));
    }

    #[test]
    fn digamma_conjugate_symmetry(re in -30.0f64..30.0, im in 0.01f64..30.0) {
        let z = Complex64::new(re, im);
        let a = digamma(z.conj()).unwrap();
        let b = digamma(z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
    }

    #[test]
    fn digamma_recurrence(re in 0.01f64..40.0, im in -40.0f64..40.0) {
        let z = Complex64::new(re, im);
        let r = digamma(z + 1.0).unwrap() - digamma(z).unwrap() - 1.0 / z;
        prop_assert!(r.norm() <= 1e-12 * (1.0 / z).norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn psi_normalization_pair(l in 0.2f64..20.0, q in 0.0f64..0.999, w in -5.0f64..5.0) {
        let (a, b) = (ReplicaPoint::new(l, q, w).unwrap(), ReplicaPoint::new(l, q, -w).unwrap());
        prop_assert!((psi_interval(a, &cfg()).unwrap() + psi_interval(b, &cfg()).unwrap() - 1.0).abs() <= 1e-11);
        prop_assert!((psi_series(a, &cfg()).unwrap() + psi_series(b, &cfg()).unwrap() - 1.0).abs() <= 1e-11);
    }

    #[test]
    fn psi_in_open_unit_interval(l in 0.2f64..20.0, q in 0.0f64..0.999, w in -5.0f64..5.0) {
        // 1 - Ψ(ω) = Ψ(-ω) can sit below f64 resolution next to 1, so both sides are checked in logs
        let a = ln_psi(ReplicaPoint::new(l, q, w).unwrap(), &cfg()).unwrap();
        let b = ln_psi(ReplicaPoint::new(l, q, -w).unwrap(), &cfg()).unwrap();
        prop_assert!(a.is_finite() && a <= 0.0 && b.is_finite() && b <= 0.0, "{} {}", a, b);
    }

    #[test]
    fn psi_is_periodic_in_omega(l in 0.2f64..20.0, q in 0.01f64..0.999, w in -5.0f64..5.0) {
        let shift = 2.0 * PI / (q.sqrt() * l);
        let a = psi(ReplicaPoint::new(l, q, w).unwrap(), &cfg()).unwrap();
        let b = psi(ReplicaPoint::new(l, q, w + shift).unwrap(), &cfg()).unwrap();
        prop_assert!((a - b).abs() <= 1e-10, "{} vs {}", a, b);
    }

    #[test]
    fn lorentzian_gap_nonnegative(l in 0.1f64..50.0, q in 0.0f64..0.9999, w in -5.0f64..5.0, k in -20i64..20) {
        prop_assert!(lorentzian_gaussian_gap(ReplicaPoint::new(l, q, w).unwrap(), k) >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phi_over_psi_average_negative(l in 0.2f64..8.0, q in 0.01f64..0.999) {
        let v = phi_psi_average(l, q, &cfg()).unwrap().value;
        prop_assert!(v < 0.0, "{}", v);
        prop_assert!(alpha_of_q(l, q, &cfg()).unwrap() > 0.0);
    }
}

#[test]
#[ignore = "alpha(lambda, q) is not monotone for larger lambda: at lambda=5, alpha(0.5) = 2.6e4 but alpha(0.9) = 48.6"]
fn alpha_of_q_increasing_in_q() {
    let qs = [1e-6, 1e-3, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999];
    for l in [0.5, 1.0, 2.0, 5.0] {
        let a: Vec<f64> = qs.iter().map(|&q| alpha_of_q(l, q, &cfg()).unwrap()).collect();
        assert!(a.windows(2).all(|w| w[1] > w[0]), "lambda={l}: {a:?}");
    }
}

#[test]
fn alpha_of_q_shape() {
    let a = |l: f64, q: f64| alpha_of_q(l, q, &cfg()).unwrap();
    // small lambda: increasing in q
    let qs = [1e-3, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999];
    let small: Vec<f64> = qs.iter().map(|&q| a(0.5, q)).collect();
    assert!(small.windows(2).all(|w| w[1] > w[0]), "{small:?}");
    // lambda = 5: rises, peaks at intermediate q, dips, then rises again toward q = 1
    let (low, peak, dip, high) = (a(5.0, 1e-8), a(5.0, 0.1), a(5.0, 0.9), a(5.0, 0.9999));
    assert!(low < dip && dip < high && high < peak, "{low} {peak} {dip} {high}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn capacity_at_least_classical(e in -3.0f64..3.0) {
        let l = 10f64.powf(e);
        prop_assert!(alpha_c(l, 1e-12).unwrap() >= 2.0 - 1e-9);
        prop_assert!(capacity_denominator(l, 1e-12).unwrap().value <= 0.5 + 1e-12);
    }

    #[test]
    fn classical_capacity_decreasing_in_margin(k in 0.0f64..4.9, dk in 0.01f64..0.1) {
        prop_assert!(classical_alpha_c(k + dk).unwrap() < classical_alpha_c(k).unwrap());
    }

    #[test]
    fn phi_tilde_is_real(l in 1.0f64..20.0, q in 0.5f64..0.999, w in -3.0f64..3.0) {
        let v = phi_tilde_complex(ReplicaPoint::new(l, q, w).unwrap()).unwrap();
        prop_assert!(v.im.abs() <= 1e-10 * v.re.abs().max(1.0));
    }
}

#[test]
fn capacity_nondecreasing_on_log_grid() {
    let grid: Vec<f64> = (0..200).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 199.0)).collect();
    let a: Vec<f64> = grid.iter().map(|&l| alpha_c(l, 1e-12).unwrap()).collect();
    // flat region sits at 2 to rounding
    assert!(a.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{a:?}");
}

#[test]
fn phi_tilde_eventually_decays() {
    // past the first few doublings the values shrink until they reach the rounding floor
    for (q, w) in [(0.9, 0.5), (0.95, -1.2), (0.99, 2.0)] {
        let v: Vec<f64> = (0..6)
            .map(|k| phi_tilde(ReplicaPoint::new(10.0 * 2f64.powi(k), q, w).unwrap()).unwrap().abs())
            .collect();
        let tail = &v[2..];
        let floor = 1e-11;
        assert!(tail.windows(2).all(|p| p[1] < p[0] || p[1] < floor), "{v:?}");
        assert!(v[5] < 1e-6, "{v:?}");
    }
}

fn weight_and_pattern(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<i8>)> {
    (prop::collection::vec(-3.0f64..3.0, n), signs(n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn output_states_are_valid(wx in (1usize..9).prop_flat_map(weight_and_pattern), lambda in 0.0f64..20.0) {
        let (w, x) = wx;
        prop_assume!(w.iter().any(|v| *v != 0.0));
        let (w, x) = (WeightVector::new(w).unwrap(), BinaryPattern::new(x).unwrap());
        let rho = output_state_lambda(&w, &x, lambda).unwrap();
        prop_assert!(rho.min_eigenvalue() >= -1e-12);
        let m = rho.rho();
        prop_assert!((m[0][0].re + m[1][1].re - 1.0).abs() <= 1e-12);
        prop_assert!((m[0][1] - m[1][0].conj()).norm() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn circuit_matches_closed_form(wx in (1usize..9).prop_flat_map(weight_and_pattern), lambda in 0.0f64..20.0) {
        let (w, x) = wx;
        prop_assume!(w.iter().any(|v| *v != 0.0));
        let (w, x) = (WeightVector::new(w).unwrap(), BinaryPattern::new(x).unwrap());
        let full = full_circuit_output(&w, &x, lambda).unwrap();
        prop_assert!(full.max_entry_gap(&output_state_lambda(&w, &x, lambda).unwrap()) <= 1e-12);
        let theta = rotation_angle(&w, &x, lambda).unwrap();
        prop_assert!((expect_pauli(&full, Axis::X) - theta.sin()).abs() <= 1e-12);
        prop_assert!((expect_pauli(&full, Axis::Z) + theta.cos()).abs() <= 1e-12);
    }

    #[test]
    fn theta_gate_readout(wx in (1usize..9).prop_flat_map(weight_and_pattern), xi in prop::bool::ANY) {
        let (w, x) = wx;
        let (w, x) = (WeightVector::new(w).unwrap(), BinaryPattern::new(x).unwrap());
        let h = w.dot(&x).unwrap();
        prop_assume!(h != 0.0);
        let z = expect_pauli(&theta_gate_output_generic(&w, &x, Activation::Heaviside).unwrap(), Axis::Z);
        let step = |v: f64| if v > 0.0 { 1.0 } else { 0.0 };
        prop_assert_eq!(z, 2.0 * step(h) - 1.0);
        let xi = if xi { 1.0 } else { -1.0 };
        prop_assert_eq!(step(xi * z), step(xi * h));
    }
}

fn pattern_case() -> impl Strategy<Value = (PatternSet, Vec<f64>)> {
    (1usize..10, 0usize..8).prop_flat_map(|(n, p)| {
        (signs(n * p), signs(p), prop::collection::vec(-2.0f64..2.0, n))
            .prop_map(move |(x, y, w)| (PatternSet::new(n, x, y).unwrap(), w))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn label_symmetry((ps, w) in pattern_case(), lambda in 0.0f64..10.0) {
        prop_assume!(w.iter().any(|v| *v != 0.0));
        let w = WeightVector::new(w).unwrap();
        prop_assert_eq!(satisfies_all(&w, &ps, lambda).unwrap(), satisfies_all(&w, &ps.negated(), lambda).unwrap());
    }

    #[test]
    fn small_lambda_is_classical((ps, w) in pattern_case()) {
        prop_assume!(w.iter().any(|v| *v != 0.0));
        let w = WeightVector::new(w).unwrap();
        let classical = (0..ps.p()).all(|mu| {
            let h: f64 = w.weights().iter().zip(ps.pattern(mu)).map(|(a, &b)| a * b as f64).sum();
            ps.label(mu) as f64 * h > 0.0
        });
        prop_assert_eq!(satisfies_all(&w, &ps, 1e-6).unwrap(), classical);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn volume_nested_and_deterministic(n in 2usize..12, p in 1usize..12, lambda in 0.0f64..8.0, seed in any::<u64>()) {
        let ps = sample_patterns(n, p, seed).unwrap();
        let full = estimate_volume(&ps, lambda, 2000, seed ^ 1).unwrap();
        prop_assert_eq!(full, estimate_volume(&ps, lambda, 2000, seed ^ 1).unwrap());
        let mut prev = 1.0;
        for k in 0..=p {
            let v = estimate_volume(&ps.prefix(k), lambda, 2000, seed ^ 1).unwrap().fraction;
            prop_assert!(v <= prev);
            prev = v;
        }
        prop_assert_eq!(prev, full.fraction);
    }
}

fn real() -> impl Strategy<Value = f64> {
    prop_oneof![
        8 => any::<f64>().prop_filter("finite", |v| v.is_finite()),
        1 => Just(f64::INFINITY),
        1 => Just(f64::NEG_INFINITY),
    ]
}

fn same(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}

fn round_trip<R: Record>(rows: &[R]) -> Vec<R> {
    parse_csv(&emit_csv(rows, Some(3))).unwrap()
}

proptest! {
    #[test]
    fn capacity_records_round_trip(v in prop::array::uniform3(real()), k in any::<usize>()) {
        let r = CapacityRecord { lambda: v[0], alpha_c: v[1], dalpha_dlambda: v[2], k_used: k };
        prop_assert_eq!(round_trip(std::slice::from_ref(&r)), vec![r]);
    }

    #[test]
    fn saddle_records_round_trip(v in prop::array::uniform5(real()), root in any::<usize>()) {
        let r = SaddleRecord { lambda: v[0], alpha: v[1], root, q_star: v[2], g: v[3], residual: v[4] };
        prop_assert_eq!(round_trip(std::slice::from_ref(&r)), vec![r]);
    }

    #[test]
    fn limit_records_round_trip(v in prop::array::uniform6(real()), pass in any::<bool>()) {
        let r = LimitRecord {
            lambda: v[0], extrapolated: v[1], closed_form: v[2], rel_gap: v[3], gate: v[4], pass,
            boundary_distance: v[5], boundary_rel_gap: v[0],
        };
        prop_assert_eq!(round_trip(std::slice::from_ref(&r)), vec![r]);
    }

    #[test]
    fn mc_records_round_trip(v in prop::array::uniform6(real()), p in any::<usize>(), nan in any::<bool>()) {
        let r = McRecord {
            alpha: v[0], p, fraction_positive: v[1],
            mean_log_fraction: if nan { f64::NAN } else { v[2] },
            q25: v[3], q50: v[4], q75: v[5],
        };
        let back = round_trip(std::slice::from_ref(&r)).remove(0);
        prop_assert!(same(back.mean_log_fraction, r.mean_log_fraction));
        prop_assert_eq!((back.alpha, back.p, back.fraction_positive), (r.alpha, r.p, r.fraction_positive));
        prop_assert_eq!((back.q25, back.q50, back.q75), (r.q25, r.q50, r.q75));
    }

    #[test]
    fn circuit_records_round_trip(n in any::<usize>(), cases in any::<usize>(), v in prop::array::uniform2(real()), pass in any::<bool>()) {
        let r = CircuitRecord { n, cases, max_entry_gap: v[0], max_sigma_x_gap: v[1], pass };
        prop_assert_eq!(round_trip(std::slice::from_ref(&r)), vec![r]);
    }
}
