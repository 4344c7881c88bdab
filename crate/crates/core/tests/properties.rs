use approx::assert_relative_eq;
use nalgebra::Matrix4;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

use lineuler::field::SpatialGrid;
use lineuler::model::{Branch, GasParameters, Profile, Scenario, WaveMode};
use lineuler::phase_spaces::{compute_M, compute_m, sampled_sups, Inverter};
use lineuler::solutions::{
    closed_form_resonant, evaluate_forced, evaluate_instant, initial_data, ForcedField, InitialDataField, InstantField,
    QuadratureSpec,
};
use lineuler::spectral::{forced_propagator_matrix, propagate, propagator_matrix, SpectralCoefficients, Wave};
use lineuler::verify::{curl_components, duhamel_oracle, pde_residual_convergence};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, rng_seed: RngSeed::Fixed(0x5eed), ..ProptestConfig::default() }
}

fn gas() -> GasParameters {
    GasParameters::reference_air()
}

fn mode() -> impl Strategy<Value = WaveMode> {
    (0.4..1.5_f64, any::<bool>(), -1.5..1.5_f64, -1.5..1.5_f64)
        .prop_map(|(k, neg, l, m)| WaveMode::new(if neg { -k } else { k }, l, m))
}

fn modes() -> impl Strategy<Value = [WaveMode; 4]> {
    [mode(), mode(), mode(), mode()]
}

fn branch() -> impl Strategy<Value = Branch> {
    prop::sample::select(Branch::ALL.to_vec())
}

fn smooth_profile() -> impl Strategy<Value = Profile> {
    prop_oneof![
        Just(Profile::Sin),
        Just(Profile::Cos),
        (-1.0..1.0_f64).prop_map(|a| Profile::Exp { a }),
        (0.2..3.0_f64).prop_map(|r| Profile::SmoothBump { r }),
        (-3.0..3.0_f64).prop_map(|c| Profile::Sin.scaled(c)),
        (-0.5..0.5_f64).prop_map(|a| Profile::sum(vec![Profile::Cos, Profile::Exp { a }.scaled(0.5)])),
    ]
}

/// Smooth profiles without flat stretches, so residuals never vanish.
fn analytic_profile() -> impl Strategy<Value = Profile> {
    prop_oneof![
        Just(Profile::Sin),
        Just(Profile::Cos),
        (0.1..1.0_f64, any::<bool>()).prop_map(|(a, neg)| Profile::Exp { a: if neg { -a } else { a } }),
        (-0.5..0.5_f64).prop_map(|a| Profile::sum(vec![Profile::Cos, Profile::Exp { a }.scaled(0.5)])),
    ]
}

fn bounded_profile() -> impl Strategy<Value = Profile> {
    prop_oneof![
        Just(Profile::Zero),
        Just(Profile::Sin),
        Just(Profile::Cos),
        (0.2..3.0_f64).prop_map(|r| Profile::SmoothBump { r }),
        (-3.0..0.0_f64, 0.1..4.0_f64).prop_map(|(a, w)| Profile::TruncatedSin { a, b: a + w }),
        (-2.0..2.0_f64).prop_map(|c| Profile::Cos.scaled(c)),
        prop::collection::vec(-2.0..2.0_f64, 2..8).prop_map(|v| {
            Profile::tabulated(v.iter().enumerate().map(|(i, y)| (i as f64 - 3.0, *y)).collect()).unwrap()
        }),
    ]
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    [-5.0..5.0_f64, -5.0..5.0_f64, -5.0..5.0_f64]
}

fn close(a: [f64; 4], b: [f64; 4], rel: f64) -> bool {
    let scale = a.iter().chain(b.iter()).fold(1.0_f64, |m, v| m.max(v.abs()));
    (0..4).all(|i| (a[i] - b[i]).abs() <= rel * scale)
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn derivative_matches_central_difference(p in smooth_profile(), xi in -5.0..5.0_f64) {
        let d = p.derivative(xi).unwrap();
        let fd = |h: f64| (p.value(xi + h) - p.value(xi - h)) / (2.0 * h);
        let (e1, e2) = ((fd(1e-3) - d).abs(), (fd(5e-4) - d).abs());
        let scale = 1.0 + p.value(xi).abs() + d.abs();
        prop_assert!(e1 <= 1e-4 * scale, "{p:?} at {xi}: {e1}");
        prop_assert!(e2 <= 0.3 * e1 + 1e-10 * scale, "{p:?} at {xi}: {e1} then {e2}");
    }

    #[test]
    fn sup_bounds_samples(p in bounded_profile(), xs in prop::collection::vec(-20.0..20.0_f64, 200)) {
        let sup = p.sup().to_f64();
        for xi in xs {
            prop_assert!(p.value(xi).abs() <= sup + 1e-12);
        }
    }

    #[test]
    fn speeds_ignore_rotations_fixing_k(m in mode(), angle in 0.0..std::f64::consts::TAU) {
        let (s, c) = angle.sin_cos();
        let rotated = WaveMode::new(m.k, c * m.l - s * m.m, s * m.l + c * m.m);
        for b in Branch::ALL {
            let (a, r) = (m.characteristic_speed(b, &gas()), rotated.characteristic_speed(b, &gas()));
            prop_assert!((a - r).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn instant_is_linear(
        ms in modes(),
        f in [smooth_profile(), smooth_profile(), smooth_profile(), smooth_profile()],
        g in [smooth_profile(), smooth_profile(), smooth_profile(), smooth_profile()],
        c in -3.0..3.0_f64,
        [x, y, z] in point(),
        t in 0.0..0.02_f64,
    ) {
        let sf = Scenario::new(gas(), ms, f.clone()).unwrap();
        let sg = Scenario::new(gas(), ms, g.clone()).unwrap();
        let sum = [0, 1, 2, 3].map(|i| Profile::sum(vec![f[i].clone(), g[i].clone()]));
        let ssum = Scenario::new(gas(), ms, sum).unwrap();
        let scaled = Scenario::new(gas(), ms, f.clone().map(|p| p.scaled(c))).unwrap();
        let (a, b) = (evaluate_instant(&sf, x, y, z, t).components(), evaluate_instant(&sg, x, y, z, t).components());
        let added = [0, 1, 2, 3].map(|i| a[i] + b[i]);
        prop_assert!(close(evaluate_instant(&ssum, x, y, z, t).components(), added, 1e-12));
        prop_assert!(close(evaluate_instant(&scaled, x, y, z, t).components(), a.map(|v| c * v), 1e-12));
    }

    #[test]
    fn forced_is_linear(
        m in mode(),
        b in branch(),
        c in -3.0..3.0_f64,
        omega in -600.0..600.0_f64,
        [x, y, z] in point(),
        t in 0.01..1.0_f64,
    ) {
        let q = QuadratureSpec::default();
        let sin = Scenario::single_branch(gas(), b, m, Profile::Sin).unwrap().with_forcing(omega).unwrap();
        let cos = sin.with_profiles(profiles_on(b, Profile::Cos)).unwrap();
        let mix = sin.with_profiles(profiles_on(b, Profile::sum(vec![Profile::Sin, Profile::Cos.scaled(c)]))).unwrap();
        let (a, k) = (
            evaluate_forced(&sin, x, y, z, t, &q).unwrap().components(),
            evaluate_forced(&cos, x, y, z, t, &q).unwrap().components(),
        );
        let expected = [0, 1, 2, 3].map(|i| a[i] + c * k[i]);
        prop_assert!(close(evaluate_forced(&mix, x, y, z, t, &q).unwrap().components(), expected, 1e-9));
    }

    #[test]
    fn single_branch_is_a_plane_wave(
        m in mode(),
        b in branch(),
        p in smooth_profile(),
        [x, y, z] in point(),
        dir in [-1.0..1.0_f64, -1.0..1.0_f64, -1.0..1.0_f64],
        step in -3.0..3.0_f64,
        t in 0.0..0.02_f64,
    ) {
        let s = Scenario::single_branch(gas(), b, m, p).unwrap();
        // Project `dir` onto the plane orthogonal to the wave vector.
        let kv = [m.k, m.l, m.m];
        let dot = (0..3).map(|i| dir[i] * kv[i]).sum::<f64>() / (0..3).map(|i| kv[i] * kv[i]).sum::<f64>();
        let o = [0, 1, 2].map(|i| step * (dir[i] - dot * kv[i]));
        let a = evaluate_instant(&s, x, y, z, t).components();
        let moved = evaluate_instant(&s, x + o[0], y + o[1], z + o[2], t).components();
        prop_assert!(close(a, moved, 1e-10));
    }

    #[test]
    fn instant_at_zero_is_initial_data(
        ms in modes(),
        f in [smooth_profile(), smooth_profile(), smooth_profile(), smooth_profile()],
        [x, y, z] in point(),
    ) {
        let s = Scenario::new(gas(), ms, f).unwrap();
        prop_assert_eq!(evaluate_instant(&s, x, y, z, 0.0).components(), initial_data(&s, x, y, z));
    }

    #[test]
    fn forced_vanishes_before_switch_on(
        ms in modes(),
        f in [bounded_profile(), bounded_profile(), bounded_profile(), bounded_profile()],
        omega in -600.0..600.0_f64,
        [x, y, z] in point(),
        t in -100.0..0.0_f64,
    ) {
        let s = Scenario::new(gas(), ms, f).unwrap().with_forcing(omega).unwrap();
        prop_assert_eq!(evaluate_forced(&s, x, y, z, t, &QuadratureSpec::default()).unwrap().components(), [0.0; 4]);
        prop_assert_eq!(evaluate_forced(&s, x, y, z, 0.0, &QuadratureSpec::default()).unwrap().components(), [0.0; 4]);
    }

    #[test]
    fn acoustic_fields_are_curl_free(
        m in mode(),
        slow in any::<bool>(),
        c in -2.0..2.0_f64,
        p in [-2.0..2.0_f64, -2.0..2.0_f64, -2.0..2.0_f64],
        t in 0.0..0.1_f64,
    ) {
        let b = if slow { Branch::AcousticSlow } else { Branch::AcousticFast };
        let s = Scenario::single_branch(gas(), b, m, Profile::sum(vec![Profile::Sin, Profile::Cos.scaled(c)])).unwrap();
        prop_assert!(curl_components(&InstantField::new(s), p, t, 1e-5).unwrap().max_abs() <= 1e-8);
    }

    #[test]
    fn constants_ignore_acoustic_sign_flips(ms in modes(), which in 0..2_usize) {
        let mut one = ms;
        one[which] = ms[which].negated();
        assert_relative_eq!(compute_m(&ms, &gas()).unwrap(), compute_m(&one, &gas()).unwrap(), max_relative = 1e-14);
        // A single flip changes |Δ|; flipping both acoustic modes only changes its sign.
        let mut both = ms;
        both[0] = ms[0].negated();
        both[1] = ms[1].negated();
        match (compute_M(&ms, &gas()), compute_M(&both, &gas())) {
            (Ok(a), Ok(b)) => assert_relative_eq!(a, b, max_relative = 1e-12),
            (a, b) => prop_assert_eq!(a.is_ok(), b.is_ok()),
        }
    }

    #[test]
    fn initial_data_bounded_by_m(
        ms in modes(),
        f in [bounded_profile(), bounded_profile(), bounded_profile(), bounded_profile()],
    ) {
        let s = Scenario::new(gas(), ms, f.clone()).unwrap();
        let sup = f.iter().map(|p| p.sup().to_f64()).fold(0.0, f64::max);
        let m = compute_m(&ms, &gas()).unwrap();
        let grid = SpatialGrid::cube([9, 9, 9], -6.0, 6.0);
        for t in [0.0, 0.7, 5.0] {
            let sampled = sampled_sups(&InstantField::new(s.clone()), &grid, t).unwrap();
            prop_assert!(sampled.iter().all(|v| *v <= m * sup + 1e-9));
        }
    }

    #[test]
    fn forced_bounded_by_m_t(
        ms in modes(),
        f in [bounded_profile(), bounded_profile(), bounded_profile(), bounded_profile()],
        omega in -600.0..600.0_f64,
        t in 0.01..2.0_f64,
    ) {
        let s = Scenario::new(gas(), ms, f.clone()).unwrap().with_forcing(omega).unwrap();
        let sup = f.iter().map(|p| p.sup().to_f64()).fold(0.0, f64::max);
        let m = compute_m(&ms, &gas()).unwrap();
        let field = ForcedField::new(s, QuadratureSpec::default()).unwrap();
        let sampled = sampled_sups(&field, &SpatialGrid::cube([4, 4, 4], -3.0, 3.0), t).unwrap();
        prop_assert!(sampled.iter().all(|v| *v <= m * t * sup * (1.0 + 1e-9)));
    }

    #[test]
    fn inversion_recovers_profiles(
        ms in modes(),
        f in [bounded_profile(), bounded_profile(), bounded_profile(), bounded_profile()],
        xi in -5.0..5.0_f64,
    ) {
        let Ok(inv) = Inverter::new(&ms, &gas()) else { return Ok(()) };
        let s = Scenario::new(gas(), ms, f.clone()).unwrap();
        let got = inv.profiles_at(&InitialDataField::new(s), xi).unwrap();
        // Forward error of the data roundoff through the inverse map.
        let sup = f.iter().map(|p| p.sup().to_f64()).fold(0.0, f64::max);
        let big_m = compute_M(&ms, &gas()).unwrap();
        let tol = 1e-9_f64.max(64.0 * f64::EPSILON * big_m * compute_m(&ms, &gas()).unwrap() * sup);
        for i in 0..4 {
            prop_assert!((got[i] - f[i].value(xi)).abs() <= tol, "{i}: {} vs {}", got[i], f[i].value(xi));
        }
    }

    #[test]
    fn resonant_closed_form_matches_oracle(
        m in mode(),
        [x, y, z] in point(),
        t in 0.0..1.0_f64,
    ) {
        let s = Scenario::single_branch(gas(), Branch::AcousticSlow, m, Profile::Sin).unwrap();
        let s = s.with_forcing(m.characteristic_speed(Branch::AcousticSlow, &gas())).unwrap();
        let q = QuadratureSpec::default();
        let exact = closed_form_resonant(&s, x, y, z, t).unwrap().components();
        let oracle = duhamel_oracle(&s, x, y, z, t, &q).unwrap().components();
        prop_assert!(close(exact, oracle, 1e-8));
    }

    #[test]
    fn instant_residual_is_second_order(
        m in mode(),
        b in branch(),
        p in analytic_profile(),
        t in 0.0..0.01_f64,
    ) {
        let s = Scenario::single_branch(gas(), b, m, p).unwrap();
        let r = pde_residual_convergence(&InstantField::new(s.clone()), s.gas(), &SpatialGrid::cube([2, 2, 2], -0.5, 0.5), t, 1e-3, None).unwrap();
        match r.order {
            Some(order) => prop_assert!((1.8..=2.2).contains(&order), "{r:?}"),
            // Every equation already at rounding level.
            None => prop_assert!(r.max_scaled <= 1e-8, "{r:?}"),
        }
    }
}

fn profiles_on(b: Branch, p: Profile) -> [Profile; 4] {
    let mut out = [Profile::Zero, Profile::Zero, Profile::Zero, Profile::Zero];
    out[b.index()] = p;
    out
}

fn alpha() -> impl Strategy<Value = [f64; 3]> {
    [-3.0..3.0_f64, -3.0..3.0_f64, -3.0..3.0_f64].prop_filter("nonzero", |a| a.iter().any(|v| v.abs() > 1e-3))
}

fn coeffs() -> impl Strategy<Value = [Complex64; 4]> {
    prop::array::uniform4((-1.0..1.0_f64, -1.0..1.0_f64)).prop_map(|c| c.map(|(re, im)| Complex64::new(re, im)))
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn propagator_eigenvalues_on_unit_circle(a in alpha(), t in 0.0..10.0_f64) {
        // Similar to the propagator, and unitary.
        let m = propagator_matrix(a, &gas(), t).unwrap().energy_scaled(&gas());
        let ev = Matrix4::from_fn(|i, j| m.entries[i][j]).eigenvalues().unwrap();
        for i in 0..4 {
            prop_assert!((ev[i].norm() - 1.0).abs() <= 1e-12, "{}", ev[i].norm());
        }
    }

    #[test]
    fn propagator_semigroup(a in alpha(), c in coeffs(), t1 in 0.0..10.0_f64, t2 in 0.0..10.0_f64) {
        let start = SpectralCoefficients::new(a, c);
        let direct = propagate(&start, &gas(), t1 + t2).unwrap();
        let mid = SpectralCoefficients::new(a, propagate(&start, &gas(), t1).unwrap());
        let chained = propagate(&mid, &gas(), t2).unwrap();
        // Compared in the energy norm (v, P/z), which the propagator preserves.
        let w = [1.0, 1.0, 1.0, 1.0 / gas().impedance()];
        let scale = (0..4).fold(1.0_f64, |m, i| m.max(w[i] * direct[i].norm()));
        for i in 0..4 {
            prop_assert!(w[i] * (direct[i] - chained[i]).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn propagator_at_zero_is_identity(a in alpha(), c in coeffs()) {
        prop_assert_eq!(propagate(&SpectralCoefficients::new(a, c), &gas(), 0.0).unwrap(), c);
    }

    #[test]
    fn plane_wave_paths_agree(m in mode(), b in branch(), [x, y, z] in point(), t in 0.0..1.0_f64) {
        let s = Scenario::single_branch(gas(), b, m, Profile::Sin).unwrap();
        let coef = lineuler::solutions::branch_coefficients(&s)[b.index()];
        let u = propagate(&SpectralCoefficients::from_real([m.k, m.l, m.m], coef), &gas(), t).unwrap();
        let carrier = Complex64::new(0.0, m.phase(x, y, z)).exp();
        let physical = evaluate_instant(&s, x, y, z, t).components();
        for i in 0..4 {
            prop_assert!(((u[i] * carrier).im - physical[i]).abs() <= 1e-9);
        }
    }

    #[test]
    fn forced_propagator_continuous_at_resonance(
        a in alpha(),
        w in prop::sample::select(Wave::ALL.to_vec()),
        t in 0.5..5.0_f64,
        d in prop::sample::select(vec![1e-7, -1e-7]),
    ) {
        let kappa = w.frequency(a, &gas());
        let limit = forced_propagator_matrix(a, &gas(), -kappa, t).unwrap();
        let near = forced_propagator_matrix(a, &gas(), -kappa + d, t).unwrap();
        let scale = limit.entries.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((near.entries[i][j] - limit.entries[i][j]).norm() <= 1e-6 * scale);
            }
        }
    }
}
