use std::f64::consts::{FRAC_PI_2, PI, TAU};

use holonomic::analytic::{df_dkappa_at_zero, fid2_relative, GatePath, TargetGate};
use holonomic::pathfinder::{
    measure_rotation, solve_single_loop, solve_single_shot, solve_two_loop, Orientation,
    PathConstraints,
};
use holonomic::qmath::{
    cis, expm, expm_eigen, expm_lambda, gate_fidelity, projective_distance_qubit,
    HermitianGenerator, Unitary, Vec3, C64,
};
use holonomic::schemes::{
    decompose_bright, phi_b_of, two_loop_errored, two_loop_errored_relative,
    two_loop_errored_relative_factored, LoopParams, RabiError, SingleLoopPath, SingleShotPath,
    TwoLoopPath,
};
use proptest::prelude::*;

fn loop_params() -> impl Strategy<Value = LoopParams> {
    (0.0..=PI, 0.0..TAU, 0.0..TAU).prop_map(|(t, p, f)| LoopParams::new(t, p, f).unwrap())
}

fn two_loop() -> impl Strategy<Value = TwoLoopPath> {
    (loop_params(), loop_params()).prop_map(|(a, b)| TwoLoopPath::new(a, b))
}

fn single_loop() -> impl Strategy<Value = SingleLoopPath> {
    (0.0..=PI, 0.0..TAU, 0.0..TAU, 0.0..TAU)
        .prop_map(|(t, p, f, g)| SingleLoopPath::new(t, p, f, g).unwrap())
}

fn single_shot() -> impl Strategy<Value = SingleShotPath> {
    (0.0..=FRAC_PI_2, 0.0..TAU, 0.0..TAU, -FRAC_PI_2..=FRAC_PI_2)
        .prop_map(|(a, b0, b1, g)| SingleShotPath::new(a, b0, b1, g).unwrap())
}

fn any_path() -> impl Strategy<Value = GatePath> {
    prop_oneof![
        two_loop().prop_map(GatePath::TwoLoop),
        single_loop().prop_map(GatePath::SingleLoop),
        single_shot().prop_map(GatePath::SingleShot),
    ]
}

fn epsilon() -> impl Strategy<Value = f64> {
    -RabiError::BOUND..=RabiError::BOUND
}

fn unit_axis() -> impl Strategy<Value = Vec3> {
    (-1.0f64..=1.0, 0.0..TAU).prop_map(|(z, az): (f64, f64)| {
        let r = (1.0 - z * z).max(0.0).sqrt();
        Vec3::new(r * az.cos(), r * az.sin(), z)
    })
}

fn target() -> impl Strategy<Value = TargetGate> {
    (0.0..=FRAC_PI_2, unit_axis()).prop_map(|(t, m)| TargetGate::normalized(t, m).unwrap())
}

proptest! {
    #[test]
    fn gates_are_unitary(path in any_path(), eps in epsilon()) {
        let err = RabiError::common(eps).unwrap();
        prop_assert!(path.ideal().unitarity_defect() < 1e-12);
        prop_assert!(path.errored(&err).unwrap().unitarity_defect() < 1e-12);
    }

    #[test]
    fn ideal_gates_keep_excited_state(path in any_path()) {
        prop_assert!(path.ideal().off_block_magnitude() < 1e-13);
    }

    #[test]
    fn zero_error_reduces_to_ideal(path in any_path()) {
        let u = path.errored(&RabiError::none()).unwrap();
        prop_assert!(u.distance(&path.ideal()) < 1e-13);
        prop_assert!((path.exact_fidelity(&RabiError::none()).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn fidelity_bounded(path in any_path(), eps in epsilon()) {
        let f = path.exact_fidelity(&RabiError::common(eps).unwrap()).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn common_phase_is_a_gauge(path in two_loop(), shift in 0.0..TAU, eps in epsilon()) {
        let err = RabiError::common(eps).unwrap();
        let shifted = path.phase_shifted(shift).unwrap();
        let a = GatePath::TwoLoop(path).exact_fidelity(&err).unwrap();
        let b = GatePath::TwoLoop(shifted).exact_fidelity(&err).unwrap();
        prop_assert!((a - b).abs() < 1e-13);
        let pa = phi_b_of(&path).cos_product();
        let pb = phi_b_of(&shifted).cos_product();
        prop_assert!((pa - pb).abs() < 1e-13);
    }

    #[test]
    fn single_loop_phase_gauge(path in single_loop(), shift in 0.0..TAU, eps in epsilon()) {
        let err = RabiError::common(eps).unwrap();
        let a = GatePath::SingleLoop(path).exact_fidelity(&err).unwrap();
        let shifted = path.phase_shifted(shift).unwrap();
        let b = GatePath::SingleLoop(shifted).exact_fidelity(&err).unwrap();
        prop_assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn fidelity_ignores_global_phase(path in any_path(), eps in epsilon(), chi in 0.0..TAU) {
        let ideal = path.ideal();
        let errored = path.errored(&RabiError::common(eps).unwrap()).unwrap();
        let rotated = Unitary::try_new(errored.matrix() * cis(chi)).unwrap();
        let a = gate_fidelity(&ideal, &errored);
        let b = gate_fidelity(&ideal, &rotated);
        prop_assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn common_error_fidelity_is_even(path in two_loop(), eps in epsilon()) {
        let plus = GatePath::TwoLoop(path).exact_fidelity(&RabiError::common(eps).unwrap());
        let minus = GatePath::TwoLoop(path).exact_fidelity(&RabiError::common(-eps).unwrap());
        prop_assert!((plus.unwrap() - minus.unwrap()).abs() < 1e-13);
    }

    #[test]
    fn relative_forms_agree(path in two_loop(), eps in epsilon(), kappa in epsilon()) {
        let err = RabiError::new(eps, kappa).unwrap();
        let direct = two_loop_errored_relative(&path, &err);
        let factored = two_loop_errored_relative_factored(&path, &err);
        prop_assert!(direct.distance(&factored) < 1e-12);
    }

    #[test]
    fn relative_reduces_to_common(path in two_loop(), eps in epsilon()) {
        let err = RabiError::common(eps).unwrap();
        let common = two_loop_errored(&path, &err).unwrap();
        prop_assert!(two_loop_errored_relative(&path, &err).distance(&common) < 1e-12);
        let (_, f) = fid2_relative(&path, &err);
        let plain = GatePath::TwoLoop(path).analytic_fidelity(&err).unwrap();
        prop_assert!((f - plain).abs() < 1e-12);
    }

    #[test]
    fn bright_decomposition_round_trip(path in two_loop()) {
        let (l1, l2) = (path.loop1, path.loop2);
        let dec = decompose_bright(&l1.bright(), &l1.dark(), l1.phi(), &l2.bright(), l2.phi());
        let rebuilt = dec.reconstruct(&l1.bright(), &l1.dark(), l1.phi());
        let expected = l2.bright().scaled(cis(l2.phi()));
        let gap = rebuilt.add(&expected.scaled(C64::new(-1.0, 0.0))).norm();
        prop_assert!(gap < 1e-12, "gap {gap:e}");
        prop_assert!((0.0..=PI).contains(&dec.eta));
    }

    #[test]
    fn lambda_closed_form_matches_eigen(
        w0 in (-2.0f64..2.0, -2.0f64..2.0),
        w1 in (-2.0f64..2.0, -2.0f64..2.0),
        a in -3.0f64..3.0,
        angle in -10.0f64..10.0,
    ) {
        let g = HermitianGenerator::lambda(
            [C64::new(w0.0, w0.1), C64::new(w1.0, w1.1)],
            a,
        );
        let closed = expm_lambda(&g, angle).unwrap();
        let eigen = expm_eigen(&g, angle);
        prop_assert!(closed.distance(&eigen) < 1e-12);
        prop_assert!(expm(&g, angle).unitarity_defect() < 1e-12);
    }

    #[test]
    fn two_loop_solution_round_trips(
        t in target(),
        balanced in any::<bool>(),
        minus in any::<bool>(),
    ) {
        let constraints = PathConstraints {
            force_phi_b: Some(PI),
            force_balanced: balanced,
            orientation: if minus { Orientation::Minus } else { Orientation::Plus },
        };
        let sol = solve_two_loop(&t, &constraints);
        let u = GatePath::TwoLoop(sol.path).ideal();
        prop_assert!(projective_distance_qubit(&u, &t.unitary()).unwrap() < 1e-10);
        let dec = phi_b_of(&sol.path);
        prop_assert!((dec.phi_b.unwrap() - PI).abs() < 1e-10);
        if balanced {
            let (a, b) = (sol.path.loop1.theta(), sol.path.loop2.theta());
            prop_assert!((a.cos() + b.cos()).abs() < 1e-12);
        }
        let measured = measure_rotation(&u).unwrap();
        prop_assert!((measured.theta_gate - t.theta_gate()).abs() < 1e-10);
        if t.theta_gate() > 1e-6 && t.theta_gate() < FRAC_PI_2 - 1e-6 {
            prop_assert!((measured.axis().unwrap() - t.axis()).norm() < 1e-9);
        }
    }

    #[test]
    fn balanced_paths_are_kappa_stationary(t in target(), eps in epsilon()) {
        let path = solve_two_loop(&t, &PathConstraints::default()).path;
        prop_assert!(df_dkappa_at_zero(&path, eps).abs() < 1e-12);
    }

    #[test]
    fn orientations_are_equally_robust(t in target(), eps in epsilon(), kappa in epsilon()) {
        let solve = |orientation| {
            let c = PathConstraints { orientation, ..Default::default() };
            GatePath::TwoLoop(solve_two_loop(&t, &c).path)
        };
        let err = RabiError::new(eps, kappa).unwrap();
        let (plus, minus) = (solve(Orientation::Plus), solve(Orientation::Minus));
        let fp = plus.exact_fidelity(&err).unwrap();
        let fm = minus.exact_fidelity(&err).unwrap();
        prop_assert!((fp - fm).abs() < 1e-12, "{fp} vs {fm}");
    }

    #[test]
    fn other_solutions_round_trip(t in target()) {
        let sl = GatePath::SingleLoop(solve_single_loop(&t)).ideal();
        let ss = GatePath::SingleShot(solve_single_shot(&t)).ideal();
        prop_assert!(projective_distance_qubit(&sl, &t.unitary()).unwrap() < 1e-10);
        prop_assert!(projective_distance_qubit(&ss, &t.unitary()).unwrap() < 1e-10);
    }

    #[test]
    fn measured_axis_matches(t in target()) {
        prop_assume!(t.theta_gate() > 1e-6 && t.theta_gate() < FRAC_PI_2 - 1e-6);
        let measured = measure_rotation(&t.unitary()).unwrap();
        prop_assert!((measured.axis().unwrap() - t.axis()).norm() < 1e-9);
    }
}
