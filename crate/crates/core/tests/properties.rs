use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use planar_pulse::analysis::{predicted_time_cost, time_cost};
use planar_pulse::corpse::{corpse, nest, CorpseWindings};
use planar_pulse::document::{SequenceDocument, FORMAT_VERSION};
use planar_pulse::error_model::{amplitude_error_generator, faulty_compose, ErrorParams};
use planar_pulse::planar::{build_robust_theta, solve_quadrilateral};
use planar_pulse::su2::{compose, decompose_target, infidelity, rotation, z_rotation};
use planar_pulse::targets::{robust_arbitrary, synthesize};
use planar_pulse::{
    Pulse, Robustness, Sequence, TargetKind, TargetSpec, ThetaDecomposition, Unitary2,
};
use proptest::prelude::*;

fn unit_quaternion() -> impl Strategy<Value = [f64; 4]> {
    // points of the unit ball projected to S³ are uniform, i.e. Haar on SU(2)
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("inside the ball, off the origin", |q| {
            let n2 = q.iter().map(|x| x * x).sum::<f64>();
            n2 > 1e-3 && n2 <= 1.0
        })
        .prop_map(|q| {
            let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            q.map(|x| x / n)
        })
}

fn su2(q: [f64; 4]) -> Unitary2 {
    let [a, b, c, d] = q;
    Unitary2::new(
        Complex64::new(a, -d),
        Complex64::new(-c, -b),
        Complex64::new(c, -b),
        Complex64::new(a, d),
    )
}

fn decomposition() -> impl Strategy<Value = ThetaDecomposition> {
    (0.1..=TAU, 0.1..=TAU, 0.0..TAU, 0.0..TAU)
        .prop_map(|(t1, t2, p1, p2)| ThetaDecomposition::new(t1, t2, p1, p2).unwrap())
}

fn pulse() -> impl Strategy<Value = Pulse> {
    (0.0..=TAU, 0.0..TAU).prop_map(|(t, p)| Pulse::new(t, p))
}

fn sequence() -> impl Strategy<Value = Sequence> {
    prop::collection::vec(pulse(), 0..8).prop_map(Sequence::from_pulses)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rotations_are_unitary_with_unit_determinant(theta in -10.0..10.0f64, phi in -10.0..10.0f64) {
        let u = rotation(theta, phi);
        prop_assert!(u.is_unitary(1e-12));
        prop_assert!((u.det() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn z_conjugation_shifts_phase(theta in 0.0..TAU, phi in 0.0..TAU, psi in -TAU..TAU) {
        let lhs = z_rotation(psi) * rotation(theta, phi);
        let rhs = rotation(theta, phi + psi) * z_rotation(psi);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn pi_pulse_reflects_phase(theta in 0.0..TAU, phi in 0.0..TAU) {
        let lhs = rotation(theta, phi) * rotation(PI, 0.0);
        let rhs = rotation(PI, 0.0) * rotation(theta, -phi);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn infidelity_ignores_global_phase(q in unit_quaternion(), r in unit_quaternion(), gamma in 0.0..TAU) {
        let (a, b) = (su2(q), su2(r));
        let phase = Complex64::from_polar(1.0, gamma);
        let base = infidelity(&a, &b);
        prop_assert!((infidelity(&a, &b.scale(phase)) - base).abs() < 1e-12);
        prop_assert!((infidelity(&b, &a) - base).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&base));
    }

    #[test]
    fn compose_is_time_ordered(s in sequence(), t in sequence()) {
        let joined = compose(&s.clone().then(t.clone()));
        prop_assert!(joined.max_abs_diff(&(compose(&t) * compose(&s))) < 1e-12);
        prop_assert!(faulty_compose(&s, ErrorParams::NONE).max_abs_diff(&compose(&s)) == 0.0);
    }

    #[test]
    fn decomposition_reconstructs_haar_targets(q in unit_quaternion()) {
        let u = su2(q);
        let (d, zphase) = decompose_target(&u).unwrap();
        prop_assert_eq!(zphase, d.phi2);
        prop_assert!((0.0..=TAU).contains(&d.theta1) && (0.0..=TAU).contains(&d.theta2));
        prop_assert!(infidelity(&u, &d.target_unitary()) < 1e-10);
    }

    #[test]
    fn random_decompositions_close(d in decomposition()) {
        let sol = solve_quadrilateral(&d).unwrap();
        prop_assert!(sol.residual < 1e-10);
        let seq = build_robust_theta(&d).unwrap();
        prop_assert!(infidelity(&d.theta_unitary(), &compose(&seq)) < 1e-12);
        prop_assert!(amplitude_error_generator(&seq).norm() < 1e-4);
    }

    #[test]
    fn predicted_time_cost_matches_built_sequence(d in decomposition(), nested in any::<bool>()) {
        let rob = if nested { Robustness::Nested } else { Robustness::AmplitudeOnly };
        let mut seq = build_robust_theta(&d).unwrap();
        if nested {
            seq = nest(&seq);
        }
        prop_assert!((predicted_time_cost(&d, rob) - time_cost(&seq)).abs() < 1e-9);
    }

    #[test]
    fn corpse_reproduces_pulse(theta in 1e-3..=TAU, phi in 0.0..TAU) {
        let p = Pulse::new(theta, phi);
        let c = corpse(&p, CorpseWindings::SHORT).unwrap();
        prop_assert_eq!(c.len(), 3);
        prop_assert!(c.iter().all(|q| q.theta() > 0.0));
        prop_assert!(infidelity(&p.unitary(), &compose(&c)) < 1e-12);
        // amplitude error of the triple equals that of the bare pulse
        let g = amplitude_error_generator(&c);
        let bare = amplitude_error_generator(&Sequence::from_pulses(vec![p]));
        prop_assert!(g.sub(&bare).norm() < 1e-6);
    }

    #[test]
    fn nesting_preserves_propagator(s in sequence()) {
        prop_assert!(infidelity(&compose(&s), &compose(&nest(&s))) < 1e-12);
    }

    #[test]
    fn arbitrary_synthesis_is_robust(q in unit_quaternion()) {
        let u = su2(q);
        let seq = robust_arbitrary(&u, Robustness::AmplitudeOnly).unwrap();
        prop_assert!(infidelity(&u, &compose(&seq)) < 1e-10);
        if !seq.is_empty() {
            prop_assert!(amplitude_error_generator(&seq).norm() < 2e-4);
        }
    }

    #[test]
    fn documents_round_trip(
        q in unit_quaternion(),
        phi in -10.0..10.0f64,
        theta in -7.0..7.0f64,
        which in 0usize..5,
        nested in any::<bool>(),
    ) {
        let kind = match which {
            0 => TargetKind::HadamardAsym,
            1 => TargetKind::HadamardSym,
            2 => TargetKind::Z { phi },
            3 => TargetKind::Planar { theta, phi },
            _ => TargetKind::Arbitrary(su2(q)),
        };
        let robustness = if nested { Robustness::Nested } else { Robustness::AmplitudeOnly };
        let spec = TargetSpec { kind, robustness };
        // degenerate Z draws have measure zero but are legitimately rejected
        let Ok(synth) = synthesize(&spec) else { return Ok(()); };
        let doc = SequenceDocument::from_synthesis(&spec, &synth);
        prop_assert_eq!(doc.format_version, FORMAT_VERSION);
        let back = SequenceDocument::from_json(&doc.to_json()).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.sequence().unwrap(), synth.sequence);
        prop_assert_eq!(back.target_kind().unwrap(), spec.kind);
        prop_assert_eq!(back.robustness_level().unwrap(), robustness);
    }
}
