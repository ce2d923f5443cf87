use std::f64::consts::TAU;

use lgmax_core::bloch::{
    channel_superop, choi_psd, measurement_direction, rotation_matrix, unital_constraint_ok, wrap_angle,
    AffineChannel, BlochVector, RotationAngles, VALIDITY_TOL,
};
use lgmax_core::bounds::{kmax_single_unital, kmax_two_unital_no_w, UnitalTriple};
use lgmax_core::engine::{k_of_angles, LgKernel, LgScenario};
use lgmax_core::figures::format_sig;
use lgmax_core::sampler::{sample_cptp, sample_rotation, sample_unital};
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;

fn angles() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(0.0..TAU)
}

fn rotation() -> impl Strategy<Value = RotationAngles> {
    (0.0..TAU, 0.0..TAU).prop_map(|(t, p)| RotationAngles::new(t, p))
}

fn unital_triple() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.0..=1.0f64).prop_filter("unital constraint", |c| unital_constraint_ok(*c))
}

fn channel() -> impl Strategy<Value = AffineChannel> {
    (prop::array::uniform3(-1.0..=1.0f64), prop::array::uniform3(-1.0..=1.0f64))
        .prop_map(|(b, c)| AffineChannel::new(b, c))
        .prop_filter("completely positive", |ch| ch.is_valid())
}

fn state() -> impl Strategy<Value = BlochVector> {
    (0.0..=1.0f64, 0.0..TAU, 0.0..TAU).prop_map(|(r, t, p)| {
        let w = [r * t.sin() * p.cos(), r * t.sin() * p.sin(), r * t.cos()];
        BlochVector::state(w).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn k_never_exceeds_three_halves(
        s1 in channel(), s2 in channel(), w in rotation(), rho in state(), a in angles()
    ) {
        let sc = LgScenario::new(s1, s2, w, rho).unwrap();
        let k = k_of_angles(&sc, &a);
        prop_assert!(k <= 1.5 + 1e-9, "K = {k}");
        prop_assert!(k >= -3.0 - 1e-9);
        let (c21, c32, c31) = LgKernel::new(&sc).correlators(&a);
        for x in [c21, c32, c31] {
            prop_assert!(x.abs() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn kernel_agrees_with_direct_evaluation(
        s1 in channel(), w in rotation(), rho in state(), a in angles()
    ) {
        let sc = LgScenario::new(s1, s1, w, rho).unwrap();
        prop_assert!((LgKernel::new(&sc).k(&a) - k_of_angles(&sc, &a)).abs() < 1e-12);
    }

    #[test]
    fn channels_preserve_trace_and_states(ch in channel(), rho in state()) {
        let out = channel_superop(&ch).unwrap().apply(&rho);
        prop_assert!((out.trace() - 1.0).abs() < 1e-12);
        prop_assert!(out.bloch().norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn rotations_are_proper(w in rotation()) {
        let r = rotation_matrix(&w);
        prop_assert!((r.transpose() * r - Matrix3::identity()).abs().max() < 1e-12);
        prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measurement_directions_are_unit(t in -10.0..10.0f64, p in -10.0..10.0f64) {
        prop_assert!((measurement_direction(t, p).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wrapped_angles_stay_in_period(x in -1e3..1e3f64) {
        let y = wrap_angle(x);
        prop_assert!((0.0..TAU).contains(&y));
        prop_assert!(((x - y) / TAU - ((x - y) / TAU).round()).abs() < 1e-9);
    }

    #[test]
    fn unital_slice_of_choi_is_the_tetrahedron(c in prop::array::uniform3(-1.0..=1.0f64)) {
        prop_assert_eq!(AffineChannel::unital(c).is_valid(), unital_constraint_ok(c));
    }

    #[test]
    fn single_channel_bound_is_between_one_and_three_halves(c in unital_triple()) {
        let k = kmax_single_unital(c).unwrap();
        prop_assert!((1.0..=1.5).contains(&k));
    }

    #[test]
    fn two_unital_bound_is_even_under_paired_sign_flips(c in unital_triple(), pair in 0usize..3) {
        let mut f = c;
        f[pair] = -f[pair];
        f[(pair + 1) % 3] = -f[(pair + 1) % 3];
        let a = kmax_two_unital_no_w(&UnitalTriple::new(c).unwrap());
        let b = kmax_two_unital_no_w(&UnitalTriple::new(f).unwrap());
        prop_assert!((a - b).abs() < 1e-15);
        prop_assert!(a <= 1.5 + 1e-12);
    }

    #[test]
    fn paired_sign_flips_act_as_a_half_turn(
        c in unital_triple(), a in angles(), pair in 0usize..3
    ) {
        // flipping cᵢ and cⱼ composes each channel with a half turn about
        // the third axis, absorbed by turning the first and last directions
        let mut f = c;
        f[pair] = -f[pair];
        f[(pair + 1) % 3] = -f[(pair + 1) % 3];
        let mixed = BlochVector::maximally_mixed();
        let id = RotationAngles::identity();
        let sc = LgScenario::new(AffineChannel::unital(c), AffineChannel::unital(c), id, mixed).unwrap();
        let sf = LgScenario::new(AffineChannel::unital(f), AffineChannel::unital(f), id, mixed).unwrap();
        let n: Vec<Vector3<f64>> = (0..3).map(|i| measurement_direction(a[2 * i], a[2 * i + 1])).collect();
        let flip = |v: &Vector3<f64>| {
            let mut r = *v;
            r[pair] = -r[pair];
            r[(pair + 1) % 3] = -r[(pair + 1) % 3];
            r
        };
        let (x21, x32, x31) = LgKernel::new(&sc).correlators_for(&n[0], &n[1], &n[2]);
        let (y21, y32, y31) = LgKernel::new(&sf).correlators_for(&flip(&n[0]), &n[1], &flip(&n[2]));
        prop_assert!((x21 - y21).abs() < 1e-12 && (x32 - y32).abs() < 1e-12 && (x31 - y31).abs() < 1e-12);
    }

    #[test]
    fn formatted_numbers_keep_twelve_digits(x in -1e3..1e3f64) {
        let s = format_sig(x, 12);
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs().max(1e-300), "{x} -> {s}");
        let digits = s.trim_start_matches('-').chars().filter(|ch| ch.is_ascii_digit()).collect::<String>();
        prop_assert!(digits.trim_start_matches('0').len() <= 12, "{s}");
    }

    #[test]
    fn samplers_are_valid_for_any_seed(seed in any::<u64>()) {
        prop_assert!(sample_unital(seed, 16).into_iter().all(unital_constraint_ok));
        prop_assert!(sample_cptp(seed, 16).iter().all(|ch| choi_psd(ch, VALIDITY_TOL)));
        prop_assert!(sample_rotation(seed, 16).iter().all(|r| (0.0..TAU).contains(&r.theta())));
    }
}
