//! Leggett-Garg correlators for three projective measurements separated by
//! two channels, with the channels' unitary parts folded into a single
//! relative rotation `W` between them.

use nalgebra::{Vector3, Vector4};

use crate::bloch::{
    channel_superop, compose, measurement_superop, rotation_superop, AffineChannel, BlochVector,
    MeasurementSetting, RotationAngles, SuperOp,
};
use crate::error::{LgError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgScenario {
    s1: AffineChannel,
    s2: AffineChannel,
    w_rot: RotationAngles,
    rho0: BlochVector,
}

impl LgScenario {
    pub fn new(s1: AffineChannel, s2: AffineChannel, w_rot: RotationAngles, rho0: BlochVector) -> Result<Self> {
        for (name, ch) in [("s1", &s1), ("s2", &s2)] {
            if !ch.is_valid() {
                return Err(LgError::InvalidScenario(format!(
                    "{name} (b = {:?}, c = {:?}) is not a valid channel",
                    ch.b(),
                    ch.c()
                )));
            }
        }
        if !rho0.is_normalized_state() {
            return Err(LgError::InvalidScenario(format!(
                "initial state {:?} is not a normalized state",
                rho0.entries()
            )));
        }
        Ok(Self { s1, s2, w_rot, rho0 })
    }

    pub fn s1(&self) -> &AffineChannel {
        &self.s1
    }

    pub fn s2(&self) -> &AffineChannel {
        &self.s2
    }

    pub fn w_rot(&self) -> &RotationAngles {
        &self.w_rot
    }

    pub fn rho0(&self) -> &BlochVector {
        &self.rho0
    }

    pub fn is_unital(&self) -> bool {
        self.s1.is_unital() && self.s2.is_unital()
    }

    pub fn with_rho0(&self, rho0: BlochVector) -> Result<Self> {
        Self::new(self.s1, self.s2, self.w_rot, rho0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgOutcome {
    pub c21: f64,
    pub c32: f64,
    pub c31: f64,
    pub settings: [MeasurementSetting; 3],
}

impl LgOutcome {
    /// `K = C₂₁ + C₃₂ − C₃₁`.
    pub fn k(&self) -> f64 {
        self.c21 + self.c32 - self.c31
    }
}

fn trace(v: &BlochVector) -> f64 {
    v.trace()
}

/// Correlators from the full superoperator products
/// `C₂₁ = Tr[𝒬₂S₁𝒬₁ρ]`, `C₃₂ = Tr[𝒬₃W⁻¹S₂W𝒬₂S₁ρ]`, `C₃₁ = Tr[𝒬₃W⁻¹S₂WS₁𝒬₁ρ]`.
pub fn lg_correlators(
    sc: &LgScenario,
    m1: &MeasurementSetting,
    m2: &MeasurementSetting,
    m3: &MeasurementSetting,
) -> LgOutcome {
    let q1 = measurement_superop(m1);
    let q2 = measurement_superop(m2);
    let q3 = measurement_superop(m3);
    // validated at scenario construction
    let s1 = channel_superop(&sc.s1).expect("scenario channels are valid");
    let s2 = channel_superop(&sc.s2).expect("scenario channels are valid");
    let w = rotation_superop(&sc.w_rot);
    let w_inv = w.transpose();
    let middle = compose(&w_inv, &compose(&s2, &w));

    let c21 = trace(&(q2 * s1 * q1).apply(&sc.rho0));
    let c32 = trace(&(q3 * middle * q2 * s1).apply(&sc.rho0));
    let c31 = trace(&(q3 * middle * s1 * q1).apply(&sc.rho0));
    LgOutcome {
        c21,
        c32,
        c31,
        settings: [*m1, *m2, *m3],
    }
}

/// Unpacks `(θ₁, φ₁, θ₂, φ₂, θ₃, φ₃)`.
pub fn settings_from_angles(angles: &[f64; 6]) -> [MeasurementSetting; 3] {
    [
        MeasurementSetting::new(angles[0], angles[1]),
        MeasurementSetting::new(angles[2], angles[3]),
        MeasurementSetting::new(angles[4], angles[5]),
    ]
}

pub fn k_of_angles(sc: &LgScenario, angles: &[f64; 6]) -> f64 {
    LgKernel::new(sc).k(angles)
}

/// Precomputed `S₁`, `W⁻¹S₂W` and `ρ` for repeated evaluation of `K`.
///
/// A measurement acts on `(w₀, w)` as `(n·w, w₀ n)`, so each correlator
/// reduces to a couple of 4×4 matrix-vector products.
#[derive(Debug, Clone, Copy)]
pub struct LgKernel {
    s1: SuperOp,
    middle: SuperOp,
    rho: Vector4<f64>,
    s1_rho: Vector4<f64>,
}

impl LgKernel {
    pub fn new(sc: &LgScenario) -> Self {
        let s1 = channel_superop(&sc.s1).expect("scenario channels are valid");
        let s2 = channel_superop(&sc.s2).expect("scenario channels are valid");
        Self::from_parts(s1, s2, rotation_superop(&sc.w_rot), *sc.rho0.as_vector())
    }

    /// Kernel from raw superoperators; no validity checks.
    pub fn from_parts(s1: SuperOp, s2: SuperOp, w: SuperOp, rho: Vector4<f64>) -> Self {
        let middle = w.transpose() * s2 * w;
        Self {
            s1,
            middle,
            rho,
            s1_rho: s1.matrix() * rho,
        }
    }

    fn measure(n: &Vector3<f64>, v: &Vector4<f64>) -> Vector4<f64> {
        let w0 = v[0];
        Vector4::new(n.dot(&v.fixed_rows::<3>(1)), w0 * n.x, w0 * n.y, w0 * n.z)
    }

    fn measured_trace(n: &Vector3<f64>, v: &Vector4<f64>) -> f64 {
        n.dot(&v.fixed_rows::<3>(1))
    }

    pub fn correlators(&self, angles: &[f64; 6]) -> (f64, f64, f64) {
        let [m1, m2, m3] = settings_from_angles(angles);
        self.correlators_for(&m1.direction(), &m2.direction(), &m3.direction())
    }

    pub fn correlators_for(&self, n1: &Vector3<f64>, n2: &Vector3<f64>, n3: &Vector3<f64>) -> (f64, f64, f64) {
        let after_first = self.s1.matrix() * Self::measure(n1, &self.rho);
        let c21 = Self::measured_trace(n2, &after_first);
        let c32 = Self::measured_trace(n3, &(self.middle.matrix() * Self::measure(n2, &self.s1_rho)));
        let c31 = Self::measured_trace(n3, &(self.middle.matrix() * after_first));
        (c21, c32, c31)
    }

    pub fn k(&self, angles: &[f64; 6]) -> f64 {
        let (c21, c32, c31) = self.correlators(angles);
        c21 + c32 - c31
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::VALIDITY_TOL;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn identity_scenario() -> LgScenario {
        LgScenario::new(
            AffineChannel::identity(),
            AffineChannel::identity(),
            RotationAngles::identity(),
            BlochVector::maximally_mixed(),
        )
        .unwrap()
    }

    fn random_channel(rng: &mut impl Rng, unital: bool) -> AffineChannel {
        loop {
            let b: [f64; 3] = if unital { [0.0; 3] } else { std::array::from_fn(|_| rng.gen_range(-1.0..1.0)) };
            let c: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let ch = AffineChannel::new(b, c);
            if ch.is_valid() {
                return ch;
            }
        }
    }

    fn random_angles(rng: &mut impl Rng) -> [f64; 6] {
        std::array::from_fn(|_| rng.gen_range(0.0..TAU))
    }

    #[test]
    fn repeated_identical_measurements_give_unit_correlators() {
        let sc = identity_scenario();
        let m = MeasurementSetting::new(0.4, 1.3);
        let out = lg_correlators(&sc, &m, &m, &m);
        assert!((out.c21 - 1.0).abs() < 1e-14);
        assert!((out.c32 - 1.0).abs() < 1e-14);
        assert!((out.c31 - 1.0).abs() < 1e-14);
        assert!((out.k() - 1.0).abs() < 1e-14);
        assert_eq!(k_of_angles(&sc, &[0.0; 6]), 1.0);
    }

    #[test]
    fn kernel_agrees_with_superoperator_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let s1 = random_channel(&mut rng, false);
            let s2 = random_channel(&mut rng, false);
            let w = RotationAngles::new(rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
            let rho = BlochVector::pure(rng.gen_range(0.0..PI), rng.gen_range(0.0..TAU));
            let sc = LgScenario::new(s1, s2, w, rho).unwrap();
            let angles = random_angles(&mut rng);
            let [m1, m2, m3] = settings_from_angles(&angles);
            let full = lg_correlators(&sc, &m1, &m2, &m3);
            let (c21, c32, c31) = LgKernel::new(&sc).correlators(&angles);
            assert!((full.c21 - c21).abs() < 1e-13);
            assert!((full.c32 - c32).abs() < 1e-13);
            assert!((full.c31 - c31).abs() < 1e-13);
        }
    }

    #[test]
    fn single_unital_channel_matches_closed_form_correlators() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let ch = random_channel(&mut rng, true);
            let [c1, c2, c3] = ch.c();
            let sc = LgScenario::new(ch, AffineChannel::identity(), RotationAngles::identity(), BlochVector::maximally_mixed()).unwrap();
            let a = random_angles(&mut rng);
            let (t1, p1, t2, p2, t3, p3) = (a[0], a[1], a[2], a[3], a[4], a[5]);
            let ck1 = |t: f64, p: f64| c3 * t1.cos() * t.cos() + (c1 * p1.cos() * p.cos() + c2 * p1.sin() * p.sin()) * t1.sin() * t.sin();
            let c32 = t2.cos() * t3.cos() + (p2 - p3).cos() * t2.sin() * t3.sin();
            let (k21, k32, k31) = LgKernel::new(&sc).correlators(&a);
            assert!((k21 - ck1(t2, p2)).abs() < 1e-13);
            assert!((k31 - ck1(t3, p3)).abs() < 1e-13);
            assert!((k32 - c32).abs() < 1e-13);
        }
    }

    #[test]
    fn axis_aligned_angles_reach_each_single_channel_value() {
        let c = [0.7, -0.45, -0.3];
        let sc = LgScenario::new(AffineChannel::unital(c), AffineChannel::identity(), RotationAngles::identity(), BlochVector::maximally_mixed()).unwrap();
        let a1 = [-FRAC_PI_2, 0.0, -(c[0] / 2.0).asin(), 0.0, (c[0] / 2.0).asin(), 0.0];
        assert!((k_of_angles(&sc, &a1) - (1.0 + 0.5 * c[0] * c[0])).abs() < 1e-12);
        let a2 = [-FRAC_PI_2, FRAC_PI_2, (c[1] / 2.0).asin(), -FRAC_PI_2, (c[1] / 2.0).asin(), FRAC_PI_2];
        assert!((k_of_angles(&sc, &a2) - (1.0 + 0.5 * c[1] * c[1])).abs() < 1e-12);
        let a3 = [0.0, -FRAC_PI_2, (c[2] / 2.0).acos(), 0.0, (-c[2] / 2.0).acos(), 0.0];
        assert!((k_of_angles(&sc, &a3) - (1.0 + 0.5 * c[2] * c[2])).abs() < 1e-12);
    }

    #[test]
    fn unital_scenarios_do_not_depend_on_initial_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let sc = LgScenario::new(
                random_channel(&mut rng, true),
                random_channel(&mut rng, true),
                RotationAngles::new(rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)),
                BlochVector::maximally_mixed(),
            )
            .unwrap();
            let angles = random_angles(&mut rng);
            let k0 = k_of_angles(&sc, &angles);
            for _ in 0..10 {
                let rho = BlochVector::pure(rng.gen_range(0.0..PI), rng.gen_range(0.0..TAU));
                assert!((k_of_angles(&sc.with_rho0(rho).unwrap(), &angles) - k0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn correlators_and_k_stay_within_algebraic_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20_000 {
            let sc = LgScenario::new(
                random_channel(&mut rng, false),
                random_channel(&mut rng, false),
                RotationAngles::new(rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)),
                BlochVector::pure(rng.gen_range(0.0..PI), rng.gen_range(0.0..TAU)),
            )
            .unwrap();
            let (c21, c32, c31) = LgKernel::new(&sc).correlators(&random_angles(&mut rng));
            for c in [c21, c32, c31] {
                assert!(c.abs() <= 1.0 + VALIDITY_TOL);
            }
            assert!(c21 + c32 - c31 <= 1.5 + VALIDITY_TOL);
        }
    }

    #[test]
    fn invalid_scenarios_are_rejected() {
        let bad = AffineChannel::unital([1.0, 1.0, -1.0]);
        let err = LgScenario::new(bad, AffineChannel::identity(), RotationAngles::identity(), BlochVector::maximally_mixed());
        assert!(matches!(err, Err(LgError::InvalidScenario(_))));
        let err = LgScenario::new(
            AffineChannel::identity(),
            AffineChannel::identity(),
            RotationAngles::identity(),
            BlochVector::from_entries([0.5, 0.0, 0.0, 0.0]),
        );
        assert!(matches!(err, Err(LgError::InvalidScenario(_))));
    }
}
