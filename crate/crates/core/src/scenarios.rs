//! Ready-made scenarios for the special cases with closed-form answers.

use std::f64::consts::FRAC_PI_2;

use crate::bloch::{AffineChannel, BlochVector, RotationAngles};
use crate::engine::LgScenario;
use crate::error::{LgError, Result};

fn checked_unital(c: [f64; 3]) -> Result<AffineChannel> {
    AffineChannel::checked([0.0; 3], c)
}

/// No decoherence at all; `K_max = 3/2`.
pub fn identity() -> LgScenario {
    LgScenario::new(
        AffineChannel::identity(),
        AffineChannel::identity(),
        RotationAngles::identity(),
        BlochVector::maximally_mixed(),
    )
    .expect("identity scenario is valid")
}

/// One unital channel between the first and second measurement; the second
/// interval is noiseless.
pub fn single_channel(c: [f64; 3]) -> Result<LgScenario> {
    LgScenario::new(
        checked_unital(c)?,
        AffineChannel::identity(),
        RotationAngles::identity(),
        BlochVector::maximally_mixed(),
    )
}

/// Two copies of the same unital channel separated by `w`.
pub fn two_channels(c: [f64; 3], w: RotationAngles) -> Result<LgScenario> {
    let ch = checked_unital(c)?;
    LgScenario::new(ch, ch, w, BlochVector::maximally_mixed())
}

/// Two copies of a non-unital channel with the completely mixed input.
pub fn two_channels_affine(ch: AffineChannel, w: RotationAngles) -> Result<LgScenario> {
    LgScenario::new(ch, ch, w, BlochVector::maximally_mixed())
}

/// Two depolarizing channels `c₁ = c₂ = c₃ = c`.
pub fn depolarizing(c: f64, w: RotationAngles) -> Result<LgScenario> {
    two_channels([c; 3], w)
}

/// Mach-Zehnder setting: a single channel with `c₃ = 1`, `c₁ = c₂`.
pub fn mach_zehnder(c1: f64) -> Result<LgScenario> {
    single_channel([c1, c1, 1.0])
}

/// Single channel with `b₃ = c₃ = ½` and the pure input `cos Λ |↑⟩ + sin Λ |↓⟩`.
pub fn classical_channel(lambda: f64) -> LgScenario {
    LgScenario::new(
        AffineChannel::new([0.0, 0.0, 0.5], [0.0, 0.0, 0.5]),
        AffineChannel::identity(),
        RotationAngles::identity(),
        BlochVector::pure_xz(lambda),
    )
    .expect("classical channel is valid")
}

/// Damped Rabi oscillation over two equal intervals `t`.
pub fn rabi(omega: f64, gamma: f64, t: f64) -> Result<LgScenario> {
    let (ch, w) = rabi_channel(omega, gamma, t)?;
    LgScenario::new(ch, ch, w, BlochVector::maximally_mixed())
}

/// Channel and relative rotation of a damped Rabi oscillation:
/// `c = (e^{−Γt}, e^{−Γt/2}, e^{−Γt/2})` and a rotation by `Ωt` about `x`.
pub fn rabi_channel(omega: f64, gamma: f64, t: f64) -> Result<(AffineChannel, RotationAngles)> {
    if !(gamma >= 0.0 && t >= 0.0 && omega.is_finite() && gamma.is_finite() && t.is_finite()) {
        return Err(LgError::DomainError(format!(
            "rabi channel needs gamma >= 0 and t >= 0, got gamma = {gamma}, t = {t}"
        )));
    }
    let full = (-gamma * t).exp();
    let half = (-0.5 * gamma * t).exp();
    let ch = checked_unital([full, half, half])?;
    Ok((ch, RotationAngles::new(omega * t, FRAC_PI_2)))
}

/// Two channels with only `c₁` nonzero and a relative rotation of
/// half-angle `θ_W` about `y`, the setting of the `θ_W` sweep.
pub fn single_axis_with_rotation(c1: f64, theta_w: f64) -> Result<LgScenario> {
    two_channels([c1, 0.0, 0.0], RotationAngles::new(2.0 * theta_w, 0.0))
}

/// Two channels with only `c₃ = c` nonzero and a quarter-turn rotation
/// between them, which reaches `√2 c`.
pub fn dephased_quarter_turn(c: f64) -> Result<LgScenario> {
    two_channels([0.0, 0.0, c], RotationAngles::new(FRAC_PI_2, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::rotation_matrix;

    #[test]
    fn rabi_channel_examples() {
        let (ch, w) = rabi_channel(3.0, 0.0, 0.7).unwrap();
        assert_eq!(ch.c(), [1.0; 3]);
        assert!((w.theta() - 2.1).abs() < 1e-15);

        let (ch, _) = rabi_channel(1.0, 2.0 * 2f64.ln(), 1.0).unwrap();
        let c = ch.c();
        assert!((c[0] - 0.25).abs() < 1e-15 && (c[1] - 0.5).abs() < 1e-15 && (c[2] - 0.5).abs() < 1e-15);

        let (ch, w) = rabi_channel(5.0, 1.0, 0.0).unwrap();
        assert_eq!(ch.c(), [1.0; 3]);
        assert_eq!(w.theta(), 0.0);

        assert!(rabi_channel(1.0, -1.0, 1.0).is_err());
        assert!(rabi_channel(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn rabi_rotation_is_about_x() {
        let (_, w) = rabi_channel(1.0, 0.3, 0.9).unwrap();
        let r = rotation_matrix(&w);
        assert!((r[(0, 0)] - 1.0).abs() < 1e-15);
        assert!(r[(1, 0)].abs() < 1e-15 && r[(2, 0)].abs() < 1e-15);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(single_channel([1.0, 1.0, -1.0]).is_err());
        assert!(depolarizing(-0.5, RotationAngles::identity()).is_err());
        assert!(mach_zehnder(0.5).is_ok());
    }
}
