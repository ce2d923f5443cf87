//! Closed-form maxima of `K` for the special cases with analytic answers,
//! the piecewise envelopes that bound random-channel ensembles, and the
//! numerical upper bound for non-unital channels with a free rotation.
//!
//! Envelope functions (`*_upper`, `*_lower`, `*_bounds`) describe the spread
//! of `K_max` over random channels at fixed `c`; they are not per-channel
//! values.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::bloch::{rotation_superop, unital_constraint_ok, AffineChannel, RotationAngles, SuperOp};
use crate::engine::LgKernel;
use crate::error::{LgError, Result};
use crate::optimizer::{polish_max, MaximizeConfig};

/// Inverse-trig and square-root arguments this close outside their domain
/// are clamped.
pub const CLAMP_TOL: f64 = 1e-12;

fn require_unit(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x.abs() <= 1.0 {
        Ok(x)
    } else {
        Err(LgError::DomainError(format!("{name} = {x} is outside [-1, 1]")))
    }
}

/// A unital channel's contraction parameters together with the two largest
/// magnitudes `c ≥ c′`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitalTriple {
    c: [f64; 3],
    cmax: f64,
    csecond: f64,
}

impl UnitalTriple {
    pub fn new(c: [f64; 3]) -> Result<Self> {
        if !unital_constraint_ok(c) {
            return Err(LgError::InvalidChannel(format!("c = {c:?} violates the unital constraint")));
        }
        let mut mags = c.map(f64::abs);
        mags.sort_by(|a, b| b.total_cmp(a));
        Ok(Self {
            c,
            cmax: mags[0],
            csecond: mags[1],
        })
    }

    pub fn c(&self) -> [f64; 3] {
        self.c
    }

    /// Largest `|cᵢ|`.
    pub fn cmax(&self) -> f64 {
        self.cmax
    }

    /// Second largest `|cᵢ|`.
    pub fn csecond(&self) -> f64 {
        self.csecond
    }
}

/// `1 + ½ max cᵢ²` for a single unital channel.
pub fn kmax_single_unital(c: [f64; 3]) -> Result<f64> {
    let t = UnitalTriple::new(c)?;
    Ok(1.0 + 0.5 * t.cmax * t.cmax)
}

/// Single channel with `c₃ = 1`, `c₁ = c₂` and the middle measurement fixed
/// along `z`.
pub fn kmax_mzi(c1: f64) -> Result<f64> {
    let a = require_unit("c1", c1)?.abs();
    Ok((1.0 + a + a * a) / (1.0 + a))
}

/// `|c|(2 − |c|)`: always reachable with two unital channels.
pub fn kmax_2a(c: f64) -> f64 {
    let a = c.abs();
    a * (2.0 - a)
}

/// `√2 |c|`: two channels with a single nonzero `cᵢ` and a quarter-turn `W`.
pub fn kmax_2e(c: f64) -> f64 {
    SQRT_2 * c.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateKind {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub value: f64,
    pub valid: bool,
}

/// The three stationary values of `K` for two identical unital channels with
/// `W = 1`, each flagged with whether its angle solution exists.
pub fn kmax_two_unital_candidates(t: &UnitalTriple) -> [Candidate; 3] {
    let (c, cp) = (t.cmax, t.csecond);
    let norm = c * c + cp * cp;
    let nonzero = norm > 0.0;
    [
        Candidate {
            kind: CandidateKind::A,
            value: kmax_2a(c),
            valid: true,
        },
        Candidate {
            kind: CandidateKind::B,
            value: c * c + cp * cp / norm,
            valid: nonzero && cp / norm <= 1.0,
        },
        Candidate {
            kind: CandidateKind::C,
            value: c * c / norm + cp * cp,
            valid: nonzero && c / norm < 1.0,
        },
    ]
}

/// Largest valid candidate: `K_max` for two identical unital channels, `W = 1`.
pub fn kmax_two_unital_no_w(t: &UnitalTriple) -> f64 {
    kmax_two_unital_candidates(t)
        .iter()
        .filter(|cand| cand.valid)
        .map(|cand| cand.value)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Ensemble upper envelope for two unital channels: `|c|(2 − |c|)` up to
/// `|c| = ½`, then `½ + c²`. Crosses 1 at `|c| = 1/√2`.
pub fn kmax_two_unital_upper(c: f64) -> Result<f64> {
    let a = require_unit("c", c)?.abs();
    Ok(if a <= 0.5 { kmax_2a(a) } else { 0.5 + a * a })
}

/// Ensemble lower envelope for two unital channels with a free `W`.
pub fn kmax_two_unital_lower_with_w(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(LgError::DomainError(format!("c = {c} is outside [0, 1]")));
    }
    Ok(kmax_2a(c).min(kmax_2e(c)))
}

/// Two channels with only `c₁` nonzero and `W` a rotation about `y` whose
/// half-angle is `θ_W`.
pub fn kmax_single_c1_with_theta_w(c1: f64, theta_w: f64) -> Result<f64> {
    let a = require_unit("c1", c1)?.abs();
    let cos2 = (2.0 * theta_w).cos();
    let first = a * (2.0 * theta_w.cos().abs() - a * cos2);
    let second = a * (2.0 * theta_w.sin().abs() + a * cos2);
    Ok(first.max(second))
}

/// Low-`c` branch of the depolarizing formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepolarizingBranch {
    /// `|c|(1 − |c|)`, as printed.
    Printed,
    /// `|c|(2 − |c|)`, continuous with `½ + c²` and confirmed by exhaustive search.
    Resolved,
}

impl DepolarizingBranch {
    pub fn formula(&self) -> &'static str {
        match self {
            DepolarizingBranch::Printed => "|c|(1-|c|)",
            DepolarizingBranch::Resolved => "|c|(2-|c|)",
        }
    }
}

pub fn kmax_depolarizing_with(c: f64, branch: DepolarizingBranch) -> Result<f64> {
    let a = require_unit("c", c)?.abs();
    Ok(if a > 0.5 {
        0.5 + a * a
    } else {
        match branch {
            DepolarizingBranch::Printed => a * (1.0 - a),
            DepolarizingBranch::Resolved => a * (2.0 - a),
        }
    })
}

/// Two depolarizing channels, any `W`.
pub fn kmax_depolarizing(c: f64) -> Result<f64> {
    kmax_depolarizing_with(c, DepolarizingBranch::Resolved)
}

/// Largest `Γ/Ω` for which a damped Rabi oscillation can still violate the
/// inequality: `(6/π) ln 2`.
pub fn rabi_threshold() -> f64 {
    6.0 / PI * std::f64::consts::LN_2
}

/// `¼(5 + cos 2Λ)`.
pub fn kmax_classical_channel(lambda: f64) -> f64 {
    0.25 * (5.0 + (2.0 * lambda).cos())
}

fn clamp_unit(name: &str, x: f64) -> Result<f64> {
    if x.abs() <= 1.0 {
        Ok(x)
    } else if x.abs() <= 1.0 + CLAMP_TOL {
        Ok(x.signum())
    } else {
        Err(LgError::DomainError(format!("{name} argument {x} is outside [-1, 1]")))
    }
}

/// Upper envelope for two non-unital channels with `W = 1`, reached with
/// `c₁ = c₂ = c`, `b₁ = b₂ = (1 − c)/√2`. Defined for
/// `|c| ≥ 0.543689…`, where it equals 1; even in `c`.
pub fn kmax_3a(c: f64) -> Result<f64> {
    let c = require_unit("c", c)?.abs();
    if c == 0.0 {
        return Err(LgError::DomainError("kmax_3a is undefined at c = 0".into()));
    }
    let c2 = c * c;
    let c4 = c2 * c2;
    let c6 = c4 * c2;
    let acos_arg = clamp_unit("arccos", (1.0 + c2 + 3.0 * c4 - c6) / (4.0 * (c2 + c4)))?;
    let mut radicand = -1.0 - 2.0 * c2 + 9.0 * c4 + 28.0 * c6 + 9.0 * c4 * c4 + 6.0 * c4 * c6 - c6 * c6;
    if radicand < 0.0 {
        if radicand >= -CLAMP_TOL {
            radicand = 0.0;
        } else {
            return Err(LgError::DomainError(format!("kmax_3a: negative square root argument at c = {c}")));
        }
    }
    let asin_arg = clamp_unit("arcsin", radicand.sqrt() / (2.0 * c * (1.0 + c2).powi(2)))?;
    Ok(0.5 / c + 0.5 - 0.5 * c + 0.5 * c2 - c2 * (acos_arg.acos() + asin_arg.asin()).cos())
}

/// `max(|c|, −1 + 4|c| − 2c²)`.
pub fn kmax_3b(c: f64) -> Result<f64> {
    let a = require_unit("c", c)?.abs();
    Ok(a.max(-1.0 + 4.0 * a - 2.0 * a * a))
}

/// Where `kmax_3a` starts: both its arccos argument reaches 1 and its square
/// root argument reaches 0 here, and the value is exactly 1.
pub fn kmax_3a_onset() -> f64 {
    let mut lo = 0.5;
    let mut hi = 0.6;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kmax_3a(mid).is_ok() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `(lower, upper)` envelope for ensembles of two identical unital
/// channels with `W = 1`.
pub fn unital_no_w_bounds(c: f64) -> Result<(f64, f64)> {
    Ok((kmax_2a(c), kmax_two_unital_upper(c)?))
}

/// Same with a random `W`.
pub fn unital_with_w_bounds(c: f64) -> Result<(f64, f64)> {
    let a = require_unit("c", c)?.abs();
    Ok((kmax_two_unital_lower_with_w(a)?, kmax_two_unital_upper(a)?))
}

/// Non-unital ensembles with the mixed input and `W = 1`, at the signed
/// dominant `c`.
pub fn nonunital_no_w_bounds(c: f64) -> Result<(f64, f64)> {
    let a = require_unit("c", c)?.abs();
    let lower = if c > 0.0 { kmax_2a(a) } else { kmax_3b(a)? };
    let upper = kmax_3a(a).map_or(1.0, |k| k.max(1.0));
    Ok((lower, upper))
}

/// Result of the numerical upper bound for non-unital channels with `W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonunitalUpper {
    pub k: f64,
    pub b1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub theta_w: f64,
    pub channel: AffineChannel,
    pub converged: bool,
}

/// Numerical upper envelope for two non-unital channels with a free `W`.
///
/// Only `c₁` is nonzero and the displacement saturates the Bloch ball:
/// `b₁ ∈ [0, 1 − c₁]`, `b₃ = √(1 − (c₁ + b₁)²)`, `b₂ = 0`. With `θ₁ = π/2`
/// and every azimuth zero, `b₁`, `θ₂`, `θ₃` and the rotation angle of `W`
/// about `y` are optimized.
pub fn nonunital_upper_numeric(c1: f64, cfg: &MaximizeConfig) -> Result<NonunitalUpper> {
    if !(c1 > 0.0 && c1 <= 1.0) {
        return Err(LgError::DomainError(format!("c1 = {c1} is outside (0, 1]")));
    }
    cfg.validate()?;
    let channel_for = |u: f64| {
        let b1 = (1.0 - c1) * u.sin().powi(2);
        let b3 = (1.0 - (c1 + b1).powi(2)).max(0.0).sqrt();
        AffineChannel::new([b1, 0.0, b3], [c1, 0.0, 0.0])
    };
    let mixed = Vector4::new(1.0, 0.0, 0.0, 0.0);
    let objective = |x: &[f64]| {
        let s = SuperOp::from_matrix(channel_for(x[0]).matrix());
        let w = rotation_superop(&RotationAngles::new(x[3], 0.0));
        LgKernel::from_parts(s, s, w, mixed).k(&[FRAC_PI_2, 0.0, x[1], 0.0, x[2], 0.0])
    };

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let starts: Vec<[f64; 4]> = (0..cfg.n_starts)
        .map(|_| [rng.gen_range(0.0..FRAC_PI_2), rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)])
        .collect();
    let runs: Vec<([f64; 4], f64, bool)> = starts
        .into_par_iter()
        .map(|mut x| {
            let out = polish_max(&objective, &mut x, 0.4, cfg.local_tol, cfg.max_iters);
            (x, out.value, out.converged)
        })
        .collect();
    let (x, k, _) = runs
        .iter()
        .copied()
        .fold(None::<([f64; 4], f64, bool)>, |best, run| match best {
            Some(b) if b.1 >= run.1 => Some(b),
            _ => Some(run),
        })
        .expect("at least one start");
    let channel = channel_for(x[0]);
    Ok(NonunitalUpper {
        k,
        b1: channel.b()[0],
        theta2: x[1].rem_euclid(TAU),
        theta3: x[2].rem_euclid(TAU),
        theta_w: x[3].rem_euclid(TAU),
        channel,
        converged: runs.iter().any(|r| r.2),
    })
}

/// `fig3_upper_numeric` with the default optimizer settings.
pub fn fig3_upper_numeric(c1: f64) -> Result<NonunitalUpper> {
    nonunital_upper_numeric(c1, &nonunital_upper_config())
}

pub fn nonunital_upper_config() -> MaximizeConfig {
    MaximizeConfig {
        n_starts: 32,
        local_tol: 1e-13,
        ..MaximizeConfig::default()
    }
}

/// Non-unital ensembles with the mixed input and a random `W`.
pub fn nonunital_with_w_bounds(c: f64, cfg: &MaximizeConfig) -> Result<(f64, f64)> {
    let a = require_unit("c", c)?.abs();
    let upper = if a == 0.0 { 1.0 } else { nonunital_upper_numeric(a, cfg)?.k.max(1.0) };
    Ok((kmax_3b(a)?, upper))
}

/// Closed-form maximizing angles `(θ₁, φ₁, θ₂, φ₂, θ₃, φ₃)`.
pub mod angles {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    /// Single unital channel, stationary point with `K = 1 + ½cᵢ²` for axis `i`.
    pub fn single_channel(c: [f64; 3], axis: usize) -> [f64; 6] {
        match axis {
            0 => {
                let t = (c[0] / 2.0).asin();
                [-FRAC_PI_2, 0.0, -t, 0.0, t, 0.0]
            }
            1 => {
                let t = (c[1] / 2.0).asin();
                [-FRAC_PI_2, FRAC_PI_2, t, -FRAC_PI_2, t, FRAC_PI_2]
            }
            _ => [0.0, -FRAC_PI_2, (c[2] / 2.0).acos(), 0.0, (-c[2] / 2.0).acos(), 0.0],
        }
    }

    /// Two identical unital channels, `W = 1`, with `|c₁| ≥ |c₃| ≥ |c₂|`;
    /// all azimuths zero.
    pub fn two_unital_a(c1: f64) -> [f64; 6] {
        let t3 = FRAC_PI_2 * c1.signum();
        [PI - t3, 0.0, FRAC_PI_2, 0.0, t3, 0.0]
    }

    pub fn two_unital_b(c1: f64, c3: f64) -> [f64; 6] {
        let t1 = (c3 / (c1 * c1 + c3 * c3)).acos();
        [t1, 0.0, 0.0, 0.0, -t1, 0.0]
    }

    pub fn two_unital_c(c1: f64, c3: f64) -> [f64; 6] {
        let t3 = (c1 / (c1 * c1 + c3 * c3)).asin();
        [PI - t3, 0.0, FRAC_PI_2, 0.0, t3, 0.0]
    }

    /// Only `c₃` nonzero and a quarter-turn `W` about `y`; `K = √2 c₃`.
    pub fn dephased_quarter_turn() -> [f64; 6] {
        [0.0, 0.0, FRAC_PI_4, 0.0, FRAC_PI_2, 0.0]
    }
}
