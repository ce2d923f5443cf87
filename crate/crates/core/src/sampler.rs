//! Seeded sampling of channels, rotations and unital triples.
//!
//! Parameters are uniform on their box (`[−1, 1]` per coefficient, `[0, 2π)`
//! per angle) and conditioned on validity by rejection. Each sample owns its
//! ChaCha20 stream, keyed by kind and index, so the output does not depend on
//! how the work is split across threads.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::bloch::{unital_constraint_ok, AffineChannel, RotationAngles};
use crate::error::{LgError, Result};

pub const PRNG_ID: &str = "chacha20/rand_chacha-0.3/stream-per-sample";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleKind {
    Unital,
    UnitalWithW,
    Nonunital,
    NonunitalWithW,
}

impl SampleKind {
    pub fn tag(&self) -> &'static str {
        match self {
            SampleKind::Unital => "noW",
            SampleKind::UnitalWithW => "withW",
            SampleKind::Nonunital => "nonunital-noW",
            SampleKind::NonunitalWithW => "nonunital-withW",
        }
    }

    pub fn has_rotation(&self) -> bool {
        matches!(self, SampleKind::UnitalWithW | SampleKind::NonunitalWithW)
    }

    pub fn is_unital(&self) -> bool {
        matches!(self, SampleKind::Unital | SampleKind::UnitalWithW)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSpec {
    pub kind: SampleKind,
    pub n: usize,
    pub seed: u64,
}

impl SampleSpec {
    pub fn new(kind: SampleKind, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(LgError::InvalidConfig("sample count must be at least 1".into()));
        }
        Ok(Self { kind, n, seed })
    }
}

/// One draw: a channel applied twice, with the rotation between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSample {
    pub channel: AffineChannel,
    pub w: RotationAngles,
}

#[derive(Clone, Copy)]
enum Stream {
    Unital = 1,
    Cptp = 2,
    Rotation = 3,
}

fn rng_for(seed: u64, stream: Stream, index: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 56) | index as u64);
    rng
}

fn unit_triple(rng: &mut impl Rng) -> [f64; 3] {
    std::array::from_fn(|_| rng.gen_range(-1.0..=1.0))
}

fn draw_unital(rng: &mut impl Rng) -> ([f64; 3], usize) {
    let mut tries = 0;
    loop {
        tries += 1;
        let c = unit_triple(rng);
        if unital_constraint_ok(c) {
            return (c, tries);
        }
    }
}

fn draw_cptp(rng: &mut impl Rng) -> AffineChannel {
    loop {
        let b = unit_triple(rng);
        let c = unit_triple(rng);
        let ch = AffineChannel::new(b, c);
        if ch.is_valid() {
            return ch;
        }
    }
}

fn draw_rotation(rng: &mut impl Rng) -> RotationAngles {
    let theta = rng.gen_range(0.0..TAU);
    let phi = rng.gen_range(0.0..TAU);
    RotationAngles::new(theta, phi)
}

/// `n` triples uniform on `[−1, 1]³` conditioned on the unital constraint.
pub fn sample_unital(seed: u64, n: usize) -> Vec<[f64; 3]> {
    (0..n)
        .into_par_iter()
        .map(|i| draw_unital(&mut rng_for(seed, Stream::Unital, i)).0)
        .collect()
}

/// Fraction of box draws accepted by [`sample_unital`] over its first `n` samples.
pub fn unital_acceptance_rate(seed: u64, n: usize) -> f64 {
    let tries: usize = (0..n)
        .into_par_iter()
        .map(|i| draw_unital(&mut rng_for(seed, Stream::Unital, i)).1)
        .sum();
    n as f64 / tries as f64
}

/// `n` channels uniform on `[−1, 1]⁶` conditioned on complete positivity.
pub fn sample_cptp(seed: u64, n: usize) -> Vec<AffineChannel> {
    (0..n)
        .into_par_iter()
        .map(|i| draw_cptp(&mut rng_for(seed, Stream::Cptp, i)))
        .collect()
}

/// `n` rotations with `θ_W`, `φ_W` uniform on `[0, 2π)`.
pub fn sample_rotation(seed: u64, n: usize) -> Vec<RotationAngles> {
    (0..n)
        .into_par_iter()
        .map(|i| draw_rotation(&mut rng_for(seed, Stream::Rotation, i)))
        .collect()
}

/// Draws for a figure ensemble; rotations are the identity unless the kind
/// has one.
pub fn sample(spec: &SampleSpec) -> Vec<ChannelSample> {
    let channels: Vec<AffineChannel> = if spec.kind.is_unital() {
        sample_unital(spec.seed, spec.n).into_iter().map(AffineChannel::unital).collect()
    } else {
        sample_cptp(spec.seed, spec.n)
    };
    let rotations = if spec.kind.has_rotation() {
        sample_rotation(spec.seed, spec.n)
    } else {
        vec![RotationAngles::identity(); spec.n]
    };
    channels
        .into_iter()
        .zip(rotations)
        .map(|(channel, w)| ChannelSample { channel, w })
        .collect()
}
