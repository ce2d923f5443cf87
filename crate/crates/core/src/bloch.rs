//! Bloch-vector states and the real 4×4 superoperators acting on them.
//!
//! A qubit density matrix `ρ = ½(1 + w·σ)` is stored as the length-4 vector
//! `(w₀, w₁, w₂, w₃)` with `w₀ = Tr ρ`. Channels, measurements and rotations
//! are real 4×4 matrices acting from the left, so composition is a matrix
//! product.

use std::f64::consts::TAU;
use std::ops::Mul;

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{LgError, Result};

/// Tolerance on Choi eigenvalues and Bloch norms.
pub const VALIDITY_TOL: f64 = 1e-9;

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly TAU
    if w >= TAU {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(Vector4<f64>);

impl BlochVector {
    /// Unchecked vector, e.g. an intermediate result after a measurement superoperator.
    pub fn from_entries(entries: [f64; 4]) -> Self {
        Self(Vector4::from(entries))
    }

    /// A normalized physical state `(1, w)` with `|w| ≤ 1`.
    pub fn state(w: [f64; 3]) -> Result<Self> {
        let norm = Vector3::from(w).norm();
        if !norm.is_finite() || norm > 1.0 + VALIDITY_TOL {
            return Err(LgError::InvalidState(format!(
                "Bloch vector length {norm} exceeds 1"
            )));
        }
        Ok(Self(Vector4::new(1.0, w[0], w[1], w[2])))
    }

    pub fn maximally_mixed() -> Self {
        Self(Vector4::new(1.0, 0.0, 0.0, 0.0))
    }

    /// Pure state pointing along `n(θ, φ)`, the same direction a measurement
    /// with these angles projects onto.
    pub fn pure(theta: f64, phi: f64) -> Self {
        let n = measurement_direction(theta, phi);
        Self(Vector4::new(1.0, n.x, n.y, n.z))
    }

    /// `cos Λ |↑⟩ + sin Λ |↓⟩`.
    pub fn pure_xz(lambda: f64) -> Self {
        let (s, c) = (2.0 * lambda).sin_cos();
        Self(Vector4::new(1.0, s, 0.0, c))
    }

    /// Trace of the represented operator.
    pub fn trace(&self) -> f64 {
        self.0[0]
    }

    pub fn bloch(&self) -> Vector3<f64> {
        Vector3::new(self.0[1], self.0[2], self.0[3])
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.0[0], self.0[1], self.0[2], self.0[3]]
    }

    pub fn as_vector(&self) -> &Vector4<f64> {
        &self.0
    }

    pub fn is_normalized_state(&self) -> bool {
        (self.trace() - 1.0).abs() <= VALIDITY_TOL && self.bloch().norm() <= 1.0 + VALIDITY_TOL
    }
}

/// A pair of angles in the parameterization of the rotation
/// `q = [[cos θ/2, e^{iφ} sin θ/2], [−e^{−iφ} sin θ/2, cos θ/2]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationAngles {
    theta: f64,
    phi: f64,
}

impl RotationAngles {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self {
            theta: wrap_angle(theta),
            phi: wrap_angle(phi),
        }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// The 2×2 unitary `q(θ, φ)`.
    pub fn unitary(&self) -> Matrix2<Complex64> {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let e = Complex64::from_polar(1.0, self.phi);
        Matrix2::new(
            Complex64::new(c, 0.0),
            e * s,
            -e.conj() * s,
            Complex64::new(c, 0.0),
        )
    }
}

/// Angles `(θ_α, φ_α)` of one projective ±1 measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementSetting {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn direction(&self) -> Vector3<f64> {
        measurement_direction(self.theta, self.phi)
    }

    pub fn canonical(&self) -> RotationAngles {
        RotationAngles::new(self.theta, self.phi)
    }
}

/// Bloch direction `n` with `q† σ_z q = n·σ`.
pub fn measurement_direction(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, -st * sp, ct)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperOp(Matrix4<f64>);

impl SuperOp {
    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    pub fn from_matrix(m: Matrix4<f64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn apply(&self, v: &BlochVector) -> BlochVector {
        BlochVector(self.0 * v.0)
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn max_abs_diff(&self, other: &SuperOp) -> f64 {
        (self.0 - other.0).amax()
    }
}

impl Mul for SuperOp {
    type Output = SuperOp;

    fn mul(self, rhs: SuperOp) -> SuperOp {
        compose(&self, &rhs)
    }
}

/// `a · b`: `b` acts first.
pub fn compose(a: &SuperOp, b: &SuperOp) -> SuperOp {
    SuperOp(a.0 * b.0)
}

/// Eigenvalue-weighted projective measurement `ρ ↦ P₊ρP₊ − P₋ρP₋` along
/// `n(θ, φ)`. On `(w₀, w)` it returns `(n·w, w₀ n)`.
pub fn measurement_superop(setting: &MeasurementSetting) -> SuperOp {
    let n = setting.direction();
    let mut m = Matrix4::zeros();
    for i in 0..3 {
        m[(0, i + 1)] = n[i];
        m[(i + 1, 0)] = n[i];
    }
    SuperOp(m)
}

/// SO(3) block of the adjoint action `X ↦ q X q†`.
///
/// `q(θ, φ) = exp(i θ/2 a·σ)` with axis `a = (sin φ, cos φ, 0)`, which rotates
/// Bloch vectors by `−θ` about `a`.
pub fn rotation_matrix(angles: &RotationAngles) -> Matrix3<f64> {
    let (sp, cp) = angles.phi.sin_cos();
    let a = Vector3::new(sp, cp, 0.0);
    let (s, c) = (-angles.theta).sin_cos();
    let k = a.cross_matrix();
    Matrix3::identity() * c + k * s + (a * a.transpose()) * (1.0 - c)
}

pub fn rotation_superop(angles: &RotationAngles) -> SuperOp {
    let r = rotation_matrix(angles);
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(1, 1).copy_from(&r);
    SuperOp(m)
}

/// Affine qubit map `(1, w) ↦ (1, b + diag(c) w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineChannel {
    b: [f64; 3],
    c: [f64; 3],
    valid: bool,
}

impl AffineChannel {
    /// Builds the channel and records whether it is a valid CPTP map.
    pub fn new(b: [f64; 3], c: [f64; 3]) -> Self {
        let in_range = b.iter().chain(c.iter()).all(|x| x.is_finite() && x.abs() <= 1.0 + VALIDITY_TOL);
        let mut ch = Self { b, c, valid: false };
        ch.valid = in_range && choi_psd(&ch, VALIDITY_TOL);
        ch
    }

    /// Like [`AffineChannel::new`] but rejects invalid maps.
    pub fn checked(b: [f64; 3], c: [f64; 3]) -> Result<Self> {
        let ch = Self::new(b, c);
        if ch.valid {
            Ok(ch)
        } else {
            Err(LgError::InvalidChannel(format!(
                "b = {b:?}, c = {c:?} is not completely positive"
            )))
        }
    }

    pub fn unital(c: [f64; 3]) -> Self {
        Self::new([0.0; 3], c)
    }

    pub fn identity() -> Self {
        Self::unital([1.0; 3])
    }

    pub fn depolarizing(c: f64) -> Self {
        Self::unital([c; 3])
    }

    pub fn b(&self) -> [f64; 3] {
        self.b
    }

    pub fn c(&self) -> [f64; 3] {
        self.c
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    pub fn is_unital(&self) -> bool {
        self.b == [0.0; 3]
    }

    /// The c_i of largest magnitude, sign kept.
    pub fn dominant_c(&self) -> f64 {
        self.c
            .iter()
            .copied()
            .fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc })
    }

    /// The S-matrix without a validity check.
    pub fn matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = 1.0;
        for i in 0..3 {
            m[(i + 1, 0)] = self.b[i];
            m[(i + 1, i + 1)] = self.c[i];
        }
        m
    }
}

pub fn channel_superop(ch: &AffineChannel) -> Result<SuperOp> {
    if !ch.valid {
        return Err(LgError::InvalidChannel(format!(
            "b = {:?}, c = {:?} is not completely positive",
            ch.b, ch.c
        )));
    }
    Ok(SuperOp(ch.matrix()))
}

fn pauli(mu: usize) -> Matrix2<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match mu {
        0 => Matrix2::new(one, z, z, one),
        1 => Matrix2::new(z, one, one, z),
        2 => Matrix2::new(z, -i, i, z),
        3 => Matrix2::new(one, z, z, -one),
        _ => unreachable!("Pauli index {mu}"),
    }
}

/// Choi matrix `Σᵢⱼ |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)` of the map with transfer matrix `t`,
/// assembled as `½ Σ_{μν} t_{νμ} σ_μ* ⊗ σ_ν`.
pub fn choi_matrix(t: &Matrix4<f64>) -> Matrix4<Complex64> {
    let mut j = Matrix4::<Complex64>::zeros();
    for mu in 0..4 {
        let left = pauli(mu).map(|z| z.conj());
        for nu in 0..4 {
            let coeff = 0.5 * t[(nu, mu)];
            if coeff == 0.0 {
                continue;
            }
            let right = pauli(nu);
            for (r, c) in index_pairs() {
                let (i, k) = (r / 2, r % 2);
                let (jj, l) = (c / 2, c % 2);
                j[(r, c)] += left[(i, jj)] * right[(k, l)] * coeff;
            }
        }
    }
    j
}

fn index_pairs() -> impl Iterator<Item = (usize, usize)> {
    (0..4).flat_map(|r| (0..4).map(move |c| (r, c)))
}

pub fn choi_min_eigenvalue(ch: &AffineChannel) -> f64 {
    let j = choi_matrix(&ch.matrix());
    j.symmetric_eigenvalues().min()
}

/// Complete positivity: minimum Choi eigenvalue `≥ −tol`.
pub fn choi_psd(ch: &AffineChannel, tol: f64) -> bool {
    choi_min_eigenvalue(ch) >= -tol
}

/// `|c₁ ± c₂| ≤ |1 ± c₃|`, together with `|cᵢ| ≤ 1`.
pub fn unital_constraint_ok(c: [f64; 3]) -> bool {
    let [c1, c2, c3] = c;
    c.iter().all(|x| x.abs() <= 1.0) && (c1 + c2).abs() <= (1.0 + c3).abs() && (c1 - c2).abs() <= (1.0 - c3).abs()
}
