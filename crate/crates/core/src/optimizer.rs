//! Maximization of `K` over measurement angles.
//!
//! Multistart Nelder-Mead ascent: the best points of a coarse angle grid plus
//! uniform random starts, each refined until the simplex collapses. Starts are
//! independent and run on the rayon pool; the reduction is done in start order
//! so results do not depend on scheduling.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::bloch::{measurement_direction, wrap_angle};
use crate::engine::{LgKernel, LgScenario};
use crate::error::{LgError, Result};

pub const ANGLE_NAMES: [&str; 6] = ["theta1", "phi1", "theta2", "phi2", "theta3", "phi3"];

/// Index into the `(θ₁, φ₁, θ₂, φ₂, θ₃, φ₃)` vector by name.
pub fn angle_index(name: &str) -> Option<usize> {
    ANGLE_NAMES.iter().position(|n| *n == name)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximizeConfig {
    /// Local ascents: half seeded from the best grid points, the rest random.
    pub n_starts: usize,
    /// Grid points per free angle used for seeding.
    pub grid_seed_resolution: usize,
    /// Convergence tolerance on `K` across the simplex.
    pub local_tol: f64,
    /// Iteration cap for a single Nelder-Mead run.
    pub max_iters: usize,
    /// Angles held fixed: `(index, value)`.
    pub frozen: Vec<(usize, f64)>,
    pub seed: u64,
    /// Local maxima below this value are not reported.
    pub report_threshold: f64,
}

impl Default for MaximizeConfig {
    fn default() -> Self {
        Self {
            n_starts: 128,
            grid_seed_resolution: 5,
            local_tol: 1e-12,
            max_iters: 5_000,
            frozen: Vec::new(),
            seed: 0x1e66_e77a_2013,
            report_threshold: f64::NEG_INFINITY,
        }
    }
}

impl MaximizeConfig {
    /// Cheaper profile for bulk sweeps over many scenarios.
    pub fn coarse() -> Self {
        Self {
            n_starts: 24,
            grid_seed_resolution: 3,
            local_tol: 1e-11,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_frozen(mut self, frozen: Vec<(usize, f64)>) -> Self {
        self.frozen = frozen;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_starts == 0 {
            return Err(LgError::InvalidConfig("n_starts must be at least 1".into()));
        }
        if !(self.local_tol > 0.0) {
            return Err(LgError::InvalidConfig("local_tol must be positive".into()));
        }
        if self.grid_seed_resolution == 0 {
            return Err(LgError::InvalidConfig("grid_seed_resolution must be at least 1".into()));
        }
        let mut seen = [false; 6];
        for &(i, v) in &self.frozen {
            if i >= 6 {
                return Err(LgError::InvalidConfig(format!("frozen angle index {i} out of range")));
            }
            if seen[i] {
                return Err(LgError::InvalidConfig(format!("angle {} frozen twice", ANGLE_NAMES[i])));
            }
            if !v.is_finite() {
                return Err(LgError::InvalidConfig(format!("frozen value for {} is not finite", ANGLE_NAMES[i])));
            }
            seen[i] = true;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMaximum {
    pub k: f64,
    pub angles: [f64; 6],
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMaxResult {
    pub k_max: f64,
    pub argmax: [f64; 6],
    pub n_distinct_local_maxima: usize,
    /// Deduplicated, sorted by decreasing `k`.
    pub local_maxima: Vec<LocalMaximum>,
    /// False when no start met `local_tol` within `max_iters`; `k_max` is
    /// then the best value seen.
    pub converged: bool,
}

/// Canonical form of an angle vector: each measurement mapped to
/// `θ ∈ [0, π]`, `φ ∈ [0, 2π)`, with `φ = 0` on the poles. Uses the identity
/// `n(−θ, φ + π) = n(θ, φ)`.
pub fn canonical_angles(angles: &[f64; 6]) -> [f64; 6] {
    let mut out = [0.0; 6];
    for m in 0..3 {
        let mut theta = wrap_angle(angles[2 * m]);
        let mut phi = angles[2 * m + 1];
        if theta > PI {
            theta = TAU - theta;
            phi += PI;
        }
        phi = wrap_angle(phi);
        if theta < 1e-12 || PI - theta < 1e-12 {
            phi = 0.0;
        }
        out[2 * m] = theta;
        out[2 * m + 1] = phi;
    }
    out
}

fn lex_cmp(a: &[f64; 6], b: &[f64; 6]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Descending `k`, ties broken by the lexicographically smallest canonical angles.
fn rank(a: &LocalMaximum, b: &LocalMaximum) -> Ordering {
    b.k.total_cmp(&a.k).then_with(|| lex_cmp(&a.angles, &b.angles))
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOutcome {
    pub value: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Nelder-Mead maximization of `f` starting from `x`, which is overwritten
/// with the best vertex.
///
/// Stops when the spread of `f` across the simplex is below `f_tol` and the
/// simplex fits in a box of side `x_tol`, or after `max_iters` iterations.
pub fn nelder_mead_max<F>(f: &F, x: &mut [f64], step: f64, f_tol: f64, x_tol: f64, max_iters: usize) -> NelderMeadOutcome
where
    F: Fn(&[f64]) -> f64,
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let d = x.len();
    if d == 0 {
        return NelderMeadOutcome {
            value: f(x),
            converged: true,
            evaluations: 1,
        };
    }
    // minimize −f
    let g = |p: &[f64]| -f(p);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    simplex.push(x.to_vec());
    for i in 0..d {
        let mut p = x.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| g(p)).collect();
    let mut evals = d + 1;
    let mut order: Vec<usize> = (0..=d).collect();
    let mut centroid = vec![0.0; d];
    let mut trial = vec![0.0; d];
    let mut trial2 = vec![0.0; d];
    let mut converged = false;

    for _ in 0..max_iters {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[d];
        let second_worst = order[d - 1];

        let f_spread = values[worst] - values[best];
        let x_spread = simplex
            .iter()
            .map(|p| p.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if f_spread <= f_tol && x_spread <= x_tol {
            converged = true;
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..d] {
            for (c, v) in centroid.iter_mut().zip(&simplex[i]) {
                *c += v;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= d as f64);

        for j in 0..d {
            trial[j] = centroid[j] + REFLECT * (centroid[j] - simplex[worst][j]);
        }
        let f_reflect = g(&trial);
        evals += 1;

        if f_reflect < values[best] {
            for j in 0..d {
                trial2[j] = centroid[j] + EXPAND * (trial[j] - centroid[j]);
            }
            let f_expand = g(&trial2);
            evals += 1;
            if f_expand < f_reflect {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = f_expand;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = f_reflect;
            }
            continue;
        }
        if f_reflect < values[second_worst] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = f_reflect;
            continue;
        }

        // contraction, outside if the reflection helped at all
        let outside = f_reflect < values[worst];
        for j in 0..d {
            trial2[j] = if outside {
                centroid[j] + CONTRACT * (trial[j] - centroid[j])
            } else {
                centroid[j] + CONTRACT * (simplex[worst][j] - centroid[j])
            };
        }
        let f_contract = g(&trial2);
        evals += 1;
        let threshold = if outside { f_reflect } else { values[worst] };
        if f_contract <= threshold {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = f_contract;
            continue;
        }

        let anchor = simplex[best].clone();
        for &i in &order[1..] {
            for (v, a) in simplex[i].iter_mut().zip(&anchor) {
                *v = a + SHRINK * (*v - a);
            }
            values[i] = g(&simplex[i]);
            evals += 1;
        }
    }

    let best = (0..=d).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    x.copy_from_slice(&simplex[best]);
    NelderMeadOutcome {
        value: -values[best],
        converged,
        evaluations: evals,
    }
}

/// Repeated Nelder-Mead from the running best point with shrinking initial
/// simplices, until a restart no longer improves by more than `f_tol`.
pub fn polish_max<F>(f: &F, x: &mut [f64], step: f64, f_tol: f64, max_iters: usize) -> NelderMeadOutcome
where
    F: Fn(&[f64]) -> f64,
{
    let x_tol = f_tol.sqrt().clamp(1e-8, 1e-2);
    let mut out = nelder_mead_max(f, x, step, f_tol, x_tol, max_iters);
    let mut evaluations = out.evaluations;
    let mut restart_step = (step * 0.1).max(1e-3);
    for _ in 0..4 {
        let previous = out.value;
        let mut candidate = x.to_vec();
        let next = nelder_mead_max(f, &mut candidate, restart_step, f_tol, x_tol, max_iters);
        evaluations += next.evaluations;
        if next.value >= out.value {
            x.copy_from_slice(&candidate);
            out = next;
        }
        if next.value - previous <= f_tol {
            break;
        }
        restart_step = (restart_step * 0.1).max(1e-4);
    }
    out.evaluations = evaluations;
    out
}

struct FreeAngles {
    free: Vec<usize>,
    template: [f64; 6],
}

impl FreeAngles {
    fn new(frozen: &[(usize, f64)]) -> Self {
        let mut template = [0.0; 6];
        let mut is_frozen = [false; 6];
        for &(i, v) in frozen {
            template[i] = v;
            is_frozen[i] = true;
        }
        let free = (0..6).filter(|i| !is_frozen[*i]).collect();
        Self { free, template }
    }

    fn expand(&self, x: &[f64]) -> [f64; 6] {
        let mut a = self.template;
        for (slot, v) in self.free.iter().zip(x) {
            a[*slot] = *v;
        }
        a
    }
}

fn grid_point(index: usize, dims: usize, resolution: usize) -> Vec<f64> {
    let mut rem = index;
    let mut p = vec![0.0; dims];
    for slot in p.iter_mut().rev() {
        *slot = TAU * (rem % resolution) as f64 / resolution as f64;
        rem /= resolution;
    }
    p
}

/// Deduplicates local maxima by value: entries with `k` within 1e-6 merge,
/// keeping the lexicographically smallest canonical angles. Maxima often
/// come in continuous families (e.g. rotating `n₂`, `n₃` together about the
/// dominant axis), so angle distance alone does not identify them.
pub fn dedup_local_maxima(mut found: Vec<LocalMaximum>) -> Vec<LocalMaximum> {
    found.sort_by(rank);
    let mut out: Vec<LocalMaximum> = Vec::new();
    for m in found {
        if !out.iter().any(|o| (o.k - m.k).abs() <= 1e-6) {
            out.push(m);
        }
    }
    out
}

/// Maximizes `K` of a kernel over the non-frozen angles.
pub fn maximize_kernel(kernel: &LgKernel, cfg: &MaximizeConfig) -> Result<KMaxResult> {
    cfg.validate()?;
    let space = FreeAngles::new(&cfg.frozen);
    let dims = space.free.len();
    let objective = |x: &[f64]| kernel.k(&space.expand(x));

    let n_grid = if dims == 0 { 0 } else { cfg.n_starts.div_ceil(2) };
    let n_random = if dims == 0 { 1 } else { cfg.n_starts - n_grid };

    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(cfg.n_starts);
    if n_grid > 0 {
        let total = cfg.grid_seed_resolution.pow(dims as u32);
        let mut scored: Vec<(f64, usize)> = (0..total)
            .into_par_iter()
            .map(|i| (objective(&grid_point(i, dims, cfg.grid_seed_resolution)), i))
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        starts.extend(
            scored
                .iter()
                .take(n_grid)
                .map(|&(_, i)| grid_point(i, dims, cfg.grid_seed_resolution)),
        );
    }
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    for _ in 0..n_random {
        starts.push((0..dims).map(|_| rng.gen_range(0.0..TAU)).collect());
    }

    let runs: Vec<(LocalMaximum, bool)> = starts
        .into_par_iter()
        .map(|mut x| {
            let out = polish_max(&objective, &mut x, 0.4, cfg.local_tol, cfg.max_iters);
            let angles = canonical_angles(&space.expand(&x));
            (
                LocalMaximum {
                    k: kernel.k(&angles),
                    angles,
                },
                out.converged,
            )
        })
        .collect();

    let converged = runs.iter().any(|(_, c)| *c);
    let preferred: Vec<LocalMaximum> = if converged {
        runs.iter().filter(|(_, c)| *c).map(|(m, _)| *m).collect()
    } else {
        runs.iter().map(|(m, _)| *m).collect()
    };
    let best = *preferred.iter().min_by(|a, b| rank(a, b)).expect("at least one start");
    // unconverged runs may still hold the best point
    let best = runs
        .iter()
        .map(|(m, _)| m)
        .filter(|m| m.k > best.k + cfg.local_tol)
        .min_by(|a, b| rank(a, b))
        .copied()
        .unwrap_or(best);

    let local_maxima: Vec<LocalMaximum> = dedup_local_maxima(
        runs.iter()
            .filter(|(m, c)| *c && m.k >= cfg.report_threshold)
            .map(|(m, _)| *m)
            .collect(),
    );

    Ok(KMaxResult {
        k_max: best.k,
        argmax: best.angles,
        n_distinct_local_maxima: local_maxima.len(),
        local_maxima,
        converged,
    })
}

pub fn maximize_k(sc: &LgScenario, cfg: &MaximizeConfig) -> Result<KMaxResult> {
    maximize_kernel(&LgKernel::new(sc), cfg)
}

/// Maximization with some angles held fixed, e.g. `θ₂ = 0` for a measurement
/// in a fixed basis.
pub fn maximize_k_fixed_basis(sc: &LgScenario, frozen: &[(usize, f64)], cfg: &MaximizeConfig) -> Result<KMaxResult> {
    let cfg = cfg.clone().with_frozen(frozen.to_vec());
    maximize_k(sc, &cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Maximum,
    Minimum,
    Saddle,
}

/// A stationary point of `K` over the free angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub k: f64,
    pub angles: [f64; 6],
    pub kind: CriticalKind,
    pub gradient_norm: f64,
}

const GRAD_STEP: f64 = 1e-5;
const HESS_STEP: f64 = 1e-4;
const CURVATURE_TOL: f64 = 1e-6;
const STATIONARY_TOL: f64 = 1e-8;

fn gradient(f: &impl Fn(&[f64]) -> f64, x: &[f64]) -> DVector<f64> {
    let mut p = x.to_vec();
    DVector::from_iterator(
        x.len(),
        (0..x.len()).map(|i| {
            p[i] = x[i] + GRAD_STEP;
            let up = f(&p);
            p[i] = x[i] - GRAD_STEP;
            let down = f(&p);
            p[i] = x[i];
            (up - down) / (2.0 * GRAD_STEP)
        }),
    )
}

fn hessian(f: &impl Fn(&[f64]) -> f64, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let h = HESS_STEP;
    let mut p = x.to_vec();
    let mut eval = |di: (usize, f64), dj: (usize, f64)| {
        p[di.0] += di.1;
        p[dj.0] += dj.1;
        let v = f(&p);
        p[di.0] = x[di.0];
        p[dj.0] = x[dj.0];
        v
    };
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = (eval((i, h), (j, h)) - eval((i, h), (j, -h)) - eval((i, -h), (j, h)) + eval((i, -h), (j, -h)))
                / (4.0 * h * h);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Stationary points of `K` over the non-frozen angles, classified by the
/// Hessian and deduplicated by `(k, kind)`.
///
/// Each random start first minimizes `|∇K|²` with Nelder-Mead, then takes
/// Newton steps with a pseudo-inverse Hessian; flat directions are common
/// because of continuous symmetries. Only points with `|∇K| < 1e-8` are kept.
/// Unlike [`maximize_kernel`] this also finds saddles, e.g. the
/// `1 + c₂²/2` and `1 + c₃²/2` points of a single unital channel.
pub fn critical_points(kernel: &LgKernel, cfg: &MaximizeConfig) -> Result<Vec<CriticalPoint>> {
    cfg.validate()?;
    let space = FreeAngles::new(&cfg.frozen);
    let dims = space.free.len();
    let objective = |x: &[f64]| kernel.k(&space.expand(x));
    if dims == 0 {
        let angles = space.expand(&[]);
        return Ok(vec![CriticalPoint {
            k: kernel.k(&angles),
            angles: canonical_angles(&angles),
            kind: CriticalKind::Maximum,
            gradient_norm: 0.0,
        }]);
    }

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let starts: Vec<Vec<f64>> = (0..cfg.n_starts)
        .map(|_| (0..dims).map(|_| rng.gen_range(0.0..TAU)).collect())
        .collect();

    let found: Vec<CriticalPoint> = starts
        .into_par_iter()
        .filter_map(|mut x| {
            let grad_sq = |y: &[f64]| -gradient(&objective, y).norm_squared();
            polish_max(&grad_sq, &mut x, 0.2, 1e-20, cfg.max_iters);
            for _ in 0..50 {
                let g = gradient(&objective, &x);
                if g.norm() < 1e-12 {
                    break;
                }
                let step = hessian(&objective, &x).svd(true, true).solve(&g, 1e-6).ok()?;
                for (xi, si) in x.iter_mut().zip(step.iter()) {
                    *xi -= si;
                }
            }
            let g = gradient(&objective, &x).norm();
            if !(g < STATIONARY_TOL) {
                return None;
            }
            let eig = hessian(&objective, &x).symmetric_eigenvalues();
            let kind = if eig.iter().any(|&e| e > CURVATURE_TOL) {
                if eig.iter().any(|&e| e < -CURVATURE_TOL) {
                    CriticalKind::Saddle
                } else {
                    CriticalKind::Minimum
                }
            } else {
                CriticalKind::Maximum
            };
            let angles = canonical_angles(&space.expand(&x));
            Some(CriticalPoint {
                k: kernel.k(&angles),
                angles,
                kind,
                gradient_norm: g,
            })
        })
        .collect();

    let mut found = found;
    found.sort_by(|a, b| b.k.total_cmp(&a.k).then_with(|| lex_cmp(&a.angles, &b.angles)));
    let mut out: Vec<CriticalPoint> = Vec::new();
    for p in found {
        if !out.iter().any(|o| o.kind == p.kind && (o.k - p.k).abs() <= 1e-6) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Exhaustive evaluation on the uniform grid `{2πk/resolution}⁶`.
pub fn grid_oracle(sc: &LgScenario, resolution: usize) -> Result<f64> {
    if resolution < 4 {
        return Err(LgError::DomainError(format!("grid resolution {resolution} < 4")));
    }
    let kernel = LgKernel::new(sc);
    let pts: Vec<f64> = (0..resolution).map(|k| TAU * k as f64 / resolution as f64).collect();
    let dirs: Vec<Vector3<f64>> = pts
        .iter()
        .flat_map(|&t| pts.iter().map(move |&p| measurement_direction(t, p)))
        .collect();
    let best = dirs
        .par_iter()
        .map(|n1| {
            let mut best = f64::NEG_INFINITY;
            for n2 in &dirs {
                for n3 in &dirs {
                    let (c21, c32, c31) = kernel.correlators_for(n1, n2, n3);
                    best = best.max(c21 + c32 - c31);
                }
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{AffineChannel, BlochVector, RotationAngles};
    use crate::engine::k_of_angles;
    use std::f64::consts::FRAC_PI_2;

    fn directions(angles: &[f64; 6]) -> [Vector3<f64>; 3] {
        [
            measurement_direction(angles[0], angles[1]),
            measurement_direction(angles[2], angles[3]),
            measurement_direction(angles[4], angles[5]),
        ]
    }

    fn same_setting(a: &[f64; 6], b: &[f64; 6]) -> bool {
        let (da, db) = (directions(a), directions(b));
        da.iter().zip(db.iter()).all(|(x, y)| (x - y).amax() < 1e-4)
    }

    fn single_channel(c: [f64; 3]) -> LgScenario {
        LgScenario::new(AffineChannel::unital(c), AffineChannel::identity(), RotationAngles::identity(), BlochVector::maximally_mixed()).unwrap()
    }

    #[test]
    fn nelder_mead_finds_quadratic_peak() {
        let f = |x: &[f64]| 3.0 - (x[0] - 1.0).powi(2) - 2.0 * (x[1] + 0.5).powi(2);
        let mut x = [0.0, 0.0];
        let out = polish_max(&f, &mut x, 0.5, 1e-14, 5_000);
        assert!(out.converged);
        assert!((out.value - 3.0).abs() < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] + 0.5).abs() < 1e-5);
    }

    #[test]
    fn identity_channels_reach_three_halves() {
        let sc = single_channel([1.0; 3]);
        let r = maximize_k(&sc, &MaximizeConfig::default()).unwrap();
        assert!(r.converged);
        assert!((r.k_max - 1.5).abs() < 1e-9);
        assert!((k_of_angles(&sc, &r.argmax) - r.k_max).abs() < 1e-10);
    }

    #[test]
    fn single_channel_maximum() {
        let c = [0.8, 0.5, 0.3];
        let r = maximize_k(&single_channel(c), &MaximizeConfig::default()).unwrap();
        assert!((r.k_max - 1.32).abs() < 1e-8, "{}", r.k_max);
        assert!(r.local_maxima.iter().all(|m| m.k <= r.k_max));
        assert_eq!(r.n_distinct_local_maxima, r.local_maxima.len());
    }

    #[test]
    fn single_channel_critical_values_reveal_each_axis() {
        let c = [0.8, 0.5, 0.3];
        let kernel = LgKernel::new(&single_channel(c));
        let cfg = MaximizeConfig { n_starts: 96, ..MaximizeConfig::default() };
        let pts = critical_points(&kernel, &cfg).unwrap();
        let kind_of = |target: f64| pts.iter().find(|p| (p.k - target).abs() < 1e-6).map(|p| p.kind);
        assert_eq!(kind_of(1.32), Some(CriticalKind::Maximum));
        assert_eq!(kind_of(1.125), Some(CriticalKind::Saddle));
        assert_eq!(kind_of(1.045), Some(CriticalKind::Saddle));
        assert!(pts.iter().all(|p| p.gradient_norm < 1e-8));
    }

    #[test]
    fn closed_form_angle_sets_are_stationary() {
        let c = [0.8, 0.5, 0.3];
        let kernel = LgKernel::new(&single_channel(c));
        let f = |x: &[f64]| kernel.k(&[x[0], x[1], x[2], x[3], x[4], x[5]]);
        let sets = [
            [-FRAC_PI_2, 0.0, -(c[0] / 2.0).asin(), 0.0, (c[0] / 2.0).asin(), 0.0],
            [-FRAC_PI_2, FRAC_PI_2, (c[1] / 2.0).asin(), -FRAC_PI_2, (c[1] / 2.0).asin(), FRAC_PI_2],
            [0.0, -FRAC_PI_2, (c[2] / 2.0).acos(), 0.0, (-c[2] / 2.0).acos(), 0.0],
        ];
        let mut positive_curvature = Vec::new();
        for (a, ci) in sets.iter().zip(c) {
            assert!((f(a) - (1.0 + 0.5 * ci * ci)).abs() < 1e-12);
            assert!(gradient(&f, a).norm() < 1e-9);
            positive_curvature.push(hessian(&f, a).symmetric_eigenvalues().max() > 1e-3);
        }
        assert_eq!(positive_curvature, [false, true, true]);
    }

    #[test]
    fn fully_depolarizing_channel_has_no_violation() {
        let r = maximize_k(&single_channel([0.0; 3]), &MaximizeConfig::default()).unwrap();
        assert!((r.k_max - 1.0).abs() < 1e-9);
    }

    #[test]
    fn grid_oracle_bounds() {
        let id = single_channel([1.0; 3]);
        assert!(grid_oracle(&id, 12).unwrap() >= 1.49);
        let dep = single_channel([0.0; 3]);
        for res in [4, 5, 7] {
            assert!((grid_oracle(&dep, res).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(grid_oracle(&id, 3), Err(LgError::DomainError(_))));
    }

    #[test]
    fn oracle_never_beats_optimizer() {
        let sc = single_channel([0.6, -0.2, -0.35]);
        let best = maximize_k(&sc, &MaximizeConfig::default()).unwrap().k_max;
        assert!(grid_oracle(&sc, 8).unwrap() <= best + 1e-9);
    }

    #[test]
    fn fixed_basis_mach_zehnder() {
        let sc = single_channel([0.5, 0.5, 1.0]);
        let r = maximize_k_fixed_basis(&sc, &[(2, 0.0)], &MaximizeConfig::default()).unwrap();
        assert!((r.k_max - 7.0 / 6.0).abs() < 1e-8, "{}", r.k_max);
        assert_eq!(r.argmax[2], 0.0);
    }

    #[test]
    fn runs_are_deterministic() {
        let sc = single_channel([0.7, -0.1, -0.4]);
        let cfg = MaximizeConfig::coarse().with_seed(99);
        assert_eq!(maximize_k(&sc, &cfg).unwrap(), maximize_k(&sc, &cfg).unwrap());
    }

    #[test]
    fn all_angles_frozen_evaluates_once() {
        let sc = single_channel([1.0; 3]);
        let frozen: Vec<(usize, f64)> = (0..6).map(|i| (i, 0.0)).collect();
        let r = maximize_k_fixed_basis(&sc, &frozen, &MaximizeConfig::default()).unwrap();
        assert_eq!(r.k_max, 1.0);
    }

    #[test]
    fn bad_configs_are_rejected() {
        let sc = single_channel([1.0; 3]);
        let cfg = MaximizeConfig { n_starts: 0, ..MaximizeConfig::default() };
        assert!(maximize_k(&sc, &cfg).is_err());
        assert!(maximize_k_fixed_basis(&sc, &[(2, 0.0), (2, 1.0)], &MaximizeConfig::default()).is_err());
        assert!(maximize_k_fixed_basis(&sc, &[(6, 0.0)], &MaximizeConfig::default()).is_err());
    }

    #[test]
    fn canonical_angles_preserve_directions() {
        let a = [-0.3, 0.2, 4.0, -1.0, 7.0, 0.5];
        let c = canonical_angles(&a);
        assert!(same_setting(&a, &c));
        for m in 0..3 {
            assert!((0.0..=PI).contains(&c[2 * m]));
            assert!((0.0..TAU).contains(&c[2 * m + 1]));
        }
    }
}
