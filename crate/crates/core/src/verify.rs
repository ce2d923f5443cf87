//! Acceptance checks of the closed forms against the optimizer, the grid
//! oracle and each other.
//!
//! Every check reads its closed forms through [`Formulas`], so a corrupted
//! formula can be swapped in to confirm the check notices.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_8, PI, TAU};
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::bloch::{unital_constraint_ok, AffineChannel, BlochVector, RotationAngles};
use crate::bounds::{self, angles, DepolarizingBranch, UnitalTriple};
use crate::engine::{k_of_angles, LgKernel, LgScenario};
use crate::error::Result;
use crate::figures::ARTIFACT_ID;
use crate::optimizer::{grid_oracle, maximize_k, maximize_k_fixed_basis, MaximizeConfig};
use crate::sampler::{sample_cptp, sample_rotation, sample_unital, PRNG_ID};
use crate::scenarios;

pub const REFERENCE_SEED: u64 = 20_130_917;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Sample sizes and runtime budgets as specified.
    Full,
    /// Reduced sample sizes, no runtime budgets.
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionId {
    Ac1,
    Ac2,
    Ac3,
    Ac4,
    Ac5,
    Ac6,
    Ac7,
    Ac8,
    Ac9,
    Ac10,
    Ac11,
}

impl CriterionId {
    pub const ALL: [CriterionId; 11] = [
        CriterionId::Ac1,
        CriterionId::Ac2,
        CriterionId::Ac3,
        CriterionId::Ac4,
        CriterionId::Ac5,
        CriterionId::Ac6,
        CriterionId::Ac7,
        CriterionId::Ac8,
        CriterionId::Ac9,
        CriterionId::Ac10,
        CriterionId::Ac11,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            CriterionId::Ac1 => "AC-1",
            CriterionId::Ac2 => "AC-2",
            CriterionId::Ac3 => "AC-3",
            CriterionId::Ac4 => "AC-4",
            CriterionId::Ac5 => "AC-5",
            CriterionId::Ac6 => "AC-6",
            CriterionId::Ac7 => "AC-7",
            CriterionId::Ac8 => "AC-8",
            CriterionId::Ac9 => "AC-9",
            CriterionId::Ac10 => "AC-10",
            CriterionId::Ac11 => "AC-11",
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            CriterionId::Ac1 => "single unital channel",
            CriterionId::Ac2 => "two unital channels, W = 1",
            CriterionId::Ac3 => "no violation below 1/sqrt(2)",
            CriterionId::Ac4 => "depolarizing branch",
            CriterionId::Ac5 => "damped Rabi",
            CriterionId::Ac6 => "classical channel",
            CriterionId::Ac7 => "Mach-Zehnder",
            CriterionId::Ac8 => "non-unital bounds",
            CriterionId::Ac9 => "closed-form angle sets",
            CriterionId::Ac10 => "general properties",
            CriterionId::Ac11 => "theta_W sweep extremes",
        }
    }

    /// Wall-clock budget under [`Profile::Full`].
    fn budget_seconds(&self) -> Option<f64> {
        match self {
            CriterionId::Ac1 => Some(60.0),
            CriterionId::Ac2 => Some(300.0),
            CriterionId::Ac3 => Some(600.0),
            _ => None,
        }
    }
}

/// The closed forms under test.
#[derive(Debug, Clone, Copy)]
pub struct Formulas {
    pub single_unital: fn([f64; 3]) -> Result<f64>,
    pub two_unital_no_w: fn(&UnitalTriple) -> f64,
    pub depolarizing: fn(f64) -> Result<f64>,
    pub rabi_threshold: fn() -> f64,
    pub classical_channel: fn(f64) -> f64,
    pub mzi: fn(f64) -> Result<f64>,
    pub kmax_3a: fn(f64) -> Result<f64>,
    pub kmax_3b: fn(f64) -> Result<f64>,
    pub single_c1_with_theta_w: fn(f64, f64) -> Result<f64>,
}

impl Default for Formulas {
    fn default() -> Self {
        Self {
            single_unital: bounds::kmax_single_unital,
            two_unital_no_w: bounds::kmax_two_unital_no_w,
            depolarizing: bounds::kmax_depolarizing,
            rabi_threshold: bounds::rabi_threshold,
            classical_channel: bounds::kmax_classical_channel,
            mzi: bounds::kmax_mzi,
            kmax_3a: bounds::kmax_3a,
            kmax_3b: bounds::kmax_3b,
            single_c1_with_theta_w: bounds::kmax_single_c1_with_theta_w,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: CriterionId,
    pub passed: bool,
    /// Measured values, one clause per line.
    pub detail: String,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "{} {} ({}) [{:.1}s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id.label(),
            self.id.title(),
            self.seconds
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub profile: Profile,
    pub criteria: Vec<CriterionReport>,
    /// Low-`c` depolarizing branch singled out by the oracle, if any.
    pub depolarizing_branch: Option<DepolarizingBranch>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{ARTIFACT_ID}");
        let _ = writeln!(s, "prng: {PRNG_ID}");
        let _ = writeln!(s, "profile: {:?}", self.profile);
        let _ = writeln!(
            s,
            "depolarizing low-c branch: {}",
            self.depolarizing_branch.map_or("unresolved", |b| b.formula())
        );
        for c in &self.criteria {
            let _ = writeln!(s, "{}", c.line());
            for l in c.detail.lines() {
                let _ = writeln!(s, "    {l}");
            }
        }
        let passed = self.criteria.iter().filter(|c| c.passed).count();
        let _ = writeln!(s, "{passed}/{} criteria passed", self.criteria.len());
        s
    }
}

struct Sizes {
    ac1: usize,
    ac2: usize,
    ac3: usize,
    ac9: usize,
    ac10_draws: usize,
    ac10_states: usize,
    ac10_flips: usize,
}

impl Sizes {
    fn of(profile: Profile) -> Self {
        match profile {
            Profile::Full => Sizes {
                ac1: 100,
                ac2: 200,
                ac3: 10_000,
                ac9: 5,
                ac10_draws: 100_000,
                ac10_states: 1_000,
                ac10_flips: 50,
            },
            Profile::Fast => Sizes {
                ac1: 15,
                ac2: 20,
                ac3: 300,
                ac9: 5,
                ac10_draws: 10_000,
                ac10_states: 200,
                ac10_flips: 6,
            },
        }
    }
}

/// Collects pass/fail clauses with their measured values.
#[derive(Default)]
struct Clauses {
    passed: bool,
    detail: String,
}

impl Clauses {
    fn new() -> Self {
        Self {
            passed: true,
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, text: impl AsRef<str>) {
        self.passed &= ok;
        let _ = writeln!(self.detail, "[{}] {}", if ok { "ok" } else { "FAILED" }, text.as_ref());
    }
}

fn run_clauses(f: impl FnOnce(&mut Clauses) -> Result<()>) -> Clauses {
    let mut cl = Clauses::new();
    if let Err(e) = f(&mut cl) {
        cl.check(false, format!("error: {e}"));
    }
    cl
}

fn rng(stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(REFERENCE_SEED);
    r.set_stream(stream);
    r
}

fn max_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |m, x| m.max(x.abs()))
}

fn ac1(sizes: &Sizes, fm: &Formulas, cl: &mut Clauses) -> Result<()> {
    let cfg = MaximizeConfig::default();
    let errs: Result<Vec<f64>> = sample_unital(REFERENCE_SEED, sizes.ac1)
        .par_iter()
        .map(|&c| Ok(maximize_k(&scenarios::single_channel(c)?, &cfg)?.k_max - (fm.single_unital)(c)?))
        .collect();
    let worst = max_abs(errs?.into_iter());
    cl.check(worst <= 1e-4, format!("{} triples, max |optimizer - formula| = {worst:.3e} (tol 1e-4)", sizes.ac1));
    Ok(())
}

fn ac2(sizes: &Sizes, fm: &Formulas, cl: &mut Clauses) -> Result<()> {
    let cfg = MaximizeConfig::default();
    let errs: Result<Vec<f64>> = sample_unital(REFERENCE_SEED ^ 0x2, sizes.ac2)
        .par_iter()
        .map(|&c| {
            let k = maximize_k(&scenarios::two_channels(c, RotationAngles::identity())?, &cfg)?.k_max;
            Ok(k - (fm.two_unital_no_w)(&UnitalTriple::new(c)?))
        })
        .collect();
    let worst = max_abs(errs?.into_iter());
    cl.check(worst <= 1e-4, format!("{} triples, max |optimizer - best candidate| = {worst:.3e} (tol 1e-4)", sizes.ac2));
    Ok(())
}

/// Unital triples with `max |cᵢ| ≤ limit`, drawn by filtering the sampler.
fn unital_below(seed: u64, n: usize, limit: f64) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(n);
    let mut round = 0;
    while out.len() < n {
        let batch = sample_unital(seed.wrapping_add(round), 4 * n);
        out.extend(batch.into_iter().filter(|c| c.iter().all(|x| x.abs() <= limit)));
        round += 1;
    }
    out.truncate(n);
    out
}

fn ac3(sizes: &Sizes, cl: &mut Clauses) -> Result<()> {
    let limit = std::f64::consts::FRAC_1_SQRT_2 - 0.01;
    let triples = unital_below(REFERENCE_SEED ^ 0x3, sizes.ac3, limit);
    let rotations = sample_rotation(REFERENCE_SEED ^ 0x3, sizes.ac3);
    let cfg = MaximizeConfig::coarse();
    let ks: Result<Vec<f64>> = triples
        .par_iter()
        .zip(rotations.par_iter())
        .map(|(&c, &w)| Ok(maximize_k(&scenarios::two_channels(c, w)?, &cfg)?.k_max))
        .collect();
    let ks = ks?;
    let exceed = ks.iter().filter(|&&k| k > 1.0 + 1e-6).count();
    let top = ks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    cl.check(
        exceed == 0,
        format!("{} pairs with max|c| <= {limit:.4}, largest K_max = {top:.9}, exceedances = {exceed}", ks.len()),
    );
    Ok(())
}

fn ac4(fm: &Formulas, cl: &mut Clauses) -> Result<Option<DepolarizingBranch>> {
    let cfg = MaximizeConfig::default();
    let mut matches_printed = true;
    let mut matches_resolved = true;
    for c in [0.1, 0.2, 0.3, 0.4, 0.45] {
        let sc = scenarios::depolarizing(c, RotationAngles::identity())?;
        let truth = grid_oracle(&sc, 12)?.max(maximize_k(&sc, &cfg)?.k_max);
        let printed = bounds::kmax_depolarizing_with(c, DepolarizingBranch::Printed)?;
        let resolved = bounds::kmax_depolarizing_with(c, DepolarizingBranch::Resolved)?;
        matches_printed &= (truth - printed).abs() <= 1e-3;
        matches_resolved &= (truth - resolved).abs() <= 1e-3;
        let v = (fm.depolarizing)(c)?;
        cl.check(
            (v - truth).abs() <= 1e-3,
            format!("c = {c}: oracle {truth:.9}, kmax_depolarizing {v:.9} (tol 1e-3)"),
        );
    }
    for c in [0.6, 0.8, 1.0] {
        let sc = scenarios::depolarizing(c, RotationAngles::identity())?;
        let k = maximize_k(&sc, &cfg)?.k_max;
        let v = (fm.depolarizing)(c)?;
        cl.check((k - v).abs() <= 1e-4, format!("c = {c}: optimizer {k:.9}, formula {v:.9} (tol 1e-4)"));
    }
    let branch = match (matches_printed, matches_resolved) {
        (true, false) => Some(DepolarizingBranch::Printed),
        (false, true) => Some(DepolarizingBranch::Resolved),
        _ => None,
    };
    cl.check(
        branch.is_some(),
        format!("oracle selects low-c branch {}", branch.map_or("none", |b| b.formula())),
    );
    Ok(branch)
}

fn ac5(fm: &Formulas, cl: &mut Clauses) -> Result<()> {
    let cfg = MaximizeConfig::default();
    let gamma_t = 0.3;
    let ks: Result<Vec<f64>> = (0..8)
        .map(|i| {
            let omega_t = 0.1 + 0.8 * i as f64;
            Ok(maximize_k(&scenarios::rabi(omega_t, gamma_t, 1.0)?, &cfg)?.k_max)
        })
        .collect();
    let ks = ks?;
    let spread = ks.iter().copied().fold(f64::NEG_INFINITY, f64::max) - ks.iter().copied().fold(f64::INFINITY, f64::min);
    cl.check(spread <= 1e-4, format!("Gamma t = {gamma_t}: spread over 8 values of Omega t = {spread:.3e} (tol 1e-4)"));

    let omega = PI / 6.0;
    let violates = |ratio: f64| -> Result<bool> {
        let k = maximize_k(&scenarios::rabi(omega, ratio * omega, 1.0)?, &cfg)?.k_max;
        Ok(k > 1.0 + 1e-12)
    };
    let (mut lo, mut hi) = (0.5, 2.5);
    if !violates(lo)? || violates(hi)? {
        cl.check(false, "onset not bracketed by Gamma/Omega in [0.5, 2.5]");
        return Ok(());
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if violates(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let onset = 0.5 * (lo + hi);
    let expected = (fm.rabi_threshold)();
    cl.check(
        (onset - expected).abs() <= 1e-3,
        format!("bisected onset Gamma/Omega = {onset:.6}, rabi_threshold = {expected:.6} (tol 1e-3)"),
    );
    Ok(())
}

fn ac6(fm: &Formulas, cl: &mut Clauses) -> Result<()> {
    let cfg = MaximizeConfig::default();
    for lambda in [0.0, FRAC_PI_8, 2.0 * FRAC_PI_8, 3.0 * FRAC_PI_8, FRAC_PI_2] {
        let k = maximize_k(&scenarios::classical_channel(lambda), &cfg)?.k_max;
        let v = (fm.classical_channel)(lambda);
        cl.check((k - v).abs() <= 1e-4, format!("Lambda = {lambda:.6}: optimizer {k:.9}, formula {v:.9}"));
    }
    let k0 = maximize_k(&scenarios::classical_channel(0.0), &cfg)?.k_max;
    let k1 = maximize_k(&scenarios::classical_channel(FRAC_PI_2), &cfg)?.k_max;
    cl.check(
        (k0 - 1.5).abs() <= 1e-4 && (k1 - 1.0).abs() <= 1e-4,
        format!("endpoints {k0:.9} and {k1:.9}"),
    );
    Ok(())
}

fn ac7(fm: &Formulas, cl: &mut Clauses) -> Result<()> {
    let cfg = MaximizeConfig::default();
    for c1 in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let sc = scenarios::mach_zehnder(c1)?;
        let fixed = maximize_k_fixed_basis(&sc, &[(2, 0.0)], &cfg)?.k_max;
        let v = (fm.mzi)(c1)?;
        cl.check((fixed - v).abs() <= 1e-4, format!("c1 = {c1}: theta2 = 0 optimizer {fixed:.9}, formula {v:.9}"));
        let free = maximize_k(&sc, &cfg)?.k_max;
        cl.check((free - 1.5).abs() <= 1e-4, format!("c1 = {c1}: unconstrained optimizer {free:.9}, expected 1.5"));
    }
    Ok(())
}

fn ac8(fm: &Formulas, cl: &mut Clauses) -> Result<()> {
    for c in [0.6, 0.7, 0.8, 0.9, 1.0] {
        let closed = (fm.kmax_3a)(c)?;
        let numeric = bounds::fig3_upper_numeric(c)?;
        cl.check(
            (closed - numeric.k).abs() <= 1e-3,
            format!(
                "c = {c}: kmax_3a {closed:.6}, numeric finite-W upper bound {:.6} (b1 = {:.4}), diff {:.3e} (tol 1e-3)",
                numeric.k,
                numeric.b1,
                numeric.k - closed
            ),
        );
    }
    let crosses = |c: f64| (fm.kmax_3a)(c).is_ok_and(|k| k > 1.0);
    let (mut lo, mut hi) = (0.3, 0.9);
    if crosses(lo) || !crosses(hi) {
        cl.check(false, "kmax_3a crossing of 1 not bracketed in [0.3, 0.9]");
    } else {
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if crosses(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let c_star = 0.5 * (lo + hi);
        cl.check(
            (c_star - 0.544).abs() < 5e-3,
            format!("kmax_3a crosses 1 at c* = {c_star:.6} (expected 0.544 +- 5e-3)"),
        );
    }
    let v = (fm.kmax_3b)(-0.9)?;
    cl.check(v == 0.98, format!("kmax_3b(-0.9) = {v:?}"));
    Ok(())
}

fn draw_valid_unital(r: &mut impl Rng, accept: impl Fn([f64; 3]) -> bool) -> [f64; 3] {
    loop {
        let c: [f64; 3] = std::array::from_fn(|_| r.gen_range(-1.0..=1.0));
        if unital_constraint_ok(c) && accept(c) {
            return c;
        }
    }
}

fn ac9(sizes: &Sizes, cl: &mut Clauses) -> Result<()> {
    let mut r = rng(9);
    let mut worst = [0.0_f64; 7];
    for _ in 0..sizes.ac9 {
        let c = draw_valid_unital(&mut r, |_| true);
        let sc = scenarios::single_channel(c)?;
        for axis in 0..3 {
            let k = k_of_angles(&sc, &angles::single_channel(c, axis));
            worst[axis] = worst[axis].max((k - (1.0 + 0.5 * c[axis] * c[axis])).abs());
        }

        // dominant c₁, second c₃, both angle solutions defined
        let c = draw_valid_unital(&mut r, |c| {
            let norm = c[0] * c[0] + c[2] * c[2];
            c[0].abs() >= c[2].abs() && c[2].abs() >= c[1].abs() && c[2].abs() / norm <= 1.0 && c[0].abs() / norm < 1.0
        });
        let sc = scenarios::two_channels(c, RotationAngles::identity())?;
        let [a, b, cc] = bounds::kmax_two_unital_candidates(&UnitalTriple::new(c)?);
        let ka = k_of_angles(&sc, &angles::two_unital_a(c[0]));
        let kb = k_of_angles(&sc, &angles::two_unital_b(c[0], c[2]));
        let kc = k_of_angles(&sc, &angles::two_unital_c(c[0], c[2]));
        worst[3] = worst[3].max((ka - a.value).abs());
        worst[4] = worst[4].max((kb - b.value).abs());
        worst[5] = worst[5].max((kc - cc.value).abs());

        let c3: f64 = r.gen_range(0.0..=1.0);
        let sc = scenarios::dephased_quarter_turn(c3)?;
        let k = k_of_angles(&sc, &angles::dephased_quarter_turn());
        worst[6] = worst[6].max((k - bounds::kmax_2e(c3)).abs());
    }
    let names = [
        "1 + c1^2/2",
        "1 + c2^2/2",
        "1 + c3^2/2",
        "K(2a)",
        "K(2b)",
        "K(2c)",
        "sqrt(2) c",
    ];
    for (name, w) in names.iter().zip(worst) {
        cl.check(w <= 1e-10, format!("{name}: max deviation over {} points = {w:.3e} (tol 1e-10)", sizes.ac9));
    }
    Ok(())
}

fn random_state(r: &mut impl Rng) -> BlochVector {
    loop {
        let w: [f64; 3] = std::array::from_fn(|_| r.gen_range(-1.0..=1.0));
        if w.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return BlochVector::state(w).expect("inside the ball");
        }
    }
}

fn ac10(sizes: &Sizes, cl: &mut Clauses) -> Result<()> {
    const ANGLES_PER_SCENARIO: usize = 100;
    let n_sc = sizes.ac10_draws.div_ceil(ANGLES_PER_SCENARIO);
    let s1 = sample_cptp(REFERENCE_SEED ^ 0x10, n_sc);
    let s2 = sample_cptp(REFERENCE_SEED ^ 0x11, n_sc);
    let ws = sample_rotation(REFERENCE_SEED ^ 0x10, n_sc);
    let top = (0..n_sc)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(0x1000 + i as u64);
            let rho = random_state(&mut r);
            let sc = LgScenario::new(s1[i], s2[i], ws[i], rho).expect("sampled parts are valid");
            let kernel = LgKernel::new(&sc);
            (0..ANGLES_PER_SCENARIO)
                .map(|_| kernel.k(&std::array::from_fn(|_| r.gen_range(0.0..TAU))))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    cl.check(
        top <= 1.5 + 1e-9,
        format!("{} random (scenario, angles) draws, largest K = {top:.12}", n_sc * ANGLES_PER_SCENARIO),
    );

    let mut r = rng(10);
    let triples = sample_unital(REFERENCE_SEED ^ 0x12, sizes.ac10_states);
    let mut worst = 0.0_f64;
    for c in &triples {
        let w = RotationAngles::new(r.gen_range(0.0..TAU), r.gen_range(0.0..TAU));
        let a = LgScenario::new(AffineChannel::unital(*c), AffineChannel::unital(*c), w, random_state(&mut r))?;
        let b = a.with_rho0(random_state(&mut r))?;
        let ang: [f64; 6] = std::array::from_fn(|_| r.gen_range(0.0..TAU));
        worst = worst.max((k_of_angles(&a, &ang) - k_of_angles(&b, &ang)).abs());
    }
    cl.check(
        worst <= 1e-12,
        format!("{} unital draws, max |K(rho) - K(rho')| = {worst:.3e} (tol 1e-12)", triples.len()),
    );

    let cfg = MaximizeConfig::default();
    let flips = [[-1.0, -1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0]];
    let triples = sample_unital(REFERENCE_SEED ^ 0x13, sizes.ac10_flips);
    let rotations = sample_rotation(REFERENCE_SEED ^ 0x13, sizes.ac10_flips);
    let diffs: Result<Vec<f64>> = (0..sizes.ac10_flips)
        .into_par_iter()
        .map(|i| {
            let c = triples[i];
            let f = flips[i % 3];
            let flipped = [c[0] * f[0], c[1] * f[1], c[2] * f[2]];
            let a = maximize_k(&scenarios::two_channels(c, rotations[i])?, &cfg)?.k_max;
            let b = maximize_k(&scenarios::two_channels(flipped, rotations[i])?, &cfg)?.k_max;
            Ok((a - b).abs())
        })
        .collect();
    let worst = max_abs(diffs?.into_iter());
    cl.check(
        worst <= 1e-3,
        format!("{} two-axis sign flips, max |K_max change| = {worst:.3e} (tol 1e-3)", sizes.ac10_flips),
    );
    Ok(())
}

fn ac11(fm: &Formulas, cl: &mut Clauses) -> Result<()> {
    let f = |t: f64| (fm.single_c1_with_theta_w)(1.0, t);
    let at_zero = f(0.0)?;
    let at_half_pi = f(FRAC_PI_2)?;
    let at_third = f(FRAC_PI_3)?;
    cl.check((at_zero - 1.0).abs() <= 1e-9, format!("theta_W = 0: {at_zero:.12}"));
    cl.check((at_half_pi - 1.0).abs() <= 1e-9, format!("theta_W = pi/2: {at_half_pi:.12}"));
    cl.check((at_third - 1.5).abs() <= 1e-9, format!("theta_W = pi/3: {at_third:.12}"));
    let scan: Result<Vec<f64>> = (0..=2000).map(|i| f(FRAC_PI_2 * i as f64 / 2000.0)).collect();
    let scan = scan?;
    let lo = scan.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scan.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    cl.check(
        lo >= 1.0 - 1e-9 && hi <= 1.5 + 1e-9,
        format!("range over [0, pi/2]: [{lo:.12}, {hi:.12}]"),
    );
    Ok(())
}

/// Runs one criterion.
pub fn run_criterion(id: CriterionId, profile: Profile, fm: &Formulas) -> (CriterionReport, Option<DepolarizingBranch>) {
    let sizes = Sizes::of(profile);
    let start = Instant::now();
    let mut branch = None;
    let mut cl = run_clauses(|cl| match id {
        CriterionId::Ac1 => ac1(&sizes, fm, cl),
        CriterionId::Ac2 => ac2(&sizes, fm, cl),
        CriterionId::Ac3 => ac3(&sizes, cl),
        CriterionId::Ac4 => {
            branch = ac4(fm, cl)?;
            Ok(())
        }
        CriterionId::Ac5 => ac5(fm, cl),
        CriterionId::Ac6 => ac6(fm, cl),
        CriterionId::Ac7 => ac7(fm, cl),
        CriterionId::Ac8 => ac8(fm, cl),
        CriterionId::Ac9 => ac9(&sizes, cl),
        CriterionId::Ac10 => ac10(&sizes, cl),
        CriterionId::Ac11 => ac11(fm, cl),
    });
    let seconds = start.elapsed().as_secs_f64();
    if let (Profile::Full, Some(budget)) = (profile, id.budget_seconds()) {
        cl.check(seconds <= budget, format!("runtime {seconds:.1}s (budget {budget:.0}s)"));
    }
    (
        CriterionReport {
            id,
            passed: cl.passed,
            detail: cl.detail,
            seconds,
        },
        branch,
    )
}

pub fn verify_with(profile: Profile, fm: &Formulas) -> VerifyReport {
    let mut criteria = Vec::new();
    let mut depolarizing_branch = None;
    for id in CriterionId::ALL {
        let (report, branch) = run_criterion(id, profile, fm);
        if id == CriterionId::Ac4 {
            depolarizing_branch = branch;
        }
        criteria.push(report);
    }
    VerifyReport {
        profile,
        criteria,
        depolarizing_branch,
    }
}

pub fn verify(profile: Profile) -> VerifyReport {
    verify_with(profile, &Formulas::default())
}
