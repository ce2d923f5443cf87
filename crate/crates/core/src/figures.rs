//! Monte-Carlo ensembles of `K_max` against the dominant decoherence
//! parameter, with the analytic envelopes evaluated at each row's `c`.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::bloch::{AffineChannel, BlochVector};
use crate::bounds::{
    kmax_single_c1_with_theta_w, nonunital_no_w_bounds, nonunital_with_w_bounds, unital_no_w_bounds,
    unital_with_w_bounds,
};
use crate::engine::LgScenario;
use crate::error::Result;
use crate::optimizer::{maximize_k, MaximizeConfig};
use crate::sampler::{sample, ChannelSample, SampleKind, SampleSpec, PRNG_ID};
use crate::scenarios;

pub const ARTIFACT_ID: &str = concat!("lgmax ", env!("CARGO_PKG_VERSION"));
pub const CSV_HEADER: &str = "c,k_max,bound_lower,bound_upper,variant";
pub const CURVE_HEADER: &str = "c,bound_lower,bound_upper,variant";
pub const CURVE_POINTS: usize = 512;
pub const INSET_C1: [f64; 5] = [0.6, 0.7, 0.8, 0.9, 1.0];
/// Allowed optimizer slack when checking rows against their envelope.
pub const ENVELOPE_TOL: f64 = 5e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Two identical unital channels, `W = 1`.
    UnitalNoW,
    /// Two identical unital channels with a random `W`.
    UnitalWithW,
    /// Two identical non-unital channels, mixed input, with and without `W`.
    Nonunital,
}

impl Figure {
    pub fn name(&self) -> &'static str {
        match self {
            Figure::UnitalNoW => "fig1",
            Figure::UnitalWithW => "fig2",
            Figure::Nonunital => "fig3",
        }
    }

    pub fn kinds(&self) -> &'static [SampleKind] {
        match self {
            Figure::UnitalNoW => &[SampleKind::Unital],
            Figure::UnitalWithW => &[SampleKind::UnitalWithW],
            Figure::Nonunital => &[SampleKind::Nonunital, SampleKind::NonunitalWithW],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureRow {
    pub c: f64,
    pub k_max: f64,
    pub bound_lower: f64,
    pub bound_upper: f64,
    pub variant: SampleKind,
}

impl FigureRow {
    pub fn within_envelope(&self, tol: f64) -> bool {
        self.bound_lower <= self.k_max + tol && self.k_max <= self.bound_upper + tol
    }
}

/// Optimizer settings used for the figures.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureConfig {
    /// Per-row maximization of `K`.
    pub row: MaximizeConfig,
    /// Numerical non-unital upper envelope.
    pub envelope: MaximizeConfig,
}

impl Default for FigureConfig {
    fn default() -> Self {
        Self {
            row: MaximizeConfig::coarse(),
            envelope: MaximizeConfig {
                n_starts: 12,
                local_tol: 1e-12,
                ..MaximizeConfig::default()
            },
        }
    }
}

/// `c` as plotted: `max |cᵢ|` for unital ensembles, the signed dominant `cᵢ`
/// otherwise (the non-unital lower envelope depends on its sign).
pub fn plotted_c(kind: SampleKind, ch: &AffineChannel) -> f64 {
    let d = ch.dominant_c();
    if kind.is_unital() {
        d.abs()
    } else {
        d
    }
}

pub fn envelope(kind: SampleKind, c: f64, cfg: &FigureConfig) -> Result<(f64, f64)> {
    match kind {
        SampleKind::Unital => unital_no_w_bounds(c),
        SampleKind::UnitalWithW => unital_with_w_bounds(c),
        SampleKind::Nonunital => nonunital_no_w_bounds(c),
        SampleKind::NonunitalWithW => nonunital_with_w_bounds(c, &cfg.envelope),
    }
}

fn row_for(kind: SampleKind, s: &ChannelSample, cfg: &FigureConfig) -> Result<FigureRow> {
    let sc = LgScenario::new(s.channel, s.channel, s.w, BlochVector::maximally_mixed())?;
    let c = plotted_c(kind, &s.channel);
    let k_max = maximize_k(&sc, &cfg.row)?.k_max;
    let (bound_lower, bound_upper) = envelope(kind, c, cfg)?;
    Ok(FigureRow {
        c,
        k_max,
        bound_lower,
        bound_upper,
        variant: kind,
    })
}

fn sort_rows(rows: &mut [FigureRow]) {
    rows.sort_by(|a, b| {
        a.c.total_cmp(&b.c)
            .then(a.k_max.total_cmp(&b.k_max))
            .then(a.variant.tag().cmp(b.variant.tag()))
    });
}

/// `n` rows per ensemble of the figure, sorted by `(c, k_max)`.
pub fn figure_rows(fig: Figure, n: usize, seed: u64, cfg: &FigureConfig) -> Result<Vec<FigureRow>> {
    let mut rows = Vec::with_capacity(n * fig.kinds().len());
    for &kind in fig.kinds() {
        let samples = sample(&SampleSpec::new(kind, n, seed)?);
        let part: Result<Vec<FigureRow>> = samples.par_iter().map(|s| row_for(kind, s, cfg)).collect();
        rows.extend(part?);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub c: f64,
    pub bound_lower: f64,
    pub bound_upper: f64,
    pub variant: SampleKind,
}

/// Envelopes at `CURVE_POINTS` uniform values of `c`: over `[0, 1]` for the
/// unital figures, `[−1, 1]` for the non-unital one.
pub fn bound_curves(fig: Figure, cfg: &FigureConfig) -> Result<Vec<CurvePoint>> {
    let (lo, hi) = match fig {
        Figure::Nonunital => (-1.0, 1.0),
        _ => (0.0, 1.0),
    };
    let mut out = Vec::new();
    for &kind in fig.kinds() {
        let part: Result<Vec<CurvePoint>> = (0..CURVE_POINTS)
            .into_par_iter()
            .map(|i| {
                let c = lo + (hi - lo) * i as f64 / (CURVE_POINTS - 1) as f64;
                let (bound_lower, bound_upper) = envelope(kind, c, cfg)?;
                Ok(CurvePoint {
                    c,
                    bound_lower,
                    bound_upper,
                    variant: kind,
                })
            })
            .collect();
        out.extend(part?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsetPoint {
    pub c1: f64,
    pub theta_w: f64,
    pub k_max: f64,
    pub k_formula: f64,
}

/// `K_max` against the half-angle `θ_W ∈ [0, π/2]` for the channels with only
/// `c₁` nonzero, numerically and from the closed form.
pub fn inset_sweep(points: usize, cfg: &MaximizeConfig) -> Result<Vec<InsetPoint>> {
    let points = points.max(2);
    let grid: Vec<(f64, f64)> = INSET_C1
        .iter()
        .flat_map(|&c1| (0..points).map(move |i| (c1, std::f64::consts::FRAC_PI_2 * i as f64 / (points - 1) as f64)))
        .collect();
    grid.par_iter()
        .map(|&(c1, theta_w)| {
            let sc = scenarios::single_axis_with_rotation(c1, theta_w)?;
            Ok(InsetPoint {
                c1,
                theta_w,
                k_max: maximize_k(&sc, cfg)?.k_max,
                k_formula: kmax_single_c1_with_theta_w(c1, theta_w)?,
            })
        })
        .collect()
}

/// Decimal notation with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { format!("{x}") };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

fn num(x: f64) -> String {
    format_sig(x, 12)
}

pub fn write_rows<W: Write>(mut out: W, rows: &[FigureRow]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            num(r.c),
            num(r.k_max),
            num(r.bound_lower),
            num(r.bound_upper),
            r.variant.tag()
        )?;
    }
    Ok(())
}

pub fn write_curves<W: Write>(mut out: W, curves: &[CurvePoint]) -> io::Result<()> {
    writeln!(out, "{CURVE_HEADER}")?;
    for p in curves {
        writeln!(
            out,
            "{},{},{},{}",
            num(p.c),
            num(p.bound_lower),
            num(p.bound_upper),
            p.variant.tag()
        )?;
    }
    Ok(())
}

pub fn write_inset<W: Write>(mut out: W, pts: &[InsetPoint]) -> io::Result<()> {
    writeln!(out, "c1,theta_w,k_max,k_formula")?;
    for p in pts {
        writeln!(out, "{},{},{},{}", num(p.c1), num(p.theta_w), num(p.k_max), num(p.k_formula))?;
    }
    Ok(())
}

/// Sidecar metadata recording what produced a CSV.
pub fn metadata(figure: &str, n: usize, seed: u64) -> String {
    format!("artifact={ARTIFACT_ID}\nprng={PRNG_ID}\nfigure={figure}\nn={n}\nseed={seed}\n")
}
