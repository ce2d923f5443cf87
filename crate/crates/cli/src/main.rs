use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use lgmax_core::figures::{self, Figure, FigureConfig, ARTIFACT_ID, ENVELOPE_TOL};
use lgmax_core::optimizer::{critical_points, maximize_k, MaximizeConfig, ANGLE_NAMES};
use lgmax_core::engine::LgKernel;
use lgmax_core::sampler::PRNG_ID;
use lgmax_core::scenario_file::parse_scenario;
use lgmax_core::verify::{verify, Profile};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Leggett-Garg K maximization for a qubit under decoherence.
#[derive(Parser)]
#[command(name = "lgmax", disable_version_flag = true)]
struct Cli {
    /// Print artifact and PRNG identifiers.
    #[arg(short = 'V', long)]
    version: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Two unital channels, W = 1.
    Fig1(FigArgs),
    /// Two unital channels with a random W.
    Fig2(FigArgs),
    /// Two non-unital channels, with and without W.
    Fig3(FigArgs),
    /// K_max against theta_W for a single nonzero c1.
    Fig2Inset {
        /// Points per curve over [0, pi/2].
        #[arg(long, default_value_t = 46)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the acceptance checks.
    Verify {
        /// Smaller samples, no runtime budgets.
        #[arg(long)]
        fast: bool,
    },
    /// Maximize K for the scenario described in a key=value file.
    Scenario {
        file: PathBuf,
        /// Also list stationary points (maxima and saddles).
        #[arg(long)]
        critical: bool,
    },
}

#[derive(Args)]
struct FigArgs {
    /// Channels per ensemble; defaults to 2000 (fig1, fig2) or 5000 (fig3).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write envelope curves at 512 values of c.
    #[arg(long)]
    curves: bool,
}

/// Failure with a chosen exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            code: EXIT_USAGE,
            error: e.into(),
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("LGMAX_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("LGMAX_THREADS must be a non-negative integer, got `{raw}`"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn sibling(out: &Path, extension: &str) -> PathBuf {
    out.with_extension(extension)
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).with_context(|| format!("cannot write {}", path.display()))
}

fn run_figure(fig: Figure, args: &FigArgs) -> Result<(), Failure> {
    let n = args.n.unwrap_or(match fig {
        Figure::Nonunital => 5000,
        _ => 2000,
    });
    if n == 0 {
        bail_usage("--n must be at least 1")?;
    }
    let cfg = FigureConfig::default();
    let rows = figures::figure_rows(fig, n, args.seed, &cfg)?;
    write_file(&args.out, |w| figures::write_rows(w, &rows))?;
    fs::write(sibling(&args.out, "meta"), figures::metadata(fig.name(), n, args.seed))
        .with_context(|| format!("cannot write metadata next to {}", args.out.display()))?;
    if args.curves {
        let curves = figures::bound_curves(fig, &cfg)?;
        write_file(&sibling(&args.out, "curves.csv"), |w| figures::write_curves(w, &curves))?;
    }
    let outside = rows.iter().filter(|r| !r.within_envelope(ENVELOPE_TOL)).count();
    eprintln!("{}: {} rows written to {}, {outside} outside the envelope", fig.name(), rows.len(), args.out.display());
    Ok(())
}

fn bail_usage(msg: &str) -> Result<(), Failure> {
    Err(Failure {
        code: EXIT_USAGE,
        error: anyhow::anyhow!(msg.to_string()),
    })
}

fn fmt_angles(a: &[f64; 6]) -> String {
    ANGLE_NAMES
        .iter()
        .zip(a)
        .map(|(n, v)| format!("{n}={v:.9}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn run_scenario(path: &Path, critical: bool) -> Result<(), Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let spec = parse_scenario(&text).with_context(|| format!("{}", path.display()))?;
    let r = maximize_k(&spec.scenario, &spec.config)?;
    println!("k_max = {:.12}", r.k_max);
    println!("argmax: {}", fmt_angles(&r.argmax));
    println!("converged = {}", r.converged);
    println!("local maxima: {}", r.n_distinct_local_maxima);
    for m in &r.local_maxima {
        println!("  {:.12}  {}", m.k, fmt_angles(&m.angles));
    }
    if critical {
        let pts = critical_points(&LgKernel::new(&spec.scenario), &spec.config)?;
        println!("stationary points: {}", pts.len());
        for p in &pts {
            println!("  {:.12}  {:?}  {}", p.k, p.kind, fmt_angles(&p.angles));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.version {
        println!("{ARTIFACT_ID}");
        println!("prng {PRNG_ID}");
        return Ok(());
    }
    let Some(command) = cli.command else {
        return bail_usage("no command given; see --help");
    };
    configure_threads()?;
    match command {
        Command::Fig1(a) => run_figure(Figure::UnitalNoW, &a),
        Command::Fig2(a) => run_figure(Figure::UnitalWithW, &a),
        Command::Fig3(a) => run_figure(Figure::Nonunital, &a),
        Command::Fig2Inset { points, out } => {
            let pts = figures::inset_sweep(points, &MaximizeConfig::default())?;
            write_file(&out, |w| figures::write_inset(w, &pts))?;
            let worst = pts.iter().map(|p| (p.k_max - p.k_formula).abs()).fold(0.0, f64::max);
            eprintln!("fig2-inset: {} points, max |numeric - formula| = {worst:.3e}", pts.len());
            Ok(())
        }
        Command::Verify { fast } => {
            let report = verify(if fast { Profile::Fast } else { Profile::Full });
            print!("{}", report.render());
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_VERIFY_FAILED,
                    error: anyhow::anyhow!("verification failed"),
                })
            }
        }
        Command::Scenario { file, critical } => run_scenario(&file, critical),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
