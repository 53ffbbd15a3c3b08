//! `nnls`: spectral data, sectors and long-time asymptotics for the nonlocal
//! NLS equation with shifted-step data, plus a PDE oracle.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nnls_core::Error;

use commands::{AsymArgs, DeltaArgs, EvolveArgs, SpectrumArgs, ZerosArgs};
use config::Config;
use output::Format;

#[derive(Parser, Debug)]
#[command(name = "nnls", version, about = "Nonlocal NLS shifted-step toolkit")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Quadrature tolerance for the delta/chi integrals.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized validation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat key=value run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Step {
    /// Step height A > 0.
    #[arg(long = "A")]
    a: Option<f64>,
    /// Step position R > 0.
    #[arg(long = "R")]
    r: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct GridOpts {
    #[arg(long)]
    eps: Option<f64>,
    /// Half-width of the domain.
    #[arg(long = "L")]
    l: Option<f64>,
    /// Number of cells (even).
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// crank_nicolson_fd or rk4_fd.
    #[arg(long)]
    scheme: Option<String>,
    /// Comma-separated snapshot times.
    #[arg(long)]
    snapshots: Option<String>,
    /// step, tanh-step, plane-wave, or a CSV file of x, Re q0, Im q0.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    blowup_cap: Option<f64>,
    #[arg(long)]
    window_speed: Option<f64>,
}

impl From<GridOpts> for EvolveArgs {
    fn from(e: GridOpts) -> Self {
        EvolveArgs {
            eps: e.eps,
            l: e.l,
            n: e.n,
            dt: e.dt,
            t_end: e.t_end,
            scheme: e.scheme,
            snapshots: e.snapshots,
            profile: e.profile,
            blowup_cap: e.blowup_cap,
            window_speed: e.window_speed,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// a1, b, r1, r2 on a real k grid.
    #[command(allow_negative_numbers = true)]
    Spectrum {
        #[command(flatten)]
        step: Step,
        #[arg(long)]
        k_min: Option<f64>,
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// k0, p_j and omega_j for one R or a sweep over R.
    #[command(allow_negative_numbers = true)]
    Zeros {
        #[command(flatten)]
        step: Step,
        #[arg(long)]
        r_min: Option<f64>,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        r_samples: Option<usize>,
    },
    /// The 4n+2 sectors with their plateau constants.
    #[command(allow_negative_numbers = true)]
    Sectors {
        #[command(flatten)]
        step: Step,
    },
    /// delta(k, xi) along a horizontal line in the k-plane.
    #[command(allow_negative_numbers = true)]
    Delta {
        #[command(flatten)]
        step: Step,
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long)]
        k_min: Option<f64>,
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Imaginary part of the k line.
        #[arg(long)]
        im: Option<f64>,
    },
    /// Long-time asymptotics on (xi, t) or (x, t) probes.
    #[command(allow_negative_numbers = true)]
    Asymptote {
        #[command(flatten)]
        step: Step,
        /// Comma-separated xi values.
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        /// Comma-separated x values (alternative to xi).
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Comma-separated times.
        #[arg(long)]
        t: Option<String>,
    },
    /// Integrate the PDE and write snapshots.
    #[command(allow_negative_numbers = true)]
    Evolve {
        #[command(flatten)]
        step: Step,
        #[command(flatten)]
        run: GridOpts,
    },
    /// Integrate the PDE and compare rays with the asymptotics.
    #[command(allow_negative_numbers = true)]
    Compare {
        #[command(flatten)]
        step: Step,
        #[command(flatten)]
        run: GridOpts,
        /// Comma-separated rays.
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
    },
    /// Randomized identity and structure checks.
    #[command(allow_negative_numbers = true)]
    Validate {
        /// Number of random (A, R) pairs.
        #[arg(long)]
        cases: Option<usize>,
    },
}

fn exit_code(e: &Error) -> u8 {
    if e.is_validation() {
        2
    } else if e.is_unsupported_case() {
        3
    } else {
        4
    }
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    let fail = |e: Error| (exit_code(&e), e.to_string());
    let cfg = match &cli.config {
        Some(p) => Config::load(p).map_err(fail)?,
        None => Config::default(),
    };
    let tol = cfg.or(cli.tol, "tol", 1e-10).map_err(fail)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err((2, format!("tol must lie in (0, 1), got {tol}")));
    }
    let seed = cfg.or(cli.seed, "seed", 0u64).map_err(fail)?;
    let outcome = match cli.cmd {
        Cmd::Spectrum { step, k_min, k_max, samples } => commands::params(&cfg, step.a, step.r)
            .and_then(|p| commands::spectrum(&cfg, p, SpectrumArgs { k_min, k_max, samples })),
        Cmd::Zeros { step, r_min, r_max, r_samples } => cfg
            .need(step.a, "A")
            .and_then(|a| commands::zeros(&cfg, a, step.r, ZerosArgs { r_min, r_max, r_samples })),
        Cmd::Sectors { step } => commands::params(&cfg, step.a, step.r).and_then(|p| commands::sectors(p, tol)),
        Cmd::Delta { step, xi, k_min, k_max, samples, im } => commands::params(&cfg, step.a, step.r)
            .and_then(|p| commands::delta(&cfg, p, tol, DeltaArgs { xi, k_min, k_max, samples, im })),
        Cmd::Asymptote { step, xi, x, t } => commands::params(&cfg, step.a, step.r)
            .and_then(|p| commands::asymptote(&cfg, p, tol, AsymArgs { xi, x, t })),
        Cmd::Evolve { step, run } => {
            commands::params(&cfg, step.a, step.r).and_then(|p| commands::evolve(&cfg, p, run.into()))
        }
        Cmd::Compare { step, run, xi } => {
            commands::params(&cfg, step.a, step.r).and_then(|p| commands::compare(&cfg, p, tol, run.into(), xi))
        }
        Cmd::Validate { cases } => commands::validate(&cfg, seed, tol, cases),
    }
    .map_err(fail)?;
    output::emit(&outcome.tables, &cli.out, cli.format).map_err(|e| (4, format!("writing output: {e}")))?;
    match outcome.deferred {
        Some(e) => Err(fail(e)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
