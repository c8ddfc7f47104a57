//! `rbm-green`: command-line access to every stage of the pipeline.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "rbm-green", version, about = "Green's functions of reflected Brownian motion in a quadrant")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON model file (quadrant or wedge form), or `P1` / `P2` for the bundled references.
    #[arg(long, global = true, default_value = "P1")]
    pub model: String,
    #[arg(long, global = true, env = "SEED", default_value_t = 42)]
    pub seed: u64,
    /// Monte Carlo replicas for commands that need the boundary transforms.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub n_paths: usize,
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub dt: f64,
    /// Output CSV path; a `.manifest.json` sidecar is written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Echo the validated model with its wedge form and branch points.
    Validate,
    /// Branch points and the two branches `Y-(x)`, `Y+(x)` on a grid.
    Kernel {
        #[arg(long, default_value_t = 41)]
        points: usize,
    },
    /// Saddle point, curvature and optionally the traced descent path.
    Saddle {
        #[arg(long)]
        alpha: f64,
        /// Write the descent path `t, Re x, Im x` to this CSV.
        #[arg(long)]
        path_out: Option<PathBuf>,
        #[arg(long, default_value_t = 25)]
        samples: usize,
    },
    /// Poles of the continued transforms.
    Poles {
        /// Also estimate residues and pole constants (runs the simulation).
        #[arg(long)]
        with_residues: bool,
    },
    /// Monte Carlo estimates.
    Simulate {
        #[command(subcommand)]
        what: SimulateWhat,
    },
    /// Green's density by contour inversion of the simulated transforms.
    Invert {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        /// Use the steepest-descent contour instead of the vertical line.
        #[arg(long)]
        shifted: bool,
    },
    /// Asymptotic expansions.
    Asym {
        #[command(subcommand)]
        what: AsymWhat,
    },
    /// Asymptotic term, inversion oracle and direct simulation at one point.
    Compare {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
    },
    /// Regime of each limit direction across the wedge.
    Regimes {
        #[arg(long, default_value_t = 181)]
        points: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum SimulateWhat {
    /// Occupation density at points `(a_k, b_k)`.
    Green {
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<f64>,
    },
    /// Local-time density along an axis (`1`: `L1` on the second axis, `2`: `L2` on the first).
    Boundary {
        #[arg(long, default_value_t = 2)]
        axis: usize,
        #[arg(long, default_value_t = 0.25)]
        width: f64,
        #[arg(long, default_value_t = 10.0)]
        u_max: f64,
    },
    /// Transforms `phi(x, y)`, `phi1(y)`, `phi2(x)` at real arguments `< 0`.
    Phi {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        y: Vec<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum AsymWhat {
    /// Leading term at `(r, alpha)`.
    Eval {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        alpha: f64,
    },
    /// Leading terms for a range of directions at fixed `r`.
    Sweep {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha_from: f64,
        #[arg(long, default_value_t = 1.52)]
        alpha_to: f64,
        #[arg(long, default_value_t = 30)]
        points: usize,
    },
    /// Expansion near the edge `alpha = 0` or `alpha = pi/2`.
    Edge {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        alpha: f64,
    },
    /// Pole term damped by the error-function factor near `alpha*`.
    Transition {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        alpha: f64,
    },
    /// Asymptotics at wedge coordinates `(rho, omega)`.
    Cone {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        omega: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rbm-green: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
