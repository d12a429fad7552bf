//! `curvlab`: runs the verification suites and writes their reports.
//!
//! Exit status: 0 pass, 1 verification failure, 2 usage error. Standard
//! output carries only the written report paths.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use curvlab::diameter::GraphResolution;
use curvlab::inequalities::DEFAULT_STARTS;
use curvlab::report::Format;

use commands::CliError;
use config::Overrides;

#[derive(Parser)]
#[command(
    name = "curvlab",
    version,
    about = "Curvature and inequality verification suites"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed; overrides CURVLAB_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Radial half-width R of the grid [-R, R].
    #[arg(long, global = true)]
    r_max: Option<f64>,
    /// Uniform radial grid points.
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    /// Frame evaluations per grid point.
    #[arg(long, global = true)]
    frame_budget: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// json or csv.
    #[arg(long, global = true)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the warped torus examples of uniformly positive C_m.
    VerifyExamples {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Fixed fiber scale; searched over 2^-t when absent.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Exact sweeps of the dimension conditions and constants.
    ScanAlgebra,
    /// Minimize the two matrix functionals.
    MatrixInequalities {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Random starts per minimization.
        #[arg(long, default_value_t = DEFAULT_STARTS)]
        starts: usize,
    },
    /// Diameter bounds, the C_0 identity and the product model.
    Diameter {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// u_max / u_min for the eigenfunction-ratio bound.
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long, default_value_t = GraphResolution::default().r_points)]
        graph_r_points: usize,
        #[arg(long, default_value_t = GraphResolution::default().theta_points)]
        graph_theta_points: usize,
        #[arg(long, default_value_t = GraphResolution::default().stencil)]
        graph_stencil: usize,
    },
    /// Curvature tables of a warped torus metric on the radial grid.
    CurvatureReport {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let c = &cli.common;
    let flags = Overrides {
        seed: c.seed,
        r_max: c.r_max,
        grid_points: c.grid_points,
        frame_budget: c.frame_budget,
        output_dir: c.out.clone(),
        format: c.format,
    };
    let env_seed = config::env_seed().map_err(|e| CliError::Usage(format!("{e:#}")))?;
    let cfg = config::resolve(c.config.as_deref(), env_seed, &flags)
        .map_err(|e| CliError::Usage(format!("{e:#}")))?;

    let start = Instant::now();
    let mut run = match cli.command {
        Command::VerifyExamples {
            n,
            m,
            lambda,
            epsilon,
        } => commands::verify_examples(&cfg, n, m, lambda, epsilon),
        Command::ScanAlgebra => commands::scan_algebra(&cfg),
        Command::MatrixInequalities { n, m, starts } => {
            commands::matrix_inequalities(&cfg, n, m, starts)
        }
        Command::Diameter {
            n,
            m,
            lambda,
            ratio,
            graph_r_points,
            graph_theta_points,
            graph_stencil,
        } => commands::diameter(
            &cfg,
            n,
            m,
            lambda,
            ratio,
            GraphResolution {
                r_points: graph_r_points,
                theta_points: graph_theta_points,
                stencil: graph_stencil,
            },
        ),
        Command::CurvatureReport {
            n,
            m,
            lambda,
            epsilon,
        } => commands::curvature_report(&cfg, n, m, lambda, epsilon),
    }?;
    run.report.timing = start.elapsed().as_secs_f64();

    for path in output::emit(&run.report, &run.stem, run.tables, &cfg)? {
        println!("{}", path.display());
    }
    eprintln!(
        "{}: {} in {:.2} s",
        run.report.suite,
        if run.report.pass { "pass" } else { "FAIL" },
        run.report.timing
    );
    Ok(run.report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
