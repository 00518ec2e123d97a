//! Command-line driver: solve and analyze slender-vessel perfusion scenes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use perfusion1d::harness::{run, RunConfig, RunMode, SceneSpec};
use perfusion1d::Error;

#[derive(Parser)]
#[command(
    name = "perfusion1d",
    about = "1D slender-body model of perfusion around a thin vessel in a porous half-space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Scene file (JSON), or the name of a built-in scene
    #[arg(long)]
    scene: Option<String>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated eps values (sweeps) or a single override (solve)
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Comma-separated mesh interval counts (sweep-mesh) or single override
    #[arg(long, value_delimiter = ',')]
    nodes: Vec<usize>,
    /// Theta quadrature order override
    #[arg(long)]
    theta_order: Option<usize>,
    /// Seed for randomized diagnostics
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scene and emit the solution table and report
    Solve(CommonArgs),
    /// Solve across an eps list; emit norm and residual trend tables
    SweepEps(CommonArgs),
    /// Solve across a mesh-size list; emit the refinement table
    SweepMesh(CommonArgs),
    /// Evaluate the exterior pressure on the scene's slice plane
    Slice(CommonArgs),
    /// Compute the coupling residuals on the vessel surface
    Residuals(CommonArgs),
    /// Regenerate the shipped figure data set (8 CSV files + metadata)
    Figures(CommonArgs),
}

fn load_scene(arg: &Option<String>) -> Result<Option<SceneSpec>, Error> {
    match arg {
        None => Ok(None),
        Some(s) => {
            if let Some(spec) = perfusion1d::harness::scenes::by_name(s) {
                return Ok(Some(spec));
            }
            let path = PathBuf::from(s);
            if path.exists() {
                Ok(Some(SceneSpec::load(&path)?))
            } else {
                Err(Error::Config(format!(
                    "scene '{s}' is neither a built-in name nor an existing file"
                )))
            }
        }
    }
}

fn build_config(mode: RunMode, args: &CommonArgs) -> Result<RunConfig, Error> {
    let scene = load_scene(&args.scene)?;
    let single_eps = if args.eps.len() == 1 { Some(args.eps[0]) } else { None };
    let single_nodes = if args.nodes.len() == 1 { Some(args.nodes[0]) } else { None };
    Ok(RunConfig {
        mode,
        scene,
        out_dir: args.out.clone(),
        eps_list: if args.eps.len() > 1 { args.eps.clone() } else { vec![] },
        nodes_list: if args.nodes.len() > 1 { args.nodes.clone() } else { vec![] },
        eps_override: single_eps,
        nodes_override: single_nodes,
        theta_override: args.theta_order,
        seed: args.seed,
    })
}

fn main() -> ExitCode {
    if let Ok(workers) = std::env::var("PERFUSION1D_WORKERS") {
        if let Ok(n) = workers.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    let (mode, args) = match &cli.command {
        Command::Solve(a) => (RunMode::Solve, a),
        Command::SweepEps(a) => (RunMode::SweepEps, a),
        Command::SweepMesh(a) => (RunMode::SweepMesh, a),
        Command::Slice(a) => (RunMode::Slice, a),
        Command::Residuals(a) => (RunMode::Residuals, a),
        Command::Figures(a) => (RunMode::Figures, a),
    };
    let config = match build_config(mode, args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&config) {
        Ok(output) => {
            println!(
                "{} '{}' done in {} ms; outputs in {}",
                output.report.mode,
                output.report.scene_name,
                output.report.timing_ms,
                config.out_dir.display()
            );
            for entry in &output.report.norms {
                println!(
                    "  [{}] p_inf = {:.6e}, H^a = {:.6e}, cond ~ {:.2e}",
                    entry.label, entry.norms.p_inf, entry.norms.h_a, entry.condition_estimate
                );
            }
            for r in &output.report.residuals {
                println!(
                    "  [{}] sup Rbar = {:.4e}, sup R = {:.4e}",
                    r.label, r.sup_rbar, r.sup_r
                );
            }
            for t in &output.report.trends {
                println!("  trend {}: slope {:.3}", t.quantity, t.log_log_slope);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Validation(_) | Error::Config(_) | Error::Geometry(_) => ExitCode::from(2),
                Error::Kernel(_) | Error::Solver(_) | Error::Field(_) => ExitCode::from(3),
                Error::Io(_) => ExitCode::from(2),
            }
        }
    }
}
