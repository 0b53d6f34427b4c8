use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gmem::output::{emit, Format, Report};
use gmem::sweep::{detect_transition, evaluate_point, run_sweep, GAIN_EPS};
use gmem::SweepSpec;
use gmem_core::unravel::{phase_symmetry, unravel};

const CONFIG_ERROR: u8 = 1;
const NUMERIC_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(name = "gmem", version, about = "Gaussian memory-channel capacity sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a config and the CP condition of its model.
    Validate(Common),
    /// Print the one-mode blocks of the model and the unraveling residual.
    Unravel(Common),
    /// Optimal and coherent-input Holevo quantities at the base parameters.
    Capacity(Output),
    /// Evaluate every value of `sweep_param` and report the transition.
    Sweep(Output),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn load(path: &std::path::Path) -> Result<SweepSpec, ExitCode> {
    SweepSpec::load(path).map_err(|e| fail(CONFIG_ERROR, e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn run(command: Command) -> Result<(), ExitCode> {
    match command {
        Command::Validate(args) => {
            let spec = load(&args.config)?;
            let cfg = spec.model_config().map_err(|e| fail(CONFIG_ERROR, e))?;
            let ch = cfg.build().map_err(|e| fail(CONFIG_ERROR, e))?;
            let v = ch.validate();
            if spec.sweep_param.is_some() {
                spec.validate_sweep().map_err(|e| fail(CONFIG_ERROR, e))?;
            }
            println!("{} n={} valid={} min_eig={:e}", cfg.family, cfg.n, v.valid, v.min_eig);
            for d in cfg.defaults_used() {
                println!("default: {d}");
            }
            if !v.valid {
                return Err(fail(CONFIG_ERROR, "model violates the CP condition"));
            }
        }
        Command::Unravel(args) => {
            let spec = load(&args.config)?;
            let cfg = spec.model_config().map_err(|e| fail(CONFIG_ERROR, e))?;
            let ch = cfg.build().map_err(|e| fail(CONFIG_ERROR, e))?;
            let ur = unravel(&ch).map_err(|e| fail(NUMERIC_FAILURE, e))?;
            let sym = phase_symmetry(&ch).map_err(|e| fail(NUMERIC_FAILURE, e))?;
            println!("residual {:e}", ur.residual);
            println!("phase_symmetric {}", sym.channel_symmetric);
            for (k, b) in ur.blocks.iter().enumerate() {
                println!(
                    "block {k}: X = [[{:.9}, {:.9}], [{:.9}, {:.9}]]  Y = [[{:.9}, {:.9}], [{:.9}, {:.9}]]  scalar={}",
                    b.x[(0, 0)], b.x[(0, 1)], b.x[(1, 0)], b.x[(1, 1)],
                    b.y[(0, 0)], b.y[(0, 1)], b.y[(1, 0)], b.y[(1, 1)],
                    sym.blocks_symmetric.get(k).copied().unwrap_or(false),
                );
            }
        }
        Command::Capacity(args) => {
            let spec = load(&args.config)?;
            let cfg = spec.model_config().map_err(|e| fail(CONFIG_ERROR, e))?;
            let param = spec.sweep_param.as_deref().and_then(|p| cfg.params.get(p)).unwrap_or(0.0);
            let row = evaluate_point(&cfg, spec.photons, param, spec.seed);
            let failed = row.error.clone();
            let report = Report { defaults_used: cfg.defaults_used(), spec, rows: vec![row] };
            emit(&report, args.format, args.out.as_deref()).map_err(|e| fail(NUMERIC_FAILURE, e))?;
            if let Some(e) = failed {
                return Err(fail(NUMERIC_FAILURE, e));
            }
        }
        Command::Sweep(args) => {
            let spec = load(&args.config)?;
            let rows = run_sweep(&spec).map_err(|e| fail(CONFIG_ERROR, e))?;
            let cfg = spec.model_config().map_err(|e| fail(CONFIG_ERROR, e))?;
            let t = detect_transition(&rows, GAIN_EPS);
            let failures: Vec<_> = rows.iter().filter_map(|r| r.error.as_ref().map(|e| (r.param, e.clone()))).collect();
            let report = Report { defaults_used: cfg.defaults_used(), spec, rows };
            emit(&report, args.format, args.out.as_deref()).map_err(|e| fail(NUMERIC_FAILURE, e))?;
            let summary = match t.threshold {
                Some(v) if t.zero_threshold => format!("transition: threshold {v} (zero-threshold: first nonzero grid point)"),
                Some(v) => format!("transition: threshold {v}"),
                None => "transition: none (gain <= 1e-6 everywhere)".to_string(),
            };
            // keep stdout machine-readable when the data goes there
            if args.out.is_some() {
                println!("{summary}");
            } else {
                eprintln!("{summary}");
            }
            for (p, e) in &failures {
                eprintln!("point {p} failed: {e}");
            }
            if !failures.is_empty() {
                return Err(ExitCode::from(NUMERIC_FAILURE));
            }
        }
    }
    Ok(())
}
