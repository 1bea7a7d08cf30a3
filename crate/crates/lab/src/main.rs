use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ckn_lab::builtins::BUILTINS;
use ckn_lab::config::{load_config, plan};
use ckn_lab::{emit_reports, output_dir, run_plan, LabError, Plan};

#[derive(Parser)]
#[command(name = "ckn-lab", version, about = "Numerical checks of weighted CKN inequalities on radial spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites of a config and write reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config and the environment.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for random test functions; overrides the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Check tolerance; overrides `tolerances.check`.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Print the builtin space names.
    ListBuiltins,
    /// Parse and validate a config without running it.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn load(path: &Path, seed: Option<u64>, tol: Option<f64>) -> Result<Plan, LabError> {
    let mut cfg = load_config(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = tol {
        cfg.tolerances.check = t;
    }
    plan(&cfg, path.parent().unwrap_or(Path::new(".")))
}

fn run(cmd: Command) -> Result<i32, LabError> {
    match cmd {
        Command::ListBuiltins => {
            for (name, about) in BUILTINS {
                println!("{name:<22}{about}");
            }
            Ok(0)
        }
        Command::ValidateConfig { config, seed, tol } => {
            let p = load(&config, seed, tol)?;
            let names: Vec<&str> = p.spaces.iter().map(|s| s.name.as_str()).collect();
            let suites: Vec<&str> = p.suites.iter().map(|s| s.as_str()).collect();
            println!("ok: spaces [{}], suites [{}], seed {}", names.join(", "), suites.join(", "), p.seed);
            Ok(0)
        }
        Command::Run { config, out, seed, tol } => {
            let p = load(&config, seed, tol)?;
            let base = config.parent().unwrap_or(Path::new("."));
            let dir = output_dir(out.as_deref(), p.out.as_deref(), base);
            let results = run_plan(&p)?;
            for s in &results.suites {
                for v in s.verdicts() {
                    let tag = if v.ok { "ok  " } else { "FAIL" };
                    let got = if v.pass { "pass" } else { "fail" };
                    println!("{tag} {:<14} {:<24} {:<28} {got} (expected {:?}, margin {:e})", v.suite.as_str(), v.space, v.check, v.expected, v.margin);
                }
            }
            emit_reports(&results, &dir)?;
            println!("reports written to {}", dir.display());
            Ok(results.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("ckn-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
