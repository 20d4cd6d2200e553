use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};
use sublinear::generate::{generate_random_scenario, GenSize};
use sublinear::report::{select_checks, Group, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION};
use sublinear::scalar::parse_rational;
use sublinear::{parse_scenario, run_report, Rational, RunOptions, Scenario};

#[derive(Parser)]
#[command(name = "sublin", version, about = "Audit sublinear expectations on finite credal models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario document (JSON).
    #[arg(long, value_name = "FILE")]
    scenario: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Directory for distribution-pair CSV files.
    #[arg(long, value_name = "DIR")]
    csv: Option<PathBuf>,
    /// Seed recorded in the report; the first seed for `fuzz`.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Expectations, capacities, distribution pairs and inequalities.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Convergence modes and the implication diagram.
    Converge {
        #[command(flatten)]
        common: Common,
    },
    /// Portmanteau equivalences and distribution-function criteria.
    Portmanteau {
        #[command(flatten)]
        common: Common,
    },
    /// Dominated convergence certificates.
    CertifyDct {
        #[command(flatten)]
        common: Common,
        /// Tolerance, repeatable; defaults to 1/10 and 1/1000.
        #[arg(long, value_name = "EPS")]
        epsilon: Vec<String>,
    },
    /// Run the full audit on generated scenarios.
    Fuzz {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "N")]
        seeds: u64,
    },
}

#[derive(Debug)]
struct InputError(String);

fn load(common: &Common) -> Result<Scenario, InputError> {
    let path = common
        .scenario
        .as_ref()
        .ok_or_else(|| InputError("--scenario FILE is required".into()))?;
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, document: &Value) -> Result<(), InputError> {
    let text = serde_json::to_string_pretty(document).expect("serializable report") + "\n";
    match out {
        Some(path) => fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_csv(dir: &Path, files: &[(String, String)]) -> Result<(), InputError> {
    fs::create_dir_all(dir).map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
    for (name, content) in files {
        let path = dir.join(name);
        fs::write(&path, content).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn run_group(common: &Common, group: Group, epsilons: &[Rational], inject_fault: bool) -> Result<i32, InputError> {
    let mut scenario = load(common)?;
    scenario.checks = select_checks(&scenario, group, epsilons);
    let opts = RunOptions {
        seed: common.seed,
        only: None,
        inject_fault,
    };
    let report = run_report(&scenario, &opts);
    emit(common.out.as_deref(), &report.document)?;
    if let Some(dir) = &common.csv {
        write_csv(dir, &report.csv)?;
    }
    Ok(report.exit_code)
}

fn fuzz(common: &Common, seeds: u64) -> Result<i32, InputError> {
    let start = common.seed.unwrap_or(0);
    let end = start
        .checked_add(seeds)
        .ok_or_else(|| InputError("seed range overflows".into()))?;
    let mut runs: Vec<(u64, Value, i32)> = (start..end)
        .into_par_iter()
        .map(|seed| match generate_random_scenario(seed, GenSize::default()) {
            Ok(s) => {
                let r = run_report(&s, &RunOptions { seed: Some(seed), ..Default::default() });
                let errors: Vec<String> = r.document["checks"]
                    .as_array()
                    .into_iter()
                    .flatten()
                    .filter(|c| c["status"] == "error")
                    .map(|c| format!("{}: {}", c["check"].as_str().unwrap_or("?"), c["error"].as_str().unwrap_or("?")))
                    .collect();
                let entry = json!({
                    "seed": seed,
                    "exit_code": r.exit_code,
                    "violations": r.document["violations"],
                    "errors": errors,
                });
                (seed, entry, r.exit_code)
            }
            Err(e) => (seed, json!({"seed": seed, "exit_code": EXIT_INPUT, "error": e.to_string()}), EXIT_INPUT),
        })
        .collect();
    runs.sort_by_key(|(seed, _, _)| *seed);
    let violating = runs.iter().filter(|r| r.2 == EXIT_VIOLATION).count();
    let erroring = runs.iter().filter(|r| r.2 == EXIT_INPUT).count();
    let exit_code = if violating > 0 {
        EXIT_VIOLATION
    } else if erroring > 0 {
        EXIT_INPUT
    } else {
        EXIT_OK
    };
    let document = json!({
        "tool": "sublinear",
        "version": env!("CARGO_PKG_VERSION"),
        "first_seed": start,
        "seeds": seeds,
        "violating_seeds": violating,
        "erroring_seeds": erroring,
        "runs": runs.into_iter().map(|r| r.1).collect::<Vec<_>>(),
        "exit_code": exit_code,
    });
    emit(common.out.as_deref(), &document)?;
    Ok(exit_code)
}

fn main() -> ExitCode {
    // Usage errors exit 1, not clap's 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { EXIT_OK as u8 });
        }
    };
    let result = match &cli.command {
        Command::Eval { common, inject_fault } => run_group(common, Group::Eval, &[], *inject_fault),
        Command::Converge { common } => run_group(common, Group::Converge, &[], false),
        Command::Portmanteau { common } => run_group(common, Group::Portmanteau, &[], false),
        Command::CertifyDct { common, epsilon } => epsilon
            .iter()
            .map(|e| parse_rational(e).map_err(|err| InputError(format!("--epsilon {e}: {err}"))))
            .collect::<Result<Vec<_>, _>>()
            .and_then(|eps| run_group(common, Group::Dct, &eps, false)),
        Command::Fuzz { common, seeds } => fuzz(common, *seeds),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(InputError(msg)) => {
            eprintln!("sublin: {msg}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
