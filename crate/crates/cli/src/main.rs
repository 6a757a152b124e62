use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use polariton_cli::config::{emit_config, parse_config, OutputFormat, Scenario};
use polariton_cli::output::to_json;
use polariton_cli::{execute, execute_sweep, resolve_out_dir, RunError, RunReport, RunRequest, Sweep, EXIT_IO, OUT_DIR_ENV};

/// Runs polariton Bloch-oscillation scenarios from a TOML configuration.
#[derive(Debug, Parser)]
#[command(name = "polariton-bloch", version)]
struct Args {
    /// Scenario configuration (TOML). Omitted keys take preset values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// band-structure | bloch-oscillation | free-component | wannier-stark | figure3 | validity-check
    #[arg(long)]
    scenario: Option<Scenario>,
    /// Output directory; overrides [output].directory and the environment.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// csv | json | both
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Reserved; every scenario is deterministic. Recorded in the summary.
    #[arg(long)]
    seed: Option<u64>,
    /// Sweep one key: key=start:stop:steps, e.g. lattice.v0_khz=60:100:5
    #[arg(long)]
    sweep: Option<String>,
    /// Print the normalised configuration and exit.
    #[arg(long)]
    print_config: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let code = match run(Args::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn run(args: Args) -> Result<i32, RunError> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| {
            RunError::Output(polariton_cli::output::OutputError { path: path.clone(), source: e })
        })?,
        None => String::new(),
    };
    let config = parse_config(&text)?;
    if args.print_config {
        print!("{}", emit_config(&config));
        return Ok(0);
    }
    let scenario = args
        .scenario
        .or(config.scenario)
        .ok_or_else(|| RunError::Usage("no scenario given (use --scenario or the `scenario` key)".into()))?;
    let format = args.format.unwrap_or(config.output.format);
    let out_dir = resolve_out_dir(args.out_dir.as_deref(), &config, std::env::var(OUT_DIR_ENV).ok());

    let Some(sweep) = &args.sweep else {
        let report = execute(&RunRequest { config, scenario, out_dir, format, seed: args.seed })?;
        print_report(&report);
        return Ok(report.exit_code());
    };
    let sweep = Sweep::parse(sweep)?;
    let mut worst = 0;
    for (value, result) in execute_sweep(&text, &sweep, scenario, &out_dir, format, args.seed) {
        println!("== {} = {value}", sweep.key);
        let code = match result {
            Ok(report) => {
                print_report(&report);
                report.exit_code()
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        };
        worst = worst.max(code).min(EXIT_IO);
    }
    Ok(worst)
}

fn print_report(report: &RunReport) {
    let s = &report.summary;
    for check in &s.checks {
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {}: {:.6e} (limit {:.6e}) {}", check.name, check.measured, check.tolerance, check.detail);
    }
    println!("outputs in {}", report.out_dir.display());
    let failures = s.failures();
    if !failures.is_empty() {
        eprintln!("{}", to_json(&serde_json::json!({ "failures": failures })).trim_end());
    }
}
