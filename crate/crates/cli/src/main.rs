use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, ValueEnum};
use posperturb_cli::registry::{builders, listing_text};
use posperturb_cli::{run, Format, Overrides, RunConfig, RunError, EXIT_USAGE};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Both,
}

/// Checks variation-of-constants inequalities for positive semigroups.
///
/// Exit status: 0 all verdicts pass (marginal ones excluded), 2 some verdict
/// fails, 3 precision or hypothesis error, 64 usage error, 74 I/O error.
#[derive(Debug, Parser)]
#[command(name = "posperturb", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Scenario builder (see --list).
    #[arg(long, value_name = "NAME")]
    scenario: Option<String>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Time grid T * {0.05, 0.25, 0.5, 1}.
    #[arg(long, value_name = "T")]
    tmax: Option<f64>,
    /// Resolvent offsets above omega, L * {0.1, 0.2, 0.5, 1}.
    #[arg(long = "lambda-max", value_name = "L")]
    lambda_max: Option<f64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// List the scenario builders and their parameters.
    #[arg(long)]
    list: bool,
    /// With --list: print JSON.
    #[arg(long, requires = "list")]
    json: bool,
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}\n");
    eprintln!("{}", Args::command().render_usage());
    ExitCode::from(EXIT_USAGE as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    if args.list {
        if args.json {
            println!("{}", serde_json::to_string_pretty(&builders()).unwrap());
        } else {
            print!("{}", listing_text());
        }
        return ExitCode::SUCCESS;
    }
    let overrides = Overrides {
        scenario: args.scenario,
        seed: args.seed,
        tol: args.tol,
        tmax: args.tmax,
        lambda_max: args.lambda_max,
        out: args.out,
        formats: args.format.map(|f| match f {
            FormatArg::Json => vec![Format::Json],
            FormatArg::Csv => vec![Format::Csv],
            FormatArg::Both => vec![Format::Json, Format::Csv],
        }),
    };
    let result = args
        .config
        .as_deref()
        .map(RunConfig::from_path)
        .transpose()
        .and_then(|base| overrides.resolve(base))
        .and_then(|cfg| run(&cfg));
    match result {
        Ok(outcome) => {
            let r = &outcome.report;
            println!("{}", r.scenario.label);
            for s in &r.statements {
                let verdict = format!("{:?}", s.verdict).to_lowercase();
                println!(
                    "  {:<16} {:<8} min slack {:.6e}",
                    s.statement.to_string(),
                    verdict,
                    s.min_slack
                );
            }
            if let Some(v) = &r.voc {
                println!(
                    "  {:<16} {:<8} residual {:.6e}",
                    "voc",
                    if v.passed { "pass" } else { "fail" },
                    v.max_residual
                );
            }
            for inv in &r.invariance {
                println!(
                    "  invariance {:?}     {}",
                    inv.cone,
                    if inv.passed { "pass" } else { "fail" }
                );
            }
            for e in &r.errors {
                eprintln!("error: {e}");
            }
            for p in &outcome.written {
                println!("wrote {}", p.display());
            }
            println!("status: {}", r.status);
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e @ RunError::Usage(_)) => usage_error(&e.to_string()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
