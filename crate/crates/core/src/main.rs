use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qsv_core::harness::{run_suite, Precision, QSpec, SuiteConfig, SUITES};
use qsv_core::QsvError;

/// Seeded numerical verification of q-series identities.
#[derive(Parser, Debug)]
#[command(name = "qsv", version)]
struct Args {
    /// Suite to run (see --list-suites).
    #[arg(long)]
    suite: Option<String>,
    /// |q| and optionally arg q, each a number or a `lo..hi` range.
    #[arg(long, value_name = "MODULUS[,PHASE]")]
    q: Option<QSpec>,
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    precision: Option<Precision>,
    /// Verification tolerance (relative residual).
    #[arg(long)]
    tol: Option<f64>,
    /// Write JSON-lines reports here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML suite configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    list_suites: bool,
}

fn build_config(args: &Args) -> Result<SuiteConfig, QsvError> {
    let mut c = match (&args.config, &args.suite) {
        (Some(path), _) => SuiteConfig::load(path)?,
        (None, Some(s)) => SuiteConfig::new(s),
        (None, None) => return Err(QsvError::Config("either --suite or --config is required".into())),
    };
    if let Some(s) = &args.suite {
        c.suite = s.clone();
    }
    if args.q.is_some() {
        c.q = args.q;
    }
    if let Some(d) = args.draws {
        c.draws = d;
    }
    if let Some(s) = args.seed {
        c.seed = s;
    }
    if let Some(p) = args.precision {
        c.precision = p;
    }
    if args.tol.is_some() {
        c.tol = args.tol;
    }
    if args.out.is_some() {
        c.out = args.out.clone();
    }
    c.validate()?;
    Ok(c)
}

fn run(args: &Args) -> Result<i32, QsvError> {
    if args.list_suites {
        let mut out = std::io::stdout().lock();
        for s in SUITES {
            writeln!(out, "{:<24} {}", s.id, s.summary)?;
        }
        return Ok(0);
    }
    let config = build_config(args)?;
    let outcome = run_suite(&config)?;
    if config.out.is_none() {
        outcome.write_jsonl(std::io::stdout().lock())?;
    }
    let s = &outcome.summary;
    eprintln!(
        "{}: {} pass, {} fail, {} rejected, {} nonconvergent, max residual {:.3e}",
        s.suite, s.pass, s.fail, s.rejected, s.nonconvergent, s.max_rel_residual
    );
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qsv: {e}");
            ExitCode::from(2)
        }
    }
}
