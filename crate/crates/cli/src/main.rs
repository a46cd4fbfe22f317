use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use chyp_cli::config::{SpecEntry, Specs};
use chyp_cli::{run_classify, run_sweep, run_verify, CliError, CliResult, Report, RunConfig};
use chyp_core::{SpecialKind, Variant};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Verify and classify homogeneous descriptions of complex hyperbolic space.
///
/// Exit status: 0 when every check passes, 1 on a verification failure,
/// 2 on a usage or configuration error. The worker thread count can be set
/// with CHYP_THREADS.
#[derive(Parser)]
#[command(name = "chyp", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every verification suite on the configured specs.
    Verify {
        /// Complex dimension.
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate and verify every admissible spec for n.
    Sweep {
        #[arg(long)]
        n: Option<usize>,
        /// Restrict to one variant.
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        /// Largest n a sweep accepts.
        #[arg(long)]
        cap: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Classify a special family (or the configured specs).
    Classify {
        /// One or more dimensions, comma separated.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Metric scale.
    #[arg(long)]
    mu: Option<f64>,
    /// JSON run configuration.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Threshold override, e.g. --tol oracle=1e-12 (rank, oracle, component, strict).
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report destination (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall time in the report summary.
    #[arg(long)]
    timing: bool,
    /// Include the structure tensor of each record.
    #[arg(long)]
    export_tensor: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    N2Kernel,
    N2Image,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    K24,
    K234Lambda,
    K234Beta,
    Symmetric,
}

fn config(n: Option<usize>, common: &Common) -> CliResult<RunConfig> {
    let mut cfg = match (&common.spec, n) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(n)) => RunConfig::new(n),
        (None, None) => return Err(CliError::Usage("give --n or --spec".into())),
    };
    if let Some(n) = n {
        cfg.n = n;
    }
    if let Some(mu) = common.mu {
        cfg.mu = mu;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_path = Some(out.clone());
    }
    cfg.export_tensor |= common.export_tensor;
    for t in &common.tol {
        cfg.set_tolerance(t)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn special_entry(kind: KindArg, lambda: Option<f64>, beta: Option<f64>) -> CliResult<SpecEntry> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::Usage(format!("--kind needs --{name}")));
    Ok(match kind {
        KindArg::K24 => SpecEntry::special(SpecialKind::K24),
        KindArg::K234Lambda => SpecEntry::special(SpecialKind::K234Lambda { lambda: need(lambda, "lambda")? }),
        KindArg::K234Beta => SpecEntry::special(SpecialKind::K234Beta { beta: need(beta, "beta")? }),
        KindArg::Symmetric => SpecEntry::symmetric(),
    })
}

fn execute(cli: Cli) -> CliResult<(Report, bool, Option<PathBuf>)> {
    let start = Instant::now();
    let (report, timing, out) = match cli.command {
        Cmd::Verify { n, common } => {
            let cfg = config(n, &common)?;
            (run_verify(&cfg)?, common.timing, cfg.output_path)
        }
        Cmd::Sweep { n, variant, cap, common } => {
            let mut cfg = config(n, &common)?;
            if let Some(cap) = cap {
                cfg.sweep_cap = cap;
            }
            let variant = variant.map(|v| match v {
                VariantArg::N2Kernel => Variant::N2Kernel,
                VariantArg::N2Image => Variant::N2Image,
            });
            (run_sweep(&cfg, variant)?, common.timing, cfg.output_path)
        }
        Cmd::Classify { n, kind, lambda, beta, common } => {
            let mut cfg = config(n.first().copied(), &common)?;
            if let Some(kind) = kind {
                let entry = special_entry(kind, lambda, beta)?;
                let ns = if n.is_empty() { vec![cfg.n] } else { n };
                cfg.specs = Specs::List(ns.into_iter().map(|n| entry.clone().with_n(n)).collect());
            } else if lambda.is_some() || beta.is_some() {
                return Err(CliError::Usage("--lambda and --beta need --kind".into()));
            } else if n.len() > 1 {
                return Err(CliError::Usage("several --n values need --kind".into()));
            }
            let report = run_classify(&cfg)?;
            for rec in &report.records {
                if let Some(c) = &rec.classification {
                    eprintln!("{}", c.verdict);
                }
            }
            (report, common.timing, cfg.output_path)
        }
    };
    let report = if timing { report.with_wall_time(start.elapsed().as_secs_f64()) } else { report };
    Ok((report, timing, out))
}

fn emit(report: &Report, out: Option<&PathBuf>) -> CliResult<()> {
    let json = report.to_json();
    match out {
        Some(path) => std::fs::write(path, json)
            .map_err(|source| CliError::Write { path: path.display().to_string(), source }),
        None => std::io::stdout()
            .write_all(json.as_bytes())
            .map_err(|source| CliError::Write { path: "stdout".into(), source }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(cli).and_then(|(report, _, out)| {
        emit(&report, out.as_ref())?;
        let s = &report.summary;
        eprintln!(
            "{} records: {} passed, {} failed{}",
            s.records,
            s.passed,
            s.failed,
            if report.passed() { "" } else { " (verification FAILED)" }
        );
        Ok(report.exit_code())
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("chyp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
