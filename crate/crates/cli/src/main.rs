use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ivdiag::harness::{
    batch_summarize, emit::write_text, emit_outputs, monte_carlo, plot, run_study, DiagnosticsReport,
    EmitPaths, SimSpec, StudyConfig,
};
use ivdiag::Error;

#[derive(Parser, Debug)]
#[command(name = "ivdiag", version, about = "Instrumental-variables diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Log progress and listwise deletions.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Args, Debug, Clone, Default)]
struct Overrides {
    /// Random seed for bootstraps and simulations.
    #[arg(long)]
    seed: Option<u64>,
    /// Bootstrap replications (run, batch) or Monte Carlo replications (simulate).
    #[arg(long)]
    reps: Option<usize>,
    /// Significance level.
    #[arg(long)]
    alpha: Option<f64>,
    /// Format written to stdout or to --out.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, Default, PartialEq, Eq)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one study and write its report, plot and plotted numbers.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Write <name>.json, <name>.svg and <name>.csv here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run every study config in a directory and summarize across studies.
    Batch {
        #[arg(long)]
        dir: PathBuf,
        /// Summary destination (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write each study's report, plot and plotted numbers here.
        #[arg(long)]
        reports_dir: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Monte Carlo study of the estimators and tests.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        /// Summary destination (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Redraw the coefficient plot from a saved JSON report.
    Plot {
        #[arg(long)]
        report: PathBuf,
        /// Default: the report path with an .svg extension.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Default: the report path with a .csv extension.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Failure with its exit code: 1 config, 2 data, 3 numerical.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

fn apply_study(cfg: &mut StudyConfig, o: &Overrides) {
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(r) = o.reps {
        cfg.boot_reps = r;
    }
    if let Some(a) = o.alpha {
        cfg.alpha = a;
    }
}

fn emit_or_print(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => Ok(write_text(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// The first failed section's code, after everything has been written.
fn partial_failure(report: &DiagnosticsReport) -> Result<(), Failure> {
    match report.failures().first() {
        None => Ok(()),
        Some((section, e)) => Err(Failure {
            code: e.exit_code as u8,
            message: format!("{}: section '{section}' failed: {}", report.study, e.message),
        }),
    }
}

fn run(config: &Path, out_dir: Option<&Path>, o: &Overrides) -> Result<(), Failure> {
    let mut cfg = StudyConfig::from_path(config)?;
    apply_study(&mut cfg, o);
    cfg.validate()?;
    let report = run_study(&cfg)?;
    let configured = EmitPaths {
        json: cfg.output.json.as_deref().map(|p| cfg.resolve(p)),
        svg: cfg.output.svg.as_deref().map(|p| cfg.resolve(p)),
        csv: cfg.output.csv.as_deref().map(|p| cfg.resolve(p)),
    };
    let paths = match out_dir {
        Some(dir) => EmitPaths::in_dir(dir, &cfg.display_name()),
        None => configured,
    };
    let written = emit_outputs(&report, &paths)?;
    if written.is_empty() {
        let text = match o.format {
            Format::Json => report.to_json(),
            Format::Csv => plot::plot_csv(&plot::plot_rows(&report)),
        };
        print!("{text}");
    }
    for p in &written {
        log::info!("wrote {}", p.display());
    }
    partial_failure(&report)
}

fn batch(dir: &Path, out: Option<&Path>, reports_dir: Option<&Path>, o: &Overrides) -> Result<(), Failure> {
    let (summary, reports) = batch_summarize(dir, |cfg| apply_study(cfg, o))?;
    if let Some(rd) = reports_dir {
        for r in &reports {
            emit_outputs(r, &EmitPaths::in_dir(rd, &r.study))?;
        }
    }
    let text = match o.format {
        Format::Json => summary.to_json(),
        Format::Csv => summary.to_csv(),
    };
    emit_or_print(&text, out)?;
    if let Some(f) = summary.failures.first() {
        return Err(Failure {
            code: f.error.exit_code as u8,
            message: format!("{}: {}", f.config, f.error.message),
        });
    }
    Ok(())
}

fn simulate(spec: &Path, out: Option<&Path>, o: &Overrides) -> Result<(), Failure> {
    let mut s = SimSpec::from_path(spec)?;
    if let Some(seed) = o.seed {
        s.seed = seed;
    }
    if let Some(r) = o.reps {
        s.reps = r;
    }
    if let Some(a) = o.alpha {
        s.alpha = a;
    }
    let summary = monte_carlo(&s)?;
    let text = match o.format {
        Format::Json => summary.to_json(),
        Format::Csv => summary.to_csv(),
    };
    emit_or_print(&text, out)
}

fn replot(report: &Path, svg: Option<PathBuf>, csv: Option<PathBuf>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(report).map_err(|e| Failure {
        code: 2,
        message: format!("cannot read {}: {e}", report.display()),
    })?;
    let r = DiagnosticsReport::from_json(&text)?;
    let paths = EmitPaths {
        json: None,
        svg: Some(svg.unwrap_or_else(|| report.with_extension("svg"))),
        csv: Some(csv.unwrap_or_else(|| report.with_extension("csv"))),
    };
    emit_outputs(&r, &paths)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .format_timestamp(None)
        .init();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start {t} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Run {
            config,
            out_dir,
            overrides,
        } => run(config, out_dir.as_deref(), overrides),
        Command::Batch {
            dir,
            out,
            reports_dir,
            overrides,
        } => batch(dir, out.as_deref(), reports_dir.as_deref(), overrides),
        Command::Simulate { spec, out, overrides } => simulate(spec, out.as_deref(), overrides),
        Command::Plot { report, svg, csv } => replot(report, svg.clone(), csv.clone()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
