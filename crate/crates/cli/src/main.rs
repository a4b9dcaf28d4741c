use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ogan_core::experiment::{compare, run_experiment, write_overlay_csv, ExperimentConfig, ExperimentError, Report};
use ogan_core::stl::{eval_boolean, eval_robustness, parse_stl, SignalRange, Trace};

#[derive(Parser)]
#[command(name = "ogan", version, about = "Falsification experiments for STL requirements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the replicas of an experiment and write its report.
    Run {
        config: PathBuf,
        #[arg(long)]
        replicas: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; defaults to one per core.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Log-rank comparison of two reports.
    Compare {
        report_a: PathBuf,
        report_b: PathBuf,
        /// Where to write the overlaid survival curves.
        #[arg(long, default_value = "comparison.csv")]
        csv: PathBuf,
    },
    /// Robustness of a requirement on a recorded trace.
    Monitor {
        stl_file: PathBuf,
        trace: PathBuf,
        /// Declared range `name=lo,hi`; other signals use their observed range.
        #[arg(long = "range", value_parser = parse_range)]
        ranges: Vec<(String, SignalRange)>,
    },
    /// Print the survival curve of a report as CSV.
    Curve { report: PathBuf },
}

fn parse_range(s: &str) -> Result<(String, SignalRange), String> {
    let (name, bounds) = s.split_once('=').ok_or("expected name=lo,hi")?;
    let (lo, hi) = bounds.split_once(',').ok_or("expected name=lo,hi")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad number `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad number `{hi}`"))?;
    let range = SignalRange::new(lo, hi).map_err(|e| e.to_string())?;
    Ok((name.trim().to_string(), range))
}

/// Failure classes mapped to exit codes.
enum Failure {
    Config(String),
    Sut(String),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::AllFailed(_) => Failure::Sut(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn run(
    path: &Path,
    replicas: Option<usize>,
    seed: Option<u64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(r) = replicas {
        config.replicas = r;
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(o) = out {
        config.out = o;
    }
    let output = run_experiment(&config, workers)?;
    let r = &output.report;
    let fr = r.falsification_rate;
    println!(
        "{} on {}: FR {:.2} [{:.2}, {:.2}] over {} replicas, mean executions {}, execution time ratio {:.3}",
        r.algorithm.name(),
        r.sut,
        fr.rate,
        fr.lower,
        fr.upper,
        r.completed,
        r.mean_executions.map_or("-".into(), |m| format!("{m:.1}")),
        r.timing.ratio,
    );
    println!("wrote {}", config.out.display());
    if !r.errored.is_empty() {
        let list: Vec<String> = r.errored.iter().map(|e| format!("replica {}: {}", e.replica, e.error)).collect();
        return Err(Failure::Sut(format!("{} replica(s) errored\n{}", list.len(), list.join("\n"))));
    }
    Ok(())
}

fn compare_reports(a: &Path, b: &Path, csv: &Path) -> Result<(), Failure> {
    let (ra, rb) = (Report::load(a)?, Report::load(b)?);
    let cmp = compare(&ra, &rb)?;
    let file = fs::File::create(csv).map_err(config_err)?;
    write_overlay_csv(&ra, &rb, io::BufWriter::new(file))?;
    println!("{}", serde_json::to_string_pretty(&cmp).map_err(config_err)?);
    Ok(())
}

fn monitor(stl: &Path, trace: &Path, declared: Vec<(String, SignalRange)>) -> Result<(), Failure> {
    let text = fs::read_to_string(stl).map_err(|e| config_err(format!("{}: {e}", stl.display())))?;
    let formula = parse_stl(&text).map_err(config_err)?;
    let file = fs::File::open(trace).map_err(|e| config_err(format!("{}: {e}", trace.display())))?;
    let trace = Trace::read_csv(file).map_err(config_err)?;
    let mut ranges = trace.observed_ranges();
    ranges.extend(declared);
    let r = eval_robustness(&formula, &trace, &ranges, 0).map_err(config_err)?;
    let holds = eval_boolean(&formula, &trace, 0).map_err(config_err)?;
    let record = serde_json::json!({
        "robustness": r.value,
        "scaled": r.scaled,
        "effective_range": [r.effective_lo, r.effective_hi],
        "satisfied": holds,
    });
    println!("{record}");
    Ok(())
}

fn curve(path: &Path) -> Result<(), Failure> {
    let report = Report::load(path)?;
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    report.survival.write_csv(&mut lock).map_err(config_err)?;
    lock.flush().map_err(config_err)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            replicas,
            seed,
            workers,
            out,
        } => run(&config, replicas, seed, workers, out),
        Command::Compare { report_a, report_b, csv } => compare_reports(&report_a, &report_b, &csv),
        Command::Monitor { stl_file, trace, ranges } => monitor(&stl_file, &trace, ranges),
        Command::Curve { report } => curve(&report),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Sut(msg)) => {
            eprintln!("SUT failure: {msg}");
            ExitCode::from(2)
        }
    }
}
