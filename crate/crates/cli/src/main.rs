use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tfimine::baselines;
use tfimine::dataset::{self, TransactionDataset};
use tfimine::fim::{self, ItemsetCollection};
use tfimine::harness::{self, ExperimentConfig};
use tfimine::sukp::SolveLimits;
use tfimine::tfi::{self, TfiConfig};
use tfimine::Error;

/// True-frequent-itemset extraction with family-wise error rate control.
#[derive(Parser)]
#[command(name = "tfimine", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine the exact frequent itemsets of a FIMI dataset.
    Mine {
        /// FIMI dataset to mine
        #[arg(long)]
        input: PathBuf,
        /// Minimum frequency threshold in (0,1]
        #[arg(long)]
        theta: f64,
        /// Output path; stdout when omitted
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Extract true frequent itemsets with FWER at most delta.
    Tfi {
        /// FIMI dataset to analyze
        #[arg(long)]
        input: PathBuf,
        /// Extraction method
        #[arg(long)]
        method: MethodArg,
        /// Minimum true frequency threshold in (0,1]
        #[arg(long)]
        theta: f64,
        /// FWER bound in (0,1)
        #[arg(long)]
        delta: f64,
        /// Exploratory fraction for the split-based methods
        #[arg(long, default_value_t = 0.5)]
        split_fraction: f64,
        /// Seed for the dataset split
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Universal constant of the VC accuracy bound
        #[arg(long, default_value_t = 0.5)]
        vc_constant: f64,
        /// Cap on the collection size handed to the SUKP solver
        #[arg(long, default_value_t = 20_000)]
        max_sukp: usize,
        /// Write the full run report as JSON
        #[arg(long)]
        report: Option<PathBuf>,
        /// Output path for the itemset collection; stdout when omitted
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Enlarge a dataset by sampling transactions uniformly with replacement.
    Enlarge {
        /// FIMI dataset to resample
        #[arg(long)]
        input: PathBuf,
        /// Number of transactions to draw
        #[arg(long)]
        target_n: usize,
        /// Sampling seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a configured ground-truth experiment and write scored rows as CSV.
    Evaluate {
        /// Experiment configuration (JSON)
        #[arg(long)]
        config: PathBuf,
        /// CSV output path; stdout when omitted
        #[arg(long)]
        output: Option<PathBuf>,
        /// Optional JSON summary (means, stddevs, runtimes)
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    #[value(name = "1")]
    Method1,
    #[value(name = "2")]
    Method2,
    Bonferroni,
    Holdout,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } | Error::Parameter(_) | Error::Model(_) | Error::Structure(_) => 2,
        Error::Infeasible(_) => 3,
        Error::ResourceCap(_) => 4,
        Error::Io(_) | Error::Json(_) => 1,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Mine {
            input,
            theta,
            output,
        } => {
            let ds = load_dataset(&input)?;
            let mined = fim::mine_frequent(&ds, theta)?;
            write_collection(&mined, output.as_deref())
        }
        Command::Tfi {
            input,
            method,
            theta,
            delta,
            split_fraction,
            seed,
            vc_constant,
            max_sukp,
            report,
            output,
        } => {
            let ds = load_dataset(&input)?;
            let config = TfiConfig {
                vc_constant,
                split: None,
                max_sukp_collection: max_sukp,
                solve_limits: SolveLimits::default(),
            };
            let (collection, report_json) = match method {
                MethodArg::Method1 => {
                    let (ds_e, ds_v) = ds.random_split(split_fraction, seed)?;
                    let r = tfi::method1(&ds_e, &ds_v, theta, delta, &config)?;
                    let json = serde_json::to_value(&r)?;
                    (r.output, json)
                }
                MethodArg::Method2 => {
                    let r = tfi::method2(&ds, theta, delta, &config)?;
                    let json = serde_json::to_value(&r)?;
                    (r.output, json)
                }
                MethodArg::Bonferroni => {
                    let out = baselines::bonferroni_method(&ds, theta, delta)?;
                    let json = baseline_report("bonferroni", theta, delta, &out);
                    (out, json)
                }
                MethodArg::Holdout => {
                    let (ds_e, ds_v) = ds.random_split(split_fraction, seed)?;
                    let out = baselines::holdout_method(&ds_e, &ds_v, theta, delta)?;
                    let json = baseline_report("holdout", theta, delta, &out);
                    (out, json)
                }
            };
            if let Some(path) = report {
                let file = File::create(path)?;
                serde_json::to_writer_pretty(BufWriter::new(file), &report_json)?;
            }
            write_collection(&collection, output.as_deref())
        }
        Command::Enlarge {
            input,
            target_n,
            seed,
            output,
        } => {
            let ds = load_dataset(&input)?;
            let big = ds.enlarge(target_n, seed)?;
            match output {
                Some(path) => big.write_fimi(BufWriter::new(File::create(path)?)),
                None => big.write_fimi(io::stdout().lock()),
            }
        }
        Command::Evaluate {
            config,
            output,
            summary,
        } => {
            let mut text = String::new();
            File::open(&config)?.read_to_string(&mut text)?;
            let cfg: ExperimentConfig = serde_json::from_str(&text)?;
            let rows = harness::run_experiment(&cfg)?;
            let csv = harness::rows_to_csv(&rows);
            match output {
                Some(path) => File::create(path)?.write_all(csv.as_bytes())?,
                None => io::stdout().lock().write_all(csv.as_bytes())?,
            }
            if let Some(path) = summary {
                let file = File::create(path)?;
                serde_json::to_writer_pretty(BufWriter::new(file), &harness::summarize(&rows))?;
            }
            Ok(())
        }
    }
}

fn load_dataset(path: &Path) -> Result<TransactionDataset, Error> {
    let file = File::open(path)?;
    dataset::parse_fimi(BufReader::new(file))
}

fn write_collection(collection: &ItemsetCollection, output: Option<&Path>) -> Result<(), Error> {
    match output {
        Some(path) => collection.write_text(BufWriter::new(File::create(path)?)),
        None => collection.write_text(io::stdout().lock()),
    }
}

fn baseline_report(
    method: &str,
    theta: f64,
    delta: f64,
    out: &ItemsetCollection,
) -> serde_json::Value {
    let entries: Vec<serde_json::Value> = out
        .iter()
        .map(|(itemset, frequency)| {
            serde_json::json!({
                "itemset": itemset.items(),
                "frequency": frequency,
            })
        })
        .collect();
    serde_json::json!({
        "method": method,
        "theta": theta,
        "delta": delta,
        "output": entries,
    })
}
