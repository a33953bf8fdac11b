use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use crowdsched::data::{generate, ingest_trace, SyntheticConfig};
use crowdsched::lp::{build_interval_indexed_with, export_model, IntervalForm};
use crowdsched_cli::bench::{parse_algorithms, run_bench, BenchOptions, Sweep};
use crowdsched_cli::files::{read_config, read_instance, read_trace, write_instance};
use crowdsched_cli::online::{run_recorded, run_simulated, write_csv, OnlineOptions};
use crowdsched_cli::records::{summarize, write_records, write_summary};
use crowdsched_cli::report::{build_report, load_results, render_table, write_report};

/// Crowd-worker task scheduling experiments.
#[derive(Parser)]
#[command(name = "crowdsched", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instances, run offline algorithms and write WCTR tables.
    Bench {
        /// Synthetic config (TOML); defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated: LRF, LRF-MAX, LRF-MIN, LRF-MEAN, EDTS, RTS, DTS.
        #[arg(long, default_value = "LRF-MAX,LRF-MIN,LRF-MEAN,EDTS,RTS,DTS")]
        algos: String,
        #[arg(long, default_value_t = 30)]
        seeds: u64,
        /// param:lo:hi:step, e.g. tasks_per_worker:5:50:5.
        #[arg(long)]
        sweep: Option<Sweep>,
        #[arg(long, default_value_t = 3.0)]
        epsilon: f64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Write zero runtimes so output depends only on inputs.
        #[arg(long)]
        no_timing: bool,
    },
    /// Replay simulated (or recorded) meetings through the online re-planner.
    Online {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Offline planner: LRF, LRF-MAX, LRF-MIN, LRF-MEAN, EDTS or OPT.
        #[arg(long, default_value = "EDTS")]
        algos: String,
        #[arg(long, default_value_t = 30)]
        seeds: u64,
        #[arg(long)]
        horizon: Option<f64>,
        /// Contact trace to use instead of simulated meetings.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 128)]
        top_k: usize,
        #[arg(long, default_value_t = 3.0)]
        epsilon: f64,
        /// Always follow the fresh plan, even when the inherited one is cheaper.
        #[arg(long)]
        no_guard: bool,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long)]
        no_timing: bool,
    },
    /// Estimate per-device meeting rates from a contact trace.
    Ingest {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = 128)]
        top_k: usize,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Charts and a summary table from benchmark CSVs.
    Report {
        /// Directory holding RunRecord CSVs.
        results: PathBuf,
        /// Output directory; defaults to the results directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write one synthetic instance as JSON.
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the interval LP of an instance in CPLEX LP format.
    ExportLp {
        /// Instance JSON; otherwise one is generated from --config.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 3.0)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Form::Standard)]
        form: Form,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Standard,
    Completion,
}

fn create(path: &Path) -> Result<fs::File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CROWDSCHED_LOG", "warn")).init();
    match Cli::parse().command {
        Command::Bench { config, algos, seeds, sweep, epsilon, out, no_timing } => {
            let cfg = read_config(config.as_deref())?;
            let opts = BenchOptions {
                algorithms: parse_algorithms(&algos)?,
                seeds,
                epsilon,
                sweep,
                timing: !no_timing,
                ..Default::default()
            };
            let records = run_bench(&cfg, &opts)?;
            fs::create_dir_all(&out)?;
            write_records(create(&out.join("runs.csv"))?, &records)?;
            let summary = summarize(&records);
            write_summary(create(&out.join("summary.csv"))?, &summary)?;
            print!("{}", render_table(&summary));
        }
        Command::Online { config, algos, seeds, horizon, trace, top_k, epsilon, no_guard, out, no_timing } => {
            let cfg = read_config(config.as_deref())?;
            if horizon.is_some_and(|h| !(h > 0.0)) {
                bail!("--horizon must be positive");
            }
            let opts = OnlineOptions { planner: algos, seeds, epsilon, horizon, guard: !no_guard, timing: !no_timing };
            let (records, steps) = match trace {
                Some(path) => run_recorded(&read_trace(&path)?, top_k, &cfg, &opts)?,
                None => run_simulated(&cfg, &opts)?,
            };
            fs::create_dir_all(&out)?;
            write_csv(create(&out.join("online.csv"))?, &records)?;
            write_csv(create(&out.join("online_steps.csv"))?, &steps)?;
            let unfinished = records.iter().filter(|r| r.status != "complete").count();
            let violations: usize = records.iter().map(|r| r.violations).sum();
            let mean = records.iter().map(|r| r.realized_wct).sum::<f64>() / records.len().max(1) as f64;
            println!(
                "{} runs, mean realized WCT {mean:.3}, {unfinished} unfinished, {violations} monotonicity violations",
                records.len()
            );
        }
        Command::Ingest { trace, top_k, out } => {
            let stats = ingest_trace(read_trace(&trace)?, top_k)?;
            for (device, reason) in &stats.dropped {
                log::info!("dropped {device}: {reason:?}");
            }
            let sink: Box<dyn Write> = match &out {
                Some(p) => Box::new(create(p)?),
                None => Box::new(std::io::stdout()),
            };
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(["device", "contacts", "total_gap", "lambda", "phi"])?;
            for d in &stats.selected {
                w.serialize((&d.device, d.contacts, d.total_gap, d.lambda, d.phi))?;
            }
            w.flush()?;
            eprintln!("{} devices selected, {} dropped", stats.selected.len(), stats.dropped.len());
        }
        Command::Report { results, out } => {
            let records = load_results(&results)?;
            if records.is_empty() {
                println!("no run records in {}", results.display());
                return Ok(());
            }
            let report = build_report(&records);
            for path in write_report(&report, out.as_deref().unwrap_or(&results))? {
                println!("wrote {}", path.display());
            }
        }
        Command::Generate { config, seed, out } => {
            let mut cfg: SyntheticConfig = read_config(config.as_deref())?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            write_instance(&out, &generate(&cfg)?)?;
        }
        Command::ExportLp { instance, config, epsilon, form, out } => {
            let inst = match instance {
                Some(p) => read_instance(&p)?,
                None => generate(&read_config(config.as_deref())?)?,
            };
            let form = match form {
                Form::Standard => IntervalForm::Standard,
                Form::Completion => IntervalForm::Completion,
            };
            let model = build_interval_indexed_with(&inst, epsilon, form, &inst.contact_loads())?;
            create(&out)?.write_all(export_model(&model).as_bytes())?;
        }
    }
    Ok(())
}
