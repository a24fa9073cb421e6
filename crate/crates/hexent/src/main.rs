use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use clap::{Args, Parser, Subcommand};
use hexent::config::{ExperimentConfig, QremMode, TopologySource};
use hexent::error::{Error, Result};
use hexent::formats::{load_topology, read_json, write_json, ScheduleDoc, TopologyDoc};
use hexent::pipeline::{pair_calibration, reconstruct_edge, report_simulation, simulate, EdgeMatrices};
use hexent::presets::topology_preset;
use hexent::report::{analyses_from_records, emit_report, write_report_tables, EdgeRecord, ExperimentReport};
use hexent::store::{edge_file, load_simulation, save_matrices, save_simulation};
use hexent_core::stats::PairCalibration;
use hexent_core::topology::{generate_heavy_hex, schedule_cz_layers, DeviceTopology};
use serde::Serialize;

/// Whole-device graph-state entanglement experiments on simulated
/// heavy-hexagon devices.
#[derive(Parser)]
#[command(name = "hexent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args)]
struct GlobalArgs {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Analyses to run: with readout correction, without, or both.
    #[arg(long, global = true, value_enum)]
    qrem: Option<QremMode>,
    /// Shots per tomography setting.
    #[arg(long, global = true)]
    shots: Option<u64>,
    /// Bootstrap replicates per edge.
    #[arg(long, global = true)]
    bootstrap_samples: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a topology, print its properties and export it with its CZ
    /// schedule.
    Topology {
        #[arg(long, conflicts_with_all = ["file", "heavy_hex"])]
        preset: Option<String>,
        #[arg(long, conflicts_with = "heavy_hex")]
        file: Option<PathBuf>,
        /// Heavy-hex lattice as ROWSxCOLS.
        #[arg(long)]
        heavy_hex: Option<String>,
    },
    /// Simulate the tomography and calibration circuits and store the counts.
    Simulate,
    /// Reconstruct the neighborhood state of every edge from stored counts.
    Tomography {
        #[arg(long)]
        input: PathBuf,
    },
    /// Write readout-corrected outcome distributions for stored counts.
    Qrem {
        #[arg(long)]
        input: PathBuf,
    },
    /// Certify every edge of stored counts and write the report.
    Analyze {
        #[arg(long)]
        input: PathBuf,
    },
    /// Recompute the summary, table and graph files from stored records.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
    /// The full pipeline.
    Run,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_config(global: &GlobalArgs, fallback: Option<TopologySource>) -> Result<ExperimentConfig> {
    let mut config = match (&global.config, fallback) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(topology)) => ExperimentConfig::new(topology),
        (None, None) => return Err(Error::invalid("arguments", "--config is required")),
    };
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    if let Some(qrem) = global.qrem {
        config.qrem = qrem;
    }
    if let Some(shots) = global.shots {
        config.shots = shots;
    }
    if let Some(b) = global.bootstrap_samples {
        config.bootstrap.replicates = b;
    }
    if let Some(out) = &global.out {
        config.out = Some(absolute(out));
    }
    config.validate()?;
    Ok(config)
}

fn absolute(path: &Path) -> PathBuf {
    std::env::current_dir().map(|d| d.join(path)).unwrap_or_else(|_| path.to_path_buf())
}

fn out_dir(config: &ExperimentConfig) -> Result<PathBuf> {
    config
        .out_dir()
        .ok_or_else(|| Error::invalid("arguments", "an output directory is required (--out or `out` in the config)"))
}

fn execute(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match cli.command {
        Command::Topology { preset, file, heavy_hex } => topology_command(g, preset, file, heavy_hex),
        Command::Simulate => {
            let config = load_config(g, None)?;
            let out = out_dir(&config)?;
            let sim = simulate(&config)?;
            save_simulation(&sim, &out)?;
            println!("simulated {} edges of {} into {}", sim.datasets.len(), sim.topology.name(), out.display());
            Ok(())
        }
        Command::Tomography { input } => {
            let config = load_config(g, Some(stored_topology(&input)))?;
            let sim = load_simulation(&input)?;
            let out = config.out.clone().unwrap_or(input);
            let mut matrices = Vec::new();
            for qrem in config.qrem.analyses() {
                for (edge, dataset) in &sim.datasets {
                    let calibration = if qrem {
                        pair_calibration(&sim.calibrations, dataset.qubits())?
                    } else {
                        PairCalibration::Uncorrected
                    };
                    let density = reconstruct_edge(*edge, dataset, &calibration)?;
                    matrices.push(EdgeMatrices { edge: *edge, qrem, density, best_pair: None });
                }
            }
            save_matrices(&matrices, &out)?;
            println!("reconstructed {} states into {}", matrices.len(), out.join("matrices").display());
            Ok(())
        }
        Command::Qrem { input } => qrem_command(g, input),
        Command::Analyze { input } => {
            let config = load_config(g, Some(stored_topology(&input)))?;
            let sim = load_simulation(&input)?;
            let out = config.out.clone().unwrap_or(input);
            let (report, matrices) = report_simulation(&config, &sim, (SystemTime::now(), Instant::now()))?;
            save_matrices(&matrices, &out)?;
            emit_report(&report, &matrices, &out)?;
            print_summary(&report);
            Ok(())
        }
        Command::Report { input } => {
            let topology = read_json::<TopologyDoc>(&input.join("topology.json"))?.to_topology()?;
            let records: Vec<EdgeRecord> = read_json(&input.join("records.json"))?;
            let mut report: ExperimentReport = read_json(&input.join("report.json"))?;
            report.analyses = analyses_from_records(records, &topology)?;
            let out = g.out.clone().map(|p| absolute(&p)).unwrap_or(input);
            write_report_tables(&report, &out)?;
            print_summary(&report);
            Ok(())
        }
        Command::Run => {
            let config = load_config(g, None)?;
            let out = out_dir(&config)?;
            let run = hexent::run_to_directory(&config, &out)?;
            print_summary(&run.report);
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn stored_topology(input: &Path) -> TopologySource {
    TopologySource::File(absolute(&input.join("topology.json")))
}

fn parse_heavy_hex(spec: &str) -> Result<DeviceTopology> {
    let bad = || Error::invalid("--heavy-hex", format!("expected ROWSxCOLS with positive integers, got {spec:?}"));
    let (rows, cols) = spec.split_once('x').ok_or_else(bad)?;
    let parse = |s: &str| s.trim().parse::<usize>().ok().and_then(NonZeroUsize::new).ok_or_else(bad);
    Ok(generate_heavy_hex(parse(rows)?, parse(cols)?))
}

fn topology_command(
    g: &GlobalArgs,
    preset: Option<String>,
    file: Option<PathBuf>,
    heavy_hex: Option<String>,
) -> Result<()> {
    let topology = match (preset, file, heavy_hex) {
        (Some(name), _, _) => topology_preset(&name)?,
        (_, Some(path), _) => load_topology(&path)?,
        (_, _, Some(spec)) => parse_heavy_hex(&spec)?,
        _ => load_config(g, None)?.build_topology()?,
    };
    let schedule = schedule_cz_layers(&topology);
    println!(
        "{}: {} qubits, {} edges, max degree {}, {}, {} CZ layers",
        topology.name(),
        topology.n_qubits(),
        topology.edges().len(),
        topology.max_degree(),
        if topology.is_bipartite() { "bipartite" } else { "not bipartite" },
        schedule.depth()
    );
    if let Some(out) = &g.out {
        write_json(&out.join("topology.json"), &TopologyDoc::from_topology(&topology))?;
        write_json(&out.join("schedule.json"), &ScheduleDoc::from_schedule(&schedule))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CorrectedSetting {
    setting: String,
    measured: Vec<f64>,
    corrected: Vec<f64>,
}

#[derive(Serialize)]
struct CorrectedEdge {
    qubits: Vec<usize>,
    settings: Vec<CorrectedSetting>,
}

fn qrem_command(g: &GlobalArgs, input: PathBuf) -> Result<()> {
    let config = load_config(g, Some(stored_topology(&input)))?;
    let sim = load_simulation(&input)?;
    let out = config.out.clone().unwrap_or(input);
    for (edge, dataset) in &sim.datasets {
        let calibration = pair_calibration(&sim.calibrations, dataset.qubits())?;
        let measured = dataset.probabilities();
        let corrected = calibration.correct(dataset.qubits(), &measured).map_err(|e| Error::edge(*edge, e))?;
        let settings = dataset
            .tables()
            .iter()
            .zip(measured)
            .zip(corrected)
            .map(|((t, measured), corrected)| CorrectedSetting {
                setting: t.setting().to_string(),
                measured,
                corrected,
            })
            .collect();
        write_json(
            &out.join("qrem").join(edge_file(*edge)),
            &CorrectedEdge { qubits: dataset.qubits().to_vec(), settings },
        )?;
    }
    println!("corrected {} edges into {}", sim.datasets.len(), out.join("qrem").display());
    Ok(())
}

fn print_summary(report: &ExperimentReport) {
    for a in &report.analyses {
        let s = &a.summary;
        println!(
            "{} {}: {}/{} pairs entangled, mean negativity {:.3} (sd {:.3}), largest entangled region {} of {} qubits",
            report.topology.name,
            a.label(),
            s.entangled_pairs,
            s.edges,
            s.mean_negativity.unwrap_or(0.0),
            s.stddev_negativity.unwrap_or(0.0),
            s.largest_component,
            report.topology.n_qubits
        );
    }
}
