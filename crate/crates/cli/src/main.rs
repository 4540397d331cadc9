use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use lsl_core::experiment::{run_experiment, ExperimentConfig, Preset};
use lsl_core::grid::DEFAULT_NODES;
use lsl_core::imaging::DEFAULT_THRESHOLD;
use lsl_core::rom::DEFAULT_TRUNCATION;
use lsl_core::{generate_dataset, reconstruct, DataSet, Grid, Method, Potential, ReconstructionConfig};

mod config;

use config::SimulationConfig;

#[derive(Parser)]
#[command(name = "lsl", version, about = "Lippmann-Schwinger-Lanczos imaging for the 1D Schrödinger equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate boundary data `F`, `dF/dlambda` for a configured potential.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the zero-potential data at the same sample points.
        #[arg(long)]
        background: Option<PathBuf>,
    },
    /// Reconstruct the potential from measured and background data.
    Reconstruct {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        background: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
        /// Grid nodes; defaults to the value recorded in the data file.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: f64,
    },
    /// Run a preset end to end and write its tables.
    Experiment {
        #[arg(value_enum)]
        preset: PresetArg,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        f: u32,
        #[arg(long)]
        outdir: PathBuf,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Born,
    Lsl,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Born => Method::Born,
            MethodArg::Lsl => Method::Lsl,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Gaussian,
    Step,
    Zero,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Gaussian => Preset::Gaussian,
            PresetArg::Step => Preset::Step,
            PresetArg::Zero => Preset::Zero,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, out, background } => simulate(&config, &out, background.as_deref()),
        Command::Reconstruct {
            data,
            background,
            method,
            threshold,
            out,
            n,
            truncation,
        } => run_reconstruct(&data, &background, method.into(), threshold, truncation, n, &out),
        Command::Experiment {
            preset,
            f,
            outdir,
            threshold,
            n,
        } => experiment(preset.into(), f as usize, threshold, n, &outdir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn write_dataset(data: &DataSet, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    data.write_to(&mut w)?;
    w.flush()?;
    Ok(())
}

fn read_dataset(path: &Path) -> Result<DataSet> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    DataSet::read_from(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
}

fn simulate(config: &Path, out: &Path, background: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg = SimulationConfig::parse(&text).context("config")?;
    let lambdas = cfg.sample_points().context("sampling")?;
    let grid = Grid::new(cfg.length, cfg.nodes).context("grid")?;
    let data = generate_dataset(&cfg.potential, &lambdas, &grid)
        .context("simulate")?
        .with_label(cfg.label.clone());
    write_dataset(&data, out).context("write")?;
    if let Some(path) = background {
        let data0 = generate_dataset(&Potential::Zero, &lambdas, &grid)
            .context("simulate background")?
            .with_label("background");
        write_dataset(&data0, path).context("write")?;
    }
    Ok(())
}

fn run_reconstruct(
    data: &Path,
    background: &Path,
    method: Method,
    threshold: f64,
    truncation: f64,
    nodes: Option<usize>,
    out: &Path,
) -> Result<()> {
    let data = read_dataset(data).context("read data")?;
    let data0 = read_dataset(background).context("read background")?;
    let config = ReconstructionConfig {
        grid_nodes: nodes.or(data.grid_nodes).unwrap_or(DEFAULT_NODES),
        rel_threshold: threshold,
        truncation_tol: truncation,
    };
    let result = reconstruct(&data, &data0, method, &config).context("reconstruct")?;
    let grid = Grid::new(data.length, config.grid_nodes)?;
    let mut table = String::new();
    writeln!(
        table,
        "# method={method} threshold={threshold:e} rank={} residual={:.6e}",
        result.rank, result.residual_norm
    )?;
    writeln!(table, "x p_est")?;
    for (x, p) in grid.nodes().iter().zip(&result.estimate) {
        writeln!(table, "{x:.16e} {p:.16e}")?;
    }
    fs::write(out, table).with_context(|| format!("write: {}", out.display()))?;
    Ok(())
}

fn experiment(preset: Preset, f: usize, threshold: Option<f64>, nodes: Option<usize>, outdir: &Path) -> Result<()> {
    let mut cfg = ExperimentConfig::preset(preset, f);
    if let Some(t) = threshold {
        cfg.rel_threshold = t;
    }
    if let Some(n) = nodes {
        cfg.nodes = n;
    }
    let output = run_experiment(&cfg)?;
    output.write_to_dir(outdir).context("write")?;
    print!("{}", output.summary());
    Ok(())
}
