//! End-to-end experiments: simulate data for a known potential, reconstruct
//! it with the requested methods, and write plot-ready tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{LslError, Result};
use crate::grid::{Grid, DEFAULT_NODES};
use crate::imaging::{
    assemble_system, relative_l2_error, solve_regularized, BornField, LslModel, Method,
    ReconstructionResult,
};
use crate::pde::assemble_operator;
use crate::potential::Potential;
use crate::rom::{SnapshotMatrix, DEFAULT_TRUNCATION};
use crate::sampling::weyl_sample;
use crate::transfer::{generate_dataset, DataSet};

/// Resonance intervals used by the presets.
pub const DEFAULT_INTERVALS: usize = 10;

/// Written in place of columns for methods that were not run.
pub const MISSING: f64 = f64::NAN;

/// Singular-value cutoff for the presets. The data are noiseless but both
/// internal-field approximations carry model error (O(1) for Born, ~1e-3 for
/// LSL), so the imaging system is effectively noisy and `1e-8` over-fits.
pub const PRESET_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Gaussian,
    Step,
    Zero,
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Gaussian => "gaussian",
            Preset::Step => "step",
            Preset::Zero => "zero",
        }
    }

    pub fn potential(self, length: f64) -> Potential {
        match self {
            Preset::Gaussian => Potential::gaussian_preset(length),
            Preset::Step => Potential::step_preset(length),
            Preset::Zero => Potential::Zero,
        }
    }
}

impl FromStr for Preset {
    type Err = LslError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Preset::Gaussian),
            "step" => Ok(Preset::Step),
            "zero" => Ok(Preset::Zero),
            other => Err(LslError::InvalidInput(format!("unknown preset '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub label: String,
    pub length: f64,
    pub nodes: usize,
    pub potential: Potential,
    /// Resonance intervals `N`.
    pub intervals: usize,
    /// Points per interval `f`.
    pub per_interval: usize,
    pub methods: Vec<Method>,
    pub rel_threshold: f64,
    pub truncation_tol: f64,
    /// Spectral parameter of the internal-field table; defaults to the
    /// middle sample point.
    pub probe_lambda: Option<f64>,
}

impl ExperimentConfig {
    pub fn preset(preset: Preset, per_interval: usize) -> Self {
        Self {
            label: format!("{} f={per_interval}", preset.as_str()),
            length: 1.0,
            nodes: DEFAULT_NODES,
            potential: preset.potential(1.0),
            intervals: DEFAULT_INTERVALS,
            per_interval,
            methods: vec![Method::Born, Method::Lsl],
            rel_threshold: PRESET_THRESHOLD,
            truncation_tol: DEFAULT_TRUNCATION,
            probe_lambda: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let grid = Grid::new(self.length, self.nodes)?;
        self.potential.evaluate(&grid)?;
        weyl_sample(self.intervals, self.per_interval, self.length)?;
        for (name, value) in [
            ("threshold", self.rel_threshold),
            ("truncation tolerance", self.truncation_tol),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(LslError::InvalidInput(format!(
                    "{name} must lie in (0, 1), got {value}"
                )));
            }
        }
        if self.methods.is_empty() {
            return Err(LslError::InvalidInput("no imaging method requested".into()));
        }
        if self.methods.contains(&Method::Exact) {
            return Err(LslError::InvalidInput(
                "experiments support the born and lsl methods only".into(),
            ));
        }
        if let Some(l) = self.probe_lambda {
            if !l.is_finite() {
                return Err(LslError::InvalidInput(format!("probe lambda {l} is not finite")));
            }
        }
        Ok(())
    }
}

/// Internal fields at one spectral parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct InternalComparison {
    pub lambda: f64,
    pub true_field: Vec<f64>,
    pub background: Vec<f64>,
    pub lsl: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub grid: Grid,
    pub p_true: Vec<f64>,
    pub data: DataSet,
    pub data0: DataSet,
    pub reconstructions: Vec<ReconstructionResult>,
    pub internal: InternalComparison,
}

/// Which pipeline stage failed.
#[derive(Debug, Clone, PartialEq)]
pub struct StageError {
    pub stage: &'static str,
    pub source: LslError,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage '{}' failed: {}", self.stage, self.source)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> std::result::Result<T, StageError>;
}

impl<T> Stage<T> for Result<T> {
    fn stage(self, stage: &'static str) -> std::result::Result<T, StageError> {
        self.map_err(|source| StageError { stage, source })
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> std::result::Result<ExperimentOutput, StageError> {
    config.validate().stage("validate")?;
    let grid = Grid::new(config.length, config.nodes).stage("validate")?;
    let plan = weyl_sample(config.intervals, config.per_interval, config.length).stage("sampling")?;
    let p_true = config.potential.evaluate(&grid).stage("validate")?;

    let data = generate_dataset(&config.potential, &plan.lambdas, &grid)
        .stage("simulate true medium")?
        .with_label(format!("{} true", config.label));
    let data0 = generate_dataset(&Potential::Zero, &plan.lambdas, &grid)
        .stage("simulate background")?
        .with_label(format!("{} background", config.label));

    let model = LslModel::build(&data, &data0, &grid, config.truncation_tol).stage("reduced-order model")?;

    let mut reconstructions = Vec::new();
    for method in &config.methods {
        let result = match method {
            Method::Born => {
                let field = BornField {
                    background: &model.background,
                };
                assemble_system(&data, &data0, &field, &grid)
                    .and_then(|s| solve_regularized(&s, config.rel_threshold))
                    .stage("born imaging")?
            }
            Method::Lsl => assemble_system(&data, &data0, &model, &grid)
                .and_then(|s| solve_regularized(&s, config.rel_threshold))
                .stage("lsl imaging")?,
            Method::Exact => unreachable!("rejected by validate"),
        };
        reconstructions.push(result);
    }

    let probe = config
        .probe_lambda
        .unwrap_or(plan.lambdas[plan.lambdas.len() / 2]);
    let internal = internal_comparison(&config.potential, &model, &grid, probe).stage("internal fields")?;

    Ok(ExperimentOutput {
        config: config.clone(),
        grid,
        p_true,
        data,
        data0,
        reconstructions,
        internal,
    })
}

fn internal_comparison(
    potential: &Potential,
    model: &LslModel,
    grid: &Grid,
    lambda: f64,
) -> Result<InternalComparison> {
    let true_field = assemble_operator(potential, grid)?.solve(lambda)?.values;
    let background = SnapshotMatrix::compute(&Potential::Zero, &[lambda], grid)?
        .snapshot(0)
        .values;
    let lsl = model.internal(lambda)?.values;
    Ok(InternalComparison {
        lambda,
        true_field,
        background,
        lsl,
    })
}

impl ExperimentOutput {
    pub fn reconstruction(&self, method: Method) -> Option<&ReconstructionResult> {
        self.reconstructions.iter().find(|r| r.method == method)
    }

    /// Relative weighted L2 error of a method's reconstruction.
    pub fn error(&self, method: Method) -> Option<f64> {
        self.reconstruction(method)
            .map(|r| relative_l2_error(&r.estimate, &self.p_true, &self.grid).expect("sizes match"))
    }

    /// `(err(lsl field vs u), err(u_0 vs u))` at the probe point.
    pub fn internal_errors(&self) -> (f64, f64) {
        let c = &self.internal;
        let rel = |w: &[f64]| {
            let diff: Vec<f64> = w.iter().zip(&c.true_field).map(|(a, b)| a - b).collect();
            self.grid.norm(&diff) / self.grid.norm(&c.true_field)
        };
        (rel(&c.lsl), rel(&c.background))
    }

    /// Columns `x p_true p_born p_lsl`.
    pub fn reconstruction_table(&self) -> String {
        let column = |m: Method| self.reconstruction(m).map(|r| r.estimate.as_slice());
        let born = column(Method::Born);
        let lsl = column(Method::Lsl);
        let mut out = String::from("x p_true p_born p_lsl\n");
        for (i, x) in self.grid.nodes().iter().enumerate() {
            let b = born.map_or(MISSING, |v| v[i]);
            let l = lsl.map_or(MISSING, |v| v[i]);
            writeln!(out, "{x:.16e} {:.16e} {b:.16e} {l:.16e}", self.p_true[i]).unwrap();
        }
        out
    }

    /// Columns `x u_true u_background u_lsl`.
    pub fn internal_table(&self) -> String {
        let c = &self.internal;
        let mut out = format!("# lambda={:.16e}\n", c.lambda);
        out.push_str("x u_true u_background u_lsl\n");
        for (i, x) in self.grid.nodes().iter().enumerate() {
            writeln!(
                out,
                "{x:.16e} {:.16e} {:.16e} {:.16e}",
                c.true_field[i], c.background[i], c.lsl[i]
            )
            .unwrap();
        }
        out
    }

    pub fn summary(&self) -> String {
        let cfg = &self.config;
        let mut out = String::new();
        writeln!(out, "label = {}", cfg.label).unwrap();
        writeln!(out, "L = {}", cfg.length).unwrap();
        writeln!(out, "n = {}", cfg.nodes).unwrap();
        writeln!(out, "N = {}", cfg.intervals).unwrap();
        writeln!(out, "f = {}", cfg.per_interval).unwrap();
        writeln!(out, "m = {}", self.data.len()).unwrap();
        writeln!(out, "threshold = {:e}", cfg.rel_threshold).unwrap();
        writeln!(out, "truncation = {:e}", cfg.truncation_tol).unwrap();
        for r in &self.reconstructions {
            let m = r.method;
            writeln!(out, "err_{m} = {:.16e}", self.error(m).unwrap()).unwrap();
            writeln!(out, "rank_{m} = {}", r.rank).unwrap();
            writeln!(out, "residual_{m} = {:.16e}", r.residual_norm).unwrap();
            let sv: Vec<String> = r.singular_values.iter().map(|s| format!("{s:.16e}")).collect();
            writeln!(out, "singular_values_{m} = {}", sv.join(" ")).unwrap();
        }
        let (lsl, background) = self.internal_errors();
        writeln!(out, "probe_lambda = {:.16e}", self.internal.lambda).unwrap();
        writeln!(out, "internal_err_lsl = {lsl:.16e}").unwrap();
        writeln!(out, "internal_err_background = {background:.16e}").unwrap();
        out
    }

    /// Writes the five output files into `dir` and returns their paths.
    pub fn write_to_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let files = [
            ("data.txt", self.data.to_string()),
            ("background.txt", self.data0.to_string()),
            ("reconstruction.txt", self.reconstruction_table()),
            ("internal.txt", self.internal_table()),
            ("summary.txt", self.summary()),
        ];
        let mut paths = Vec::new();
        for (name, contents) in files {
            let path = dir.join(name);
            fs::write(&path, contents)?;
            paths.push(path);
        }
        Ok(paths)
    }
}
