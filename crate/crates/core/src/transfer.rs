//! Boundary measurements `F(lambda_j)`, `dF/dlambda(lambda_j)` and the
//! plain-text dataset format.
//!
//! File layout: one header line starting with `#` carrying `key=value`
//! metadata (`L`, optionally `n`, then `label=` taking the rest of the line),
//! followed by one whitespace-separated row `lambda F dF` per sample. Numbers
//! are written with 17 significant digits so a read/write cycle reproduces
//! the text exactly.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{LslError, Result};
use crate::grid::Grid;
use crate::par;
use crate::pde::{assemble_operator, Snapshot};
use crate::potential::Potential;

/// One measurement record at a sample point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSample {
    pub lambda: f64,
    /// `F(lambda)`.
    pub value: f64,
    /// `dF/dlambda(lambda)`, negative off the spectrum.
    pub derivative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    pub length: f64,
    /// Node count of the grid the data was simulated on, when known.
    pub grid_nodes: Option<usize>,
    pub label: String,
    samples: Vec<SpectralSample>,
}

/// `F(lambda) = u(0, lambda)`.
pub fn measure_transfer(snapshot: &Snapshot, grid: &Grid) -> Result<f64> {
    check_snapshot(snapshot, grid)?;
    Ok(snapshot.boundary_value())
}

/// `dF/dlambda = -sum_i h_i u_i^2`, from the resolvent identity.
pub fn transfer_derivative(snapshot: &Snapshot, grid: &Grid) -> Result<f64> {
    check_snapshot(snapshot, grid)?;
    Ok(-grid.inner(&snapshot.values, &snapshot.values))
}

fn check_snapshot(snapshot: &Snapshot, grid: &Grid) -> Result<()> {
    if snapshot.values.len() != grid.len() {
        return Err(LslError::Dimension(format!(
            "snapshot has {} values, grid has {} nodes",
            snapshot.values.len(),
            grid.len()
        )));
    }
    if snapshot.values.iter().any(|v| !v.is_finite()) {
        return Err(LslError::InvalidInput(format!(
            "snapshot at lambda = {} has non-finite values",
            snapshot.lambda
        )));
    }
    Ok(())
}

/// Simulates the measurements for potential `p` at the given sample points.
pub fn generate_dataset(p: &Potential, lambdas: &[f64], grid: &Grid) -> Result<DataSet> {
    let sorted = validated_lambdas(lambdas)?;
    let op = assemble_operator(p, grid)?;
    let samples = par::try_map(&sorted, |&lambda| {
        let u = op.solve(lambda)?;
        Ok(SpectralSample {
            lambda,
            value: measure_transfer(&u, grid)?,
            derivative: transfer_derivative(&u, grid)?,
        })
    })?;
    Ok(DataSet {
        length: grid.length(),
        grid_nodes: Some(grid.len()),
        label: String::new(),
        samples,
    })
}

/// Sorts the sample points, rejecting empty, non-finite or repeated input.
pub fn validated_lambdas(lambdas: &[f64]) -> Result<Vec<f64>> {
    if lambdas.is_empty() {
        return Err(LslError::InvalidInput("no sample points".into()));
    }
    if let Some(l) = lambdas.iter().find(|l| !l.is_finite()) {
        return Err(LslError::InvalidInput(format!("sample point {l} is not finite")));
    }
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(f64::total_cmp);
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(LslError::InvalidInput(format!(
            "duplicate sample point {}",
            w[0]
        )));
    }
    Ok(sorted)
}

impl DataSet {
    /// Builds a dataset, enforcing finiteness and strictly increasing `lambda`.
    pub fn new(length: f64, samples: Vec<SpectralSample>, label: impl Into<String>) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(LslError::InvalidInput(format!(
                "domain length must be positive, got {length}"
            )));
        }
        if samples.is_empty() {
            return Err(LslError::InvalidInput("dataset needs at least one sample".into()));
        }
        for s in &samples {
            if !(s.lambda.is_finite() && s.value.is_finite() && s.derivative.is_finite()) {
                return Err(LslError::InvalidInput(format!(
                    "non-finite sample at lambda = {}",
                    s.lambda
                )));
            }
        }
        if let Some(w) = samples.windows(2).find(|w| !(w[0].lambda < w[1].lambda)) {
            return Err(LslError::InvalidInput(format!(
                "sample points must be strictly increasing ({} then {})",
                w[0].lambda, w[1].lambda
            )));
        }
        Ok(Self {
            length,
            grid_nodes: None,
            label: label.into(),
            samples,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn samples(&self) -> &[SpectralSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.lambda).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.value).collect()
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "{self}")?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(mut r: R) -> Result<Self> {
        let mut text = String::new();
        r.read_to_string(&mut text)?;
        text.parse()
    }
}

impl fmt::Display for DataSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "# L={:.16e}", self.length)?;
        if let Some(n) = self.grid_nodes {
            write!(f, " n={n}")?;
        }
        writeln!(f, " columns=lambda,F,dF label={}", self.label.replace('\n', " "))?;
        for s in &self.samples {
            writeln!(f, "{:.16e} {:.16e} {:.16e}", s.lambda, s.value, s.derivative)?;
        }
        Ok(())
    }
}

impl FromStr for DataSet {
    type Err = LslError;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| LslError::Parse("empty dataset file".into()))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| LslError::Parse("missing '#' header line".into()))?;

        let (meta, label) = match header.find("label=") {
            Some(pos) => (&header[..pos], header[pos + "label=".len()..].to_string()),
            None => (header, String::new()),
        };
        let mut length = None;
        let mut grid_nodes = None;
        for token in meta.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| LslError::Parse(format!("malformed header token '{token}'")))?;
            match key {
                "L" => {
                    length = Some(value.parse::<f64>().map_err(|e| {
                        LslError::Parse(format!("bad domain length '{value}': {e}"))
                    })?)
                }
                "n" => {
                    grid_nodes = Some(value.parse::<usize>().map_err(|e| {
                        LslError::Parse(format!("bad node count '{value}': {e}"))
                    })?)
                }
                _ => {}
            }
        }
        let length = length.ok_or_else(|| LslError::Parse("header lacks L=".into()))?;

        let mut samples = Vec::new();
        for (lineno, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|e| {
                        LslError::Parse(format!("line {}: bad number '{t}': {e}", lineno + 1))
                    })
                })
                .collect::<Result<_>>()?;
            if fields.len() != 3 {
                return Err(LslError::Parse(format!(
                    "line {}: expected 3 columns, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            samples.push(SpectralSample {
                lambda: fields[0],
                value: fields[1],
                derivative: fields[2],
            });
        }
        let mut data = DataSet::new(length, samples, label)?;
        data.grid_nodes = grid_nodes;
        Ok(data)
    }
}
