//! TOML simulation config.
//!
//! ```toml
//! L = 1.0
//! n = 2001
//! N = 10
//! f = 3
//! label = "gaussian"
//!
//! [potential]
//! kind = "gaussian"
//! amplitude = 5.0
//! center = 0.5
//! width = 0.1
//! ```
//!
//! `lambdas = [...]` may replace `N`/`f` with explicit sample points.

use anyhow::{bail, Result};
use lsl_core::grid::DEFAULT_NODES;
use lsl_core::Potential;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(rename = "L", alias = "length", default = "unit_length")]
    pub length: f64,
    #[serde(rename = "n", alias = "nodes", default = "default_nodes")]
    pub nodes: usize,
    #[serde(rename = "N", alias = "intervals")]
    pub intervals: Option<usize>,
    #[serde(rename = "f", alias = "per_interval")]
    pub per_interval: Option<usize>,
    pub lambdas: Option<Vec<f64>>,
    #[serde(default)]
    pub label: String,
    pub potential: Potential,
}

fn unit_length() -> f64 {
    1.0
}

fn default_nodes() -> usize {
    DEFAULT_NODES
}

impl SimulationConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Explicit sample points, or the Weyl sampling for `N` and `f`.
    pub fn sample_points(&self) -> Result<Vec<f64>> {
        match (&self.lambdas, self.intervals, self.per_interval) {
            (Some(l), None, None) => Ok(l.clone()),
            (None, Some(n), Some(f)) => Ok(lsl_core::weyl_sample(n, f, self.length)?.lambdas),
            (Some(_), _, _) => bail!("give either `lambdas` or `N` and `f`, not both"),
            _ => bail!("both `N` and `f` are required when `lambdas` is absent"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_gaussian_config() {
        let cfg = SimulationConfig::parse(
            "N = 2\nf = 3\n[potential]\nkind = \"gaussian\"\namplitude = 5.0\ncenter = 0.5\nwidth = 0.1\n",
        )
        .unwrap();
        assert_eq!(cfg.nodes, DEFAULT_NODES);
        assert_eq!(cfg.length, 1.0);
        assert_eq!(cfg.sample_points().unwrap().len(), 6);
        assert_eq!(cfg.potential, Potential::gaussian_preset(1.0));
    }

    #[test]
    fn parses_step_and_explicit_points() {
        let cfg = SimulationConfig::parse(
            "L = 2.0\nn = 101\nlambdas = [-1.0, -3.0]\n[potential]\nkind = \"step\"\npieces = [{ start = 0.8, end = 1.2, value = 4.0 }]\n",
        )
        .unwrap();
        assert_eq!(cfg.sample_points().unwrap(), vec![-1.0, -3.0]);
        assert_eq!(cfg.potential, Potential::step_preset(2.0));
    }

    #[test]
    fn rejects_ambiguous_sampling() {
        let cfg = SimulationConfig::parse("N = 2\n[potential]\nkind = \"zero\"\n").unwrap();
        assert!(cfg.sample_points().is_err());
        assert!(SimulationConfig::parse("N = 2\nf = 1\nbogus = 3\n[potential]\nkind = \"zero\"\n").is_err());
    }
}
