//! Potentials `p(x)` and their evaluation on a grid.

use serde::{Deserialize, Serialize};

use crate::error::{LslError, Result};
use crate::grid::Grid;

/// A piece of a piecewise-constant potential: `value` on `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPiece {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Potential {
    Zero,
    Constant {
        value: f64,
    },
    /// `amplitude * exp(-(x - center)^2 / (2 width^2))`.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Sum of indicator pieces; zero outside all pieces.
    Step {
        pieces: Vec<StepPiece>,
    },
    /// Values given directly at the grid nodes.
    Tabulated {
        values: Vec<f64>,
    },
}

impl Potential {
    /// Gaussian preset: amplitude 5, centred at `L/2`, width `L/10`.
    pub fn gaussian_preset(length: f64) -> Self {
        Potential::Gaussian {
            amplitude: 5.0,
            center: 0.5 * length,
            width: 0.1 * length,
        }
    }

    /// Step preset: value 4 on `[0.4 L, 0.6 L]`.
    pub fn step_preset(length: f64) -> Self {
        Potential::Step {
            pieces: vec![StepPiece {
                start: 0.4 * length,
                end: 0.6 * length,
                value: 4.0,
            }],
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::Constant { value } => *value == 0.0,
            Potential::Gaussian { amplitude, .. } => *amplitude == 0.0,
            Potential::Step { pieces } => pieces.iter().all(|p| p.value == 0.0),
            Potential::Tabulated { values } => values.iter().all(|v| *v == 0.0),
        }
    }

    /// Potential values at the grid nodes.
    pub fn evaluate(&self, grid: &Grid) -> Result<Vec<f64>> {
        let xs = grid.nodes();
        let values: Vec<f64> = match self {
            Potential::Zero => vec![0.0; xs.len()],
            Potential::Constant { value } => vec![*value; xs.len()],
            Potential::Gaussian {
                amplitude,
                center,
                width,
            } => {
                if !(*width > 0.0) {
                    return Err(LslError::InvalidInput(format!(
                        "gaussian width must be positive, got {width}"
                    )));
                }
                xs.iter()
                    .map(|x| {
                        let s = (x - center) / width;
                        amplitude * (-0.5 * s * s).exp()
                    })
                    .collect()
            }
            Potential::Step { pieces } => {
                for piece in pieces {
                    if !(piece.start <= piece.end) {
                        return Err(LslError::InvalidInput(format!(
                            "step interval [{}, {}] is empty",
                            piece.start, piece.end
                        )));
                    }
                }
                xs.iter()
                    .map(|x| {
                        pieces
                            .iter()
                            .filter(|p| *x >= p.start && *x <= p.end)
                            .fold(0.0, |acc, p| acc + p.value)
                    })
                    .collect()
            }
            Potential::Tabulated { values } => {
                if values.len() != xs.len() {
                    return Err(LslError::Dimension(format!(
                        "tabulated potential has {} values, grid has {} nodes",
                        values.len(),
                        xs.len()
                    )));
                }
                values.clone()
            }
        };
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(LslError::InvalidInput(format!(
                "potential is not finite at node {i} (x = {})",
                xs[i]
            )));
        }
        Ok(values)
    }
}
