use serde::{Deserialize, Serialize};

use crate::error::{EivError, Result};

/// Unobserved simulation truth behind a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Latent {
    pub xi: Vec<f64>,
    pub delta: Vec<f64>,
    pub epsilon: Vec<f64>,
}

/// Observed pairs `(y_i, x_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    y: Vec<f64>,
    x: Vec<f64>,
    latent: Option<Latent>,
}

impl Dataset {
    pub fn new(y: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        if y.len() != x.len() {
            return Err(EivError::LengthMismatch { left: y.len(), right: x.len() });
        }
        Ok(Dataset { y, x, latent: None })
    }

    pub fn with_latent(y: Vec<f64>, x: Vec<f64>, latent: Latent) -> Result<Self> {
        let n = y.len();
        for len in [x.len(), latent.xi.len(), latent.delta.len(), latent.epsilon.len()] {
            if len != n {
                return Err(EivError::LengthMismatch { left: n, right: len });
            }
        }
        Ok(Dataset { y, x, latent: Some(latent) })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn latent(&self) -> Option<&Latent> {
        self.latent.as_ref()
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Same observations with `t` added to every response.
    pub fn shift_y(&self, t: f64) -> Dataset {
        Dataset { y: self.y.iter().map(|v| v + t).collect(), x: self.x.clone(), latent: None }
    }
}
