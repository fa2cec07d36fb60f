use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Work limits and seed shared by every search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    /// Cells per grid dimension; empty means "derive from epsilon".
    pub grid_resolution: Vec<usize>,
    /// Cap on grid points, enumerated windows or sampled points.
    pub max_points: usize,
    /// Cap on candidate points per side in witness searches.
    pub max_candidates: usize,
    /// Cap on integer vectors `n` tried in witness searches.
    pub max_n_values: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            grid_resolution: Vec::new(),
            max_points: 1 << 20,
            max_candidates: 1000,
            max_n_values: 10_000,
            seed: 0,
        }
    }
}

impl SearchBudget {
    pub fn with_seed(seed: u64) -> Self {
        SearchBudget { seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution.contains(&0)
            || self.max_points == 0
            || self.max_candidates == 0
            || self.max_n_values == 0
        {
            return Err(Error::Precondition("budget limits must be positive".into()));
        }
        Ok(())
    }
}
