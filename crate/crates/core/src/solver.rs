//! Solver selection: the exact oracle or the LLGA approximation behind one
//! interface, so deception and robustness experiments can swap them freely.

use crate::error::Result;
use crate::exact::{solve_exact, DEFAULT_BUDGET};
use crate::ga::{solve_llga, GAConfig};
use crate::model::{Allocation, PreferenceProfile, Welfare};

/// Which egalitarian optimizer to run.
#[derive(Debug, Clone, PartialEq)]
pub enum Solver {
    Exact { budget: u128 },
    Llga(GAConfig),
}

impl Solver {
    /// Exact solver with the default enumeration budget.
    pub fn exact() -> Self {
        Solver::Exact { budget: DEFAULT_BUDGET }
    }

    /// Maximize egalitarian welfare of `profile`.
    pub fn solve(&self, profile: &PreferenceProfile) -> Result<(Allocation, Welfare)> {
        match self {
            Solver::Exact { budget } => {
                let sol = solve_exact(profile, *budget)?;
                Ok((sol.best, sol.welfare))
            }
            Solver::Llga(cfg) => {
                let run = solve_llga(profile, cfg)?;
                Ok((run.best, run.welfare))
            }
        }
    }

    /// Short name for report metadata.
    pub fn name(&self) -> &'static str {
        match self {
            Solver::Exact { .. } => "exact",
            Solver::Llga(_) => "llga",
        }
    }
}
