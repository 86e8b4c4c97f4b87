//! One height computation from a textual [`Problem`], with engine selection.

use serde::{Deserialize, Serialize};

use crate::certificate::{Problem, ProblemError, Report, Ring};
use crate::qfs_ci::{ci_height, CIInput, CiError, Mode};
use crate::qfs_cy::{check_cy, cy_height, CyError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Auto,
    Cy,
    Graded,
    Local,
}

impl Engine {
    /// `Cy` for one homogeneous generator of degree `μ`, `Graded` when all
    /// generators are homogeneous, `Local` otherwise.
    pub fn resolve(self, ring: &Ring) -> Engine {
        if self != Engine::Auto {
            return self;
        }
        if ring.gens.len() == 1 && check_cy(&ring.gens[0], &ring.grading).is_ok() {
            Engine::Cy
        } else if ring.gens.iter().all(|g| ring.grading.is_homogeneous(g)) {
            Engine::Graded
        } else {
            Engine::Local
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Engine::Auto),
            "cy" => Ok(Engine::Cy),
            "graded" => Ok(Engine::Graded),
            "local" => Ok(Engine::Local),
            _ => Err(format!("unknown mode {s:?}; expected auto, cy, graded or local")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Filtration-degree cap for the complete-intersection engine.
    pub degree_cap: Option<u64>,
    pub max_iter: Option<u32>,
    pub trace: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Cy(#[from] CyError),
    #[error(transparent)]
    Ci(#[from] CiError),
    #[error("the Calabi-Yau engine takes a single generator")]
    CyArity,
}

/// Parses, dispatches and packages the result as a [`Report`].
pub fn run_height(problem: &Problem, engine: Engine, limits: Limits) -> Result<Report, RunError> {
    let ring = problem.parse()?;
    match engine.resolve(&ring) {
        Engine::Cy => {
            if ring.gens.len() != 1 {
                return Err(RunError::CyArity);
            }
            let res = cy_height(&ring.gens[0], &ring.grading, limits.max_iter)?;
            Ok(Report::from_cy(problem.clone(), &ring.vars, &res))
        }
        e => {
            let mode = if e == Engine::Local { Mode::Local } else { Mode::Graded };
            let mut input = CIInput::new(ring.gens.clone(), ring.grading.clone(), mode)?.with_trace(limits.trace);
            if let Some(c) = limits.degree_cap {
                input = input.with_cap(c);
            }
            if let Some(m) = limits.max_iter {
                input = input.with_max_iter(m);
            }
            let res = ci_height(&input)?;
            Ok(Report::from_ci(problem.clone(), &ring.vars, &input, &res))
        }
    }
}
