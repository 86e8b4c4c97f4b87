//! Job files and inline queries.

use std::time::Instant;

use qfsplit::certificate::{Problem, Report, Subject};
use qfsplit::run::{run_height, Engine, Limits, RunError};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    #[default]
    Text,
    Json,
}

/// One height query, as read from a JSON job file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub p: u64,
    pub vars: Vec<String>,
    /// One row per grading component.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<u64>>>,
    pub gens: Vec<String>,
    #[serde(default = "auto")]
    pub mode: Engine,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<u32>,
    #[serde(default)]
    pub output: Output,
    /// The user vouches that the generators form a homogeneous regular
    /// sequence, so the ring height is also that of the projective variety.
    #[serde(default)]
    pub regular_sequence: bool,
    #[serde(default)]
    pub trace_degrees: bool,
}

fn auto() -> Engine {
    Engine::Auto
}

#[derive(Debug, thiserror::Error)]
pub enum JobError {
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("a regular sequence can only be declared for homogeneous generators (mode cy or graded)")]
    NotProjective,
    #[error("{0}")]
    Input(String),
}

impl JobSpec {
    pub fn problem(&self) -> Problem {
        Problem { p: self.p, vars: self.vars.clone(), weights: self.weights.clone(), gens: self.gens.clone() }
    }

    pub fn limits(&self) -> Limits {
        Limits { degree_cap: self.degree_cap, max_iter: self.max_iter, trace: self.trace_degrees }
    }
}

/// Runs the job; the report carries the wall-clock time in `elapsed_ms`.
pub fn cmd_height(job: &JobSpec) -> Result<Report, JobError> {
    let problem = job.problem();
    if job.regular_sequence {
        let ring = problem.parse().map_err(RunError::from)?;
        if job.mode.resolve(&ring) == Engine::Local {
            return Err(JobError::NotProjective);
        }
    }
    let start = Instant::now();
    let mut report = run_height(&problem, job.mode, job.limits())?;
    report.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    if job.regular_sequence {
        report.subject = Subject::ProjectiveVariety;
    }
    Ok(report)
}

/// `"x,y,z"` or `"x, y, z"`.
pub fn parse_vars(s: &str) -> Vec<String> {
    s.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect()
}

/// `"1,1,1,2"` or `"1,1,1,0,0,0;0,0,0,1,1,1"`: rows separated by `;`.
pub fn parse_weights(s: &str) -> Result<Vec<Vec<u64>>, JobError> {
    s.split(';')
        .map(|row| {
            row.split(',').map(|w| w.trim().parse::<u64>().map_err(|_| JobError::Input(format!("bad weight {:?}", w.trim())))).collect()
        })
        .collect()
}
