//! The task file: a search space plus the task settings, in one JSON object.

use bbo_core::advisor::{Algorithm, InitDesign};
use bbo_core::{BboError, Parameter, SearchSpace, TaskSpec};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskFile {
    #[serde(default = "default_task_id")]
    pub task_id: String,
    pub parameters: Vec<Parameter>,
    #[serde(default = "one")]
    pub num_objectives: usize,
    #[serde(default)]
    pub num_constraints: usize,
    #[serde(default = "default_max_runs")]
    pub max_runs: usize,
    #[serde(default)]
    pub algorithm: Algorithm,
    #[serde(default)]
    pub init_design: InitDesign,
    #[serde(default)]
    pub init_count: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Concurrent evaluations; `batch_size` is accepted as a synonym.
    #[serde(default, alias = "batch_size")]
    pub parallelism: Option<usize>,
    /// Seconds per evaluation.
    #[serde(default)]
    pub timeout: Option<f64>,
    #[serde(default)]
    pub ref_point: Option<Vec<f64>>,
}

fn default_task_id() -> String {
    "task".into()
}

fn one() -> usize {
    1
}

fn default_max_runs() -> usize {
    100
}

impl TaskFile {
    pub fn parse(text: &str) -> Result<Self, BboError> {
        serde_json::from_str(text).map_err(|e| BboError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// The advisor task; `parallelism` becomes the batch size.
    pub fn to_spec(&self, parallelism: usize) -> Result<TaskSpec, BboError> {
        let space = SearchSpace::new(self.parameters.clone())?.with_seed(self.seed);
        let mut spec = TaskSpec::new(space, self.num_objectives, self.num_constraints)
            .with_task_id(self.task_id.clone())
            .with_max_runs(self.max_runs)
            .with_algorithm(self.algorithm)
            .with_init_design(self.init_design)
            .with_batch_size(parallelism)
            .with_seed(self.seed);
        if let Some(n) = self.init_count {
            spec = spec.with_init_count(n);
        }
        if let Some(r) = &self.ref_point {
            spec = spec.with_ref_point(r.clone());
        }
        spec.validate()?;
        Ok(spec)
    }
}
