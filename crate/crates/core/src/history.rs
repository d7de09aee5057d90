//! Evaluation records and the optimization trace.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{BboError, Result};
use crate::moo;
use crate::space::{Configuration, Encoding, SearchSpace};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TrialState {
    Success,
    Failed,
    Timeout,
}

/// Result of evaluating one configuration.
///
/// Objectives are minimized. A constraint value `<= 0` is satisfied.
/// Failed and timed-out trials carry no objective or constraint values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Observation {
    pub config: Configuration,
    pub objectives: Vec<f64>,
    pub constraints: Vec<f64>,
    pub trial_state: TrialState,
    pub elapsed_time: f64,
    #[serde(default)]
    pub extra: BTreeMap<String, String>,
}

impl Observation {
    pub fn success(config: Configuration, objectives: Vec<f64>, constraints: Vec<f64>) -> Self {
        Observation {
            config,
            objectives,
            constraints,
            trial_state: TrialState::Success,
            elapsed_time: 0.0,
            extra: BTreeMap::new(),
        }
    }

    pub fn failed(config: Configuration, state: TrialState) -> Self {
        debug_assert!(state != TrialState::Success);
        Observation {
            config,
            objectives: Vec::new(),
            constraints: Vec::new(),
            trial_state: state,
            elapsed_time: 0.0,
            extra: BTreeMap::new(),
        }
    }

    pub fn with_elapsed(mut self, seconds: f64) -> Self {
        self.elapsed_time = seconds;
        self
    }

    pub fn with_extra(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.extra.insert(key.into(), value.into());
        self
    }

    pub fn is_success(&self) -> bool {
        self.trial_state == TrialState::Success
    }

    /// Successful with every constraint satisfied.
    pub fn is_feasible(&self) -> bool {
        self.is_success() && self.constraints.iter().all(|&c| c <= 0.0)
    }

    /// Total constraint violation `Σ max(c, 0)`.
    pub fn violation(&self) -> f64 {
        self.constraints.iter().map(|c| c.max(0.0)).sum()
    }
}

/// How failed or timed-out trials enter surrogate training data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FailureStrategy {
    Drop,
    /// Worst observed objective plus one standard deviation; constraints set to +1.
    #[default]
    ImputeWorst,
}

/// Surrogate inputs and targets extracted from a history.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    /// One encoded row per used observation.
    pub x: Vec<Vec<f64>>,
    /// `objectives[k][i]`: objective `k` of row `i`.
    pub objectives: Vec<Vec<f64>>,
    /// `constraints[j][i]`: constraint `j` of row `i`.
    pub constraints: Vec<Vec<f64>>,
}

impl TrainingSet {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Append-only optimization trace of one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub(crate) task_id: String,
    pub(crate) num_objectives: usize,
    pub(crate) num_constraints: usize,
    pub(crate) ref_point: Option<Vec<f64>>,
    pub(crate) observations: Vec<Observation>,
}

impl History {
    pub fn new(task_id: impl Into<String>, num_objectives: usize, num_constraints: usize) -> Self {
        History {
            task_id: task_id.into(),
            num_objectives,
            num_constraints,
            ref_point: None,
            observations: Vec::new(),
        }
    }

    pub fn with_ref_point(mut self, ref_point: Vec<f64>) -> Self {
        self.ref_point = Some(ref_point);
        self
    }

    pub fn task_id(&self) -> &str {
        &self.task_id
    }

    pub fn num_objectives(&self) -> usize {
        self.num_objectives
    }

    pub fn num_constraints(&self) -> usize {
        self.num_constraints
    }

    pub fn ref_point(&self) -> Option<&[f64]> {
        self.ref_point.as_deref()
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn successes(&self) -> impl Iterator<Item = &Observation> {
        self.observations.iter().filter(|o| o.is_success())
    }

    pub fn feasible(&self) -> impl Iterator<Item = &Observation> {
        self.observations.iter().filter(|o| o.is_feasible())
    }

    pub(crate) fn check(&self, obs: &Observation) -> Result<()> {
        let shape_err = || BboError::ObservationShape {
            expected_objectives: self.num_objectives,
            expected_constraints: self.num_constraints,
            objectives: obs.objectives.len(),
            constraints: obs.constraints.len(),
        };
        match obs.trial_state {
            TrialState::Success => {
                if obs.objectives.len() != self.num_objectives || obs.constraints.len() != self.num_constraints {
                    return Err(shape_err());
                }
                if obs.objectives.iter().chain(&obs.constraints).any(|v| !v.is_finite()) {
                    return Err(BboError::InvalidObservation(
                        "successful trials need finite objective and constraint values".into(),
                    ));
                }
            }
            TrialState::Failed | TrialState::Timeout => {
                if !obs.objectives.is_empty() || !obs.constraints.is_empty() {
                    return Err(BboError::InvalidObservation(
                        "failed or timed-out trials carry no objective or constraint values".into(),
                    ));
                }
            }
        }
        if !(obs.elapsed_time >= 0.0) {
            return Err(BboError::InvalidObservation("elapsed_time must be >= 0".into()));
        }
        Ok(())
    }

    /// Appends an observation after checking it against the task's shape.
    pub fn record(&mut self, obs: Observation) -> Result<()> {
        self.check(&obs)?;
        self.observations.push(obs);
        Ok(())
    }

    /// Best feasible successful observation of a single-objective task; the
    /// earliest wins ties.
    pub fn incumbent(&self) -> Result<Option<&Observation>> {
        if self.num_objectives != 1 {
            return Err(BboError::WrongTaskType(format!(
                "incumbent needs a single-objective task, this one has {} objectives",
                self.num_objectives
            )));
        }
        let mut best: Option<&Observation> = None;
        for obs in self.feasible() {
            if best.map_or(true, |b| obs.objectives[0] < b.objectives[0]) {
                best = Some(obs);
            }
        }
        Ok(best)
    }

    /// Non-dominated feasible observations of a multi-objective task, in
    /// history order. Duplicate objective vectors keep only the earliest.
    pub fn pareto_front(&self) -> Result<Vec<&Observation>> {
        if self.num_objectives < 2 {
            return Err(BboError::WrongTaskType(
                "pareto_front needs at least two objectives".into(),
            ));
        }
        Ok(pareto_filter(self.feasible().collect()))
    }

    /// Encodes the history for surrogate fitting.
    pub fn training_targets(
        &self,
        space: &SearchSpace,
        encoding: Encoding,
        strategy: FailureStrategy,
    ) -> Result<TrainingSet> {
        let successes: Vec<&Observation> = self.successes().collect();
        if successes.is_empty() {
            return Err(BboError::InsufficientData(
                "no successful observations to train on".into(),
            ));
        }
        let m = self.num_objectives;
        let p = self.num_constraints;
        let imputed: Vec<f64> = (0..m)
            .map(|k| {
                let col: Vec<f64> = successes.iter().map(|o| o.objectives[k]).collect();
                let worst = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                worst + stats::sample_std(&col)
            })
            .collect();

        let mut set = TrainingSet {
            x: Vec::new(),
            objectives: vec![Vec::new(); m],
            constraints: vec![Vec::new(); p],
        };
        for obs in &self.observations {
            let (objs, cons): (&[f64], Vec<f64>) = match (obs.trial_state, strategy) {
                (TrialState::Success, _) => (&obs.objectives, obs.constraints.clone()),
                (_, FailureStrategy::Drop) => continue,
                (_, FailureStrategy::ImputeWorst) => (&imputed, vec![1.0; p]),
            };
            set.x.push(space.to_unit_vector(&obs.config, encoding)?);
            for (k, v) in objs.iter().enumerate() {
                set.objectives[k].push(*v);
            }
            for (j, v) in cons.into_iter().enumerate() {
                set.constraints[j].push(v);
            }
        }
        Ok(set)
    }
}

/// Keeps the observations whose objective vectors are not dominated by any
/// other; equal vectors collapse to the first occurrence.
pub(crate) fn pareto_filter(candidates: Vec<&Observation>) -> Vec<&Observation> {
    let mut out = Vec::new();
    for (i, a) in candidates.iter().enumerate() {
        let dominated = candidates
            .iter()
            .enumerate()
            .any(|(j, b)| moo::dominates(&b.objectives, &a.objectives) || (j < i && b.objectives == a.objectives));
        if !dominated {
            out.push(*a);
        }
    }
    out
}
