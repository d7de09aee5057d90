//! Closed-loop driver: ask, evaluate (isolating crashes and timeouts), tell,
//! until the budget or the wall clock runs out.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::{Duration, Instant};

use crate::advisor::{Advisor, AlgorithmPlan, TaskSpec};
use crate::error::{BboError, Result};
use crate::history::{History, Observation, TrialState};
use crate::space::Configuration;

/// A successful evaluation result.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Evaluation {
    pub objectives: Vec<f64>,
    pub constraints: Vec<f64>,
    pub extra: BTreeMap<String, String>,
}

impl Evaluation {
    pub fn new(objectives: Vec<f64>, constraints: Vec<f64>) -> Self {
        Evaluation {
            objectives,
            constraints,
            extra: BTreeMap::new(),
        }
    }

    pub fn with_extra(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.extra.insert(key.into(), value.into());
        self
    }
}

/// Ways an evaluation can fail without producing values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalFailure {
    /// The objective raised an error or crashed.
    Crashed(String),
    /// The objective answered, but not in the expected format.
    Protocol(String),
    /// The objective enforced its own deadline.
    Timeout,
}

/// A black-box objective. `trial_index` is the 0-based evaluation number.
pub trait Objective: Send + Sync {
    fn evaluate(&self, config: &Configuration, trial_index: usize) -> std::result::Result<Evaluation, EvalFailure>;

    /// Declared `(num_objectives, num_constraints)`, checked against the task
    /// before anything is evaluated.
    fn shape(&self) -> Option<(usize, usize)> {
        None
    }
}

impl<F> Objective for F
where
    F: Fn(&Configuration) -> std::result::Result<Evaluation, EvalFailure> + Send + Sync,
{
    fn evaluate(&self, config: &Configuration, _trial_index: usize) -> std::result::Result<Evaluation, EvalFailure> {
        self(config)
    }
}

/// Source of time stamps, in seconds.
pub trait Clock: Send + Sync {
    fn now(&self) -> f64;
}

/// Real monotonic time since construction.
#[derive(Debug, Clone, Copy)]
pub struct SystemClock {
    origin: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock { origin: Instant::now() }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }
}

/// Advances by a fixed step on every reading. Makes recorded elapsed times,
/// and hence exported histories, reproducible.
#[derive(Debug)]
pub struct TickClock {
    step: f64,
    ticks: AtomicU64,
}

impl TickClock {
    pub fn new(step: f64) -> Self {
        TickClock {
            step,
            ticks: AtomicU64::new(0),
        }
    }
}

impl Clock for TickClock {
    fn now(&self) -> f64 {
        self.ticks.fetch_add(1, Ordering::SeqCst) as f64 * self.step
    }
}

/// Evaluates `config` and encodes every outcome as an observation: panics,
/// errors and non-finite or mis-shaped results become FAILED, an exceeded
/// `timeout` becomes TIMEOUT. The objective keeps running in the background
/// after a timeout; its result is discarded.
pub fn evaluate_safe(
    objective: &Arc<dyn Objective>,
    config: &Configuration,
    trial_index: usize,
    shape: (usize, usize),
    timeout: Option<Duration>,
    clock: &dyn Clock,
) -> Observation {
    let start = clock.now();
    let outcome = match timeout {
        None => guarded(objective.as_ref(), config, trial_index),
        Some(limit) => {
            let (tx, rx) = mpsc::channel();
            let worker = Arc::clone(objective);
            let c = config.clone();
            let spawned = thread::Builder::new()
                .name(format!("trial-{trial_index}"))
                .spawn(move || {
                    let _ = tx.send(guarded(worker.as_ref(), &c, trial_index));
                });
            match spawned {
                Err(e) => Err(EvalFailure::Crashed(format!("could not start evaluation thread: {e}"))),
                Ok(_) => match rx.recv_timeout(limit) {
                    Ok(r) => r,
                    Err(mpsc::RecvTimeoutError::Timeout) => Err(EvalFailure::Timeout),
                    Err(mpsc::RecvTimeoutError::Disconnected) => {
                        Err(EvalFailure::Crashed("evaluation thread vanished".into()))
                    }
                },
            }
        }
    };
    let elapsed = (clock.now() - start).max(0.0);
    to_observation(config.clone(), outcome, shape).with_elapsed(elapsed)
}

fn guarded(objective: &dyn Objective, config: &Configuration, trial_index: usize) -> std::result::Result<Evaluation, EvalFailure> {
    match panic::catch_unwind(AssertUnwindSafe(|| objective.evaluate(config, trial_index))) {
        Ok(r) => r,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            Err(EvalFailure::Crashed(msg))
        }
    }
}

fn failure(config: Configuration, state: TrialState, kind: &str, message: &str) -> Observation {
    let mut obs = Observation::failed(config, state).with_extra("failure", kind);
    if !message.is_empty() {
        obs = obs.with_extra("message", message);
    }
    obs
}

fn to_observation(
    config: Configuration,
    outcome: std::result::Result<Evaluation, EvalFailure>,
    (m, p): (usize, usize),
) -> Observation {
    match outcome {
        Err(EvalFailure::Timeout) => failure(config, TrialState::Timeout, "timeout", ""),
        Err(EvalFailure::Crashed(msg)) => failure(config, TrialState::Failed, "crashed", &msg),
        Err(EvalFailure::Protocol(msg)) => failure(config, TrialState::Failed, "protocol", &msg),
        Ok(eval) => {
            if eval.objectives.len() != m || eval.constraints.len() != p {
                let msg = format!(
                    "expected {m} objectives and {p} constraints, got {} and {}",
                    eval.objectives.len(),
                    eval.constraints.len()
                );
                return failure(config, TrialState::Failed, "protocol", &msg);
            }
            if eval.objectives.iter().chain(&eval.constraints).any(|v| !v.is_finite()) {
                return failure(config, TrialState::Failed, "non_finite", "objective returned a non-finite value");
            }
            let mut obs = Observation::success(config, eval.objectives, eval.constraints);
            for (k, v) in eval.extra {
                obs = obs.with_extra(k, v);
            }
            obs
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxRuns,
    WallClock,
    Exhausted,
    UserAbort,
}

#[derive(Clone)]
pub struct RunOptions {
    /// Seconds; checked between batches.
    pub wall_clock_limit: Option<f64>,
    /// Evaluations per batch, run concurrently.
    pub parallelism: usize,
    /// Per-evaluation deadline.
    pub timeout: Option<Duration>,
    pub clock: Arc<dyn Clock>,
    /// Set to stop after the current batch.
    pub abort: Option<Arc<AtomicBool>>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            wall_clock_limit: None,
            parallelism: 1,
            timeout: None,
            clock: Arc::new(SystemClock::default()),
            abort: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptResult {
    pub history: History,
    pub plan: AlgorithmPlan,
    /// Best feasible observation (single-objective tasks).
    pub incumbent: Option<Observation>,
    /// Feasible non-dominated observations (multi-objective tasks).
    pub pareto_front: Vec<Observation>,
    pub total_elapsed: f64,
    pub stop_reason: StopReason,
}

/// Runs `objective` on `task` until one of the stop conditions holds.
/// Each round asks for `min(parallelism, remaining budget)` suggestions,
/// evaluates them concurrently and tells the results in suggestion order.
pub fn run<O: Objective + 'static>(task: TaskSpec, objective: O, options: &RunOptions) -> Result<OptResult> {
    run_shared(task, Arc::new(objective), options)
}

/// As [`run`], for an objective that is already shared.
pub fn run_shared(task: TaskSpec, objective: Arc<dyn Objective>, options: &RunOptions) -> Result<OptResult> {
    if options.parallelism == 0 {
        return Err(BboError::Setup("parallelism must be at least 1".into()));
    }
    if options.timeout.is_some_and(|t| t.is_zero()) {
        return Err(BboError::Setup("timeout must be positive".into()));
    }
    let shape = (task.num_objectives, task.num_constraints);
    if let Some(declared) = objective.shape() {
        if declared != shape {
            return Err(BboError::Setup(format!(
                "objective produces {} objectives and {} constraints, task expects {} and {}",
                declared.0, declared.1, shape.0, shape.1
            )));
        }
    }
    let max_runs = task.max_runs;
    let mut advisor = Advisor::new(task)?;
    let clock = options.clock.as_ref();
    let start = clock.now();

    let stop_reason = loop {
        let told = advisor.history().len();
        if told >= max_runs {
            break StopReason::MaxRuns;
        }
        if options.abort.as_ref().is_some_and(|a| a.load(Ordering::SeqCst)) {
            break StopReason::UserAbort;
        }
        if options.wall_clock_limit.is_some_and(|limit| clock.now() - start >= limit) {
            break StopReason::WallClock;
        }
        let q = options.parallelism.min(max_runs - told);
        let batch = match if q == 1 { advisor.ask().map(|c| vec![c]) } else { advisor.ask_batch(q) } {
            Ok(b) => b,
            Err(BboError::ExhaustedSpace) => break StopReason::Exhausted,
            Err(e) => return Err(e),
        };
        let observations: Vec<Observation> = if batch.len() == 1 {
            vec![evaluate_safe(&objective, &batch[0], told, shape, options.timeout, clock)]
        } else {
            thread::scope(|s| {
                let handles: Vec<_> = batch
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let objective = &objective;
                        s.spawn(move || evaluate_safe(objective, c, told + i, shape, options.timeout, clock))
                    })
                    .collect();
                handles
                    .into_iter()
                    .zip(&batch)
                    .map(|(h, c)| {
                        h.join().unwrap_or_else(|_| {
                            failure(c.clone(), TrialState::Failed, "crashed", "evaluation thread panicked")
                        })
                    })
                    .collect()
            })
        };
        for obs in observations {
            advisor.tell(obs)?;
        }
    };

    let history = advisor.get_history();
    let (incumbent, pareto_front) = if history.num_objectives() == 1 {
        (history.incumbent()?.cloned(), Vec::new())
    } else {
        (None, history.pareto_front()?.into_iter().cloned().collect())
    };
    Ok(OptResult {
        plan: *advisor.plan(),
        history,
        incumbent,
        pareto_front,
        total_elapsed: (clock.now() - start).max(0.0),
        stop_reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acquisition::MaximizerOptions;
    use crate::advisor::{AdvisorOptions, Algorithm};
    use crate::space::{Parameter, SearchSpace};
    use std::sync::atomic::AtomicUsize;

    fn space() -> SearchSpace {
        SearchSpace::new(vec![
            Parameter::float("x1", -5.0, 10.0).unwrap(),
            Parameter::float("x2", 0.0, 15.0).unwrap(),
        ])
        .unwrap()
    }

    fn branin(c: &Configuration) -> std::result::Result<Evaluation, EvalFailure> {
        use std::f64::consts::PI;
        let (x1, x2) = (c.get_f64("x1").unwrap(), c.get_f64("x2").unwrap());
        let b = 5.1 / (4.0 * PI * PI);
        let v = (x2 - b * x1 * x1 + 5.0 / PI * x1 - 6.0).powi(2) + 10.0 * (1.0 - 1.0 / (8.0 * PI)) * x1.cos() + 10.0;
        Ok(Evaluation::new(vec![v], vec![]))
    }

    fn quick_task(max_runs: usize) -> TaskSpec {
        TaskSpec::new(space(), 1, 0).with_max_runs(max_runs).with_init_count(4).with_options(AdvisorOptions {
            maximizer: MaximizerOptions {
                n_candidates: 200,
                n_local_starts: 2,
                ..MaximizerOptions::default()
            },
            ..AdvisorOptions::default()
        })
    }

    fn shared<O: Objective + 'static>(o: O) -> Arc<dyn Objective> {
        Arc::new(o)
    }

    #[test]
    fn evaluate_safe_outcomes() {
        let c = Configuration::from_pairs([("x1", 0.0), ("x2", 0.0)]);
        let clock = SystemClock::default();
        let ok = shared(|_: &Configuration| Ok(Evaluation::new(vec![1.0], vec![])));
        let obs = evaluate_safe(&ok, &c, 0, (1, 0), None, &clock);
        assert_eq!((obs.trial_state, obs.objectives.clone()), (TrialState::Success, vec![1.0]));
        assert!(obs.elapsed_time >= 0.0);

        let raises = shared(|_: &Configuration| -> std::result::Result<Evaluation, EvalFailure> { panic!("boom") });
        let obs = evaluate_safe(&raises, &c, 0, (1, 0), None, &clock);
        assert_eq!(obs.trial_state, TrialState::Failed);
        assert_eq!(obs.extra.get("message").map(String::as_str), Some("boom"));
        assert!(obs.objectives.is_empty());

        let nan = shared(|_: &Configuration| Ok(Evaluation::new(vec![f64::NAN], vec![])));
        let obs = evaluate_safe(&nan, &c, 0, (1, 0), None, &clock);
        assert_eq!((obs.trial_state, obs.extra["failure"].as_str()), (TrialState::Failed, "non_finite"));

        let wrong = shared(|_: &Configuration| Ok(Evaluation::new(vec![1.0, 2.0], vec![])));
        assert_eq!(evaluate_safe(&wrong, &c, 0, (1, 0), None, &clock).extra["failure"], "protocol");

        let slow = shared(|_: &Configuration| {
            thread::sleep(Duration::from_millis(500));
            Ok(Evaluation::new(vec![1.0], vec![]))
        });
        let obs = evaluate_safe(&slow, &c, 0, (1, 0), Some(Duration::from_millis(20)), &clock);
        assert_eq!(obs.trial_state, TrialState::Timeout);
        let obs = evaluate_safe(&ok, &c, 0, (1, 0), Some(Duration::from_secs(5)), &clock);
        assert_eq!(obs.trial_state, TrialState::Success);
    }

    #[test]
    fn budget_is_exact() {
        let r = run(quick_task(10), branin, &RunOptions::default()).unwrap();
        assert_eq!((r.history.len(), r.stop_reason), (10, StopReason::MaxRuns));
        assert!(r.incumbent.is_some());

        let calls = Arc::new(AtomicUsize::new(0));
        let counter = Arc::clone(&calls);
        let counted = move |c: &Configuration| {
            counter.fetch_add(1, Ordering::SeqCst);
            branin(c)
        };
        let opts = RunOptions {
            parallelism: 4,
            ..RunOptions::default()
        };
        let r = run(quick_task(10), counted, &opts).unwrap();
        assert_eq!(r.history.len(), 10);
        assert_eq!(calls.load(Ordering::SeqCst), 10);
    }

    #[test]
    fn wall_clock_stop() {
        let slow = |c: &Configuration| {
            thread::sleep(Duration::from_millis(20));
            branin(c)
        };
        let opts = RunOptions {
            wall_clock_limit: Some(0.001),
            ..RunOptions::default()
        };
        let r = run(quick_task(50), slow, &opts).unwrap();
        assert_eq!(r.stop_reason, StopReason::WallClock);
        assert!(r.history.len() < 50);
    }

    #[test]
    fn abort_flag_stops_the_run() {
        let flag = Arc::new(AtomicBool::new(true));
        let opts = RunOptions {
            abort: Some(flag),
            ..RunOptions::default()
        };
        let r = run(quick_task(5), branin, &opts).unwrap();
        assert_eq!((r.stop_reason, r.history.len()), (StopReason::UserAbort, 0));
    }

    #[test]
    fn declared_shape_mismatch_is_a_setup_error() {
        struct TwoObjectives;
        impl Objective for TwoObjectives {
            fn evaluate(&self, _: &Configuration, _: usize) -> std::result::Result<Evaluation, EvalFailure> {
                unreachable!("never evaluated")
            }
            fn shape(&self) -> Option<(usize, usize)> {
                Some((2, 0))
            }
        }
        assert!(matches!(run(quick_task(5), TwoObjectives, &RunOptions::default()), Err(BboError::Setup(_))));
        let opts = RunOptions {
            parallelism: 0,
            ..RunOptions::default()
        };
        assert!(matches!(run(quick_task(5), branin, &opts), Err(BboError::Setup(_))));
    }

    #[test]
    fn half_failing_objective_still_finds_an_incumbent() {
        let flaky = |c: &Configuration, i: usize| {
            if i % 2 == 0 {
                Err(EvalFailure::Crashed("odd luck".into()))
            } else {
                branin(c)
            }
        };
        struct Indexed<F>(F);
        impl<F> Objective for Indexed<F>
        where
            F: Fn(&Configuration, usize) -> std::result::Result<Evaluation, EvalFailure> + Send + Sync,
        {
            fn evaluate(&self, c: &Configuration, i: usize) -> std::result::Result<Evaluation, EvalFailure> {
                (self.0)(c, i)
            }
        }
        let r = run(quick_task(12), Indexed(flaky), &RunOptions::default()).unwrap();
        assert_eq!(r.history.len(), 12);
        let failed = r.history.observations().iter().filter(|o| o.trial_state == TrialState::Failed).count();
        assert_eq!(failed, 6);
        assert!(r.incumbent.is_some());
    }

    #[test]
    fn sequential_runs_are_reproducible_and_match_manual_loop() {
        let opts = || RunOptions {
            clock: Arc::new(TickClock::new(0.5)),
            ..RunOptions::default()
        };
        let a = run(quick_task(12), branin, &opts()).unwrap();
        let b = run(quick_task(12), branin, &opts()).unwrap();
        assert_eq!(a.history, b.history);

        let mut adv = Advisor::new(quick_task(12)).unwrap();
        for _ in 0..12 {
            let c = adv.ask().unwrap();
            let e = branin(&c).unwrap();
            adv.tell(Observation::success(c, e.objectives, vec![]).with_elapsed(0.5)).unwrap();
        }
        assert_eq!(adv.get_history(), a.history);
    }

    #[test]
    fn random_algorithm_exhausts_small_space() {
        let space = SearchSpace::new(vec![Parameter::categorical("c", ["a", "b", "c"]).unwrap()]).unwrap();
        let task = TaskSpec::new(space, 1, 0).with_max_runs(10).with_algorithm(Algorithm::Random);
        let r = run(task, |_: &Configuration| Ok(Evaluation::new(vec![0.0], vec![])), &RunOptions::default()).unwrap();
        assert_eq!((r.stop_reason, r.history.len()), (StopReason::Exhausted, 3));
    }
}
