//! The ask-and-tell engine.
//!
//! An [`Advisor`] owns the history of a task, picks an algorithm for it
//! ([`auto_select`]), hands out suggestions and ingests results. Surrogates
//! are refitted lazily: a tell only marks them stale.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::acquisition::{
    constrained_ehvi, constrained_ei, estimate_lipschitz, expected_improvement, local_penalization,
    maximize_acquisition, AcquisitionContext, EhviEstimator, MaximizerOptions, PendingPoint, DEFAULT_EHVI_SAMPLES,
};
use crate::error::{BboError, Result};
use crate::evolution::{self, DeParams, Individual, Nsga2Params, Population};
use crate::history::{FailureStrategy, History, Observation};
use crate::space::{Configuration, Encoding, SearchSpace};
use crate::surrogate::{
    fit_gp_warm, fit_prf, refine_gp, GpFitOptions, GpHyperparameters, PrfOptions, SurrogateKind, SurrogateModel,
};
use crate::{rng_from_seed, stats, Rng};

/// Requested optimization algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    Auto,
    Gp,
    Prf,
    Ea,
    Random,
}

impl std::str::FromStr for Algorithm {
    type Err = BboError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Algorithm::Auto),
            "gp" => Ok(Algorithm::Gp),
            "prf" => Ok(Algorithm::Prf),
            "ea" => Ok(Algorithm::Ea),
            "random" => Ok(Algorithm::Random),
            other => Err(BboError::Config(format!(
                "unknown algorithm '{other}' (expected auto, gp, prf, ea or random)"
            ))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Auto => "auto",
            Algorithm::Gp => "gp",
            Algorithm::Prf => "prf",
            Algorithm::Ea => "ea",
            Algorithm::Random => "random",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitDesign {
    #[default]
    LatinHypercube,
    Random,
}

/// Knobs that are not part of the task definition proper.
#[derive(Debug, Clone, PartialEq)]
pub struct AdvisorOptions {
    pub maximizer: MaximizerOptions,
    pub ehvi_samples: usize,
    pub gp: GpFitOptions,
    pub prf: PrfOptions,
    pub failure_strategy: FailureStrategy,
    /// Random points used to estimate the Lipschitz constant for local
    /// penalization.
    pub lipschitz_samples: usize,
    /// Evolutionary population size; 20 for DE and 40 for NSGA-II if unset.
    pub population_size: Option<usize>,
}

impl Default for AdvisorOptions {
    fn default() -> Self {
        AdvisorOptions {
            maximizer: MaximizerOptions::default(),
            ehvi_samples: DEFAULT_EHVI_SAMPLES,
            gp: GpFitOptions::default(),
            prf: PrfOptions::default(),
            failure_strategy: FailureStrategy::default(),
            lipschitz_samples: 500,
            population_size: None,
        }
    }
}

/// Everything the advisor needs to know about a task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub task_id: String,
    pub space: SearchSpace,
    pub num_objectives: usize,
    pub num_constraints: usize,
    pub max_runs: usize,
    pub batch_size: usize,
    pub algorithm: Algorithm,
    pub init_design: InitDesign,
    /// Initial-design size; see [`TaskSpec::resolved_init_count`].
    pub init_count: Option<usize>,
    pub ref_point: Option<Vec<f64>>,
    pub seed: u64,
    pub options: AdvisorOptions,
}

impl TaskSpec {
    /// A task with default settings: 100 runs, sequential, automatic
    /// algorithm choice, Latin-hypercube initial design, seed from the space.
    pub fn new(space: SearchSpace, num_objectives: usize, num_constraints: usize) -> Self {
        let seed = space.seed();
        TaskSpec {
            task_id: "task".into(),
            space,
            num_objectives,
            num_constraints,
            max_runs: 100,
            batch_size: 1,
            algorithm: Algorithm::Auto,
            init_design: InitDesign::LatinHypercube,
            init_count: None,
            ref_point: None,
            seed,
            options: AdvisorOptions::default(),
        }
    }

    pub fn with_task_id(mut self, id: impl Into<String>) -> Self {
        self.task_id = id.into();
        self
    }

    pub fn with_max_runs(mut self, n: usize) -> Self {
        self.max_runs = n;
        self
    }

    pub fn with_batch_size(mut self, q: usize) -> Self {
        self.batch_size = q;
        self
    }

    pub fn with_algorithm(mut self, algorithm: Algorithm) -> Self {
        self.algorithm = algorithm;
        self
    }

    pub fn with_init_design(mut self, design: InitDesign) -> Self {
        self.init_design = design;
        self
    }

    pub fn with_init_count(mut self, n: usize) -> Self {
        self.init_count = Some(n);
        self
    }

    pub fn with_ref_point(mut self, r: Vec<f64>) -> Self {
        self.ref_point = Some(r);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_options(mut self, options: AdvisorOptions) -> Self {
        self.options = options;
        self
    }

    /// Explicit `init_count`, else `max(2d, 8)` capped at `max_runs / 3`
    /// (never below 1).
    pub fn resolved_init_count(&self) -> usize {
        self.init_count.unwrap_or_else(|| {
            (2 * self.space.dimension()).max(8).min(self.max_runs / 3).max(1)
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_objectives == 0 {
            return Err(BboError::Config("a task needs at least one objective".into()));
        }
        if self.batch_size == 0 {
            return Err(BboError::Config("batch_size must be at least 1".into()));
        }
        if self.init_count == Some(0) {
            return Err(BboError::Config("init_count must be at least 1".into()));
        }
        if let Some(r) = &self.ref_point {
            if r.len() != self.num_objectives || r.iter().any(|v| !v.is_finite()) {
                return Err(BboError::Config(format!(
                    "ref_point needs {} finite components",
                    self.num_objectives
                )));
            }
        }
        if self.options.ehvi_samples == 0 || self.options.maximizer.n_candidates == 0 {
            return Err(BboError::Config("sample and candidate counts must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AcquisitionKind {
    #[serde(rename = "EI")]
    Ei,
    #[serde(rename = "EIC")]
    Eic,
    #[serde(rename = "EHVI")]
    Ehvi,
    #[serde(rename = "EHVI_C")]
    EhviC,
    #[serde(rename = "none")]
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fallback {
    #[serde(rename = "DE")]
    De,
    #[serde(rename = "NSGA2")]
    Nsga2,
    #[serde(rename = "random")]
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchStrategy {
    LocalPenalization,
    ConstantLiarMedian,
}

/// The resolved algorithm for a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgorithmPlan {
    /// `None` for the evolutionary and random algorithms.
    pub surrogate: Option<SurrogateKind>,
    pub acquisition: AcquisitionKind,
    pub fallback: Fallback,
    pub batch_strategy: BatchStrategy,
}

/// Maps task characteristics to an algorithm. With `algorithm = auto` the
/// surrogate is a probabilistic random forest when the space has more than
/// ten parameters or the budget exceeds 300 runs, and a GP otherwise.
pub fn auto_select(task: &TaskSpec) -> AlgorithmPlan {
    let (m, p) = (task.num_objectives, task.num_constraints);
    let model_acquisition = match (m > 1, p > 0) {
        (false, false) => AcquisitionKind::Ei,
        (false, true) => AcquisitionKind::Eic,
        (true, false) => AcquisitionKind::Ehvi,
        (true, true) => AcquisitionKind::EhviC,
    };
    let surrogate = match task.algorithm {
        Algorithm::Auto if task.space.dimension() > 10 || task.max_runs > 300 => Some(SurrogateKind::Prf),
        Algorithm::Auto | Algorithm::Gp => Some(SurrogateKind::Gp),
        Algorithm::Prf => Some(SurrogateKind::Prf),
        Algorithm::Ea | Algorithm::Random => None,
    };
    let fallback = match task.algorithm {
        Algorithm::Ea if m == 1 => Fallback::De,
        Algorithm::Ea => Fallback::Nsga2,
        _ => Fallback::Random,
    };
    AlgorithmPlan {
        surrogate,
        acquisition: if surrogate.is_some() { model_acquisition } else { AcquisitionKind::None },
        fallback,
        batch_strategy: if surrogate == Some(SurrogateKind::Gp) && m == 1 {
            BatchStrategy::LocalPenalization
        } else {
            BatchStrategy::ConstantLiarMedian
        },
    }
}

/// Result of a tell.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TellAck {
    /// Set when the configuration was never suggested by this advisor.
    pub warning: Option<String>,
}

#[derive(Debug, Clone)]
struct Fitted {
    objectives: Vec<SurrogateModel>,
    constraints: Vec<SurrogateModel>,
}

/// Generation bookkeeping for the evolutionary algorithms.
#[derive(Debug, Clone)]
struct EaState {
    pop_size: usize,
    population: Option<Population>,
    genomes: Vec<Vec<f64>>,
    results: Vec<Option<Individual>>,
    next_slot: usize,
    issued: HashMap<Configuration, usize>,
}

impl EaState {
    fn complete(&self) -> bool {
        self.results.iter().all(|r| r.is_some())
    }
}

#[derive(Debug, Clone)]
pub struct Advisor {
    task: TaskSpec,
    plan: AlgorithmPlan,
    history: History,
    rng: Rng,
    initial: VecDeque<Configuration>,
    pending: Vec<Configuration>,
    models: Option<Fitted>,
    /// Last fitted GP hyperparameters per target (objectives, then constraints).
    warm: Vec<Option<GpHyperparameters>>,
    /// Non-liar GP fits so far per target; schedules full refits.
    gp_fits: Vec<usize>,
    ea: Option<EaState>,
}

impl Advisor {
    pub fn new(task: TaskSpec) -> Result<Self> {
        task.validate()?;
        let plan = auto_select(&task);
        let mut rng = rng_from_seed(task.seed);
        let mut history = History::new(task.task_id.clone(), task.num_objectives, task.num_constraints);
        if let Some(r) = &task.ref_point {
            history = history.with_ref_point(r.clone());
        }
        let initial: VecDeque<Configuration> = if plan.surrogate.is_some() {
            let n = task.resolved_init_count();
            match task.init_design {
                InitDesign::LatinHypercube => task.space.latin_hypercube(n, &mut rng),
                InitDesign::Random => task.space.sample_random(n, &mut rng),
            }
            .into()
        } else {
            VecDeque::new()
        };
        let ea = match plan.fallback {
            Fallback::De | Fallback::Nsga2 => {
                let n = task
                    .options
                    .population_size
                    .unwrap_or(if plan.fallback == Fallback::De { 20 } else { 40 });
                if plan.fallback == Fallback::De && n < 4 {
                    return Err(BboError::PopulationSize(format!("DE needs at least 4 individuals, got {n}")));
                }
                if plan.fallback == Fallback::Nsga2 && (n == 0 || n % 2 != 0) {
                    return Err(BboError::PopulationSize(format!("NSGA-II needs an even population, got {n}")));
                }
                let d = task.space.dimension();
                let genomes: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen()).collect()).collect();
                Some(EaState {
                    pop_size: n,
                    population: None,
                    results: vec![None; n],
                    genomes,
                    next_slot: 0,
                    issued: HashMap::new(),
                })
            }
            Fallback::Random => None,
        };
        let targets = task.num_objectives + task.num_constraints;
        Ok(Advisor {
            task,
            plan,
            history,
            rng,
            initial,
            pending: Vec::new(),
            models: None,
            warm: vec![None; targets],
            gp_fits: vec![0; targets],
            ea,
        })
    }

    pub fn task(&self) -> &TaskSpec {
        &self.task
    }

    pub fn plan(&self) -> &AlgorithmPlan {
        &self.plan
    }

    /// Suggestions handed out but not yet told, in suggestion order.
    pub fn pending(&self) -> &[Configuration] {
        &self.pending
    }

    /// An independent copy of the history.
    pub fn get_history(&self) -> History {
        self.history.clone()
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    /// Next suggestion. Never repeats a told or pending configuration;
    /// returns [`BboError::ExhaustedSpace`] once a discrete space is used up.
    pub fn ask(&mut self) -> Result<Configuration> {
        let c = self.suggest(false)?;
        self.pending.push(c.clone());
        Ok(c)
    }

    /// `q` mutually distinct suggestions. The first is a plain [`ask`];
    /// later ones account for the pending points via the plan's batch
    /// strategy. If the space runs out part-way, the shorter batch is
    /// returned.
    ///
    /// [`ask`]: Advisor::ask
    pub fn ask_batch(&mut self, q: usize) -> Result<Vec<Configuration>> {
        if q == 0 {
            return Err(BboError::Config("batch size must be at least 1".into()));
        }
        let mut out = vec![self.ask()?];
        for _ in 1..q {
            match self.suggest(true) {
                Ok(c) => {
                    self.pending.push(c.clone());
                    out.push(c);
                }
                Err(BboError::ExhaustedSpace) => break,
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    /// Records the result of a suggestion.
    pub fn tell(&mut self, obs: Observation) -> Result<TellAck> {
        self.tell_inner(obs, false)
    }

    /// Records an observation of a configuration this advisor did not
    /// suggest, without a warning.
    pub fn tell_external(&mut self, obs: Observation) -> Result<TellAck> {
        self.tell_inner(obs, true)
    }

    fn tell_inner(&mut self, obs: Observation, external: bool) -> Result<TellAck> {
        self.task.space.validate(&obs.config)?;
        let config = obs.config.clone();
        self.history.record(obs)?;
        let mut ack = TellAck::default();
        match self.pending.iter().position(|c| *c == config) {
            Some(i) => {
                self.pending.remove(i);
            }
            None if !external => {
                let msg = format!("told configuration {config} was not suggested by this advisor");
                log::warn!("{msg}");
                ack.warning = Some(msg);
            }
            None => {}
        }
        if let Some(ea) = &mut self.ea {
            if let Some(slot) = ea.issued.remove(&config) {
                let obs = self.history.observations().last().expect("just recorded");
                ea.results[slot] = Some(individual_from(ea.genomes[slot].clone(), obs, self.task.num_objectives));
            }
        }
        self.models = None;
        Ok(ack)
    }

    /// Plain (unpenalized) acquisition values of `configs` under the current
    /// models, for diagnostics. Fits the models if they are stale.
    pub fn acquisition_values(&mut self, configs: &[Configuration]) -> Result<Vec<f64>> {
        let kind = self
            .plan
            .surrogate
            .ok_or_else(|| BboError::Config("this algorithm has no acquisition function".into()))?;
        let enc = kind.encoding();
        let fitted = self.cached_models()?;
        let ctx = self.context(fitted, Vec::new())?;
        let mut rng = rng_from_seed(self.task.seed ^ (self.history.len() as u64).rotate_left(32));
        let estimator = self.estimator(&ctx, &mut rng)?;
        configs
            .iter()
            .map(|c| {
                let x = self.task.space.to_unit_vector(c, enc)?;
                Ok(base_score(self.plan.acquisition, &x, &ctx, estimator.as_ref()))
            })
            .collect()
    }

    /// Reference point used for hypervolume bookkeeping: the task's, else
    /// the componentwise worst successful objective pushed out by 10% of its
    /// magnitude (0.1 for a zero component).
    pub fn reference_point(&self) -> Option<Vec<f64>> {
        if let Some(r) = &self.task.ref_point {
            return Some(r.clone());
        }
        default_reference_point(&self.history)
    }

    fn suggest(&mut self, batch_followup: bool) -> Result<Configuration> {
        if self.plan.surrogate.is_none() {
            return match self.plan.fallback {
                Fallback::Random => self.random_unseen(),
                Fallback::De | Fallback::Nsga2 => self.ea_suggest(),
            };
        }
        while let Some(c) = self.initial.pop_front() {
            if !self.is_seen(&c) {
                return Ok(c);
            }
        }
        match self.model_suggest(batch_followup) {
            Err(BboError::InsufficientData(_)) => self.random_unseen(),
            other => other,
        }
    }

    fn is_seen(&self, c: &Configuration) -> bool {
        self.pending.contains(c) || self.history.observations().iter().any(|o| o.config == *c)
    }

    fn random_unseen(&mut self) -> Result<Configuration> {
        let seen: HashSet<&Configuration> = self
            .history
            .observations()
            .iter()
            .map(|o| &o.config)
            .chain(&self.pending)
            .collect();
        for _ in 0..1000 {
            let c = self.task.space.sample_one(&mut self.rng);
            if !seen.contains(&c) {
                return Ok(c);
            }
        }
        if let Some(all) = self.task.space.enumerate(1 << 20) {
            let rest: Vec<Configuration> = all.into_iter().filter(|c| !seen.contains(c)).collect();
            if !rest.is_empty() {
                let i = self.rng.gen_range(0..rest.len());
                return Ok(rest[i].clone());
            }
        }
        Err(BboError::ExhaustedSpace)
    }

    fn cached_models(&mut self) -> Result<Fitted> {
        if let Some(m) = &self.models {
            return Ok(m.clone());
        }
        let fitted = self.fit_models(false)?;
        self.models = Some(fitted.clone());
        Ok(fitted)
    }

    /// One surrogate per objective and per constraint. With `liars`, pending
    /// points are added with every target imputed at the median of the
    /// successful observations.
    fn fit_models(&mut self, liars: bool) -> Result<Fitted> {
        let kind = self.plan.surrogate.expect("model-based plan");
        let enc = kind.encoding();
        let mut set = self
            .history
            .training_targets(&self.task.space, enc, self.task.options.failure_strategy)?;
        if liars {
            let successes: Vec<&Observation> = self.history.successes().collect();
            let obj_median: Vec<f64> = (0..self.task.num_objectives)
                .map(|k| stats::median(&successes.iter().map(|o| o.objectives[k]).collect::<Vec<_>>()))
                .collect();
            let con_median: Vec<f64> = (0..self.task.num_constraints)
                .map(|j| stats::median(&successes.iter().map(|o| o.constraints[j]).collect::<Vec<_>>()))
                .collect();
            for c in &self.pending {
                set.x.push(self.task.space.to_unit_vector(c, enc)?);
                for (k, v) in obj_median.iter().enumerate() {
                    set.objectives[k].push(*v);
                }
                for (j, v) in con_median.iter().enumerate() {
                    set.constraints[j].push(*v);
                }
            }
        }
        let targets: Vec<Vec<f64>> = set.objectives.into_iter().chain(set.constraints).collect();
        let mut models = Vec::with_capacity(targets.len());
        for (i, y) in targets.iter().enumerate() {
            let model = match kind {
                SurrogateKind::Gp => {
                    let options = self.task.options.gp;
                    let full = options.full_refit_every <= 1 || self.gp_fits[i] % options.full_refit_every == 0;
                    let gp = match &self.warm[i] {
                        Some(prev) if liars || !full => refine_gp(&set.x, y, options, prev)
                            .or_else(|_| fit_gp_warm(&set.x, y, options, Some(prev), &mut self.rng))?,
                        prev => fit_gp_warm(&set.x, y, options, prev.as_ref(), &mut self.rng)?,
                    };
                    if !liars {
                        self.gp_fits[i] += 1;
                        self.warm[i] = Some(gp.hyperparameters().clone());
                    }
                    SurrogateModel::Gp(gp)
                }
                SurrogateKind::Prf => SurrogateModel::Prf(fit_prf(&set.x, y, self.task.options.prf, &mut self.rng)?),
            };
            models.push(model);
        }
        let constraints = models.split_off(self.task.num_objectives);
        Ok(Fitted {
            objectives: models,
            constraints,
        })
    }

    fn context(&self, fitted: Fitted, pending: Vec<Vec<f64>>) -> Result<AcquisitionContext> {
        let m = self.task.num_objectives;
        let (eta, front, reference) = if m == 1 {
            let eta = self.history.incumbent()?.map(|o| o.objectives[0]);
            (eta, Vec::new(), None)
        } else {
            let reference = self
                .reference_point()
                .ok_or_else(|| BboError::InsufficientData("no successful observation yet".into()))?;
            let front: Vec<Vec<f64>> = self
                .history
                .pareto_front()?
                .into_iter()
                .map(|o| o.objectives.clone())
                .filter(|p| p.iter().zip(&reference).all(|(a, r)| a < r))
                .collect();
            (None, front, Some(reference))
        };
        AcquisitionContext::new(fitted.objectives, fitted.constraints, eta, front, reference, pending)
    }

    fn estimator(&self, ctx: &AcquisitionContext, rng: &mut Rng) -> Result<Option<EhviEstimator>> {
        match &ctx.ref_point {
            Some(r) if ctx.num_objectives() > 1 => {
                Ok(Some(EhviEstimator::new(&ctx.front, r, self.task.options.ehvi_samples, rng)?))
            }
            _ => Ok(None),
        }
    }

    fn model_suggest(&mut self, batch_followup: bool) -> Result<Configuration> {
        let kind = self.plan.surrogate.expect("model-based plan");
        let enc = kind.encoding();
        let batching = batch_followup && !self.pending.is_empty();
        let fitted = if batching && self.plan.batch_strategy == BatchStrategy::ConstantLiarMedian {
            self.fit_models(true)?
        } else {
            self.cached_models()?
        };
        let pending_enc: Vec<Vec<f64>> = self
            .pending
            .iter()
            .map(|c| self.task.space.to_unit_vector(c, enc))
            .collect::<Result<_>>()?;
        let ctx = self.context(fitted, pending_enc)?;

        let penalty = if batching && self.plan.batch_strategy == BatchStrategy::LocalPenalization {
            let model = &ctx.objective_models[0];
            // the penalizer works on the maximization form -f
            let points: Vec<PendingPoint> = ctx
                .pending
                .iter()
                .map(|x| {
                    let (mean, variance) = model.predict(x);
                    PendingPoint {
                        x: x.clone(),
                        mean: -mean,
                        variance,
                    }
                })
                .collect();
            let lipschitz =
                estimate_lipschitz(model, &self.task.space, self.task.options.lipschitz_samples, &mut self.rng);
            let best = match ctx.eta {
                Some(e) => e,
                None => self
                    .history
                    .successes()
                    .map(|o| o.objectives[0])
                    .fold(f64::INFINITY, f64::min),
            };
            Some((points, lipschitz, -best))
        } else {
            None
        };
        let mut rng = self.rng.clone();
        let estimator = self.estimator(&ctx, &mut rng)?;
        self.rng = rng;

        let space = &self.task.space;
        let acquisition = self.plan.acquisition;
        let score = |c: &Configuration| -> f64 {
            let Ok(x) = space.to_unit_vector(c, enc) else {
                return f64::NEG_INFINITY;
            };
            let s = base_score(acquisition, &x, &ctx, estimator.as_ref());
            match &penalty {
                Some((points, l, best)) => local_penalization(s, &x, points, *l, *best),
                None => s,
            }
        };
        let told: Vec<Configuration> = self.history.observations().iter().map(|o| o.config.clone()).collect();
        let ranked = maximize_acquisition(
            &score,
            space,
            &mut self.rng,
            &self.task.options.maximizer,
            &told,
            &self.pending,
        )?;
        Ok(ranked.into_iter().next().expect("maximizer returns at least one candidate").0)
    }

    fn ea_suggest(&mut self) -> Result<Configuration> {
        let params_de = DeParams::default();
        let params_nsga = Nsga2Params::default();
        // slots answered from the history without a new evaluation; bounded
        // so a saturated discrete space cannot spin forever
        let mut reused = 0;
        loop {
            if reused > 4 * self.ea.as_ref().unwrap().pop_size {
                return self.random_unseen();
            }
            let ea = self.ea.as_mut().expect("evolutionary plan");
            if ea.next_slot == ea.pop_size {
                if !ea.complete() {
                    // generation still in flight: explore meanwhile
                    return self.random_unseen();
                }
                let results: Vec<Individual> = ea.results.iter_mut().map(|r| r.take().unwrap()).collect();
                let next = match ea.population.take() {
                    None => Population::new(results),
                    Some(pop) => match self.plan.fallback {
                        Fallback::De => evolution::de_select(&pop, results)?,
                        _ => {
                            let mut pool = pop.individuals;
                            pool.extend(results);
                            Population {
                                individuals: evolution::nsga2_survival(pool, ea.pop_size),
                                generation: pop.generation + 1,
                            }
                        }
                    },
                };
                ea.genomes = match self.plan.fallback {
                    Fallback::De => evolution::de_trials(&next, params_de, &mut self.rng)?,
                    _ => evolution::nsga2_offspring(&next, params_nsga, &mut self.rng)?,
                };
                ea.population = Some(next);
                ea.results = vec![None; ea.pop_size];
                ea.next_slot = 0;
                continue;
            }

            let slot = ea.next_slot;
            ea.next_slot += 1;
            let config = self.task.space.from_unit_vector(&ea.genomes[slot], Encoding::Index)?;
            if let Some(obs) = self.history.observations().iter().find(|o| o.config == config) {
                // already evaluated: reuse the result instead of repeating it
                let ind = individual_from(ea.genomes[slot].clone(), obs, self.task.num_objectives);
                self.ea.as_mut().unwrap().results[slot] = Some(ind);
                reused += 1;
                continue;
            }
            let config = if self.pending.contains(&config) {
                let fresh = self.random_unseen()?;
                let genome = self.task.space.to_unit_vector(&fresh, Encoding::Index)?;
                self.ea.as_mut().unwrap().genomes[slot] = genome;
                fresh
            } else {
                config
            };
            self.ea.as_mut().unwrap().issued.insert(config.clone(), slot);
            return Ok(config);
        }
    }
}

/// The acquisition value at encoded `x`, before any batch penalty.
fn base_score(kind: AcquisitionKind, x: &[f64], ctx: &AcquisitionContext, estimator: Option<&EhviEstimator>) -> f64 {
    match kind {
        AcquisitionKind::Ei => {
            let (mu, var) = ctx.objective_models[0].predict(x);
            ctx.eta.map_or(0.0, |eta| expected_improvement(mu, var, eta))
        }
        AcquisitionKind::Eic => constrained_ei(x, ctx),
        AcquisitionKind::Ehvi | AcquisitionKind::EhviC => {
            constrained_ehvi(x, ctx, estimator.expect("multi-objective plan has an estimator"))
        }
        AcquisitionKind::None => 0.0,
    }
}

fn individual_from(genome: Vec<f64>, obs: &Observation, m: usize) -> Individual {
    if obs.is_success() {
        Individual::evaluated(genome, obs.objectives.clone(), &obs.constraints)
    } else {
        Individual {
            genome,
            objectives: Some(vec![f64::INFINITY; m]),
            violation: f64::INFINITY,
        }
    }
}

/// Componentwise worst successful objective, moved outward by 10% of its
/// magnitude (by 0.1 when it is zero).
pub fn default_reference_point(history: &History) -> Option<Vec<f64>> {
    let m = history.num_objectives();
    let mut worst = vec![f64::NEG_INFINITY; m];
    let mut any = false;
    for o in history.successes() {
        any = true;
        for (w, v) in worst.iter_mut().zip(&o.objectives) {
            *w = w.max(*v);
        }
    }
    any.then(|| {
        worst
            .into_iter()
            .map(|w| if w == 0.0 { 0.1 } else { w + 0.1 * w.abs() })
            .collect()
    })
}
