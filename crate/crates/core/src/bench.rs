//! Built-in test problems and a rank-based comparison runner.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::advisor::{Algorithm, AdvisorOptions, TaskSpec};
use crate::error::{BboError, Result};
use crate::moo;
use crate::optimizer::{run, EvalFailure, Evaluation, RunOptions, TickClock};
use crate::space::{Configuration, Parameter, SearchSpace};
use crate::stats;

/// What is known about a problem's optimum.
#[derive(Debug, Clone, PartialEq)]
pub enum KnownOptimum {
    Value(f64),
    Hypervolume { ref_point: Vec<f64>, optimal_hv: f64 },
}

#[derive(Clone)]
pub struct BenchmarkProblem {
    pub name: &'static str,
    pub space: SearchSpace,
    pub num_objectives: usize,
    pub num_constraints: usize,
    pub evaluate: fn(&Configuration) -> (Vec<f64>, Vec<f64>),
    pub known_optimum: Option<KnownOptimum>,
}

impl std::fmt::Debug for BenchmarkProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BenchmarkProblem")
            .field("name", &self.name)
            .field("num_objectives", &self.num_objectives)
            .field("num_constraints", &self.num_constraints)
            .field("known_optimum", &self.known_optimum)
            .finish()
    }
}

pub const PROBLEM_NAMES: [&str; 3] = ["constr", "branin", "ackley"];

fn x(config: &Configuration, name: &str) -> f64 {
    config.get_f64(name).unwrap_or_else(|| panic!("configuration lacks numeric '{name}'"))
}

fn box_space(bounds: &[(&str, f64, f64)]) -> SearchSpace {
    SearchSpace::new(
        bounds
            .iter()
            .map(|(n, lo, hi)| Parameter::float(*n, *lo, *hi).expect("valid bounds"))
            .collect(),
    )
    .expect("valid space")
}

/// CONSTR: minimize `(x1, (1 + x2) / x1)` subject to `6 - (x2 + 9 x1) <= 0`
/// and `1 - (9 x1 - x2) <= 0`, with `x1 ∈ [0.1, 1]`, `x2 ∈ [0, 5]`.
pub fn constr_objectives(x1: f64, x2: f64) -> ([f64; 2], [f64; 2]) {
    ([x1, (1.0 + x2) / x1], [6.0 - (x2 + 9.0 * x1), 1.0 - (9.0 * x1 - x2)])
}

pub fn constr_evaluate(config: &Configuration) -> (Vec<f64>, Vec<f64>) {
    let (f, c) = constr_objectives(x(config, "x1"), x(config, "x2"));
    (f.to_vec(), c.to_vec())
}

pub const BRANIN_MINIMUM: f64 = 0.397_887_357_729_738;

pub fn branin(x1: f64, x2: f64) -> f64 {
    use std::f64::consts::PI;
    let b = 5.1 / (4.0 * PI * PI);
    let c = 5.0 / PI;
    let t = 1.0 / (8.0 * PI);
    (x2 - b * x1 * x1 + c * x1 - 6.0).powi(2) + 10.0 * (1.0 - t) * x1.cos() + 10.0
}

pub fn branin_evaluate(config: &Configuration) -> (Vec<f64>, Vec<f64>) {
    (vec![branin(x(config, "x1"), x(config, "x2"))], vec![])
}

/// Ackley function in any dimension; minimum 0 at the origin.
pub fn ackley(xs: &[f64]) -> f64 {
    use std::f64::consts::{E, PI};
    let n = xs.len() as f64;
    let sq = xs.iter().map(|v| v * v).sum::<f64>() / n;
    let cs = xs.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
    -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
}

pub fn ackley_evaluate(config: &Configuration) -> (Vec<f64>, Vec<f64>) {
    (vec![ackley(&[x(config, "x1"), x(config, "x2")])], vec![])
}

pub fn constr_problem() -> BenchmarkProblem {
    let (ref_point, optimal_hv) = compute_constr_reference();
    BenchmarkProblem {
        name: "constr",
        space: box_space(&[("x1", 0.1, 1.0), ("x2", 0.0, 5.0)]),
        num_objectives: 2,
        num_constraints: 2,
        evaluate: constr_evaluate,
        known_optimum: Some(KnownOptimum::Hypervolume { ref_point, optimal_hv }),
    }
}

pub fn branin_problem() -> BenchmarkProblem {
    BenchmarkProblem {
        name: "branin",
        space: box_space(&[("x1", -5.0, 10.0), ("x2", 0.0, 15.0)]),
        num_objectives: 1,
        num_constraints: 0,
        evaluate: branin_evaluate,
        known_optimum: Some(KnownOptimum::Value(BRANIN_MINIMUM)),
    }
}

/// Two-dimensional Ackley on the usual `[-32.768, 32.768]` box.
pub fn ackley_problem() -> BenchmarkProblem {
    BenchmarkProblem {
        name: "ackley",
        space: box_space(&[("x1", -32.768, 32.768), ("x2", -32.768, 32.768)]),
        num_objectives: 1,
        num_constraints: 0,
        evaluate: ackley_evaluate,
        known_optimum: Some(KnownOptimum::Value(0.0)),
    }
}

pub fn problem_by_name(name: &str) -> Option<BenchmarkProblem> {
    match name {
        "constr" => Some(constr_problem()),
        "branin" => Some(branin_problem()),
        "ackley" => Some(ackley_problem()),
        _ => None,
    }
}

pub const CONSTR_REF_POINT: [f64; 2] = [10.0, 10.0];
const CONSTR_GRID: usize = 2000;

/// Non-dominated feasible objective vectors of CONSTR over an `n × n` grid
/// of the input box. Since `f2` increases with `x2` at fixed `x1`, each grid
/// column contributes at most its lowest feasible `x2`.
pub fn constr_grid_front(n: usize) -> Vec<Vec<f64>> {
    assert!(n >= 2, "grid needs at least two points per axis");
    let mut columns = Vec::new();
    for i in 0..n {
        let x1 = 0.1 + 0.9 * i as f64 / (n - 1) as f64;
        let mut best: Option<[f64; 2]> = None;
        for j in 0..n {
            let x2 = 5.0 * j as f64 / (n - 1) as f64;
            let (f, c) = constr_objectives(x1, x2);
            if c[0] <= 0.0 && c[1] <= 0.0 && best.map_or(true, |b| f[1] < b[1]) {
                best = Some(f);
            }
        }
        if let Some(f) = best {
            columns.push(f.to_vec());
        }
    }
    let fronts = moo::non_dominated_sort(&columns);
    fronts.first().map_or_else(Vec::new, |idx| idx.iter().map(|&i| columns[i].clone()).collect())
}

/// `(ref_point, optimal_hv)` for CONSTR at grid resolution `n`.
pub fn compute_constr_reference_with_grid(n: usize) -> (Vec<f64>, f64) {
    let front = constr_grid_front(n);
    (CONSTR_REF_POINT.to_vec(), moo::hypervolume(&front, &CONSTR_REF_POINT))
}

/// Reference point `(10, 10)` and the hypervolume of the feasible front
/// over a 2000 × 2000 grid; computed once per process.
pub fn compute_constr_reference() -> (Vec<f64>, f64) {
    static CACHE: OnceLock<f64> = OnceLock::new();
    let hv = *CACHE.get_or_init(|| compute_constr_reference_with_grid(CONSTR_GRID).1);
    (CONSTR_REF_POINT.to_vec(), hv)
}

/// Ranks of `scores` (lower is better), ties sharing the average of the
/// ranks they span. NaN sorts last.
pub fn average_ranks(scores: &[f64]) -> Vec<f64> {
    let key = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| key(scores[a]).total_cmp(&key(scores[b])));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && key(scores[order[j + 1]]) == key(scores[order[i]]) {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = shared;
        }
        i = j + 1;
    }
    ranks
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub problem: String,
    pub seed: u64,
    pub strategy: String,
    pub score: f64,
    pub rank: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategySummary {
    pub strategy: String,
    pub median_rank: f64,
    pub mean_rank: f64,
    /// Per problem: seeds on which this strategy had the best rank (ties
    /// count for everyone involved).
    pub wins: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub problems: Vec<String>,
    pub strategies: Vec<StrategySummary>,
    pub seeds: usize,
    pub budget: usize,
}

/// Scores and ranks for every (problem, seed, strategy) cell. Rows are
/// ordered by problem, then seed, then strategy position.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkTable {
    pub problems: Vec<String>,
    pub strategies: Vec<String>,
    pub seeds: usize,
    pub budget: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchmarkTable {
    /// Ranks `scores[p][s][k]` (problem, seed, strategy) within each
    /// (problem, seed) cell.
    pub fn from_scores(
        problems: Vec<String>,
        strategies: Vec<String>,
        budget: usize,
        scores: &[Vec<Vec<f64>>],
    ) -> Result<Self> {
        if strategies.len() < 2 {
            return Err(BboError::Config("a comparison needs at least two strategies".into()));
        }
        if scores.len() != problems.len() {
            return Err(BboError::Config("one score block per problem expected".into()));
        }
        let seeds = scores.first().map_or(0, Vec::len);
        let mut rows = Vec::new();
        for (p, block) in scores.iter().enumerate() {
            if block.len() != seeds || block.iter().any(|cell| cell.len() != strategies.len()) {
                return Err(BboError::Config("ragged score table".into()));
            }
            for (seed, cell) in block.iter().enumerate() {
                for (k, rank) in average_ranks(cell).into_iter().enumerate() {
                    rows.push(BenchRow {
                        problem: problems[p].clone(),
                        seed: seed as u64,
                        strategy: strategies[k].clone(),
                        score: cell[k],
                        rank,
                    });
                }
            }
        }
        Ok(BenchmarkTable { problems, strategies, seeds, budget, rows })
    }

    fn rank(&self, problem: usize, seed: usize, strategy: usize) -> f64 {
        let k = self.strategies.len();
        self.rows[(problem * self.seeds + seed) * k + strategy].rank
    }

    pub fn summary(&self) -> BenchSummary {
        let k = self.strategies.len();
        let strategies = (0..k)
            .map(|s| {
                let ranks: Vec<f64> = (0..self.problems.len())
                    .flat_map(|p| (0..self.seeds).map(move |seed| (p, seed)))
                    .map(|(p, seed)| self.rank(p, seed, s))
                    .collect();
                let wins = self
                    .problems
                    .iter()
                    .enumerate()
                    .map(|(p, name)| {
                        let n = (0..self.seeds)
                            .filter(|&seed| {
                                let best = (0..k).map(|o| self.rank(p, seed, o)).fold(f64::INFINITY, f64::min);
                                self.rank(p, seed, s) == best
                            })
                            .count();
                        (name.clone(), n)
                    })
                    .collect();
                StrategySummary {
                    strategy: self.strategies[s].clone(),
                    median_rank: if ranks.is_empty() { f64::NAN } else { stats::median(&ranks) },
                    mean_rank: if ranks.is_empty() { f64::NAN } else { stats::mean(&ranks) },
                    wins,
                }
            })
            .collect();
        BenchSummary {
            problems: self.problems.clone(),
            strategies,
            seeds: self.seeds,
            budget: self.budget,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("problem,seed,strategy,score,rank\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{}\n", r.problem, r.seed, r.strategy, r.score, r.rank));
        }
        out
    }

    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary()).expect("summary serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// Worker threads for independent cells; results do not depend on it.
    pub threads: usize,
    pub advisor: AdvisorOptions,
    pub init_count: Option<usize>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            advisor: AdvisorOptions::default(),
            init_count: None,
        }
    }
}

/// Final score of one run: the best feasible objective for single-objective
/// problems, the hypervolume difference to the known optimum otherwise
/// (lower is better in both cases).
pub fn run_strategy(
    problem: &BenchmarkProblem,
    strategy: Algorithm,
    seed: u64,
    budget: usize,
    options: &BenchOptions,
) -> Result<f64> {
    let mut task = TaskSpec::new(problem.space.clone(), problem.num_objectives, problem.num_constraints)
        .with_task_id(format!("{}-{strategy}-{seed}", problem.name))
        .with_max_runs(budget)
        .with_algorithm(strategy)
        .with_seed(seed)
        .with_options(options.advisor.clone());
    if let Some(n) = options.init_count {
        task = task.with_init_count(n);
    }
    if let Some(KnownOptimum::Hypervolume { ref_point, .. }) = &problem.known_optimum {
        task = task.with_ref_point(ref_point.clone());
    }
    let f = problem.evaluate;
    let objective = move |c: &Configuration| -> std::result::Result<Evaluation, EvalFailure> {
        let (objectives, constraints) = f(c);
        Ok(Evaluation::new(objectives, constraints))
    };
    let run_options = RunOptions {
        clock: std::sync::Arc::new(TickClock::new(1.0)),
        ..RunOptions::default()
    };
    let result = run(task, objective, &run_options)?;
    Ok(match &problem.known_optimum {
        Some(KnownOptimum::Hypervolume { ref_point, optimal_hv }) => {
            let points: Vec<Vec<f64>> = result.history.feasible().map(|o| o.objectives.clone()).collect();
            moo::hypervolume_difference(&points, ref_point, *optimal_hv).value
        }
        _ => result.incumbent.map_or(f64::INFINITY, |o| o.objectives[0]),
    })
}

/// Runs every strategy on every problem for seeds `0..n_seeds` and ranks
/// the final scores within each (problem, seed) cell.
pub fn run_benchmark(
    problems: &[BenchmarkProblem],
    strategies: &[Algorithm],
    n_seeds: usize,
    budget: usize,
    options: &BenchOptions,
) -> Result<BenchmarkTable> {
    if strategies.len() < 2 {
        return Err(BboError::Config("a comparison needs at least two strategies".into()));
    }
    let k = strategies.len();
    let cells = problems.len() * n_seeds * k;
    let results: Mutex<Vec<Option<Result<f64>>>> = Mutex::new(vec![None; cells]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..options.threads.clamp(1, cells.max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= cells {
                    break;
                }
                let (p, rest) = (i / (n_seeds * k), i % (n_seeds * k));
                let (seed, s) = (rest / k, rest % k);
                let score = run_strategy(&problems[p], strategies[s], seed as u64, budget, options);
                results.lock().expect("result slots")[i] = Some(score);
            });
        }
    });
    let flat: Vec<f64> = results
        .into_inner()
        .expect("result slots")
        .into_iter()
        .map(|r| r.expect("every cell ran"))
        .collect::<Result<_>>()?;
    let scores: Vec<Vec<Vec<f64>>> = flat
        .chunks(n_seeds * k)
        .map(|block| block.chunks(k).map(<[f64]>::to_vec).collect())
        .collect();
    let scores = if scores.is_empty() { vec![Vec::new(); problems.len()] } else { scores };
    BenchmarkTable::from_scores(
        problems.iter().map(|p| p.name.to_string()).collect(),
        strategies.iter().map(ToString::to_string).collect(),
        budget,
        &scores,
    )
}
