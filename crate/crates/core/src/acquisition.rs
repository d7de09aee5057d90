//! Acquisition functions and their inner maximizer.
//!
//! Scores are "larger is better". Surrogate targets follow the crate's
//! minimization convention, so improvement is measured below the incumbent.

use std::collections::{HashMap, HashSet};

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{BboError, Result};
use crate::moo::{self, Staircase2d};
use crate::space::{Configuration, Encoding, SearchSpace};
use crate::stats::{normal_cdf, normal_pdf};
use crate::surrogate::SurrogateModel;
use crate::Rng;

/// Default Monte Carlo sample count for EHVI.
pub const DEFAULT_EHVI_SAMPLES: usize = 2048;

/// Expected improvement below `eta` of a Gaussian `N(mean, variance)`.
pub fn expected_improvement(mean: f64, variance: f64, eta: f64) -> f64 {
    let sigma = variance.max(0.0).sqrt();
    if sigma <= 0.0 {
        return (eta - mean).max(0.0);
    }
    let z = (eta - mean) / sigma;
    (sigma * (z * normal_cdf(z) + normal_pdf(z))).max(0.0)
}

/// `P(c <= 0)` for `c ~ N(mean, variance)`.
pub fn probability_of_feasibility(mean: f64, variance: f64) -> f64 {
    let sigma = variance.max(0.0).sqrt();
    if sigma <= 0.0 {
        return if mean <= 0.0 { 1.0 } else { 0.0 };
    }
    normal_cdf(-mean / sigma)
}

/// Models and reference quantities an acquisition needs at one iteration.
#[derive(Debug, Clone)]
pub struct AcquisitionContext {
    pub objective_models: Vec<SurrogateModel>,
    pub constraint_models: Vec<SurrogateModel>,
    /// Best feasible objective so far (single-objective tasks).
    pub eta: Option<f64>,
    /// Current feasible Pareto front (multi-objective tasks).
    pub front: Vec<Vec<f64>>,
    pub ref_point: Option<Vec<f64>>,
    /// Encoded suggestions that have not been told yet.
    pub pending: Vec<Vec<f64>>,
}

impl AcquisitionContext {
    pub fn new(
        objective_models: Vec<SurrogateModel>,
        constraint_models: Vec<SurrogateModel>,
        eta: Option<f64>,
        front: Vec<Vec<f64>>,
        ref_point: Option<Vec<f64>>,
        pending: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if objective_models.is_empty() {
            return Err(BboError::Config("at least one objective model is required".into()));
        }
        if objective_models.len() == 1 && eta.is_some_and(|e| !e.is_finite()) {
            return Err(BboError::Config("incumbent value must be finite".into()));
        }
        if let Some(r) = &ref_point {
            if r.len() != objective_models.len() {
                return Err(BboError::Config(format!(
                    "reference point has {} components for {} objectives",
                    r.len(),
                    objective_models.len()
                )));
            }
            for p in &front {
                let inside = p.iter().zip(r).all(|(a, b)| a <= b) && p.iter().zip(r).any(|(a, b)| a < b);
                if !inside {
                    return Err(BboError::Config(format!(
                        "front point {p:?} is not strictly inside the reference point {r:?}"
                    )));
                }
            }
        }
        Ok(AcquisitionContext {
            objective_models,
            constraint_models,
            eta,
            front,
            ref_point,
            pending,
        })
    }

    pub fn num_objectives(&self) -> usize {
        self.objective_models.len()
    }

    /// `Π_j PoF_j(x)`; 1 without constraints.
    pub fn feasibility(&self, x: &[f64]) -> f64 {
        self.constraint_models
            .iter()
            .map(|m| {
                let (mu, var) = m.predict(x);
                probability_of_feasibility(mu, var)
            })
            .product()
    }

    /// Predictive means and variances of every objective at `x`.
    pub fn objective_predictions(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        self.objective_models.iter().map(|m| m.predict(x)).unzip()
    }
}

/// EI times the probability that every constraint holds. Without a feasible
/// incumbent the score is the feasibility product alone.
pub fn constrained_ei(x: &[f64], ctx: &AcquisitionContext) -> f64 {
    let pof = ctx.feasibility(x);
    match ctx.eta {
        Some(eta) => {
            let (mu, var) = ctx.objective_models[0].predict(x);
            expected_improvement(mu, var, eta) * pof
        }
        None => pof,
    }
}

/// Monte Carlo EHVI with a fixed set of standard-normal draws, so every
/// candidate scored by one estimator sees the same random numbers.
#[derive(Debug, Clone)]
pub struct EhviEstimator {
    front: Vec<Vec<f64>>,
    reference: Vec<f64>,
    draws: Vec<Vec<f64>>,
    min_draw: Vec<f64>,
    staircase: Option<Staircase2d>,
}

impl EhviEstimator {
    pub fn new(front: &[Vec<f64>], reference: &[f64], samples: usize, rng: &mut Rng) -> Result<Self> {
        let m = reference.len();
        if m < 2 {
            return Err(BboError::WrongTaskType("EHVI needs at least two objectives".into()));
        }
        if samples == 0 {
            return Err(BboError::Config("EHVI needs at least one sample".into()));
        }
        let draws: Vec<Vec<f64>> = (0..samples)
            .map(|_| (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let min_draw = (0..m)
            .map(|k| draws.iter().map(|d| d[k]).fold(f64::INFINITY, f64::min))
            .collect();
        let front: Vec<Vec<f64>> = front.to_vec();
        let staircase = (m == 2).then(|| Staircase2d::new(&front, reference));
        Ok(EhviEstimator {
            front,
            reference: reference.to_vec(),
            draws,
            min_draw,
            staircase,
        })
    }

    /// Expected hypervolume improvement of `N(means, diag(variances))`.
    pub fn estimate(&self, means: &[f64], variances: &[f64]) -> f64 {
        let sds: Vec<f64> = variances.iter().map(|v| v.max(0.0).sqrt()).collect();
        // Every sample lies above the most optimistic draw; if a front point
        // weakly dominates that corner, no sample can improve.
        let corner: Vec<f64> = means
            .iter()
            .zip(&sds)
            .zip(&self.min_draw)
            .map(|((mu, s), z)| mu + s * z)
            .collect();
        if self.front.iter().any(|p| moo::weakly_dominates(p, &corner)) {
            return 0.0;
        }
        let mut total = 0.0;
        let mut y = vec![0.0; means.len()];
        for z in &self.draws {
            for k in 0..y.len() {
                y[k] = (means[k] + sds[k] * z[k]).min(self.reference[k]);
            }
            total += self.improvement(&y);
        }
        total / self.draws.len() as f64
    }

    fn improvement(&self, y: &[f64]) -> f64 {
        if let Some(stairs) = &self.staircase {
            return stairs.improvement(y[0], y[1]);
        }
        if self.front.iter().any(|p| moo::weakly_dominates(p, y)) {
            return 0.0;
        }
        let box_volume: f64 = y.iter().zip(&self.reference).map(|(a, r)| r - a).product();
        let clipped: Vec<Vec<f64>> = self
            .front
            .iter()
            .map(|p| p.iter().zip(y).map(|(a, b)| a.max(*b)).collect())
            .collect();
        (box_volume - moo::hypervolume(&clipped, &self.reference)).max(0.0)
    }
}

/// Monte Carlo expected hypervolume improvement at `x`.
pub fn ehvi(x: &[f64], ctx: &AcquisitionContext, mc_samples: usize, rng: &mut Rng) -> Result<f64> {
    let reference = ctx
        .ref_point
        .as_ref()
        .ok_or_else(|| BboError::Config("EHVI needs a reference point".into()))?;
    let estimator = EhviEstimator::new(&ctx.front, reference, mc_samples, rng)?;
    let (means, vars) = ctx.objective_predictions(x);
    Ok(estimator.estimate(&means, &vars))
}

/// EHVI weighted by the feasibility product; feasibility alone while no
/// feasible point exists.
pub fn constrained_ehvi(x: &[f64], ctx: &AcquisitionContext, estimator: &EhviEstimator) -> f64 {
    let pof = ctx.feasibility(x);
    if !ctx.constraint_models.is_empty() && ctx.front.is_empty() {
        return pof;
    }
    if pof == 0.0 {
        return 0.0;
    }
    let (means, vars) = ctx.objective_predictions(x);
    estimator.estimate(&means, &vars) * pof
}

/// A pending batch point as seen by the local penalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct PendingPoint {
    pub x: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

/// Multiplies a nonnegative acquisition value by one soft exclusion factor
/// per pending point:
/// `phi_j = erfc(-z_j) / 2`, `z_j = (L |x - x_j| - M + mu_j) / sqrt(2 s_j^2)`.
///
/// `best` (M) and the pending means are in maximization form; callers that
/// minimize pass negated values.
pub fn local_penalization(score: f64, x: &[f64], pending: &[PendingPoint], lipschitz: f64, best: f64) -> f64 {
    let mut out = score;
    for p in pending {
        out *= penalizer(x, p, lipschitz, best);
    }
    out
}

fn penalizer(x: &[f64], p: &PendingPoint, lipschitz: f64, best: f64) -> f64 {
    let dist = x.iter().zip(&p.x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let denom = (2.0 * p.variance.max(1e-12)).sqrt();
    let z = (lipschitz * dist - best + p.mean) / denom;
    (0.5 * libm::erfc(-z)).clamp(f64::MIN_POSITIVE, 1.0)
}

/// Largest finite-difference gradient norm of the model mean over `n` random
/// points of the space, floored at 1e-3.
pub fn estimate_lipschitz(model: &SurrogateModel, space: &SearchSpace, n: usize, rng: &mut Rng) -> f64 {
    let enc = model.encoding();
    let h = 1e-4;
    let mut best: f64 = 0.0;
    for c in space.sample_random(n, rng) {
        let Ok(x) = space.to_unit_vector(&c, enc) else { continue };
        let mut sq = 0.0;
        let mut probe = x.clone();
        for k in 0..x.len() {
            probe[k] = x[k] + h;
            let up = model.predict(&probe).0;
            probe[k] = x[k] - h;
            let down = model.predict(&probe).0;
            probe[k] = x[k];
            let g = (up - down) / (2.0 * h);
            sq += g * g;
        }
        best = best.max(sq.sqrt());
    }
    best.max(1e-3)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximizerOptions {
    pub n_candidates: usize,
    pub n_local_starts: usize,
    pub max_local_steps: usize,
    /// Initial continuous step, in unit-cube coordinates.
    pub initial_step: f64,
    /// Number of step halvings before a local search gives up.
    pub max_halvings: usize,
}

impl Default for MaximizerOptions {
    fn default() -> Self {
        MaximizerOptions {
            n_candidates: 5000,
            n_local_starts: 10,
            max_local_steps: 50,
            initial_step: 0.05,
            max_halvings: 6,
        }
    }
}

/// Scored candidates in insertion order with O(1) lookup.
struct Pool {
    entries: Vec<(Configuration, f64)>,
    index: HashMap<Configuration, usize>,
}

impl Pool {
    fn score(&mut self, config: Configuration, score_fn: &dyn Fn(&Configuration) -> f64) -> f64 {
        if let Some(&i) = self.index.get(&config) {
            return self.entries[i].1;
        }
        let mut s = score_fn(&config);
        if s.is_nan() {
            s = f64::NEG_INFINITY;
        }
        self.index.insert(config.clone(), self.entries.len());
        self.entries.push((config, s));
        s
    }
}

/// Maximizes `score_fn` over the space: random candidates (or the full
/// enumeration of a small discrete space) plus neighbourhoods of the told and
/// pending configurations, refined by coordinate-wise local search from the
/// best few. Returns unseen configurations by descending score.
pub fn maximize_acquisition(
    score_fn: &dyn Fn(&Configuration) -> f64,
    space: &SearchSpace,
    rng: &mut Rng,
    options: &MaximizerOptions,
    told: &[Configuration],
    pending: &[Configuration],
) -> Result<Vec<(Configuration, f64)>> {
    if options.n_candidates == 0 {
        return Err(BboError::Config("n_candidates must be at least 1".into()));
    }
    let excluded: HashSet<&Configuration> = told.iter().chain(pending).collect();
    let mut pool = Pool {
        entries: Vec::new(),
        index: HashMap::new(),
    };

    if let Some(all) = space.enumerate(options.n_candidates) {
        for c in all {
            if !excluded.contains(&c) {
                pool.score(c, score_fn);
            }
        }
        if pool.entries.is_empty() {
            return Err(BboError::ExhaustedSpace);
        }
        return Ok(ranked(pool));
    }

    let mut candidates = space.sample_random(options.n_candidates, rng);
    for seen in told.iter().chain(pending) {
        if let Ok(u) = space.to_unit_vector(seen, Encoding::Index) {
            for n in space.neighbors_unit(&u, options.initial_step) {
                if let Ok(c) = space.from_unit_vector(&n, Encoding::Index) {
                    candidates.push(c);
                }
            }
        }
    }
    for c in candidates {
        if !excluded.contains(&c) {
            pool.score(c, score_fn);
        }
    }

    let starts: Vec<(Configuration, f64)> = ranked_refs(&pool)
        .into_iter()
        .take(options.n_local_starts)
        .map(|i| pool.entries[i].clone())
        .collect();
    let has_continuous = space.parameters().iter().any(|p| p.is_continuous());
    for (start, start_score) in starts {
        let mut current = start;
        let mut current_score = start_score;
        let mut step = options.initial_step;
        let mut halvings = 0;
        for _ in 0..options.max_local_steps {
            let u = space.to_unit_vector(&current, Encoding::Index)?;
            let mut best: Option<(Configuration, f64)> = None;
            for n in space.neighbors_unit(&u, step) {
                let c = space.from_unit_vector(&n, Encoding::Index)?;
                if excluded.contains(&c) {
                    continue;
                }
                let s = pool.score(c.clone(), score_fn);
                if s > current_score && best.as_ref().map_or(true, |(_, b)| s > *b) {
                    best = Some((c, s));
                }
            }
            match best {
                Some((c, s)) => {
                    current = c;
                    current_score = s;
                }
                None if has_continuous && halvings < options.max_halvings => {
                    step *= 0.5;
                    halvings += 1;
                }
                None => break,
            }
        }
    }

    if pool.entries.is_empty() {
        return Err(BboError::ExhaustedSpace);
    }
    Ok(ranked(pool))
}

fn ranked_refs(pool: &Pool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pool.entries.len()).collect();
    // stable: ties keep insertion order
    order.sort_by(|&a, &b| pool.entries[b].1.total_cmp(&pool.entries[a].1));
    order
}

fn ranked(pool: Pool) -> Vec<(Configuration, f64)> {
    let order = ranked_refs(&pool);
    let mut slots: Vec<Option<(Configuration, f64)>> = pool.entries.into_iter().map(Some).collect();
    order.into_iter().map(|i| slots[i].take().unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_from_seed;
    use crate::space::Parameter;
    use crate::surrogate::{GpHyperparameters, GpModel, TargetScaling};

    #[test]
    fn ei_examples() {
        assert_eq!(expected_improvement(1.0, 0.0, 1.0), 0.0);
        assert!((expected_improvement(0.0, 1.0, 0.0) - 0.398_942_280_401_432_7).abs() < 1e-12);
        assert!((expected_improvement(0.0, 1e-18, 10.0) - 10.0).abs() < 1e-6);
    }

    #[test]
    fn ei_monotonicity() {
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let mean = -3.0 + i as f64 * 0.06;
            let ei = expected_improvement(mean, 0.5, 0.0);
            assert!(ei < prev);
            prev = ei;
        }
        let mut prev = 0.0;
        for i in 1..100 {
            let ei = expected_improvement(-0.5, (i as f64 * 0.05).powi(2), 0.0);
            assert!(ei > prev);
            prev = ei;
        }
    }

    #[test]
    fn pof_examples() {
        assert_eq!(probability_of_feasibility(0.0, 1.0), 0.5);
        assert!((probability_of_feasibility(-3.0, 1.0) - 0.998_650_101_968_37).abs() < 1e-9);
        assert_eq!(probability_of_feasibility(-1.0, 0.0), 1.0);
        assert_eq!(probability_of_feasibility(1.0, 0.0), 0.0);
    }

    /// A GP whose posterior at any point far from its single datum is its prior.
    fn flat_model(mean: f64, variance: f64) -> SurrogateModel {
        let hyper = GpHyperparameters::new(vec![1e-3], variance, 1e-8);
        let scaling = TargetScaling { mean, std: 1.0 };
        SurrogateModel::Gp(GpModel::new(vec![vec![-100.0]], &[mean], hyper, scaling).unwrap())
    }

    #[test]
    fn constrained_ei_limits() {
        let x = [0.5];
        let obj = flat_model(0.0, 1.0);
        let plain = expected_improvement(0.0, 1.0, 0.5);

        let ctx = AcquisitionContext::new(vec![obj.clone()], vec![flat_model(-10.0, 1.0)], Some(0.5), vec![], None, vec![]).unwrap();
        let ratio = constrained_ei(&x, &ctx) / plain;
        assert!((0.999..=1.0).contains(&ratio), "{ratio}");

        let ctx = AcquisitionContext::new(vec![obj.clone()], vec![flat_model(10.0, 1.0)], Some(0.5), vec![], None, vec![]).unwrap();
        assert!(constrained_ei(&x, &ctx) <= 1e-12 * plain);

        let ctx = AcquisitionContext::new(vec![obj.clone()], vec![], Some(0.5), vec![], None, vec![]).unwrap();
        assert_eq!(constrained_ei(&x, &ctx), plain);

        // EI = 0.4 with PoF 0.5 each
        let pofs = vec![flat_model(0.0, 1.0), flat_model(0.0, 1.0)];
        let ctx = AcquisitionContext::new(vec![obj.clone()], pofs, Some(0.5), vec![], None, vec![]).unwrap();
        assert!((constrained_ei(&x, &ctx) - plain * 0.25).abs() < 1e-15);
        assert!(constrained_ei(&x, &ctx) <= plain);

        let ctx = AcquisitionContext::new(vec![obj], vec![flat_model(0.0, 1.0)], None, vec![], None, vec![]).unwrap();
        assert_eq!(constrained_ei(&x, &ctx), 0.5);
    }

    #[test]
    fn context_rejects_bad_reference() {
        let models = vec![flat_model(0.0, 1.0), flat_model(0.0, 1.0)];
        let err = AcquisitionContext::new(models, vec![], None, vec![vec![3.0, 0.0]], Some(vec![2.0, 2.0]), vec![]);
        assert!(matches!(err, Err(BboError::Config(_))));
    }

    #[test]
    fn ehvi_limits() {
        let mut rng = rng_from_seed(0);
        let reference = vec![2.0, 2.0];
        let front = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        // dominated mean, zero variance
        let models = vec![flat_model(1.5, 0.0), flat_model(1.5, 0.0)];
        let ctx = AcquisitionContext::new(models, vec![], None, front.clone(), Some(reference.clone()), vec![]).unwrap();
        assert_eq!(ehvi(&[0.5], &ctx, 64, &mut rng).unwrap(), 0.0);

        // empty front, degenerate predictive
        let models = vec![flat_model(0.5, 0.0), flat_model(1.0, 0.0)];
        let ctx = AcquisitionContext::new(models, vec![], None, vec![], Some(reference.clone()), vec![]).unwrap();
        assert!((ehvi(&[0.5], &ctx, 16, &mut rng).unwrap() - 1.5).abs() < 1e-12);

        // zero variance equals deterministic improvement
        let models = vec![flat_model(0.5, 0.0), flat_model(0.5, 0.0)];
        let ctx = AcquisitionContext::new(models, vec![], None, front.clone(), Some(reference.clone()), vec![]).unwrap();
        let mut with = front.clone();
        with.push(vec![0.5, 0.5]);
        let exact = moo::hypervolume(&with, &reference) - moo::hypervolume(&front, &reference);
        assert!((ehvi(&[0.5], &ctx, 16, &mut rng).unwrap() - exact).abs() < 1e-12);

        let no_ref = AcquisitionContext::new(vec![flat_model(0.0, 1.0), flat_model(0.0, 1.0)], vec![], None, vec![], None, vec![]).unwrap();
        assert!(matches!(ehvi(&[0.5], &no_ref, 16, &mut rng), Err(BboError::Config(_))));
    }

    #[test]
    fn ehvi_three_objectives_zero_variance() {
        let mut rng = rng_from_seed(1);
        let reference = vec![1.0, 1.0, 1.0];
        let front = vec![vec![0.2, 0.6, 0.5], vec![0.7, 0.1, 0.4]];
        let est = EhviEstimator::new(&front, &reference, 8, &mut rng).unwrap();
        let y = [0.4, 0.4, 0.3];
        let mut with = front.clone();
        with.push(y.to_vec());
        let exact = moo::hypervolume(&with, &reference) - moo::hypervolume(&front, &reference);
        assert!((est.estimate(&y, &[0.0; 3]) - exact).abs() < 1e-12);
    }

    #[test]
    fn penalizer_examples() {
        let p = PendingPoint { x: vec![0.3, 0.3], mean: 1.0, variance: 0.2 };
        assert_eq!(local_penalization(2.0, &[0.3, 0.3], std::slice::from_ref(&p), 5.0, 1.0), 1.0);
        let far = local_penalization(2.0, &[1e6, 1e6], std::slice::from_ref(&p), 5.0, 1.0);
        assert!((far - 2.0).abs() < 1e-6);
        assert_eq!(local_penalization(2.0, &[0.5, 0.5], &[], 5.0, 1.0), 2.0);
        let mut rng = rng_from_seed(2);
        for _ in 0..1000 {
            let x = [rng.gen::<f64>(), rng.gen::<f64>()];
            let pen = local_penalization(1.0, &x, std::slice::from_ref(&p), rng.gen_range(0.1..10.0), rng.gen_range(-2.0..2.0));
            assert!(pen > 0.0 && pen <= 1.0);
        }
    }

    #[test]
    fn maximizer_finds_quadratic_peak() {
        let space = SearchSpace::new(vec![
            Parameter::float("a", 0.0, 1.0).unwrap(),
            Parameter::float("b", -3.0, 5.0).unwrap(),
        ])
        .unwrap();
        let sp = space.clone();
        let score = move |c: &Configuration| {
            let u = sp.to_unit_vector(c, Encoding::Index).unwrap();
            -u.iter().map(|v| (v - 0.5) * (v - 0.5)).sum::<f64>()
        };
        let mut rng = rng_from_seed(3);
        let out = maximize_acquisition(&score, &space, &mut rng, &MaximizerOptions::default(), &[], &[]).unwrap();
        let top = space.to_unit_vector(&out[0].0, Encoding::Index).unwrap();
        assert!(top.iter().all(|v| (v - 0.5).abs() <= 0.05), "{top:?}");
        assert!(out.windows(2).all(|w| w[0].1 >= w[1].1));
    }

    #[test]
    fn maximizer_excludes_seen_and_detects_exhaustion() {
        let space = SearchSpace::new(vec![
            Parameter::categorical("a", ["x", "y"]).unwrap(),
            Parameter::categorical("b", ["u", "v"]).unwrap(),
        ])
        .unwrap();
        let all = space.enumerate(10).unwrap();
        let mut rng = rng_from_seed(4);
        let out = maximize_acquisition(&|_| 1.0, &space, &mut rng, &MaximizerOptions::default(), &all[..3], &[]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, all[3]);
        let err = maximize_acquisition(&|_| 1.0, &space, &mut rng, &MaximizerOptions::default(), &all[..3], &all[3..]);
        assert!(matches!(err, Err(BboError::ExhaustedSpace)));
    }

    #[test]
    fn maximizer_constant_score_returns_unseen() {
        let space = SearchSpace::new(vec![
            Parameter::int("k", 0, 3).unwrap(),
            Parameter::float("x", 0.0, 1.0).unwrap(),
        ])
        .unwrap();
        let mut rng = rng_from_seed(5);
        let told = space.sample_random(20, &mut rng);
        let opts = MaximizerOptions { n_candidates: 200, ..MaximizerOptions::default() };
        let out = maximize_acquisition(&|_| 0.0, &space, &mut rng, &opts, &told, &[]).unwrap();
        assert!(!out.is_empty());
        for (c, _) in &out {
            space.validate(c).unwrap();
            assert!(!told.contains(c));
        }
    }
}
