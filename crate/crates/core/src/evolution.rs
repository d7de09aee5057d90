//! Differential evolution (rand/1/bin) and NSGA-II on unit-cube genomes.
//!
//! Each algorithm is split into a proposal half and a selection half so the
//! advisor can hand proposals out through ask/tell; the `*_step` functions
//! join the halves around a synchronous `evaluate` callback.

use std::cmp::Ordering;

use rand::Rng as _;

use crate::error::{BboError, Result};
use crate::moo;
use crate::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Vec<f64>,
    /// `None` until evaluated.
    pub objectives: Option<Vec<f64>>,
    /// `Σ max(c_i, 0)`; zero iff feasible.
    pub violation: f64,
}

impl Individual {
    pub fn new(genome: Vec<f64>) -> Self {
        Individual {
            genome,
            objectives: None,
            violation: 0.0,
        }
    }

    pub fn evaluated(genome: Vec<f64>, objectives: Vec<f64>, constraints: &[f64]) -> Self {
        Individual {
            genome,
            objectives: Some(objectives),
            violation: total_violation(constraints),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.violation <= 0.0
    }

    fn objectives(&self) -> &[f64] {
        self.objectives.as_deref().expect("individual has been evaluated")
    }
}

pub fn total_violation(constraints: &[f64]) -> f64 {
    constraints.iter().map(|c| c.max(0.0)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub individuals: Vec<Individual>,
    pub generation: usize,
}

impl Population {
    pub fn new(individuals: Vec<Individual>) -> Self {
        Population {
            individuals,
            generation: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    fn check_evaluated(&self) -> Result<()> {
        if self.individuals.iter().any(|i| i.objectives.is_none()) {
            return Err(BboError::Config("every individual must be evaluated".into()));
        }
        Ok(())
    }

    /// Lowest objective among feasible individuals, else among all.
    pub fn best_objective(&self) -> Option<f64> {
        let pick = |feasible_only: bool| {
            self.individuals
                .iter()
                .filter(|i| !feasible_only || i.is_feasible())
                .filter_map(|i| i.objectives.as_ref().map(|o| o[0]))
                .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
        };
        pick(true).or_else(|| pick(false))
    }
}

/// Deb's feasibility rules for a single objective: `a` is at least as good as `b`.
fn de_not_worse(a: &Individual, b: &Individual) -> bool {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.violation <= b.violation,
        (true, true) => a.objectives()[0] <= b.objectives()[0],
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeParams {
    pub scale: f64,
    pub crossover: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        DeParams {
            scale: 0.5,
            crossover: 0.9,
        }
    }
}

/// DE/rand/1/bin trial vectors, one per population member, clamped to [0, 1].
pub fn de_trials(pop: &Population, params: DeParams, rng: &mut Rng) -> Result<Vec<Vec<f64>>> {
    let n = pop.len();
    if n < 4 {
        return Err(BboError::PopulationSize(format!(
            "differential evolution needs at least 4 individuals, got {n}"
        )));
    }
    if !(params.scale > 0.0 || params.scale == 0.0) || params.scale > 2.0 || !(0.0..=1.0).contains(&params.crossover) {
        return Err(BboError::Config("DE needs F in [0, 2] and CR in [0, 1]".into()));
    }
    let mut trials = Vec::with_capacity(n);
    for i in 0..n {
        let mut pick = |taken: &[usize]| loop {
            let r = rng.gen_range(0..n);
            if r != i && !taken.contains(&r) {
                return r;
            }
        };
        let r1 = pick(&[]);
        let r2 = pick(&[r1]);
        let r3 = pick(&[r1, r2]);
        let (a, b, c) = (
            &pop.individuals[r1].genome,
            &pop.individuals[r2].genome,
            &pop.individuals[r3].genome,
        );
        let target = &pop.individuals[i].genome;
        let d = target.len();
        let j_rand = rng.gen_range(0..d);
        let trial: Vec<f64> = (0..d)
            .map(|j| {
                if j == j_rand || rng.gen::<f64>() < params.crossover {
                    (a[j] + params.scale * (b[j] - c[j])).clamp(0.0, 1.0)
                } else {
                    target[j]
                }
            })
            .collect();
        trials.push(trial);
    }
    Ok(trials)
}

/// Greedy one-to-one replacement: each trial replaces its target when it is
/// not worse under the feasibility rules.
pub fn de_select(pop: &Population, trials: Vec<Individual>) -> Result<Population> {
    pop.check_evaluated()?;
    if trials.len() != pop.len() || trials.iter().any(|t| t.objectives.is_none()) {
        return Err(BboError::Config("need one evaluated trial per individual".into()));
    }
    let individuals = pop
        .individuals
        .iter()
        .zip(trials)
        .map(|(target, trial)| if de_not_worse(&trial, target) { trial } else { target.clone() })
        .collect();
    Ok(Population {
        individuals,
        generation: pop.generation + 1,
    })
}

/// One DE generation.
pub fn de_step<E>(pop: &Population, params: DeParams, mut evaluate: E, rng: &mut Rng) -> Result<Population>
where
    E: FnMut(&[f64]) -> (Vec<f64>, Vec<f64>),
{
    pop.check_evaluated()?;
    let trials = de_trials(pop, params, rng)?
        .into_iter()
        .map(|g| {
            let (objs, cons) = evaluate(&g);
            Individual::evaluated(g, objs, &cons)
        })
        .collect();
    de_select(pop, trials)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nsga2Params {
    /// SBX distribution index.
    pub eta_c: f64,
    /// Polynomial-mutation distribution index.
    pub eta_m: f64,
    pub crossover_prob: f64,
}

impl Default for Nsga2Params {
    fn default() -> Self {
        Nsga2Params {
            eta_c: 15.0,
            eta_m: 20.0,
            crossover_prob: 0.9,
        }
    }
}

/// Rank (0 = best) and crowding distance under constrained domination:
/// feasible individuals are sorted into non-dominated fronts; infeasible ones
/// follow, ordered by violation.
fn rank_and_crowding(inds: &[Individual]) -> (Vec<usize>, Vec<f64>, Vec<Vec<usize>>) {
    let n = inds.len();
    let feasible: Vec<usize> = (0..n).filter(|&i| inds[i].is_feasible()).collect();
    let points: Vec<Vec<f64>> = feasible.iter().map(|&i| inds[i].objectives().to_vec()).collect();
    let mut fronts: Vec<Vec<usize>> = if points.is_empty() {
        Vec::new()
    } else {
        moo::non_dominated_sort(&points)
            .into_iter()
            .map(|f| f.into_iter().map(|k| feasible[k]).collect())
            .collect()
    };
    let mut infeasible: Vec<usize> = (0..n).filter(|&i| !inds[i].is_feasible()).collect();
    infeasible.sort_by(|&a, &b| inds[a].violation.total_cmp(&inds[b].violation).then(a.cmp(&b)));
    let mut k = 0;
    while k < infeasible.len() {
        let v = inds[infeasible[k]].violation;
        let group: Vec<usize> = infeasible[k..].iter().copied().take_while(|&i| inds[i].violation == v).collect();
        k += group.len();
        fronts.push(group);
    }

    let mut rank = vec![0; n];
    let mut crowding = vec![0.0; n];
    for (r, front) in fronts.iter().enumerate() {
        let feasible_front = inds[front[0]].is_feasible();
        let dist = if feasible_front {
            let pts: Vec<Vec<f64>> = front.iter().map(|&i| inds[i].objectives().to_vec()).collect();
            moo::crowding_distance(&pts)
        } else {
            vec![0.0; front.len()]
        };
        for (&i, d) in front.iter().zip(dist) {
            rank[i] = r;
            crowding[i] = d;
        }
    }
    (rank, crowding, fronts)
}

/// Constrained binary tournament: feasibility, then violation, then Pareto
/// dominance, then crowding distance; remaining ties are a coin flip.
fn tournament(inds: &[Individual], crowding: &[f64], a: usize, b: usize, rng: &mut Rng) -> usize {
    let (ia, ib) = (&inds[a], &inds[b]);
    match (ia.is_feasible(), ib.is_feasible()) {
        (true, false) => return a,
        (false, true) => return b,
        (false, false) => {
            match ia.violation.total_cmp(&ib.violation) {
                Ordering::Less => return a,
                Ordering::Greater => return b,
                Ordering::Equal => {}
            }
        }
        (true, true) => {
            if moo::dominates(ia.objectives(), ib.objectives()) {
                return a;
            }
            if moo::dominates(ib.objectives(), ia.objectives()) {
                return b;
            }
            match crowding[a].total_cmp(&crowding[b]) {
                Ordering::Greater => return a,
                Ordering::Less => return b,
                Ordering::Equal => {}
            }
        }
    }
    if rng.gen_bool(0.5) {
        a
    } else {
        b
    }
}

/// Bounded simulated binary crossover on [0, 1].
fn sbx(p1: &[f64], p2: &[f64], eta: f64, rng: &mut Rng) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    let (lb, ub) = (0.0, 1.0);
    for j in 0..p1.len() {
        if rng.gen::<f64>() > 0.5 || (p1[j] - p2[j]).abs() <= 1e-14 {
            continue;
        }
        let (y1, y2) = if p1[j] < p2[j] { (p1[j], p2[j]) } else { (p2[j], p1[j]) };
        let u: f64 = rng.gen();
        let spread = |beta: f64| {
            let alpha = 2.0 - beta.powf(-(eta + 1.0));
            if u <= 1.0 / alpha {
                (u * alpha).powf(1.0 / (eta + 1.0))
            } else {
                (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
            }
        };
        let bq1 = spread(1.0 + 2.0 * (y1 - lb) / (y2 - y1));
        let bq2 = spread(1.0 + 2.0 * (ub - y2) / (y2 - y1));
        let mut a = (0.5 * ((y1 + y2) - bq1 * (y2 - y1))).clamp(lb, ub);
        let mut b = (0.5 * ((y1 + y2) + bq2 * (y2 - y1))).clamp(lb, ub);
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut a, &mut b);
        }
        c1[j] = a;
        c2[j] = b;
    }
    (c1, c2)
}

/// Bounded polynomial mutation on [0, 1], each gene with probability `prob`.
fn polynomial_mutation(genome: &mut [f64], eta: f64, prob: f64, rng: &mut Rng) {
    for y in genome.iter_mut() {
        if rng.gen::<f64>() >= prob {
            continue;
        }
        let (d1, d2) = (*y, 1.0 - *y);
        let u: f64 = rng.gen();
        let pow = 1.0 / (eta + 1.0);
        let dq = if u < 0.5 {
            let v = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0);
            v.powf(pow) - 1.0
        } else {
            let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0);
            1.0 - v.powf(pow)
        };
        *y = (*y + dq).clamp(0.0, 1.0);
    }
}

/// N offspring genomes via tournament selection, SBX and polynomial mutation.
pub fn nsga2_offspring(pop: &Population, params: Nsga2Params, rng: &mut Rng) -> Result<Vec<Vec<f64>>> {
    let n = pop.len();
    if n == 0 || n % 2 != 0 {
        return Err(BboError::PopulationSize(format!("NSGA-II needs an even, non-zero population, got {n}")));
    }
    pop.check_evaluated()?;
    let (_, crowding, _) = rank_and_crowding(&pop.individuals);
    let d = pop.individuals[0].genome.len();
    let mutation_prob = 1.0 / d.max(1) as f64;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut parent = || {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            tournament(&pop.individuals, &crowding, a, b, rng)
        };
        let (pa, pb) = (parent(), parent());
        let (g1, g2) = (&pop.individuals[pa].genome, &pop.individuals[pb].genome);
        let (mut c1, mut c2) = if rng.gen::<f64>() < params.crossover_prob {
            sbx(g1, g2, params.eta_c, rng)
        } else {
            (g1.clone(), g2.clone())
        };
        polynomial_mutation(&mut c1, params.eta_m, mutation_prob, rng);
        polynomial_mutation(&mut c2, params.eta_m, mutation_prob, rng);
        out.push(c1);
        out.push(c2);
    }
    Ok(out)
}

/// Environmental selection: keep `n` of `pool` front by front, truncating the
/// last admitted front by descending crowding distance.
pub fn nsga2_survival(pool: Vec<Individual>, n: usize) -> Vec<Individual> {
    let (_, crowding, fronts) = rank_and_crowding(&pool);
    let mut keep: Vec<usize> = Vec::with_capacity(n);
    for front in fronts {
        if keep.len() + front.len() <= n {
            keep.extend(front);
        } else {
            let mut front = front;
            front.sort_by(|&a, &b| crowding[b].total_cmp(&crowding[a]).then(a.cmp(&b)));
            keep.extend(front.into_iter().take(n - keep.len()));
        }
        if keep.len() == n {
            break;
        }
    }
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().unwrap()).collect()
}

/// One NSGA-II generation over parents ∪ offspring.
pub fn nsga2_step<E>(pop: &Population, params: Nsga2Params, mut evaluate: E, rng: &mut Rng) -> Result<Population>
where
    E: FnMut(&[f64]) -> (Vec<f64>, Vec<f64>),
{
    let offspring = nsga2_offspring(pop, params, rng)?;
    let mut pool = pop.individuals.clone();
    for g in offspring {
        let (objs, cons) = evaluate(&g);
        pool.push(Individual::evaluated(g, objs, &cons));
    }
    Ok(Population {
        individuals: nsga2_survival(pool, pop.len()),
        generation: pop.generation + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_from_seed;

    fn random_population(rng: &mut Rng, n: usize, d: usize, f: &dyn Fn(&[f64]) -> (Vec<f64>, Vec<f64>)) -> Population {
        Population::new(
            (0..n)
                .map(|_| {
                    let g: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
                    let (o, c) = f(&g);
                    Individual::evaluated(g, o, &c)
                })
                .collect(),
        )
    }

    fn sphere(g: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (vec![g.iter().map(|v| (10.0 * (v - 0.5)).powi(2)).sum()], vec![])
    }

    #[test]
    fn de_rejects_small_population() {
        let mut rng = rng_from_seed(0);
        let pop = random_population(&mut rng, 3, 2, &sphere);
        assert!(matches!(de_step(&pop, DeParams::default(), sphere, &mut rng), Err(BboError::PopulationSize(_))));
    }

    #[test]
    fn de_zero_scale_zero_crossover_takes_one_gene_from_base() {
        let mut rng = rng_from_seed(1);
        let pop = random_population(&mut rng, 6, 3, &sphere);
        let params = DeParams { scale: 0.0, crossover: 0.0 };
        let trials = de_trials(&pop, params, &mut rng).unwrap();
        for (t, target) in trials.iter().zip(&pop.individuals) {
            let changed: Vec<usize> = (0..3).filter(|&j| t[j] != target.genome[j]).collect();
            assert!(changed.len() <= 1);
            for j in changed {
                assert!(pop.individuals.iter().any(|i| i.genome[j] == t[j]));
            }
        }
        let next = de_step(&pop, params, sphere, &mut rng).unwrap();
        assert!(next.best_objective().unwrap() <= pop.best_objective().unwrap());
        for (a, b) in next.individuals.iter().zip(&pop.individuals) {
            assert!(a.objectives.as_ref().unwrap()[0] <= b.objectives.as_ref().unwrap()[0]);
        }
    }

    #[test]
    fn de_best_never_worsens() {
        let mut rng = rng_from_seed(2);
        let mut pop = random_population(&mut rng, 10, 4, &sphere);
        let mut best = pop.best_objective().unwrap();
        for _ in 0..50 {
            pop = de_step(&pop, DeParams::default(), sphere, &mut rng).unwrap();
            let b = pop.best_objective().unwrap();
            assert!(b <= best);
            best = b;
        }
        assert_eq!(pop.generation, 50);
    }

    #[test]
    fn de_feasibility_rules() {
        let feasible = Individual::evaluated(vec![0.0], vec![10.0], &[-1.0]);
        let infeasible = Individual::evaluated(vec![0.0], vec![0.0], &[2.0]);
        let less_infeasible = Individual::evaluated(vec![0.0], vec![5.0], &[1.0]);
        assert!(de_not_worse(&feasible, &infeasible));
        assert!(!de_not_worse(&infeasible, &feasible));
        assert!(de_not_worse(&less_infeasible, &infeasible));
    }

    #[test]
    fn nsga2_rejects_odd_population() {
        let mut rng = rng_from_seed(3);
        let f = |g: &[f64]| (vec![g[0], 1.0 - g[0]], vec![]);
        let pop = random_population(&mut rng, 5, 2, &f);
        assert!(matches!(nsga2_step(&pop, Nsga2Params::default(), f, &mut rng), Err(BboError::PopulationSize(_))));
    }

    #[test]
    fn survival_is_elitist_when_offspring_are_dominated() {
        let parents: Vec<Individual> = (0..4)
            .map(|i| {
                let x = i as f64 / 3.0;
                Individual::evaluated(vec![x], vec![x, 1.0 - x], &[])
            })
            .collect();
        let mut pool = parents.clone();
        for i in 0..4 {
            pool.push(Individual::evaluated(vec![0.5], vec![5.0 + i as f64, 5.0], &[]));
        }
        let next = nsga2_survival(pool, 4);
        assert_eq!(next, parents);
    }

    #[test]
    fn survival_matches_hand_traced_truncation() {
        // front 0: a(0,4) b(1,2) c(2,1.5) d(4,0); front 1: e(1,5) f(3,3); front 2: g(4,4); infeasible h
        let pts = [
            (vec![0.0, 4.0], 0.0),
            (vec![3.0, 3.0], 0.0),
            (vec![1.0, 2.0], 0.0),
            (vec![4.0, 4.0], 0.0),
            (vec![2.0, 1.5], 0.0),
            (vec![1.0, 5.0], 0.0),
            (vec![4.0, 0.0], 0.0),
            (vec![0.0, 0.0], 3.0),
        ];
        let pool: Vec<Individual> = pts
            .iter()
            .enumerate()
            .map(|(i, (o, v))| Individual::evaluated(vec![i as f64 / 10.0], o.clone(), &[*v]))
            .collect();
        // N = 3 truncates front 0 {a, b, c, d}: a and d are boundary (inf);
        // b: |2-0|/4 + |1.5-4|/4 = 1.125, c: |4-1|/4 + |0-2|/4 = 1.25 -> keep c.
        let kept: Vec<Vec<f64>> = nsga2_survival(pool.clone(), 3).into_iter().map(|i| i.objectives.unwrap()).collect();
        assert_eq!(kept, vec![vec![0.0, 4.0], vec![4.0, 0.0], vec![2.0, 1.5]]);
        // N = 6 takes front 0 and front 1 whole
        let kept: Vec<Vec<f64>> = nsga2_survival(pool.clone(), 6).into_iter().map(|i| i.objectives.unwrap()).collect();
        assert_eq!(kept, vec![vec![0.0, 4.0], vec![1.0, 2.0], vec![2.0, 1.5], vec![4.0, 0.0], vec![3.0, 3.0], vec![1.0, 5.0]]);
        // the infeasible point goes last
        let kept = nsga2_survival(pool, 8);
        assert_eq!(kept[7].violation, 3.0);
    }

    #[test]
    fn operators_stay_in_unit_cube() {
        let mut rng = rng_from_seed(4);
        for _ in 0..50_000 {
            let p1: Vec<f64> = (0..2).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen() }).collect();
            let p2: Vec<f64> = (0..2).map(|_| if rng.gen_bool(0.2) { 1.0 } else { rng.gen() }).collect();
            let (mut c1, mut c2) = sbx(&p1, &p2, 15.0, &mut rng);
            polynomial_mutation(&mut c1, 20.0, 1.0, &mut rng);
            polynomial_mutation(&mut c2, 20.0, 1.0, &mut rng);
            assert!(c1.iter().chain(&c2).all(|v| (0.0..=1.0).contains(v)));
        }
        let f = |g: &[f64]| (vec![g.iter().map(|v| v * 7.0).sum::<f64>()], vec![]);
        let pop = random_population(&mut rng, 8, 3, &f);
        for _ in 0..1000 {
            for t in de_trials(&pop, DeParams { scale: 2.0, crossover: 1.0 }, &mut rng).unwrap() {
                assert!(t.iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }
    }

    #[test]
    fn nsga2_is_deterministic_and_elitist() {
        let f = |g: &[f64]| (vec![g[0], (1.0 + g[1]) / (0.1 + g[0])], vec![]);
        let run = |seed| {
            let mut rng = rng_from_seed(seed);
            let mut pop = random_population(&mut rng, 12, 2, &f);
            let mut history = vec![pop.clone()];
            for _ in 0..10 {
                pop = nsga2_step(&pop, Nsga2Params::default(), f, &mut rng).unwrap();
                history.push(pop.clone());
            }
            history
        };
        let a = run(5);
        assert_eq!(a, run(5));
        for w in a.windows(2) {
            let prev: Vec<Vec<f64>> = w[0].individuals.iter().map(|i| i.objectives.clone().unwrap()).collect();
            let next: Vec<Vec<f64>> = w[1].individuals.iter().map(|i| i.objectives.clone().unwrap()).collect();
            let prev_front: Vec<&Vec<f64>> = moo::non_dominated_sort(&prev)[0].iter().map(|&i| &prev[i]).collect();
            for p in moo::non_dominated_sort(&next)[0].iter().map(|&i| &next[i]) {
                assert!(!prev_front.iter().any(|q| moo::dominates(q, p)));
            }
        }
    }

    /// Textbook DE/rand/1/bin written independently of the module above.
    fn reference_de(seed: u64, n: usize, d: usize, gens: usize) -> f64 {
        let mut rng = rng_from_seed(seed);
        let f = |x: &[f64]| sphere(x).0[0];
        let mut xs: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen()).collect()).collect();
        let mut fx: Vec<f64> = xs.iter().map(|x| f(x)).collect();
        for _ in 0..gens {
            for i in 0..n {
                let idx: Vec<usize> = rand::seq::index::sample(&mut rng, n, 4).into_iter().filter(|&k| k != i).take(3).collect();
                let jr = rng.gen_range(0..d);
                let mut y = xs[i].clone();
                for j in 0..d {
                    if j == jr || rng.gen::<f64>() < 0.9 {
                        y[j] = (xs[idx[0]][j] + 0.5 * (xs[idx[1]][j] - xs[idx[2]][j])).clamp(0.0, 1.0);
                    }
                }
                let fy = f(&y);
                if fy <= fx[i] {
                    xs[i] = y;
                    fx[i] = fy;
                }
            }
        }
        fx.into_iter().fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn de_solves_sphere() {
        let (n, d, gens) = (20, 3, 100);
        let mut ours = Vec::new();
        let mut reference = Vec::new();
        for seed in 0..10 {
            let mut rng = rng_from_seed(100 + seed);
            let mut pop = random_population(&mut rng, n, d, &sphere);
            for _ in 0..gens {
                pop = de_step(&pop, DeParams::default(), sphere, &mut rng).unwrap();
            }
            ours.push(pop.best_objective().unwrap());
            reference.push(reference_de(200 + seed, n, d, gens));
        }
        let (ours, reference) = (crate::stats::median(&ours), crate::stats::median(&reference));
        assert!(reference <= 1e-3, "reference DE median {reference}");
        assert!(ours <= 1e-3, "median best {ours}");
    }
}
