//! Property tests over the public API.

use bbo_core::acquisition::{
    expected_improvement, local_penalization, probability_of_feasibility, EhviEstimator, PendingPoint,
};
use bbo_core::evolution::{de_step, nsga2_step, DeParams, Individual, Nsga2Params, Population};
use bbo_core::moo::{dominates, hypervolume, hypervolume_by_slicing, non_dominated_sort, weakly_dominates};
use bbo_core::report::{convergence_curve, export_json, extract_history_json, hv_over_time, import_json, render_html, Analyses};
use bbo_core::surrogate::{fit_prf, GpHyperparameters, GpModel, PrfOptions, TargetScaling};
use bbo_core::{
    rng_from_seed, Configuration, Encoding, History, Observation, Parameter, SearchSpace, TrialState, Value,
};
use proptest::prelude::*;
use rand::Rng as _;

fn mixed_space() -> SearchSpace {
    SearchSpace::new(vec![
        Parameter::float("lr", 1e-4, 1.0).unwrap(),
        Parameter::float_log("decay", 1e-6, 1e-1).unwrap(),
        Parameter::int("layers", 1, 8).unwrap(),
        Parameter::int_log("width", 8, 1024).unwrap(),
        Parameter::ordinal("size", vec!["s", "m", "l"]).unwrap(),
        Parameter::categorical("opt", vec!["sgd", "adam", "rmsprop"]).unwrap(),
    ])
    .unwrap()
}

fn points(m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(0.0f64..1.0, m), 1..25)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encoding_round_trips(seed in any::<u64>(), onehot in any::<bool>()) {
        let space = mixed_space();
        let enc = if onehot { Encoding::OneHot } else { Encoding::Index };
        let mut rng = rng_from_seed(seed);
        for c in space.sample_random(20, &mut rng) {
            let u = space.to_unit_vector(&c, enc).unwrap();
            prop_assert!(u.iter().all(|v| (0.0..=1.0).contains(v)));
            let back = space.from_unit_vector(&u, enc).unwrap();
            for (name, a) in c.values() {
                match (a, back.get(name).unwrap()) {
                    // real values pass through an affine or log10 map: equal up to rounding
                    (Value::Float(x), Value::Float(y)) => prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300)),
                    (a, b) => prop_assert_eq!(a, b),
                }
            }
        }
    }

    #[test]
    fn sampling_is_in_bounds_and_seeded(seed in any::<u64>()) {
        let space = mixed_space();
        let a = space.sample_random(50, &mut rng_from_seed(seed));
        let b = space.sample_random(50, &mut rng_from_seed(seed));
        prop_assert_eq!(&a, &b);
        for c in &a {
            prop_assert!(space.validate(c).is_ok());
        }
        let lhs = space.latin_hypercube(17, &mut rng_from_seed(seed));
        prop_assert_eq!(lhs.len(), 17);
        for c in &lhs {
            prop_assert!(space.validate(c).is_ok());
        }
    }

    #[test]
    fn hypervolume_invariants(pts in points(3), extra in proptest::collection::vec(0.0f64..1.0, 3), rot in 0usize..25) {
        let r = [1.0, 1.0, 1.0];
        let hv = hypervolume(&pts, &r);
        let mut shuffled = pts.clone();
        shuffled.rotate_left(rot % pts.len());
        prop_assert!((hypervolume(&shuffled, &r) - hv).abs() <= 1e-12);
        let mut more = pts.clone();
        more.push(extra.clone());
        prop_assert!(hypervolume(&more, &r) >= hv - 1e-12);
        // a point dominated by an existing one changes nothing
        let dominated: Vec<f64> = pts[0].iter().map(|v| (v + 0.01).min(1.0)).collect();
        let mut with_dominated = pts.clone();
        with_dominated.push(dominated);
        prop_assert!((hypervolume(&with_dominated, &r) - hv).abs() <= 1e-12);
    }

    #[test]
    fn two_d_paths_agree(pts in points(2)) {
        let r = [1.0, 1.0];
        prop_assert!((hypervolume(&pts, &r) - hypervolume_by_slicing(&pts, &r)).abs() <= 1e-12);
    }

    #[test]
    fn sorted_fronts_are_internally_non_dominated(pts in proptest::collection::vec(proptest::collection::vec(0u8..4, 3), 1..40)) {
        let pts: Vec<Vec<f64>> = pts.into_iter().map(|p| p.into_iter().map(f64::from).collect()).collect();
        let fronts = non_dominated_sort(&pts);
        prop_assert_eq!(fronts.iter().map(Vec::len).sum::<usize>(), pts.len());
        for (k, front) in fronts.iter().enumerate() {
            for &i in front {
                for &j in front {
                    prop_assert!(!dominates(&pts[i], &pts[j]));
                }
                // every point after the first front is dominated by the previous one
                if k > 0 {
                    prop_assert!(fronts[k - 1].iter().any(|&j| dominates(&pts[j], &pts[i])));
                }
            }
        }
    }

    #[test]
    fn ei_is_monotone(mean in -2.0f64..2.0, sd in 0.05f64..2.0, eta in -2.0f64..2.0, dm in 0.01f64..1.0, ds in 0.01f64..1.0) {
        let v = sd * sd;
        let (here, worse) = (expected_improvement(mean, v, eta), expected_improvement(mean + dm, v, eta));
        prop_assert!(worse <= here);
        // strict wherever EI has not underflowed
        if here > 1e-12 {
            prop_assert!(worse < here);
        }
        if mean < eta {
            prop_assert!(expected_improvement(mean, (sd + ds).powi(2), eta) > expected_improvement(mean, v, eta));
        }
        let p = probability_of_feasibility(mean, v);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(p * expected_improvement(mean, v, eta) <= expected_improvement(mean, v, eta));
    }

    #[test]
    fn penalization_only_shrinks(score in 0.0f64..10.0, x in proptest::collection::vec(0.0f64..1.0, 3),
                                 pend in proptest::collection::vec((proptest::collection::vec(0.0f64..1.0, 3), -2.0f64..2.0, 1e-6f64..1.0), 0..5),
                                 lipschitz in 1e-3f64..50.0, best in -2.0f64..2.0) {
        let pending: Vec<PendingPoint> = pend.into_iter().map(|(x, mean, variance)| PendingPoint { x, mean, variance }).collect();
        let penalized = local_penalization(score, &x, &pending, lipschitz, best);
        prop_assert!(penalized <= score);
        prop_assert!(penalized >= 0.0);
        for p in &pending {
            let factor = local_penalization(1.0, &x, std::slice::from_ref(p), lipschitz, best);
            prop_assert!(factor > 0.0 && factor <= 1.0);
        }
    }

    #[test]
    fn deterministic_ehvi_is_the_hv_gain(front in points(2), cand in proptest::collection::vec(0.0f64..1.2, 2), seed in any::<u64>()) {
        let r = [1.1, 1.1];
        let est = EhviEstimator::new(&front, &r, 64, &mut rng_from_seed(seed)).unwrap();
        let mut with = front.clone();
        with.push(cand.clone());
        let gain = hypervolume(&with, &r) - hypervolume(&front, &r);
        let got = est.estimate(&cand, &[0.0, 0.0]);
        prop_assert!(got >= 0.0);
        prop_assert!((got - gain).abs() <= 1e-9, "{} vs {}", got, gain);
        prop_assert!(est.estimate(&cand, &[0.05, 0.2]) >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gp_variance_never_grows_with_data(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let d = 2;
        let n = rng.gen_range(3..15);
        let x: Vec<Vec<f64>> = (0..n + 1).map(|_| (0..d).map(|_| rng.gen()).collect()).collect();
        let y: Vec<f64> = (0..n + 1).map(|_| rng.gen()).collect();
        let hyper = GpHyperparameters::new(vec![0.3, 0.5], 1.0, 1e-3);
        let small = GpModel::new(x[..n].to_vec(), &y[..n], hyper.clone(), TargetScaling::identity()).unwrap();
        let large = GpModel::new(x.clone(), &y, hyper, TargetScaling::identity()).unwrap();
        for _ in 0..32 {
            let q: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
            prop_assert!(large.predict(&q).1 <= small.predict(&q).1 + 1e-9);
        }
    }

    #[test]
    fn prf_is_deterministic_and_interpolates_single_full_trees(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let x: Vec<Vec<f64>> = (0..30).map(|_| vec![rng.gen(), rng.gen(), rng.gen()]).collect();
        let y: Vec<f64> = x.iter().map(|p| p[0] * 3.0 + p[1] - p[2] * p[2]).collect();
        let a = fit_prf(&x, &y, PrfOptions::default(), &mut rng_from_seed(seed)).unwrap();
        let b = fit_prf(&x, &y, PrfOptions::default(), &mut rng_from_seed(seed)).unwrap();
        for p in &x {
            prop_assert_eq!(a.predict(p), b.predict(p));
        }
        let single = PrfOptions { n_trees: 1, min_samples_leaf: 1, feature_fraction: 1.0, bootstrap: false, max_depth: None };
        let tree = fit_prf(&x, &y, single, &mut rng_from_seed(seed)).unwrap();
        for (p, t) in x.iter().zip(&y) {
            prop_assert!((tree.predict(p).0 - t).abs() <= 1e-12);
        }
    }

    #[test]
    fn evolution_stays_in_the_cube(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let sphere = |g: &[f64]| (vec![g.iter().map(|v| (v - 0.3).powi(2)).sum::<f64>()], vec![]);
        let init: Vec<Individual> = (0..12)
            .map(|_| {
                let g: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
                let (f, c) = sphere(&g);
                Individual::evaluated(g, f, &c)
            })
            .collect();
        let mut pop = Population::new(init);
        let mut best = pop.best_objective().unwrap();
        for _ in 0..15 {
            pop = de_step(&pop, DeParams::default(), sphere, &mut rng).unwrap();
            prop_assert!(pop.individuals.iter().all(|i| i.genome.iter().all(|v| (0.0..=1.0).contains(v))));
            let now = pop.best_objective().unwrap();
            prop_assert!(now <= best);
            best = now;
        }
        let zdt = |g: &[f64]| (vec![g[0], 1.0 - g[0].sqrt() + g[1]], vec![g[2] - 0.9]);
        let init: Vec<Individual> = (0..12)
            .map(|_| {
                let g: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
                let (f, c) = zdt(&g);
                Individual::evaluated(g, f, &c)
            })
            .collect();
        let mut pop = Population::new(init);
        for _ in 0..10 {
            pop = nsga2_step(&pop, Nsga2Params::default(), zdt, &mut rng).unwrap();
            prop_assert!(pop.individuals.iter().all(|i| i.genome.iter().all(|v| (0.0..=1.0).contains(v))));
        }
    }

    #[test]
    fn history_invariants(seed in any::<u64>(), n in 1usize..80) {
        let mut rng = rng_from_seed(seed);
        let mut single = History::new("s", 1, 1);
        let mut multi = History::new("m", 2, 1);
        for i in 0..n {
            let c = Configuration::from_pairs([("i", Value::Int(i as i64)), ("x", Value::Float(rng.gen()))]);
            if rng.gen_bool(0.15) {
                single.record(Observation::failed(c.clone(), TrialState::Failed)).unwrap();
                multi.record(Observation::failed(c, TrialState::Timeout)).unwrap();
            } else {
                let g = rng.gen_range(-1.0..0.5);
                single.record(Observation::success(c.clone(), vec![rng.gen_range(-3.0..3.0)], vec![g])).unwrap();
                multi.record(Observation::success(c, vec![rng.gen(), rng.gen()], vec![g]).with_elapsed(rng.gen())).unwrap();
            }
        }
        let curve = convergence_curve(&single).unwrap();
        prop_assert!(curve.windows(2).all(|w| w[1].1 <= w[0].1));
        let hv = hv_over_time(&multi, &[1.0, 1.0]).unwrap();
        prop_assert!(hv.windows(2).all(|w| w[1].1 >= w[0].1));

        let front = multi.pareto_front().unwrap();
        for a in &front {
            for b in &front {
                prop_assert!(!dominates(&a.objectives, &b.objectives));
            }
        }
        for o in multi.feasible() {
            prop_assert!(front.iter().any(|f| weakly_dominates(&f.objectives, &o.objectives)));
        }

        for h in [&single, &multi] {
            let text = export_json(h);
            prop_assert_eq!(&import_json(&text).unwrap(), h);
            let html = render_html(h, &Analyses::default());
            prop_assert_eq!(&import_json(&extract_history_json(&html).unwrap()).unwrap(), h);
        }
    }
}
