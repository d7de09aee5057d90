//! Probabilistic random forest: bagged regression trees whose leaves keep the
//! mean and variance of their training targets.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{BboError, Result};
use crate::Rng;

/// Lower bound applied to predictive variances.
pub const MIN_VARIANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrfOptions {
    pub n_trees: usize,
    pub min_samples_leaf: usize,
    /// Fraction of features considered at each split (rounded up).
    pub feature_fraction: f64,
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
}

impl Default for PrfOptions {
    fn default() -> Self {
        PrfOptions {
            n_trees: 10,
            min_samples_leaf: 3,
            feature_fraction: 0.8,
            bootstrap: true,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { mean: f64, var: f64 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    /// `(mean, variance)` stored in the leaf reached by `x`.
    pub fn leaf(&self, x: &[f64]) -> (f64, f64) {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { mean, var } => return (*mean, *var),
                Node::Split { feature, threshold, left, right } => {
                    at = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

#[derive(Debug, Clone)]
pub struct PrfModel {
    trees: Vec<Tree>,
    dim: usize,
}

impl PrfModel {
    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Mean of per-tree leaf means; variance by the law of total variance
    /// over the trees.
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        let t = self.trees.len() as f64;
        let mut sum_mean = 0.0;
        let mut sum_second = 0.0;
        for tree in &self.trees {
            let (m, v) = tree.leaf(x);
            sum_mean += m;
            sum_second += v + m * m;
        }
        let mean = sum_mean / t;
        let var = sum_second / t - mean * mean;
        (mean, var.max(MIN_VARIANCE))
    }
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    options: &'a PrfOptions,
    n_features: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn leaf(&mut self, idx: &[usize]) -> usize {
        let n = idx.len() as f64;
        let mean = idx.iter().map(|&i| self.y[i]).sum::<f64>() / n;
        let var = idx.iter().map(|&i| (self.y[i] - mean).powi(2)).sum::<f64>() / n;
        self.nodes.push(Node::Leaf { mean, var: var.max(0.0) });
        self.nodes.len() - 1
    }

    fn grow(&mut self, idx: &mut [usize], depth: usize, rng: &mut Rng) -> usize {
        let min_leaf = self.options.min_samples_leaf.max(1);
        let first = self.y[idx[0]];
        let pure = idx.iter().all(|&i| self.y[i] == first);
        let depth_capped = self.options.max_depth.is_some_and(|m| depth >= m);
        if pure || depth_capped || idx.len() < 2 * min_leaf {
            return self.leaf(idx);
        }
        let Some((feature, threshold)) = self.best_split(idx, min_leaf, rng) else {
            return self.leaf(idx);
        };
        // partition in place: left block first
        let mut split_at = 0;
        for k in 0..idx.len() {
            if self.x[idx[k]][feature] <= threshold {
                idx.swap(k, split_at);
                split_at += 1;
            }
        }
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf { mean: 0.0, var: 0.0 });
        let (l, r) = idx.split_at_mut(split_at);
        let left = self.grow(l, depth + 1, rng);
        let right = self.grow(r, depth + 1, rng);
        self.nodes[at] = Node::Split { feature, threshold, left, right };
        at
    }

    /// Split minimizing the summed child squared error over a random feature
    /// subset; further features are only tried when the subset yields no
    /// admissible split.
    fn best_split(&self, idx: &[usize], min_leaf: usize, rng: &mut Rng) -> Option<(usize, f64)> {
        let d = self.x[0].len();
        let mut features: Vec<usize> = (0..d).collect();
        features.shuffle(rng);
        let mut best: Option<(f64, usize, f64)> = None;
        let mut order: Vec<usize> = idx.to_vec();
        for (tried, &f) in features.iter().enumerate() {
            if tried >= self.n_features && best.is_some() {
                break;
            }
            order.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
            let n = order.len();
            let total: f64 = order.iter().map(|&i| self.y[i]).sum();
            let total_sq: f64 = order.iter().map(|&i| self.y[i] * self.y[i]).sum();
            let (mut s, mut sq) = (0.0, 0.0);
            for k in 0..n - 1 {
                let yi = self.y[order[k]];
                s += yi;
                sq += yi * yi;
                let nl = k + 1;
                let nr = n - nl;
                if nl < min_leaf || nr < min_leaf {
                    continue;
                }
                let (a, b) = (self.x[order[k]][f], self.x[order[k + 1]][f]);
                if a >= b {
                    continue;
                }
                let sse_l = sq - s * s / nl as f64;
                let sse_r = (total_sq - sq) - (total - s) * (total - s) / nr as f64;
                let cost = sse_l + sse_r;
                if best.map_or(true, |(c, _, _)| cost < c) {
                    let mut threshold = 0.5 * (a + b);
                    if threshold >= b {
                        threshold = a;
                    }
                    best = Some((cost, f, threshold));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

/// Grows `options.n_trees` regression trees on bootstrap resamples.
pub fn fit_prf(x: &[Vec<f64>], y: &[f64], options: PrfOptions, rng: &mut Rng) -> Result<PrfModel> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(BboError::InsufficientData(format!("forest fitting needs at least 2 points, got {n}")));
    }
    if options.n_trees == 0 {
        return Err(BboError::Config("a forest needs at least one tree".into()));
    }
    let d = x[0].len();
    let n_features = ((d as f64 * options.feature_fraction).ceil() as usize).clamp(1, d.max(1));
    let mut trees = Vec::with_capacity(options.n_trees);
    for _ in 0..options.n_trees {
        let mut idx: Vec<usize> = if options.bootstrap {
            (0..n).map(|_| rng.gen_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        let mut builder = Builder {
            x,
            y,
            options: &options,
            n_features,
            nodes: Vec::new(),
        };
        builder.grow(&mut idx, 0, rng);
        trees.push(Tree { nodes: builder.nodes });
    }
    Ok(PrfModel { trees, dim: d })
}
