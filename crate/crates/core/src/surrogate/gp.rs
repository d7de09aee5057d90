//! Gaussian-process regression with a Matérn-5/2 ARD kernel.
//!
//! Targets are standardized before fitting; hyperparameters are point
//! estimates maximizing the log marginal likelihood, searched in log space
//! with multi-start projected L-BFGS.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng as _;

use crate::error::{BboError, Result};
use crate::Rng;

const SQRT5: f64 = 2.236_067_977_499_79;

/// Log-space box for every hyperparameter.
pub const LENGTHSCALE_BOUNDS: (f64, f64) = (1e-3, 1e3);
pub const SIGNAL_VARIANCE_BOUNDS: (f64, f64) = (1e-3, 1e3);
pub const NOISE_VARIANCE_BOUNDS: (f64, f64) = (1e-8, 1e-1);

/// Jitter ladder tried when a Cholesky factorization fails.
const JITTERS: [f64; 5] = [1e-8, 1e-7, 1e-6, 1e-5, 1e-4];

#[derive(Debug, Clone, PartialEq)]
pub struct GpHyperparameters {
    pub lengthscales: Vec<f64>,
    pub signal_variance: f64,
    pub noise_variance: f64,
}

impl GpHyperparameters {
    pub fn new(lengthscales: Vec<f64>, signal_variance: f64, noise_variance: f64) -> Self {
        GpHyperparameters {
            lengthscales,
            signal_variance,
            noise_variance,
        }
    }

    /// `[log l_1, ..., log l_d, log sf2, log sn2]`.
    pub fn to_log(&self) -> Vec<f64> {
        let mut theta: Vec<f64> = self.lengthscales.iter().map(|l| l.ln()).collect();
        theta.push(self.signal_variance.ln());
        theta.push(self.noise_variance.ln());
        theta
    }

    pub fn from_log(theta: &[f64]) -> Self {
        let d = theta.len() - 2;
        GpHyperparameters {
            lengthscales: theta[..d].iter().map(|t| t.exp()).collect(),
            signal_variance: theta[d].exp(),
            noise_variance: theta[d + 1].exp(),
        }
    }

    fn log_bounds(d: usize) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![LENGTHSCALE_BOUNDS.0.ln(); d];
        let mut hi = vec![LENGTHSCALE_BOUNDS.1.ln(); d];
        lo.push(SIGNAL_VARIANCE_BOUNDS.0.ln());
        hi.push(SIGNAL_VARIANCE_BOUNDS.1.ln());
        lo.push(NOISE_VARIANCE_BOUNDS.0.ln());
        hi.push(NOISE_VARIANCE_BOUNDS.1.ln());
        (lo, hi)
    }
}

/// Affine map between raw and standardized targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetScaling {
    pub mean: f64,
    pub std: f64,
}

impl TargetScaling {
    pub fn identity() -> Self {
        TargetScaling { mean: 0.0, std: 1.0 }
    }

    pub fn from_targets(y: &[f64]) -> Self {
        let mean = crate::stats::mean(y);
        let std = crate::stats::sample_std(y);
        TargetScaling {
            mean,
            std: if std > 1e-12 { std } else { 1.0 },
        }
    }

    fn apply(&self, y: &[f64]) -> Vec<f64> {
        y.iter().map(|v| (v - self.mean) / self.std).collect()
    }
}

/// Matérn-5/2 value for scaled distance `r`.
fn matern52(signal_variance: f64, r: f64) -> f64 {
    let s = SQRT5 * r;
    signal_variance * (1.0 + s + s * s / 3.0) * (-s).exp()
}

fn scaled_sq_dist(a: &[f64], b: &[f64], lengthscales: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(lengthscales)
        .map(|((x, y), l)| {
            let t = (x - y) / l;
            t * t
        })
        .sum()
}

fn kernel_matrix(x: &[Vec<f64>], hyper: &GpHyperparameters) -> DMatrix<f64> {
    let n = x.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = hyper.signal_variance;
        for j in 0..i {
            let r = scaled_sq_dist(&x[i], &x[j], &hyper.lengthscales).sqrt();
            let v = matern52(hyper.signal_variance, r);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Cholesky of `k + noise I`, climbing the jitter ladder on failure.
/// Returns the factor and the jitter that was needed.
fn factorize(mut k: DMatrix<f64>, noise: f64) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let n = k.nrows();
    for i in 0..n {
        k[(i, i)] += noise;
    }
    if let Some(chol) = Cholesky::new(k.clone()) {
        return Ok((chol, 0.0));
    }
    let mut added = 0.0;
    for jitter in JITTERS {
        for i in 0..n {
            k[(i, i)] += jitter - added;
        }
        added = jitter;
        if let Some(chol) = Cholesky::new(k.clone()) {
            return Ok((chol, jitter));
        }
    }
    Err(BboError::Numeric(
        "kernel matrix is not positive definite even with maximal jitter".into(),
    ))
}

/// Log marginal likelihood of (already standardized) targets `y` and its
/// gradient with respect to the log-hyperparameters
/// `[log l_1..log l_d, log sf2, log sn2]`.
pub fn gp_log_marginal_likelihood(
    x: &[Vec<f64>],
    y: &[f64],
    hyper: &GpHyperparameters,
) -> Result<(f64, Vec<f64>)> {
    let n = x.len();
    let d = hyper.lengthscales.len();
    if hyper.lengthscales.iter().chain([&hyper.signal_variance, &hyper.noise_variance]).any(|v| !(*v > 0.0)) {
        return Err(BboError::Numeric("hyperparameters must be positive".into()));
    }
    let kf = kernel_matrix(x, hyper);
    let (chol, _) = factorize(kf.clone(), hyper.noise_variance)?;
    let yv = DVector::from_column_slice(y);
    let alpha = chol.solve(&yv);
    let log_det_half: f64 = chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum();
    let value = -0.5 * yv.dot(&alpha) - log_det_half - 0.5 * n as f64 * (2.0 * PI).ln();

    // W = alpha alpha^T - K^-1; dL/dtheta = 1/2 tr(W dK/dtheta)
    let mut w = chol.inverse();
    w.neg_mut();
    w.ger(1.0, &alpha, &alpha, 1.0);

    let mut grad = vec![0.0; d + 2];
    for i in 0..n {
        for j in 0..n {
            let wij = w[(i, j)];
            if i != j {
                let r = scaled_sq_dist(&x[i], &x[j], &hyper.lengthscales).sqrt();
                let s = SQRT5 * r;
                // d k / d log l_k = sf2 * 5/3 (1 + s) e^{-s} * (dx_k / l_k)^2
                let g = hyper.signal_variance * (5.0 / 3.0) * (1.0 + s) * (-s).exp();
                for k in 0..d {
                    let t = (x[i][k] - x[j][k]) / hyper.lengthscales[k];
                    grad[k] += 0.5 * wij * g * t * t;
                }
            }
            grad[d] += 0.5 * wij * kf[(i, j)];
        }
        grad[d + 1] += 0.5 * w[(i, i)] * hyper.noise_variance;
    }
    Ok((value, grad))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpFitOptions {
    /// Random restarts in addition to the default initialisation.
    pub restarts: usize,
    pub max_iterations: usize,
    /// For repeated fits of one target (see the advisor): every n-th fit is a
    /// full multi-start fit, the others only refine the previous optimum.
    /// `1` makes every fit a full one.
    pub full_refit_every: usize,
}

impl Default for GpFitOptions {
    fn default() -> Self {
        GpFitOptions {
            restarts: 2,
            max_iterations: 60,
            full_refit_every: 5,
        }
    }
}

/// A fitted Gaussian process.
#[derive(Debug, Clone)]
pub struct GpModel {
    x: Vec<Vec<f64>>,
    hyper: GpHyperparameters,
    scaling: TargetScaling,
    chol_l: DMatrix<f64>,
    alpha: DVector<f64>,
    jitter: f64,
    log_marginal_likelihood: f64,
}

impl GpModel {
    /// Conditions a GP with fixed hyperparameters on raw targets `y`,
    /// standardizing them with `scaling`.
    pub fn new(x: Vec<Vec<f64>>, y: &[f64], hyper: GpHyperparameters, scaling: TargetScaling) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() {
            return Err(BboError::InsufficientData("GP needs matching non-empty inputs and targets".into()));
        }
        let ys = scaling.apply(y);
        let (chol, jitter) = factorize(kernel_matrix(&x, &hyper), hyper.noise_variance)?;
        let yv = DVector::from_column_slice(&ys);
        let alpha = chol.solve(&yv);
        let log_det_half: f64 = chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum();
        let lml = -0.5 * yv.dot(&alpha) - log_det_half - 0.5 * x.len() as f64 * (2.0 * PI).ln();
        Ok(GpModel {
            x,
            hyper,
            scaling,
            chol_l: chol.unpack(),
            alpha,
            jitter,
            log_marginal_likelihood: lml,
        })
    }

    pub fn hyperparameters(&self) -> &GpHyperparameters {
        &self.hyper
    }

    pub fn scaling(&self) -> TargetScaling {
        self.scaling
    }

    /// Jitter added to the diagonal to make the factorization succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        self.log_marginal_likelihood
    }

    pub fn dim(&self) -> usize {
        self.hyper.lengthscales.len()
    }

    /// Posterior mean and variance (noise-free latent function), in raw
    /// target units.
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        let n = self.x.len();
        let mut kstar = DVector::zeros(n);
        for (i, xi) in self.x.iter().enumerate() {
            kstar[i] = matern52(
                self.hyper.signal_variance,
                scaled_sq_dist(xi, x, &self.hyper.lengthscales).sqrt(),
            );
        }
        let mean = kstar.dot(&self.alpha);
        let v = self
            .chol_l
            .solve_lower_triangular(&kstar)
            .expect("cholesky factor has a positive diagonal");
        let var = (self.hyper.signal_variance - v.norm_squared()).max(0.0);
        (
            mean * self.scaling.std + self.scaling.mean,
            var * self.scaling.std * self.scaling.std,
        )
    }
}

/// Fits a GP by maximizing the log marginal likelihood from the default
/// initialisation plus `options.restarts` random ones.
pub fn fit_gp(x: &[Vec<f64>], y: &[f64], options: GpFitOptions, rng: &mut Rng) -> Result<GpModel> {
    fit_gp_warm(x, y, options, None, rng)
}

/// As [`fit_gp`], additionally starting from `previous` (typically the
/// optimum of the last fit on a slightly smaller dataset).
pub fn fit_gp_warm(
    x: &[Vec<f64>],
    y: &[f64],
    options: GpFitOptions,
    previous: Option<&GpHyperparameters>,
    rng: &mut Rng,
) -> Result<GpModel> {
    let d = check_training_data(x, y)?;
    let mut starts = vec![GpHyperparameters::new(vec![0.5; d], 1.0, 1e-4).to_log()];
    for _ in 0..options.restarts {
        let mut theta: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05f64.ln()..5f64.ln())).collect();
        theta.push(rng.gen_range(0.2f64.ln()..5f64.ln()));
        theta.push(rng.gen_range(1e-6f64.ln()..1e-2f64.ln()));
        starts.push(theta);
    }
    if let Some(prev) = previous.filter(|h| h.lengthscales.len() == d) {
        starts.push(prev.to_log());
    }
    fit_from_starts(x, y, starts, options.max_iterations)
}

/// Refits by local optimization from `previous` only: cheap, and adequate
/// when the data changed little since `previous` was fitted.
pub fn refine_gp(x: &[Vec<f64>], y: &[f64], options: GpFitOptions, previous: &GpHyperparameters) -> Result<GpModel> {
    let d = check_training_data(x, y)?;
    if previous.lengthscales.len() != d {
        return Err(BboError::Numeric(format!(
            "previous hyperparameters have {} lengthscales, data has {d} dimensions",
            previous.lengthscales.len()
        )));
    }
    fit_from_starts(x, y, vec![previous.to_log()], options.max_iterations)
}

fn check_training_data(x: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(BboError::InsufficientData(format!("GP fitting needs at least 2 points, got {n}")));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(BboError::Numeric("GP targets must be finite".into()));
    }
    let d = x[0].len();
    if d == 0 {
        return Err(BboError::InsufficientData("GP inputs need at least one dimension".into()));
    }
    Ok(d)
}

fn fit_from_starts(x: &[Vec<f64>], y: &[f64], starts: Vec<Vec<f64>>, max_iterations: usize) -> Result<GpModel> {
    let d = x[0].len();
    let scaling = TargetScaling::from_targets(y);
    let ys = scaling.apply(y);
    let (lo, hi) = GpHyperparameters::log_bounds(d);

    let objective = |theta: &[f64]| -> Option<(f64, Vec<f64>)> {
        let (v, g) = gp_log_marginal_likelihood(x, &ys, &GpHyperparameters::from_log(theta)).ok()?;
        if !v.is_finite() || g.iter().any(|gi| !gi.is_finite()) {
            return None;
        }
        Some((-v, g.into_iter().map(|gi| -gi).collect()))
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in starts {
        if let Some((f, theta)) = minimize_box(&objective, start, &lo, &hi, max_iterations) {
            if best.as_ref().map_or(true, |(bf, _)| f < *bf) {
                best = Some((f, theta));
            }
        }
    }
    let (_, theta) = best.ok_or_else(|| {
        BboError::Numeric("log marginal likelihood could not be evaluated at any start".into())
    })?;
    GpModel::new(x.to_vec(), y, GpHyperparameters::from_log(&theta), scaling)
}

fn project(theta: &mut [f64], lo: &[f64], hi: &[f64]) {
    for ((t, l), h) in theta.iter_mut().zip(lo).zip(hi) {
        *t = t.clamp(*l, *h);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Projected L-BFGS with Armijo backtracking. Returns the best value and point.
fn minimize_box<F>(f: &F, mut theta: Vec<f64>, lo: &[f64], hi: &[f64], max_iter: usize) -> Option<(f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    const MEMORY: usize = 6;
    project(&mut theta, lo, hi);
    let (mut fx, mut g) = f(&theta)?;
    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();

    for _ in 0..max_iter {
        // projected-gradient stationarity
        let pg_norm: f64 = theta
            .iter()
            .zip(&g)
            .zip(lo.iter().zip(hi))
            .map(|((t, gi), (l, h))| {
                let moved = (t - gi).clamp(*l, *h);
                (moved - t).abs()
            })
            .fold(0.0, f64::max);
        if pg_norm < 1e-5 {
            break;
        }

        // two-loop recursion
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(s_hist.len());
        for (s, y) in s_hist.iter().zip(&y_hist).rev() {
            let rho = 1.0 / dot(y, s);
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push((a, rho));
        }
        if let (Some(s), Some(y)) = (s_hist.last(), y_hist.last()) {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|qi| *qi *= gamma);
        }
        for ((s, y), (a, rho)) in s_hist.iter().zip(&y_hist).zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        // directions pushing into an active bound are dropped
        for i in 0..dir.len() {
            if (theta[i] <= lo[i] && dir[i] < 0.0) || (theta[i] >= hi[i] && dir[i] > 0.0) {
                dir[i] = 0.0;
            }
        }
        if dot(&dir, &g) >= 0.0 {
            dir = g.iter().map(|v| -v).collect();
            s_hist.clear();
            y_hist.clear();
        }
        if s_hist.is_empty() {
            // no curvature information yet: move at most one unit in log space
            let longest = dir.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if longest > 1.0 {
                dir.iter_mut().for_each(|v| *v /= longest);
            }
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let mut cand: Vec<f64> = theta.iter().zip(&dir).map(|(t, di)| t + step * di).collect();
            project(&mut cand, lo, hi);
            let delta: Vec<f64> = cand.iter().zip(&theta).map(|(c, t)| c - t).collect();
            if delta.iter().all(|v| v.abs() < 1e-14) {
                break;
            }
            if let Some((fc, gc)) = f(&cand) {
                if fc <= fx + 1e-4 * dot(&g, &delta) {
                    accepted = Some((cand, fc, gc, delta));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((cand, fc, gc, delta)) = accepted else { break };
        let ydiff: Vec<f64> = gc.iter().zip(&g).map(|(a, b)| a - b).collect();
        if dot(&delta, &ydiff) > 1e-12 {
            s_hist.push(delta);
            y_hist.push(ydiff);
            if s_hist.len() > MEMORY {
                s_hist.remove(0);
                y_hist.remove(0);
            }
        }
        let improvement = fx - fc;
        theta = cand;
        fx = fc;
        g = gc;
        if improvement.abs() < 1e-9 * (1.0 + fx.abs()) {
            break;
        }
    }
    Some((fx, theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_from_seed;

    fn random_problem(rng: &mut Rng, n: usize, d: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen::<f64>()).collect()).collect();
        let y = x.iter().map(|r| r.iter().map(|v| (3.0 * v).sin()).sum::<f64>() + 0.1 * rng.gen::<f64>()).collect();
        (x, y)
    }

    #[test]
    fn constant_targets_predict_constant() {
        let mut rng = rng_from_seed(0);
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 / 5.0, (i * i) as f64 / 25.0]).collect();
        let y = vec![4.2; 6];
        let gp = fit_gp(&x, &y, GpFitOptions::default(), &mut rng).unwrap();
        for q in [[0.1, 0.9], [0.5, 0.5], [1.0, 0.0]] {
            assert!((gp.predict(&q).0 - 4.2).abs() <= 1e-6);
        }
    }

    #[test]
    fn interpolates_smooth_function() {
        let mut rng = rng_from_seed(1);
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 / 7.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| (6.0 * r[0]).sin()).collect();
        let gp = fit_gp(&x, &y, GpFitOptions::default(), &mut rng).unwrap();
        let worst = x.iter().zip(&y).map(|(xi, yi)| (gp.predict(xi).0 - yi).abs()).fold(0.0, f64::max);
        assert!(worst <= 0.05, "max training error {worst}");
    }

    #[test]
    fn variance_shrinks_at_data() {
        let mut rng = rng_from_seed(2);
        let x = vec![vec![0.0, 0.0], vec![0.1, 0.2], vec![0.2, 0.1]];
        let y = vec![1.0, 2.0, 1.5];
        let gp = fit_gp(&x, &y, GpFitOptions::default(), &mut rng).unwrap();
        let at_data = gp.predict(&x[0]).1;
        let far = gp.predict(&[1.0, 1.0]).1;
        assert!(at_data <= far);
        assert!(at_data >= 0.0);
    }

    #[test]
    fn too_few_points() {
        let mut rng = rng_from_seed(0);
        assert!(matches!(
            fit_gp(&[vec![0.0]], &[1.0], GpFitOptions::default(), &mut rng),
            Err(BboError::InsufficientData(_))
        ));
    }

    #[test]
    fn lml_gradient_matches_finite_differences() {
        let mut rng = rng_from_seed(3);
        for _ in 0..5 {
            let (x, y) = random_problem(&mut rng, 10, 3);
            let ys = TargetScaling::from_targets(&y).apply(&y);
            let hyper = GpHyperparameters::new(
                (0..3).map(|_| rng.gen_range(0.2..2.0)).collect(),
                rng.gen_range(0.5..2.0),
                rng.gen_range(1e-3..1e-1),
            );
            let (_, grad) = gp_log_marginal_likelihood(&x, &ys, &hyper).unwrap();
            let theta = hyper.to_log();
            for k in 0..theta.len() {
                let h = 1e-5;
                let mut up = theta.clone();
                up[k] += h;
                let mut down = theta.clone();
                down[k] -= h;
                let fu = gp_log_marginal_likelihood(&x, &ys, &GpHyperparameters::from_log(&up)).unwrap().0;
                let fd = gp_log_marginal_likelihood(&x, &ys, &GpHyperparameters::from_log(&down)).unwrap().0;
                let fdiff = (fu - fd) / (2.0 * h);
                let rel = (grad[k] - fdiff).abs() / fdiff.abs().max(1e-8);
                assert!(rel <= 1e-4 || (grad[k] - fdiff).abs() < 1e-8, "component {k}: {} vs {fdiff}", grad[k]);
            }
        }
    }

    #[test]
    fn duplicate_points_take_jitter_path() {
        let x = vec![vec![0.3], vec![0.3], vec![0.7]];
        let y = vec![0.0, 0.0, 1.0];
        let base = GpHyperparameters::new(vec![0.5], 1.0, 1e-8);
        let near = GpHyperparameters::new(vec![0.5], 1.0, 1.01e-8);
        let a = gp_log_marginal_likelihood(&x, &y, &base).unwrap().0;
        let b = gp_log_marginal_likelihood(&x, &y, &near).unwrap().0;
        assert!(a.is_finite() && b.is_finite());
        assert!((a - b).abs() < 1e-2);
    }

    #[test]
    fn lml_drops_for_bad_noise() {
        let mut rng = rng_from_seed(4);
        let (x, y) = random_problem(&mut rng, 12, 2);
        let ys = TargetScaling::from_targets(&y).apply(&y);
        let scan: Vec<(f64, f64)> = (0..=40)
            .map(|i| {
                let e = -8.0 + 0.25 * i as f64;
                let h = GpHyperparameters::new(vec![0.4, 0.4], 1.0, 10f64.powf(e));
                (e, gp_log_marginal_likelihood(&x, &ys, &h).unwrap().0)
            })
            .collect();
        let (best_e, best) = scan.iter().copied().fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        let far: Vec<&(f64, f64)> = scan.iter().filter(|(e, _)| (e - best_e).abs() >= 2.0).collect();
        assert!(!far.is_empty());
        for (e, v) in far {
            assert!(*v < best, "noise 1e{e}: {v} >= {best}");
        }
    }

    #[test]
    fn adding_data_never_increases_variance() {
        let mut rng = rng_from_seed(5);
        let hyper = GpHyperparameters::new(vec![0.3, 0.3], 1.0, 1e-6);
        let (x, y) = random_problem(&mut rng, 15, 2);
        let queries: Vec<Vec<f64>> = (0..32).map(|_| vec![rng.gen(), rng.gen()]).collect();
        let small = GpModel::new(x[..14].to_vec(), &y[..14], hyper.clone(), TargetScaling::identity()).unwrap();
        let big = GpModel::new(x.clone(), &y, hyper, TargetScaling::identity()).unwrap();
        for q in &queries {
            assert!(big.predict(q).1 <= small.predict(q).1 + 1e-9);
        }
    }

    #[test]
    fn fit_is_fast_enough() {
        let mut rng = rng_from_seed(6);
        let (x, y) = random_problem(&mut rng, 50, 10);
        let start = std::time::Instant::now();
        let gp = fit_gp(&x, &y, GpFitOptions::default(), &mut rng).unwrap();
        for _ in 0..100 {
            gp.predict(&x[0]);
        }
        assert!(start.elapsed().as_secs_f64() < 2.0);
    }
}
