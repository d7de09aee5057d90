//! Analyses derived from a history, a static HTML report and the JSON
//! history format.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{BboError, Result};
use crate::history::{FailureStrategy, History, Observation, TrialState};
use crate::moo;
use crate::space::{Encoding, Parameter, SearchSpace, Value};
use crate::surrogate::{fit_prf, PrfOptions};
use crate::Rng;

/// `(1-based trial index, best feasible objective so far)`, starting at the
/// first feasible success.
pub fn convergence_curve(history: &History) -> Result<Vec<(usize, f64)>> {
    if history.num_objectives() != 1 {
        return Err(BboError::WrongTaskType(
            "a convergence curve needs a single-objective history".into(),
        ));
    }
    let mut best = f64::INFINITY;
    let mut out = Vec::new();
    for (i, obs) in history.observations().iter().enumerate() {
        if obs.is_feasible() {
            best = best.min(obs.objectives[0]);
        }
        if best.is_finite() {
            out.push((i + 1, best));
        }
    }
    Ok(out)
}

/// Hypervolume of the feasible front after each observation. Points that do
/// not dominate `reference` contribute nothing.
pub fn hv_over_time(history: &History, reference: &[f64]) -> Result<Vec<(usize, f64)>> {
    let m = history.num_objectives();
    if m < 2 {
        return Err(BboError::WrongTaskType("hypervolume needs at least two objectives".into()));
    }
    if reference.len() != m {
        return Err(BboError::Config(format!("reference point needs {m} components")));
    }
    let mut front: Vec<Vec<f64>> = Vec::new();
    let mut hv = 0.0;
    let mut out = Vec::with_capacity(history.len());
    for (i, obs) in history.observations().iter().enumerate() {
        let inside = obs.objectives.iter().zip(reference).all(|(a, r)| a < r);
        if obs.is_feasible() && inside && !front.iter().any(|p| moo::weakly_dominates(p, &obs.objectives)) {
            front.retain(|p| !moo::weakly_dominates(&obs.objectives, p));
            front.push(obs.objectives.clone());
            hv = moo::hypervolume(&front, reference);
        }
        out.push((i + 1, hv));
    }
    Ok(out)
}

/// Monte Carlo Shapley values for one explained row.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapleyRow {
    pub phi: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Surrogate prediction at the row.
    pub prediction: f64,
    /// Mean surrogate prediction over the background rows.
    pub baseline: f64,
}

impl ShapleyRow {
    /// `|Σ φ − (prediction − baseline)|`.
    pub fn efficiency_residual(&self) -> f64 {
        (self.phi.iter().sum::<f64>() - (self.prediction - self.baseline)).abs()
    }

    /// Standard error of `Σ φ`, treating the per-feature estimates as
    /// independent.
    pub fn sum_std_error(&self) -> f64 {
        self.std_errors.iter().map(|s| s * s).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Importance {
    pub names: Vec<String>,
    /// Mean `|φ_j|` over the explained rows.
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub rows: Vec<ShapleyRow>,
}

const BACKGROUND_ROWS: usize = 32;
const EXPLAINED_ROWS: usize = 64;

/// Parameter importance of the first objective: permutation-sampling Shapley
/// values of a probabilistic-random-forest surrogate, with the coalition
/// value `v(S)` the mean prediction over a 32-row background set whose
/// columns in `S` are replaced by the explained row. Each permutation
/// telescopes from `v(∅)` to `v(all)`, so every sample satisfies efficiency.
pub fn importance_shapley(
    history: &History,
    space: &SearchSpace,
    n_permutations: usize,
    rng: &mut Rng,
) -> Result<Importance> {
    let d = space.dimension();
    let successes = history.successes().count();
    if successes < 2 * d || successes < 2 {
        return Err(BboError::InsufficientData(format!(
            "importance needs at least {} successful observations, got {successes}",
            (2 * d).max(2)
        )));
    }
    if n_permutations == 0 {
        return Err(BboError::Config("n_permutations must be at least 1".into()));
    }
    let set = history.training_targets(space, Encoding::Index, FailureStrategy::Drop)?;
    let model = fit_prf(&set.x, &set.objectives[0], PrfOptions::default(), rng)?;
    let n = set.x.len();
    let pick = |k: usize, rng: &mut Rng| -> Vec<Vec<f64>> {
        let mut idx = rand::seq::index::sample(rng, n, k.min(n)).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| set.x[i].clone()).collect()
    };
    let background = pick(BACKGROUND_ROWS, rng);
    let explained = pick(EXPLAINED_ROWS, rng);
    let value = |rows: &[Vec<f64>]| rows.iter().map(|r| model.predict(r).0).sum::<f64>() / rows.len() as f64;
    let baseline = value(&background);

    let mut rows = Vec::with_capacity(explained.len());
    let mut order: Vec<usize> = (0..d).collect();
    for x in &explained {
        let mut sum = vec![0.0; d];
        let mut sum_sq = vec![0.0; d];
        for _ in 0..n_permutations {
            order.shuffle(rng);
            let mut coalition = background.clone();
            let mut prev = baseline;
            for &j in &order {
                for row in coalition.iter_mut() {
                    row[j] = x[j];
                }
                let v = value(&coalition);
                let delta = v - prev;
                sum[j] += delta;
                sum_sq[j] += delta * delta;
                prev = v;
            }
        }
        let k = n_permutations as f64;
        let phi: Vec<f64> = sum.iter().map(|s| s / k).collect();
        let std_errors = if n_permutations > 1 {
            (0..d)
                .map(|j| ((sum_sq[j] - k * phi[j] * phi[j]).max(0.0) / (k - 1.0) / k).sqrt())
                .collect()
        } else {
            vec![0.0; d]
        };
        rows.push(ShapleyRow {
            phi,
            std_errors,
            prediction: model.predict(x).0,
            baseline,
        });
    }
    let r = rows.len() as f64;
    let values = (0..d).map(|j| rows.iter().map(|row| row.phi[j].abs()).sum::<f64>() / r).collect();
    let std_errors = (0..d)
        .map(|j| rows.iter().map(|row| row.std_errors[j].powi(2)).sum::<f64>().sqrt() / r)
        .collect();
    Ok(Importance {
        names: space.names().map(str::to_string).collect(),
        values,
        std_errors,
        rows,
    })
}

/// A search space covering every configuration in `history`: numeric
/// parameters span their observed range, anything else becomes a
/// categorical over the observed values. Used to analyse histories whose
/// original space definition is not at hand.
pub fn infer_space(history: &History) -> Result<SearchSpace> {
    let mut columns: BTreeMap<&str, Vec<&Value>> = BTreeMap::new();
    for obs in history.observations() {
        for (k, v) in obs.config.values() {
            columns.entry(k.as_str()).or_default().push(v);
        }
    }
    let mut params = Vec::new();
    for (name, values) in columns {
        let numeric: Option<Vec<f64>> = values.iter().map(|v| v.as_f64()).collect();
        let param = match numeric {
            Some(xs) => {
                let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if values.iter().all(|v| matches!(v, Value::Int(_))) {
                    let (lo, hi) = (lo as i64, hi as i64);
                    Parameter::int(name, lo, hi.max(lo + 1))?
                } else {
                    let hi = if hi > lo { hi } else { lo + 1.0 };
                    Parameter::float(name, lo, hi)?
                }
            }
            None => {
                let mut choices: Vec<Value> = Vec::new();
                for v in values {
                    if !choices.contains(v) {
                        choices.push(v.clone());
                    }
                }
                if choices.len() < 2 {
                    choices.push(Value::Str(format!("{}~", choices[0])));
                }
                Parameter::categorical(name, choices)?
            }
        };
        params.push(param);
    }
    SearchSpace::new(params)
}

/// Analyses shown in the HTML report; absent entries are simply omitted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Analyses {
    pub convergence: Option<Vec<(usize, f64)>>,
    pub hypervolume: Option<Vec<(usize, f64)>>,
    pub ref_point: Option<Vec<f64>>,
    pub importance: Option<Importance>,
}

impl Analyses {
    /// The analyses that apply to `history`. Importance needs a space and
    /// enough successful observations; it is skipped otherwise.
    pub fn for_history(history: &History, space: Option<&SearchSpace>, rng: &mut Rng) -> Self {
        let mut out = Analyses::default();
        if history.num_objectives() == 1 {
            out.convergence = convergence_curve(history).ok();
        } else {
            let reference = history
                .ref_point()
                .map(<[f64]>::to_vec)
                .or_else(|| crate::advisor::default_reference_point(history));
            if let Some(r) = reference {
                out.hypervolume = hv_over_time(history, &r).ok();
                out.ref_point = Some(r);
            }
        }
        if let Some(space) = space {
            out.importance = importance_shapley(history, space, 64, rng).ok();
        }
        out
    }
}

pub const FORMAT_VERSION: &str = "1";

#[derive(Serialize)]
struct HistoryOut<'a> {
    version: &'a str,
    task_id: &'a str,
    num_objectives: usize,
    num_constraints: usize,
    ref_point: Option<&'a [f64]>,
    observations: &'a [Observation],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HistoryIn {
    version: String,
    task_id: String,
    num_objectives: usize,
    num_constraints: usize,
    #[serde(default)]
    ref_point: Option<Vec<f64>>,
    observations: Vec<Observation>,
}

/// Canonical JSON text of a history (fixed field order, sorted maps).
pub fn export_json(history: &History) -> String {
    let out = HistoryOut {
        version: FORMAT_VERSION,
        task_id: history.task_id(),
        num_objectives: history.num_objectives(),
        num_constraints: history.num_constraints(),
        ref_point: history.ref_point(),
        observations: history.observations(),
    };
    let mut s = serde_json::to_string_pretty(&out).expect("history serializes");
    s.push('\n');
    s
}

/// Parses [`export_json`] output, validating the version and every
/// observation against the declared shape.
pub fn import_json(text: &str) -> Result<History> {
    let parsed: HistoryIn = serde_json::from_str(text).map_err(|e| BboError::from_json(&e))?;
    let locate = |key: &str, message: String| {
        let (line, column) = text
            .find(&format!("\"{key}\""))
            .map(|at| {
                let before = &text[..at];
                let line = before.matches('\n').count() + 1;
                let column = at - before.rfind('\n').map_or(0, |p| p + 1) + 1;
                (line, column)
            })
            .unwrap_or((0, 0));
        BboError::Parse { line, column, message }
    };
    if parsed.version != FORMAT_VERSION {
        return Err(locate(
            "version",
            format!("unsupported version '{}' (expected '{FORMAT_VERSION}')", parsed.version),
        ));
    }
    let mut history = History::new(parsed.task_id, parsed.num_objectives, parsed.num_constraints);
    if let Some(r) = parsed.ref_point {
        if r.len() != parsed.num_objectives {
            return Err(locate("ref_point", format!("ref_point must have {} components", parsed.num_objectives)));
        }
        history = history.with_ref_point(r);
    }
    for (i, obs) in parsed.observations.into_iter().enumerate() {
        history
            .record(obs)
            .map_err(|e| locate("observations", format!("observation {i}: {e}")))?;
    }
    Ok(history)
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// JSON text made safe for a script element: the characters that XML would
/// interpret are written as JSON unicode escapes, which decode to the same
/// document.
fn json_island(json: &str) -> String {
    json.replace('&', "\\u0026").replace('<', "\\u003c").replace('>', "\\u003e")
}

fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if !v.is_finite() {
        v.to_string()
    } else if (1e-3..1e6).contains(&v.abs()) {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.4e}")
    }
}

const W: f64 = 640.0;
const H: f64 = 320.0;
const PAD: f64 = 48.0;

struct Scale {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64>, from: f64, to: f64) -> Self {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() || !hi.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            lo -= 0.5;
            hi += 0.5;
        }
        Scale { lo, hi, from, to }
    }

    fn at(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }
}

fn svg_open(out: &mut String, title: &str, xs: &Scale, ys: &Scale, x_label: &str, y_label: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" width=\"{W}\" height=\"{H}\" role=\"img\">\
<title>{}</title>\
<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" class=\"frame\"/>\
<text x=\"{}\" y=\"{}\" class=\"axis\" text-anchor=\"middle\">{}</text>\
<text x=\"14\" y=\"{}\" class=\"axis\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">{}</text>\
<text x=\"{PAD}\" y=\"{}\" class=\"tick\">{}</text>\
<text x=\"{}\" y=\"{}\" class=\"tick\" text-anchor=\"end\">{}</text>\
<text x=\"{}\" y=\"{}\" class=\"tick\" text-anchor=\"end\">{}</text>\
<text x=\"{}\" y=\"{}\" class=\"tick\" text-anchor=\"end\">{}</text>",
        escape(title),
        W - 2.0 * PAD,
        H - 2.0 * PAD,
        W / 2.0,
        H - 8.0,
        escape(x_label),
        H / 2.0,
        H / 2.0,
        escape(y_label),
        H - PAD + 14.0,
        num(xs.lo),
        W - PAD,
        H - PAD + 14.0,
        num(xs.hi),
        PAD - 4.0,
        H - PAD,
        num(ys.lo),
        PAD - 4.0,
        PAD + 4.0,
        num(ys.hi),
    );
}

fn step_chart(title: &str, y_label: &str, series: &[(usize, f64)], scatter: &[(usize, f64)]) -> String {
    let xs = Scale::new(series.iter().chain(scatter).map(|p| p.0 as f64), PAD, W - PAD);
    let ys = Scale::new(series.iter().chain(scatter).map(|p| p.1), H - PAD, PAD);
    let mut out = String::new();
    svg_open(&mut out, title, &xs, &ys, "trial", y_label);
    for (i, v) in scatter {
        let _ = write!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" class=\"obs\"/>", xs.at(*i as f64), ys.at(*v));
    }
    let mut path = String::new();
    for (k, (i, v)) in series.iter().enumerate() {
        let (x, y) = (xs.at(*i as f64), ys.at(*v));
        if k == 0 {
            let _ = write!(path, "{x:.2},{y:.2}");
        } else {
            let prev_y = ys.at(series[k - 1].1);
            let _ = write!(path, " {x:.2},{prev_y:.2} {x:.2},{y:.2}");
        }
    }
    if !path.is_empty() {
        let _ = write!(out, "<polyline points=\"{path}\" class=\"best\"/>");
    }
    out.push_str("</svg>");
    out
}

fn pareto_chart(history: &History) -> String {
    let feasible: Vec<&Observation> = history.feasible().collect();
    let front: Vec<&Observation> = history.pareto_front().unwrap_or_default();
    let xs = Scale::new(feasible.iter().map(|o| o.objectives[0]), PAD, W - PAD);
    let ys = Scale::new(feasible.iter().map(|o| o.objectives[1]), H - PAD, PAD);
    let mut out = String::new();
    svg_open(&mut out, "Pareto front", &xs, &ys, "objective 1", "objective 2");
    for o in &feasible {
        let _ = write!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" class=\"obs\"/>",
            xs.at(o.objectives[0]),
            ys.at(o.objectives[1])
        );
    }
    let mut pts: Vec<(f64, f64)> = front.iter().map(|o| (o.objectives[0], o.objectives[1])).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (a, b) in &pts {
        let _ = write!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" class=\"front\"/>", xs.at(*a), ys.at(*b));
    }
    out.push_str("</svg>");
    out
}

fn importance_chart(imp: &Importance) -> String {
    let row_h = 24.0;
    let height = PAD + row_h * imp.names.len() as f64 + 16.0;
    let max = imp
        .values
        .iter()
        .zip(&imp.std_errors)
        .map(|(v, e)| v + e)
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let left = 140.0;
    let span = W - left - PAD;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {height}\" width=\"{W}\" height=\"{height}\" role=\"img\"><title>Parameter importance</title>"
    );
    let mut order: Vec<usize> = (0..imp.names.len()).collect();
    order.sort_by(|&a, &b| imp.values[b].total_cmp(&imp.values[a]).then(a.cmp(&b)));
    for (k, &j) in order.iter().enumerate() {
        let y = 16.0 + k as f64 * row_h;
        let w = imp.values[j] / max * span;
        let e = imp.std_errors[j] / max * span;
        let _ = write!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" class=\"tick\" text-anchor=\"end\">{}</text>\
<rect x=\"{left}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"16\" class=\"bar\"/>\
<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" class=\"err\"/>\
<text x=\"{:.2}\" y=\"{:.2}\" class=\"tick\">{}</text>",
            left - 6.0,
            y + 12.0,
            escape(&imp.names[j]),
            left + (w - e).max(0.0),
            y + 8.0,
            left + w + e,
            y + 8.0,
            left + w + e + 6.0,
            y + 12.0,
            num(imp.values[j]),
        );
    }
    out.push_str("</svg>");
    out
}

const STYLE: &str = "body{font-family:system-ui,sans-serif;margin:2em;color:#222}\
h1{font-size:1.4em}h2{font-size:1.1em;margin-top:2em}\
table{border-collapse:collapse;font-size:.85em}td,th{border:1px solid #ccc;padding:2px 6px;text-align:right}\
td.cfg{text-align:left;font-family:monospace}tr.failed{color:#a33}tr.timeout{color:#a70}tr.infeasible{color:#777}\
.frame{fill:none;stroke:#999}.axis{font-size:12px}.tick{font-size:10px;fill:#555}\
.obs{fill:#bbb}.front{fill:#1f5fbf}.best{fill:none;stroke:#1f5fbf;stroke-width:2}\
.bar{fill:#1f5fbf}.err{stroke:#222}";

/// A self-contained XHTML document: summary, charts, importance, the full
/// observation table and the exported history as a JSON data island.
/// Identical inputs give identical bytes.
pub fn render_html(history: &History, analyses: &Analyses) -> String {
    let m = history.num_objectives();
    let mut out = String::new();
    let title = format!("Optimization report: {}", history.task_id());
    let _ = write!(
        out,
        "<!DOCTYPE html>\n<html xmlns=\"http://www.w3.org/1999/xhtml\" lang=\"en\">\n<head>\n<meta charset=\"utf-8\"/>\n<title>{}</title>\n<style>{STYLE}</style>\n</head>\n<body>\n<h1>{}</h1>\n",
        escape(&title),
        escape(&title)
    );

    let count = |s: TrialState| history.observations().iter().filter(|o| o.trial_state == s).count();
    let _ = write!(
        out,
        "<ul class=\"summary\"><li>observations: {}</li><li>successful: {}</li><li>failed: {}</li><li>timed out: {}</li><li>feasible: {}</li><li>objectives: {m}, constraints: {}</li></ul>\n",
        history.len(),
        count(TrialState::Success),
        count(TrialState::Failed),
        count(TrialState::Timeout),
        history.feasible().count(),
        history.num_constraints()
    );

    if m == 1 {
        if let Ok(Some(best)) = history.incumbent() {
            let _ = write!(
                out,
                "<p class=\"incumbent\">best objective <strong>{}</strong> at <code>{}</code></p>\n",
                num(best.objectives[0]),
                escape(&best.config.to_string())
            );
        }
        if let Some(curve) = &analyses.convergence {
            let scatter: Vec<(usize, f64)> = history
                .observations()
                .iter()
                .enumerate()
                .filter(|(_, o)| o.is_feasible())
                .map(|(i, o)| (i + 1, o.objectives[0]))
                .collect();
            let _ = write!(out, "<h2>Convergence</h2>\n{}\n", step_chart("Best objective so far", "objective", curve, &scatter));
        }
    } else {
        if m == 2 {
            let _ = write!(out, "<h2>Pareto front</h2>\n{}\n", pareto_chart(history));
        }
        if let Some(hv) = &analyses.hypervolume {
            let reference = analyses
                .ref_point
                .as_ref()
                .map(|r| r.iter().map(|v| num(*v)).collect::<Vec<_>>().join(", "))
                .unwrap_or_default();
            let _ = write!(
                out,
                "<h2>Hypervolume</h2>\n<p>reference point ({})</p>\n{}\n",
                escape(&reference),
                step_chart("Hypervolume of the feasible front", "hypervolume", hv, &[])
            );
        }
    }

    if let Some(imp) = &analyses.importance {
        let _ = write!(out, "<h2>Parameter importance</h2>\n{}\n", importance_chart(imp));
    }

    out.push_str("<h2>Observations</h2>\n<table class=\"observations\">\n<thead><tr><th>#</th><th>state</th>");
    for k in 0..m {
        let _ = write!(out, "<th>f{}</th>", k + 1);
    }
    for j in 0..history.num_constraints() {
        let _ = write!(out, "<th>c{}</th>", j + 1);
    }
    out.push_str("<th>seconds</th><th>configuration</th></tr></thead>\n<tbody>\n");
    for (i, o) in history.observations().iter().enumerate() {
        let class = match o.trial_state {
            TrialState::Failed => "failed",
            TrialState::Timeout => "timeout",
            TrialState::Success if !o.is_feasible() => "infeasible",
            TrialState::Success => "ok",
        };
        let _ = write!(out, "<tr class=\"{class}\"><td>{}</td><td>{:?}</td>", i + 1, o.trial_state);
        for k in 0..m {
            let _ = write!(out, "<td>{}</td>", o.objectives.get(k).map_or(String::new(), |v| num(*v)));
        }
        for j in 0..history.num_constraints() {
            let _ = write!(out, "<td>{}</td>", o.constraints.get(j).map_or(String::new(), |v| num(*v)));
        }
        let _ = write!(
            out,
            "<td>{}</td><td class=\"cfg\">{}</td></tr>\n",
            num(o.elapsed_time),
            escape(&o.config.to_string())
        );
    }
    out.push_str("</tbody>\n</table>\n");

    let _ = write!(
        out,
        "<script type=\"application/json\" id=\"history-data\">{}</script>\n</body>\n</html>\n",
        json_island(&export_json(history))
    );
    out
}

/// The JSON data island of a report produced by [`render_html`].
pub fn extract_history_json(html: &str) -> Option<String> {
    let open = "<script type=\"application/json\" id=\"history-data\">";
    let start = html.find(open)? + open.len();
    let end = start + html[start..].find("</script>")?;
    Some(html[start..end].to_string())
}
