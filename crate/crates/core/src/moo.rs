//! Multi-objective primitives: dominance, non-dominated sorting, crowding
//! distance and exact hypervolume. Everything is minimization.

/// `a` dominates `b`: no worse in every objective, strictly better in one.
///
/// Panics if the vectors differ in length.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(a.len(), b.len(), "objective vectors differ in length");
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Weak dominance: `a <= b` componentwise.
pub fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Fast non-dominated sort. Returns fronts as lists of indices into `points`,
/// best front first; indices within a front are ascending.
pub fn non_dominated_sort(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&points[i], &points[j]) {
                dominated_by_me[i].push(j);
                domination_count[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominated_by_me[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by_me[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// NSGA-II crowding distance of each point in a front.
pub fn crowding_distance(front: &[Vec<f64>]) -> Vec<f64> {
    let n = front.len();
    if n == 0 {
        return Vec::new();
    }
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].len();
    let mut distance = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..m {
        order.sort_by(|&a, &b| front[a][k].total_cmp(&front[b][k]).then(a.cmp(&b)));
        let lo = front[order[0]][k];
        let hi = front[order[n - 1]][k];
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..n - 1 {
            let i = order[w];
            if distance[i].is_finite() {
                distance[i] += (front[order[w + 1]][k] - front[order[w - 1]][k]) / range;
            }
        }
    }
    distance
}

fn inside_ref(points: &[Vec<f64>], reference: &[f64]) -> Vec<Vec<f64>> {
    points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(x, r)| x <= r))
        .cloned()
        .collect()
}

/// Lebesgue measure of the region dominated by `points` and bounded by
/// `reference`. Points outside the reference box are ignored.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let pts = inside_ref(points, reference);
    if pts.is_empty() {
        return 0.0;
    }
    match reference.len() {
        2 => hv_sweep_2d(pts, reference),
        _ => hv_slice(pts, reference),
    }
}

/// Same quantity as [`hypervolume`], always computed by dimension-recursive
/// slicing (down to one dimension).
pub fn hypervolume_by_slicing(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let pts = inside_ref(points, reference);
    if pts.is_empty() {
        return 0.0;
    }
    hv_slice(pts, reference)
}

fn hv_sweep_2d(mut pts: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut volume = 0.0;
    let mut ceiling = reference[1];
    for p in &pts {
        if p[1] < ceiling {
            volume += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    volume
}

fn hv_slice(mut pts: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    let m = reference.len();
    if m == 1 {
        let best = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        return (reference[0] - best).max(0.0);
    }
    let last = m - 1;
    pts.sort_by(|a, b| a[last].total_cmp(&b[last]));
    let mut volume = 0.0;
    let mut active: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    for i in 0..pts.len() {
        active.push(pts[i][..last].to_vec());
        let upper = if i + 1 < pts.len() { pts[i + 1][last] } else { reference[last] };
        let depth = upper - pts[i][last];
        if depth > 0.0 {
            let filtered = non_dominated_subset(&active);
            volume += depth * hv_slice(filtered, &reference[..last]);
        }
    }
    volume
}

fn non_dominated_subset(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if out.iter().any(|q| weakly_dominates(q, p)) {
            continue;
        }
        out.retain(|q| !weakly_dominates(p, q));
        out.push(p.clone());
    }
    out
}

/// Outcome of [`hypervolume_difference`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HvDifference {
    pub value: f64,
    /// Set when the achieved hypervolume exceeds the supplied optimum.
    pub optimum_underestimated: bool,
}

/// `optimal_hv - HV(points)`, the regret-style multi-objective metric.
pub fn hypervolume_difference(points: &[Vec<f64>], reference: &[f64], optimal_hv: f64) -> HvDifference {
    let value = optimal_hv - hypervolume(points, reference);
    if value < 0.0 {
        log::warn!("achieved hypervolume exceeds the supplied optimum by {}", -value);
    }
    HvDifference {
        value,
        optimum_underestimated: value < 0.0,
    }
}

/// A 2-D non-dominated front prepared for O(log n) exclusive-hypervolume
/// queries (the hypervolume a single new point would add).
#[derive(Debug, Clone)]
pub(crate) struct Staircase2d {
    reference: [f64; 2],
    /// Front sorted by the first objective (second objective strictly decreasing).
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// `area[i]`: dominated area inside the reference box of segments `< i`,
    /// each segment `l` spanning `[xs[l], xs[l + 1])` at height `ys[l]`.
    area: Vec<f64>,
    /// Cumulative segment widths.
    width: Vec<f64>,
}

impl Staircase2d {
    pub(crate) fn new(front: &[Vec<f64>], reference: &[f64]) -> Self {
        let pts = non_dominated_subset(&inside_ref(front, reference));
        let mut pts: Vec<(f64, f64)> = pts.iter().map(|p| (p[0], p[1])).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let mut area = vec![0.0; xs.len() + 1];
        let mut width = vec![0.0; xs.len() + 1];
        for l in 0..xs.len() {
            let right = if l + 1 < xs.len() { xs[l + 1] } else { reference[0] };
            let w = right - xs[l];
            area[l + 1] = area[l] + w * (reference[1] - ys[l]);
            width[l + 1] = width[l] + w;
        }
        Staircase2d {
            reference: [reference[0], reference[1]],
            xs,
            ys,
            area,
            width,
        }
    }

    /// Hypervolume gained by adding `y` (clipped to the reference box).
    pub(crate) fn improvement(&self, y0: f64, y1: f64) -> f64 {
        let [r0, r1] = self.reference;
        let y0 = y0.min(r0);
        let y1 = y1.min(r1);
        let box_area = (r0 - y0) * (r1 - y1);
        if box_area <= 0.0 || self.xs.is_empty() {
            return box_area.max(0.0);
        }
        // segments entirely right of y0 start at index `first`
        let first = self.xs.partition_point(|&x| x <= y0);
        // within [y0, r0], heights `ys` above y1 form a prefix (ys decreasing)
        let split = first.max(self.ys.partition_point(|&h| h >= y1));
        let mut covered = 0.0;
        // partial segment containing y0
        if first > 0 {
            let l = first - 1;
            let right = if l + 1 < self.xs.len() { self.xs[l + 1] } else { r0 };
            covered += (right - y0) * (r1 - self.ys[l].max(y1));
        }
        // full segments with height >= y1
        covered += self.area[split] - self.area[first];
        // full segments with height < y1
        let n = self.xs.len();
        covered += (self.width[n] - self.width[split]) * (r1 - y1);
        (box_area - covered).max(0.0)
    }
}
