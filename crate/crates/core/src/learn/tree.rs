use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dataset::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// Weighted Gini impurity on 0/1 targets; leaves hold the positive share.
    Gini,
    /// Weighted squared error; leaves hold the weighted mean.
    SquaredError,
}

/// How many features each node examines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    All,
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, p: usize) -> usize {
        match self {
            MaxFeatures::All => p,
            MaxFeatures::Sqrt => (p as f64).sqrt().ceil() as usize,
            MaxFeatures::Count(n) => n.clamp(1, p.max(1)),
        }
        .min(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub criterion: Criterion,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub min_leaf_weight: f64,
    pub max_features: MaxFeatures,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            criterion: Criterion::Gini,
            max_depth: None,
            min_samples_leaf: 1,
            min_leaf_weight: 0.0,
            max_features: MaxFeatures::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
        weight: f64,
    },
}

/// A binary tree stored as a preorder node list; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    n_features: usize,
    importances: Vec<f64>,
}

impl DecisionTree {
    pub fn leaf(value: f64, n_features: usize) -> Self {
        DecisionTree { nodes: vec![Node::Leaf { value, weight: 0.0 }], n_features, importances: vec![0.0; n_features] }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Total weighted impurity decrease per feature, unnormalized.
    pub fn importances(&self) -> &[f64] {
        &self.importances
    }

    pub fn n_splits(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Split { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn leaf_index(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split { feature, threshold, left, right } => {
                    i = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(row)] {
            Node::Leaf { value, .. } => value,
            Node::Split { .. } => unreachable!("leaf_index always lands on a leaf"),
        }
    }

    pub(crate) fn set_leaf_value(&mut self, node: usize, v: f64) {
        if let Node::Leaf { value, .. } = &mut self.nodes[node] {
            *value = v;
        }
    }

    /// Structural checks for trees read from disk.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::data(format!("malformed tree: {m}")));
        if self.nodes.is_empty() {
            return bad("no nodes".into());
        }
        if self.importances.len() != self.n_features {
            return bad("importance length differs from feature count".into());
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            if i >= self.nodes.len() || seen[i] {
                return bad(format!("node {i} is out of range or shared"));
            }
            seen[i] = true;
            match self.nodes[i] {
                Node::Split { feature, threshold, left, right } => {
                    if feature >= self.n_features || !threshold.is_finite() {
                        return bad(format!("node {i} has an invalid split"));
                    }
                    stack.push(right);
                    stack.push(left);
                }
                Node::Leaf { value, .. } => {
                    if !value.is_finite() {
                        return bad(format!("leaf {i} has a non-finite value"));
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("unreachable nodes".into());
        }
        Ok(())
    }
}

/// Column-major copy of a row subset with each column's rows presorted.
#[derive(Debug, Clone)]
pub struct ColumnData {
    n: usize,
    p: usize,
    cols: Vec<f64>,
    order: Vec<u32>,
}

impl ColumnData {
    pub fn new(x: &Matrix, rows: &[usize]) -> Self {
        let (n, p) = (rows.len(), x.cols());
        let mut cols = vec![0.0; n * p];
        for (i, &r) in rows.iter().enumerate() {
            for (f, v) in x.row(r).iter().enumerate() {
                cols[f * n + i] = *v;
            }
        }
        let mut order = Vec::with_capacity(n * p);
        for f in 0..p {
            let col = &cols[f * n..(f + 1) * n];
            let mut idx: Vec<u32> = (0..n as u32).collect();
            idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]).then(a.cmp(&b)));
            order.extend(idx);
        }
        ColumnData { n, p, cols, order }
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.p
    }
}

/// Fits a tree on the rows of `x` with positive weight.
pub fn fit_tree<R: Rng>(
    x: &Matrix,
    targets: &[f64],
    weights: &[f64],
    params: &TreeParams,
    rng: &mut R,
) -> DecisionTree {
    let rows: Vec<usize> = (0..x.rows()).filter(|&i| weights[i] > 0.0).collect();
    let data = ColumnData::new(x, &rows);
    let y: Vec<f64> = rows.iter().map(|&i| targets[i]).collect();
    let w: Vec<f64> = rows.iter().map(|&i| weights[i]).collect();
    fit_prepared(&data, &y, &w, params, rng)
}

/// Fits a tree on presorted data; `targets` and `weights` are indexed by the
/// local rows of `data` and every weight must be positive.
pub fn fit_prepared<R: Rng>(
    data: &ColumnData,
    targets: &[f64],
    weights: &[f64],
    params: &TreeParams,
    rng: &mut R,
) -> DecisionTree {
    debug_assert_eq!(targets.len(), data.n);
    debug_assert_eq!(weights.len(), data.n);
    if data.n == 0 {
        return DecisionTree::leaf(0.0, data.p);
    }
    Builder {
        data,
        y: targets,
        w: weights,
        params,
        m: params.max_features.resolve(data.p),
        order: data.order.clone(),
        members: (0..data.n as u32).collect(),
        goes_left: vec![false; data.n],
        buf: Vec::with_capacity(data.n),
        features: (0..data.p).collect(),
        nodes: Vec::new(),
        importances: vec![0.0; data.p],
    }
    .build(rng)
}

fn node_cost(criterion: Criterion, w: f64, s: f64, q: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    match criterion {
        Criterion::Gini => (2.0 * s * (w - s) / w).max(0.0),
        Criterion::SquaredError => (q - s * s / w).max(0.0),
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    let mid = a + (b - a) / 2.0;
    if mid >= a && mid < b {
        mid
    } else {
        a
    }
}

struct Task {
    start: usize,
    end: usize,
    depth: usize,
    right_of: Option<usize>,
    parent_feature: Option<usize>,
}

struct Candidate {
    cost: f64,
    feature: usize,
    threshold: f64,
}

struct Builder<'a> {
    data: &'a ColumnData,
    y: &'a [f64],
    w: &'a [f64],
    params: &'a TreeParams,
    m: usize,
    order: Vec<u32>,
    members: Vec<u32>,
    goes_left: Vec<bool>,
    buf: Vec<u32>,
    features: Vec<usize>,
    nodes: Vec<Node>,
    importances: Vec<f64>,
}

impl Builder<'_> {
    fn build<R: Rng>(mut self, rng: &mut R) -> DecisionTree {
        let mut stack = vec![Task { start: 0, end: self.data.n, depth: 0, right_of: None, parent_feature: None }];
        while let Some(task) = stack.pop() {
            let idx = self.nodes.len();
            if let Some(parent) = task.right_of {
                if let Node::Split { right, .. } = &mut self.nodes[parent] {
                    *right = idx;
                }
            }
            let (w, s, cost, pure) = self.node_stats(task.start, task.end);
            if let Some(f) = task.parent_feature {
                self.importances[f] -= cost;
            }
            let count = task.end - task.start;
            let can_split = !pure
                && task.depth < self.params.max_depth.unwrap_or(usize::MAX)
                && count >= 2 * self.params.min_samples_leaf.max(1)
                && w >= 2.0 * self.params.min_leaf_weight;
            let best = if can_split { self.best_split(task.start, task.end, w, rng) } else { None };
            match best {
                None => self.nodes.push(Node::Leaf { value: s / w, weight: w }),
                Some(c) => {
                    self.importances[c.feature] += cost;
                    let mid = self.partition(task.start, task.end, c.feature, c.threshold);
                    self.nodes.push(Node::Split {
                        feature: c.feature,
                        threshold: c.threshold,
                        left: idx + 1,
                        right: 0,
                    });
                    stack.push(Task {
                        start: mid,
                        end: task.end,
                        depth: task.depth + 1,
                        right_of: Some(idx),
                        parent_feature: Some(c.feature),
                    });
                    stack.push(Task {
                        start: task.start,
                        end: mid,
                        depth: task.depth + 1,
                        right_of: None,
                        parent_feature: Some(c.feature),
                    });
                }
            }
        }
        DecisionTree { nodes: self.nodes, n_features: self.data.p, importances: self.importances }
    }

    /// `(weight, weighted target sum, impurity * weight, all targets equal)`.
    fn node_stats(&self, start: usize, end: usize) -> (f64, f64, f64, bool) {
        let rows = &self.members[start..end];
        let (mut w, mut s) = (0.0, 0.0);
        let first = self.y[rows[0] as usize];
        let mut pure = true;
        for &r in rows {
            let r = r as usize;
            w += self.w[r];
            s += self.w[r] * self.y[r];
            pure &= self.y[r] == first;
        }
        let cost = match self.params.criterion {
            Criterion::Gini => node_cost(Criterion::Gini, w, s, s),
            Criterion::SquaredError => {
                let mean = s / w;
                rows.iter()
                    .map(|&r| {
                        let d = self.y[r as usize] - mean;
                        self.w[r as usize] * d * d
                    })
                    .sum()
            }
        };
        (w, s, if pure { 0.0 } else { cost }, pure)
    }

    fn best_split<R: Rng>(&mut self, start: usize, end: usize, total_w: f64, rng: &mut R) -> Option<Candidate> {
        let p = self.data.p;
        let sample = self.m < p;
        let mut best: Option<Candidate> = None;
        let mut visited = 0;
        for j in 0..p {
            if sample {
                let k = rng.random_range(j..p);
                self.features.swap(j, k);
            }
            let f = self.features[j];
            let seg = &self.order[f * self.data.n + start..f * self.data.n + end];
            let col = &self.data.cols[f * self.data.n..(f + 1) * self.data.n];
            if col[seg[0] as usize] == col[seg[seg.len() - 1] as usize] {
                continue;
            }
            if let Some(c) = self.scan_feature(f, seg, col, total_w) {
                if best.as_ref().is_none_or(|b| c.cost < b.cost) {
                    best = Some(c);
                }
            }
            visited += 1;
            if visited == self.m {
                break;
            }
        }
        best
    }

    fn scan_feature(&self, f: usize, seg: &[u32], col: &[f64], total_w: f64) -> Option<Candidate> {
        let crit = self.params.criterion;
        let (min_n, min_w) = (self.params.min_samples_leaf.max(1), self.params.min_leaf_weight);
        let (mut total_s, mut total_q) = (0.0, 0.0);
        for &r in seg {
            let (w, y) = (self.w[r as usize], self.y[r as usize]);
            total_s += w * y;
            total_q += w * y * y;
        }
        let (mut wl, mut sl, mut ql) = (0.0, 0.0, 0.0);
        let mut best: Option<Candidate> = None;
        for i in 0..seg.len() - 1 {
            let r = seg[i] as usize;
            let (w, y) = (self.w[r], self.y[r]);
            wl += w;
            sl += w * y;
            ql += w * y * y;
            let (a, b) = (col[r], col[seg[i + 1] as usize]);
            if a == b {
                continue;
            }
            let nl = i + 1;
            let wr = total_w - wl;
            if nl < min_n || seg.len() - nl < min_n || wl < min_w || wr < min_w || wr <= 0.0 {
                continue;
            }
            let cost = node_cost(crit, wl, sl, ql) + node_cost(crit, wr, total_s - sl, total_q - ql);
            if best.as_ref().is_none_or(|c| cost < c.cost) {
                best = Some(Candidate { cost, feature: f, threshold: midpoint(a, b) });
            }
        }
        best
    }

    /// Stable partition of every presorted column segment; returns the split point.
    fn partition(&mut self, start: usize, end: usize, feature: usize, threshold: f64) -> usize {
        let n = self.data.n;
        let col = &self.data.cols[feature * n..(feature + 1) * n];
        for &r in &self.members[start..end] {
            self.goes_left[r as usize] = col[r as usize] <= threshold;
        }
        let goes_left = &self.goes_left;
        let buf = &mut self.buf;
        let mut split = |seg: &mut [u32]| -> usize {
            buf.clear();
            let mut k = 0;
            for i in 0..seg.len() {
                let r = seg[i];
                if goes_left[r as usize] {
                    seg[k] = r;
                    k += 1;
                } else {
                    buf.push(r);
                }
            }
            seg[k..].copy_from_slice(buf);
            k
        };
        let nl = split(&mut self.members[start..end]);
        for f in 0..self.data.p {
            split(&mut self.order[f * n + start..f * n + end]);
        }
        start + nl
    }
}
