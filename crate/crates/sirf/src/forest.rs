//! Binary decision trees and random forests with importance-weighted feature
//! sampling.
//!
//! Trees split on `x_j < t` (left) / `x_j >= t` (right), thresholds at
//! midpoints between adjacent distinct values. Each leaf carries the signed
//! encoding of its decision path (first split per feature) and the fully
//! refined hyperrectangle used for routing checks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::interactions::{gamma, SignedSet};
use crate::rng::stream_rng;

/// Schema version stamped into serialized forests and bundles.
pub const SCHEMA_VERSION: u32 = 1;

/// Nonnegative per-feature sampling weights summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureWeights {
    w: Vec<f64>,
}

impl FeatureWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if w.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::InvalidWeights(
                "weights must be finite and >= 0".into(),
            ));
        }
        let sum: f64 = w.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidWeights("all weights are zero".into()));
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(FeatureWeights { w })
    }

    /// Normalize arbitrary nonnegative scores to sum 1.
    pub fn normalized(scores: Vec<f64>) -> Result<Self> {
        if scores.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::InvalidWeights(
                "scores must be finite and >= 0".into(),
            ));
        }
        let sum: f64 = scores.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidWeights("all weights are zero".into()));
        }
        Self::new(scores.into_iter().map(|x| x / sum).collect())
    }

    pub fn uniform(p: usize) -> Self {
        FeatureWeights {
            w: vec![1.0 / p as f64; p.max(1)],
        }
    }

    pub fn one_hot(p: usize, feature: usize) -> Self {
        let mut w = vec![0.0; p];
        w[feature] = 1.0;
        FeatureWeights { w }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Shannon entropy in nats (0 log 0 = 0).
    pub fn entropy(&self) -> f64 {
        -self
            .w
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| x * x.ln())
            .sum::<f64>()
    }

    /// KL divergence from the uniform distribution: `ln(p) - H(w)`.
    pub fn relative_entropy(&self) -> f64 {
        (self.w.len() as f64).ln() - self.entropy()
    }
}

/// Axis-aligned region; only constrained features are stored. Containment is
/// `lower <= x_j < upper` per side, matching the routing convention that a
/// point on a threshold goes right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Hyperrectangle {
    /// `(feature, lower, upper)` sorted by feature; `None` = unbounded side.
    intervals: Vec<(usize, Option<f64>, Option<f64>)>,
}

impl Hyperrectangle {
    pub fn unbounded() -> Self {
        Self::default()
    }

    fn tighten(&mut self, feature: usize, positive: bool, threshold: f64) {
        let idx = match self.intervals.binary_search_by_key(&feature, |e| e.0) {
            Ok(i) => i,
            Err(i) => {
                self.intervals.insert(i, (feature, None, None));
                i
            }
        };
        let entry = &mut self.intervals[idx];
        if positive {
            entry.1 = Some(entry.1.map_or(threshold, |l| l.max(threshold)));
        } else {
            entry.2 = Some(entry.2.map_or(threshold, |u| u.min(threshold)));
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.intervals.iter().all(|&(j, lower, upper)| {
            lower.is_none_or(|l| x[j] >= l) && upper.is_none_or(|u| x[j] < u)
        })
    }

    /// Interval for one feature; unconstrained features are fully unbounded.
    pub fn interval(&self, feature: usize) -> (Option<f64>, Option<f64>) {
        match self.intervals.binary_search_by_key(&feature, |e| e.0) {
            Ok(i) => (self.intervals[i].1, self.intervals[i].2),
            Err(_) => (None, None),
        }
    }

    pub fn constrained_features(&self) -> impl Iterator<Item = usize> + '_ {
        self.intervals.iter().map(|e| e.0)
    }
}

/// The first split on a feature along a decision path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedSplit {
    pub feature: usize,
    /// `true` for the `x_j >= t` branch, `false` for `x_j < t`.
    pub positive: bool,
    pub threshold: f64,
}

/// Terminal node payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    /// Majority class of the in-bag rows (tie -> class 0).
    pub prediction: u8,
    /// In-bag class counts `[n0, n1]` (bootstrap multiplicity included).
    pub class_counts: [u64; 2],
    /// First split per path feature, ascending feature index.
    pub signed_splits: Vec<SignedSplit>,
    /// Fully refined path region (all splits, not just the first per feature).
    pub region: Hyperrectangle,
}

impl Leaf {
    /// Signed encoding of the decision path: `+j` / `-j` from the first split
    /// on each feature; later splits on the same feature are ignored.
    pub fn signed_set(&self) -> SignedSet {
        SignedSet::new(
            self.signed_splits
                .iter()
                .map(|s| gamma(s.feature, s.positive)),
        )
        .expect("one sign per feature by construction")
    }

    /// First-split threshold for a feature, if the path constrains it.
    pub fn first_split(&self, feature: usize) -> Option<&SignedSplit> {
        self.signed_splits.iter().find(|s| s.feature == feature)
    }
}

/// Tree node, stored in a flat array with index links.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf(Leaf),
}

/// A fitted binary decision tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    /// Assemble a tree from a node array, checking link structure.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("tree has no nodes".into()));
        }
        let mut referenced = vec![false; nodes.len()];
        for node in &nodes {
            if let Node::Internal { left, right, .. } = node {
                for &child in [left, right] {
                    if child >= nodes.len() || referenced[child] || child == 0 {
                        return Err(Error::InvalidParameter("invalid tree links".into()));
                    }
                    referenced[child] = true;
                }
            }
        }
        if referenced.iter().skip(1).any(|r| !r) {
            return Err(Error::InvalidParameter("orphan tree node".into()));
        }
        Ok(Tree { nodes })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    /// Route a point given by a coordinate accessor; returns the leaf node id.
    pub fn route_with(&self, coord: impl Fn(usize) -> f64) -> usize {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    id = if coord(*feature) < *threshold {
                        *left
                    } else {
                        *right
                    };
                }
                Node::Leaf(_) => return id,
            }
        }
    }

    pub fn leaf(&self, id: usize) -> Option<&Leaf> {
        match &self.nodes[id] {
            Node::Leaf(leaf) => Some(leaf),
            _ => None,
        }
    }

    pub fn leaves(&self) -> impl Iterator<Item = (usize, &Leaf)> {
        self.nodes.iter().enumerate().filter_map(|(id, n)| match n {
            Node::Leaf(leaf) => Some((id, leaf)),
            _ => None,
        })
    }

    /// Per-feature impurity-decrease totals, weighted by node fraction.
    ///
    /// Internal-node class counts are reconstructed bottom-up from leaf
    /// counts, so this is a pure function of the serialized structure.
    fn impurity_decreases(&self, p: usize) -> Vec<f64> {
        let mut counts = vec![[0u64; 2]; self.nodes.len()];
        // Children always follow their parent in the flat array, so a single
        // reverse pass accumulates bottom-up.
        for id in (0..self.nodes.len()).rev() {
            match &self.nodes[id] {
                Node::Leaf(leaf) => counts[id] = leaf.class_counts,
                Node::Internal { left, right, .. } => {
                    counts[id] = [
                        counts[*left][0] + counts[*right][0],
                        counts[*left][1] + counts[*right][1],
                    ];
                }
            }
        }
        let total = (counts[0][0] + counts[0][1]) as f64;
        let mut out = vec![0.0; p];
        for (id, node) in self.nodes.iter().enumerate() {
            if let Node::Internal {
                feature,
                left,
                right,
                ..
            } = node
            {
                let m = (counts[id][0] + counts[id][1]) as f64;
                let ml = (counts[*left][0] + counts[*left][1]) as f64;
                let mr = (counts[*right][0] + counts[*right][1]) as f64;
                let decrease = gini(&counts[id])
                    - (ml / m) * gini(&counts[*left])
                    - (mr / m) * gini(&counts[*right]);
                out[*feature] += (m / total) * decrease;
            }
        }
        out
    }
}

fn gini(counts: &[u64; 2]) -> f64 {
    let m = (counts[0] + counts[1]) as f64;
    if m == 0.0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / m;
    let p1 = counts[1] as f64 / m;
    1.0 - p0 * p0 - p1 * p1
}

/// Forest fitting parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    /// Number of trees.
    pub n_trees: usize,
    /// Candidate features per node; `None` = ceil(sqrt(p)).
    pub mtry: Option<usize>,
    /// Minimum rows per leaf.
    pub min_leaf: usize,
    /// Maximum depth; `None` = unlimited.
    pub max_depth: Option<usize>,
    /// Draw a bootstrap sample per tree (enables OOB estimates).
    pub per_tree_bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            mtry: None,
            min_leaf: 1,
            max_depth: None,
            per_tree_bootstrap: true,
            seed: 0,
        }
    }
}

fn default_mtry(p: usize) -> usize {
    (p as f64).sqrt().ceil() as usize
}

/// Training provenance kept with a fitted forest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub weights: FeatureWeights,
    pub per_tree_bootstrap: bool,
    /// In-bag row indices per tree, in draw order (all rows when bootstrap
    /// is disabled).
    pub in_bag: Vec<Vec<usize>>,
}

/// A fitted random forest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    trees: Vec<Tree>,
    n_features: usize,
    feature_names: Vec<String>,
    meta: TrainingMeta,
}

/// Gini importance of a fitted forest, normalized to sum 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GiniImportance {
    pub weights: FeatureWeights,
    /// Set when the forest contains no splits at all; `weights` is then
    /// uniform rather than importance-derived.
    pub no_split_fallback: bool,
}

impl Forest {
    /// Fit `params.n_trees` trees with node-level weighted feature sampling.
    ///
    /// Trees are trained in parallel; tree `t` uses RNG stream `t` of the
    /// seed, so results do not depend on thread count.
    pub fn fit(data: &Dataset, weights: &FeatureWeights, params: &ForestParams) -> Result<Self> {
        let p = data.n_features();
        if weights.len() != p {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {p} features",
                weights.len()
            )));
        }
        if !data.has_both_classes() {
            return Err(Error::SingleClass);
        }
        if params.n_trees < 1 {
            return Err(Error::InvalidParameter("n_trees must be >= 1".into()));
        }
        if params.min_leaf < 1 {
            return Err(Error::InvalidParameter("min_leaf must be >= 1".into()));
        }
        let mtry = params.mtry.unwrap_or_else(|| default_mtry(p));
        if mtry < 1 || mtry > p {
            return Err(Error::InvalidParameter(format!(
                "mtry {mtry} not in [1, {p}]"
            )));
        }
        let n = data.n_rows();
        let fitted: Vec<(Tree, Vec<usize>)> = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = stream_rng(params.seed, t as u64);
                let in_bag: Vec<usize> = if params.per_tree_bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                let tree = fit_tree(data, &in_bag, weights.as_slice(), mtry, params, &mut rng);
                (tree, in_bag)
            })
            .collect();
        let mut trees = Vec::with_capacity(fitted.len());
        let mut in_bag = Vec::with_capacity(fitted.len());
        for (tree, bag) in fitted {
            trees.push(tree);
            in_bag.push(bag);
        }
        Ok(Forest {
            trees,
            n_features: p,
            feature_names: data.feature_names().to_vec(),
            meta: TrainingMeta {
                seed: params.seed,
                weights: weights.clone(),
                per_tree_bootstrap: params.per_tree_bootstrap,
                in_bag,
            },
        })
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn meta(&self) -> &TrainingMeta {
        &self.meta
    }

    pub fn in_bag(&self, tree: usize) -> &[usize] {
        &self.meta.in_bag[tree]
    }

    /// Per-tree leaf node ids for a point.
    pub fn route(&self, x: &[f64]) -> Result<Vec<usize>> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(
                "point has non-finite coordinates".into(),
            ));
        }
        Ok(self.trees.iter().map(|t| t.route_with(|j| x[j])).collect())
    }

    /// Majority-vote class prediction for a point (tie -> class 0).
    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        let mut votes = [0usize; 2];
        for (tree, leaf_id) in self.trees.iter().zip(self.route(x)?) {
            votes[tree.leaf(leaf_id).expect("routed to leaf").prediction as usize] += 1;
        }
        Ok(u8::from(votes[1] > votes[0]))
    }

    /// Mean decrease in Gini impurity per feature, averaged over trees and
    /// normalized to sum 1. A forest with no splits yields uniform weights
    /// with `no_split_fallback` set.
    pub fn gini_importance(&self) -> GiniImportance {
        let p = self.n_features;
        let mut total = vec![0.0; p];
        for tree in &self.trees {
            for (j, v) in tree.impurity_decreases(p).into_iter().enumerate() {
                total[j] += v;
            }
        }
        let t = self.trees.len() as f64;
        total.iter_mut().for_each(|v| *v /= t);
        match FeatureWeights::normalized(total) {
            Ok(weights) => GiniImportance {
                weights,
                no_split_fallback: false,
            },
            Err(_) => GiniImportance {
                weights: FeatureWeights::uniform(p),
                no_split_fallback: true,
            },
        }
    }

    /// Out-of-bag accuracy: majority vote per row over trees where the row
    /// was not drawn; rows in-bag everywhere are skipped.
    pub fn oob_accuracy(&self, data: &Dataset) -> Result<f64> {
        if !self.meta.per_tree_bootstrap {
            return Err(Error::NoOobRows);
        }
        if data.n_features() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: data.n_features(),
            });
        }
        let n = data.n_rows();
        let votes: Vec<[u32; 2]> = self
            .trees
            .par_iter()
            .enumerate()
            .map(|(t, tree)| {
                let mut seen = vec![false; n];
                for &i in &self.meta.in_bag[t] {
                    seen[i] = true;
                }
                let mut local = vec![[0u32; 2]; n];
                for (i, flag) in seen.iter().enumerate() {
                    if !flag {
                        let leaf_id = tree.route_with(|j| data.value(i, j));
                        let pred = tree.leaf(leaf_id).expect("routed to leaf").prediction;
                        local[i][pred as usize] += 1;
                    }
                }
                local
            })
            .reduce(
                || vec![[0u32; 2]; n],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        x[0] += y[0];
                        x[1] += y[1];
                    }
                    a
                },
            );
        let mut correct = 0usize;
        let mut counted = 0usize;
        for (i, v) in votes.iter().enumerate() {
            if v[0] + v[1] == 0 {
                continue;
            }
            counted += 1;
            let pred = u8::from(v[1] > v[0]);
            if pred == data.response(i) {
                correct += 1;
            }
        }
        if counted == 0 {
            return Err(Error::NoOobRows);
        }
        Ok(correct as f64 / counted as f64)
    }

    /// Serialize to a versioned JSON document.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema_version: u32,
            forest: &'a Forest,
        }
        serde_json::to_string(&Doc {
            schema_version: SCHEMA_VERSION,
            forest: self,
        })
        .expect("forest serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Doc {
            schema_version: u32,
            forest: Forest,
        }
        let doc: Doc = serde_json::from_str(text)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion(doc.schema_version));
        }
        Ok(doc.forest)
    }
}

/// One split on a root-to-node path, in path order.
#[derive(Clone, Copy)]
struct PathStep {
    feature: usize,
    positive: bool,
    threshold: f64,
}

struct TreeBuilder<'a> {
    data: &'a Dataset,
    weights: &'a [f64],
    mtry: usize,
    min_leaf: usize,
    max_depth: Option<usize>,
    nodes: Vec<Node>,
}

fn fit_tree(
    data: &Dataset,
    in_bag: &[usize],
    weights: &[f64],
    mtry: usize,
    params: &ForestParams,
    rng: &mut ChaCha8Rng,
) -> Tree {
    let mut builder = TreeBuilder {
        data,
        weights,
        mtry,
        min_leaf: params.min_leaf,
        max_depth: params.max_depth,
        nodes: Vec::new(),
    };
    let mut path = Vec::new();
    let rows: Vec<usize> = in_bag.to_vec();
    builder.grow(rows, 0, &mut path, rng);
    Tree {
        nodes: builder.nodes,
    }
}

impl TreeBuilder<'_> {
    /// Grow the subtree for `rows`; returns its node id.
    fn grow(
        &mut self,
        rows: Vec<usize>,
        depth: usize,
        path: &mut Vec<PathStep>,
        rng: &mut ChaCha8Rng,
    ) -> usize {
        let counts = self.count(&rows);
        let splittable = counts[0] > 0
            && counts[1] > 0
            && rows.len() >= 2 * self.min_leaf
            && self.max_depth.is_none_or(|d| depth < d);
        let best = if splittable {
            self.best_split(&rows, rng)
        } else {
            None
        };
        match best {
            None => self.push_leaf(counts, path),
            Some(split) => {
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                    .into_iter()
                    .partition(|&i| self.data.value(i, split.feature) < split.threshold);
                let id = self.nodes.len();
                // placeholder; children ids patched after recursion
                self.nodes.push(Node::Internal {
                    feature: split.feature,
                    threshold: split.threshold,
                    left: 0,
                    right: 0,
                });
                path.push(PathStep {
                    feature: split.feature,
                    positive: false,
                    threshold: split.threshold,
                });
                let left = self.grow(left_rows, depth + 1, path, rng);
                path.last_mut().expect("pushed above").positive = true;
                let right = self.grow(right_rows, depth + 1, path, rng);
                path.pop();
                match &mut self.nodes[id] {
                    Node::Internal {
                        left: l, right: r, ..
                    } => {
                        *l = left;
                        *r = right;
                    }
                    _ => unreachable!(),
                }
                id
            }
        }
    }

    fn count(&self, rows: &[usize]) -> [u64; 2] {
        let mut counts = [0u64; 2];
        for &i in rows {
            counts[self.data.response(i) as usize] += 1;
        }
        counts
    }

    fn push_leaf(&mut self, class_counts: [u64; 2], path: &[PathStep]) -> usize {
        let mut signed_splits: Vec<SignedSplit> = Vec::new();
        let mut region = Hyperrectangle::unbounded();
        for step in path {
            region.tighten(step.feature, step.positive, step.threshold);
            if !signed_splits.iter().any(|s| s.feature == step.feature) {
                signed_splits.push(SignedSplit {
                    feature: step.feature,
                    positive: step.positive,
                    threshold: step.threshold,
                });
            }
        }
        signed_splits.sort_by_key(|s| s.feature);
        let prediction = u8::from(class_counts[1] > class_counts[0]);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(Leaf {
            prediction,
            class_counts,
            signed_splits,
            region,
        }));
        id
    }

    /// Best positive-decrease split over a weighted draw of `mtry` distinct
    /// candidate features. Ties break on lowest feature index, then lowest
    /// threshold.
    fn best_split(&self, rows: &[usize], rng: &mut ChaCha8Rng) -> Option<CandidateSplit> {
        let candidates = sample_weighted_distinct(self.weights, self.mtry, rng);
        let parent = self.count(rows);
        let m = rows.len() as f64;
        let parent_gini = gini(&parent);
        let mut best: Option<CandidateSplit> = None;
        let mut scratch: Vec<(f64, u8)> = Vec::with_capacity(rows.len());
        for feature in candidates {
            scratch.clear();
            scratch.extend(
                rows.iter()
                    .map(|&i| (self.data.value(i, feature), self.data.response(i))),
            );
            scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = [0u64; 2];
            for i in 1..scratch.len() {
                left[scratch[i - 1].1 as usize] += 1;
                let (lo, hi) = (scratch[i - 1].0, scratch[i].0);
                if lo == hi {
                    continue;
                }
                if i < self.min_leaf || scratch.len() - i < self.min_leaf {
                    continue;
                }
                let threshold = lo / 2.0 + hi / 2.0;
                // Guard against midpoint collapsing onto the lower value for
                // adjacent floats; the right side may equal `hi`.
                if !(threshold > lo && threshold <= hi) {
                    continue;
                }
                let right = [parent[0] - left[0], parent[1] - left[1]];
                let ml = i as f64;
                let mr = m - ml;
                let decrease = parent_gini - (ml / m) * gini(&left) - (mr / m) * gini(&right);
                if decrease <= 0.0 {
                    continue;
                }
                let candidate = CandidateSplit {
                    decrease,
                    feature,
                    threshold,
                };
                if best.as_ref().is_none_or(|b| candidate.beats(b)) {
                    best = Some(candidate);
                }
            }
        }
        best
    }
}

struct CandidateSplit {
    decrease: f64,
    feature: usize,
    threshold: f64,
}

impl CandidateSplit {
    fn beats(&self, other: &CandidateSplit) -> bool {
        if self.decrease != other.decrease {
            return self.decrease > other.decrease;
        }
        if self.feature != other.feature {
            return self.feature < other.feature;
        }
        self.threshold < other.threshold
    }
}

/// Sequential weighted draws without replacement; zero-weight features are
/// never sampled. Returns fewer than `mtry` indices when fewer features have
/// positive weight.
fn sample_weighted_distinct(weights: &[f64], mtry: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut pool: Vec<(usize, f64)> = weights
        .iter()
        .enumerate()
        .filter(|&(_, &w)| w > 0.0)
        .map(|(j, &w)| (j, w))
        .collect();
    let mut total: f64 = pool.iter().map(|e| e.1).sum();
    let k = mtry.min(pool.len());
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let r = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = pool.len() - 1;
        for (idx, &(_, w)) in pool.iter().enumerate() {
            acc += w;
            if r < acc {
                pick = idx;
                break;
            }
        }
        let (j, w) = pool.swap_remove(pick);
        total -= w;
        out.push(j);
    }
    out
}
