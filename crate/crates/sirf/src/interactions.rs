//! Signed decision-path encodings and the randomized intersection search.
//!
//! A decision path is encoded as a set of signed feature indices: `+j` when
//! the path constrains `x_j >= t`, `-j` when it constrains `x_j < t` (indices
//! are 1-based inside the sign encoding, 0-based in the public accessors).
//! Sets of such indices describe a decision rule up to threshold. This module
//! provides the set types, the per-leaf encoding of a fitted forest, and the
//! random-intersection search that surfaces signed sets prevalent among the
//! leaves of a given predicted class.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::forest::Forest;
use crate::rng::stream_rng;

/// A canonical, possibly empty set of signed feature indices.
///
/// Members are nonzero `i32`s sorted by absolute value; at most one of
/// `{+j, -j}` is present for any feature `j`. The empty set is legal here (a
/// root-only tree has an empty path); see [`SignedInteraction`] for the
/// nonempty variant used for mined candidates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SignedSet {
    members: Vec<i32>,
}

impl SignedSet {
    /// Empty set (the path of a root-only tree).
    pub fn empty() -> Self {
        SignedSet {
            members: Vec::new(),
        }
    }

    /// Build from raw signed indices, canonicalizing order.
    ///
    /// Duplicates collapse; a feature appearing with both signs is an error.
    pub fn new(members: impl IntoIterator<Item = i32>) -> Result<Self> {
        let mut v: Vec<i32> = members.into_iter().collect();
        for &g in &v {
            if g == 0 {
                return Err(Error::InvalidInteraction("signed index 0".into()));
            }
        }
        v.sort_unstable_by_key(|g| (g.unsigned_abs(), g.signum()));
        v.dedup();
        for w in v.windows(2) {
            if w[0].unsigned_abs() == w[1].unsigned_abs() {
                return Err(Error::InvalidInteraction(format!(
                    "feature {} appears with both signs",
                    w[0].unsigned_abs()
                )));
            }
        }
        Ok(SignedSet { members: v })
    }

    /// Build from `(feature_index, positive)` terms (0-based features).
    pub fn from_terms(terms: impl IntoIterator<Item = (usize, bool)>) -> Result<Self> {
        Self::new(terms.into_iter().map(|(j, pos)| gamma(j, pos)))
    }

    pub fn members(&self) -> &[i32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// 0-based feature indices, ascending.
    pub fn features(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|g| feature_of(*g))
    }

    /// `(feature_index, positive)` terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.members.iter().map(|g| (feature_of(*g), *g > 0))
    }

    pub fn contains(&self, gamma: i32) -> bool {
        self.members
            .binary_search_by_key(&(gamma.unsigned_abs(), gamma.signum()), |g| {
                (g.unsigned_abs(), g.signum())
            })
            .is_ok()
    }

    /// True when every member of `self` appears in `other`.
    pub fn is_subset_of(&self, other: &SignedSet) -> bool {
        let mut it = other.members.iter();
        'outer: for &g in &self.members {
            let a = g.unsigned_abs();
            for &h in it.by_ref() {
                if h == g {
                    continue 'outer;
                }
                if h.unsigned_abs() >= a {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// Set intersection (members present in both with the same sign).
    pub fn intersect(&self, other: &SignedSet) -> SignedSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.members.len() && j < other.members.len() {
            let (a, b) = (self.members[i], other.members[j]);
            let (ka, kb) = (a.unsigned_abs(), b.unsigned_abs());
            if ka == kb {
                if a == b {
                    out.push(a);
                }
                i += 1;
                j += 1;
            } else if ka < kb {
                i += 1;
            } else {
                j += 1;
            }
        }
        SignedSet { members: out }
    }

    /// Drop signs: the same features, all marked positive.
    ///
    /// Unsigned interactions are represented as all-positive signed sets so
    /// the mining and metric machinery applies unchanged.
    pub fn strip_signs(&self) -> SignedSet {
        let mut v: Vec<i32> = self.members.iter().map(|g| g.abs()).collect();
        v.dedup();
        SignedSet { members: v }
    }

    /// All subsets obtained by removing exactly one member.
    pub fn drop_one(&self) -> impl Iterator<Item = SignedSet> + '_ {
        (0..self.members.len()).map(move |k| {
            let mut v = self.members.clone();
            v.remove(k);
            SignedSet { members: v }
        })
    }

    /// Render as `name+_name-_...` using the given feature names.
    pub fn render(&self, feature_names: &[String]) -> String {
        self.members
            .iter()
            .map(|&g| {
                let name = feature_names
                    .get(feature_of(g))
                    .map(String::as_str)
                    .unwrap_or("?");
                format!("{}{}", name, if g > 0 { '+' } else { '-' })
            })
            .collect::<Vec<_>>()
            .join("_")
    }
}

/// Signed index for a split direction: `+ (j+1)` for `x_j >= t`, `-(j+1)` for `x_j < t`.
pub fn gamma(feature: usize, positive: bool) -> i32 {
    let g = feature as i32 + 1;
    if positive {
        g
    } else {
        -g
    }
}

/// 0-based feature index of a signed index.
pub fn feature_of(gamma: i32) -> usize {
    gamma.unsigned_abs() as usize - 1
}

/// A nonempty [`SignedSet`]: the unit mined, scored, and reported.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SignedInteraction(SignedSet);

impl SignedInteraction {
    pub fn new(set: SignedSet) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::InvalidInteraction("empty interaction".into()));
        }
        Ok(SignedInteraction(set))
    }

    /// Convenience constructor from raw signed indices.
    pub fn from_members(members: impl IntoIterator<Item = i32>) -> Result<Self> {
        Self::new(SignedSet::new(members)?)
    }

    pub fn set(&self) -> &SignedSet {
        &self.0
    }

    pub fn into_set(self) -> SignedSet {
        self.0
    }

    /// Parse `name+_name-` notation against a feature-name table.
    ///
    /// Tokens are a feature name followed by a single sign character,
    /// underscore-joined. Names are matched greedily (longest first), so
    /// feature names containing `_` still round-trip through
    /// [`SignedSet::render`].
    pub fn parse(text: &str, feature_names: &[String]) -> Result<Self> {
        let err = |reason: String| Error::InteractionParse {
            text: text.to_string(),
            reason,
        };
        // Longest names first so a name that prefixes another cannot
        // shadow it.
        let mut by_length: Vec<(usize, &str)> = feature_names
            .iter()
            .enumerate()
            .map(|(j, n)| (j, n.as_str()))
            .collect();
        by_length.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));

        let mut terms = Vec::new();
        let mut rest = text;
        loop {
            let Some(&(feature, name)) = by_length.iter().find(|(_, n)| {
                rest.len() > n.len()
                    && rest.starts_with(n)
                    && matches!(rest.as_bytes()[n.len()], b'+' | b'-')
            }) else {
                return Err(err(match rest.find(['+', '-']) {
                    Some(_) => format!("unknown feature at '{rest}'"),
                    None => "token must end with '+' or '-'".to_string(),
                }));
            };
            let positive = rest.as_bytes()[name.len()] == b'+';
            terms.push((feature, positive));
            rest = &rest[name.len() + 1..];
            if rest.is_empty() {
                break;
            }
            rest = rest
                .strip_prefix('_')
                .ok_or_else(|| err("expected '_' between tokens".to_string()))?;
        }
        let set = SignedSet::from_terms(terms).map_err(|e| err(e.to_string()))?;
        SignedInteraction::new(set).map_err(|e| err(e.to_string()))
    }
}

impl Deref for SignedInteraction {
    type Target = SignedSet;
    fn deref(&self) -> &SignedSet {
        &self.0
    }
}

impl fmt::Display for SignedInteraction {
    /// Numeric fallback rendering (e.g. `{-2, +3}`); use
    /// [`SignedSet::render`] for named output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, g) in self.0.members.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g:+}")?;
        }
        write!(f, "}}")
    }
}

/// Which observations are routed when encoding leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EncodeScope {
    /// Route every row of the dataset down every tree (default).
    AllRows,
    /// Route only each tree's in-bag rows (bootstrap multiplicity respected).
    InBagOnly,
}

/// Per-leaf routing summary for one tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafRecord {
    /// Node id of the leaf within its tree.
    pub node_id: usize,
    /// First-split signed encoding of the leaf's decision path.
    pub signed_set: SignedSet,
    /// Leaf's predicted class.
    pub prediction: u8,
    /// Routed observation counts by true class: `routed[c]` rows with label `c`.
    pub routed: [u64; 2],
}

impl LeafRecord {
    pub fn routed_total(&self) -> u64 {
        self.routed[0] + self.routed[1]
    }
}

/// Signed leaf encodings plus routed-observation counts for a whole forest.
///
/// One entry per (tree, leaf), leaves with zero routed rows included. This is
/// the aggregated equivalent of the per-observation (signed set, prediction)
/// pairs: every metric and the intersection search only need per-leaf counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedLeafTable {
    trees: Vec<Vec<LeafRecord>>,
}

impl EncodedLeafTable {
    /// Route `data` through `forest` and tally per-leaf counts.
    pub fn encode(forest: &Forest, data: &Dataset, scope: EncodeScope) -> Result<Self> {
        if data.n_features() != forest.n_features() {
            return Err(Error::DimensionMismatch {
                expected: forest.n_features(),
                got: data.n_features(),
            });
        }
        let trees = forest
            .trees()
            .par_iter()
            .enumerate()
            .map(|(t, tree)| {
                // Dense map node_id -> record slot for this tree.
                let mut slot = vec![usize::MAX; tree.n_nodes()];
                let mut records = Vec::new();
                for (node_id, leaf) in tree.leaves() {
                    slot[node_id] = records.len();
                    records.push(LeafRecord {
                        node_id,
                        signed_set: leaf.signed_set(),
                        prediction: leaf.prediction,
                        routed: [0, 0],
                    });
                }
                let mut tally = |row: usize| {
                    let leaf = tree.route_with(|j| data.value(row, j));
                    let rec = &mut records[slot[leaf]];
                    rec.routed[data.response(row) as usize] += 1;
                };
                match scope {
                    EncodeScope::AllRows => (0..data.n_rows()).for_each(&mut tally),
                    EncodeScope::InBagOnly => forest.in_bag(t).iter().copied().for_each(&mut tally),
                }
                records
            })
            .collect();
        Ok(EncodedLeafTable { trees })
    }

    /// Number of trees represented.
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn tree(&self, t: usize) -> &[LeafRecord] {
        &self.trees[t]
    }

    pub fn iter_trees(&self) -> impl Iterator<Item = &[LeafRecord]> {
        self.trees.iter().map(Vec::as_slice)
    }

    /// Same table with every leaf encoding's signs dropped.
    pub fn strip_signs(&self) -> Self {
        EncodedLeafTable {
            trees: self
                .trees
                .iter()
                .map(|records| {
                    records
                        .iter()
                        .map(|r| LeafRecord {
                            node_id: r.node_id,
                            signed_set: r.signed_set.strip_signs(),
                            prediction: r.prediction,
                            routed: r.routed,
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Build directly from records (tests and report tooling).
    pub fn from_records(trees: Vec<Vec<LeafRecord>>) -> Self {
        EncodedLeafTable { trees }
    }
}

/// Parameters of the random-intersection search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RitParams {
    /// Number of intersection trees grown.
    pub n_trees: usize,
    /// Depth of each intersection tree.
    pub depth: usize,
    /// Children per non-leaf node.
    pub n_children: usize,
    /// Predicted class whose leaves are intersected.
    pub class: u8,
    /// Also collect nonempty sets at internal nodes (permissive variant).
    pub collect_internal: bool,
    pub seed: u64,
}

impl Default for RitParams {
    fn default() -> Self {
        RitParams {
            n_trees: 500,
            depth: 5,
            n_children: 2,
            class: 1,
            collect_internal: false,
            seed: 0,
        }
    }
}

impl RitParams {
    fn validate(&self) -> Result<()> {
        if self.n_trees < 1 {
            return Err(Error::InvalidParameter("rit n_trees must be >= 1".into()));
        }
        if self.depth < 1 {
            return Err(Error::InvalidParameter("rit depth must be >= 1".into()));
        }
        if self.n_children < 2 {
            return Err(Error::InvalidParameter(
                "rit n_children must be >= 2".into(),
            ));
        }
        if self.class > 1 {
            return Err(Error::InvalidParameter("class must be 0 or 1".into()));
        }
        Ok(())
    }
}

/// Search for signed sets prevalent among class-`C` leaves.
///
/// Grows `n_trees` intersection trees. Each root holds one signed set sampled
/// from class-`C` leaves with probability proportional to routed count (the
/// aggregated form of sampling observation/tree pairs uniformly); every child
/// intersects its parent with a fresh sample. Nonempty sets at depth-`depth`
/// nodes (plus internal nodes when `collect_internal`) are returned,
/// deduplicated across trees.
pub fn grit(table: &EncodedLeafTable, params: &RitParams) -> Result<BTreeSet<SignedInteraction>> {
    params.validate()?;
    // Aggregate class-C mass by signed set in canonical order so the sampling
    // distribution is independent of leaf storage order.
    let mut mass: BTreeMap<&SignedSet, u64> = BTreeMap::new();
    for records in table.iter_trees() {
        for rec in records {
            if rec.prediction == params.class && rec.routed_total() > 0 {
                *mass.entry(&rec.signed_set).or_insert(0) += rec.routed_total();
            }
        }
    }
    if mass.is_empty() {
        return Err(Error::NoClassLeaves(params.class));
    }
    let sets: Vec<&SignedSet> = mass.keys().copied().collect();
    let mut cumulative = Vec::with_capacity(sets.len());
    let mut total = 0u64;
    for w in mass.values() {
        total += w;
        cumulative.push(total);
    }

    let per_tree: Vec<Vec<SignedSet>> = (0..params.n_trees)
        .into_par_iter()
        .map(|m| {
            let mut rng = stream_rng(params.seed, m as u64);
            let mut sample = || {
                let r = rng.random_range(0..total);
                let idx = cumulative.partition_point(|&c| c <= r);
                sets[idx]
            };
            let mut found = Vec::new();
            // Depth-first expansion; draws happen in preorder so results are
            // reproducible for a fixed stream.
            let root = sample().clone();
            let mut stack = vec![(root, 0usize)];
            while let Some((set, depth)) = stack.pop() {
                if set.is_empty() {
                    continue;
                }
                if depth == params.depth {
                    found.push(set);
                    continue;
                }
                if params.collect_internal {
                    found.push(set.clone());
                }
                for _ in 0..params.n_children {
                    stack.push((set.intersect(sample()), depth + 1));
                }
            }
            found
        })
        .collect();

    let mut out = BTreeSet::new();
    for sets in per_tree {
        for set in sets {
            out.insert(SignedInteraction::new(set).expect("nonempty by construction"));
        }
    }
    Ok(out)
}
