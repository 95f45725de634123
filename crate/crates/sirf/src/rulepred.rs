//! Rule-group prediction restricted to an interaction's features.
//!
//! For an interaction `S`, every forest leaf whose path contains `S` becomes
//! a member rule: its region restricted to `S`'s features using the first
//! split per feature, its leaf prediction, and its routed-count weight.
//! Restricted regions are one-sided per feature (direction given by the
//! sign), so the raw positive-class score is coordinatewise monotone and
//! depends only on the interacting features.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::forest::Forest;
use crate::interactions::{EncodedLeafTable, SignedInteraction};

/// One-sided bound on a single feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemberBound {
    pub feature: usize,
    /// `true`: fires when `x_j >= threshold`; `false`: fires when `x_j < threshold`.
    pub positive: bool,
    pub threshold: f64,
}

impl MemberBound {
    fn fires(&self, x: f64) -> bool {
        if self.positive {
            x >= self.threshold
        } else {
            x < self.threshold
        }
    }
}

/// A leaf rule restricted to the interaction's features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleMember {
    /// One bound per interaction feature, ascending feature index.
    pub bounds: Vec<MemberBound>,
    /// Leaf prediction.
    pub prediction: u8,
    /// Routed-observation count of the source leaf.
    pub weight: u64,
}

impl RuleMember {
    /// Rule indicator over the interacting features only.
    pub fn fires(&self, x: &[f64]) -> bool {
        self.bounds.iter().all(|b| b.fires(x[b.feature]))
    }
}

/// How grouped predictions combine member rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredictionMode {
    /// Weighted mean of firing members' predictions; falls back to the
    /// weight-averaged prediction over all members when nothing fires.
    WeightedAverage,
    /// Weighted sum of firing members' predictions (unnormalized score).
    RawSum,
}

/// All leaves in a forest whose decision path contains an interaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleGroup {
    pub interaction: SignedInteraction,
    pub members: Vec<RuleMember>,
}

/// Collect the rule group for `S`: every leaf (all trees) whose signed set
/// contains `S`, with regions restricted to `S`'s features via each feature's
/// first split and weights taken from the table's routed counts.
pub fn group_rules(
    forest: &Forest,
    table: &EncodedLeafTable,
    interaction: &SignedInteraction,
) -> Result<RuleGroup> {
    let mut members = Vec::new();
    for (t, records) in table.iter_trees().enumerate() {
        let tree = &forest.trees()[t];
        for rec in records {
            if !interaction.is_subset_of(&rec.signed_set) {
                continue;
            }
            let leaf = tree.leaf(rec.node_id).ok_or(Error::InteractionAbsent)?;
            let bounds = interaction
                .terms()
                .map(|(feature, positive)| {
                    let split = leaf
                        .first_split(feature)
                        .expect("subset member implies a path split");
                    debug_assert_eq!(split.positive, positive);
                    MemberBound {
                        feature,
                        positive,
                        threshold: split.threshold,
                    }
                })
                .collect();
            members.push(RuleMember {
                bounds,
                prediction: rec.prediction,
                weight: rec.routed_total(),
            });
        }
    }
    if members.is_empty() {
        return Err(Error::InteractionAbsent);
    }
    Ok(RuleGroup {
        interaction: interaction.clone(),
        members,
    })
}

impl RuleGroup {
    pub fn total_weight(&self) -> u64 {
        self.members.iter().map(|m| m.weight).sum()
    }

    /// Grouped prediction at a point. Only the interacting features of `x`
    /// are read; they must be finite.
    pub fn predict(&self, x: &[f64], mode: PredictionMode) -> f64 {
        let mut fired_weight = 0.0;
        let mut fired_score = 0.0;
        for m in &self.members {
            if m.fires(x) {
                fired_weight += m.weight as f64;
                fired_score += m.weight as f64 * m.prediction as f64;
            }
        }
        match mode {
            PredictionMode::RawSum => fired_score,
            PredictionMode::WeightedAverage => {
                if fired_weight > 0.0 {
                    fired_score / fired_weight
                } else {
                    // No member constrains x; fall back to the group's
                    // weight-averaged prediction (unweighted when the group
                    // was built from a routing that left every weight zero).
                    let total: f64 = self.members.iter().map(|m| m.weight as f64).sum();
                    if total > 0.0 {
                        let score: f64 = self
                            .members
                            .iter()
                            .map(|m| m.weight as f64 * m.prediction as f64)
                            .sum();
                        score / total
                    } else {
                        let score: f64 = self.members.iter().map(|m| m.prediction as f64).sum();
                        score / self.members.len() as f64
                    }
                }
            }
        }
    }

    /// Weighted first-split threshold distribution for one interacting
    /// feature: the raw `(threshold, weight)` pairs sorted by threshold plus
    /// weighted quantiles at levels 0.1/0.25/0.5/0.75/0.9.
    pub fn threshold_distribution(&self, feature: usize) -> Result<ThresholdDistribution> {
        if !self.interaction.features().any(|j| j == feature) {
            return Err(Error::InvalidParameter(format!(
                "feature {feature} is not part of the interaction"
            )));
        }
        let mut pairs: Vec<(f64, u64)> = self
            .members
            .iter()
            .map(|m| {
                let b = m
                    .bounds
                    .iter()
                    .find(|b| b.feature == feature)
                    .expect("bound per feature");
                (b.threshold, m.weight)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: u64 = pairs.iter().map(|p| p.1).sum();
        let levels = [0.1, 0.25, 0.5, 0.75, 0.9];
        let quantiles = levels
            .iter()
            .map(|&level| {
                let target = level * total as f64;
                let mut cum = 0u64;
                let mut value = pairs.last().expect("nonempty group").0;
                for &(t, w) in &pairs {
                    cum += w;
                    if cum as f64 >= target {
                        value = t;
                        break;
                    }
                }
                (level, value)
            })
            .collect();
        Ok(ThresholdDistribution {
            feature,
            quantiles,
            pairs,
            total_weight: total,
        })
    }
}

/// Weighted empirical distribution of first-split thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDistribution {
    pub feature: usize,
    /// `(level, threshold)` at levels 0.1, 0.25, 0.5, 0.75, 0.9.
    pub quantiles: Vec<(f64, f64)>,
    /// Raw `(threshold, weight)` pairs sorted by threshold.
    pub pairs: Vec<(f64, u64)>,
    pub total_weight: u64,
}

impl ThresholdDistribution {
    pub fn median(&self) -> f64 {
        self.quantiles
            .iter()
            .find(|(level, _)| *level == 0.5)
            .map(|(_, v)| *v)
            .expect("median level present")
    }

    /// CSV rows `feature,quantile,value,weight_mass` (weight_mass = fraction
    /// of group weight at thresholds <= value), without a header.
    pub fn csv_rows(&self, feature_names: &[String]) -> String {
        let name = feature_names
            .get(self.feature)
            .cloned()
            .unwrap_or_else(|| "?".into());
        let mut out = String::new();
        for &(level, value) in &self.quantiles {
            let mass: u64 = self
                .pairs
                .iter()
                .take_while(|&&(t, _)| t <= value)
                .map(|&(_, w)| w)
                .sum();
            let fraction = if self.total_weight > 0 {
                mass as f64 / self.total_weight as f64
            } else {
                0.0
            };
            out.push_str(&format!("{},{},{},{}\n", name, level, value, fraction));
        }
        out
    }

    pub fn to_csv(&self, feature_names: &[String]) -> String {
        format!(
            "feature,quantile,value,weight_mass\n{}",
            self.csv_rows(feature_names)
        )
    }
}

/// Fixing rule for the third feature of an order-3 surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedLevel {
    /// Representative value above the feature's median first-split threshold.
    High,
    /// Representative value below it.
    Low,
}

/// One evaluated surface point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub x: f64,
    pub y: f64,
    pub fixed_level: Option<f64>,
    pub score: f64,
}

/// Response surface of a rule group over a quantile grid of evaluation data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseSurface {
    /// The two free features (ascending feature index).
    pub features: [usize; 2],
    /// Fixed third feature, when the interaction has order 3.
    pub fixed_feature: Option<usize>,
    pub points: Vec<SurfacePoint>,
}

impl ResponseSurface {
    /// CSV with the free features' names as the first two column headers.
    pub fn to_csv(&self, feature_names: &[String]) -> String {
        let name = |j: usize| feature_names.get(j).cloned().unwrap_or_else(|| "?".into());
        let mut out = if self.fixed_feature.is_some() {
            format!(
                "{},{},fixed_level,score\n",
                name(self.features[0]),
                name(self.features[1])
            )
        } else {
            format!(
                "{},{},score\n",
                name(self.features[0]),
                name(self.features[1])
            )
        };
        for p in &self.points {
            match p.fixed_level {
                Some(level) => out.push_str(&format!("{},{},{},{}\n", p.x, p.y, level, p.score)),
                None => out.push_str(&format!("{},{},{}\n", p.x, p.y, p.score)),
            }
        }
        out
    }
}

use crate::data::quantile_sorted as empirical_quantile;

fn sorted_column(data: &Dataset, feature: usize) -> Vec<f64> {
    let mut v = data.column(feature).to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Evaluate the grouped prediction over an empirical-quantile grid of
/// `eval_data` for an order-2 interaction, or an order-3 interaction with
/// `fixed` naming the held feature and its level.
///
/// The fixed feature sits at the median of the evaluation values above (High)
/// or below (Low) its median first-split threshold.
pub fn response_surface(
    group: &RuleGroup,
    eval_data: &Dataset,
    grid_levels: &[f64],
    fixed: Option<(usize, FixedLevel)>,
    mode: PredictionMode,
) -> Result<ResponseSurface> {
    let features: Vec<usize> = group.interaction.features().collect();
    if grid_levels.is_empty() {
        return Err(Error::InvalidParameter("empty grid levels".into()));
    }
    let (free, fixed_feature, fixed_value) = match (features.len(), fixed) {
        (2, None) => ([features[0], features[1]], None, None),
        (3, Some((fixed_feature, level))) => {
            if !features.contains(&fixed_feature) {
                return Err(Error::InvalidParameter(format!(
                    "fixed feature {fixed_feature} not in interaction"
                )));
            }
            let free: Vec<usize> = features
                .iter()
                .copied()
                .filter(|&j| j != fixed_feature)
                .collect();
            let median_threshold = group.threshold_distribution(fixed_feature)?.median();
            let column = sorted_column(eval_data, fixed_feature);
            let side: Vec<f64> = match level {
                FixedLevel::High => column
                    .iter()
                    .copied()
                    .filter(|&v| v >= median_threshold)
                    .collect(),
                FixedLevel::Low => column
                    .iter()
                    .copied()
                    .filter(|&v| v < median_threshold)
                    .collect(),
            };
            let value = if side.is_empty() {
                median_threshold
            } else {
                empirical_quantile(&side, 0.5)
            };
            ([free[0], free[1]], Some(fixed_feature), Some(value))
        }
        (2, Some(_)) => {
            return Err(Error::InvalidParameter(
                "order-2 interaction takes no fixed feature".into(),
            ))
        }
        (3, None) => {
            return Err(Error::InvalidParameter(
                "order-3 interaction needs a fixed feature and level".into(),
            ))
        }
        (order, _) => {
            return Err(Error::InvalidParameter(format!(
                "response surface supports order 2 or 3, got {order}"
            )))
        }
    };

    let grids: Vec<Vec<f64>> = free
        .iter()
        .map(|&j| {
            let sorted = sorted_column(eval_data, j);
            grid_levels
                .iter()
                .map(|&q| empirical_quantile(&sorted, q))
                .collect()
        })
        .collect();

    let mut x = vec![0.0; eval_data.n_features().max(free[0].max(free[1]) + 1)];
    if let (Some(j), Some(v)) = (fixed_feature, fixed_value) {
        x[j] = v;
    }
    let mut points = Vec::with_capacity(grid_levels.len() * grid_levels.len());
    for &gx in &grids[0] {
        for &gy in &grids[1] {
            x[free[0]] = gx;
            x[free[1]] = gy;
            points.push(SurfacePoint {
                x: gx,
                y: gy,
                fixed_level: fixed_value,
                score: group.predict(&x, mode),
            });
        }
    }
    Ok(ResponseSurface {
        features: free,
        fixed_feature,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::forest::{FeatureWeights, Forest, ForestParams};
    use crate::interactions::{EncodeScope, SignedInteraction};
    use crate::rng::stream_rng;
    use rand_distr::{Distribution, StandardNormal};

    fn si(members: &[i32]) -> SignedInteraction {
        SignedInteraction::from_members(members.iter().copied()).unwrap()
    }

    fn gaussian(n: usize, p: usize, seed: u64, label: impl Fn(&[f64]) -> u8) -> Dataset {
        let mut rng = stream_rng(seed, 0);
        let mut columns = vec![Vec::with_capacity(n); p];
        let mut responses = Vec::with_capacity(n);
        for _ in 0..n {
            let row: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
            responses.push(label(&row));
            for (j, &v) in row.iter().enumerate() {
                columns[j].push(v);
            }
        }
        let names = (0..p).map(|j| format!("x{}", j + 1)).collect();
        Dataset::from_columns(columns, responses, names).unwrap()
    }

    fn fitted(
        n: usize,
        p: usize,
        seed: u64,
        label: impl Fn(&[f64]) -> u8,
    ) -> (Forest, EncodedLeafTable, Dataset) {
        let d = gaussian(n, p, seed, label);
        let params = ForestParams {
            n_trees: 15,
            seed,
            ..ForestParams::default()
        };
        let f = Forest::fit(&d, &FeatureWeights::uniform(p), &params).unwrap();
        let table = EncodedLeafTable::encode(&f, &d, EncodeScope::AllRows).unwrap();
        (f, table, d)
    }

    #[test]
    fn stump_group_has_single_one_sided_member() {
        // One perfectly separating feature -> a stump per tree.
        let d = Dataset::from_columns(
            vec![vec![1.0, 1.0, 1.0, 1.0], vec![-2.0, -1.0, 1.0, 2.0]],
            vec![0, 0, 1, 1],
            vec!["x1".into(), "x2".into()],
        )
        .unwrap();
        let params = ForestParams {
            n_trees: 1,
            mtry: Some(2),
            per_tree_bootstrap: false,
            ..ForestParams::default()
        };
        let f = Forest::fit(&d, &FeatureWeights::uniform(2), &params).unwrap();
        let table = EncodedLeafTable::encode(&f, &d, EncodeScope::AllRows).unwrap();
        let g = group_rules(&f, &table, &si(&[2])).unwrap();
        assert_eq!(g.members.len(), 1);
        let m = &g.members[0];
        assert_eq!(m.prediction, 1);
        assert_eq!(m.bounds.len(), 1);
        assert!(m.bounds[0].positive);
        assert_eq!(m.bounds[0].threshold, 0.0);
        assert_eq!(m.weight, 2);
        // The left leaf carries the opposite sign.
        let left = group_rules(&f, &table, &si(&[-2])).unwrap();
        assert_eq!(left.members.len(), 1);
        assert!(!left.members[0].bounds[0].positive);
        // Feature 1 is constant and never split: absent interaction errors.
        assert!(matches!(
            group_rules(&f, &table, &si(&[1])),
            Err(Error::InteractionAbsent)
        ));
    }

    #[test]
    fn member_count_matches_enumeration_oracle() {
        let (f, table, _) = fitted(300, 5, 23, |r| u8::from(r[0] > 0.0 && r[1] > 0.0));
        for s in [si(&[1]), si(&[1, 2]), si(&[-3])] {
            // Oracle: re-derive each leaf's signed set by walking the tree
            // from the root, independent of the fit-time path bookkeeping.
            let mut oracle = 0usize;
            for tree in f.trees() {
                let mut stack = vec![(0usize, Vec::<i32>::new())];
                while let Some((id, path)) = stack.pop() {
                    match tree.node(id) {
                        crate::forest::Node::Internal {
                            feature,
                            left,
                            right,
                            ..
                        } => {
                            let mut l = path.clone();
                            let mut r = path.clone();
                            let gneg = crate::interactions::gamma(*feature, false);
                            let gpos = crate::interactions::gamma(*feature, true);
                            if !path.iter().any(|g| g.unsigned_abs() == gneg.unsigned_abs()) {
                                l.push(gneg);
                                r.push(gpos);
                            }
                            stack.push((*left, l));
                            stack.push((*right, r));
                        }
                        crate::forest::Node::Leaf(_) => {
                            let set = crate::interactions::SignedSet::new(path.clone()).unwrap();
                            if s.is_subset_of(&set) {
                                oracle += 1;
                            }
                        }
                    }
                }
            }
            match group_rules(&f, &table, &s) {
                Ok(g) => assert_eq!(g.members.len(), oracle, "interaction {s}"),
                Err(_) => assert_eq!(oracle, 0, "interaction {s}"),
            }
        }
    }

    #[test]
    fn first_split_bound_used_for_repeated_features() {
        // Deep path splitting the same feature repeatedly: the restricted
        // region must use the first threshold only.
        let values: Vec<f64> = (0..32).map(|i| i as f64).collect();
        let responses: Vec<u8> = (0..32).map(|i| u8::from((8..16).contains(&i))).collect();
        let d = Dataset::from_columns(vec![values], responses, vec!["x1".into()]).unwrap();
        let params = ForestParams {
            n_trees: 1,
            mtry: Some(1),
            per_tree_bootstrap: false,
            ..ForestParams::default()
        };
        let f = Forest::fit(&d, &FeatureWeights::uniform(1), &params).unwrap();
        let table = EncodedLeafTable::encode(&f, &d, EncodeScope::AllRows).unwrap();
        let g = group_rules(&f, &table, &si(&[1])).unwrap();
        // Every member fires for arbitrarily large x even though the full
        // rule may cap the interval above (first split is one-sided >=).
        for m in &g.members {
            assert!(m.fires(&[1e12]));
        }
    }

    #[test]
    fn predict_modes_and_fallback() {
        let all_ones = RuleGroup {
            interaction: si(&[1, 2]),
            members: vec![
                RuleMember {
                    bounds: vec![
                        MemberBound {
                            feature: 0,
                            positive: true,
                            threshold: 0.0,
                        },
                        MemberBound {
                            feature: 1,
                            positive: true,
                            threshold: 1.0,
                        },
                    ],
                    prediction: 1,
                    weight: 3,
                },
                RuleMember {
                    bounds: vec![
                        MemberBound {
                            feature: 0,
                            positive: true,
                            threshold: -1.0,
                        },
                        MemberBound {
                            feature: 1,
                            positive: true,
                            threshold: 0.5,
                        },
                    ],
                    prediction: 1,
                    weight: 7,
                },
            ],
        };
        // Inside every region: weighted average is exactly 1.
        assert_eq!(
            all_ones.predict(&[2.0, 2.0], PredictionMode::WeightedAverage),
            1.0
        );
        assert_eq!(all_ones.predict(&[2.0, 2.0], PredictionMode::RawSum), 10.0);
        // Below every threshold nothing fires: raw sum 0, average falls back
        // to the weight-averaged prediction (1.0 here).
        assert_eq!(all_ones.predict(&[-5.0, -5.0], PredictionMode::RawSum), 0.0);
        assert_eq!(
            all_ones.predict(&[-5.0, -5.0], PredictionMode::WeightedAverage),
            1.0
        );
    }

    #[test]
    fn raw_score_is_coordinatewise_monotone() {
        let (f, table, _) = fitted(250, 4, 31, |r| u8::from(r[0] > 0.3 && r[1] > -0.2));
        let g = match group_rules(&f, &table, &si(&[1, 2])) {
            Ok(g) => g,
            Err(_) => return, // not proposed by this forest; other tests cover it
        };
        let grid: Vec<f64> = (-8..=8).map(|i| i as f64 / 4.0).collect();
        let mut previous_row: Option<Vec<f64>> = None;
        for &a in &grid {
            let mut row = Vec::new();
            let mut prev = f64::NEG_INFINITY;
            for &b in &grid {
                let score = g.predict(&[a, b, 0.0, 0.0], PredictionMode::RawSum);
                assert!(score >= prev, "nondecreasing in x2");
                prev = score;
                row.push(score);
            }
            if let Some(prow) = previous_row {
                for (new, old) in row.iter().zip(&prow) {
                    assert!(new >= old, "nondecreasing in x1");
                }
            }
            previous_row = Some(row);
        }
    }

    #[test]
    fn prediction_ignores_non_interacting_coordinates() {
        let (f, table, _) = fitted(250, 5, 37, |r| u8::from(r[1] > 0.0 && r[2] > 0.0));
        let g = group_rules(&f, &table, &si(&[2, 3])).unwrap();
        let base = [0.3, 0.8, -0.4, 0.0, 0.0];
        let score = g.predict(&base, PredictionMode::WeightedAverage);
        for j in [0usize, 3, 4] {
            let mut x = base;
            x[j] = 99.0;
            assert_eq!(g.predict(&x, PredictionMode::WeightedAverage), score);
            x[j] = -99.0;
            assert_eq!(
                g.predict(&x, PredictionMode::RawSum),
                g.predict(&base, PredictionMode::RawSum)
            );
        }
    }

    #[test]
    fn threshold_distribution_point_mass_and_monotone_quantiles() {
        let g = RuleGroup {
            interaction: si(&[1]),
            members: vec![
                RuleMember {
                    bounds: vec![MemberBound {
                        feature: 0,
                        positive: true,
                        threshold: 2.5,
                    }],
                    prediction: 1,
                    weight: 4,
                },
                RuleMember {
                    bounds: vec![MemberBound {
                        feature: 0,
                        positive: true,
                        threshold: 2.5,
                    }],
                    prediction: 0,
                    weight: 1,
                },
            ],
        };
        let dist = g.threshold_distribution(0).unwrap();
        for (_, v) in &dist.quantiles {
            assert_eq!(*v, 2.5);
        }
        assert!(g.threshold_distribution(3).is_err());

        let (f, table, _) = fitted(300, 3, 41, |r| u8::from(r[0] > 0.5));
        let g = group_rules(&f, &table, &si(&[1])).unwrap();
        let dist = g.threshold_distribution(0).unwrap();
        for pair in dist.quantiles.windows(2) {
            assert!(pair[0].1 <= pair[1].1, "quantiles monotone in level");
        }
        let csv = dist.to_csv(&["x1".into(), "x2".into(), "x3".into()]);
        assert!(csv.starts_with("feature,quantile,value,weight_mass\n"));
        assert_eq!(csv.lines().count(), 6);
    }

    #[test]
    fn surface_shapes_and_flat_group() {
        let (f, table, d) = fitted(300, 4, 47, |r| u8::from(r[0] > 0.2 && r[1] > 0.2));
        let g = group_rules(&f, &table, &si(&[1, 2])).unwrap();
        let levels: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        let surface =
            response_surface(&g, &d, &levels, None, PredictionMode::WeightedAverage).unwrap();
        assert_eq!(surface.points.len(), levels.len() * levels.len());
        let csv = surface.to_csv(d.feature_names());
        assert!(csv.starts_with("x1,x2,score\n"));

        // Constant-prediction group -> flat surface.
        let flat = RuleGroup {
            interaction: si(&[1, 2]),
            members: vec![RuleMember {
                bounds: vec![
                    MemberBound {
                        feature: 0,
                        positive: true,
                        threshold: f64::MIN,
                    },
                    MemberBound {
                        feature: 1,
                        positive: true,
                        threshold: f64::MIN,
                    },
                ],
                prediction: 1,
                weight: 5,
            }],
        };
        let s =
            response_surface(&flat, &d, &levels, None, PredictionMode::WeightedAverage).unwrap();
        assert!(s.points.iter().all(|p| p.score == 1.0));

        // Order-3 requires a fixed feature; order-2 rejects one.
        assert!(response_surface(
            &g,
            &d,
            &levels,
            Some((0, FixedLevel::High)),
            PredictionMode::WeightedAverage
        )
        .is_err());
        let g3 = match group_rules(&f, &table, &si(&[1, 2, 3])) {
            Ok(g3) => g3,
            Err(_) => return,
        };
        assert!(response_surface(&g3, &d, &levels, None, PredictionMode::WeightedAverage).is_err());
        let s3 = response_surface(
            &g3,
            &d,
            &levels,
            Some((2, FixedLevel::High)),
            PredictionMode::WeightedAverage,
        )
        .unwrap();
        assert_eq!(s3.fixed_feature, Some(2));
        assert!(s3.points.iter().all(|p| p.fixed_level.is_some()));
    }
}
