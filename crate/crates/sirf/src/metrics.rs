//! Importance metrics for signed interactions over an encoded forest.
//!
//! Five quantities per interaction `S` and class `C`:
//!
//! * prevalence `P(S|C)` — tree-averaged fraction of class-`C`-predicted
//!   observations whose leaf path contains `S`;
//! * class difference in prevalence `dP(S|C) = P(S|C) - P(S|1-C)`;
//! * independence of feature selection `I(S|C)` — prevalence minus its best
//!   singleton-factorized expectation;
//! * precision `P(C|S)` — tree-averaged fraction of true class-`C` labels
//!   among observations landing in leaves containing `S` (held-out routing);
//! * increase in precision `dP(C|S)` — precision minus the best
//!   one-smaller subset's precision.
//!
//! Trees lacking the conditioning event are excluded from averages rather
//! than contributing zero; each value reports how many trees were valid. A
//! metric with no valid tree is undefined (`None`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::interactions::{EncodedLeafTable, SignedInteraction, SignedSet};

/// A metric value together with the number of trees it averaged over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: Option<f64>,
    pub n_valid_trees: usize,
}

impl MetricValue {
    fn undefined() -> Self {
        MetricValue {
            value: None,
            n_valid_trees: 0,
        }
    }

    fn from_parts(sum: f64, n_valid: usize) -> Self {
        if n_valid == 0 {
            Self::undefined()
        } else {
            MetricValue {
                value: Some(sum / n_valid as f64),
                n_valid_trees: n_valid,
            }
        }
    }
}

/// Prevalence `P(S|C)` on a training-routed table.
pub fn prevalence(table: &EncodedLeafTable, s: &SignedSet, class: u8) -> Option<f64> {
    prevalence_detailed(table, s, class).value
}

pub fn prevalence_detailed(table: &EncodedLeafTable, s: &SignedSet, class: u8) -> MetricValue {
    let mut sum = 0.0;
    let mut n_valid = 0;
    for records in table.iter_trees() {
        let mut with_s = 0u64;
        let mut total = 0u64;
        for rec in records {
            if rec.prediction != class {
                continue;
            }
            let mass = rec.routed_total();
            total += mass;
            if s.is_subset_of(&rec.signed_set) {
                with_s += mass;
            }
        }
        if total > 0 {
            sum += with_s as f64 / total as f64;
            n_valid += 1;
        }
    }
    MetricValue::from_parts(sum, n_valid)
}

/// Class difference in prevalence `dP(S|C)`.
///
/// A tree is valid only when both classes have predicted mass, which keeps
/// the antisymmetry `dP(S|C) = -dP(S|1-C)` exact.
pub fn delta_prevalence(table: &EncodedLeafTable, s: &SignedSet, class: u8) -> Option<f64> {
    delta_prevalence_detailed(table, s, class).value
}

pub fn delta_prevalence_detailed(
    table: &EncodedLeafTable,
    s: &SignedSet,
    class: u8,
) -> MetricValue {
    let other = 1 - class;
    let mut sum = 0.0;
    let mut n_valid = 0;
    for records in table.iter_trees() {
        let mut with_s = [0u64; 2];
        let mut total = [0u64; 2];
        for rec in records {
            let c = rec.prediction as usize;
            let mass = rec.routed_total();
            total[c] += mass;
            if s.is_subset_of(&rec.signed_set) {
                with_s[c] += mass;
            }
        }
        if total[class as usize] > 0 && total[other as usize] > 0 {
            let p = with_s[class as usize] as f64 / total[class as usize] as f64;
            let q = with_s[other as usize] as f64 / total[other as usize] as f64;
            sum += p - q;
            n_valid += 1;
        }
    }
    MetricValue::from_parts(sum, n_valid)
}

/// Independence of feature selection `I(S|C)`; undefined for `|S| < 2`.
///
/// Maximizes `P(S|C) - P(S'|C) * P(S\S'|C)` over singleton members `S'`.
pub fn independence(table: &EncodedLeafTable, s: &SignedSet, class: u8) -> Option<f64> {
    independence_detailed(table, s, class).value
}

pub fn independence_detailed(table: &EncodedLeafTable, s: &SignedSet, class: u8) -> MetricValue {
    if s.len() < 2 {
        return MetricValue::undefined();
    }
    let whole = prevalence_detailed(table, s, class);
    let Some(p_whole) = whole.value else {
        return MetricValue::undefined();
    };
    let mut best = f64::NEG_INFINITY;
    for (k, &g) in s.members().iter().enumerate() {
        let singleton = SignedSet::new([g]).expect("member is nonzero");
        let mut rest_members = s.members().to_vec();
        rest_members.remove(k);
        let rest = SignedSet::new(rest_members).expect("canonical subset");
        let (Some(p_single), Some(p_rest)) = (
            prevalence(table, &singleton, class),
            prevalence(table, &rest, class),
        ) else {
            return MetricValue::undefined();
        };
        best = best.max(p_whole - p_single * p_rest);
    }
    MetricValue {
        value: Some(best),
        n_valid_trees: whole.n_valid_trees,
    }
}

/// Precision `P(C|S)` on an eval-routed table (held-out data).
///
/// Per tree: among routed observations landing in leaves whose path contains
/// `S`, the fraction with true label `C`; averaged over trees where at least
/// one observation lands in such a leaf.
pub fn precision(eval_table: &EncodedLeafTable, s: &SignedSet, class: u8) -> Option<f64> {
    precision_detailed(eval_table, s, class).value
}

pub fn precision_detailed(eval_table: &EncodedLeafTable, s: &SignedSet, class: u8) -> MetricValue {
    let mut sum = 0.0;
    let mut n_valid = 0;
    for records in eval_table.iter_trees() {
        let mut labeled = 0u64;
        let mut total = 0u64;
        for rec in records {
            if s.is_subset_of(&rec.signed_set) {
                total += rec.routed_total();
                labeled += rec.routed[class as usize];
            }
        }
        if total > 0 {
            sum += labeled as f64 / total as f64;
            n_valid += 1;
        }
    }
    MetricValue::from_parts(sum, n_valid)
}

/// Increase in precision `dP(C|S)`; undefined for `|S| < 2`.
///
/// Minimizes `P(C|S) - P(C|S')` over subsets `S'` with one member removed;
/// subsets with undefined precision are skipped, and the result is undefined
/// when `P(C|S)` is undefined or every subset is.
pub fn delta_precision(eval_table: &EncodedLeafTable, s: &SignedSet, class: u8) -> Option<f64> {
    delta_precision_detailed(eval_table, s, class).value
}

pub fn delta_precision_detailed(
    eval_table: &EncodedLeafTable,
    s: &SignedSet,
    class: u8,
) -> MetricValue {
    if s.len() < 2 {
        return MetricValue::undefined();
    }
    let whole = precision_detailed(eval_table, s, class);
    let Some(p_whole) = whole.value else {
        return MetricValue::undefined();
    };
    let mut best: Option<f64> = None;
    for sub in s.drop_one() {
        if let Some(p_sub) = precision(eval_table, &sub, class) {
            let gap = p_whole - p_sub;
            best = Some(best.map_or(gap, |b: f64| b.min(gap)));
        }
    }
    match best {
        Some(v) => MetricValue {
            value: Some(v),
            n_valid_trees: whole.n_valid_trees,
        },
        None => MetricValue::undefined(),
    }
}

/// All five metrics for one interaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub interaction: SignedInteraction,
    pub prevalence: MetricValue,
    pub delta_prevalence: MetricValue,
    pub independence: MetricValue,
    pub precision: MetricValue,
    pub delta_precision: MetricValue,
}

impl MetricReport {
    /// Compute all five metrics; undefined fields stay `None`, nothing aborts.
    pub fn compute(
        train_table: &EncodedLeafTable,
        eval_table: &EncodedLeafTable,
        interaction: &SignedInteraction,
        class: u8,
    ) -> Self {
        MetricReport {
            interaction: interaction.clone(),
            prevalence: prevalence_detailed(train_table, interaction, class),
            delta_prevalence: delta_prevalence_detailed(train_table, interaction, class),
            independence: independence_detailed(train_table, interaction, class),
            precision: precision_detailed(eval_table, interaction, class),
            delta_precision: delta_precision_detailed(eval_table, interaction, class),
        }
    }
}

/// Batch evaluation over a candidate list, parallel over candidates.
pub fn evaluate_all(
    train_table: &EncodedLeafTable,
    eval_table: &EncodedLeafTable,
    candidates: &[SignedInteraction],
    class: u8,
) -> Vec<MetricReport> {
    candidates
        .par_iter()
        .map(|s| MetricReport::compute(train_table, eval_table, s, class))
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Render reports as CSV with columns `interaction,dP,prev,prec,indep,dPrec`.
pub fn reports_to_csv(reports: &[MetricReport], feature_names: &[String]) -> String {
    let mut out = String::from("interaction,dP,prev,prec,indep,dPrec\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.interaction.render(feature_names),
            fmt_opt(r.delta_prevalence.value),
            fmt_opt(r.prevalence.value),
            fmt_opt(r.precision.value),
            fmt_opt(r.independence.value),
            fmt_opt(r.delta_precision.value),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interactions::LeafRecord;

    fn rec(set: &[i32], prediction: u8, routed: [u64; 2]) -> LeafRecord {
        LeafRecord {
            node_id: 0,
            signed_set: SignedSet::new(set.iter().copied()).unwrap(),
            prediction,
            routed,
        }
    }

    fn si(members: &[i32]) -> SignedInteraction {
        SignedInteraction::from_members(members.iter().copied()).unwrap()
    }

    fn table(trees: Vec<Vec<LeafRecord>>) -> EncodedLeafTable {
        EncodedLeafTable::from_records(trees)
    }

    #[test]
    fn prevalence_hand_example() {
        // Class-1 leaves hold 4 observations, 2 of them on a path containing S.
        let t = table(vec![vec![
            rec(&[1, 2], 1, [0, 2]),
            rec(&[3], 1, [1, 1]),
            rec(&[-1], 0, [3, 0]),
        ]]);
        assert_eq!(prevalence(&t, &si(&[1, 2]), 1), Some(0.5));
        // S on every class-1 path -> 1.0
        let t2 = table(vec![vec![
            rec(&[1, 2], 1, [0, 3]),
            rec(&[1, 2, 5], 1, [0, 1]),
        ]]);
        assert_eq!(prevalence(&t2, &si(&[1]), 1), Some(1.0));
    }

    #[test]
    fn prevalence_subset_monotone() {
        let t = table(vec![
            vec![
                rec(&[1, 2, 3], 1, [0, 4]),
                rec(&[1, 2], 1, [1, 2]),
                rec(&[2], 1, [0, 1]),
            ],
            vec![rec(&[2, 3], 1, [0, 5]), rec(&[-1], 1, [2, 2])],
        ]);
        let small = si(&[2]);
        let big = si(&[2, 3]);
        assert!(prevalence(&t, &small, 1).unwrap() >= prevalence(&t, &big, 1).unwrap());
    }

    #[test]
    fn prevalence_undefined_without_class_mass() {
        let t = table(vec![vec![rec(&[1], 0, [4, 0])]]);
        let v = prevalence_detailed(&t, &si(&[1]), 1);
        assert_eq!(v.value, None);
        assert_eq!(v.n_valid_trees, 0);
    }

    #[test]
    fn delta_prevalence_examples_and_antisymmetry() {
        // S appears only on class-1 paths with prevalence 0.3.
        let t = table(vec![vec![
            rec(&[1, 2], 1, [0, 3]),
            rec(&[3], 1, [0, 7]),
            rec(&[-2], 0, [5, 0]),
        ]]);
        assert_eq!(delta_prevalence(&t, &si(&[1, 2]), 1), Some(0.3));
        // Equal prevalence in both classes -> 0.
        let t2 = table(vec![vec![rec(&[1], 1, [0, 2]), rec(&[1], 0, [2, 0])]]);
        assert_eq!(delta_prevalence(&t2, &si(&[1]), 1), Some(0.0));
        // Antisymmetry, exactly.
        let t3 = table(vec![
            vec![
                rec(&[1, 2], 1, [0, 3]),
                rec(&[2], 0, [4, 1]),
                rec(&[1, 2, 3], 0, [2, 0]),
            ],
            vec![rec(&[1, 2], 1, [1, 5]), rec(&[-1], 0, [3, 0])],
        ]);
        for s in [si(&[1, 2]), si(&[2]), si(&[-1])] {
            let a = delta_prevalence(&t3, &s, 1).unwrap();
            let b = delta_prevalence(&t3, &s, 0).unwrap();
            assert_eq!(a, -b);
        }
    }

    #[test]
    fn delta_prevalence_needs_both_classes() {
        let t = table(vec![vec![rec(&[1], 1, [0, 2])]]);
        assert_eq!(delta_prevalence(&t, &si(&[1]), 1), None);
    }

    #[test]
    fn independence_hand_example() {
        // P({a,b}|1)=0.5, P({a}|1)=0.6, P({b}|1)=0.5 -> I = 0.5 - 0.3 = 0.2.
        let t = table(vec![vec![
            rec(&[1, 2], 1, [0, 5]),
            rec(&[1], 1, [0, 1]),
            rec(&[], 1, [0, 4]),
        ]]);
        let a = si(&[1]);
        let b = si(&[2]);
        let ab = si(&[1, 2]);
        assert_eq!(prevalence(&t, &ab, 1), Some(0.5));
        assert_eq!(prevalence(&t, &a, 1), Some(0.6));
        assert_eq!(prevalence(&t, &b, 1), Some(0.5));
        let i = independence(&t, &ab, 1).unwrap();
        assert!((i - 0.2).abs() < 1e-15);
        // I(S|C) <= P(S|C)
        assert!(i <= prevalence(&t, &ab, 1).unwrap());
        // Undefined on singletons.
        assert_eq!(independence(&t, &a, 1), None);
    }

    #[test]
    fn independence_exact_zero_on_product_table() {
        // Dyadic product construction: P(a)=1/2, P(b)=1/4 over 16 units of
        // class-1 mass; all divisions and the product are exact in binary.
        let t = table(vec![vec![
            rec(&[1, 2], 1, [0, 2]),
            rec(&[1], 1, [0, 6]),
            rec(&[2], 1, [0, 2]),
            rec(&[], 1, [0, 6]),
        ]]);
        assert_eq!(prevalence(&t, &si(&[1]), 1), Some(0.5));
        assert_eq!(prevalence(&t, &si(&[2]), 1), Some(0.25));
        assert_eq!(prevalence(&t, &si(&[1, 2]), 1), Some(0.125));
        assert_eq!(independence(&t, &si(&[1, 2]), 1), Some(0.0));
    }

    #[test]
    fn precision_hand_example_and_complement() {
        // Leaves containing S capture 10 rows, 8 labeled 1.
        let t = table(vec![vec![rec(&[1, 2], 1, [2, 8]), rec(&[3], 0, [5, 5])]]);
        assert_eq!(precision(&t, &si(&[1, 2]), 1), Some(0.8));
        let p1 = precision(&t, &si(&[1, 2]), 1).unwrap();
        let p0 = precision(&t, &si(&[1, 2]), 0).unwrap();
        assert_eq!(p1 + p0, 1.0);
        // S absent from every tree -> undefined.
        assert_eq!(precision(&t, &si(&[9]), 1), None);
    }

    #[test]
    fn delta_precision_hand_example() {
        // P(1|{a,b})=0.8, P(1|{a})=0.5, P(1|{b})=0.7 -> min(0.3, 0.1) = 0.1.
        let t = table(vec![vec![
            rec(&[1, 2], 1, [2, 8]),
            rec(&[1], 0, [10, 4]),
            rec(&[2], 1, [4, 6]),
        ]]);
        assert_eq!(precision(&t, &si(&[1, 2]), 1), Some(0.8));
        assert_eq!(precision(&t, &si(&[1]), 1), Some(0.5));
        assert_eq!(precision(&t, &si(&[2]), 1), Some(0.7));
        let d = delta_precision(&t, &si(&[1, 2]), 1).unwrap();
        let expected = 8.0 / 10.0 - 14.0 / 20.0;
        assert!((d - expected).abs() < 1e-15);
        // Equal-precision subset -> 0.
        let t2 = table(vec![vec![rec(&[1, 2], 1, [1, 1]), rec(&[1], 1, [1, 1])]]);
        assert_eq!(delta_precision(&t2, &si(&[1, 2]), 1), Some(0.0));
        // Undefined on singletons.
        assert_eq!(delta_precision(&t, &si(&[1]), 1), None);
    }

    #[test]
    fn metrics_invariant_under_tree_permutation() {
        let trees = vec![
            vec![rec(&[1, 2], 1, [0, 6]), rec(&[-3], 0, [4, 1])],
            vec![rec(&[1], 1, [2, 3]), rec(&[1, 2], 0, [5, 0])],
            vec![rec(&[2], 1, [0, 9])],
        ];
        let mut reversed = trees.clone();
        reversed.reverse();
        let a = table(trees);
        let b = table(reversed);
        for s in [si(&[1]), si(&[1, 2]), si(&[2])] {
            for class in [0u8, 1] {
                let pairs = [
                    (prevalence(&a, &s, class), prevalence(&b, &s, class)),
                    (
                        delta_prevalence(&a, &s, class),
                        delta_prevalence(&b, &s, class),
                    ),
                    (independence(&a, &s, class), independence(&b, &s, class)),
                    (precision(&a, &s, class), precision(&b, &s, class)),
                    (
                        delta_precision(&a, &s, class),
                        delta_precision(&b, &s, class),
                    ),
                ];
                for (x, y) in pairs {
                    match (x, y) {
                        (Some(u), Some(v)) => assert!((u - v).abs() < 1e-12),
                        (None, None) => {}
                        other => panic!("definedness changed under permutation: {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn evaluate_all_matches_scalar_ops_and_handles_edge_cases() {
        let train = table(vec![vec![
            rec(&[1, 2], 1, [0, 6]),
            rec(&[1], 1, [1, 3]),
            rec(&[-2], 0, [4, 0]),
        ]]);
        let eval = table(vec![vec![
            rec(&[1, 2], 1, [2, 8]),
            rec(&[1], 0, [5, 5]),
            rec(&[-2], 0, [3, 1]),
        ]]);
        assert!(evaluate_all(&train, &eval, &[], 1).is_empty());
        let candidates = vec![si(&[1]), si(&[1, 2]), si(&[9])];
        let reports = evaluate_all(&train, &eval, &candidates, 1);
        for r in &reports {
            assert_eq!(r.prevalence.value, prevalence(&train, &r.interaction, 1));
            assert_eq!(
                r.delta_prevalence.value,
                delta_prevalence(&train, &r.interaction, 1)
            );
            assert_eq!(
                r.independence.value,
                independence(&train, &r.interaction, 1)
            );
            assert_eq!(r.precision.value, precision(&eval, &r.interaction, 1));
            assert_eq!(
                r.delta_precision.value,
                delta_precision(&eval, &r.interaction, 1)
            );
        }
        // singleton: independence and delta_precision undefined, others defined
        assert!(reports[0].independence.value.is_none());
        assert!(reports[0].delta_precision.value.is_none());
        assert!(reports[0].prevalence.value.is_some());
        assert!(reports[0].delta_prevalence.value.is_some());
        assert!(reports[0].precision.value.is_some());
        let csv = reports_to_csv(
            &reports,
            &[
                "a".into(),
                "b".into(),
                "c".into(),
                "d".into(),
                "e".into(),
                "f".into(),
                "g".into(),
                "h".into(),
                "i".into(),
            ],
        );
        assert!(csv.starts_with("interaction,dP,prev,prec,indep,dPrec\n"));
        assert!(csv.contains("a+_b+"));
    }
}
