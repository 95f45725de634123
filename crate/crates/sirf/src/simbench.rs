//! Gaussian simulation benchmark: generative AND-rule models, ground-truth
//! labeling of recovered interactions, and precision-recall scoring of the
//! unsigned / signed / signed-filtered pipelines.

use serde::{Deserialize, Serialize};

use crate::data::{quantile_sorted, Dataset};
use crate::error::{Error, Result};
use crate::interactions::{SignedInteraction, SignedSet};
use crate::irf::{IrfModel, IrfParams};
use crate::rng::{derive_seed, stream_rng};
use crate::stability::{run_with_modes, StabilityParams, StabilityReport};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// One conjunct of a generative AND rule.
///
/// A positive term fires when `x_j > t`, a negative one when `x_j <= t`,
/// where `t` is the empirical quantile of column `j` at `level`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleTerm {
    pub feature: usize,
    pub positive: bool,
    /// Quantile level of the threshold, in (0, 1).
    pub level: f64,
}

/// A conjunction of rule terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AndRule {
    pub terms: Vec<RuleTerm>,
}

impl AndRule {
    /// The rule's signed ground-truth interaction.
    pub fn signed(&self) -> SignedInteraction {
        SignedInteraction::new(
            SignedSet::from_terms(self.terms.iter().map(|t| (t.feature, t.positive)))
                .expect("distinct rule features"),
        )
        .expect("nonempty rule")
    }
}

/// How rule indicators combine into the response probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Combine {
    /// `pi = scale * 1(any rule fires)`.
    Any,
    /// `pi = scale * sum(rule indicators)`.
    Sum,
}

/// Which generative model a spec instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimModel {
    SingleAnd,
    MultiAnd,
    AdditiveAnd,
}

impl SimModel {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "single-and" => Ok(SimModel::SingleAnd),
            "multi-and" => Ok(SimModel::MultiAnd),
            "additive-and" => Ok(SimModel::AdditiveAnd),
            other => Err(Error::InvalidParameter(format!("unknown model '{other}'"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SimModel::SingleAnd => "single-and",
            SimModel::MultiAnd => "multi-and",
            SimModel::AdditiveAnd => "additive-and",
        }
    }
}

/// Generative model description.
///
/// Features are i.i.d. standard Gaussian; responses are Bernoulli with
/// success probability `pi_scale` times the combined rule indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub model: SimModel,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub pi_scale: f64,
    pub combine: Combine,
    /// Ground-truth rules (each rule's signed set is an active maximal set).
    pub rules: Vec<AndRule>,
}

/// Tail probability 0.1 per AND rule: each conjunct holds with probability
/// `0.1^(1/k)` for a k-term rule, so positive levels sit at `1 - 0.1^(1/k)`
/// and negative levels at `0.1^(1/k)`.
fn rule_level(order: usize) -> f64 {
    0.1f64.powf(1.0 / order as f64)
}

impl SimulationSpec {
    /// Single AND of four high-level features (1-4).
    pub fn single_and(n: usize, p: usize, seed: u64) -> Self {
        let tail = rule_level(4);
        let terms = (0..4)
            .map(|j| RuleTerm {
                feature: j,
                positive: true,
                level: 1.0 - tail,
            })
            .collect();
        SimulationSpec {
            model: SimModel::SingleAnd,
            n,
            p,
            seed,
            pi_scale: 0.8,
            combine: Combine::Any,
            rules: vec![AndRule { terms }],
        }
    }

    /// Two mirrored AND rules over the same four features.
    pub fn multi_and(n: usize, p: usize, seed: u64) -> Self {
        let tail = rule_level(4);
        let high = 1.0 - tail;
        let low = tail;
        let rule = |signs: [bool; 4]| AndRule {
            terms: (0..4)
                .map(|j| RuleTerm {
                    feature: j,
                    positive: signs[j],
                    level: if signs[j] { high } else { low },
                })
                .collect(),
        };
        SimulationSpec {
            model: SimModel::MultiAnd,
            n,
            p,
            seed,
            pi_scale: 0.8,
            combine: Combine::Any,
            rules: vec![
                rule([true, true, false, false]),
                rule([false, false, true, true]),
            ],
        }
    }

    /// Additive combination of two AND rules over disjoint feature triples.
    pub fn additive_and(n: usize, p: usize, seed: u64) -> Self {
        let tail = rule_level(3);
        let rule = |features: [usize; 3]| AndRule {
            terms: features
                .iter()
                .map(|&j| RuleTerm {
                    feature: j,
                    positive: true,
                    level: 1.0 - tail,
                })
                .collect(),
        };
        SimulationSpec {
            model: SimModel::AdditiveAnd,
            n,
            p,
            seed,
            pi_scale: 0.4,
            combine: Combine::Sum,
            rules: vec![rule([0, 1, 2]), rule([3, 4, 5])],
        }
    }

    pub fn for_model(model: SimModel, n: usize, p: usize, seed: u64) -> Self {
        match model {
            SimModel::SingleAnd => Self::single_and(n, p, seed),
            SimModel::MultiAnd => Self::multi_and(n, p, seed),
            SimModel::AdditiveAnd => Self::additive_and(n, p, seed),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter("n must be >= 2".into()));
        }
        if self.rules.is_empty() {
            return Err(Error::InvalidParameter("no generative rules".into()));
        }
        for rule in &self.rules {
            for (k, term) in rule.terms.iter().enumerate() {
                if rule.terms[..k].iter().any(|t| t.feature == term.feature) {
                    return Err(Error::InvalidParameter(format!(
                        "rule repeats feature {}",
                        term.feature + 1
                    )));
                }
            }
            if rule.terms.is_empty() {
                return Err(Error::InvalidParameter("empty rule".into()));
            }
            for term in &rule.terms {
                if term.feature >= self.p {
                    return Err(Error::InvalidParameter(format!(
                        "p = {} too small for active feature {}",
                        self.p,
                        term.feature + 1
                    )));
                }
                if !(term.level > 0.0 && term.level < 1.0) {
                    return Err(Error::InvalidParameter(
                        "quantile level outside (0, 1)".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A rule with its thresholds resolved against a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedRule {
    pub terms: Vec<RuleTerm>,
    /// Empirical thresholds, aligned with `terms`.
    pub thresholds: Vec<f64>,
}

impl ResolvedRule {
    fn fires(&self, row: usize, data: &Dataset) -> bool {
        self.terms.iter().zip(&self.thresholds).all(|(term, &t)| {
            let v = data.value(row, term.feature);
            if term.positive {
                v > t
            } else {
                v <= t
            }
        })
    }
}

/// Generate a dataset and the resolved ground-truth rules.
pub fn generate_with_truth(spec: &SimulationSpec) -> Result<(Dataset, Vec<ResolvedRule>)> {
    spec.validate()?;
    let columns: Vec<Vec<f64>> = (0..spec.p)
        .map(|j| {
            let mut rng = stream_rng(spec.seed, j as u64);
            (0..spec.n)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect()
        })
        .collect();
    let names = (0..spec.p).map(|j| format!("x{}", j + 1)).collect();
    let placeholder = vec![0u8; spec.n];
    let data = Dataset::from_columns(columns, placeholder, names)?;

    let resolved: Vec<ResolvedRule> = spec
        .rules
        .iter()
        .map(|rule| {
            let thresholds = rule
                .terms
                .iter()
                .map(|term| {
                    let mut col = data.column(term.feature).to_vec();
                    col.sort_by(f64::total_cmp);
                    quantile_sorted(&col, term.level)
                })
                .collect();
            ResolvedRule {
                terms: rule.terms.clone(),
                thresholds,
            }
        })
        .collect();

    let mut rng = stream_rng(spec.seed, spec.p as u64);
    let responses: Vec<u8> = (0..spec.n)
        .map(|i| {
            let fired = resolved.iter().filter(|r| r.fires(i, &data)).count();
            let pi = match spec.combine {
                Combine::Any => spec.pi_scale * f64::from(fired > 0),
                Combine::Sum => spec.pi_scale * fired as f64,
            };
            u8::from(rng.random::<f64>() < pi)
        })
        .collect();

    let data = Dataset::from_columns(
        (0..spec.p).map(|j| data.column(j).to_vec()).collect(),
        responses,
        data.feature_names().to_vec(),
    )?;
    Ok((data, resolved))
}

/// Generate a dataset only.
pub fn generate(spec: &SimulationSpec) -> Result<Dataset> {
    generate_with_truth(spec).map(|(d, _)| d)
}

/// Signed labeling: active iff every signed member appears in some single
/// ground-truth rule.
pub fn label_signed(candidate: &SignedSet, spec: &SimulationSpec) -> bool {
    spec.rules
        .iter()
        .any(|rule| candidate.is_subset_of(rule.signed().set()))
}

/// Unsigned labeling: active iff the candidate's features are covered by some
/// single rule's features (signs ignored on both sides).
pub fn label_unsigned(candidate: &SignedSet, spec: &SimulationSpec) -> bool {
    let stripped = candidate.strip_signs();
    spec.rules
        .iter()
        .any(|rule| stripped.is_subset_of(&rule.signed().strip_signs()))
}

/// A scored candidate with its ground-truth label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledCandidate {
    pub interaction: SignedInteraction,
    pub score: f64,
    pub active: bool,
}

fn ranked_groups(candidates: &[LabeledCandidate]) -> Vec<(usize, usize)> {
    // Returns (actives, inactives) per tie group, descending score.
    let mut sorted: Vec<&LabeledCandidate> = candidates.iter().collect();
    sorted.sort_by(|a, b| b.score.total_cmp(&a.score));
    let mut groups = Vec::new();
    let mut idx = 0;
    while idx < sorted.len() {
        let mut tp = 0;
        let mut fp = 0;
        let score = sorted[idx].score;
        while idx < sorted.len() && sorted[idx].score.total_cmp(&score).is_eq() {
            if sorted[idx].active {
                tp += 1;
            } else {
                fp += 1;
            }
            idx += 1;
        }
        groups.push((tp, fp));
    }
    groups
}

fn check_ranking(candidates: &[LabeledCandidate]) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::InvalidRanking("no candidates".into()));
    }
    let positives = candidates.iter().filter(|c| c.active).count();
    if positives == 0 {
        return Err(Error::InvalidRanking("no active candidates".into()));
    }
    Ok(positives)
}

/// Area under the precision-recall curve of a score-ranked candidate list.
///
/// Step summation over ranks; within a tie group true and false positives
/// accrue linearly, which averages the group's possible orderings.
pub fn auc_pr(candidates: &[LabeledCandidate]) -> Result<f64> {
    let positives = check_ranking(candidates)? as f64;
    let mut tp = 0.0;
    let mut fp = 0.0;
    let mut area = 0.0;
    for (group_tp, group_fp) in ranked_groups(candidates) {
        if group_tp == 0 {
            fp += group_fp as f64;
            continue;
        }
        let fp_per_tp = group_fp as f64 / group_tp as f64;
        for _ in 0..group_tp {
            tp += 1.0;
            fp += fp_per_tp;
            area += (tp / (tp + fp)) / positives;
        }
    }
    // Summation noise can push a perfect ranking a few ulps past 1.
    Ok(area.min(1.0))
}

/// Precision-recall points after each distinct score threshold, starting at
/// `(0, 1)`.
pub fn pr_curve(candidates: &[LabeledCandidate]) -> Result<Vec<(f64, f64)>> {
    let positives = check_ranking(candidates)? as f64;
    let mut points = vec![(0.0, 1.0)];
    let mut tp = 0.0;
    let mut fp = 0.0;
    for (group_tp, group_fp) in ranked_groups(candidates) {
        tp += group_tp as f64;
        fp += group_fp as f64;
        points.push((tp / positives, tp / (tp + fp)));
    }
    Ok(points)
}

/// Which stability-report metric ranks candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankMetric {
    DeltaPrevalence,
    Prevalence,
    Precision,
    Independence,
    DeltaPrecision,
}

impl RankMetric {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "dP" => Ok(RankMetric::DeltaPrevalence),
            "prev" => Ok(RankMetric::Prevalence),
            "prec" => Ok(RankMetric::Precision),
            "indep" => Ok(RankMetric::Independence),
            "dPrec" => Ok(RankMetric::DeltaPrecision),
            other => Err(Error::InvalidParameter(format!(
                "unknown rank metric '{other}'"
            ))),
        }
    }

    fn score(&self, report: &StabilityReport) -> f64 {
        let value = match self {
            RankMetric::DeltaPrevalence => report.means.delta_prevalence,
            RankMetric::Prevalence => report.means.prevalence,
            RankMetric::Precision => report.means.precision,
            RankMetric::Independence => report.means.independence,
            RankMetric::DeltaPrecision => report.means.delta_precision,
        };
        value.unwrap_or(f64::NEG_INFINITY)
    }
}

/// Candidate pipelines compared by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Unsigned,
    Signed,
    SignedFiltered,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Unsigned => "unsigned",
            Method::Signed => "signed",
            Method::SignedFiltered => "signed_filtered",
        }
    }
}

/// Benchmark driver parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkParams {
    pub model: SimModel,
    pub n: usize,
    pub p: usize,
    pub replicates: usize,
    /// Master seed; per-replicate generation and pipeline seeds derive from it.
    pub seed: u64,
    pub irf: IrfParams,
    pub stability: StabilityParams,
    pub rank_by: RankMetric,
    /// Minimum candidate order scored. Defaults to 2: the filtering null
    /// metrics are undefined below order 2, so scoring lower orders would
    /// compare the pipelines on candidates only some of them can express.
    pub min_order: usize,
}

impl BenchmarkParams {
    pub fn new(model: SimModel, n: usize, p: usize, replicates: usize, seed: u64) -> Self {
        BenchmarkParams {
            model,
            n,
            p,
            replicates,
            seed,
            irf: IrfParams::default(),
            stability: StabilityParams::default(),
            rank_by: RankMetric::DeltaPrevalence,
            min_order: 2,
        }
    }
}

/// AUC-PR per method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodAuc {
    pub unsigned: f64,
    pub signed: f64,
    pub filtered: f64,
}

/// Scores, labels, and curves for one simulation replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOutcome {
    pub replicate: usize,
    pub auc: MethodAuc,
    /// PR points per method, in `Method` declaration order.
    pub curves: Vec<(Method, Vec<(f64, f64)>)>,
}

/// Benchmark output: per-replicate outcomes plus means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub replicates: Vec<ReplicateOutcome>,
    pub mean: MethodAuc,
}

impl BenchmarkResult {
    /// CSV rows `replicate,method,auc`.
    pub fn auc_csv(&self) -> String {
        let mut out = String::from("replicate,method,auc\n");
        for rep in &self.replicates {
            out.push_str(&format!(
                "{},unsigned,{}\n",
                rep.replicate, rep.auc.unsigned
            ));
            out.push_str(&format!("{},signed,{}\n", rep.replicate, rep.auc.signed));
            out.push_str(&format!(
                "{},signed_filtered,{}\n",
                rep.replicate, rep.auc.filtered
            ));
        }
        out
    }

    /// CSV rows `replicate,method,recall,precision`.
    pub fn curves_csv(&self) -> String {
        let mut out = String::from("replicate,method,recall,precision\n");
        for rep in &self.replicates {
            for (method, points) in &rep.curves {
                for (recall, precision) in points {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        rep.replicate,
                        method.as_str(),
                        recall,
                        precision
                    ));
                }
            }
        }
        out
    }
}

/// Assemble the scored list for one method: proposed candidates with their
/// scores plus, for comparability, every active in the method's universe that
/// the method missed, appended at score negative infinity.
fn scored_list(
    proposals: &[(SignedInteraction, f64, bool)],
    active_universe: &[SignedInteraction],
) -> Vec<LabeledCandidate> {
    let mut list: Vec<LabeledCandidate> = proposals
        .iter()
        .map(|(interaction, score, active)| LabeledCandidate {
            interaction: interaction.clone(),
            score: *score,
            active: *active,
        })
        .collect();
    for active in active_universe {
        if !proposals.iter().any(|(i, _, _)| i == active) {
            list.push(LabeledCandidate {
                interaction: active.clone(),
                score: f64::NEG_INFINITY,
                active: true,
            });
        }
    }
    list
}

/// Run the full pipeline on `replicates` independently generated datasets and
/// score interaction recovery for the unsigned, signed, and signed-filtered
/// candidate lists.
pub fn run_benchmark(params: &BenchmarkParams) -> Result<BenchmarkResult> {
    if params.replicates < 1 {
        return Err(Error::InvalidParameter("replicates must be >= 1".into()));
    }
    let mut outcomes = Vec::with_capacity(params.replicates);
    for r in 0..params.replicates {
        let salt = r as u64;
        let train_spec = SimulationSpec {
            seed: derive_seed(params.seed, salt * 8),
            ..SimulationSpec::for_model(params.model, params.n, params.p, 0)
        };
        let test_spec = SimulationSpec {
            seed: derive_seed(params.seed, salt * 8 + 1),
            ..train_spec.clone()
        };
        let (train, _) = generate_with_truth(&train_spec)?;
        let (test, _) = generate_with_truth(&test_spec)?;

        let mut irf_params = params.irf.clone();
        irf_params.forest.seed = derive_seed(params.seed, salt * 8 + 2);
        let model = IrfModel::fit(&train, &irf_params)?;

        let mut stability_params = params.stability.clone();
        stability_params.seed = derive_seed(params.seed, salt * 8 + 3);
        let run = run_with_modes(
            &train,
            &test,
            model.selected_weights(),
            &stability_params,
            true,
        )?;
        let unsigned_reports = run.unsigned.expect("requested");

        let order_ok = |rep: &&StabilityReport| rep.interaction.len() >= params.min_order;
        let signed_proposals: Vec<(SignedInteraction, f64, bool)> = run
            .signed
            .iter()
            .filter(order_ok)
            .map(|rep| {
                (
                    rep.interaction.clone(),
                    params.rank_by.score(rep),
                    label_signed(&rep.interaction, &train_spec),
                )
            })
            .collect();
        let filtered_proposals: Vec<(SignedInteraction, f64, bool)> = run
            .signed
            .iter()
            .filter(order_ok)
            .filter(|rep| rep.kept)
            .map(|rep| {
                (
                    rep.interaction.clone(),
                    params.rank_by.score(rep),
                    label_signed(&rep.interaction, &train_spec),
                )
            })
            .collect();
        let unsigned_proposals: Vec<(SignedInteraction, f64, bool)> = unsigned_reports
            .iter()
            .filter(order_ok)
            .map(|rep| {
                (
                    rep.interaction.clone(),
                    params.rank_by.score(rep),
                    label_unsigned(&rep.interaction, &train_spec),
                )
            })
            .collect();

        // Recall base sets: actives ever proposed in the method's space plus
        // the ground-truth maximal rules, fixed before scoring.
        let mut signed_universe: Vec<SignedInteraction> = signed_proposals
            .iter()
            .filter(|(_, _, active)| *active)
            .map(|(i, _, _)| i.clone())
            .collect();
        for rule in &train_spec.rules {
            let maximal = rule.signed();
            if !signed_universe.contains(&maximal) {
                signed_universe.push(maximal);
            }
        }
        let mut unsigned_universe: Vec<SignedInteraction> = unsigned_proposals
            .iter()
            .filter(|(_, _, active)| *active)
            .map(|(i, _, _)| i.clone())
            .collect();
        for rule in &train_spec.rules {
            let projected =
                SignedInteraction::new(rule.signed().strip_signs()).expect("nonempty rule");
            if !unsigned_universe.contains(&projected) {
                unsigned_universe.push(projected);
            }
        }

        let signed_list = scored_list(&signed_proposals, &signed_universe);
        let filtered_list = scored_list(&filtered_proposals, &signed_universe);
        let unsigned_list = scored_list(&unsigned_proposals, &unsigned_universe);

        let auc = MethodAuc {
            unsigned: auc_pr(&unsigned_list)?,
            signed: auc_pr(&signed_list)?,
            filtered: auc_pr(&filtered_list)?,
        };
        let curves = vec![
            (Method::Unsigned, pr_curve(&unsigned_list)?),
            (Method::Signed, pr_curve(&signed_list)?),
            (Method::SignedFiltered, pr_curve(&filtered_list)?),
        ];
        outcomes.push(ReplicateOutcome {
            replicate: r + 1,
            auc,
            curves,
        });
    }

    let k = outcomes.len() as f64;
    let mean = MethodAuc {
        unsigned: outcomes.iter().map(|o| o.auc.unsigned).sum::<f64>() / k,
        signed: outcomes.iter().map(|o| o.auc.signed).sum::<f64>() / k,
        filtered: outcomes.iter().map(|o| o.auc.filtered).sum::<f64>() / k,
    };
    Ok(BenchmarkResult {
        replicates: outcomes,
        mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn si(members: &[i32]) -> SignedInteraction {
        SignedInteraction::from_members(members.iter().copied()).unwrap()
    }

    fn cand(members: &[i32], score: f64, active: bool) -> LabeledCandidate {
        LabeledCandidate {
            interaction: si(members),
            score,
            active,
        }
    }

    #[test]
    fn generate_shapes_and_determinism() {
        let spec = SimulationSpec::single_and(500, 10, 42);
        let (d, rules) = generate_with_truth(&spec).unwrap();
        assert_eq!(d.n_rows(), 500);
        assert_eq!(d.n_features(), 10);
        assert_eq!(d.feature_names()[0], "x1");
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].thresholds.len(), 4);
        let (d2, _) = generate_with_truth(&spec).unwrap();
        assert_eq!(d, d2);
        // Rows where the rule does not fire have pi = 0, hence y = 0.
        for i in 0..d.n_rows() {
            if !rules[0].fires(i, &d) {
                assert_eq!(d.response(i), 0);
            }
        }
    }

    #[test]
    fn generate_rejects_small_p() {
        let spec = SimulationSpec::single_and(100, 3, 1);
        assert!(generate(&spec).is_err());
        let spec = SimulationSpec::additive_and(100, 5, 1);
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn positive_rate_single_and() {
        // P(all four conjuncts) = 0.1 by threshold construction, so the
        // positive rate concentrates near 0.8 * 0.1 = 0.08.
        let mut rates = Vec::new();
        for seed in 0..5 {
            let d = generate(&SimulationSpec::single_and(1000, 50, seed)).unwrap();
            let rate = d.responses().iter().map(|&y| y as usize).sum::<usize>() as f64 / 1000.0;
            rates.push(rate);
            assert!((0.06..=0.10).contains(&rate), "seed {seed}: rate {rate}");
        }
    }

    #[test]
    fn positive_rate_additive_and() {
        for seed in 0..5 {
            let d = generate(&SimulationSpec::additive_and(1000, 50, seed)).unwrap();
            let rate = d.responses().iter().map(|&y| y as usize).sum::<usize>() as f64 / 1000.0;
            assert!((0.05..=0.11).contains(&rate), "seed {seed}: rate {rate}");
        }
    }

    #[test]
    fn labeling_rules() {
        let m1 = SimulationSpec::single_and(100, 10, 0);
        assert!(label_signed(&si(&[1, 2]), &m1));
        assert!(label_signed(&si(&[1, 2, 3, 4]), &m1));
        assert!(!label_signed(&si(&[-1, 2]), &m1));
        assert!(!label_signed(&si(&[1, 2, 5]), &m1));

        let m2 = SimulationSpec::multi_and(100, 10, 0);
        assert!(label_signed(&si(&[1, 2, -3, -4]), &m2));
        assert!(label_signed(&si(&[-1, -2]), &m2));
        assert!(!label_signed(&si(&[1, 2, 3, 4]), &m2));
        // Unsigned projection of either rule covers {1,2,3,4}.
        assert!(label_unsigned(&si(&[1, 2, 3, 4]), &m2));

        let m3 = SimulationSpec::additive_and(100, 10, 0);
        assert!(label_signed(&si(&[1, 2, 3]), &m3));
        assert!(label_signed(&si(&[4, 6]), &m3));
        assert!(!label_signed(&si(&[1, 2, 4]), &m3));
        assert!(!label_unsigned(&si(&[1, 2, 4]), &m3));
    }

    #[test]
    fn auc_pr_hand_cases() {
        // Perfect ranking -> 1.
        let list = vec![
            cand(&[1], 0.9, true),
            cand(&[2], 0.8, true),
            cand(&[3], 0.2, false),
        ];
        assert_eq!(auc_pr(&list).unwrap(), 1.0);
        // One active ranked second of two -> 0.5.
        let list = vec![cand(&[1], 0.9, false), cand(&[2], 0.5, true)];
        assert_eq!(auc_pr(&list).unwrap(), 0.5);
        // Errors: empty list, no actives.
        assert!(auc_pr(&[]).is_err());
        assert!(auc_pr(&[cand(&[1], 0.5, false)]).is_err());
    }

    #[test]
    fn auc_pr_matches_step_sum_oracle_on_distinct_scores() {
        // Independent oracle: precision at each active's rank, averaged over
        // all actives (valid when scores are distinct).
        let mut rng = stream_rng(7, 0);
        for trial in 0..50 {
            let n = 2 + (trial % 19);
            let mut list = Vec::new();
            let mut scores: Vec<f64> = (0..n).map(|k| k as f64).collect();
            use rand::seq::SliceRandom;
            scores.shuffle(&mut rng);
            let mut any_active = false;
            for (k, &score) in scores.iter().enumerate() {
                let active = rng.random::<f64>() < 0.4;
                any_active |= active;
                list.push(cand(&[(k as i32) + 1], score, active));
            }
            if !any_active {
                list[0].active = true;
            }
            let mut sorted: Vec<&LabeledCandidate> = list.iter().collect();
            sorted.sort_by(|a, b| b.score.total_cmp(&a.score));
            let total_active = sorted.iter().filter(|c| c.active).count() as f64;
            let mut tp = 0.0;
            let mut oracle = 0.0;
            for (rank, c) in sorted.iter().enumerate() {
                if c.active {
                    tp += 1.0;
                    oracle += (tp / (rank as f64 + 1.0)) / total_active;
                }
            }
            let got = auc_pr(&list).unwrap();
            assert!(
                (got - oracle).abs() < 1e-10,
                "trial {trial}: {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn auc_pr_tie_group_interpolation() {
        // Two candidates tied, one active: the single PR step sits at
        // precision 1/2 -> area 0.5.
        let list = vec![cand(&[1], 0.5, true), cand(&[2], 0.5, false)];
        assert_eq!(auc_pr(&list).unwrap(), 0.5);
        // Appended -inf actives keep the recall denominator honest.
        let list = vec![
            cand(&[1], 0.9, true),
            cand(&[2], 0.1, false),
            cand(&[3], f64::NEG_INFINITY, true),
            cand(&[4], f64::NEG_INFINITY, true),
        ];
        // Ranks: active@1 (prec 1), inactive, then two actives accruing with
        // no additional negatives.
        let got = auc_pr(&list).unwrap();
        let expected = (1.0 + 2.0 / 3.0 + 3.0 / 4.0) / 3.0;
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn ranking_invariant_under_affine_transform() {
        let list = vec![
            cand(&[1], 0.9, true),
            cand(&[2], 0.4, false),
            cand(&[3], 0.7, true),
            cand(&[4], -0.2, false),
        ];
        let transformed: Vec<LabeledCandidate> = list
            .iter()
            .map(|c| LabeledCandidate {
                score: 3.0 * c.score + 2.0,
                ..c.clone()
            })
            .collect();
        assert_eq!(auc_pr(&list).unwrap(), auc_pr(&transformed).unwrap());
    }

    #[test]
    fn pr_curve_starts_at_full_precision() {
        let list = vec![cand(&[1], 0.9, true), cand(&[2], 0.5, false)];
        let curve = pr_curve(&list).unwrap();
        assert_eq!(curve[0], (0.0, 1.0));
        assert_eq!(curve[1], (1.0, 1.0));
        assert_eq!(curve[2], (1.0, 0.5));
    }

    #[test]
    fn benchmark_smoke_run() {
        use crate::forest::ForestParams;
        use crate::interactions::RitParams;
        // Tiny end-to-end run: completes, emits all three numbers and CSVs.
        let mut params = BenchmarkParams::new(SimModel::SingleAnd, 240, 8, 1, 5);
        params.irf = IrfParams {
            iterations: 2,
            forest: ForestParams {
                n_trees: 20,
                ..ForestParams::default()
            },
        };
        params.stability = StabilityParams {
            bootstraps: 3,
            forest: ForestParams {
                n_trees: 20,
                ..ForestParams::default()
            },
            rit: RitParams {
                n_trees: 60,
                ..RitParams::default()
            },
            ..StabilityParams::default()
        };
        let result = run_benchmark(&params).unwrap();
        assert_eq!(result.replicates.len(), 1);
        for auc in [
            result.mean.unsigned,
            result.mean.signed,
            result.mean.filtered,
        ] {
            assert!((0.0..=1.0).contains(&auc));
        }
        assert!(result.auc_csv().starts_with("replicate,method,auc\n"));
        assert!(result
            .curves_csv()
            .starts_with("replicate,method,recall,precision\n"));
        assert!(run_benchmark(&BenchmarkParams::new(SimModel::SingleAnd, 100, 8, 0, 1)).is_err());
        // Same params -> identical result.
        let again = run_benchmark(&params).unwrap();
        assert_eq!(result, again);
    }
}
