//! Outer-bootstrap stability analysis and interaction filtering.
//!
//! Fits one forest per bootstrap replicate of the training data (all with the
//! same fixed sampling weights), mines candidates from each, pools them, then
//! evaluates the three null metrics for every pooled candidate on every
//! replicate. A candidate is kept at level `tau` when each null metric is
//! positive in at least a `1 - tau` fraction of replicates; an undefined
//! metric counts as a failure, since a replicate where the interaction never
//! appears cannot attest its stability.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{bootstrap, Dataset};
use crate::error::{Error, Result};
use crate::forest::{FeatureWeights, Forest, ForestParams};
use crate::interactions::{grit, EncodeScope, EncodedLeafTable, RitParams, SignedInteraction};
use crate::metrics;
use crate::rng::derive_seed;

/// Parameters of the stability analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityParams {
    /// Number of outer bootstrap replicates.
    pub bootstraps: usize,
    /// Filtering level: a candidate is removed when a null metric fails in
    /// more than a `tau` fraction of replicates.
    pub tau: f64,
    /// Response class under study.
    pub class: u8,
    /// Forest parameters for the per-replicate fits (seed ignored; replicate
    /// seeds derive from `seed`).
    pub forest: ForestParams,
    /// Intersection-search parameters (seed ignored; derived per replicate).
    pub rit: RitParams,
    /// Which rows of each replicate are routed when encoding leaves.
    pub encode_scope: EncodeScope,
    /// Master seed for bootstraps, forests, and intersection searches.
    pub seed: u64,
}

impl Default for StabilityParams {
    fn default() -> Self {
        StabilityParams {
            bootstraps: 20,
            tau: 0.5,
            class: 1,
            forest: ForestParams::default(),
            rit: RitParams::default(),
            encode_scope: EncodeScope::AllRows,
            seed: 0,
        }
    }
}

/// Per-bootstrap values of the five metrics (entries `None` when undefined).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PerBootstrap {
    pub prevalence: Vec<Option<f64>>,
    pub delta_prevalence: Vec<Option<f64>>,
    pub independence: Vec<Option<f64>>,
    pub precision: Vec<Option<f64>>,
    pub delta_precision: Vec<Option<f64>>,
}

/// Means over the defined per-bootstrap entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct MetricMeans {
    pub prevalence: Option<f64>,
    pub delta_prevalence: Option<f64>,
    pub independence: Option<f64>,
    pub precision: Option<f64>,
    pub delta_precision: Option<f64>,
}

/// Fraction of replicates where each null metric failed (<= 0 or undefined).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstabilityFractions {
    pub delta_prevalence: f64,
    pub independence: f64,
    pub delta_precision: f64,
}

/// Stability verdict for one pooled candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub interaction: SignedInteraction,
    pub per_bootstrap: PerBootstrap,
    pub means: MetricMeans,
    pub instability: InstabilityFractions,
    pub kept: bool,
}

fn mean_defined(values: &[Option<f64>]) -> Option<f64> {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    }
}

fn failure_fraction(values: &[Option<f64>]) -> f64 {
    let failures = values
        .iter()
        .filter(|v| !matches!(v, Some(x) if *x > 0.0))
        .count();
    failures as f64 / values.len() as f64
}

/// Run the stability analysis. Returns one report per pooled candidate
/// (survivors and removed alike), ranked by mean class-difference in
/// prevalence, descending.
pub fn run_stability(
    train: &Dataset,
    test: &Dataset,
    weights: &FeatureWeights,
    params: &StabilityParams,
) -> Result<Vec<StabilityReport>> {
    let run = run_with_modes(train, test, weights, params, false)?;
    Ok(run.signed)
}

/// Results of [`run_with_modes`].
pub struct StabilityRun {
    /// Reports for signed candidates.
    pub signed: Vec<StabilityReport>,
    /// Reports for unsigned candidates (sign-stripped pipeline), when requested.
    pub unsigned: Option<Vec<StabilityReport>>,
}

/// As [`run_stability`], optionally also running the unsigned variant on the
/// same replicate forests (leaf encodings sign-stripped before mining and
/// scoring). Sharing the forests makes the signed/unsigned comparison paired.
pub fn run_with_modes(
    train: &Dataset,
    test: &Dataset,
    weights: &FeatureWeights,
    params: &StabilityParams,
    include_unsigned: bool,
) -> Result<StabilityRun> {
    if params.bootstraps < 1 {
        return Err(Error::InvalidParameter("bootstraps must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&params.tau) {
        return Err(Error::InvalidParameter(format!(
            "tau {} not in [0, 1]",
            params.tau
        )));
    }

    struct Replicate {
        train_table: EncodedLeafTable,
        eval_table: EncodedLeafTable,
        proposed: BTreeSet<SignedInteraction>,
        stripped_train: Option<EncodedLeafTable>,
        stripped_eval: Option<EncodedLeafTable>,
        proposed_unsigned: Option<BTreeSet<SignedInteraction>>,
    }

    let replicates: Vec<Result<Replicate>> = (0..params.bootstraps)
        .into_par_iter()
        .map(|b| {
            let salt = b as u64;
            let sample = bootstrap(train, derive_seed(params.seed, salt * 4))?;
            let boot_data = train.select_rows(&sample.indices)?;
            let mut forest_params = params.forest.clone();
            forest_params.seed = derive_seed(params.seed, salt * 4 + 1);
            let forest = Forest::fit(&boot_data, weights, &forest_params)?;
            let train_table = EncodedLeafTable::encode(&forest, &boot_data, params.encode_scope)?;
            let eval_table = EncodedLeafTable::encode(&forest, test, EncodeScope::AllRows)?;
            let mut rit = params.rit.clone();
            rit.class = params.class;
            rit.seed = derive_seed(params.seed, salt * 4 + 2);
            let proposed = grit(&train_table, &rit)?;
            let (stripped_train, stripped_eval, proposed_unsigned) = if include_unsigned {
                let st = train_table.strip_signs();
                let se = eval_table.strip_signs();
                let mut rit_u = rit.clone();
                rit_u.seed = derive_seed(params.seed, salt * 4 + 3);
                let pu = grit(&st, &rit_u)?;
                (Some(st), Some(se), Some(pu))
            } else {
                (None, None, None)
            };
            Ok(Replicate {
                train_table,
                eval_table,
                proposed,
                stripped_train,
                stripped_eval,
                proposed_unsigned,
            })
        })
        .collect();

    let mut resolved = Vec::with_capacity(replicates.len());
    for (b, rep) in replicates.into_iter().enumerate() {
        resolved.push(rep.map_err(|e| Error::ReplicateFailed(b, Box::new(e)))?);
    }

    let evaluate = |pooled: Vec<SignedInteraction>,
                    tables: Vec<(&EncodedLeafTable, &EncodedLeafTable)>|
     -> Vec<StabilityReport> {
        let mut reports: Vec<StabilityReport> = pooled
            .par_iter()
            .map(|candidate| {
                let mut per = PerBootstrap::default();
                for (train_table, eval_table) in &tables {
                    let r = metrics::MetricReport::compute(
                        train_table,
                        eval_table,
                        candidate,
                        params.class,
                    );
                    per.prevalence.push(r.prevalence.value);
                    per.delta_prevalence.push(r.delta_prevalence.value);
                    per.independence.push(r.independence.value);
                    per.precision.push(r.precision.value);
                    per.delta_precision.push(r.delta_precision.value);
                }
                let instability = InstabilityFractions {
                    delta_prevalence: failure_fraction(&per.delta_prevalence),
                    independence: failure_fraction(&per.independence),
                    delta_precision: failure_fraction(&per.delta_precision),
                };
                let kept = instability.delta_prevalence <= params.tau
                    && instability.independence <= params.tau
                    && instability.delta_precision <= params.tau;
                let means = MetricMeans {
                    prevalence: mean_defined(&per.prevalence),
                    delta_prevalence: mean_defined(&per.delta_prevalence),
                    independence: mean_defined(&per.independence),
                    precision: mean_defined(&per.precision),
                    delta_precision: mean_defined(&per.delta_precision),
                };
                StabilityReport {
                    interaction: candidate.clone(),
                    per_bootstrap: per,
                    means,
                    instability,
                    kept,
                }
            })
            .collect();
        // Rank by mean delta-prevalence, descending; undefined last; the
        // canonical interaction order breaks exact ties.
        reports.sort_by(|a, b| {
            let ka = a.means.delta_prevalence.unwrap_or(f64::NEG_INFINITY);
            let kb = b.means.delta_prevalence.unwrap_or(f64::NEG_INFINITY);
            kb.total_cmp(&ka)
                .then_with(|| a.interaction.cmp(&b.interaction))
        });
        reports
    };

    let pooled: Vec<SignedInteraction> = resolved
        .iter()
        .flat_map(|r| r.proposed.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let signed_tables: Vec<_> = resolved
        .iter()
        .map(|r| (&r.train_table, &r.eval_table))
        .collect();
    let signed = evaluate(pooled, signed_tables);

    let unsigned = if include_unsigned {
        let pooled_u: Vec<SignedInteraction> = resolved
            .iter()
            .flat_map(|r| {
                r.proposed_unsigned
                    .as_ref()
                    .expect("requested")
                    .iter()
                    .cloned()
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let tables_u: Vec<_> = resolved
            .iter()
            .map(|r| {
                (
                    r.stripped_train.as_ref().expect("requested"),
                    r.stripped_eval.as_ref().expect("requested"),
                )
            })
            .collect();
        Some(evaluate(pooled_u, tables_u))
    } else {
        None
    };

    Ok(StabilityRun { signed, unsigned })
}

/// Interactions surviving the level-`tau` filter (pure function of fractions;
/// a fraction exactly equal to `tau` is kept).
pub fn filter(reports: &[StabilityReport], tau: f64) -> Vec<SignedInteraction> {
    reports
        .iter()
        .filter(|r| {
            r.instability.delta_prevalence <= tau
                && r.instability.independence <= tau
                && r.instability.delta_precision <= tau
        })
        .map(|r| r.interaction.clone())
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV rendering: the metric columns first (same layout as the metric report
/// CSV), then the instability fractions and the kept flag.
pub fn reports_to_csv(
    reports: &[StabilityReport],
    feature_names: &[String],
    keep_all: bool,
) -> String {
    let mut out = String::from("interaction,dP,prev,prec,indep,dPrec,f_dP,f_I,f_dPrec,kept\n");
    for r in reports {
        if !keep_all && !r.kept {
            continue;
        }
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.interaction.render(feature_names),
            fmt_opt(r.means.delta_prevalence),
            fmt_opt(r.means.prevalence),
            fmt_opt(r.means.precision),
            fmt_opt(r.means.independence),
            fmt_opt(r.means.delta_precision),
            r.instability.delta_prevalence,
            r.instability.independence,
            r.instability.delta_precision,
            r.kept,
        ));
    }
    out
}
