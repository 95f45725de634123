//! Iterative reweighting driver: a series of forests where each iteration's
//! feature-sampling weights come from the previous iteration's Gini
//! importance, with the iteration count selected by out-of-bag accuracy.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::Result;
use crate::forest::{FeatureWeights, Forest, ForestParams, SCHEMA_VERSION};
use crate::interactions::{EncodeScope, EncodedLeafTable};
use crate::rng::derive_seed;

/// Parameters for the iterative fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrfParams {
    /// Number of reweighting iterations to run.
    pub iterations: usize,
    /// Per-iteration forest parameters; the seed field acts as the master
    /// seed from which iteration seeds are derived.
    pub forest: ForestParams,
}

impl Default for IrfParams {
    fn default() -> Self {
        IrfParams {
            iterations: 10,
            forest: ForestParams::default(),
        }
    }
}

/// One line of the iteration diagnostics log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based iteration index.
    pub k: usize,
    pub oob_accuracy: f64,
    /// Shannon entropy (nats) of the weights used at this iteration.
    pub weight_entropy: f64,
}

/// A fitted series of reweighted forests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrfModel {
    /// All fitted forests, iteration order.
    pub forests: Vec<Forest>,
    /// Weights used per iteration: `weights[0]` is uniform, `weights[k]` is
    /// the Gini importance of `forests[k-1]`.
    pub weights: Vec<FeatureWeights>,
    /// Out-of-bag accuracy per iteration.
    pub oob_curve: Vec<f64>,
    /// 1-based index of the iteration with the best OOB accuracy (smallest
    /// index on ties).
    pub selected_k: usize,
    /// The parameters this model was fitted with.
    pub params: IrfParams,
}

impl IrfModel {
    /// Fit `params.iterations` forests with iterative reweighting.
    ///
    /// Iteration `k` uses seed `derive_seed(master, k)`, so the sequence is
    /// deterministic end to end under a fixed master seed.
    pub fn fit(data: &Dataset, params: &IrfParams) -> Result<Self> {
        let iterations = params.iterations.max(1);
        let mut weights = vec![FeatureWeights::uniform(data.n_features())];
        let mut forests = Vec::with_capacity(iterations);
        let mut oob_curve = Vec::with_capacity(iterations);
        for k in 0..iterations {
            let mut forest_params = params.forest.clone();
            forest_params.seed = derive_seed(params.forest.seed, k as u64 + 1);
            let forest = Forest::fit(data, &weights[k], &forest_params)?;
            oob_curve.push(forest.oob_accuracy(data)?);
            if k + 1 < iterations {
                weights.push(forest.gini_importance().weights);
            }
            forests.push(forest);
        }
        let selected_k = select_k(&oob_curve);
        Ok(IrfModel {
            forests,
            weights,
            oob_curve,
            selected_k,
            params: params.clone(),
        })
    }

    /// The forest of the selected iteration.
    pub fn selected_forest(&self) -> &Forest {
        &self.forests[self.selected_k - 1]
    }

    /// The weights the selected forest was fitted with.
    pub fn selected_weights(&self) -> &FeatureWeights {
        &self.weights[self.selected_k - 1]
    }

    /// Diagnostics rows `(k, oob accuracy, weight entropy)`.
    pub fn iteration_log(&self) -> Vec<IterationRecord> {
        (0..self.forests.len())
            .map(|k| IterationRecord {
                k: k + 1,
                oob_accuracy: self.oob_curve[k],
                weight_entropy: self.weights[k].entropy(),
            })
            .collect()
    }

    /// Iteration log as CSV (`k,oob_accuracy,weight_entropy`).
    pub fn iteration_log_csv(&self) -> String {
        let mut out = String::from("k,oob_accuracy,weight_entropy\n");
        for row in self.iteration_log() {
            out.push_str(&format!(
                "{},{},{}\n",
                row.k, row.oob_accuracy, row.weight_entropy
            ));
        }
        out
    }
}

/// 1-based index of the maximum of an OOB curve; smallest index on ties.
pub fn select_k(oob_curve: &[f64]) -> usize {
    assert!(!oob_curve.is_empty(), "empty OOB curve");
    let mut best = 0;
    for (k, &v) in oob_curve.iter().enumerate().skip(1) {
        if v > oob_curve[best] {
            best = k;
        }
    }
    best + 1
}

/// Everything the analysis and prediction commands need, serialized as one
/// versioned JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrfBundle {
    pub schema_version: u32,
    pub model: IrfModel,
    pub iteration_log: Vec<IterationRecord>,
    /// Training-routed leaf table of the selected forest (all rows), so
    /// downstream rule grouping does not need the training data again.
    pub selected_table: EncodedLeafTable,
}

impl IrfBundle {
    pub fn new(model: IrfModel, train: &Dataset) -> Result<Self> {
        let selected_table =
            EncodedLeafTable::encode(model.selected_forest(), train, EncodeScope::AllRows)?;
        let iteration_log = model.iteration_log();
        Ok(IrfBundle {
            schema_version: SCHEMA_VERSION,
            model,
            iteration_log,
            selected_table,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bundle serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bundle: IrfBundle = serde_json::from_str(text)?;
        if bundle.schema_version != SCHEMA_VERSION {
            return Err(crate::error::Error::SchemaVersion(bundle.schema_version));
        }
        Ok(bundle)
    }
}
