//! Subcommand implementations.

use std::path::Path;

use sirf::data::{load_csv_with, CsvOptions, Dataset};
use sirf::error::{Error, Result};
use sirf::forest::ForestParams;
use sirf::interactions::{EncodeScope, RitParams, SignedInteraction};
use sirf::irf::{IrfBundle, IrfModel, IrfParams};
use sirf::rulepred::{group_rules, response_surface, FixedLevel, PredictionMode, RuleGroup};
use sirf::simbench::{run_benchmark, BenchmarkParams, RankMetric, SimModel};
use sirf::stability::{reports_to_csv, run_stability, StabilityParams};

use crate::{FitArgs, InteractionsArgs, PredictArgs, SimulateArgs};

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load(path: &Path, response: &str, bool_labels: bool) -> Result<Dataset> {
    load_csv_with(
        path,
        response,
        CsvOptions {
            bool_tokens: bool_labels,
        },
    )
}

fn forest_params(
    trees: usize,
    mtry: Option<usize>,
    min_leaf: usize,
    max_depth: Option<usize>,
) -> ForestParams {
    ForestParams {
        n_trees: trees,
        mtry,
        min_leaf,
        max_depth,
        ..ForestParams::default()
    }
}

pub fn fit(args: FitArgs) -> Result<()> {
    let train = load(&args.train, &args.response, args.bool_labels)?;
    let params = IrfParams {
        iterations: args.k_max,
        forest: ForestParams {
            seed: args.seed,
            ..forest_params(args.trees, args.mtry, args.min_leaf, args.max_depth)
        },
    };
    let model = IrfModel::fit(&train, &params)?;
    println!(
        "fitted {} iterations on {} rows x {} features; selected K = {} (oob accuracy {})",
        model.forests.len(),
        train.n_rows(),
        train.n_features(),
        model.selected_k,
        model.oob_curve[model.selected_k - 1],
    );
    let bundle = IrfBundle::new(model, &train)?;
    write(&args.out, &bundle.to_json())?;
    if let Some(log_path) = &args.iteration_log {
        write(log_path, &bundle.model.iteration_log_csv())?;
    }
    Ok(())
}

pub fn interactions(args: InteractionsArgs) -> Result<()> {
    let bundle = IrfBundle::from_json(&read(&args.bundle)?)?;
    let train = load(&args.train, &args.response, args.bool_labels)?;
    let test = load(&args.test, &args.response, args.bool_labels)?;
    let forest_meta = bundle.model.selected_forest().meta().clone();
    let params = StabilityParams {
        bootstraps: args.bootstraps,
        tau: args.tau,
        class: args.class,
        forest: bundle.model.params.forest.clone(),
        rit: RitParams {
            n_trees: args.rits,
            depth: args.rit_depth,
            n_children: args.rit_children,
            class: args.class,
            collect_internal: args.collect_internal,
            seed: 0,
        },
        encode_scope: if args.in_bag_only {
            EncodeScope::InBagOnly
        } else {
            EncodeScope::AllRows
        },
        seed: args.seed,
    };
    let reports = run_stability(&train, &test, &forest_meta.weights, &params)?;
    let kept = reports.iter().filter(|r| r.kept).count();
    println!(
        "pooled {} candidates over {} bootstraps; {} kept at tau = {}",
        reports.len(),
        args.bootstraps,
        kept,
        args.tau
    );
    let names = train.feature_names();
    if let Some(path) = &args.out_csv {
        write(path, &reports_to_csv(&reports, names, args.keep_all))?;
    }
    if let Some(path) = &args.out_json {
        #[derive(serde::Serialize)]
        struct ReportDoc<'a> {
            schema_version: u32,
            tau: f64,
            class: u8,
            reports: Vec<&'a sirf::stability::StabilityReport>,
        }
        let doc = ReportDoc {
            schema_version: sirf::forest::SCHEMA_VERSION,
            tau: args.tau,
            class: args.class,
            reports: reports.iter().filter(|r| args.keep_all || r.kept).collect(),
        };
        write(path, &serde_json::to_string(&doc)?)?;
    }
    Ok(())
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    let model = SimModel::parse(&args.model)?;
    let mut params = BenchmarkParams::new(model, args.n, args.p, args.replicates, args.seed);
    params.irf = IrfParams {
        iterations: args.k_max,
        forest: forest_params(args.trees, None, 1, None),
    };
    params.stability = StabilityParams {
        bootstraps: args.bootstraps,
        tau: args.tau,
        forest: forest_params(args.trees, None, 1, None),
        rit: RitParams {
            n_trees: args.rits,
            depth: args.rit_depth,
            n_children: args.rit_children,
            ..RitParams::default()
        },
        ..StabilityParams::default()
    };
    params.rank_by = RankMetric::parse(&args.rank_by)?;
    params.min_order = args.min_order;
    let result = run_benchmark(&params)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|source| Error::Io {
        path: args.out_dir.display().to_string(),
        source,
    })?;
    write(&args.out_dir.join("aucs.csv"), &result.auc_csv())?;
    write(&args.out_dir.join("pr_curves.csv"), &result.curves_csv())?;
    println!(
        "mean AUC-PR over {} replicates ({}):",
        args.replicates,
        model.as_str()
    );
    println!("  unsigned        {}", result.mean.unsigned);
    println!("  signed          {}", result.mean.signed);
    println!("  signed_filtered {}", result.mean.filtered);
    Ok(())
}

/// Load a CSV of features only (every column numeric, no response).
fn load_feature_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::NonNumericCell {
                row: i + 1,
                column: headers.get(j).cloned().unwrap_or_default(),
                value: cell.to_string(),
            })?;
            columns[j].push(v);
        }
    }
    Ok((headers, columns))
}

fn parse_mode(name: &str) -> Result<PredictionMode> {
    match name {
        "weighted-average" => Ok(PredictionMode::WeightedAverage),
        "raw-sum" => Ok(PredictionMode::RawSum),
        other => Err(Error::InvalidParameter(format!("unknown mode '{other}'"))),
    }
}

pub fn predict(args: PredictArgs) -> Result<()> {
    let bundle = IrfBundle::from_json(&read(&args.bundle)?)?;
    let forest = bundle.model.selected_forest();
    let names = forest.feature_names().to_vec();
    let interaction = SignedInteraction::parse(&args.interaction, &names)?;
    let group = group_rules(forest, &bundle.selected_table, &interaction)?;
    let mode = parse_mode(&args.mode)?;

    let (input_headers, input_columns) = load_feature_csv(&args.input)?;
    // Map each interaction feature to an input column; other coordinates are
    // never read by the rule group.
    let column_of = |feature: usize| -> Result<usize> {
        input_headers
            .iter()
            .position(|h| *h == names[feature])
            .ok_or_else(|| Error::MissingColumn(names[feature].clone()))
    };
    let features: Vec<usize> = interaction.features().collect();
    let mut point = vec![0.0; names.len()];
    if let Some(out) = &args.out {
        let mapping: Vec<(usize, usize)> = features
            .iter()
            .map(|&j| Ok((j, column_of(j)?)))
            .collect::<Result<_>>()?;
        let n_rows = input_columns.first().map_or(0, Vec::len);
        let mut csv = String::from("row,score\n");
        #[allow(clippy::needless_range_loop)]
        for i in 0..n_rows {
            for &(feature, column) in &mapping {
                point[feature] = input_columns[column][i];
            }
            csv.push_str(&format!("{},{}\n", i + 1, group.predict(&point, mode)));
        }
        write(out, &csv)?;
        println!("scored {n_rows} rows for {}", interaction.render(&names));
    }

    if let Some(path) = &args.thresholds {
        let mut csv = String::from("feature,quantile,value,weight_mass\n");
        for &feature in &features {
            csv.push_str(&group.threshold_distribution(feature)?.csv_rows(&names));
        }
        write(path, &csv)?;
    }

    if let Some(path) = &args.surface {
        let eval = eval_dataset_for_surface(&names, &features, &input_headers, &input_columns)?;
        let levels: Vec<f64> = args
            .grid_quantiles
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad grid quantile '{s}'")))
            })
            .collect::<Result<_>>()?;
        let csv = surface_csv(&group, &eval, &levels, &args, &names, &features, mode)?;
        write(path, &csv)?;
    }
    Ok(())
}

/// Build a dataset holding the interaction's feature columns (zeros
/// elsewhere) so surface grids can take empirical quantiles of the input.
fn eval_dataset_for_surface(
    names: &[String],
    features: &[usize],
    input_headers: &[String],
    input_columns: &[Vec<f64>],
) -> Result<Dataset> {
    let n_rows = input_columns.first().map_or(0, Vec::len);
    if n_rows < 2 {
        return Err(Error::InvalidDataset(
            "surface needs at least 2 input rows".into(),
        ));
    }
    let mut columns = vec![vec![0.0; n_rows]; names.len()];
    for &feature in features {
        let column = input_headers
            .iter()
            .position(|h| *h == names[feature])
            .ok_or_else(|| Error::MissingColumn(names[feature].clone()))?;
        columns[feature] = input_columns[column].clone();
    }
    Dataset::from_columns(columns, vec![0; n_rows], names.to_vec())
}

fn surface_csv(
    group: &RuleGroup,
    eval: &Dataset,
    levels: &[f64],
    args: &PredictArgs,
    names: &[String],
    features: &[usize],
    mode: PredictionMode,
) -> Result<String> {
    match features.len() {
        2 => Ok(response_surface(group, eval, levels, None, mode)?.to_csv(names)),
        3 => {
            let fixed_feature = match &args.fix_feature {
                Some(name) => {
                    let j = names
                        .iter()
                        .position(|n| n == name)
                        .ok_or_else(|| Error::MissingColumn(name.clone()))?;
                    if !features.contains(&j) {
                        return Err(Error::InvalidParameter(format!(
                            "--fix-feature {name} is not part of the interaction"
                        )));
                    }
                    j
                }
                None => *features.last().expect("order 3"),
            };
            let panels: Vec<FixedLevel> = match args.fix_level.as_str() {
                "high" => vec![FixedLevel::High],
                "low" => vec![FixedLevel::Low],
                "both" => vec![FixedLevel::Low, FixedLevel::High],
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown fix level '{other}'"
                    )))
                }
            };
            let mut out = String::new();
            for (k, level) in panels.iter().enumerate() {
                let surface =
                    response_surface(group, eval, levels, Some((fixed_feature, *level)), mode)?;
                let csv = surface.to_csv(names);
                if k == 0 {
                    out.push_str(&csv);
                } else {
                    // skip the repeated header line
                    out.push_str(csv.split_once('\n').map(|(_, body)| body).unwrap_or(""));
                }
            }
            Ok(out)
        }
        order => Err(Error::InvalidParameter(format!(
            "surface supports order 2 or 3 interactions, got {order}"
        ))),
    }
}
