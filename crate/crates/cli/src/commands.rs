use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use lla_core::evaluation::{compare, load_predictions, score, GroundTruth};
use lla_core::features::{self, block_matrix_csv, line_matrix_csv, FeatureConfig};
use lla_core::label::parse_output_label;
use lla_core::ripper::{
    condition_expr, fit, fit_one_vs_rest, grid_search, Binning, Dataset, HyperGrid, Hyperparameters, OneVsRest,
    RipperLabeler,
};
use lla_core::rules::Level;
use lla_core::{parse_alto_named, write_annotated, Document, ElementKind, LogicalLabel, OutputFormat};

use crate::config::Config;
use crate::output::{output_paths, stem, write_atomic};
use crate::{AnnotateArgs, BinningArg, EvaluateArgs, ExtractArgs, Format, Kind, TrainArgs};

fn read_document(path: &Path, config: &Config) -> Result<Document> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let mut doc = parse_alto_named(&bytes, &stem(path))?;
    if config.doc_title.is_some() {
        doc.set_title(config.doc_title.as_deref());
    }
    Ok(doc)
}

/// Runs `job` on every input in parallel, logging failures by file name.
/// Returns whether every input succeeded.
fn batch(inputs: &[PathBuf], job: impl Fn(usize, &Path) -> Result<()> + Sync) -> bool {
    let failures: usize = inputs
        .par_iter()
        .enumerate()
        .map(|(i, p)| match job(i, p) {
            Ok(()) => 0,
            Err(e) => {
                log::error!("{}: {e:#}", p.display());
                1
            }
        })
        .sum();
    if failures > 0 {
        log::error!("{failures} of {} file(s) failed", inputs.len());
    }
    failures == 0
}

fn model_files(dir: &Path, kind: ElementKind) -> (PathBuf, PathBuf) {
    (dir.join(format!("{}.rules", kind.as_str())), dir.join(format!("{}.json", kind.as_str())))
}

fn load_model(dir: &Path, kind: ElementKind) -> Result<OneVsRest> {
    let (rules, meta) = model_files(dir, kind);
    let text = std::fs::read_to_string(&rules).with_context(|| format!("reading {}", rules.display()))?;
    let json = std::fs::read_to_string(&meta).with_context(|| format!("reading {}", meta.display()))?;
    OneVsRest::load(&text, &json).with_context(|| format!("loading {}", rules.display()))
}

pub fn annotate(config: &Config, args: &AnnotateArgs) -> Result<bool> {
    let format = match args.format {
        Format::Alto => OutputFormat::Alto,
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
    };
    let outputs = output_paths(&args.inputs, &args.out, &format!(".{}", format.extension()))?;
    let features = config.feature_config()?;
    enum Labeller {
        Rules(lla_core::rules::Annotator),
        Ripper(RipperLabeler),
    }
    let labeller = match &args.model {
        Some(dir) => Labeller::Ripper(RipperLabeler {
            blocks: load_model(dir, ElementKind::Block)?,
            lines: load_model(dir, ElementKind::Line)?,
        }),
        None => Labeller::Rules(config.annotator()?),
    };
    Ok(batch(&args.inputs, |i, path| {
        let mut doc = read_document(path, config)?;
        match &labeller {
            Labeller::Rules(a) => a.annotate(&mut doc)?,
            Labeller::Ripper(r) => r.annotate(&mut doc, &features)?,
        }
        write_atomic(&outputs[i], &write_annotated(&doc, format)?)?;
        log::info!("{} -> {}", path.display(), outputs[i].display());
        Ok(())
    }))
}

fn extract_one(doc: &Document, cfg: &FeatureConfig, out: &Path) -> Result<()> {
    let m = features::extract(doc, cfg)?;
    let doc_json = serde_json::json!({ "documentId": doc.id, "features": m.doc });
    write_atomic(&out.join(format!("{}.lines.csv", doc.id)), &line_matrix_csv(doc, &m.lines)?)?;
    write_atomic(&out.join(format!("{}.blocks.csv", doc.id)), &block_matrix_csv(doc, &m.blocks)?)?;
    let mut json = serde_json::to_vec_pretty(&doc_json)?;
    json.push(b'\n');
    write_atomic(&out.join(format!("{}.document.json", doc.id)), &json)?;
    Ok(())
}

pub fn extract_features(config: &Config, args: &ExtractArgs) -> Result<bool> {
    output_paths(&args.inputs, &args.out, ".lines.csv")?;
    let cfg = config.feature_config()?;
    Ok(batch(&args.inputs, |_, path| {
        let doc = read_document(path, config)?;
        extract_one(&doc, &cfg, &args.out)
    }))
}

/// Feature rows joined with their true labels. Rows without a label are
/// dropped with a warning.
fn training_rows(args: &TrainArgs, kind: ElementKind) -> Result<(Dataset, Vec<LogicalLabel>)> {
    let text = std::fs::read_to_string(&args.truth).with_context(|| format!("reading {}", args.truth.display()))?;
    let truth = GroundTruth::read_csv(text.as_bytes()).with_context(|| format!("in {}", args.truth.display()))?;
    let mut by_key: HashMap<(&str, &str), LogicalLabel> = HashMap::new();
    let mut by_id: HashMap<&str, Vec<LogicalLabel>> = HashMap::new();
    for (k, l) in truth.labels().iter().filter(|(k, _)| k.kind == kind) {
        by_key.insert((k.document_id.as_str(), k.element_id.as_str()), *l);
        by_id.entry(k.element_id.as_str()).or_default().push(*l);
    }
    let mut parts = Vec::new();
    let mut labels = Vec::new();
    let mut dropped = 0;
    for path in &args.features {
        let file = std::fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
        let (data, ids) = Dataset::read_csv(file, kind).with_context(|| format!("in {}", path.display()))?;
        let mut keep = Vec::new();
        for (row, (doc, id)) in ids.iter().enumerate() {
            let label = if doc.is_empty() {
                match by_id.get(id.as_str()).map(Vec::as_slice) {
                    Some([l]) => Some(*l),
                    Some(_) => bail!("{}: element `{id}` is ambiguous without a document_id column", path.display()),
                    None => None,
                }
            } else {
                by_key.get(&(doc.as_str(), id.as_str())).copied()
            };
            match label {
                Some(l) => {
                    keep.push(row);
                    labels.push(l);
                }
                None => dropped += 1,
            }
        }
        parts.push(data.select(&keep));
    }
    if dropped > 0 {
        log::warn!("{dropped} feature row(s) have no {} label in the truth and were skipped", kind.as_str());
    }
    Ok((Dataset::concat(&parts)?, labels))
}

fn describe(model: &OneVsRest) -> String {
    let level = match model.kind {
        ElementKind::Line => Level::Line,
        ElementKind::Block => Level::Block,
    };
    let mut out = String::new();
    for m in &model.models {
        let _ = writeln!(out, "{} ({} rule(s))", m.positive, m.rules.len());
        for r in &m.rules {
            let conds: Vec<String> = r.conditions.iter().map(|c| condition_expr(level, c).to_string()).collect();
            let _ = writeln!(
                out,
                "  {}  [{} positive, {} negative]",
                conds.join(" and "),
                r.train_positives,
                r.train_negatives
            );
        }
        let _ = writeln!(out, "  otherwise not {}", m.positive);
    }
    out
}

pub fn train(args: &TrainArgs, seed: u64) -> Result<bool> {
    let kind = match args.kind {
        Kind::Line => ElementKind::Line,
        Kind::Block => ElementKind::Block,
    };
    let (data, labels) = training_rows(args, kind)?;
    if data.rows() == 0 {
        bail!("no feature row has a {} label in {}", kind.as_str(), args.truth.display());
    }
    let params = Hyperparameters {
        prune_size: args.prune_size,
        k: args.k,
        dl_allowance: args.dl_allowance,
        n_discretize_bins: args.bins,
        binning: match args.binning {
            BinningArg::EqualFrequency => Binning::EqualFrequency,
            BinningArg::EqualWidth => Binning::EqualWidth,
        },
    };
    let targets: Vec<LogicalLabel> = if args.label.eq_ignore_ascii_case("all") {
        LogicalLabel::TAGSET.into_iter().filter(|l| labels.contains(l)).collect()
    } else {
        let l = parse_output_label(&args.label, None)?;
        if !labels.contains(&l) {
            bail!("no training row is labelled {l}");
        }
        vec![l]
    };

    let model = if args.grid {
        let mut table = String::from("label,prune_size,k,dl_allowance,n_discretize_bins,mean_f1,total_rules,best\n");
        let mut models = Vec::new();
        for &label in &targets {
            let binary: Vec<bool> = labels.iter().map(|l| *l == label).collect();
            let result = grid_search(&data, &binary, label, &HyperGrid::default(), args.folds, seed)?;
            for s in &result.scores {
                let p = s.params;
                let _ = writeln!(
                    table,
                    "{label},{},{},{},{},{:.6},{},{}",
                    p.prune_size,
                    p.k,
                    p.dl_allowance,
                    p.n_discretize_bins,
                    s.mean_f1,
                    s.total_rules,
                    p == result.best
                );
            }
            let best = Hyperparameters { binning: params.binning, ..result.best };
            log::info!("{label}: best {best:?}");
            models.push(fit(&data, &binary, label, best, seed)?);
        }
        write_atomic(&args.out.join(format!("{}.grid.csv", kind.as_str())), table.as_bytes())?;
        print!("{table}");
        OneVsRest { kind, models }
    } else if targets.len() > 1 {
        fit_one_vs_rest(&data, &labels, params, seed)?
    } else {
        let binary: Vec<bool> = labels.iter().map(|l| *l == targets[0]).collect();
        OneVsRest { kind, models: vec![fit(&data, &binary, targets[0], params, seed)?] }
    };

    let (rules_path, meta_path) = model_files(&args.out, kind);
    write_atomic(&rules_path, model.to_rule_text().as_bytes())?;
    let mut meta = model.metadata_json()?.into_bytes();
    meta.push(b'\n');
    write_atomic(&meta_path, &meta)?;
    print!("{}", describe(&model));
    Ok(true)
}

pub fn evaluate(args: &EvaluateArgs) -> Result<bool> {
    if !args.names.is_empty() && args.names.len() != args.predictions.len() {
        bail!("{} name(s) for {} prediction file(s)", args.names.len(), args.predictions.len());
    }
    if args.layouts.is_none() {
        log::warn!("no layout manifest given; reporting per label only");
    }
    let truth = GroundTruth::load(&args.truth, args.layouts.as_deref())?;
    let reports = args
        .predictions
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let name = args.names.get(i).cloned().unwrap_or_else(|| stem(p));
            let preds = load_predictions(p, None).with_context(|| format!("in {}", p.display()))?;
            let report = score(&preds, &truth).with_context(|| format!("scoring {}", p.display()))?;
            Ok((name, report))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut text = String::new();
    for (name, r) in &reports {
        let _ = writeln!(text, "== {name}\n{}", r.to_text());
    }
    let json = if reports.len() > 1 {
        let cmp = compare(&reports)?;
        let _ = writeln!(text, "== Comparison (mean over layouts, * marks the best)\n{}", cmp.to_text());
        serde_json::json!({
            "reports": reports.iter().map(|(n, r)| serde_json::json!({ "name": n, "report": r })).collect::<Vec<_>>(),
            "comparison": cmp,
        })
    } else {
        let (n, r) = &reports[0];
        serde_json::json!({ "reports": [ { "name": n, "report": r } ] })
    };
    print!("{text}");
    if let Some(path) = &args.json {
        let mut bytes = serde_json::to_vec_pretty(&json)?;
        bytes.push(b'\n');
        write_atomic(path, &bytes)?;
    }
    Ok(true)
}
