//! The `usertype` command line: synth, extract, train, evaluate, classify.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input or configuration,
//! 3 degenerate evaluation, 4 incompatible model file. Every command writes
//! `<output>.manifest.json` next to its main output.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use usertype::features::{extract_all, write_feature_csv, FeatureConfig, PromotionName};
use usertype::forest::{train_forest, ForestError, RandomForestModel, TrainConfig};
use usertype::ingest::{parse_dataset_bytes, write_rejects, ParseOutcome, UserClass, UserRecord};
use usertype::metrics::{cross_validate_with, MetricsError};
use usertype::synth::{generate_corpus_with, SynthConfig, SynthError, TemplateSet};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Degenerate(String),
    #[error("{0}")]
    Model(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Model(_) => 4,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "usertype", version, about = "Classify microblog accounts into six behavioral user types")]
pub struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON file with `synth`, `features`, `train` and `evaluate` sections; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labeled synthetic corpus.
    Synth(SynthArgs),
    /// Write the feature table and reject report for a corpus.
    Extract(ExtractArgs),
    /// Train a forest on a labeled corpus.
    Train(TrainArgs),
    /// Stratified k-fold cross-validation on a labeled corpus.
    Evaluate(EvaluateArgs),
    /// Predict classes for a corpus with a trained model.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of valid records; without --counts the reference class mix is scaled to it.
    #[arg(long)]
    pub total: Option<usize>,
    /// Six comma-separated class counts in class order.
    #[arg(long, value_parser = parse_counts)]
    pub counts: Option<[usize; UserClass::COUNT]>,
    /// Additional invalid lines to interleave.
    #[arg(long)]
    pub corrupt: Option<usize>,
    /// Template file replacing the built-in class templates.
    #[arg(long)]
    pub templates: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PromotionNameArg {
    DisplayName,
    ScreenName,
}

#[derive(Debug, Args)]
pub struct FeatureArgs {
    /// Name compared against the website host for the promotion score.
    #[arg(long, value_enum)]
    pub promotion_name: Option<PromotionNameArg>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Reject report path (default: `<out>.rejects.jsonl`).
    #[arg(long)]
    pub rejects: Option<PathBuf>,
    #[command(flatten)]
    pub features: FeatureArgs,
}

#[derive(Debug, Args)]
pub struct ForestArgs {
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub min_samples_split: Option<usize>,
    #[arg(long)]
    pub features_per_split: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub features: FeatureArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub report: PathBuf,
    /// Optional per-class CSV table.
    #[arg(long)]
    pub classes_csv: Option<PathBuf>,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub features: FeatureArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_counts(text: &str) -> std::result::Result<[usize; UserClass::COUNT], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != UserClass::COUNT {
        return Err(format!("expected {} comma-separated counts, got {}", UserClass::COUNT, parts.len()));
    }
    let mut counts = [0; UserClass::COUNT];
    for (slot, part) in counts.iter_mut().zip(parts) {
        *slot = part.parse().map_err(|_| format!("{part:?} is not a non-negative integer"))?;
    }
    Ok(counts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateConfig {
    pub k: usize,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        Self { k: 10 }
    }
}

/// Contents of `--config`. Every section is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub synth: SynthConfig,
    pub features: FeatureConfig,
    pub train: TrainConfig,
    pub evaluate: EvaluateConfig,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }
}

impl FeatureArgs {
    fn apply(&self, mut config: FeatureConfig) -> Result<FeatureConfig> {
        if let Some(name) = self.promotion_name {
            config.promotion_name = match name {
                PromotionNameArg::DisplayName => PromotionName::DisplayName,
                PromotionNameArg::ScreenName => PromotionName::ScreenName,
            };
        }
        config.validate().map_err(CliError::Invalid)?;
        Ok(config)
    }
}

impl ForestArgs {
    fn apply(&self, mut config: TrainConfig) -> Result<TrainConfig> {
        if let Some(n) = self.trees {
            config.n_trees = n;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(depth) = self.max_depth {
            config.max_depth = Some(depth);
        }
        if let Some(n) = self.min_samples_split {
            config.min_samples_split = n;
        }
        if let Some(n) = self.features_per_split {
            config.features_per_split = n;
        }
        config.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok(config)
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String> {
    let bytes = read_bytes(path)?;
    String::from_utf8(bytes).map_err(|_| CliError::Invalid(format!("{} is not UTF-8", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn manifest_path(output: &Path) -> PathBuf {
    with_suffix(output, ".manifest.json")
}

/// Provenance written next to each output. Not covered by the determinism
/// contract: it records wall-clock time and thread count.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub tool_version: &'static str,
    pub config: Value,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: Option<u64>,
    pub threads: usize,
    pub duration_seconds: f64,
    pub summary: Value,
}

struct Run {
    command: &'static str,
    started: Instant,
}

impl Run {
    fn finish(
        self,
        primary: &Path,
        config: Value,
        inputs: &[&Path],
        outputs: &[&Path],
        seed: Option<u64>,
        summary: Value,
    ) -> Result<()> {
        let manifest = RunManifest {
            command: self.command,
            tool_version: env!("CARGO_PKG_VERSION"),
            config,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            seed,
            threads: rayon::current_num_threads(),
            duration_seconds: self.started.elapsed().as_secs_f64(),
            summary,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        write_file(&manifest_path(primary), text.as_bytes())
    }
}

/// Parses and validates a corpus; rejected lines are logged, not fatal.
fn load_corpus(path: &Path) -> Result<ParseOutcome> {
    let bytes = read_bytes(path)?;
    let outcome = parse_dataset_bytes(&bytes);
    for reject in &outcome.rejects {
        log::warn!("{}:{}: {} ({})", path.display(), reject.line, reject.reason, reject.detail);
    }
    for warning in &outcome.warnings {
        log::info!("{}:{}: {}", path.display(), warning.line, warning.warning);
    }
    Ok(outcome)
}

fn require_labels(records: &[UserRecord]) -> Result<()> {
    let unlabeled: Vec<&str> = records
        .iter()
        .filter(|r| r.label.is_none())
        .map(|r| r.profile.user_id.as_str())
        .collect();
    if unlabeled.is_empty() {
        return Ok(());
    }
    const SHOWN: usize = 20;
    let mut list = unlabeled.iter().take(SHOWN).copied().collect::<Vec<_>>().join(", ");
    if unlabeled.len() > SHOWN {
        list.push_str(&format!(", … ({} more)", unlabeled.len() - SHOWN));
    }
    Err(CliError::Invalid(format!("{} record(s) have no label: {list}", unlabeled.len())))
}

/// Runs one parsed invocation. The thread pool must already be configured.
pub fn run(cli: &Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::Synth(args) => cmd_synth(args, &file),
        Command::Extract(args) => cmd_extract(args, &file),
        Command::Train(args) => cmd_train(args, &file),
        Command::Evaluate(args) => cmd_evaluate(args, &file),
        Command::Classify(args) => cmd_classify(args),
    }
}

fn cmd_synth(args: &SynthArgs, file: &FileConfig) -> Result<()> {
    let run = Run { command: "synth", started: Instant::now() };
    let mut config = file.synth.clone();
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    match (args.total, args.counts) {
        (total, Some(counts)) => {
            config.total_users = total.unwrap_or(counts.iter().sum());
            config.class_counts = Some(counts);
        }
        (Some(total), None) => {
            config.total_users = total;
            config.class_counts = None;
        }
        (None, None) => {}
    }
    if let Some(n) = args.corrupt {
        config.corruption_count = n;
    }
    let templates = match &args.templates {
        Some(path) => TemplateSet::from_json(&read_text(path)?)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?,
        None => TemplateSet::default(),
    };
    let counts = config.resolved_counts().map_err(synth_error)?;
    let corpus = generate_corpus_with(&config, &templates).map_err(synth_error)?;
    write_file(&args.out, &corpus)?;

    let mut inputs = Vec::new();
    if let Some(path) = &args.templates {
        inputs.push(path.as_path());
    }
    run.finish(
        &args.out,
        json!({ "synth": config }),
        &inputs,
        &[&args.out],
        Some(config.seed),
        json!({
            "records": config.total_users,
            "corrupt_lines": config.corruption_count,
            "class_counts": class_map(&counts),
        }),
    )
}

fn synth_error(e: SynthError) -> CliError {
    CliError::Invalid(e.to_string())
}

fn class_map(counts: &[usize; UserClass::COUNT]) -> Value {
    let map: serde_json::Map<String, Value> = UserClass::ALL
        .into_iter()
        .map(|c| (c.name().to_owned(), json!(counts[c.index()])))
        .collect();
    Value::Object(map)
}

fn cmd_extract(args: &ExtractArgs, file: &FileConfig) -> Result<()> {
    let run = Run { command: "extract", started: Instant::now() };
    let features = args.features.apply(file.features)?;
    let outcome = load_corpus(&args.input)?;
    let vectors = extract_all(&outcome.records, &features);

    let mut csv = Vec::new();
    let rows = outcome
        .records
        .iter()
        .zip(vectors)
        .map(|(r, v)| (r.profile.user_id.clone(), r.label, v));
    write_feature_csv(rows, &mut csv).expect("writing to memory");
    write_file(&args.out, &csv)?;

    let rejects_path = args.rejects.clone().unwrap_or_else(|| with_suffix(&args.out, ".rejects.jsonl"));
    let mut report = Vec::new();
    write_rejects(&outcome.rejects, &mut report).expect("writing to memory");
    write_file(&rejects_path, &report)?;

    run.finish(
        &args.out,
        json!({ "features": features }),
        &[&args.input],
        &[&args.out, &rejects_path],
        None,
        json!({ "records": outcome.records.len(), "rejects": outcome.rejects.len() }),
    )
}

fn forest_error(e: ForestError) -> CliError {
    CliError::Invalid(e.to_string())
}

fn cmd_train(args: &TrainArgs, file: &FileConfig) -> Result<()> {
    let run = Run { command: "train", started: Instant::now() };
    let config = args.forest.apply(file.train.clone())?;
    let features = args.features.apply(file.features)?;
    let outcome = load_corpus(&args.input)?;
    require_labels(&outcome.records)?;
    let vectors = extract_all(&outcome.records, &features);
    let dataset: Vec<_> = vectors
        .into_iter()
        .zip(&outcome.records)
        .map(|(v, r)| (v, r.label.expect("checked")))
        .collect();
    let mut model = train_forest(&dataset, &config).map_err(forest_error)?;
    model.features = features;
    let mut text = model.to_json();
    text.push('\n');
    write_file(&args.model, text.as_bytes())?;

    let mut counts = [0; UserClass::COUNT];
    for (_, c) in &dataset {
        counts[c.index()] += 1;
    }
    run.finish(
        &args.model,
        json!({ "train": config, "features": features }),
        &[&args.input],
        &[&args.model],
        Some(config.seed),
        json!({
            "records": dataset.len(),
            "rejects": outcome.rejects.len(),
            "class_counts": class_map(&counts),
        }),
    )
}

fn cmd_evaluate(args: &EvaluateArgs, file: &FileConfig) -> Result<()> {
    let run = Run { command: "evaluate", started: Instant::now() };
    let config = args.forest.apply(file.train.clone())?;
    let features = args.features.apply(file.features)?;
    let k = args.k.unwrap_or(file.evaluate.k);
    let outcome = load_corpus(&args.input)?;
    require_labels(&outcome.records)?;
    // One seed drives both the fold assignment and the forests.
    let report = cross_validate_with(&outcome.records, &features, &config, k, config.seed).map_err(|e| match e {
        MetricsError::Fold { fold, source: ForestError::DegenerateDataset(class) } => CliError::Degenerate(format!(
            "fold {fold}: its training split contains only {class} records"
        )),
        MetricsError::Fold { fold, source } => CliError::Degenerate(format!("fold {fold}: {source}")),
        other => CliError::Invalid(other.to_string()),
    })?;
    write_file(&args.report, report.to_json().as_bytes())?;
    let mut outputs = vec![args.report.as_path()];
    if let Some(path) = &args.classes_csv {
        let mut csv = Vec::new();
        report.write_class_csv(&mut csv).expect("writing to memory");
        write_file(path, &csv)?;
        outputs.push(path);
    }

    let summary: serde_json::Map<String, Value> = report
        .per_class
        .iter()
        .map(|m| (m.class.name().to_owned(), json!({ "f_measure": m.f_measure, "auc": m.auc })))
        .collect();
    run.finish(
        &args.report,
        json!({ "train": config, "features": features, "evaluate": { "k": k } }),
        &[&args.input],
        &outputs,
        Some(config.seed),
        json!({
            "records": report.n_records,
            "rejects": outcome.rejects.len(),
            "accuracy": report.accuracy(),
            "macro_auc": report.macro_auc(),
            "per_class": summary,
        }),
    )
}

fn cmd_classify(args: &ClassifyArgs) -> Result<()> {
    let run = Run { command: "classify", started: Instant::now() };
    let model_text = read_bytes(&args.model)?;
    let model_text = String::from_utf8(model_text)
        .map_err(|_| CliError::Model(format!("{}: not a UTF-8 model file", args.model.display())))?;
    let model = RandomForestModel::from_json(&model_text)
        .map_err(|e| CliError::Model(format!("{}: {e}", args.model.display())))?;
    let outcome = load_corpus(&args.input)?;
    let vectors = extract_all(&outcome.records, &model.features);

    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["user_id".to_owned(), "predicted".to_owned()];
    header.extend(UserClass::ALL.iter().map(|c| format!("p_{}", c.name())));
    writer.write_record(&header).expect("writing to memory");
    for (record, v) in outcome.records.iter().zip(&vectors) {
        let scores = model.predict_proba(v).map_err(|e| CliError::Invalid(e.to_string()))?;
        let mut row = vec![record.profile.user_id.clone(), usertype::forest::argmax(&scores).name().to_owned()];
        // Shortest round-trip form, so rows sum to 1 up to float rounding.
        row.extend(scores.iter().map(|s| s.to_string()));
        writer.write_record(&row).expect("writing to memory");
    }
    let csv = writer.into_inner().expect("writing to memory");
    write_file(&args.out, &csv)?;

    run.finish(
        &args.out,
        json!({ "model": { "train": model.config, "features": model.features } }),
        &[&args.input, &args.model],
        &[&args.out],
        Some(model.config.seed),
        json!({ "records": outcome.records.len(), "rejects": outcome.rejects.len() }),
    )
}

/// Configures the global pool, runs, and maps the outcome to an exit code.
pub fn main_with(cli: Cli) -> i32 {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return 1;
        }
    }
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_flag() {
        assert_eq!(parse_counts("19,399,157,49,51,41").unwrap(), [19, 399, 157, 49, 51, 41]);
        assert_eq!(parse_counts(" 1, 2,3,4,5,6").unwrap(), [1, 2, 3, 4, 5, 6]);
        assert!(parse_counts("1,2,3").is_err());
        assert!(parse_counts("1,2,3,4,5,-6").is_err());
        assert!(parse_counts("a,2,3,4,5,6").is_err());
    }

    proptest::proptest! {
        #[test]
        fn counts_flag_round_trips(counts in proptest::array::uniform6(0usize..100_000)) {
            let text = counts.map(|c| c.to_string()).join(",");
            proptest::prop_assert_eq!(parse_counts(&text), Ok(counts));
        }

        #[test]
        fn counts_flag_never_panics(text in "[0-9, -]{0,30}") {
            let _ = parse_counts(&text);
        }
    }

    #[test]
    fn config_file_sections_are_optional() {
        let c: FileConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, FileConfig::default());
        let c: FileConfig = serde_json::from_str(r#"{"train":{"n_trees":7},"evaluate":{"k":5}}"#).unwrap();
        assert_eq!(c.train.n_trees, 7);
        assert_eq!(c.train.seed, 42);
        assert_eq!(c.evaluate.k, 5);
        assert!(serde_json::from_str::<FileConfig>(r#"{"trian":{}}"#).is_err());
        assert!(serde_json::from_str::<FileConfig>(r#"{"train":{"trees":3}}"#).is_err());
    }

    #[test]
    fn flags_override_config() {
        let base = TrainConfig { n_trees: 7, seed: 3, ..Default::default() };
        let args = ForestArgs { trees: Some(11), seed: None, max_depth: Some(4), min_samples_split: None, features_per_split: None };
        let merged = args.apply(base).unwrap();
        assert_eq!((merged.n_trees, merged.seed, merged.max_depth), (11, 3, Some(4)));
        let bad = ForestArgs { trees: Some(0), seed: None, max_depth: None, min_samples_split: None, features_per_split: None };
        assert_eq!(bad.apply(TrainConfig::default()).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn manifest_names() {
        assert_eq!(manifest_path(Path::new("out/model.json")), PathBuf::from("out/model.json.manifest.json"));
    }
}
