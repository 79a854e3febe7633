use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Args, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use coref_meter::corpus::PartitionSide;
use coref_meter::pcr::wsc::{default_splitter, load_wsc_jsonl_str};
use coref_meter::pcr::{
    check_assumption, ensemble_select, extract_instances, format_prompt, parse_instances_jsonl_str,
    parse_predictions_jsonl_str, score_predictions, serialize_instances_jsonl, Feature,
    PcrInstance, PromptOptions, PronounSet,
};

use crate::cmd::Format;
use crate::input;
use crate::report::{cell, deliver, md_footer, md_table, strip_meta_lines, to_json_text, RunMeta};

#[derive(Subcommand, Debug)]
pub enum PcrCommand {
    /// Mine binary pronoun-resolution instances from annotated documents.
    Extract(ExtractArgs),
    /// Score choice predictions against extracted instances.
    Score(ScoreArgs),
    /// Route each instance between two systems by predicted cluster size.
    Ensemble(EnsembleArgs),
    /// Check whether a challenge-set ranking carries over to a reference set.
    Assume(AssumeArgs),
    /// Render instances through a prompt template.
    Prompt(PromptArgs),
}

pub fn run(command: PcrCommand) -> Result<()> {
    match command {
        PcrCommand::Extract(args) => extract(args),
        PcrCommand::Score(args) => score(args),
        PcrCommand::Ensemble(args) => ensemble(args),
        PcrCommand::Assume(args) => assume(args),
        PcrCommand::Prompt(args) => prompt(args),
    }
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    /// Annotated documents (.conll, or .jsonl documents).
    #[arg(long, value_name = "FILE", required_unless_present = "wsc", conflicts_with = "wsc")]
    docs: Option<PathBuf>,

    /// Winograd-style challenge file (JSON lines) instead of a corpus.
    #[arg(long, value_name = "FILE")]
    wsc: Option<PathBuf>,

    /// Dataset tag stamped on every instance (default: input file stem).
    #[arg(long, value_name = "NAME")]
    dataset: Option<String>,

    /// Distractor sampling and candidate-order seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Pronoun list, one per line (default: built-in third-person set).
    #[arg(long, value_name = "FILE", conflicts_with = "wsc")]
    pronouns: Option<PathBuf>,

    /// Instances file (JSON lines; stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn extract(args: ExtractArgs) -> Result<()> {
    let source = args.wsc.as_deref().or(args.docs.as_deref()).expect("clap requires one input");
    let dataset = args.dataset.clone().unwrap_or_else(|| file_stem(source));
    let meta = RunMeta::new(
        "pcr extract",
        json!({
            "docs": args.docs,
            "wsc": args.wsc,
            "dataset": dataset,
            "seed": args.seed,
            "pronouns": args.pronouns,
        }),
    );

    let (instances, stats) = match &args.wsc {
        Some(path) => {
            let text = input::read(path)?;
            let instances =
                load_wsc_jsonl_str(&text, &path.display().to_string(), &dataset, default_splitter)?;
            (instances, None)
        }
        None => {
            let docs = input::load_documents(source, PartitionSide::Gold)?;
            let pronouns = match &args.pronouns {
                Some(path) => {
                    let text = input::read(path)?;
                    PronounSet::from_words(text.lines().map(str::trim).filter(|l| !l.is_empty()))
                }
                None => PronounSet::default(),
            };
            let (instances, stats) = extract_instances(&docs, &pronouns, &dataset, args.seed);
            input::print_warnings(&stats.warnings);
            (instances, Some(stats))
        }
    };

    let extra = match stats {
        Some(s) => json!({ "stats": s }),
        None => json!({ "instances": instances.len() }),
    };
    let mut text = meta.meta_line(extra);
    text.push('\n');
    text.push_str(&serialize_instances_jsonl(&instances));
    deliver(args.out.as_deref(), &text)
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    /// Instances from `pcr extract` (JSON lines).
    #[arg(long, value_name = "FILE")]
    instances: PathBuf,

    /// Lines of {"instance_id", "choice"} with choice 1 or 2.
    #[arg(long, value_name = "FILE")]
    predictions: PathBuf,

    /// Count unanswered instances as wrong instead of skipping them.
    #[arg(long)]
    strict: bool,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Report file (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn score(args: ScoreArgs) -> Result<()> {
    let meta = RunMeta::new(
        "pcr score",
        json!({
            "instances": args.instances,
            "predictions": args.predictions,
            "strict": args.strict,
        }),
    );

    let instances = load_instances(&args.instances)?;
    let text = strip_meta_lines(&input::read(&args.predictions)?);
    let predictions = parse_predictions_jsonl_str(&text, &args.predictions.display().to_string())?;
    let rep = score_predictions(&instances, &predictions, args.strict)?;
    let wrapped = meta.wrap(serde_json::to_value(&rep)?);

    let text = match args.format {
        Format::Json => to_json_text(&wrapped),
        Format::Md => render_accuracy_md(&wrapped),
    };
    deliver(args.out.as_deref(), &text)
}

#[derive(Args, Debug)]
pub struct EnsembleArgs {
    /// Lines of {"instance_id", "cluster_size", "supervised_choice",
    /// "lm_choice"}.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,

    /// Predictions file (JSON lines; stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// One routing decision per instance: the supervised system answers for
/// predicted clusters larger than two, the language model otherwise.
#[derive(Deserialize)]
struct EnsembleRow {
    instance_id: String,
    cluster_size: usize,
    supervised_choice: u8,
    lm_choice: u8,
}

fn ensemble(args: EnsembleArgs) -> Result<()> {
    let meta = RunMeta::new("pcr ensemble", json!({ "in": args.input }));
    let text = strip_meta_lines(&input::read(&args.input)?);
    let mut lines = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: EnsembleRow = serde_json::from_str(line)
            .with_context(|| format!("{}:{}: bad ensemble record", args.input.display(), i + 1))?;
        for (label, choice) in [("supervised_choice", row.supervised_choice), ("lm_choice", row.lm_choice)] {
            anyhow::ensure!(
                choice == 1 || choice == 2,
                "{}:{}: {label} is {choice} (want 1 or 2)",
                args.input.display(),
                i + 1
            );
        }
        let choice = ensemble_select(row.supervised_choice, row.lm_choice, row.cluster_size);
        lines.push(json!({ "instance_id": row.instance_id, "choice": choice }).to_string());
    }

    let mut text = meta.meta_line(json!({ "predictions": lines.len() }));
    text.push('\n');
    for line in lines {
        text.push_str(&line);
        text.push('\n');
    }
    deliver(args.out.as_deref(), &text)
}

#[derive(Args, Debug)]
pub struct AssumeArgs {
    /// Accuracy of model theta on the challenge set.
    #[arg(long, value_name = "ACC")]
    theta_challenge: f64,

    /// Accuracy of model phi on the challenge set.
    #[arg(long, value_name = "ACC")]
    phi_challenge: f64,

    /// Accuracy of model theta on the reference set.
    #[arg(long, value_name = "ACC")]
    theta_reference: f64,

    /// Accuracy of model phi on the reference set.
    #[arg(long, value_name = "ACC")]
    phi_reference: f64,

    /// Report file (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn assume(args: AssumeArgs) -> Result<()> {
    let meta = RunMeta::new(
        "pcr assume",
        json!({
            "theta_challenge": args.theta_challenge,
            "phi_challenge": args.phi_challenge,
            "theta_reference": args.theta_reference,
            "phi_reference": args.phi_reference,
        }),
    );
    let check = check_assumption(
        args.theta_challenge,
        args.phi_challenge,
        args.theta_reference,
        args.phi_reference,
    );
    let wrapped = meta.wrap(serde_json::to_value(check)?);
    deliver(args.out.as_deref(), &to_json_text(&wrapped))
}

#[derive(Args, Debug)]
pub struct PromptArgs {
    /// Instances from `pcr extract` (JSON lines).
    #[arg(long, value_name = "FILE")]
    instances: PathBuf,

    /// Template text with {context}, {pronoun}, {cand1}, {cand2},
    /// {speaker}; double the braces to escape them.
    #[arg(long, value_name = "FILE")]
    template: PathBuf,

    /// Feature statements prepended to every prompt: JSON lines of
    /// {"name", "x", "y"}.
    #[arg(long, value_name = "FILE")]
    features: Option<PathBuf>,

    /// Render the context as speaker turns when speakers are recorded.
    #[arg(long)]
    speakers: bool,

    /// Prompts file (JSON lines; stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn prompt(args: PromptArgs) -> Result<()> {
    let meta = RunMeta::new(
        "pcr prompt",
        json!({
            "instances": args.instances,
            "template": args.template,
            "features": args.features,
            "speakers": args.speakers,
        }),
    );

    let instances = load_instances(&args.instances)?;
    let template = input::read(&args.template)?;
    let features = match &args.features {
        Some(path) => load_features(path)?,
        None => Vec::new(),
    };
    let options = PromptOptions { include_speakers: args.speakers };

    let mut text = meta.meta_line(json!({ "prompts": instances.len() }));
    text.push('\n');
    for instance in &instances {
        let prompt = format_prompt(instance, &template, &features, &options)
            .map_err(|e| anyhow!("instance {}: {e}", instance.instance_id))?;
        text.push_str(&json!({ "instance_id": instance.instance_id, "prompt": prompt }).to_string());
        text.push('\n');
    }
    deliver(args.out.as_deref(), &text)
}

fn load_instances(path: &Path) -> Result<Vec<PcrInstance>> {
    let text = strip_meta_lines(&input::read(path)?);
    Ok(parse_instances_jsonl_str(&text, &path.display().to_string())?)
}

fn load_features(path: &Path) -> Result<Vec<Feature>> {
    let text = strip_meta_lines(&input::read(path)?);
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Feature = serde_json::from_str(line)
            .with_context(|| format!("{}:{}: bad feature record", path.display(), i + 1))?;
        out.push(f);
    }
    Ok(out)
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "dataset".into())
}

/// Markdown render of the accuracy report JSON.
pub fn render_accuracy_md(r: &Value) -> String {
    let headers =
        ["dataset", "instances", "scored", "correct", "missing", "accuracy", "ci90 low", "ci90 high"];
    let row = |name: &str, a: &Value| -> Vec<String> {
        vec![
            name.to_string(),
            cell(&a["instances"]),
            cell(&a["scored"]),
            cell(&a["correct"]),
            cell(&a["missing"]),
            cell(&a["accuracy"]),
            cell(&a["ci90_low"]),
            cell(&a["ci90_high"]),
        ]
    };
    let mut rows = Vec::new();
    if let Some(per) = r["per_dataset"].as_object() {
        for (name, a) in per {
            rows.push(row(name, a));
        }
    }
    rows.push(row("overall", &r["overall"]));
    let mut out = String::from("# Pronoun resolution accuracy\n\n");
    out.push_str(&md_table(&headers, &rows));
    out.push_str(&format!(
        "\nMissing predictions are {}.\n",
        if r["strict"].as_bool().unwrap_or(false) { "counted as wrong" } else { "skipped" }
    ));
    out.push_str(&md_footer(r));
    out
}
