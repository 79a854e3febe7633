use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use coref_meter::corpus::{
    parse_hierarchy, parse_role_triples_str, parse_triples, Hierarchy, HierarchyOptions, Triple,
    TripleCounts,
};
use coref_meter::plaus::exemplar::parse_word_vectors;
use coref_meter::plaus::{
    build_concept_distribution, exemplar_score, generate_pairs, ngram_score, pado_score, pmi,
    resnik_score, seen_objects, ModelScore, PairGenOptions, PairRelation, WordVectors,
};

use crate::input;
use crate::report::{deliver, strip_meta_lines, to_json_text, RunMeta};

#[derive(Subcommand, Debug)]
pub enum PlausCommand {
    /// Aggregate co-occurrence counts from triple (and role) tables.
    BuildCounts(BuildCountsArgs),
    /// Score events with one plausibility model.
    Score(ScoreArgs),
    /// Draw (event, perturbed event) pairs for plausibility probing.
    GenPairs(GenPairsArgs),
}

pub fn run(command: PlausCommand) -> Result<()> {
    match command {
        PlausCommand::BuildCounts(args) => build_counts(args),
        PlausCommand::Score(args) => score(args),
        PlausCommand::GenPairs(args) => gen_pairs(args),
    }
}

#[derive(Args, Debug)]
pub struct BuildCountsArgs {
    /// subject<TAB>verb<TAB>object<TAB>count lines.
    #[arg(long, value_name = "FILE")]
    triples: PathBuf,

    /// predicate<TAB>role<TAB>argument<TAB>count lines.
    #[arg(long, value_name = "FILE")]
    roles: Option<PathBuf>,

    /// Cap each triple's count (occurrence-cap preprocessing).
    #[arg(long, value_name = "N")]
    cap: Option<u64>,

    /// Counts file (JSON; stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn build_counts(args: BuildCountsArgs) -> Result<()> {
    let meta = RunMeta::new(
        "plaus build-counts",
        json!({ "triples": args.triples, "roles": args.roles, "cap": args.cap }),
    );

    let mut counts = parse_triples(&args.triples, args.cap)?;
    if let Some(path) = &args.roles {
        let text = input::read(path)?;
        parse_role_triples_str(&text, &path.display().to_string(), &mut counts)?;
    }

    let wrapped = meta.wrap(serde_json::to_value(&counts)?);
    deliver(args.out.as_deref(), &to_json_text(&wrapped))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    /// Count(s,v)·Count(v,o)/Count(v)² from the triple table.
    Ngram,
    /// Pointwise mutual information of one pair of the triple.
    Pmi,
    /// Selectional association against a concept hierarchy.
    Resnik,
    /// Role-conditioned conditional estimate from the role table.
    Pado,
    /// Frequency-weighted cosine to attested objects of the verb.
    Exemplar,
}

impl ModelArg {
    fn name(self) -> &'static str {
        match self {
            ModelArg::Ngram => "ngram",
            ModelArg::Pmi => "pmi",
            ModelArg::Resnik => "resnik",
            ModelArg::Pado => "pado",
            ModelArg::Exemplar => "exemplar",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RelationArg {
    /// Subject-verb pair.
    Sv,
    /// Verb-object pair.
    Vo,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    /// Counts from `plaus build-counts` (JSON).
    #[arg(long, value_name = "FILE")]
    counts: PathBuf,

    #[arg(long, value_enum)]
    model: ModelArg,

    /// Events to score: JSON lines of {"subject", "verb", "object"}
    /// (pado also reads an optional "role").
    #[arg(long, value_name = "FILE")]
    events: PathBuf,

    /// Which pair of the triple pmi scores.
    #[arg(long, value_enum, default_value_t = RelationArg::Vo)]
    relation: RelationArg,

    /// Role for pado when an event line has none.
    #[arg(long, value_name = "ROLE")]
    role: Option<String>,

    /// Concept hierarchy edges, child<TAB>parent (resnik).
    #[arg(long, value_name = "FILE")]
    hierarchy: Option<PathBuf>,

    /// Sense inventory, word<TAB>concept (resnik).
    #[arg(long, value_name = "FILE")]
    senses: Option<PathBuf>,

    /// Hierarchy root concept (default: the unique parentless concept).
    #[arg(long, value_name = "CONCEPT")]
    root: Option<String>,

    /// Drop hierarchy concepts above this depth (root = depth 0).
    #[arg(long, value_name = "N")]
    min_depth: Option<usize>,

    /// Word vectors TSV (exemplar).
    #[arg(long, value_name = "FILE")]
    vectors: Option<PathBuf>,

    /// Scores file (JSON lines; stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// One event to score; `role` only matters for pado.
#[derive(Deserialize)]
struct EventRow {
    subject: String,
    verb: String,
    object: String,
    #[serde(default)]
    role: Option<String>,
}

fn score(args: ScoreArgs) -> Result<()> {
    let meta = RunMeta::new(
        "plaus score",
        json!({
            "counts": args.counts,
            "model": args.model.name(),
            "events": args.events,
            "relation": format!("{:?}", args.relation).to_lowercase(),
            "role": args.role,
            "hierarchy": args.hierarchy,
            "senses": args.senses,
            "root": args.root,
            "min_depth": args.min_depth,
            "vectors": args.vectors,
        }),
    );

    let counts: TripleCounts = serde_json::from_str(&input::read(&args.counts)?)
        .with_context(|| format!("{} is not a counts file", args.counts.display()))?;
    let events = load_events(&args.events)?;
    let scorer = build_scorer(&args, &counts)?;

    let scored: Vec<Result<String>> = events
        .par_iter()
        .map(|(lineno, row)| {
            let score = scorer
                .score(&counts, row)
                .map_err(|e| anyhow!("{}:{}: {e}", args.events.display(), lineno))?;
            Ok(json!({
                "subject": row.subject,
                "verb": row.verb,
                "object": row.object,
                "model": args.model.name(),
                "value": score.value,
                "flags": score.flags,
            })
            .to_string())
        })
        .collect();

    let mut text = meta.meta_line(json!({ "events": events.len() }));
    text.push('\n');
    for line in scored {
        text.push_str(&line?);
        text.push('\n');
    }
    deliver(args.out.as_deref(), &text)
}

fn load_events(path: &Path) -> Result<Vec<(usize, EventRow)>> {
    let text = strip_meta_lines(&input::read(path)?);
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: EventRow = serde_json::from_str(line)
            .with_context(|| format!("{}:{}: bad event record", path.display(), i + 1))?;
        out.push((i + 1, row));
    }
    Ok(out)
}

/// The per-event scoring closure for the chosen model, with its extra
/// resources loaded and validated up front.
enum Scorer {
    Ngram,
    Pmi(PairRelation),
    Resnik { hierarchy: Hierarchy, dist: coref_meter::plaus::ConceptDistribution },
    Pado { default_role: Option<String> },
    Exemplar { vectors: WordVectors },
}

impl Scorer {
    fn score(&self, counts: &TripleCounts, row: &EventRow) -> Result<ModelScore> {
        let triple = Triple::new(&row.subject, &row.verb, &row.object);
        match self {
            Scorer::Ngram => Ok(ngram_score(counts, &triple)),
            Scorer::Pmi(relation) => Ok(match relation {
                PairRelation::SubjectVerb => pmi(counts, &row.subject, &row.verb, *relation),
                PairRelation::VerbObject => pmi(counts, &row.verb, &row.object, *relation),
            }),
            Scorer::Resnik { hierarchy, dist } => {
                Ok(resnik_score(dist, hierarchy, &row.verb, &row.object)?)
            }
            Scorer::Pado { default_role } => {
                let role = row.role.as_deref().or(default_role.as_deref()).ok_or_else(|| {
                    anyhow!("event has no role and --role was not given")
                })?;
                Ok(pado_score(counts, &row.verb, &row.object, role))
            }
            Scorer::Exemplar { vectors } => {
                let seen = seen_objects(counts, &row.verb);
                Ok(exemplar_score(vectors, &seen, &row.object)?)
            }
        }
    }
}

fn build_scorer(args: &ScoreArgs, counts: &TripleCounts) -> Result<Scorer> {
    match args.model {
        ModelArg::Ngram => Ok(Scorer::Ngram),
        ModelArg::Pmi => Ok(Scorer::Pmi(match args.relation {
            RelationArg::Sv => PairRelation::SubjectVerb,
            RelationArg::Vo => PairRelation::VerbObject,
        })),
        ModelArg::Resnik => {
            let (Some(edges), Some(senses)) = (&args.hierarchy, &args.senses) else {
                bail!("resnik needs --hierarchy and --senses");
            };
            let options = HierarchyOptions {
                root: args.root.clone(),
                min_depth: args.min_depth.unwrap_or(1),
            };
            let (hierarchy, warnings) = parse_hierarchy(edges, Some(senses.as_path()), &options)?;
            input::print_warnings(&warnings);
            let dist = build_concept_distribution(counts, &hierarchy);
            for obj in dist.dropped_objects() {
                eprintln!("warning: object {obj:?} has no usable senses and was dropped");
            }
            Ok(Scorer::Resnik { hierarchy, dist })
        }
        ModelArg::Pado => Ok(Scorer::Pado { default_role: args.role.clone() }),
        ModelArg::Exemplar => {
            let Some(path) = &args.vectors else {
                bail!("exemplar needs --vectors");
            };
            Ok(Scorer::Exemplar { vectors: parse_word_vectors(path)? })
        }
    }
}

#[derive(Args, Debug)]
pub struct GenPairsArgs {
    /// Counts from `plaus build-counts` (JSON).
    #[arg(long, value_name = "FILE")]
    counts: PathBuf,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Number of pairs to draw.
    #[arg(long, value_name = "N")]
    n: usize,

    /// Keep only subjects/objects attested at least this often in the
    /// position being perturbed.
    #[arg(long, value_name = "N", default_value_t = 1)]
    min_position_count: u64,

    /// Pairs file (JSON lines; stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn gen_pairs(args: GenPairsArgs) -> Result<()> {
    let meta = RunMeta::new(
        "plaus gen-pairs",
        json!({
            "counts": args.counts,
            "seed": args.seed,
            "n": args.n,
            "min_position_count": args.min_position_count,
        }),
    );

    let counts: TripleCounts = serde_json::from_str(&input::read(&args.counts)?)
        .with_context(|| format!("{} is not a counts file", args.counts.display()))?;
    let options = PairGenOptions { min_position_count: args.min_position_count };
    let pairs = generate_pairs(&counts, args.seed, args.n, &options)?;

    let mut text = meta.meta_line(json!({ "pairs": pairs.len() }));
    text.push('\n');
    for (event, perturbed) in &pairs {
        text.push_str(&json!({ "event": event, "perturbed": perturbed }).to_string());
        text.push('\n');
    }
    deliver(args.out.as_deref(), &text)
}
