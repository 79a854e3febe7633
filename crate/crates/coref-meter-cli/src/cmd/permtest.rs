use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde_json::json;

use coref_meter::disagg::{permutation_test_f1, permutation_test_mean};
use coref_meter::metrics::Components;

use crate::input;
use crate::report::{deliver, strip_meta_lines, to_json_text, RunMeta};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StatArg {
    /// Mean absolute difference of paired per-document scores; inputs are
    /// one number per line.
    Mean,
    /// Micro-F1 difference; inputs are JSON lines of component counts
    /// (recall_num, recall_den, precision_num, precision_den).
    F1,
}

#[derive(Args, Debug)]
pub struct PermtestArgs {
    /// Per-document scores of the first system.
    #[arg(long, value_name = "FILE")]
    a: PathBuf,

    /// Per-document scores of the second system, paired line by line.
    #[arg(long, value_name = "FILE")]
    b: PathBuf,

    #[arg(long, value_enum, default_value_t = StatArg::Mean)]
    stat: StatArg,

    #[arg(long, default_value_t = 10_000)]
    iterations: u64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Report file (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run(args: PermtestArgs) -> Result<()> {
    let meta = RunMeta::new(
        "permtest",
        json!({
            "a": args.a,
            "b": args.b,
            "stat": format!("{:?}", args.stat).to_lowercase(),
            "iterations": args.iterations,
            "seed": args.seed,
        }),
    );

    let (pairs, p_value) = match args.stat {
        StatArg::Mean => {
            let a = read_column(&args.a)?;
            let b = read_column(&args.b)?;
            (a.len(), permutation_test_mean(&a, &b, args.iterations, args.seed)?)
        }
        StatArg::F1 => {
            let a = read_components(&args.a)?;
            let b = read_components(&args.b)?;
            (a.len(), permutation_test_f1(&a, &b, args.iterations, args.seed)?)
        }
    };

    let wrapped = meta.wrap(json!({
        "stat": format!("{:?}", args.stat).to_lowercase(),
        "iterations": args.iterations,
        "seed": args.seed,
        "pairs": pairs,
        "p_value": p_value,
    }));
    deliver(args.out.as_deref(), &to_json_text(&wrapped))
}

fn read_column(path: &Path) -> Result<Vec<f64>> {
    let text = input::read(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .with_context(|| format!("{}:{}: not a number: {line:?}", path.display(), i + 1))?;
        out.push(v);
    }
    Ok(out)
}

fn read_components(path: &Path) -> Result<Vec<Components>> {
    let text = strip_meta_lines(&input::read(path)?);
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let c: Components = serde_json::from_str(line)
            .with_context(|| format!("{}:{}: bad component record", path.display(), i + 1))?;
        out.push(c);
    }
    Ok(out)
}
