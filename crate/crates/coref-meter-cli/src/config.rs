//! Config-file support: a TOML file can supply default values for any
//! flag, and explicit command-line flags always win.
//!
//! The file is keyed by subcommand: `[score]`, `[gap]`, `[pcr.extract]`,
//! `[plaus.build-counts]` and so on, plus an optional `[global]` table
//! applied to every command. Keys are flag names with `-` or `_`
//! (`keep_singletons = true` becomes `--keep-singletons`). Booleans switch
//! flags on, arrays repeat a flag, `false` is ignored.
//!
//! The merge happens on the raw argument vector before parsing, so the
//! parser sees one flat set of flags and its own validation applies
//! unchanged.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Commands whose next bare token is a nested subcommand.
const NESTED: [&str; 2] = ["pcr", "plaus"];

/// Global flags that consume a following value token.
const VALUED_GLOBALS: [&str; 2] = ["--config", "--threads"];

pub fn merge_config_args(argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = find_config(&argv) else {
        return Ok(argv);
    };
    let Some(command) = command_path(&argv) else {
        return Ok(argv); // bare `--help` or similar; nothing to merge into
    };

    let text = std::fs::read_to_string(Path::new(&path))
        .with_context(|| format!("cannot read config file {path}"))?;
    let table: toml::Table =
        text.parse().with_context(|| format!("config file {path} is not valid TOML"))?;

    // [global] first so the command's own table overrides it.
    let mut defaults: BTreeMap<String, toml::Value> = BTreeMap::new();
    if let Some(toml::Value::Table(global)) = table.get("global") {
        for (k, v) in global {
            defaults.insert(normalize_key(k), v.clone());
        }
    }
    if let Some(own) = lookup(&table, &command) {
        for (k, v) in own {
            defaults.insert(normalize_key(k), v.clone());
        }
    }

    let mut argv = argv;
    for (key, value) in defaults {
        if key == "config" || flag_present(&argv, &key) {
            continue;
        }
        append_flag(&mut argv, &key, &value)
            .with_context(|| format!("config file {path}, key {key}"))?;
    }
    Ok(argv)
}

fn find_config(argv: &[String]) -> Option<String> {
    let mut it = argv.iter().skip(1);
    while let Some(arg) = it.next() {
        if arg == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = arg.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

/// The subcommand tokens in argv, e.g. `["pcr", "extract"]`.
fn command_path(argv: &[String]) -> Option<Vec<String>> {
    let mut path = Vec::new();
    let mut it = argv.iter().skip(1).peekable();
    while let Some(arg) = it.next() {
        if VALUED_GLOBALS.contains(&arg.as_str()) {
            it.next();
            continue;
        }
        if arg.starts_with('-') {
            continue;
        }
        path.push(arg.clone());
        if NESTED.contains(&arg.as_str()) {
            continue; // one more bare token to find
        }
        break;
    }
    if path.is_empty() {
        None
    } else {
        Some(path)
    }
}

fn lookup<'a>(table: &'a toml::Table, command: &[String]) -> Option<&'a toml::Table> {
    let mut current = table;
    for (i, part) in command.iter().enumerate() {
        let entry = current
            .get(part.as_str())
            .or_else(|| current.get(part.replace('-', "_").as_str()))?;
        match entry {
            toml::Value::Table(t) if i + 1 == command.len() => return Some(t),
            toml::Value::Table(t) => current = t,
            _ => return None,
        }
    }
    None
}

fn normalize_key(key: &str) -> String {
    key.replace('_', "-")
}

fn flag_present(argv: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    let prefixed = format!("--{key}=");
    argv.iter().skip(1).any(|a| *a == flag || a.starts_with(&prefixed))
}

fn append_flag(argv: &mut Vec<String>, key: &str, value: &toml::Value) -> Result<()> {
    match value {
        toml::Value::Boolean(true) => argv.push(format!("--{key}")),
        toml::Value::Boolean(false) => {}
        toml::Value::String(s) => {
            argv.push(format!("--{key}"));
            argv.push(s.clone());
        }
        toml::Value::Integer(i) => {
            argv.push(format!("--{key}"));
            argv.push(i.to_string());
        }
        toml::Value::Float(f) => {
            argv.push(format!("--{key}"));
            argv.push(f.to_string());
        }
        toml::Value::Array(items) => {
            for item in items {
                match item {
                    toml::Value::Array(_) | toml::Value::Table(_) => {
                        bail!("nested arrays and tables are not valid flag values")
                    }
                    other => append_flag(argv, key, other)?,
                }
            }
        }
        toml::Value::Table(_) | toml::Value::Datetime(_) => {
            bail!("tables and datetimes are not valid flag values")
        }
    }
    Ok(())
}
