//! Prompt rendering for binary pronoun instances.
//!
//! Templates use `{placeholder}` syntax with `{{` and `}}` as literal
//! braces. Recognized placeholders: `context`, `pronoun`, `cand1`,
//! `cand2`, `speaker`. Verbalized features are prepended, one sentence
//! each, in input order: `The NAME of "X" is Y.`

use serde::Deserialize;
use thiserror::Error;

use super::PcrInstance;

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct Feature {
    pub name: String,
    pub x: String,
    pub y: String,
}

impl Feature {
    fn sentence(&self) -> String {
        format!("The {} of \"{}\" is {}.", self.name, self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PromptOptions {
    /// Render the context as speaker turns (`NAME: tokens...`, one line
    /// per run of same-speaker tokens) when speaker metadata is present.
    pub include_speakers: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("unknown placeholder {{{0}}}")]
    UnknownPlaceholder(String),
    #[error("unmatched brace in template")]
    UnmatchedBrace,
    #[error("template uses {{speaker}} but the instance has no speaker metadata")]
    NoSpeakers,
}

pub fn format_prompt(
    instance: &PcrInstance,
    template: &str,
    features: &[Feature],
    options: &PromptOptions,
) -> Result<String, PromptError> {
    let mut body = String::new();
    let mut chars = template.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '{' => {
                if chars.peek() == Some(&'{') {
                    chars.next();
                    body.push('{');
                    continue;
                }
                let mut name = String::new();
                loop {
                    match chars.next() {
                        Some('}') => break,
                        Some(ch) => name.push(ch),
                        None => return Err(PromptError::UnmatchedBrace),
                    }
                }
                body.push_str(&substitute(instance, &name, options)?);
            }
            '}' => {
                if chars.peek() == Some(&'}') {
                    chars.next();
                    body.push('}');
                } else {
                    return Err(PromptError::UnmatchedBrace);
                }
            }
            _ => body.push(c),
        }
    }

    if features.is_empty() {
        return Ok(body);
    }
    let mut out = features.iter().map(Feature::sentence).collect::<Vec<_>>().join(" ");
    out.push('\n');
    out.push_str(&body);
    Ok(out)
}

fn substitute(
    instance: &PcrInstance,
    name: &str,
    options: &PromptOptions,
) -> Result<String, PromptError> {
    match name {
        "context" => Ok(render_context(instance, options)),
        "pronoun" => Ok(instance.pronoun_text()),
        "cand1" => Ok(instance.span_text(instance.candidates[0])),
        "cand2" => Ok(instance.span_text(instance.candidates[1])),
        "speaker" => {
            let speakers = instance.speakers.as_ref().ok_or(PromptError::NoSpeakers)?;
            Ok(speakers[instance.pronoun.0].clone())
        }
        other => Err(PromptError::UnknownPlaceholder(other.to_string())),
    }
}

fn render_context(instance: &PcrInstance, options: &PromptOptions) -> String {
    match (&instance.speakers, options.include_speakers) {
        (Some(speakers), true) => {
            let mut lines: Vec<String> = Vec::new();
            let mut current: Option<&str> = None;
            for (tok, sp) in instance.context.iter().zip(speakers) {
                if current == Some(sp.as_str()) {
                    let line = lines.last_mut().expect("run has an open line");
                    line.push(' ');
                    line.push_str(tok);
                } else {
                    lines.push(format!("{sp}: {tok}"));
                    current = Some(sp.as_str());
                }
            }
            lines.join("\n")
        }
        _ => instance.context.join(" "),
    }
}
