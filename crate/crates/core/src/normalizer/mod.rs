//! Pre-tokenization rewrites: cleanup, Thai mark ordering and the
//! special-token rules for laughter, numbers and repetitions.

mod audit;
mod char_order;
mod cleanup;
mod special;

pub use audit::{apply_records, RewriteRecord};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus_io::{PipelineConfig, RawThread, Stage};
use crate::error::{Error, Result};
use audit::{Buffer, Edit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecialRole {
    Crep,
    Wrep,
    Num,
    Laugh,
}

impl SpecialRole {
    pub const ALL: [SpecialRole; 4] = [SpecialRole::Crep, SpecialRole::Wrep, SpecialRole::Num, SpecialRole::Laugh];

    pub fn default_surface(self) -> &'static str {
        match self {
            SpecialRole::Crep => "[CREP]",
            SpecialRole::Wrep => "[WREP]",
            SpecialRole::Num => "[NUM]",
            SpecialRole::Laugh => "[LAUGH]",
        }
    }

    /// Whether the surface is followed by a repetition count.
    pub fn takes_count(self) -> bool {
        matches!(self, SpecialRole::Crep | SpecialRole::Wrep)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialToken {
    pub role: SpecialRole,
    pub surface: String,
}

/// The four special-token surfaces. Surfaces are non-empty, pairwise
/// distinct and contain no whitespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialTokens {
    surfaces: [String; 4],
}

impl Default for SpecialTokens {
    fn default() -> Self {
        Self {
            surfaces: SpecialRole::ALL.map(|r| r.default_surface().to_string()),
        }
    }
}

impl SpecialTokens {
    pub fn with_overrides(overrides: &BTreeMap<SpecialRole, String>) -> Result<Self> {
        let surfaces = SpecialRole::ALL.map(|r| {
            overrides
                .get(&r)
                .cloned()
                .unwrap_or_else(|| r.default_surface().to_string())
        });
        for (i, s) in surfaces.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::Config(format!("special token surface `{s}` is empty or has whitespace")));
            }
            if surfaces[..i].contains(s) {
                return Err(Error::Config(format!("special token surface `{s}` used twice")));
            }
        }
        Ok(Self { surfaces })
    }

    pub fn surface(&self, role: SpecialRole) -> &str {
        &self.surfaces[role as usize]
    }

    pub fn role_of(&self, surface: &str) -> Option<SpecialRole> {
        SpecialRole::ALL.into_iter().find(|&r| self.surface(r) == surface)
    }

    pub fn iter(&self) -> impl Iterator<Item = SpecialToken> + '_ {
        SpecialRole::ALL.into_iter().map(|role| SpecialToken {
            role,
            surface: self.surface(role).to_string(),
        })
    }
}

/// Char spans no rewrite may touch: special-token surfaces already in the
/// text and the count that follows a repetition marker.
pub(crate) struct Protected {
    span_id: Vec<u32>,
}

impl Protected {
    fn scan(chars: &[char], tokens: &SpecialTokens) -> Self {
        let surfaces: Vec<(SpecialRole, Vec<char>)> = SpecialRole::ALL
            .into_iter()
            .map(|r| (r, tokens.surface(r).chars().collect()))
            .collect();
        let mut span_id = vec![0u32; chars.len()];
        let mut next_id = 1;
        let mut i = 0;
        while i < chars.len() {
            let hit = surfaces
                .iter()
                .find(|(_, s)| s[0] == chars[i] && chars[i..].starts_with(s));
            let Some((role, surface)) = hit else {
                i += 1;
                continue;
            };
            let end = i + surface.len();
            span_id[i..end].fill(next_id);
            next_id += 1;
            i = end;
            if role.takes_count() && chars.get(i) == Some(&' ') {
                let digits = chars[i + 1..].iter().take_while(|c| c.is_ascii_digit()).count();
                if digits > 0 {
                    span_id[i + 1..i + 1 + digits].fill(next_id);
                    next_id += 1;
                    i += 1 + digits;
                }
            }
        }
        Self { span_id }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.span_id.get(i).is_some_and(|&id| id != 0)
    }

    /// True when a boundary at `b` would cut through a protected span.
    pub fn splits(&self, b: usize) -> bool {
        b > 0 && b < self.span_id.len() && self.span_id[b] != 0 && self.span_id[b - 1] == self.span_id[b]
    }
}

/// Text after all rewrites, with its audit trail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedDocument {
    pub text: String,
    pub rewrites: Vec<RewriteRecord>,
}

const MAX_FIXPOINT_PASSES: usize = 16;

/// Runs the configured rewrite stages in order.
#[derive(Debug, Clone)]
pub struct Normalizer {
    tokens: SpecialTokens,
    crep_cap: usize,
    wrep_cap: usize,
    stages: Vec<Stage>,
}

impl Default for Normalizer {
    fn default() -> Self {
        Self {
            tokens: SpecialTokens::default(),
            crep_cap: crate::corpus_io::DEFAULT_REWRITE_CAP,
            wrep_cap: crate::corpus_io::DEFAULT_REWRITE_CAP,
            stages: Stage::ALL.to_vec(),
        }
    }
}

impl Normalizer {
    pub fn new(config: &PipelineConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            tokens: config.special_tokens()?,
            crep_cap: config.rewrite_cap(SpecialRole::Crep),
            wrep_cap: config.rewrite_cap(SpecialRole::Wrep),
            stages: config.stage_order.clone(),
        })
    }

    pub fn special_tokens(&self) -> &SpecialTokens {
        &self.tokens
    }

    fn pass(&self, stage: Stage, chars: &[char]) -> Vec<Edit> {
        let protected = || Protected::scan(chars, &self.tokens);
        match stage {
            Stage::FixHtml => cleanup::html_pass(chars, &protected()),
            Stage::NormalizeCharOrder => char_order::char_order_pass(chars),
            Stage::RemoveEmptyBrackets => cleanup::empty_brackets_pass(chars, &protected()),
            Stage::PadSlashHash => cleanup::pad_pass(chars, &protected()),
            Stage::MarkLaugh => special::laugh_pass(chars, &self.tokens, &protected()),
            Stage::MarkNumbers => special::number_pass(chars, &self.tokens, &protected()),
            Stage::MarkCharRepetition => {
                special::char_repetition_pass(chars, &self.tokens, self.crep_cap, &protected())
            }
            Stage::MarkWordRepetition => {
                special::word_repetition_pass(chars, &self.tokens, self.wrep_cap, &protected())
            }
            Stage::CollapseWhitespace => cleanup::whitespace_pass(chars),
        }
    }

    /// Returns whether the stage changed anything.
    fn run_stage(&self, stage: Stage, buf: &mut Buffer) -> bool {
        let repeat = matches!(
            stage,
            Stage::FixHtml | Stage::NormalizeCharOrder | Stage::RemoveEmptyBrackets | Stage::MarkWordRepetition
        );
        let mut changed = false;
        for _ in 0..MAX_FIXPOINT_PASSES {
            let edits = self.pass(stage, buf.chars());
            if !buf.apply(stage, &edits) {
                break;
            }
            changed = true;
            if !repeat {
                break;
            }
        }
        changed
    }

    /// Runs the stage sequence until a whole round leaves the text alone,
    /// so a later stage cannot expose work for an earlier one (padding
    /// that turns `<a#b>` into a tag, say) and normalizing twice is a no-op.
    fn run(&self, text: &str, track: bool) -> (String, Vec<RewriteRecord>) {
        let mut buf = Buffer::new(text, track);
        for _ in 0..MAX_FIXPOINT_PASSES {
            let mut changed = false;
            for &stage in &self.stages {
                changed |= self.run_stage(stage, &mut buf);
            }
            if !changed {
                break;
            }
        }
        buf.finish()
    }

    /// Applies a single stage (used by the per-rule functions below).
    pub fn apply_stage(&self, stage: Stage, text: &str) -> String {
        let mut buf = Buffer::new(text, false);
        self.run_stage(stage, &mut buf);
        buf.text()
    }

    /// Rewrites `text` and records the audit trail.
    pub fn normalize(&self, text: &str) -> NormalizedDocument {
        let (text, rewrites) = self.run(text, true);
        NormalizedDocument { text, rewrites }
    }

    /// Rewrites `text` without keeping an audit trail.
    pub fn normalize_text(&self, text: &str) -> String {
        self.run(text, false).0
    }
}

/// Normalizes a thread's document text under `config`.
pub fn normalize_document(raw: &RawThread, config: &PipelineConfig) -> Result<NormalizedDocument> {
    let normalizer = Normalizer::new(config)?;
    Ok(normalizer.normalize(&raw.document_text(config.include_title)))
}

fn with_tokens(tokens: SpecialTokens, crep_cap: usize, wrep_cap: usize) -> Normalizer {
    Normalizer { tokens, crep_cap, wrep_cap, stages: Stage::ALL.to_vec() }
}

/// Decodes character references and turns line-break tags into newlines.
pub fn fix_html(text: &str) -> String {
    Normalizer::default().apply_stage(Stage::FixHtml, text)
}

pub fn collapse_whitespace(text: &str) -> String {
    Normalizer::default().apply_stage(Stage::CollapseWhitespace, text)
}

pub fn remove_empty_brackets(text: &str) -> String {
    Normalizer::default().apply_stage(Stage::RemoveEmptyBrackets, text)
}

pub fn pad_slash_hash(text: &str) -> String {
    Normalizer::default().apply_stage(Stage::PadSlashHash, text)
}

pub fn normalize_char_order(text: &str) -> String {
    Normalizer::default().apply_stage(Stage::NormalizeCharOrder, text)
}

pub fn mark_laugh(text: &str, tokens: &SpecialTokens) -> String {
    with_tokens(tokens.clone(), 5, 5).apply_stage(Stage::MarkLaugh, text)
}

pub fn mark_numbers(text: &str, tokens: &SpecialTokens) -> String {
    with_tokens(tokens.clone(), 5, 5).apply_stage(Stage::MarkNumbers, text)
}

pub fn mark_char_repetition(text: &str, tokens: &SpecialTokens, cap: usize) -> String {
    with_tokens(tokens.clone(), cap, 5).apply_stage(Stage::MarkCharRepetition, text)
}

pub fn mark_word_repetition(text: &str, tokens: &SpecialTokens, cap: usize) -> String {
    with_tokens(tokens.clone(), 5, cap).apply_stage(Stage::MarkWordRepetition, text)
}
