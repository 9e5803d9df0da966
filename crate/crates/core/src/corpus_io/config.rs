use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::normalizer::{SpecialRole, SpecialTokens};

/// Pre-tokenization rewrite stages, in their default order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    FixHtml,
    NormalizeCharOrder,
    RemoveEmptyBrackets,
    PadSlashHash,
    MarkLaugh,
    MarkNumbers,
    MarkCharRepetition,
    MarkWordRepetition,
    CollapseWhitespace,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::FixHtml,
        Stage::NormalizeCharOrder,
        Stage::RemoveEmptyBrackets,
        Stage::PadSlashHash,
        Stage::MarkLaugh,
        Stage::MarkNumbers,
        Stage::MarkCharRepetition,
        Stage::MarkWordRepetition,
        Stage::CollapseWhitespace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::FixHtml => "fix_html",
            Stage::NormalizeCharOrder => "normalize_char_order",
            Stage::RemoveEmptyBrackets => "remove_empty_brackets",
            Stage::PadSlashHash => "pad_slash_hash",
            Stage::MarkLaugh => "mark_laugh",
            Stage::MarkNumbers => "mark_numbers",
            Stage::MarkCharRepetition => "mark_char_repetition",
            Stage::MarkWordRepetition => "mark_word_repetition",
            Stage::CollapseWhitespace => "collapse_whitespace",
        }
    }
}

/// Everything a pipeline run depends on besides its input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub lexicon_paths: Vec<PathBuf>,
    pub misspelling_map_path: Option<PathBuf>,
    /// Language profile files; the bundled Thai/English profiles are used when empty.
    pub profile_paths: Vec<PathBuf>,
    /// Cluster rule table; the bundled table is used when unset.
    pub tcc_rules_path: Option<PathBuf>,
    pub vocab_size: usize,
    pub min_body_chars: usize,
    pub target_language: String,
    pub language_filter: bool,
    /// Prepend the title (and a newline) to the body before normalization.
    pub include_title: bool,
    /// Merge runs of clusters no dictionary word covers into one token.
    pub merge_unknown: bool,
    pub special_token_spellings: BTreeMap<SpecialRole, String>,
    pub rewrite_caps: BTreeMap<SpecialRole, usize>,
    pub stage_order: Vec<Stage>,
    pub jobs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            lexicon_paths: Vec::new(),
            misspelling_map_path: None,
            profile_paths: Vec::new(),
            tcc_rules_path: None,
            vocab_size: 80_000,
            min_body_chars: 100,
            target_language: "th".into(),
            language_filter: true,
            include_title: true,
            merge_unknown: true,
            special_token_spellings: BTreeMap::new(),
            rewrite_caps: BTreeMap::new(),
            stage_order: Stage::ALL.to_vec(),
            jobs: 1,
        }
    }
}

pub const DEFAULT_REWRITE_CAP: usize = 5;

impl PipelineConfig {
    /// Loads a TOML file; missing keys take their defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Parses and validates TOML config text.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vocab_size == 0 {
            return Err(Error::Config("vocab_size must be at least 1".into()));
        }
        if self.min_body_chars == 0 {
            return Err(Error::Config("min_body_chars must be positive".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        for (role, cap) in &self.rewrite_caps {
            if *cap < 2 {
                return Err(Error::Config(format!("rewrite cap for {role:?} must be >= 2")));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for stage in &self.stage_order {
            if !seen.insert(*stage) {
                return Err(Error::Config(format!("stage `{}` listed twice", stage.name())));
            }
        }
        if let Some(missing) = Stage::ALL.iter().find(|s| !seen.contains(s)) {
            return Err(Error::Config(format!("stage `{}` missing from stage_order", missing.name())));
        }
        self.special_tokens()?;
        Ok(())
    }

    pub fn special_tokens(&self) -> Result<SpecialTokens> {
        SpecialTokens::with_overrides(&self.special_token_spellings)
    }

    pub fn rewrite_cap(&self, role: SpecialRole) -> usize {
        self.rewrite_caps.get(&role).copied().unwrap_or(DEFAULT_REWRITE_CAP)
    }

    /// SHA-256 of the canonical JSON form. `jobs` never changes output and
    /// is left out.
    pub fn digest(&self) -> String {
        let canonical = PipelineConfig { jobs: 1, ..self.clone() };
        let json = serde_json::to_vec(&canonical).expect("config serializes");
        hex_digest(&json)
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
