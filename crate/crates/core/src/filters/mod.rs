//! Thread admission: title/length filtering and language identification.

mod langid;

pub use langid::{
    bundled_profiles, detect_language, read_profile, train_profiles, write_profile, LanguageProfile,
    NgramCounts,
};

use serde::{Deserialize, Serialize};

use crate::corpus_io::{PipelineConfig, RawThread};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterReason {
    Ok,
    TooShort,
    NoTitle,
    WrongLanguage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterDecision {
    pub accepted: bool,
    pub reason: FilterReason,
    pub detail: String,
}

impl FilterDecision {
    pub fn accept() -> Self {
        Self { accepted: true, reason: FilterReason::Ok, detail: String::new() }
    }

    pub fn reject(reason: FilterReason, detail: impl Into<String>) -> Self {
        debug_assert!(reason != FilterReason::Ok);
        Self { accepted: false, reason, detail: detail.into() }
    }
}

/// Keeps threads that have a title and a body longer than `min_body_chars`
/// Unicode scalar values (whitespace included).
pub fn length_filter(thread: &RawThread, min_body_chars: usize) -> FilterDecision {
    if thread.title.trim().is_empty() {
        return FilterDecision::reject(FilterReason::NoTitle, "empty title");
    }
    let chars = thread.body.chars().count();
    if chars <= min_body_chars {
        return FilterDecision::reject(
            FilterReason::TooShort,
            format!("body has {chars} chars, needs more than {min_body_chars}"),
        );
    }
    FilterDecision::accept()
}

/// Length filter followed by language identification.
#[derive(Debug, Clone)]
pub struct ThreadFilter {
    min_body_chars: usize,
    target_language: String,
    include_title: bool,
    profiles: Option<Vec<LanguageProfile>>,
}

impl ThreadFilter {
    pub fn new(min_body_chars: usize, target_language: impl Into<String>, profiles: Option<Vec<LanguageProfile>>) -> Self {
        Self {
            min_body_chars,
            target_language: target_language.into(),
            include_title: true,
            profiles,
        }
    }

    /// Loads profiles from `config.profile_paths`, falling back to the
    /// bundled ones. Language filtering is skipped when disabled.
    pub fn from_config(config: &PipelineConfig) -> Result<Self> {
        let profiles = if !config.language_filter {
            None
        } else if config.profile_paths.is_empty() {
            Some(bundled_profiles().to_vec())
        } else {
            Some(config.profile_paths.iter().map(|p| read_profile(p)).collect::<Result<_>>()?)
        };
        let mut filter = Self::new(config.min_body_chars, config.target_language.clone(), profiles);
        filter.include_title = config.include_title;
        Ok(filter)
    }

    pub fn decide(&self, thread: &RawThread) -> FilterDecision {
        let decision = length_filter(thread, self.min_body_chars);
        if !decision.accepted {
            return decision;
        }
        let Some(profiles) = &self.profiles else {
            return decision;
        };
        match detect_language(&thread.document_text(self.include_title), profiles) {
            Ok((lang, _)) if lang == self.target_language => FilterDecision::accept(),
            Ok((lang, score)) => {
                FilterDecision::reject(FilterReason::WrongLanguage, format!("detected {lang} ({score:.3})"))
            }
            Err(e) => FilterDecision::reject(FilterReason::WrongLanguage, e.to_string()),
        }
    }
}
