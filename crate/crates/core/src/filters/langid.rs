//! Character n-gram (orders 1-3) language identification.
//!
//! Each whitespace-delimited word is padded with a space on both sides and
//! cut into n-grams; pure-space n-grams are skipped. A profile stores
//! add-one smoothed log probabilities per order. Unseen n-grams get a
//! floor shared by every profile trained together, set below the smallest
//! seen probability of any of them. A document scores by its mean
//! per-n-gram log-likelihood.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const MAX_ORDER: usize = 3;

/// Packs up to three chars into one key; `c + 1` keeps orders distinct.
fn pack(chars: &[char]) -> u64 {
    chars.iter().fold(0u64, |k, &c| (k << 21) | (c as u64 + 1))
}

fn unpack(mut key: u64) -> Vec<char> {
    let mut out = Vec::new();
    while key != 0 {
        out.push(char::from_u32((key & 0x1F_FFFF) as u32 - 1).expect("packed key holds chars"));
        key >>= 21;
    }
    out.reverse();
    out
}

/// Calls `f(order, key)` for every n-gram of `text`.
fn for_each_ngram(text: &str, mut f: impl FnMut(usize, u64)) {
    let mut padded: Vec<char> = Vec::with_capacity(64);
    for word in text.split_whitespace() {
        padded.clear();
        padded.push(' ');
        padded.extend(word.chars().flat_map(char::to_lowercase));
        padded.push(' ');
        for n in 1..=MAX_ORDER {
            for gram in padded.windows(n) {
                if gram.iter().all(|&c| c == ' ') {
                    continue;
                }
                f(n, pack(gram));
            }
        }
    }
}

/// Raw n-gram counts of one language's training text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NgramCounts {
    counts: [HashMap<u64, u64>; MAX_ORDER],
    totals: [u64; MAX_ORDER],
}

impl NgramCounts {
    pub fn add_text(&mut self, text: &str) {
        for_each_ngram(text, |n, key| {
            *self.counts[n - 1].entry(key).or_default() += 1;
            self.totals[n - 1] += 1;
        });
    }

    pub fn count(&self, ngram: &str) -> u64 {
        let chars: Vec<char> = ngram.chars().collect();
        match chars.len() {
            1..=MAX_ORDER => self.counts[chars.len() - 1].get(&pack(&chars)).copied().unwrap_or(0),
            _ => 0,
        }
    }

    /// Unsmoothed relative frequency within the n-gram's order.
    pub fn relative_frequency(&self, ngram: &str) -> f64 {
        let order = ngram.chars().count();
        if !(1..=MAX_ORDER).contains(&order) || self.totals[order - 1] == 0 {
            return 0.0;
        }
        self.count(ngram) as f64 / self.totals[order - 1] as f64
    }

    /// `N + V + 1` for one order: the add-one denominator.
    fn denominator(&self, order: usize) -> u64 {
        self.totals[order] + self.counts[order].len() as u64 + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageProfile {
    pub language: String,
    pub ngram_log_probs: HashMap<u64, f64>,
    /// Probability assigned to n-grams absent from the profile.
    pub smoothing_mass: f64,
}

impl LanguageProfile {
    fn log_prob(&self, key: u64) -> f64 {
        self.ngram_log_probs
            .get(&key)
            .copied()
            .unwrap_or_else(|| self.smoothing_mass.ln())
    }

    pub fn log_prob_of(&self, ngram: &str) -> f64 {
        let chars: Vec<char> = ngram.chars().collect();
        self.log_prob(pack(&chars))
    }

    /// Mean log-likelihood per n-gram, `None` when the text has no n-grams.
    pub fn score(&self, text: &str) -> Option<f64> {
        let mut sum = 0.0;
        let mut n = 0usize;
        for_each_ngram(text, |_, key| {
            sum += self.log_prob(key);
            n += 1;
        });
        (n > 0).then(|| sum / n as f64)
    }

    pub fn len(&self) -> usize {
        self.ngram_log_probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ngram_log_probs.is_empty()
    }
}

/// Trains one profile per language, sorted by language code.
pub fn train_profiles<'a, I>(labeled_docs: I) -> Result<Vec<LanguageProfile>>
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let mut by_language: BTreeMap<&str, NgramCounts> = BTreeMap::new();
    for (text, language) in labeled_docs {
        by_language.entry(language).or_default().add_text(text);
    }
    if by_language.is_empty() {
        return Err(Error::Language("no training documents".into()));
    }
    let max_denominator = by_language
        .values()
        .flat_map(|c| (0..MAX_ORDER).map(|o| c.denominator(o)))
        .max()
        .expect("at least one language");
    let smoothing_mass = 1.0 / max_denominator as f64;
    Ok(by_language
        .into_iter()
        .map(|(language, counts)| {
            let mut ngram_log_probs = HashMap::new();
            for order in 0..MAX_ORDER {
                let denom = counts.denominator(order) as f64;
                for (&key, &c) in &counts.counts[order] {
                    ngram_log_probs.insert(key, ((c + 1) as f64 / denom).ln());
                }
            }
            LanguageProfile { language: language.to_string(), ngram_log_probs, smoothing_mass }
        })
        .collect())
}

/// Returns the best-scoring language and its mean log-likelihood. Ties go
/// to the smaller language code.
pub fn detect_language(text: &str, profiles: &[LanguageProfile]) -> Result<(String, f64)> {
    if profiles.is_empty() {
        return Err(Error::Language("no language profiles".into()));
    }
    if text.trim().is_empty() {
        return Err(Error::Language("empty text".into()));
    }
    let mut ordered: Vec<&LanguageProfile> = profiles.iter().collect();
    ordered.sort_by(|a, b| a.language.cmp(&b.language));
    let mut best: Option<(&str, f64)> = None;
    for profile in ordered {
        let score = profile.score(text).expect("non-blank text has n-grams");
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((&profile.language, score));
        }
    }
    let (language, score) = best.expect("profiles non-empty");
    Ok((language.to_string(), score))
}

/// Writes a profile: `#language` and `#smoothing_mass` header lines, then
/// `<hex code points>\t<log prob>` sorted by n-gram.
pub fn write_profile(profile: &LanguageProfile, path: &Path) -> Result<()> {
    let mut lines: Vec<(String, f64)> = profile
        .ngram_log_probs
        .iter()
        .map(|(&key, &lp)| {
            let hex = unpack(key)
                .iter()
                .map(|&c| format!("{:04x}", c as u32))
                .collect::<Vec<_>>()
                .join(" ");
            (hex, lp)
        })
        .collect();
    lines.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = String::new();
    writeln!(out, "#language\t{}", profile.language).unwrap();
    writeln!(out, "#smoothing_mass\t{}", profile.smoothing_mass).unwrap();
    for (hex, lp) in lines {
        writeln!(out, "{hex}\t{lp}").unwrap();
    }
    let file = std::fs::File::create(path).map_err(|source| Error::Write {
        path: path.to_path_buf(),
        docs_written: 0,
        source,
    })?;
    let mut w = BufWriter::new(file);
    w.write_all(out.as_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn read_profile(path: &Path) -> Result<LanguageProfile> {
    let file = std::fs::File::open(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
    let mut language = None;
    let mut smoothing_mass = None;
    let mut ngram_log_probs = HashMap::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let Some((key, value)) = line.split_once('\t') else {
            if line.trim().is_empty() {
                continue;
            }
            return Err(parse_err(n + 1, "expected a tab-separated pair".into()));
        };
        match key {
            "#language" => language = Some(value.to_string()),
            "#smoothing_mass" => {
                let mass: f64 = value.parse().map_err(|_| parse_err(n + 1, format!("bad mass `{value}`")))?;
                if !(mass > 0.0 && mass < 1.0) {
                    return Err(parse_err(n + 1, "smoothing mass must be in (0, 1)".into()));
                }
                smoothing_mass = Some(mass);
            }
            _ => {
                let chars: Option<Vec<char>> = key
                    .split(' ')
                    .map(|h| u32::from_str_radix(h, 16).ok().and_then(char::from_u32))
                    .collect();
                let chars = chars
                    .filter(|c| (1..=MAX_ORDER).contains(&c.len()))
                    .ok_or_else(|| parse_err(n + 1, format!("bad n-gram `{key}`")))?;
                let lp: f64 = value.parse().map_err(|_| parse_err(n + 1, format!("bad log prob `{value}`")))?;
                if lp.is_nan() || lp >= 0.0 {
                    return Err(parse_err(n + 1, "log probability must be negative".into()));
                }
                ngram_log_probs.insert(pack(&chars), lp);
            }
        }
    }
    Ok(LanguageProfile {
        language: language.ok_or_else(|| parse_err(0, "missing #language header".into()))?,
        ngram_log_probs,
        smoothing_mass: smoothing_mass.ok_or_else(|| parse_err(0, "missing #smoothing_mass header".into()))?,
    })
}

const BUNDLED_TH: &str = include_str!("../../data/lang/th.txt");
const BUNDLED_EN: &str = include_str!("../../data/lang/en.txt");

/// Thai and English profiles trained from the bundled samples.
pub fn bundled_profiles() -> &'static [LanguageProfile] {
    static PROFILES: OnceLock<Vec<LanguageProfile>> = OnceLock::new();
    PROFILES.get_or_init(|| {
        train_profiles([(BUNDLED_TH, "th"), (BUNDLED_EN, "en")]).expect("bundled samples are non-empty")
    })
}
