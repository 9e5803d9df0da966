use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::error::{Error, Result};
use crate::normalizer::normalize_char_order;
use crate::tokenizer::TokenStream;

/// Whole-token replacements for common misspellings. Chains are rejected
/// at construction, so one lookup always reaches the standard form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MisspellingMap {
    entries: HashMap<String, String>,
}

impl MisspellingMap {
    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut entries = HashMap::new();
        for (wrong, right) in pairs {
            let wrong = normalize_char_order(wrong.as_ref());
            let right = normalize_char_order(right.as_ref());
            for side in [&wrong, &right] {
                if side.is_empty() || side.chars().any(char::is_whitespace) {
                    return Err(Error::MisspellingMap(format!("`{side}` is not a single token")));
                }
            }
            if wrong == right {
                return Err(Error::MisspellingMap(format!("`{wrong}` maps to itself")));
            }
            if entries.insert(wrong.clone(), right).is_some() {
                return Err(Error::MisspellingMap(format!("`{wrong}` listed twice")));
            }
        }
        let chained: BTreeMap<&str, &str> = entries
            .iter()
            .filter(|(_, right)| entries.contains_key(right.as_str()))
            .map(|(w, r)| (w.as_str(), r.as_str()))
            .collect();
        if let Some((wrong, right)) = chained.into_iter().next() {
            return Err(Error::MisspellingMap(format!(
                "chain `{wrong}` -> `{right}` -> `{}`; flatten the map",
                entries[right]
            )));
        }
        Ok(Self { entries })
    }

    /// Reads `wrong<TAB>right` lines; `#` starts a comment line.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (wrong, right) = line.split_once('\t').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: n + 1,
                message: "expected `wrong<TAB>right`".into(),
            })?;
            pairs.push((wrong.trim().to_string(), right.trim().to_string()));
        }
        Self::from_pairs(pairs).map_err(|e| match e {
            Error::MisspellingMap(msg) => Error::MisspellingMap(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn get(&self, surface: &str) -> Option<&str> {
        self.entries.get(surface).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Replaces every token whose whole surface is a map key.
pub fn correct_spelling(mut stream: TokenStream, map: &MisspellingMap) -> TokenStream {
    if map.is_empty() {
        return stream;
    }
    for t in &mut stream.tokens {
        if let Some(right) = map.get(&t.surface) {
            t.surface = right.to_string();
        }
    }
    stream
}
