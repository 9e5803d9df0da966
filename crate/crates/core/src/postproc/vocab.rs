use std::collections::HashMap;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::tokenizer::TokenStream;

/// Position of a token in the corpus: (document sequence number, index).
type Position = (u64, u32);

/// Token counts with first-occurrence positions. Counters built over
/// disjoint shards merge into the counter of the whole corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VocabCounter {
    counts: HashMap<String, (u64, Position)>,
    tokens: u64,
}

impl VocabCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Counts one document; `doc_seq` orders documents for tie-breaking.
    pub fn add<'a, I>(&mut self, doc_seq: u64, surfaces: I)
    where
        I: IntoIterator<Item = &'a str>,
    {
        for (i, s) in surfaces.into_iter().enumerate() {
            let pos = (doc_seq, i as u32);
            self.tokens += 1;
            match self.counts.get_mut(s) {
                Some(entry) => {
                    entry.0 += 1;
                    entry.1 = entry.1.min(pos);
                }
                None => {
                    self.counts.insert(s.to_string(), (1, pos));
                }
            }
        }
    }

    pub fn add_stream(&mut self, doc_seq: u64, stream: &TokenStream) {
        self.add(doc_seq, stream.surfaces());
    }

    pub fn merge(&mut self, other: VocabCounter) {
        self.tokens += other.tokens;
        for (s, (count, pos)) in other.counts {
            let entry = self.counts.entry(s).or_insert((0, pos));
            entry.0 += count;
            entry.1 = entry.1.min(pos);
        }
    }

    pub fn total_tokens(&self) -> u64 {
        self.tokens
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// The `k` most frequent surfaces, ties to the earliest first occurrence.
    pub fn table(&self, k: usize) -> Result<VocabTable> {
        if k == 0 {
            return Err(Error::Config("vocabulary size must be at least 1".into()));
        }
        let mut ranked: Vec<(&String, &(u64, Position))> = self.counts.iter().collect();
        ranked.sort_unstable_by(|a, b| b.1 .0.cmp(&a.1 .0).then(a.1 .1.cmp(&b.1 .1)));
        ranked.truncate(k);
        Ok(VocabTable::from_ranked(
            k,
            ranked.into_iter().map(|(s, (c, _))| (s.clone(), *c)).collect(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabTable {
    entries: Vec<(String, u64)>,
    index: HashMap<String, usize>,
    limit: usize,
}

impl VocabTable {
    fn from_ranked(limit: usize, entries: Vec<(String, u64)>) -> Self {
        let index = entries.iter().enumerate().map(|(i, (s, _))| (s.clone(), i)).collect();
        Self { entries, index, limit }
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.index.contains_key(surface)
    }

    pub fn rank(&self, surface: &str) -> Option<usize> {
        self.index.get(surface).copied()
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Writes rank-ordered `surface<TAB>count` lines.
    pub fn write(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| Error::Write {
            path: path.to_path_buf(),
            docs_written: 0,
            source,
        })?;
        let mut w = BufWriter::new(file);
        for (s, c) in &self.entries {
            writeln!(w, "{s}\t{c}")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a vocab file. Counts must be non-increasing; the limit becomes
    /// the number of entries.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let parse_err = |line: usize, message: &str| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: message.to_string(),
        };
        let mut entries: Vec<(String, u64)> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (s, c) = line.rsplit_once('\t').ok_or_else(|| parse_err(n + 1, "expected `surface<TAB>count`"))?;
            let c: u64 = c.parse().map_err(|_| parse_err(n + 1, "count is not an integer"))?;
            if entries.last().is_some_and(|(_, prev)| *prev < c) {
                return Err(parse_err(n + 1, "counts must be non-increasing"));
            }
            if entries.iter().any(|(e, _)| e == s) {
                return Err(parse_err(n + 1, "duplicate surface"));
            }
            entries.push((s.to_string(), c));
        }
        let limit = entries.len().max(1);
        Ok(Self::from_ranked(limit, entries))
    }
}

/// The `k` most frequent surfaces across `streams`.
pub fn build_vocab<'a, I>(streams: I, k: usize) -> Result<VocabTable>
where
    I: IntoIterator<Item = &'a TokenStream>,
{
    let mut counter = VocabCounter::new();
    for (i, s) in streams.into_iter().enumerate() {
        counter.add_stream(i as u64, s);
    }
    counter.table(k)
}

/// Out-of-vocabulary occurrences and all occurrences.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct OovCount {
    pub oov: u64,
    pub total: u64,
}

impl OovCount {
    pub fn rate(&self) -> f64 {
        self.oov as f64 / self.total as f64
    }
}

pub fn oov_count<'a, I>(streams: I, vocab: &VocabTable) -> OovCount
where
    I: IntoIterator<Item = &'a TokenStream>,
{
    let mut count = OovCount::default();
    for stream in streams {
        for s in stream.surfaces() {
            count.total += 1;
            count.oov += u64::from(!vocab.contains(s));
        }
    }
    count
}

/// Fraction of token occurrences whose surface is not in `vocab`.
pub fn oov_rate<'a, I>(streams: I, vocab: &VocabTable) -> Result<f64>
where
    I: IntoIterator<Item = &'a TokenStream>,
{
    if vocab.is_empty() {
        return Err(Error::Metrics("OOV rate needs a non-empty vocabulary".into()));
    }
    let count = oov_count(streams, vocab);
    if count.total == 0 {
        return Err(Error::Metrics("OOV rate of an empty corpus".into()));
    }
    Ok(count.rate())
}
