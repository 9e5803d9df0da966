use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tokenizer::TokenStream;

/// One bit per character: `true` where a word begins.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BoundaryLabels(Vec<bool>);

impl BoundaryLabels {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Labels of a real text always open with a boundary.
    pub fn is_well_formed(&self) -> bool {
        self.0.first().copied().unwrap_or(true)
    }
}

impl FromIterator<bool> for BoundaryLabels {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl FromStr for BoundaryLabels {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                other => Err(format!("unexpected `{other}` in bitstring")),
            })
            .collect()
    }
}

impl fmt::Display for BoundaryLabels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Labels over the stream's source text. Each whitespace character counts
/// as a one-character token and is labeled 1.
pub fn boundaries_from_tokens(stream: &TokenStream) -> Result<BoundaryLabels> {
    let mut spans: Vec<(usize, usize, bool)> = stream
        .tokens
        .iter()
        .map(|t| (t.start, t.end, false))
        .chain(stream.gaps.iter().map(|g| (g.start, g.end, true)))
        .collect();
    spans.sort_unstable();
    let mut bits = Vec::with_capacity(stream.source_len);
    for (start, end, is_gap) in spans {
        if start != bits.len() || end <= start {
            return Err(Error::Spans(format!(
                "span {start}..{end} does not continue at char {}",
                bits.len()
            )));
        }
        if is_gap {
            bits.extend(std::iter::repeat_n(true, end - start));
        } else {
            bits.push(true);
            bits.extend(std::iter::repeat_n(false, end - start - 1));
        }
    }
    if bits.len() != stream.source_len {
        return Err(Error::Spans(format!(
            "spans cover {} of {} chars",
            bits.len(),
            stream.source_len
        )));
    }
    Ok(BoundaryLabels(bits))
}

/// Reads a segmented text such as `ตา|กลม` into its plain text and labels.
/// `|` marks a boundary, whitespace characters are labeled 1, and `\`
/// escapes a literal `|` or `\`.
pub fn boundaries_from_segmented(segmented: &str) -> Result<(String, BoundaryLabels)> {
    let mut text = String::with_capacity(segmented.len());
    let mut bits = Vec::new();
    let mut boundary = true;
    let mut chars = segmented.chars();
    while let Some(c) = chars.next() {
        let c = match c {
            '|' => {
                boundary = true;
                continue;
            }
            '\\' => chars
                .next()
                .filter(|n| matches!(n, '|' | '\\'))
                .ok_or_else(|| Error::Spans("dangling or unknown escape in segmented text".into()))?,
            c => c,
        };
        if c.is_whitespace() {
            bits.push(true);
            boundary = true;
        } else {
            bits.push(boundary);
            boundary = false;
        }
        text.push(c);
    }
    Ok((text, BoundaryLabels(bits)))
}

/// Reads `<id><TAB><bitstring>` lines.
pub fn read_gold_labels(path: &Path) -> Result<Vec<(String, BoundaryLabels)>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, bits) = line
            .split_once('\t')
            .ok_or_else(|| parse_err(n + 1, "expected `id<TAB>bitstring`".into()))?;
        let labels: BoundaryLabels = bits.trim_end().parse().map_err(|e| parse_err(n + 1, e))?;
        if !labels.is_well_formed() {
            return Err(parse_err(n + 1, "labels must start with 1".into()));
        }
        if !seen.insert(id.to_string()) {
            return Err(parse_err(n + 1, format!("duplicate id `{id}`")));
        }
        out.push((id.to_string(), labels));
    }
    Ok(out)
}
