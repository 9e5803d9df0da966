//! Character buffer that applies rewrite passes and, optionally, keeps
//! enough provenance to express the final text as edits of the original.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus_io::Stage;

/// Replace `chars[start..end]` of the current text with `replacement`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Edit {
    pub start: usize,
    pub end: usize,
    pub replacement: Vec<char>,
}

impl Edit {
    pub fn new(start: usize, end: usize, replacement: impl Into<Vec<char>>) -> Self {
        Self { start, end, replacement: replacement.into() }
    }
}

/// One entry of a document's rewrite audit trail. `start..end` are char
/// offsets into the original text; `rules` lists the stages that touched
/// the span, in the order they ran.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteRecord {
    pub rules: Vec<Stage>,
    pub start: usize,
    pub end: usize,
    pub replacement: String,
}

#[derive(Debug, Clone, Copy)]
enum Origin {
    Original(usize),
    Inserted(usize),
}

struct Provenance {
    original: Vec<char>,
    origin: Vec<Origin>,
    /// Pass sequence number that first removed each original char.
    removed_by: Vec<Option<usize>>,
    /// Pass sequence numbers contributing to each inserted group.
    group_seqs: Vec<BTreeSet<usize>>,
    pass_rule: Vec<Stage>,
}

pub(crate) struct Buffer {
    chars: Vec<char>,
    provenance: Option<Provenance>,
}

impl Buffer {
    pub fn new(text: &str, track: bool) -> Self {
        let chars: Vec<char> = text.chars().collect();
        let provenance = track.then(|| Provenance {
            origin: (0..chars.len()).map(Origin::Original).collect(),
            removed_by: vec![None; chars.len()],
            original: chars.clone(),
            group_seqs: Vec::new(),
            pass_rule: Vec::new(),
        });
        Self { chars, provenance }
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    /// Applies sorted, non-overlapping edits. Returns whether the text changed.
    pub fn apply(&mut self, rule: Stage, edits: &[Edit]) -> bool {
        let edits: Vec<&Edit> = edits
            .iter()
            .filter(|e| self.chars[e.start..e.end] != e.replacement[..])
            .collect();
        if edits.is_empty() {
            return false;
        }
        debug_assert!(edits.windows(2).all(|w| w[0].end <= w[1].start));

        let mut chars = Vec::with_capacity(self.chars.len());
        let mut cursor = 0;
        match self.provenance.as_mut() {
            None => {
                for e in &edits {
                    chars.extend_from_slice(&self.chars[cursor..e.start]);
                    chars.extend_from_slice(&e.replacement);
                    cursor = e.end;
                }
            }
            Some(p) => {
                let seq = p.pass_rule.len();
                p.pass_rule.push(rule);
                let mut origin = Vec::with_capacity(p.origin.len());
                for e in &edits {
                    chars.extend_from_slice(&self.chars[cursor..e.start]);
                    origin.extend_from_slice(&p.origin[cursor..e.start]);
                    let mut group = BTreeSet::from([seq]);
                    for o in &p.origin[e.start..e.end] {
                        match *o {
                            Origin::Original(i) => {
                                p.removed_by[i].get_or_insert(seq);
                            }
                            Origin::Inserted(g) => group.extend(&p.group_seqs[g]),
                        }
                    }
                    let id = p.group_seqs.len();
                    p.group_seqs.push(group);
                    chars.extend_from_slice(&e.replacement);
                    origin.extend(std::iter::repeat_n(Origin::Inserted(id), e.replacement.len()));
                    cursor = e.end;
                }
                origin.extend_from_slice(&p.origin[cursor..]);
                p.origin = origin;
            }
        }
        chars.extend_from_slice(&self.chars[cursor..]);
        self.chars = chars;
        true
    }

    pub fn text(&self) -> String {
        self.chars.iter().collect()
    }

    /// Final text plus the audit trail (empty when tracking was off).
    pub fn finish(self) -> (String, Vec<RewriteRecord>) {
        let text = self.text();
        let Some(p) = self.provenance else {
            return (text, Vec::new());
        };
        let mut records = Vec::new();
        let mut next_original = 0;
        let mut pending = String::new();
        let mut pending_seqs = BTreeSet::new();
        let mut flush = |start: usize, end: usize, pending: &mut String, seqs: &mut BTreeSet<usize>| {
            if start == end && pending.is_empty() {
                return;
            }
            seqs.extend(
                p.removed_by[start..end]
                    .iter()
                    .map(|s| s.expect("missing original char was removed by a pass")),
            );
            let unchanged = p.original[start..end].iter().copied().eq(pending.chars());
            if !unchanged {
                let mut rules: Vec<Stage> = Vec::new();
                for &s in seqs.iter() {
                    if !rules.contains(&p.pass_rule[s]) {
                        rules.push(p.pass_rule[s]);
                    }
                }
                records.push(RewriteRecord { rules, start, end, replacement: std::mem::take(pending) });
            }
            pending.clear();
            seqs.clear();
        };
        for (c, o) in self.chars.iter().zip(&p.origin) {
            match *o {
                Origin::Original(i) => {
                    flush(next_original, i, &mut pending, &mut pending_seqs);
                    next_original = i + 1;
                }
                Origin::Inserted(g) => {
                    pending.push(*c);
                    pending_seqs.extend(&p.group_seqs[g]);
                }
            }
        }
        flush(next_original, p.original.len(), &mut pending, &mut pending_seqs);
        (text, records)
    }
}

/// Replays an audit trail over the text it was recorded against.
pub fn apply_records(original: &str, records: &[RewriteRecord]) -> Option<String> {
    let chars: Vec<char> = original.chars().collect();
    let mut out = String::with_capacity(original.len());
    let mut cursor = 0;
    for r in records {
        if r.start < cursor || r.end < r.start || r.end > chars.len() {
            return None;
        }
        out.extend(&chars[cursor..r.start]);
        out.push_str(&r.replacement);
        cursor = r.end;
    }
    out.extend(&chars[cursor..]);
    Some(out)
}
