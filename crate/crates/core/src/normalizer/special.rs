//! Special-token rewrites: laughter, numbers, character runs and unit runs.

use super::audit::Edit;
use super::{Protected, SpecialRole, SpecialTokens};
use crate::thai;

fn padded(surface: &str) -> Vec<char> {
    let mut out = Vec::with_capacity(surface.len() + 2);
    out.push(' ');
    out.extend(surface.chars());
    out.push(' ');
    out
}

/// Runs of four or more `5`, with an optional trailing `+`.
pub(crate) fn laugh_pass(chars: &[char], tokens: &SpecialTokens, protected: &Protected) -> Vec<Edit> {
    const MIN_RUN: usize = 4;
    let replacement = padded(tokens.surface(SpecialRole::Laugh));
    let mut edits = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] != '5' || protected.contains(i) {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && chars[i] == '5' && !protected.contains(i) {
            i += 1;
        }
        if i - start >= MIN_RUN {
            if chars.get(i) == Some(&'+') && !protected.contains(i) {
                i += 1;
            }
            edits.push(Edit::new(start, i, replacement.clone()));
        }
    }
    edits
}

fn is_digit(c: char) -> bool {
    c.is_ascii_digit() || thai::is_thai_digit(c)
}

fn is_number_char(c: char) -> bool {
    is_digit(c) || c == 'x' || c == 'X'
}

fn is_separator(c: char) -> bool {
    matches!(c, '.' | ',' | ':' | '/' | '-' | ' ')
}

const CURRENCY_AFTER: [&str; 8] = ["บาท", "บ.", "฿", "$", "THB", "USD", "€", "£"];
const CURRENCY_BEFORE: [char; 5] = ['฿', '$', '€', '£', '¥'];

fn starts_with_at(chars: &[char], at: usize, word: &str) -> bool {
    let word: Vec<char> = word.chars().collect();
    chars.get(at..).is_some_and(|rest| rest.starts_with(&word))
}

fn near_currency(chars: &[char], start: usize, end: usize) -> bool {
    let after = if chars.get(end) == Some(&' ') { end + 1 } else { end };
    if CURRENCY_AFTER.iter().any(|w| starts_with_at(chars, after, w)) {
        return true;
    }
    let before = match start.checked_sub(1) {
        Some(b) if chars[b] == ' ' => b.checked_sub(1),
        other => other,
    };
    before.is_some_and(|b| CURRENCY_BEFORE.contains(&chars[b]))
}

/// A masked number (`08x-xxx-1234`, `1,xxx บาท`) must look like a phone
/// number or sit next to a currency marker.
fn acceptable(chars: &[char], start: usize, end: usize) -> bool {
    let span = &chars[start..end];
    if !span.iter().any(|&c| c == 'x' || c == 'X') {
        return true;
    }
    let digits = span.iter().filter(|&&c| is_digit(c)).count();
    (span.len() >= 6 && digits >= 3) || near_currency(chars, start, end)
}

/// Numeric strings: digit groups joined by `. , : / -` or single spaces,
/// Thai digits, masked phone numbers and prices. Digits directly after a
/// repetition marker are its count and stay as they are.
pub(crate) fn number_pass(chars: &[char], tokens: &SpecialTokens, protected: &Protected) -> Vec<Edit> {
    let replacement = padded(tokens.surface(SpecialRole::Num));
    let mut edits = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let signed = c == '+' && chars.get(i + 1).is_some_and(|&n| is_digit(n));
        if !(is_digit(c) || signed) || protected.contains(i) || (signed && protected.contains(i + 1)) {
            i += 1;
            continue;
        }
        let start = i;
        let group = |mut j: usize| {
            while j < chars.len() && is_number_char(chars[j]) && !protected.contains(j) {
                j += 1;
            }
            j
        };
        // candidate ends at each group boundary, longest last
        let mut ends = vec![group(if signed { i + 1 } else { i })];
        loop {
            let j = *ends.last().expect("non-empty");
            let Some(&sep) = chars.get(j) else { break };
            if !is_separator(sep) || protected.contains(j) {
                break;
            }
            let next = group(j + 1);
            if next == j + 1 {
                break;
            }
            if sep == ' ' && !chars[j + 1..next].iter().any(|&c| is_digit(c)) {
                break;
            }
            ends.push(next);
        }
        let end = ends
            .iter()
            .rev()
            .copied()
            .find(|&e| acceptable(chars, start, e))
            .unwrap_or_else(|| {
                // plain digit prefix of the first group
                let mut e = if signed { start + 1 } else { start };
                while e < chars.len() && is_digit(chars[e]) && !protected.contains(e) {
                    e += 1;
                }
                e
            });
        edits.push(Edit::new(start, end, replacement.clone()));
        i = end;
    }
    edits
}

/// Runs of three or more identical characters (not digits, not whitespace)
/// become `c <CREP> n` with n capped.
pub(crate) fn char_repetition_pass(
    chars: &[char],
    tokens: &SpecialTokens,
    cap: usize,
    protected: &Protected,
) -> Vec<Edit> {
    const MIN_RUN: usize = 3;
    let surface = tokens.surface(SpecialRole::Crep);
    let mut edits = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c.is_numeric() || protected.contains(i) {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && chars[i] == c && !protected.contains(i) {
            i += 1;
        }
        let run = i - start;
        if run >= MIN_RUN {
            let mut text = format!("{c} {surface} {}", run.min(cap));
            if chars.get(i).is_some_and(|n| !n.is_whitespace()) {
                text.push(' ');
            }
            edits.push(Edit::new(start, i, text.chars().collect::<Vec<_>>()));
        }
    }
    edits
}

pub(crate) const MIN_UNIT: usize = 3;
pub(crate) const MAX_UNIT: usize = 30;
const MIN_COPIES: usize = 3;

fn is_gap(c: char) -> bool {
    c.is_whitespace() && !matches!(c, '\n' | '\r' | '\u{0B}' | '\u{0C}' | '\u{85}' | '\u{2028}' | '\u{2029}')
}

/// Counts back-to-back copies of `chars[start..start+len]`, allowing
/// horizontal whitespace between copies. Returns (copies, end of last copy).
fn copies_at(chars: &[char], start: usize, len: usize, protected: &Protected) -> (usize, usize) {
    let unit = &chars[start..start + len];
    let mut copies = 1;
    let mut end = start + len;
    loop {
        let mut next = end;
        while next < chars.len() && is_gap(chars[next]) {
            next += 1;
        }
        if next + len > chars.len()
            || chars[next] != unit[0]
            || &chars[next..next + len] != unit
            || protected.splits(next)
            || protected.splits(next + len)
        {
            return (copies, end);
        }
        copies += 1;
        end = next + len;
    }
}

/// Consecutive copies (three or more) of a unit of 3 to 30 non-space
/// characters become `unit <WREP> k` with k capped. The shortest unit at
/// the leftmost start wins.
pub(crate) fn word_repetition_pass(
    chars: &[char],
    tokens: &SpecialTokens,
    cap: usize,
    protected: &Protected,
) -> Vec<Edit> {
    let surface = tokens.surface(SpecialRole::Wrep);
    let mut edits = Vec::new();
    let mut i = 0;
    while i + MIN_UNIT * MIN_COPIES <= chars.len() {
        if chars[i].is_whitespace() || protected.splits(i) {
            i += 1;
            continue;
        }
        let mut found = None;
        for len in MIN_UNIT..=MAX_UNIT {
            let unit_end = i + len;
            if unit_end > chars.len() || chars[unit_end - 1].is_whitespace() {
                break;
            }
            if protected.splits(unit_end) {
                continue;
            }
            let (copies, end) = copies_at(chars, i, len, protected);
            if copies >= MIN_COPIES {
                found = Some((len, copies, end));
                break;
            }
        }
        match found {
            Some((len, copies, end)) => {
                let mut text: Vec<char> = chars[i..i + len].to_vec();
                text.extend(format!(" {surface} {}", copies.min(cap)).chars());
                if chars.get(end).is_some_and(|n| !n.is_whitespace()) {
                    text.push(' ');
                }
                edits.push(Edit::new(i, end, text));
                i = end;
            }
            None => i += 1,
        }
    }
    edits
}
