//! General cleanup passes: HTML, whitespace, empty brackets, slash/hash padding.

use super::audit::Edit;
use super::Protected;
use crate::thai;

const MAX_ENTITY_LEN: usize = 32;
const MAX_TAG_LEN: usize = 128;

/// Tags rendered as line breaks.
const BREAK_TAGS: [&str; 8] = ["br", "p", "div", "li", "tr", "hr", "h1", "h2"];

/// One pass of entity decoding and tag rewriting. Unknown references and
/// anything overlapping a special-token surface pass through untouched.
pub(crate) fn html_pass(chars: &[char], protected: &Protected) -> Vec<Edit> {
    let mut edits = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let edit = match chars[i] {
            '&' => entity_at(chars, i),
            '<' => tag_at(chars, i),
            _ => None,
        }
        .filter(|e| !(e.start..e.end).any(|k| protected.contains(k)));
        match edit {
            Some(e) => {
                i = e.end;
                edits.push(e);
            }
            None => i += 1,
        }
    }
    edits
}

fn entity_at(chars: &[char], start: usize) -> Option<Edit> {
    let limit = chars.len().min(start + MAX_ENTITY_LEN);
    let end = (start + 1..limit).find(|&j| !(chars[j].is_ascii_alphanumeric() || chars[j] == '#'))?;
    if chars[end] != ';' || end == start + 1 {
        return None;
    }
    let raw: String = chars[start..=end].iter().collect();
    let decoded = html_escape::decode_html_entities(&raw);
    (decoded != raw).then(|| Edit::new(start, end + 1, decoded.chars().collect::<Vec<_>>()))
}

fn tag_at(chars: &[char], start: usize) -> Option<Edit> {
    let mut j = start + 1;
    if chars.get(j) == Some(&'/') {
        j += 1;
    }
    let name_start = j;
    if !chars.get(j)?.is_ascii_alphabetic() {
        return None;
    }
    while j < chars.len() && chars[j].is_ascii_alphanumeric() {
        j += 1;
    }
    let name: String = chars[name_start..j].iter().collect::<String>().to_ascii_lowercase();
    let limit = chars.len().min(start + MAX_TAG_LEN);
    let close = (j..limit).find(|&k| chars[k] == '>' || chars[k] == '<')?;
    if chars[close] != '>' {
        return None;
    }
    // attributes must be separated from the name
    if close > j && !(chars[j].is_whitespace() || chars[j] == '/') {
        return None;
    }
    let replacement: &[char] = if BREAK_TAGS.contains(&name.as_str()) { &['\n'] } else { &[] };
    Some(Edit::new(start, close + 1, replacement))
}

fn is_newline(c: char) -> bool {
    matches!(c, '\n' | '\r' | '\u{0B}' | '\u{0C}' | '\u{85}' | '\u{2028}' | '\u{2029}')
}

/// Whitespace runs become one space, or one newline when the run contains
/// a line break; the ends are trimmed.
pub(crate) fn whitespace_pass(chars: &[char]) -> Vec<Edit> {
    let mut edits = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let mut newline = false;
        while i < chars.len() && chars[i].is_whitespace() {
            newline |= is_newline(chars[i]);
            i += 1;
        }
        let replacement: &[char] = if start == 0 || i == chars.len() {
            &[]
        } else if newline {
            &['\n']
        } else {
            &[' ']
        };
        edits.push(Edit::new(start, i, replacement));
    }
    edits
}

fn closer(open: char) -> Option<char> {
    match open {
        '(' => Some(')'),
        '[' => Some(']'),
        '{' => Some('}'),
        _ => None,
    }
}

/// Deleting a pair must not glue a base character to a following mark:
/// that would create mark sequences the ordering pass has already handled.
fn joins_marks(chars: &[char], start: usize, end: usize) -> bool {
    match chars.get(end) {
        Some(&c) if thai::is_combining(c) || c == thai::SARA_AM => true,
        Some(&thai::SARA_AA) => start > 0 && chars[start - 1] == thai::NIKHAHIT,
        _ => false,
    }
}

/// Deletes bracket pairs that hold only whitespace. Applied to a fixpoint
/// by the caller.
pub(crate) fn empty_brackets_pass(chars: &[char], protected: &Protected) -> Vec<Edit> {
    let mut edits = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let Some(close) = closer(chars[i]).filter(|_| !protected.contains(i)) else {
            i += 1;
            continue;
        };
        let mut j = i + 1;
        while j < chars.len() && chars[j].is_whitespace() {
            j += 1;
        }
        if j < chars.len() && chars[j] == close && !protected.contains(j) && !joins_marks(chars, i, j + 1) {
            edits.push(Edit::new(i, j + 1, []));
            i = j + 1;
        } else {
            i += 1;
        }
    }
    edits
}

fn is_any_digit(c: char) -> bool {
    c.is_ascii_digit() || thai::is_thai_digit(c)
}

/// Surrounds `/` and `#` with single spaces. A `/` between two digits is a
/// date or fraction separator and is left alone.
pub(crate) fn pad_pass(chars: &[char], protected: &Protected) -> Vec<Edit> {
    let mut edits = Vec::new();
    for (i, &c) in chars.iter().enumerate() {
        if !(c == '/' || c == '#') || protected.contains(i) {
            continue;
        }
        let prev = i.checked_sub(1).map(|p| chars[p]);
        let next = chars.get(i + 1).copied();
        if c == '/' && prev.is_some_and(is_any_digit) && next.is_some_and(is_any_digit) {
            continue;
        }
        let mut replacement = Vec::with_capacity(3);
        if prev.is_some_and(|p| !p.is_whitespace()) {
            replacement.push(' ');
        }
        replacement.push(c);
        if next.is_some_and(|n| !n.is_whitespace()) {
            replacement.push(' ');
        }
        if replacement.len() > 1 {
            edits.push(Edit::new(i, i + 1, replacement));
        }
    }
    edits
}
