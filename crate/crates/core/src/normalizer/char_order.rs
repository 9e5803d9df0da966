//! Canonical ordering of stacked Thai marks.
//!
//! Within one syllable the canonical sequence is: base, below vowel, above
//! vowel, tone mark, final sign, then SARA AM if present. Repeated marks are
//! dropped and NIKHAHIT + SARA AA is folded into SARA AM.

use super::audit::Edit;
use crate::thai::{self, NIKHAHIT, SARA_AA, SARA_AM};

fn rank(c: char) -> u8 {
    if thai::is_below_vowel(c) {
        0
    } else if thai::is_above_vowel(c) {
        1
    } else if thai::is_tone_mark(c) {
        2
    } else {
        3
    }
}

fn mark_run(chars: &[char], from: usize) -> usize {
    let mut end = from;
    while end < chars.len() && thai::is_combining(chars[end]) {
        end += 1;
    }
    end
}

pub(crate) fn char_order_pass(chars: &[char]) -> Vec<Edit> {
    let mut edits = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let starts_group = thai::is_combining(c)
            || (c == SARA_AM && chars.get(i + 1).is_some_and(|&n| thai::is_combining(n)));
        if !starts_group {
            i += 1;
            continue;
        }
        let first_end = mark_run(chars, i);
        let mut marks: Vec<char> = chars[i..first_end].to_vec();
        let mut end = first_end;
        let has_am = match chars.get(first_end) {
            Some(&SARA_AM) => true,
            Some(&SARA_AA) => marks.contains(&NIKHAHIT),
            _ => false,
        };
        if has_am {
            let second_end = mark_run(chars, first_end + 1);
            marks.extend_from_slice(&chars[first_end + 1..second_end]);
            marks.retain(|&m| m != NIKHAHIT);
            end = second_end;
        }
        marks.sort_by_key(|&m| rank(m));
        marks.dedup();
        if has_am {
            marks.push(SARA_AM);
        }
        if marks[..] != chars[i..end] {
            edits.push(Edit::new(i, end, marks));
        }
        i = end.max(i + 1);
    }
    edits
}
