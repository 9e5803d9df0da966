//! Minimum-token segmentation over cluster boundaries.
//!
//! A segmentation covers each cluster either with a dictionary entry or as
//! leftover material. Consecutive leftover clusters of the same script merge
//! into one token. Segmentations are ranked by number of leftover clusters,
//! then number of tokens, then by preferring the longer token at the first
//! position where two segmentations differ.

use super::trie::{LexiconTrie, ROOT};
use crate::thai;

/// Script class of a leftover cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Script {
    Thai,
    Other,
}

pub(crate) fn script_of(cluster: &[char]) -> Script {
    match cluster.first() {
        Some(&c) if thai::is_thai(c) && !thai::is_thai_digit(c) => Script::Thai,
        _ => Script::Other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PieceKind {
    Dictionary,
    Leftover(Script),
}

/// A token of a segmentation as a cluster range `[from, to)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Piece {
    pub from: usize,
    pub to: usize,
    pub kind: PieceKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Cost {
    pub leftover: u32,
    pub tokens: u32,
}

impl Cost {
    const INFINITE: Cost = Cost { leftover: u32::MAX, tokens: u32::MAX };

    fn plus(self, leftover: u32) -> Cost {
        Cost {
            leftover: self.leftover.saturating_add(leftover),
            tokens: self.tokens.saturating_add(1),
        }
    }
}

/// Which leftover script, if any, may not start the remainder (so leftover
/// runs stay maximal).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Follow {
    Free,
    Not(Script),
}

impl Follow {
    fn index(self) -> usize {
        match self {
            Follow::Free => 0,
            Follow::Not(Script::Thai) => 1,
            Follow::Not(Script::Other) => 2,
        }
    }

    fn allows(self, script: Script) -> bool {
        self != Follow::Not(script)
    }
}

#[derive(Debug, Clone, Copy)]
struct Choice {
    cost: Cost,
    to: usize,
    kind: PieceKind,
}

/// Segments one whitespace-free chunk. `bounds` are the chunk's cluster
/// boundaries (first 0, last `chars.len()`).
pub(crate) fn segment(chars: &[char], bounds: &[usize], trie: &LexiconTrie, merge_leftovers: bool) -> Vec<Piece> {
    let m = bounds.len().saturating_sub(1);
    if m == 0 {
        return Vec::new();
    }
    let scripts: Vec<Script> = bounds.windows(2).map(|w| script_of(&chars[w[0]..w[1]])).collect();
    // position of each char boundary in `bounds`, usize::MAX when not a cluster boundary
    let mut cluster_at = vec![usize::MAX; chars.len() + 1];
    for (i, &b) in bounds.iter().enumerate() {
        cluster_at[b] = i;
    }

    let states = if merge_leftovers { 3 } else { 1 };
    let mut best: Vec<[Option<Choice>; 3]> = vec![[None; 3]; m + 1];
    let end_choice = Choice { cost: Cost { leftover: 0, tokens: 0 }, to: m, kind: PieceKind::Dictionary };
    best[m] = [Some(end_choice); 3];
    let total = |c: &Option<Choice>| c.map_or(Cost::INFINITE, |c| c.cost);

    let mut dict_ends = Vec::new();
    for p in (0..m).rev() {
        dict_ends.clear();
        let mut node = ROOT;
        for (offset, &c) in chars[bounds[p]..].iter().enumerate() {
            match trie.step(node, c) {
                Some(next) => node = next,
                None => break,
            }
            let end = bounds[p] + offset + 1;
            if trie.is_terminal(node) && cluster_at[end] != usize::MAX {
                dict_ends.push(cluster_at[end]);
            }
        }

        for state in 0..states {
            let follow = match state {
                0 => Follow::Free,
                1 => Follow::Not(Script::Thai),
                _ => Follow::Not(Script::Other),
            };
            let mut chosen: Option<Choice> = None;
            let consider = |cand: Choice, chosen: &mut Option<Choice>| {
                let better = match chosen {
                    None => true,
                    Some(cur) => {
                        cand.cost < cur.cost
                            || (cand.cost == cur.cost && bounds[cand.to] > bounds[cur.to])
                    }
                };
                if better {
                    *chosen = Some(cand);
                }
            };
            for &q in &dict_ends {
                let rest = total(&best[q][0]);
                if rest != Cost::INFINITE {
                    let cand = Choice { cost: rest.plus(0), to: q, kind: PieceKind::Dictionary };
                    consider(cand, &mut chosen);
                }
            }
            let script = scripts[p];
            if follow.allows(script) {
                let max_run = if merge_leftovers { m - p } else { 1 };
                for len in 1..=max_run {
                    let q = p + len;
                    if scripts[q - 1] != script {
                        break;
                    }
                    // a run of `len` leftovers costs at least `len`
                    if chosen.is_some_and(|c| c.cost.leftover < len as u32) {
                        break;
                    }
                    let next_state = if merge_leftovers { Follow::Not(script).index() } else { 0 };
                    let rest = total(&best[q][next_state]);
                    if rest != Cost::INFINITE {
                        let cand = Choice {
                            cost: rest.plus(len as u32),
                            to: q,
                            kind: PieceKind::Leftover(script),
                        };
                        consider(cand, &mut chosen);
                    }
                }
            }
            best[p][follow.index()] = chosen;
        }
    }

    let mut pieces = Vec::new();
    let mut p = 0;
    let mut state = 0;
    while p < m {
        let choice = best[p][state].expect("every position has a leftover fallback");
        pieces.push(Piece { from: p, to: choice.to, kind: choice.kind });
        state = match choice.kind {
            PieceKind::Leftover(s) if merge_leftovers => Follow::Not(s).index(),
            _ => 0,
        };
        p = choice.to;
    }
    pieces
}
