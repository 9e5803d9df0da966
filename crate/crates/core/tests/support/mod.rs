//! Fixture generators and brute-force reference implementations shared by
//! the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use thaiprep::corpus_io::RawThread;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn lexicon_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/lexicon.txt")
}

pub fn thai_words() -> Vec<String> {
    std::fs::read_to_string(lexicon_path())
        .unwrap()
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

pub const ENGLISH_WORDS: &[&str] = &[
    "the", "a", "and", "to", "of", "in", "is", "it", "for", "on", "with", "this", "that", "was", "are", "be",
    "have", "you", "we", "they", "not", "but", "what", "all", "were", "when", "there", "can", "more", "if",
    "will", "about", "time", "people", "good", "new", "first", "last", "long", "great", "little", "own",
    "other", "old", "right", "big", "high", "small", "large", "next", "early", "young", "important", "few",
    "public", "bad", "same", "able", "food", "restaurant", "delicious", "weather", "today", "tomorrow",
    "beach", "mountain", "travel", "work", "study", "book", "read", "write", "movie", "music", "game", "car",
    "traffic", "road", "city", "market", "buy", "sell", "price", "cheap", "expensive", "money", "phone",
    "battery", "fast", "slow", "help", "answer", "question", "thanks", "please", "mother", "father",
    "friend", "cat", "dog", "cute", "sleep", "morning", "evening", "night", "fun", "tired", "easy", "hard",
    "really", "sure", "want", "need", "should", "already", "still", "because", "coffee", "tea", "milk",
    "fruit", "mango", "spicy", "sweet", "salty", "school", "university", "teacher", "student", "exam",
    "doctor", "hospital", "sick", "medicine", "exercise", "running", "health", "love", "miss", "happy",
    "angry", "afraid", "review", "product", "service", "staff", "customer", "delivery", "waiting",
];

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("non-empty")
}

/// Thai words written without spaces inside phrases, phrases separated by
/// single spaces.
pub fn thai_text(rng: &mut ChaCha8Rng, words: &[String], n_words: usize) -> String {
    let mut out = String::new();
    let mut phrase_left = rng.gen_range(2..7);
    for i in 0..n_words {
        if i > 0 && phrase_left == 0 {
            out.push(' ');
            phrase_left = rng.gen_range(2..7);
        }
        out.push_str(pick(rng, words));
        phrase_left -= 1;
    }
    out
}

pub fn english_text(rng: &mut ChaCha8Rng, n_words: usize) -> String {
    let mut words: Vec<String> = (0..n_words).map(|_| pick(rng, ENGLISH_WORDS).to_string()).collect();
    if let Some(first) = words.first_mut() {
        *first = capitalize(first);
    }
    let mut out = words.join(" ");
    out.push('.');
    out
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Thai text with the kinds of noise social-media posts carry.
pub fn noisy_thai_text(rng: &mut ChaCha8Rng, words: &[String], n_words: usize) -> String {
    const NOISE: &[&str] = &[
        "555555",
        "5555+",
        "มากกกกก",
        "ดีมาก ดีมาก ดีมาก",
        "<br>",
        "&amp;",
        "&quot;ของดี&quot;",
        "08x-xxx-1234",
        "1,250 บาท",
        "๒๕๖๒",
        "12/05/2020",
        "😂",
        "👍🏽",
        "❤️❤️",
        "( )",
        "#รีวิว",
        "iPhone",
        "OK",
        "Hello World",
        "!!!",
        "...",
        "ๆ",
        "น้ำ",
    ];
    let mut out = String::new();
    let mut remaining = n_words;
    while remaining > 0 {
        let chunk = rng.gen_range(1..=remaining.min(12));
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&thai_text(rng, words, chunk));
        remaining -= chunk;
        if rng.gen_bool(0.35) {
            if rng.gen_bool(0.5) {
                out.push(' ');
            }
            out.push_str(pick(rng, NOISE));
        }
    }
    out
}

/// A mix of forum threads: mostly noisy Thai, plus short, untitled and
/// English ones.
pub fn forum_threads(seed: u64, count: usize, body_words: std::ops::Range<usize>) -> Vec<RawThread> {
    let mut rng = rng(seed);
    let words = thai_words();
    (0..count)
        .map(|i| {
            let id = format!("thread-{i:05}");
            let title_words = rng.gen_range(1..5);
            let title = thai_text(&mut rng, &words, title_words);
            let roll: f64 = rng.gen();
            let n = rng.gen_range(body_words.clone());
            if roll < 0.08 {
                RawThread::new(id, title, thai_text(&mut rng, &words, 3))
            } else if roll < 0.12 {
                RawThread::new(id, "", noisy_thai_text(&mut rng, &words, n))
            } else if roll < 0.17 {
                let body = (0..(n / 10).max(3)).map(|_| english_text(&mut rng, 10)).collect::<Vec<_>>().join(" ");
                RawThread::new(id, english_text(&mut rng, 4), body)
            } else {
                RawThread::new(id, title, noisy_thai_text(&mut rng, &words, n))
            }
        })
        .collect()
}

pub fn write_threads(path: &std::path::Path, threads: &[RawThread]) {
    let mut out = String::new();
    for t in threads {
        out.push_str(&serde_json::to_string(t).unwrap());
        out.push('\n');
    }
    std::fs::write(path, out).unwrap();
}

/// Script class used by the segmentation oracle: Thai letters versus
/// everything else, decided by the first char of a cluster.
fn oracle_script(cluster: &str) -> u8 {
    let c = cluster.chars().next().unwrap();
    let thai = ('\u{0E00}'..='\u{0E7F}').contains(&c) && !('\u{0E50}'..='\u{0E59}').contains(&c);
    u8::from(thai)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OraclePiece {
    Word,
    Leftover(u8),
}

/// Exhaustively enumerates every segmentation of `clusters` and returns
/// the winning token surfaces. Pieces are dictionary words (whole-cluster
/// concatenations) or maximal same-script runs of leftover clusters. The
/// winner has the fewest leftover clusters, then the fewest tokens, then
/// the longer token at the first differing position.
pub fn oracle_segmentation(clusters: &[String], dict: &HashSet<String>) -> Vec<String> {
    struct Search<'a> {
        clusters: &'a [String],
        dict: &'a HashSet<String>,
        ends: Vec<usize>,
        kinds: Vec<OraclePiece>,
        best: Option<((usize, usize), Vec<usize>)>,
    }

    impl Search<'_> {
        fn char_end(&self, cluster_end: usize) -> usize {
            self.clusters[..cluster_end].iter().map(|c| c.chars().count()).sum()
        }

        fn walk(&mut self, at: usize) {
            let m = self.clusters.len();
            if at == m {
                let leftover = self
                    .kinds
                    .iter()
                    .zip(self.ends.iter())
                    .enumerate()
                    .filter(|(_, (k, _))| matches!(k, OraclePiece::Leftover(_)))
                    .map(|(i, (_, &end))| end - if i == 0 { 0 } else { self.ends[i - 1] })
                    .sum::<usize>();
                let cost = (leftover, self.kinds.len());
                let char_ends: Vec<usize> = self.ends.iter().map(|&e| self.char_end(e)).collect();
                let better = match &self.best {
                    None => true,
                    Some((best_cost, best_ends)) => {
                        cost < *best_cost || (cost == *best_cost && char_ends > *best_ends)
                    }
                };
                if better {
                    self.best = Some((cost, char_ends));
                }
                return;
            }
            let mut surface = String::new();
            for end in at + 1..=m {
                surface.push_str(&self.clusters[end - 1]);
                if self.dict.contains(&surface) {
                    self.push(end, OraclePiece::Word);
                }
            }
            let script = oracle_script(&self.clusters[at]);
            if self.kinds.last() == Some(&OraclePiece::Leftover(script)) {
                return;
            }
            for end in at + 1..=m {
                if oracle_script(&self.clusters[end - 1]) != script {
                    break;
                }
                self.push(end, OraclePiece::Leftover(script));
            }
        }

        fn push(&mut self, end: usize, kind: OraclePiece) {
            self.ends.push(end);
            self.kinds.push(kind);
            self.walk(end);
            self.ends.pop();
            self.kinds.pop();
        }
    }

    let mut search = Search { clusters, dict, ends: Vec::new(), kinds: Vec::new(), best: None };
    search.walk(0);
    let Some((_, char_ends)) = search.best else {
        return Vec::new();
    };
    let text: Vec<char> = clusters.concat().chars().collect();
    let mut out = Vec::new();
    let mut start = 0;
    for end in char_ends {
        out.push(text[start..end].iter().collect());
        start = end;
    }
    out
}

/// Position-by-position boundary counts: (tp, fp, fn).
pub fn naive_boundary_counts(predicted: &[bool], gold: &[bool]) -> (u64, u64, u64) {
    let mut counts = (0, 0, 0);
    for i in 0..gold.len() {
        if predicted[i] && gold[i] {
            counts.0 += 1;
        }
        if predicted[i] && !gold[i] {
            counts.1 += 1;
        }
        if !predicted[i] && gold[i] {
            counts.2 += 1;
        }
    }
    counts
}

/// Full-sort vocabulary: count everything, sort by (count desc, first
/// occurrence asc), keep `k`.
pub fn naive_vocab(docs: &[Vec<String>], k: usize) -> Vec<(String, u64)> {
    let flat: Vec<&String> = docs.iter().flatten().collect();
    let mut counts: HashMap<&String, u64> = HashMap::new();
    let mut first: HashMap<&String, usize> = HashMap::new();
    for (i, t) in flat.iter().enumerate() {
        *counts.entry(t).or_default() += 1;
        first.entry(t).or_insert(i);
    }
    let mut all: Vec<(&String, u64)> = counts.into_iter().collect();
    all.sort_by(|a, b| b.1.cmp(&a.1).then(first[a.0].cmp(&first[b.0])));
    all.into_iter().take(k).map(|(s, c)| (s.clone(), c)).collect()
}

/// Exact OOV fraction as (oov, total).
pub fn naive_oov(docs: &[Vec<String>], vocab: &[(String, u64)]) -> (u64, u64) {
    let mut oov = 0;
    let mut total = 0;
    for t in docs.iter().flatten() {
        total += 1;
        if !vocab.iter().any(|(s, _)| s == t) {
            oov += 1;
        }
    }
    (oov, total)
}
