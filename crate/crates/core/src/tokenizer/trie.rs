use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::normalizer::{normalize_char_order, SpecialTokens};

#[derive(Debug, Clone, Default)]
struct Node {
    /// Sorted by char.
    children: Vec<(char, u32)>,
    terminal: bool,
}

/// Character-keyed prefix tree of dictionary surfaces.
#[derive(Debug, Clone)]
pub struct LexiconTrie {
    nodes: Vec<Node>,
    entries: usize,
}

impl Default for LexiconTrie {
    fn default() -> Self {
        Self { nodes: vec![Node::default()], entries: 0 }
    }
}

pub(crate) const ROOT: u32 = 0;

impl LexiconTrie {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut trie = Self::new();
        for w in words {
            trie.insert(w.as_ref());
        }
        trie
    }

    /// Inserts `word`; returns false for the empty string or a duplicate.
    pub fn insert(&mut self, word: &str) -> bool {
        if word.is_empty() {
            return false;
        }
        let mut node = ROOT;
        for c in word.chars() {
            node = match self.step(node, c) {
                Some(next) => next,
                None => {
                    let next = self.nodes.len() as u32;
                    self.nodes.push(Node::default());
                    let children = &mut self.nodes[node as usize].children;
                    let at = children.partition_point(|&(k, _)| k < c);
                    children.insert(at, (c, next));
                    next
                }
            };
        }
        let terminal = &mut self.nodes[node as usize].terminal;
        let added = !*terminal;
        *terminal = true;
        self.entries += usize::from(added);
        added
    }

    #[inline]
    pub(crate) fn step(&self, node: u32, c: char) -> Option<u32> {
        let children = &self.nodes[node as usize].children;
        children
            .binary_search_by_key(&c, |&(k, _)| k)
            .ok()
            .map(|i| children[i].1)
    }

    #[inline]
    pub(crate) fn is_terminal(&self, node: u32) -> bool {
        self.nodes[node as usize].terminal
    }

    fn walk(&self, s: &str) -> Option<u32> {
        s.chars().try_fold(ROOT, |node, c| self.step(node, c))
    }

    pub fn contains(&self, word: &str) -> bool {
        !word.is_empty() && self.walk(word).is_some_and(|n| self.is_terminal(n))
    }

    /// Whether some entry starts with `prefix`.
    pub fn has_prefix(&self, prefix: &str) -> bool {
        if prefix.is_empty() {
            return !self.is_empty();
        }
        self.walk(prefix).is_some()
    }

    /// Lengths (in chars) of every entry that is a prefix of `chars`.
    pub fn prefix_lengths(&self, chars: &[char]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut node = ROOT;
        for (i, &c) in chars.iter().enumerate() {
            match self.step(node, c) {
                Some(next) => node = next,
                None => break,
            }
            if self.is_terminal(node) {
                out.push(i + 1);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries == 0
    }

    /// All entries in lexicographic order.
    pub fn words(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.entries);
        let mut stack = vec![(ROOT, String::new())];
        while let Some((node, prefix)) = stack.pop() {
            let n = &self.nodes[node as usize];
            if n.terminal {
                out.push(prefix.clone());
            }
            for &(c, child) in n.children.iter().rev() {
                let mut next = prefix.clone();
                next.push(c);
                stack.push((child, next));
            }
        }
        out
    }
}

/// Builds a trie from lexicon files (one entry per line, `#` comments) plus
/// the special-token surfaces. Entries are stored with canonical mark order.
pub fn load_lexicon<P: AsRef<Path>>(paths: &[P], specials: &SpecialTokens) -> Result<LexiconTrie> {
    let mut words = BTreeSet::new();
    for path in paths {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| Error::Read {
                path: path.to_path_buf(),
                source,
            })?;
            let entry = line.trim();
            if entry.starts_with('#') {
                continue;
            }
            if entry.is_empty() {
                log::warn!("{}:{}: empty lexicon line skipped", path.display(), n + 1);
                continue;
            }
            if entry.chars().any(char::is_whitespace) {
                log::warn!("{}:{}: entry `{entry}` contains whitespace, skipped", path.display(), n + 1);
                continue;
            }
            words.insert(normalize_char_order(entry));
        }
    }
    let mut trie = LexiconTrie::from_words(&words);
    for special in specials.iter() {
        trie.insert(&special.surface);
    }
    Ok(trie)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_and_query() {
        let mut trie = LexiconTrie::new();
        assert!(trie.insert("ตาก"));
        assert!(trie.insert("ตา"));
        assert!(!trie.insert("ตา"));
        assert!(!trie.insert(""));
        assert_eq!(trie.len(), 2);
        assert!(trie.contains("ตา") && trie.contains("ตาก"));
        assert!(!trie.contains("ต") && !trie.contains(""));
        assert!(trie.has_prefix("ต"));
        let chars: Vec<char> = "ตากลม".chars().collect();
        assert_eq!(trie.prefix_lengths(&chars), [2, 3]);
        assert_eq!(trie.words(), ["ตา", "ตาก"]);
    }

    fn lexicon_file(dir: &tempfile::TempDir, name: &str, content: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        std::fs::write(&path, content).unwrap();
        path
    }

    #[test]
    fn union_of_files() {
        let dir = tempfile::tempdir().unwrap();
        let a = lexicon_file(&dir, "a.txt", "ตา\nกลม\n");
        let b = lexicon_file(&dir, "b.txt", "# comment\nตาก\n\nลม\nตา\n");
        let trie = load_lexicon(&[a, b], &SpecialTokens::default()).unwrap();
        assert_eq!(trie.len(), 4 + 4);
        for w in ["ตา", "กลม", "ตาก", "ลม", "[CREP]", "[WREP]", "[NUM]", "[LAUGH]"] {
            assert!(trie.contains(w), "{w}");
        }
    }

    #[test]
    fn entries_are_canonicalized() {
        let dir = tempfile::tempdir().unwrap();
        let path = lexicon_file(&dir, "a.txt", "ก\u{0E48}\u{0E34}น\n");
        let trie = load_lexicon(&[path], &SpecialTokens::default()).unwrap();
        assert!(trie.contains("ก\u{0E34}\u{0E48}น"));
        assert!(!trie.contains("ก\u{0E48}\u{0E34}น"));
    }

    #[test]
    fn no_paths_gives_specials_only() {
        let trie = load_lexicon::<&Path>(&[], &SpecialTokens::default()).unwrap();
        assert_eq!(trie.len(), 4);
    }

    #[test]
    fn missing_file_is_fatal() {
        let err = load_lexicon(&[Path::new("/nonexistent/lexicon.txt")], &SpecialTokens::default());
        assert!(matches!(err, Err(Error::Read { .. })));
    }

    proptest::proptest! {
        #[test]
        fn contains_iff_inserted(words in proptest::collection::btree_set("[a-d]{1,4}", 0..20), probe in "[a-d]{0,4}") {
            let trie = LexiconTrie::from_words(&words);
            proptest::prop_assert_eq!(trie.contains(&probe), words.contains(&probe));
            proptest::prop_assert_eq!(trie.len(), words.len());
            let has_prefix = words.iter().any(|w| w.starts_with(&probe));
            proptest::prop_assert_eq!(trie.has_prefix(&probe), has_prefix);
        }
    }
}
