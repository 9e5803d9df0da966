//! Dictionary maximal matching over Thai Character Clusters.

mod segment;
mod tcc;
mod trie;

pub use tcc::{cluster_tcc, CharacterCluster, TccRules};
pub use trie::{load_lexicon, LexiconTrie};

use serde::{Deserialize, Serialize};

use crate::corpus_io::PipelineConfig;
use crate::error::{Error, Result};
use crate::normalizer::SpecialTokens;
use segment::{PieceKind, Script};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Special,
    Count,
    Emoji,
    English,
    Unknown,
}

/// A token and the char span of the text it was cut from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn new(surface: impl Into<String>, kind: TokenKind, start: usize, end: usize) -> Self {
        Self { surface: surface.into(), kind, start, end }
    }
}

/// Whitespace between tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// Tokens of one document plus the whitespace that separated them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    pub gaps: Vec<Gap>,
    /// Char length of the tokenized text.
    pub source_len: usize,
}

impl TokenStream {
    /// Builds a stream from tokens alone; uncovered stretches between
    /// tokens become single-space gaps.
    pub fn from_tokens(tokens: Vec<Token>) -> Self {
        let mut gaps = Vec::new();
        let mut cursor = 0;
        for t in &tokens {
            if t.start > cursor {
                gaps.push(Gap { text: " ".repeat(t.start - cursor), start: cursor, end: t.start });
            }
            cursor = cursor.max(t.end);
        }
        Self { tokens, gaps, source_len: cursor }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Token> {
        self.tokens.iter()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }

    /// Tokens joined by `|`, or by the (space-folded) gap text where the
    /// source had whitespace. Literal `|` and `\` are backslash-escaped.
    pub fn segmented(&self) -> String {
        let mut out = String::new();
        let mut gaps = self.gaps.iter().peekable();
        let mut prev_end = None;
        for t in &self.tokens {
            let mut separated = false;
            while let Some(g) = gaps.peek() {
                if g.start >= t.start {
                    break;
                }
                out.extend(g.text.chars().map(|c| if c.is_whitespace() { ' ' } else { c }));
                separated = true;
                gaps.next();
            }
            if prev_end.is_some() && !separated {
                out.push('|');
            }
            for c in t.surface.chars() {
                if c == '|' || c == '\\' {
                    out.push('\\');
                }
                out.push(c);
            }
            prev_end = Some(t.end);
        }
        for g in gaps {
            out.extend(g.text.chars().map(|c| if c.is_whitespace() { ' ' } else { c }));
        }
        out
    }
}

impl<'a> IntoIterator for &'a TokenStream {
    type Item = &'a Token;
    type IntoIter = std::slice::Iter<'a, Token>;

    fn into_iter(self) -> Self::IntoIter {
        self.tokens.iter()
    }
}

/// Reassembles the text a stream was cut from. Fails when spans overlap,
/// leave holes or run past `source_len`.
pub fn detokenize(stream: &TokenStream) -> Result<String> {
    let mut pieces: Vec<(usize, usize, &str)> = stream
        .tokens
        .iter()
        .map(|t| (t.start, t.end, t.surface.as_str()))
        .chain(stream.gaps.iter().map(|g| (g.start, g.end, g.text.as_str())))
        .collect();
    pieces.sort_by_key(|&(start, end, _)| (start, end));
    let mut out = String::new();
    let mut cursor = 0;
    for (start, end, text) in pieces {
        if start != cursor || end < start {
            return Err(Error::Spans(format!(
                "span {start}..{end} does not continue at offset {cursor}"
            )));
        }
        out.push_str(text);
        cursor = end;
    }
    if cursor != stream.source_len {
        return Err(Error::Spans(format!(
            "spans end at {cursor} but the text has {} chars",
            stream.source_len
        )));
    }
    Ok(out)
}

/// Tokenizer state shared across documents; immutable once built.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    trie: LexiconTrie,
    specials: SpecialTokens,
    rules: TccRules,
    merge_unknown: bool,
}

impl Tokenizer {
    pub fn new(trie: LexiconTrie, specials: SpecialTokens) -> Self {
        Self { trie, specials, rules: TccRules::default(), merge_unknown: true }
    }

    /// Loads lexicons and cluster rules named by `config`.
    pub fn from_config(config: &PipelineConfig) -> Result<Self> {
        let specials = config.special_tokens()?;
        let trie = load_lexicon(&config.lexicon_paths, &specials)?;
        let rules = match &config.tcc_rules_path {
            Some(path) => TccRules::from_file(path)?,
            None => TccRules::default(),
        };
        Ok(Self { trie, specials, rules, merge_unknown: config.merge_unknown })
    }

    pub fn with_rules(mut self, rules: TccRules) -> Self {
        self.rules = rules;
        self
    }

    pub fn with_merge_unknown(mut self, merge: bool) -> Self {
        self.merge_unknown = merge;
        self
    }

    pub fn trie(&self) -> &LexiconTrie {
        &self.trie
    }

    pub fn rules(&self) -> &TccRules {
        &self.rules
    }

    pub fn tokenize(&self, text: &str) -> TokenStream {
        let chars: Vec<char> = text.chars().collect();
        let mut stream = TokenStream { source_len: chars.len(), ..Default::default() };
        let mut i = 0;
        while i < chars.len() {
            let start = i;
            let ws = chars[i].is_whitespace();
            while i < chars.len() && chars[i].is_whitespace() == ws {
                i += 1;
            }
            if ws {
                stream.gaps.push(Gap { text: chars[start..i].iter().collect(), start, end: i });
            } else {
                self.tokenize_chunk(&chars[start..i], start, &mut stream.tokens);
            }
        }
        stream
    }

    fn tokenize_chunk(&self, chunk: &[char], offset: usize, out: &mut Vec<Token>) {
        let surface: String = chunk.iter().collect();
        if self.specials.role_of(&surface).is_some() {
            out.push(Token::new(surface, TokenKind::Special, offset, offset + chunk.len()));
            return;
        }
        if self.is_count(chunk, out.last()) {
            out.push(Token::new(surface, TokenKind::Count, offset, offset + chunk.len()));
            return;
        }
        let bounds = self.rules.boundaries(chunk);
        for piece in segment::segment(chunk, &bounds, &self.trie, self.merge_unknown) {
            let (from, to) = (bounds[piece.from], bounds[piece.to]);
            let text: String = chunk[from..to].iter().collect();
            let kind = match piece.kind {
                PieceKind::Dictionary if self.specials.role_of(&text).is_some() => TokenKind::Special,
                PieceKind::Dictionary => TokenKind::Word,
                PieceKind::Leftover(Script::Thai) => TokenKind::Unknown,
                PieceKind::Leftover(Script::Other) => {
                    if text.chars().any(crate::thai::is_latin_letter) {
                        TokenKind::English
                    } else {
                        TokenKind::Unknown
                    }
                }
            };
            out.push(Token::new(text, kind, offset + from, offset + to));
        }
    }

    fn is_count(&self, chunk: &[char], prev: Option<&Token>) -> bool {
        chunk.iter().all(char::is_ascii_digit)
            && prev.is_some_and(|t| {
                t.kind == TokenKind::Special
                    && self.specials.role_of(&t.surface).is_some_and(|r| r.takes_count())
            })
    }
}

/// Tokenizes with the bundled cluster rules and default special tokens.
pub fn tokenize(text: &str, trie: &LexiconTrie) -> TokenStream {
    Tokenizer::new(trie.clone(), SpecialTokens::default()).tokenize(text)
}
