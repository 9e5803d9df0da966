use unicode_segmentation::UnicodeSegmentation;

use crate::thai::is_latin_letter;
use crate::tokenizer::{Token, TokenKind, TokenStream};

/// Pictographic code points treated as emoji.
pub fn is_emoji(c: char) -> bool {
    matches!(c as u32,
        0x1F000..=0x1FAFF
        | 0x2600..=0x27BF
        | 0x2300..=0x23FF
        | 0x2B05..=0x2B07
        | 0x2B1B..=0x2B1C
        | 0x2B50
        | 0x2B55
        | 0x3030
        | 0x303D
        | 0x3297
        | 0x3299)
}

fn grapheme_is_emoji(g: &str) -> bool {
    g.chars().next().is_some_and(is_emoji)
}

/// Splits every token containing emoji so that each emoji grapheme
/// (modifier and ZWJ sequences included) stands alone. The text between
/// emoji stays together as one token.
pub fn ungroup_emoji(mut stream: TokenStream) -> TokenStream {
    if !stream.tokens.iter().any(|t| t.surface.chars().any(is_emoji)) {
        return stream;
    }
    let mut out = Vec::with_capacity(stream.tokens.len());
    for token in stream.tokens.drain(..) {
        if !token.surface.chars().any(is_emoji) {
            out.push(token);
            continue;
        }
        let mut pending = String::new();
        let mut pending_start = token.start;
        let mut at = token.start;
        for g in token.surface.graphemes(true) {
            let len = g.chars().count();
            if grapheme_is_emoji(g) {
                if !pending.is_empty() {
                    let kind = remainder_kind(token.kind, &pending);
                    out.push(Token::new(std::mem::take(&mut pending), kind, pending_start, at));
                }
                out.push(Token::new(g, TokenKind::Emoji, at, at + len));
                pending_start = at + len;
            } else {
                pending.push_str(g);
            }
            at += len;
        }
        if !pending.is_empty() {
            let kind = remainder_kind(token.kind, &pending);
            out.push(Token::new(pending, kind, pending_start, at));
        }
    }
    stream.tokens = out;
    stream
}

fn remainder_kind(original: TokenKind, text: &str) -> TokenKind {
    match original {
        TokenKind::Word | TokenKind::Special | TokenKind::Count => original,
        _ if text.chars().any(is_latin_letter) => TokenKind::English,
        _ => TokenKind::Unknown,
    }
}
