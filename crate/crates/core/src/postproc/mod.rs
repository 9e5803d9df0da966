//! Post-tokenization cleanup, spelling standardization and vocabulary
//! statistics.

mod emoji;
mod spelling;
mod vocab;

pub use emoji::{is_emoji, ungroup_emoji};
pub use spelling::{correct_spelling, MisspellingMap};
pub use vocab::{build_vocab, oov_count, oov_rate, OovCount, VocabCounter, VocabTable};

use crate::thai::is_latin_letter;
use crate::tokenizer::{TokenKind, TokenStream};

/// Lowercases tokens made only of Latin letters.
pub fn lowercase_english(mut stream: TokenStream) -> TokenStream {
    for t in &mut stream.tokens {
        if matches!(t.kind, TokenKind::Special | TokenKind::Count) {
            continue;
        }
        if !t.surface.is_empty() && t.surface.chars().all(is_latin_letter) {
            t.surface = t.surface.to_lowercase();
        }
    }
    stream
}
