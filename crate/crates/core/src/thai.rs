//! Character classes of the Thai block used across the crate.

/// Range of the Thai Unicode block.
pub const THAI_BLOCK: std::ops::RangeInclusive<char> = '\u{0E00}'..='\u{0E7F}';

pub const SARA_AA: char = '\u{0E32}';
pub const SARA_AM: char = '\u{0E33}';
pub const NIKHAHIT: char = '\u{0E4D}';

pub fn is_thai(c: char) -> bool {
    THAI_BLOCK.contains(&c)
}

pub fn is_consonant(c: char) -> bool {
    ('\u{0E01}'..='\u{0E2E}').contains(&c)
}

pub fn is_leading_vowel(c: char) -> bool {
    ('\u{0E40}'..='\u{0E44}').contains(&c)
}

pub fn is_above_vowel(c: char) -> bool {
    matches!(c, '\u{0E31}' | '\u{0E34}'..='\u{0E37}' | '\u{0E47}')
}

pub fn is_below_vowel(c: char) -> bool {
    ('\u{0E38}'..='\u{0E3A}').contains(&c)
}

pub fn is_tone_mark(c: char) -> bool {
    ('\u{0E48}'..='\u{0E4B}').contains(&c)
}

/// Thanthakhat, nikhahit and yamakkan.
pub fn is_final_sign(c: char) -> bool {
    ('\u{0E4C}'..='\u{0E4E}').contains(&c)
}

pub fn is_thai_digit(c: char) -> bool {
    ('\u{0E50}'..='\u{0E59}').contains(&c)
}

/// Non-spacing marks that stack on a base glyph.
pub fn is_combining(c: char) -> bool {
    is_below_vowel(c) || is_above_vowel(c) || is_tone_mark(c) || is_final_sign(c)
}

/// Latin letters from Basic Latin through Latin Extended-B.
pub fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic()
        || (('\u{00C0}'..='\u{024F}').contains(&c) && c != '\u{00D7}' && c != '\u{00F7}')
}
