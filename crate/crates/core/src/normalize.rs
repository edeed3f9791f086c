//! Text normalization shared by the lexicon, the matcher and the gazetteer.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Lowercases and NFC-normalizes `s`.
pub fn nfc_lower(s: &str) -> String {
    s.to_lowercase().nfc().collect()
}

/// Strips combining diacritics ("tuiteó" -> "tuiteo"). Output is NFC.
pub fn fold_diacritics(s: &str) -> String {
    s.nfd().filter(|c| !is_combining_mark(*c)).nfc().collect()
}

/// Word characters for tokenization: letters, digits and combining marks.
pub fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_combining_mark(c)
}
