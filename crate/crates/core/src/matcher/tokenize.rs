use serde::{Deserialize, Serialize};

use crate::normalize::{is_word_char, nfc_lower};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Hashtag,
    Mention,
    Url,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Lowercased NFC surface. Hashtags and mentions keep their sigil.
    pub surface: String,
    /// Character offsets into the original text, end exclusive.
    pub char_span: (usize, usize),
    /// Byte offsets matching `char_span`.
    pub byte_span: (usize, usize),
    pub kind: TokenKind,
}

fn starts_with_url(rest: &str) -> bool {
    let head = |n: usize| rest.get(..n).map(|h| h.to_ascii_lowercase());
    head(7).as_deref() == Some("http://") || head(8).as_deref() == Some("https://")
}

/// Splits `text` into tokens. Whitespace separates tokens and is dropped;
/// every other non-word character is its own `Other` token.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let byte_at = |i: usize| chars.get(i).map_or(text.len(), |c| c.0);
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (b, c) = chars[i];
        let start = i;
        let kind = if c.is_whitespace() {
            i += 1;
            continue;
        } else if starts_with_url(&text[b..]) {
            while i < chars.len() && !chars[i].1.is_whitespace() {
                i += 1;
            }
            TokenKind::Url
        } else if (c == '#' || c == '@') && chars.get(i + 1).is_some_and(|n| is_word_char(n.1) || n.1 == '_') {
            i += 1;
            while i < chars.len() && (is_word_char(chars[i].1) || chars[i].1 == '_') {
                i += 1;
            }
            if c == '#' {
                TokenKind::Hashtag
            } else {
                TokenKind::Mention
            }
        } else if is_word_char(c) {
            while i < chars.len() && is_word_char(chars[i].1) {
                i += 1;
            }
            TokenKind::Word
        } else {
            i += 1;
            TokenKind::Other
        };
        let byte_span = (b, byte_at(i));
        let raw = &text[byte_span.0..byte_span.1];
        let surface = if kind == TokenKind::Url { raw.to_string() } else { nfc_lower(raw) };
        tokens.push(Token { surface, char_span: (start, i), byte_span, kind });
    }
    tokens
}

/// Lowercased word surfaces of a lexicon phrase, in order.
pub fn phrase_tokens(s: &str) -> Vec<String> {
    tokenize(s).into_iter().map(|t| t.surface).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text).into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn classifies_by_rule() {
        use TokenKind::*;
        assert_eq!(kinds("RT @ana mira esto #wow"), [Word, Mention, Word, Word, Hashtag]);
        assert_eq!(kinds("ver https://t.co/x?a=1 ya"), [Word, Url, Word]);
        assert_eq!(kinds("a # b"), [Word, Other, Word]);
    }

    #[test]
    fn empty_text_has_no_tokens() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \n").is_empty());
    }

    #[test]
    fn punctuation_becomes_other() {
        let t = tokenize("Tuiteé!!");
        assert_eq!(t.len(), 3);
        assert_eq!(t[0].surface, "tuiteé");
        assert_eq!(t[0].kind, TokenKind::Word);
        assert_eq!(t[0].char_span, (0, 6));
        assert_eq!(t[0].byte_span, (0, 7));
        assert!(t[1..].iter().all(|t| t.kind == TokenKind::Other));
    }

    #[test]
    fn spans_index_characters() {
        let text = "¿Dónde está?";
        for t in tokenize(text) {
            let s: String = text.chars().skip(t.char_span.0).take(t.char_span.1 - t.char_span.0).collect();
            assert_eq!(s, &text[t.byte_span.0..t.byte_span.1]);
        }
    }

    #[test]
    fn phrase_tokens_split_multiword_nouns() {
        assert_eq!(phrase_tokens("Hang out"), ["hang", "out"]);
    }
}
