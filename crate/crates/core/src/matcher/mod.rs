//! Tokenization and integrated/light-verb phrase matching.

mod scan;
mod tokenize;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Post;
use crate::lexicon::WordClass;
use crate::morphology::{ExpandedLexicon, REFLEXIVE_CLITICS};
use crate::normalize::fold_diacritics;

pub use scan::{scan_corpus, scan_jsonl, CorpusSummary, ScanStats, SummaryError, VariantCounts};
pub use tokenize::{phrase_tokens, tokenize, Token, TokenKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchError {
    #[error("post {0} is a retweet")]
    RetweetRejected(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Integrated,
    Light,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub post_id: String,
    pub author_id: String,
    pub base: String,
    pub word_class: WordClass,
    pub variant: Variant,
    /// Character offsets of the whole phrase, end exclusive.
    pub char_span: (usize, usize),
    pub matched_surface: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchOptions {
    /// Compare with diacritics stripped on both sides.
    pub fold_diacritics: bool,
    /// Free word tokens allowed right after a light-verb head.
    pub window: usize,
}

/// A raw phrase hit in token coordinates, end exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenMatch {
    pub start: usize,
    pub end: usize,
    pub entry: usize,
    pub variant: Variant,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryKey {
    pub base: String,
    pub word_class: WordClass,
}

#[derive(Debug, Default, Clone)]
struct Node {
    children: HashMap<String, u32>,
    terminals: Vec<(u32, Variant)>,
    /// Reached right after a light-verb head; free words may follow.
    after_head: bool,
}

/// The expanded lexicon compiled into a token trie.
#[derive(Debug, Clone)]
pub struct Matcher {
    nodes: Vec<Node>,
    entries: Vec<EntryKey>,
    options: MatchOptions,
}

impl Matcher {
    pub fn new(lexicon: &ExpandedLexicon) -> Self {
        Self::with_options(lexicon, MatchOptions::default())
    }

    pub fn with_options(lexicon: &ExpandedLexicon, options: MatchOptions) -> Self {
        let mut m = Matcher { nodes: vec![Node::default()], entries: Vec::new(), options };
        for (idx, e) in lexicon.iter().enumerate() {
            m.entries.push(EntryKey { base: e.entry.base.clone(), word_class: e.entry.word_class });
            let idx = idx as u32;
            let s = &e.surfaces;
            for form in &s.integrated {
                m.insert(std::slice::from_ref(form), None, idx, Variant::Integrated);
                if s.integrated_reflexive {
                    for c in REFLEXIVE_CLITICS {
                        m.insert(&[c.to_string(), form.clone()], None, idx, Variant::Integrated);
                    }
                }
            }
            for p in &s.light {
                let tokens = p.tokens();
                m.insert(&tokens, Some(0), idx, Variant::Light);
                if p.reflexive {
                    for c in REFLEXIVE_CLITICS {
                        let with: Vec<String> = std::iter::once(c.to_string()).chain(tokens.iter().cloned()).collect();
                        m.insert(&with, Some(1), idx, Variant::Light);
                    }
                }
            }
        }
        m
    }

    fn key(&self, s: &str) -> String {
        if self.options.fold_diacritics {
            fold_diacritics(s)
        } else {
            s.to_string()
        }
    }

    fn insert(&mut self, tokens: &[String], head: Option<usize>, entry: u32, variant: Variant) {
        let mut node = 0usize;
        for (i, t) in tokens.iter().enumerate() {
            let key = self.key(t);
            node = match self.nodes[node].children.get(&key) {
                Some(&n) => n as usize,
                None => {
                    self.nodes.push(Node::default());
                    let n = self.nodes.len() - 1;
                    self.nodes[node].children.insert(key, n as u32);
                    n
                }
            };
            if head == Some(i) {
                self.nodes[node].after_head = true;
            }
        }
        let terminals = &mut self.nodes[node].terminals;
        if !terminals.contains(&(entry, variant)) {
            terminals.push((entry, variant));
        }
    }

    pub fn options(&self) -> MatchOptions {
        self.options
    }

    pub fn entries(&self) -> &[EntryKey] {
        &self.entries
    }

    fn child(&self, node: usize, token: &Token) -> Option<usize> {
        if token.kind != TokenKind::Word {
            return None;
        }
        let n = &self.nodes[node];
        if self.options.fold_diacritics {
            n.children.get(&fold_diacritics(&token.surface))
        } else {
            n.children.get(&token.surface)
        }
        .map(|&c| c as usize)
    }

    /// Every phrase occurrence before overlap resolution, sorted.
    pub fn find_all(&self, tokens: &[Token]) -> Vec<TokenMatch> {
        let mut found = Vec::new();
        let mut stack = Vec::new();
        for start in 0..tokens.len() {
            stack.push((0usize, start, false));
            while let Some((node, pos, gapped)) = stack.pop() {
                let n = &self.nodes[node];
                if pos > start {
                    for &(entry, variant) in &n.terminals {
                        found.push(TokenMatch { start, end: pos, entry: entry as usize, variant });
                    }
                }
                if pos >= tokens.len() {
                    continue;
                }
                if let Some(c) = self.child(node, &tokens[pos]) {
                    stack.push((c, pos + 1, gapped));
                }
                if n.after_head && !gapped {
                    for skip in 1..=self.options.window {
                        let next = pos + skip;
                        if next >= tokens.len() || tokens[next - 1].kind != TokenKind::Word {
                            break;
                        }
                        if let Some(c) = self.child(node, &tokens[next]) {
                            stack.push((c, next + 1, true));
                        }
                    }
                }
            }
        }
        found.sort();
        found.dedup();
        found
    }

    /// Matches after overlap resolution, ordered by position.
    pub fn find(&self, tokens: &[Token]) -> Vec<TokenMatch> {
        resolve_overlaps(self.find_all(tokens))
    }

    /// Matches `text` regardless of retweet status.
    pub fn match_text(&self, post_id: &str, author_id: &str, text: &str) -> Vec<MatchRecord> {
        let tokens = tokenize(text);
        self.find(&tokens)
            .into_iter()
            .map(|m| {
                let key = &self.entries[m.entry];
                let surface: Vec<&str> = tokens[m.start..m.end].iter().map(|t| t.surface.as_str()).collect();
                MatchRecord {
                    post_id: post_id.to_string(),
                    author_id: author_id.to_string(),
                    base: key.base.clone(),
                    word_class: key.word_class,
                    variant: m.variant,
                    char_span: (tokens[m.start].char_span.0, tokens[m.end - 1].char_span.1),
                    matched_surface: surface.join(" "),
                }
            })
            .collect()
    }

    pub fn match_post(&self, post: &Post) -> Result<Vec<MatchRecord>, MatchError> {
        if post.is_retweet {
            return Err(MatchError::RetweetRejected(post.id.clone()));
        }
        Ok(self.match_text(&post.id, &post.author_id, &post.text))
    }
}

/// Longest match wins, then leftmost. Matches over the identical range from
/// different entries are all kept.
pub fn resolve_overlaps(mut candidates: Vec<TokenMatch>) -> Vec<TokenMatch> {
    candidates.sort_by_key(|m| (std::cmp::Reverse(m.end - m.start), m.start, m.entry, m.variant));
    let mut kept: Vec<TokenMatch> = Vec::new();
    for c in candidates {
        let blocked = kept
            .iter()
            .any(|k| k.start < c.end && c.start < k.end && (k.start, k.end) != (c.start, c.end));
        if !blocked {
            kept.push(c);
        }
    }
    kept.sort();
    kept
}

pub fn match_post(post: &Post, matcher: &Matcher) -> Result<Vec<MatchRecord>, MatchError> {
    matcher.match_post(post)
}
