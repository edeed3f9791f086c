//! Byte n-gram naive Bayes language identification.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use thiserror::Error;

use crate::ingest::AuthorTimeline;
use crate::matcher::{tokenize, TokenKind};
use crate::normalize::nfc_lower;

pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_ALPHA: f64 = 0.5;
/// Posts at or below this posterior are left out of the Spanish rate.
pub const CONFIDENCE_THRESHOLD: f64 = 0.9;
pub const MIN_POSTS: usize = 5;

const FORMAT_HEADER: &str = "#integra-langid\tv1";
const BUNDLED_TRAINING: &str = include_str!("../data/langid/training.tsv");

#[derive(Debug, Error)]
pub enum LangIdError {
    #[error("training needs at least two languages with documents, found {0}")]
    InsufficientClasses(usize),
    #[error("smoothing alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("n-gram order must be in 1..=4, got {0}")]
    InvalidOrder(usize),
    #[error("the model has no \"es\" class")]
    NoSpanishClass,
    #[error("text is empty")]
    EmptyText,
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("model line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

/// Anything that can label a text with a language code and a confidence.
pub trait LanguageIdentifier: Send + Sync {
    fn classify(&self, text: &str) -> Result<(String, f64), LangIdError>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageModel {
    pub classes: Vec<String>,
    pub ngram_order: usize,
    pub smoothing_alpha: f64,
    pub log_priors: Vec<f64>,
    doc_counts: Vec<u64>,
    /// Raw n-gram counts per class, kept so the model serializes exactly.
    counts: BTreeMap<Vec<u8>, Vec<u64>>,
    log_likelihoods: HashMap<Vec<u8>, Vec<f64>>,
}

fn prepare(text: &str) -> Vec<u8> {
    let lowered = nfc_lower(text);
    let mut out = Vec::with_capacity(lowered.len() + 2);
    out.push(b' ');
    for word in lowered.split_whitespace() {
        out.extend_from_slice(word.as_bytes());
        out.push(b' ');
    }
    out
}

fn for_each_ngram(bytes: &[u8], order: usize, mut f: impl FnMut(&[u8])) {
    for n in 1..=order {
        for w in bytes.windows(n) {
            f(w);
        }
    }
}

/// Normalized posteriors from unnormalized log scores (log-sum-exp).
pub fn normalize_scores(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

impl LanguageModel {
    pub fn train(labeled: &[(String, String)], ngram_order: usize, alpha: f64) -> Result<Self, LangIdError> {
        if !(1..=4).contains(&ngram_order) {
            return Err(LangIdError::InvalidOrder(ngram_order));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(LangIdError::InvalidAlpha(alpha));
        }
        let mut classes: Vec<String> = labeled.iter().map(|(_, c)| c.clone()).collect();
        classes.sort();
        classes.dedup();
        if classes.len() < 2 {
            return Err(LangIdError::InsufficientClasses(classes.len()));
        }
        let index: HashMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let k = classes.len();
        let mut doc_counts = vec![0u64; k];
        let mut counts: BTreeMap<Vec<u8>, Vec<u64>> = BTreeMap::new();
        for (text, class) in labeled {
            let c = index[class.as_str()];
            doc_counts[c] += 1;
            for_each_ngram(&prepare(text), ngram_order, |g| {
                counts.entry(g.to_vec()).or_insert_with(|| vec![0; k])[c] += 1;
            });
        }
        Self::from_counts(classes, ngram_order, alpha, doc_counts, counts)
    }

    fn from_counts(
        classes: Vec<String>,
        ngram_order: usize,
        smoothing_alpha: f64,
        doc_counts: Vec<u64>,
        counts: BTreeMap<Vec<u8>, Vec<u64>>,
    ) -> Result<Self, LangIdError> {
        if !classes.iter().any(|c| c == "es") {
            return Err(LangIdError::NoSpanishClass);
        }
        let k = classes.len();
        let docs: u64 = doc_counts.iter().sum();
        let log_priors = doc_counts.iter().map(|&d| (d as f64 / docs as f64).ln()).collect();
        let vocab = counts.len() as f64;
        let mut totals = vec![0u64; k];
        for v in counts.values() {
            for (t, c) in totals.iter_mut().zip(v) {
                *t += c;
            }
        }
        let denominators: Vec<f64> = totals.iter().map(|&t| (t as f64 + smoothing_alpha * vocab).ln()).collect();
        let log_likelihoods = counts
            .iter()
            .map(|(g, v)| {
                let ll = v.iter().zip(&denominators).map(|(&c, d)| (c as f64 + smoothing_alpha).ln() - d).collect();
                (g.clone(), ll)
            })
            .collect();
        Ok(LanguageModel { classes, ngram_order, smoothing_alpha, log_priors, doc_counts, counts, log_likelihoods })
    }

    /// The shipped es/en/pt model.
    pub fn bundled() -> &'static LanguageModel {
        static MODEL: OnceLock<LanguageModel> = OnceLock::new();
        MODEL.get_or_init(|| {
            let docs = parse_training(BUNDLED_TRAINING).expect("bundled training data parses");
            LanguageModel::train(&docs, DEFAULT_ORDER, DEFAULT_ALPHA).expect("bundled training data is valid")
        })
    }

    /// Unnormalized log joint score per class. N-grams never seen in
    /// training contribute nothing.
    pub fn scores(&self, text: &str) -> Result<Vec<f64>, LangIdError> {
        if text.trim().is_empty() {
            return Err(LangIdError::EmptyText);
        }
        let mut scores = self.log_priors.clone();
        for_each_ngram(&prepare(text), self.ngram_order, |g| {
            if let Some(ll) = self.log_likelihoods.get(g) {
                for (s, l) in scores.iter_mut().zip(ll) {
                    *s += l;
                }
            }
        });
        Ok(scores)
    }

    /// Posterior probability of every class, in `classes` order.
    pub fn posteriors(&self, text: &str) -> Result<Vec<f64>, LangIdError> {
        Ok(normalize_scores(&self.scores(text)?))
    }

    pub fn classify(&self, text: &str) -> Result<(String, f64), LangIdError> {
        let post = self.posteriors(text)?;
        let (best, p) = post
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
        Ok((self.classes[best].clone(), p))
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("{FORMAT_HEADER}\norder\t{}\nalpha\t{}\n", self.ngram_order, self.smoothing_alpha);
        for (c, d) in self.classes.iter().zip(&self.doc_counts) {
            let _ = writeln!(out, "class\t{c}\t{d}");
        }
        for (g, v) in &self.counts {
            let _ = write!(out, "ngram\t{}", hex::encode(g));
            for c in v {
                let _ = write!(out, "\t{c}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, LangIdError> {
        let mut lines = text.lines().enumerate();
        let bad = |line: usize, reason: &str| LangIdError::Malformed { line: line + 1, reason: reason.to_string() };
        match lines.next() {
            Some((_, h)) if h == FORMAT_HEADER => {}
            _ => return Err(bad(0, "missing or unsupported format header")),
        }
        let mut order = None;
        let mut alpha = None;
        let mut classes = Vec::new();
        let mut doc_counts = Vec::new();
        let mut counts = BTreeMap::new();
        for (i, line) in lines {
            let cols: Vec<&str> = line.split('\t').collect();
            match cols.as_slice() {
                ["order", v] => order = Some(v.parse().map_err(|_| bad(i, "bad order"))?),
                ["alpha", v] => alpha = Some(v.parse().map_err(|_| bad(i, "bad alpha"))?),
                ["class", c, d] => {
                    classes.push(c.to_string());
                    doc_counts.push(d.parse().map_err(|_| bad(i, "bad document count"))?);
                }
                ["ngram", g, rest @ ..] => {
                    if rest.len() != classes.len() {
                        return Err(bad(i, "count columns do not match classes"));
                    }
                    let g = hex::decode(g).map_err(|_| bad(i, "bad hex n-gram"))?;
                    let v = rest.iter().map(|c| c.parse::<u64>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad(i, "bad count"))?;
                    counts.insert(g, v);
                }
                [""] => {}
                _ => return Err(bad(i, "unrecognized line")),
            }
        }
        let order = order.ok_or_else(|| bad(0, "missing order"))?;
        let alpha: f64 = alpha.ok_or_else(|| bad(0, "missing alpha"))?;
        if !(1..=4).contains(&order) {
            return Err(LangIdError::InvalidOrder(order));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(LangIdError::InvalidAlpha(alpha));
        }
        if classes.len() < 2 {
            return Err(LangIdError::InsufficientClasses(classes.len()));
        }
        Self::from_counts(classes, order, alpha, doc_counts, counts)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LangIdError> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|source| LangIdError::Io { path: path.into(), source })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LangIdError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| LangIdError::Io { path: path.into(), source })?;
        Self::from_tsv(&text)
    }
}

impl LanguageIdentifier for LanguageModel {
    fn classify(&self, text: &str) -> Result<(String, f64), LangIdError> {
        LanguageModel::classify(self, text)
    }
}

/// Parses `language TAB text` lines; "#" starts a comment line.
pub fn parse_training(text: &str) -> Result<Vec<(String, String)>, LangIdError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (lang, body) = line
            .split_once('\t')
            .ok_or_else(|| LangIdError::Malformed { line: i + 1, reason: "expected `language<TAB>text`".into() })?;
        out.push((body.to_string(), lang.trim().to_string()));
    }
    Ok(out)
}

/// Text with urls, mentions and hashtags removed, for classification.
pub fn strip_entities(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for t in tokenize(text) {
        if matches!(t.kind, TokenKind::Url | TokenKind::Mention | TokenKind::Hashtag) {
            out.push_str(&text[last..t.byte_span.0]);
            last = t.byte_span.1;
        }
    }
    out.push_str(&text[last..]);
    out
}

/// Share of an author's original posts confidently labelled Spanish among
/// all confidently labelled original posts. Absent below [`MIN_POSTS`]
/// original posts or when none is confidently labelled.
pub fn spanish_rate(identifier: &dyn LanguageIdentifier, timeline: &AuthorTimeline) -> Option<f64> {
    let originals: Vec<&str> = timeline.posts.iter().filter(|p| !p.is_retweet).map(|p| p.text.as_str()).collect();
    spanish_rate_of_texts(identifier, &originals)
}

pub fn spanish_rate_of_texts(identifier: &dyn LanguageIdentifier, texts: &[&str]) -> Option<f64> {
    if texts.len() < MIN_POSTS {
        return None;
    }
    let mut confident = 0usize;
    let mut spanish = 0usize;
    for text in texts {
        if let Ok((lang, p)) = identifier.classify(&strip_entities(text)) {
            if p > CONFIDENCE_THRESHOLD {
                confident += 1;
                spanish += usize::from(lang == "es");
            }
        }
    }
    (confident > 0).then(|| spanish as f64 / confident as f64)
}
