//! Post-level formality features and author-level background profiles.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{AuthorTimeline, Post};
use crate::langid::{spanish_rate, LanguageIdentifier};
use crate::lexicon::WordClass;
use crate::matcher::{tokenize, MatchRecord, Matcher, TokenKind, Variant};
use crate::normalize::{fold_diacritics, nfc_lower};

const BUNDLED_GAZETTEER: &str = include_str!("../data/gazetteer.tsv");

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("match for post {record} applied to post {post}")]
    PostMismatch { record: String, post: String },
    #[error("span {start}..{end} exceeds post {post} of {len} characters")]
    SpanMismatch { post: String, start: usize, end: usize, len: usize },
    #[error("gazetteer keyword `{keyword}` maps to both {first} and {second}")]
    AmbiguousGazetteer { keyword: String, first: Region, second: Region },
    #[error("gazetteer line {line}: {reason}")]
    MalformedGazetteer { line: usize, reason: String },
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostFeatures {
    pub has_hashtag: bool,
    pub has_mention: bool,
    /// Characters in the post outside the matched phrase.
    pub post_length: usize,
}

pub fn extract_post_features(post: &Post, record: &MatchRecord) -> Result<PostFeatures, FeatureError> {
    if record.post_id != post.id {
        return Err(FeatureError::PostMismatch { record: record.post_id.clone(), post: post.id.clone() });
    }
    let len = post.text.chars().count();
    let (start, end) = record.char_span;
    if start > end || end > len {
        return Err(FeatureError::SpanMismatch { post: post.id.clone(), start, end, len });
    }
    let tokens = tokenize(&post.text);
    Ok(PostFeatures {
        has_hashtag: tokens.iter().any(|t| t.kind == TokenKind::Hashtag),
        has_mention: tokens.iter().any(|t| t.kind == TokenKind::Mention),
        post_length: len - (end - start),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    #[serde(rename = "UNK")]
    Unknown,
    LatinAmerica,
    Europe,
    US,
    Other,
}

impl Region {
    pub const ALL: [Region; 5] = [Region::Unknown, Region::LatinAmerica, Region::Europe, Region::US, Region::Other];
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Unknown => "UNK",
            Region::LatinAmerica => "LatinAmerica",
            Region::Europe => "Europe",
            Region::US => "US",
            Region::Other => "Other",
        })
    }
}

impl FromStr for Region {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Region::ALL.into_iter().find(|r| r.to_string() == s).ok_or_else(|| format!("unknown region `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LanguageBin {
    Low,
    Medium,
    High,
}

impl fmt::Display for LanguageBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LanguageBin::Low => "low",
            LanguageBin::Medium => "medium",
            LanguageBin::High => "high",
        })
    }
}

/// High only at exactly 1, medium above one half, low otherwise. The rate is
/// rounded to six decimals first.
pub fn bin_language(spanish_rate: f64) -> LanguageBin {
    let r = (spanish_rate * 1e6).round() / 1e6;
    if r >= 1.0 {
        LanguageBin::High
    } else if r > 0.5 {
        LanguageBin::Medium
    } else {
        LanguageBin::Low
    }
}

/// Keyword to region lookup over accent- and case-folded word sequences.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    keywords: HashMap<String, Region>,
    max_words: usize,
}

fn folded_words(s: &str) -> Vec<String> {
    tokenize(&fold_diacritics(&nfc_lower(s)))
        .into_iter()
        .filter(|t| t.kind == TokenKind::Word)
        .map(|t| t.surface)
        .collect()
}

impl Gazetteer {
    pub fn parse(text: &str) -> Result<Self, FeatureError> {
        let mut g = Gazetteer::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| FeatureError::MalformedGazetteer { line: i + 1, reason };
            let (keyword, region) = line.split_once('\t').ok_or_else(|| bad("expected `keyword<TAB>region`".into()))?;
            let region: Region = region.trim().parse().map_err(bad)?;
            if region == Region::Unknown {
                return Err(bad("UNK is not a gazetteer region".into()));
            }
            let words = folded_words(keyword);
            if words.is_empty() {
                return Err(bad("empty keyword".into()));
            }
            let key = words.join(" ");
            match g.keywords.get(&key) {
                Some(&first) if first != region => {
                    return Err(FeatureError::AmbiguousGazetteer { keyword: key, first, second: region });
                }
                _ => {
                    g.max_words = g.max_words.max(words.len());
                    g.keywords.insert(key, region);
                }
            }
        }
        Ok(g)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FeatureError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| FeatureError::Io { path: path.into(), source })?;
        Self::parse(&text)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_GAZETTEER).expect("bundled gazetteer is valid")
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    /// Longest keyword (in characters) wins; ties go to the leftmost.
    pub fn infer_region(&self, location: Option<&str>) -> Region {
        let Some(location) = location else { return Region::Unknown };
        let words = folded_words(location);
        let mut best: Option<(usize, Region)> = None;
        for start in 0..words.len() {
            for n in 1..=self.max_words.min(words.len() - start) {
                let key = words[start..start + n].join(" ");
                if let Some(&region) = self.keywords.get(&key) {
                    let len = key.chars().count();
                    if best.is_none_or(|(l, _)| len > l) {
                        best = Some((len, region));
                    }
                }
            }
        }
        best.map_or(Region::Unknown, |(_, r)| r)
    }
}

pub fn infer_region(location: Option<&str>, gazetteer: &Gazetteer) -> Region {
    gazetteer.infer_region(location)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorProfile {
    pub author_id: String,
    pub posts: usize,
    /// Posts per day, with spans under a day counted as one day.
    pub activity: f64,
    pub rt_share: f64,
    pub url_share: f64,
    pub region: Region,
    pub spanish_rate: Option<f64>,
    pub language_bin: Option<LanguageBin>,
    pub native_integration_rate: Option<f64>,
}

/// Everything needed to profile an author besides the timeline itself.
pub struct ProfileContext<'a> {
    pub identifier: &'a dyn LanguageIdentifier,
    /// Compiled from the native-verb lexicon.
    pub native_matcher: &'a Matcher,
    pub gazetteer: &'a Gazetteer,
}

pub fn extract_author_profile(timeline: &AuthorTimeline, ctx: &ProfileContext<'_>) -> AuthorProfile {
    let n = timeline.posts.len();
    let share = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    let retweets = timeline.posts.iter().filter(|p| p.is_retweet).count();
    let with_url = timeline.posts.iter().filter(|p| tokenize(&p.text).iter().any(|t| t.kind == TokenKind::Url)).count();

    let (mut integrated, mut native_total) = (0usize, 0usize);
    for p in timeline.posts.iter().filter(|p| !p.is_retweet) {
        for r in ctx.native_matcher.match_text(&p.id, &p.author_id, &p.text) {
            if r.word_class == WordClass::Native {
                native_total += 1;
                integrated += usize::from(r.variant == Variant::Integrated);
            }
        }
    }

    let location = timeline.posts.iter().rev().find_map(|p| p.profile_location.as_deref());
    let spanish = spanish_rate(ctx.identifier, timeline);
    AuthorProfile {
        author_id: timeline.author_id.clone(),
        posts: n,
        activity: n as f64 / timeline.span_days.max(1.0),
        rt_share: share(retweets),
        url_share: share(with_url),
        region: ctx.gazetteer.infer_region(location),
        spanish_rate: spanish,
        language_bin: spanish.map(bin_language),
        native_integration_rate: (native_total > 0).then(|| integrated as f64 / native_total as f64),
    }
}

/// Profiles every timeline in parallel, in the map's author order.
pub fn extract_author_profiles<'t>(
    timelines: impl IntoIterator<Item = &'t AuthorTimeline>,
    ctx: &ProfileContext<'_>,
) -> Vec<AuthorProfile> {
    let timelines: Vec<&AuthorTimeline> = timelines.into_iter().collect();
    timelines.par_iter().map(|t| extract_author_profile(t, ctx)).collect()
}

/// A scalar after `ln(raw + 1)` and standardization over its sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledVariable {
    pub name: String,
    pub raw: f64,
    pub log_value: f64,
    pub z_value: f64,
}

/// Z-scores with the population standard deviation. A constant column maps
/// to all zeros.
pub fn z_normalize(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    if values.is_empty() {
        return Vec::new();
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd <= f64::EPSILON * mean.abs().max(1.0) {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - mean) / sd).collect()
}

pub fn scale_variable(name: &str, raws: &[f64]) -> Vec<ScaledVariable> {
    let logs: Vec<f64> = raws.iter().map(|r| r.ln_1p()).collect();
    let zs = z_normalize(&logs);
    raws.iter()
        .zip(logs)
        .zip(zs)
        .map(|((&raw, log_value), z_value)| ScaledVariable { name: name.to_string(), raw, log_value, z_value })
        .collect()
}
