//! Inventory of integrated / light-verb pairs.
//!
//! The on-disk format is a four-column TSV:
//!
//! ```text
//! base <TAB> word_class <TAB> integrated_lemma <TAB> light_spec
//! tweet  loanword  tweetear  poner/enviar/hacer (un) tweet
//! ```
//!
//! `light_spec` is `verbs [literal...] [det | (det)] noun`. Verbs are
//! "/"-separated and may carry a reflexive "se" ("darse"). A parenthesized
//! determiner is optional, a bare one is required. Noun alternatives are
//! "/"-separated; "x(y)" expands to "x" and "xy", and a trailing "(word)"
//! after the noun is an optional extra token. Lines starting with "#" are
//! comments.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morphology::{split_infinitive, VerbTable, LIGHT_VERBS};
use crate::normalize::nfc_lower;

pub const DETERMINERS: &[&str] = &["un", "una", "el", "la", "los", "las"];

/// Row counts of the shipped inventory.
pub const EXPECTED_LOANWORDS: usize = 120;
pub const EXPECTED_NATIVE: usize = 49;

/// Minimum English stem length accepted by candidate discovery.
pub const MIN_STEM_LEN: usize = 4;

const BUNDLED_LOANWORDS: &str = include_str!("../data/lexicon/loanwords.tsv");
const BUNDLED_NATIVE: &str = include_str!("../data/lexicon/native.tsv");
const BUNDLED_EXCLUSIONS: &str = include_str!("../data/lexicon/exclusions.txt");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("integrated lemma `{lemma}` appears twice in the {class} lexicon")]
    DuplicateLemma { lemma: String, class: WordClass },
    #[error("base `{base}` appears twice in the {class} lexicon")]
    DuplicateBase { base: String, class: WordClass },
    #[error("line {line}: row has class {found}, expected {expected}")]
    ClassMismatch { line: usize, expected: WordClass, found: WordClass },
    #[error("excluded surface `{0}` is not generated by any entry")]
    UnusedExclusion(String),
    #[error("inventory mismatch: {0}")]
    Inventory(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordClass {
    Loanword,
    Native,
}

impl fmt::Display for WordClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WordClass::Loanword => "loanword",
            WordClass::Native => "native",
        })
    }
}

impl FromStr for WordClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "loanword" => Ok(WordClass::Loanword),
            "native" => Ok(WordClass::Native),
            other => Err(format!("unknown word class `{other}`")),
        }
    }
}

/// One light-verb realization: `light_lemma [middle...] [det] noun`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LightVerbTemplate {
    pub light_lemma: String,
    pub reflexive: bool,
    /// Fixed connective tokens between verb and determiner ("como", "en", "a").
    pub middle: Vec<String>,
    pub determiner_optional: bool,
    /// Empty when the template has no determiner slot.
    pub determiner_forms: BTreeSet<String>,
    /// May span several tokens ("hang out").
    pub noun: String,
}

impl LightVerbTemplate {
    /// Every literal tail (tokens after the verb), with and without the
    /// determiner as the template allows.
    pub fn tails(&self) -> Vec<Vec<String>> {
        let noun = crate::matcher::phrase_tokens(&self.noun);
        let middle: Vec<String> = self.middle.iter().flat_map(|m| crate::matcher::phrase_tokens(m)).collect();
        let mut out = Vec::new();
        if self.determiner_forms.is_empty() || self.determiner_optional {
            out.push(middle.iter().chain(&noun).cloned().collect());
        }
        for det in &self.determiner_forms {
            out.push(middle.iter().chain(std::iter::once(det)).chain(&noun).cloned().collect());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub base: String,
    pub word_class: WordClass,
    /// Infinitive without any reflexive "se".
    pub integrated_lemma: String,
    pub reflexive: bool,
    /// The light_spec column as written.
    pub light_spec: String,
    pub light_templates: Vec<LightVerbTemplate>,
    pub excluded_surfaces: BTreeSet<String>,
}

impl LexiconEntry {
    /// The integrated infinitive as written in the TSV ("ducharse").
    pub fn written_lemma(&self) -> String {
        if self.reflexive {
            format!("{}se", self.integrated_lemma)
        } else {
            self.integrated_lemma.clone()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
}

/// Gender variants licensed by a determiner in a template.
fn determiner_variants(det: &str) -> [&'static str; 2] {
    match det {
        "un" | "una" => ["un", "una"],
        "el" | "la" => ["el", "la"],
        _ => ["los", "las"],
    }
}

fn strip_reflexive(lemma: &str) -> (&str, bool) {
    match lemma.strip_suffix("se") {
        Some(stem) if split_infinitive(stem).is_ok() => (stem, true),
        _ => (lemma, false),
    }
}

/// Expands "x(y)" into ["x", "xy"].
fn expand_inline_suffix(alt: &str) -> Result<Vec<String>, String> {
    match alt.find('(') {
        None => Ok(vec![alt.to_string()]),
        Some(open) => {
            let close = alt.rfind(')').filter(|c| *c > open && *c == alt.len() - 1);
            let close = close.ok_or_else(|| format!("unbalanced parenthesis in `{alt}`"))?;
            let head = &alt[..open];
            let suffix = &alt[open + 1..close];
            if head.is_empty() || suffix.is_empty() {
                return Err(format!("bad optional suffix in `{alt}`"));
            }
            Ok(vec![head.to_string(), format!("{head}{suffix}")])
        }
    }
}

fn parenthesized(token: &str) -> Option<&str> {
    token.strip_prefix('(').and_then(|t| t.strip_suffix(')'))
}

/// Parses a light_spec column into templates.
pub fn parse_light_spec(spec: &str) -> Result<Vec<LightVerbTemplate>, String> {
    let spec = nfc_lower(spec);
    let tokens: Vec<&str> = spec.split_whitespace().collect();
    if tokens.len() < 2 {
        return Err(format!("light spec `{spec}` needs a verb and a noun"));
    }
    let mut verbs = Vec::new();
    for v in tokens[0].split('/') {
        let (lemma, reflexive) = strip_reflexive(v);
        if !LIGHT_VERBS.contains(&lemma) {
            return Err(format!("`{lemma}` is not in the light-verb class"));
        }
        verbs.push((lemma.to_string(), reflexive));
    }

    let rest = &tokens[1..];
    let (noun_token, trailing, body) = match rest.split_last() {
        Some((last, before)) if !before.is_empty() => match parenthesized(last) {
            Some(word) if !DETERMINERS.contains(&word) => {
                let (noun, body) = before.split_last().expect("non-empty");
                (*noun, Some(word), body)
            }
            _ => (*last, None, before),
        },
        Some((last, before)) => (*last, None, before),
        None => unreachable!("checked length above"),
    };
    if parenthesized(noun_token).is_some() {
        return Err(format!("noun missing in `{spec}`"));
    }

    let mut middle = Vec::new();
    let mut determiner: Option<(bool, BTreeSet<String>)> = None;
    for tok in body {
        let (optional, word) = match parenthesized(tok) {
            Some(w) => (true, w),
            None => (false, *tok),
        };
        if DETERMINERS.contains(&word) {
            if determiner.is_some() {
                return Err(format!("two determiners in `{spec}`"));
            }
            let forms = determiner_variants(word).iter().map(|s| s.to_string()).collect();
            determiner = Some((optional, forms));
        } else if optional {
            return Err(format!("only determiners may be optional before the noun: `{tok}`"));
        } else if determiner.is_some() {
            return Err(format!("literal `{tok}` after the determiner"));
        } else {
            middle.push(word.to_string());
        }
    }
    let (determiner_optional, determiner_forms) = determiner.unwrap_or((false, BTreeSet::new()));

    let mut nouns = Vec::new();
    for alt in noun_token.split('/') {
        if alt.is_empty() {
            return Err(format!("empty noun alternative in `{spec}`"));
        }
        for n in expand_inline_suffix(alt)? {
            if let Some(extra) = trailing {
                nouns.push(n.clone());
                nouns.push(format!("{n} {extra}"));
            } else {
                nouns.push(n);
            }
        }
    }

    let mut templates = Vec::new();
    for (lemma, reflexive) in &verbs {
        for noun in &nouns {
            templates.push(LightVerbTemplate {
                light_lemma: lemma.clone(),
                reflexive: *reflexive,
                middle: middle.clone(),
                determiner_optional,
                determiner_forms: determiner_forms.clone(),
                noun: noun.clone(),
            });
        }
    }
    Ok(templates)
}

impl Lexicon {
    pub fn new(entries: Vec<LexiconEntry>) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::default();
        lex.extend(entries)?;
        Ok(lex)
    }

    /// Parses TSV text. When `word_class` is given, every row must carry it.
    pub fn parse(text: &str, word_class: Option<WordClass>) -> Result<Self, LexiconError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let bad = |reason: String| LexiconError::MalformedRow { line: line_no, reason };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(bad(format!("expected 4 columns, found {}", cols.len())));
            }
            if cols[0].is_empty() {
                return Err(bad("empty base".into()));
            }
            let class: WordClass = cols[1].parse().map_err(bad)?;
            if let Some(expected) = word_class {
                if expected != class {
                    return Err(LexiconError::ClassMismatch { line: line_no, expected, found: class });
                }
            }
            let written = nfc_lower(cols[2]);
            let (lemma, reflexive) = strip_reflexive(&written);
            split_infinitive(lemma).map_err(|e| bad(e.to_string()))?;
            let light_templates = parse_light_spec(cols[3]).map_err(bad)?;
            entries.push(LexiconEntry {
                base: cols[0].to_string(),
                word_class: class,
                integrated_lemma: lemma.to_string(),
                reflexive,
                light_spec: cols[3].split_whitespace().collect::<Vec<_>>().join(" "),
                light_templates,
                excluded_surfaces: BTreeSet::new(),
            });
        }
        Lexicon::new(entries)
    }

    pub fn load(path: impl AsRef<Path>, word_class: Option<WordClass>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| LexiconError::Io { path: path.into(), source })?;
        Self::parse(&text, word_class)
    }

    /// The shipped loanword and native inventories with shipped exclusions applied.
    pub fn bundled() -> Result<Self, LexiconError> {
        let mut lex = Lexicon::parse(BUNDLED_LOANWORDS, Some(WordClass::Loanword))?;
        lex.extend(Lexicon::parse(BUNDLED_NATIVE, Some(WordClass::Native))?.entries)?;
        lex.apply_exclusions(&parse_exclusions(BUNDLED_EXCLUSIONS), VerbTable::bundled())?;
        Ok(lex)
    }

    /// Adds entries, enforcing uniqueness of (class, lemma) and (class, base).
    pub fn extend(&mut self, entries: impl IntoIterator<Item = LexiconEntry>) -> Result<(), LexiconError> {
        let mut lemmas: HashSet<(WordClass, String)> =
            self.entries.iter().map(|e| (e.word_class, e.integrated_lemma.clone())).collect();
        let mut bases: HashSet<(WordClass, String)> =
            self.entries.iter().map(|e| (e.word_class, e.base.clone())).collect();
        for e in entries {
            if !lemmas.insert((e.word_class, e.integrated_lemma.clone())) {
                return Err(LexiconError::DuplicateLemma { lemma: e.integrated_lemma, class: e.word_class });
            }
            if !bases.insert((e.word_class, e.base.clone())) {
                return Err(LexiconError::DuplicateBase { base: e.base, class: e.word_class });
            }
            self.entries.push(e);
        }
        Ok(())
    }

    /// Attaches each excluded surface to every entry whose paradigm generates
    /// it. A surface no entry generates is an error.
    pub fn apply_exclusions(&mut self, exclusions: &BTreeSet<String>, table: &VerbTable) -> Result<(), LexiconError> {
        let mut used: HashSet<&str> = HashSet::new();
        for entry in &mut self.entries {
            let forms = table.inflect(&entry.integrated_lemma).map_err(|e| LexiconError::MalformedRow {
                line: 0,
                reason: e.to_string(),
            })?;
            for f in forms {
                if let Some(s) = exclusions.get(&f.surface) {
                    entry.excluded_surfaces.insert(s.clone());
                    used.insert(s.as_str());
                }
            }
        }
        if let Some(unused) = exclusions.iter().find(|s| !used.contains(s.as_str())) {
            return Err(LexiconError::UnusedExclusion(unused.clone()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LexiconEntry> {
        self.entries.iter()
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn count(&self, class: WordClass) -> usize {
        self.entries.iter().filter(|e| e.word_class == class).count()
    }

    /// Only the entries of one class.
    pub fn of_class(&self, class: WordClass) -> Lexicon {
        Lexicon { entries: self.entries.iter().filter(|e| e.word_class == class).cloned().collect() }
    }

    /// Checks the per-class row counts.
    pub fn check_inventory(&self, loanwords: usize, native: usize) -> Result<(), LexiconError> {
        let found = (self.count(WordClass::Loanword), self.count(WordClass::Native));
        if found == (loanwords, native) {
            Ok(())
        } else {
            Err(LexiconError::Inventory(format!(
                "expected {loanwords} loanword and {native} native pairs, found {} and {}",
                found.0, found.1
            )))
        }
    }

    /// Writes the TSV form, one row per entry, no comments.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!("{}\t{}\t{}\t{}\n", e.base, e.word_class, e.written_lemma(), e.light_spec));
        }
        out
    }
}

/// One surface per line; blank lines and "#" comments ignored.
pub fn parse_exclusions(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(nfc_lower)
        .collect()
}

pub fn load_exclusions(path: impl AsRef<Path>) -> Result<BTreeSet<String>, LexiconError> {
    let path = path.as_ref();
    fs::read_to_string(path)
        .map(|t| parse_exclusions(&t))
        .map_err(|source| LexiconError::Io { path: path.into(), source })
}

/// Loads a lexicon TSV. Thin wrapper over [`Lexicon::load`].
pub fn load_lexicon(path: impl AsRef<Path>, word_class: WordClass) -> Result<Lexicon, LexiconError> {
    Lexicon::load(path, Some(word_class))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    InSpanishDict,
    StemTooShort,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::InSpanishDict => "in_spanish_dict",
            RejectReason::StemTooShort => "stem_too_short",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub surface: String,
    pub english_stem: String,
    pub frequency: u64,
    pub rejected_reason: Option<RejectReason>,
}

impl CandidateReport {
    pub fn accepted(&self) -> bool {
        self.rejected_reason.is_none()
    }
}

/// Token frequencies for candidate discovery. Partial counters from
/// parallel workers combine with [`CandidateCounter::merge`].
#[derive(Debug, Clone, Default)]
pub struct CandidateCounter {
    counts: HashMap<String, u64>,
}

impl CandidateCounter {
    pub fn add(&mut self, token: &str) {
        if token.ends_with("ar") {
            *self.counts.entry(nfc_lower(token)).or_default() += 1;
        }
    }

    pub fn merge(&mut self, other: CandidateCounter) {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
    }

    /// Reports sorted by descending frequency, then surface.
    pub fn finish(self, english: &HashSet<String>, spanish: &HashSet<String>) -> Vec<CandidateReport> {
        let mut out: Vec<CandidateReport> = self
            .counts
            .into_iter()
            .filter_map(|(surface, frequency)| {
                let (stem, reason) = classify_candidate(&surface, english, spanish)?;
                Some(CandidateReport { surface, english_stem: stem, frequency, rejected_reason: reason })
            })
            .collect();
        out.sort_by(|a, b| b.frequency.cmp(&a.frequency).then_with(|| a.surface.cmp(&b.surface)));
        out
    }
}

/// Tries "-ar" then "-ear". Returns None when neither strip leaves an English word.
fn classify_candidate(
    token: &str,
    english: &HashSet<String>,
    spanish: &HashSet<String>,
) -> Option<(String, Option<RejectReason>)> {
    let stems: Vec<&str> = ["ar", "ear"]
        .iter()
        .filter_map(|suffix| token.strip_suffix(suffix))
        .filter(|stem| !stem.is_empty() && english.contains(*stem))
        .collect();
    let long = stems.iter().find(|s| s.chars().count() >= MIN_STEM_LEN);
    match (long, stems.first()) {
        (Some(stem), _) if spanish.contains(token) => Some((stem.to_string(), Some(RejectReason::InSpanishDict))),
        (Some(stem), _) => Some((stem.to_string(), None)),
        (None, Some(short)) => Some((short.to_string(), Some(RejectReason::StemTooShort))),
        (None, None) => None,
    }
}

/// Mines `ENGLISH_WORD + -(e)ar` tokens from a token stream.
pub fn discover_candidates<I, S>(tokens: I, english: &HashSet<String>, spanish: &HashSet<String>) -> Vec<CandidateReport>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counter = CandidateCounter::default();
    for t in tokens {
        counter.add(t.as_ref());
    }
    counter.finish(english, spanish)
}

/// Reads a lowercase one-word-per-line list.
pub fn load_wordlist(path: impl AsRef<Path>) -> Result<HashSet<String>, LexiconError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| LexiconError::Io { path: path.into(), source })?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(nfc_lower).collect())
}

/// Groups entries by base within a class, for summary lookups.
pub fn index_by_base(lexicon: &Lexicon) -> BTreeMap<(WordClass, String), &LexiconEntry> {
    lexicon.iter().map(|e| ((e.word_class, e.base.clone()), e)).collect()
}
