//! Spanish verb inflection for the search space of the matcher.
//!
//! Only the indicative present, preterite and imperfect are generated: three
//! tenses times six person/number cells. Regular paradigms come from suffix
//! tables; irregular and stem-changing verbs are covered by cell overrides
//! read from the bundled verb table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{Lexicon, LexiconEntry};
use crate::normalize::nfc_lower;

/// The closed class of light verbs the lexicon templates may use.
pub const LIGHT_VERBS: &[&str] = &[
    "actuar", "buscar", "dar", "echar", "enviar", "estar", "hacer", "mandar", "pedir", "poner",
    "ser", "subir", "tener", "tirar", "tomar",
];

/// Clitics accepted before forms of reflexive verbs.
pub const REFLEXIVE_CLITICS: &[&str] = &["me", "te", "se", "nos", "os"];

const BUNDLED_TABLE: &str = include_str!("../data/irregular_verbs.tsv");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MorphologyError {
    #[error("`{0}` is not a Spanish infinitive (-ar, -er, -ir)")]
    NotAVerb(String),
    #[error("`{0}` is not in the bundled light-verb table")]
    UnknownLightVerb(String),
    #[error("every integrated form of `{0}` is excluded")]
    EmptySurfaceSet(String),
    #[error("verb table line {line}: {reason}")]
    MalformedTable { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Conjugation {
    Ar,
    Er,
    Ir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tense {
    Present,
    Preterite,
    Imperfect,
}

impl Tense {
    pub const ALL: [Tense; 3] = [Tense::Present, Tense::Preterite, Tense::Imperfect];
}

impl fmt::Display for Tense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tense::Present => "present",
            Tense::Preterite => "preterite",
            Tense::Imperfect => "imperfect",
        })
    }
}

impl FromStr for Tense {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "present" => Ok(Tense::Present),
            "preterite" => Ok(Tense::Preterite),
            "imperfect" => Ok(Tense::Imperfect),
            other => Err(format!("unknown tense `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Number {
    #[serde(rename = "sg")]
    Singular,
    #[serde(rename = "pl")]
    Plural,
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Number::Singular => "sg",
            Number::Plural => "pl",
        })
    }
}

impl FromStr for Number {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sg" => Ok(Number::Singular),
            "pl" => Ok(Number::Plural),
            other => Err(format!("unknown number `{other}`")),
        }
    }
}

/// One slot of the paradigm: tense, person (1..=3) and number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub tense: Tense,
    pub person: u8,
    pub number: Number,
}

impl Cell {
    /// All 18 cells, tense-major, singular before plural.
    pub fn all() -> impl Iterator<Item = Cell> {
        Tense::ALL.into_iter().flat_map(|tense| {
            [Number::Singular, Number::Plural]
                .into_iter()
                .flat_map(move |number| (1..=3).map(move |person| Cell { tense, person, number }))
        })
    }

    fn index(self) -> usize {
        let number = match self.number {
            Number::Singular => 0,
            Number::Plural => 3,
        };
        number + usize::from(self.person - 1)
    }
}

pub type Overrides = BTreeMap<Cell, String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InflectedForm {
    pub lemma: String,
    pub tense: Tense,
    pub person: u8,
    pub number: Number,
    pub surface: String,
}

impl InflectedForm {
    pub fn cell(&self) -> Cell {
        Cell { tense: self.tense, person: self.person, number: self.number }
    }
}

const AR: [[&str; 6]; 3] = [
    ["o", "as", "a", "amos", "áis", "an"],
    ["é", "aste", "ó", "amos", "asteis", "aron"],
    ["aba", "abas", "aba", "ábamos", "abais", "aban"],
];
const ER: [[&str; 6]; 3] = [
    ["o", "es", "e", "emos", "éis", "en"],
    ["í", "iste", "ió", "imos", "isteis", "ieron"],
    ["ía", "ías", "ía", "íamos", "íais", "ían"],
];
const IR: [[&str; 6]; 3] = [
    ["o", "es", "e", "imos", "ís", "en"],
    ["í", "iste", "ió", "imos", "isteis", "ieron"],
    ["ía", "ías", "ía", "íamos", "íais", "ían"],
];

impl Conjugation {
    pub fn suffix(self, cell: Cell) -> &'static str {
        let table = match self {
            Conjugation::Ar => &AR,
            Conjugation::Er => &ER,
            Conjugation::Ir => &IR,
        };
        let tense = match cell.tense {
            Tense::Present => 0,
            Tense::Preterite => 1,
            Tense::Imperfect => 2,
        };
        table[tense][cell.index()]
    }
}

/// Splits an infinitive into stem and conjugation class.
pub fn split_infinitive(lemma: &str) -> Result<(&str, Conjugation), MorphologyError> {
    let class = if lemma.ends_with("ar") {
        Conjugation::Ar
    } else if lemma.ends_with("er") {
        Conjugation::Er
    } else if lemma.ends_with("ir") {
        Conjugation::Ir
    } else {
        return Err(MorphologyError::NotAVerb(lemma.to_string()));
    };
    let stem = &lemma[..lemma.len() - 2];
    if stem.is_empty() {
        return Err(MorphologyError::NotAVerb(lemma.to_string()));
    }
    Ok((stem, class))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbParadigm {
    pub lemma: String,
    pub conjugation: Conjugation,
    pub stem: String,
    pub overrides: Overrides,
    /// Whether any -car/-gar/-zar spelling change was applied.
    pub orthographic_rules_applied: bool,
}

impl VerbParadigm {
    pub fn new(lemma: &str, overrides: &Overrides) -> Result<Self, MorphologyError> {
        let lemma = nfc_lower(lemma.trim());
        let (stem, conjugation) = split_infinitive(&lemma)?;
        let stem = stem.to_string();
        let orthographic_rules_applied = Cell::all().any(|cell| {
            !overrides.contains_key(&cell) && orthographic_stem(&stem, conjugation, cell).is_some()
        });
        Ok(VerbParadigm {
            lemma: lemma.clone(),
            conjugation,
            stem,
            overrides: overrides.clone(),
            orthographic_rules_applied,
        })
    }

    /// The regular form for a cell, before overrides.
    pub fn regular(&self, cell: Cell) -> String {
        let suffix = self.conjugation.suffix(cell);
        match orthographic_stem(&self.stem, self.conjugation, cell) {
            Some(stem) => format!("{stem}{suffix}"),
            None => format!("{}{suffix}", self.stem),
        }
    }

    /// All 18 cells in canonical order, overrides applied.
    pub fn cells(&self) -> Vec<InflectedForm> {
        Cell::all()
            .map(|cell| {
                let surface = match self.overrides.get(&cell) {
                    Some(s) => nfc_lower(s),
                    None => nfc_lower(&self.regular(cell)),
                };
                InflectedForm {
                    lemma: self.lemma.clone(),
                    tense: cell.tense,
                    person: cell.person,
                    number: cell.number,
                    surface,
                }
            })
            .collect()
    }
}

/// c -> qu, g -> gu, z -> c before a suffix starting with "é". Only -ar verbs
/// take "é"-initial suffixes where the consonant sound must be kept.
fn orthographic_stem(stem: &str, conjugation: Conjugation, cell: Cell) -> Option<String> {
    if conjugation != Conjugation::Ar || !conjugation.suffix(cell).starts_with('é') {
        return None;
    }
    let last = stem.chars().last()?;
    let head = &stem[..stem.len() - last.len_utf8()];
    match last {
        'c' => Some(format!("{head}qu")),
        'g' => Some(format!("{head}gu")),
        'z' => Some(format!("{head}c")),
        _ => None,
    }
}

/// Inflects `lemma` into its distinct surface forms (at most 18), first
/// occurrence kept when two cells share a spelling.
pub fn inflect(lemma: &str, overrides: &Overrides) -> Result<Vec<InflectedForm>, MorphologyError> {
    let paradigm = VerbParadigm::new(lemma, overrides)?;
    let mut seen = BTreeSet::new();
    Ok(paradigm.cells().into_iter().filter(|f| seen.insert(f.surface.clone())).collect())
}

/// Irregular and stem-changing cells, keyed by lemma.
#[derive(Debug, Clone, Default)]
pub struct VerbTable {
    verbs: BTreeMap<String, Overrides>,
}

impl VerbTable {
    pub fn parse(text: &str) -> Result<Self, MorphologyError> {
        let mut verbs: BTreeMap<String, Overrides> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| MorphologyError::MalformedTable { line: i + 1, reason };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 5 {
                return Err(bad(format!("expected 5 columns, found {}", cols.len())));
            }
            let tense = cols[1].parse::<Tense>().map_err(bad)?;
            let person = cols[2]
                .parse::<u8>()
                .ok()
                .filter(|p| (1..=3).contains(p))
                .ok_or_else(|| bad(format!("bad person `{}`", cols[2])))?;
            let number = cols[3].parse::<Number>().map_err(bad)?;
            if cols[4].is_empty() {
                return Err(bad("empty surface".into()));
            }
            verbs
                .entry(nfc_lower(cols[0]))
                .or_default()
                .insert(Cell { tense, person, number }, nfc_lower(cols[4]));
        }
        Ok(VerbTable { verbs })
    }

    /// The table shipped with the crate.
    pub fn bundled() -> &'static VerbTable {
        static TABLE: OnceLock<VerbTable> = OnceLock::new();
        TABLE.get_or_init(|| VerbTable::parse(BUNDLED_TABLE).expect("bundled verb table parses"))
    }

    pub fn overrides(&self, lemma: &str) -> Option<&Overrides> {
        self.verbs.get(lemma)
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.verbs.keys().map(String::as_str)
    }

    /// Inflects with this table's overrides, if any.
    pub fn inflect(&self, lemma: &str) -> Result<Vec<InflectedForm>, MorphologyError> {
        let key = nfc_lower(lemma.trim());
        let empty = Overrides::new();
        inflect(&key, self.verbs.get(&key).unwrap_or(&empty))
    }

    /// The full 18-cell paradigm with this table's overrides.
    pub fn paradigm(&self, lemma: &str) -> Result<VerbParadigm, MorphologyError> {
        let key = nfc_lower(lemma.trim());
        let empty = Overrides::new();
        VerbParadigm::new(&key, self.verbs.get(&key).unwrap_or(&empty))
    }

    /// Every distinct present/preterite/imperfect form of a light verb.
    pub fn conjugate_light_verb(&self, lemma: &str) -> Result<Vec<InflectedForm>, MorphologyError> {
        let key = nfc_lower(lemma.trim());
        if !LIGHT_VERBS.contains(&key.as_str()) || !self.verbs.contains_key(&key) {
            return Err(MorphologyError::UnknownLightVerb(key));
        }
        self.inflect(&key)
    }
}

/// [`VerbTable::conjugate_light_verb`] over the bundled table.
pub fn conjugate_light_verb(lemma: &str) -> Result<Vec<InflectedForm>, MorphologyError> {
    VerbTable::bundled().conjugate_light_verb(lemma)
}

/// A fully expanded light-verb phrase: conjugated head plus literal tail.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LightPhrase {
    pub head: String,
    pub tail: Vec<String>,
    /// Accepts an optional reflexive clitic before the head.
    pub reflexive: bool,
}

impl LightPhrase {
    pub fn tokens(&self) -> Vec<String> {
        std::iter::once(self.head.clone()).chain(self.tail.iter().cloned()).collect()
    }
}

impl fmt::Display for LightPhrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.head)?;
        for t in &self.tail {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

/// Every searchable string for one lexicon entry.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceFormSet {
    pub integrated: BTreeSet<String>,
    /// Integrated forms also match after a reflexive clitic.
    pub integrated_reflexive: bool,
    pub light: BTreeSet<LightPhrase>,
}

impl SurfaceFormSet {
    /// Every token sequence this entry matches, clitic variants included,
    /// tagged with whether it is the integrated variant.
    pub fn phrases(&self) -> Vec<(Vec<String>, bool)> {
        let mut out = Vec::new();
        for s in &self.integrated {
            out.push((vec![s.clone()], true));
            if self.integrated_reflexive {
                for c in REFLEXIVE_CLITICS {
                    out.push((vec![c.to_string(), s.clone()], true));
                }
            }
        }
        for p in &self.light {
            let tokens = p.tokens();
            if p.reflexive {
                for c in REFLEXIVE_CLITICS {
                    let mut with = vec![c.to_string()];
                    with.extend(tokens.iter().cloned());
                    out.push((with, false));
                }
            }
            out.push((tokens, false));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedEntry {
    pub entry: LexiconEntry,
    pub surfaces: SurfaceFormSet,
}

/// Lexicon entries paired with their surface forms, in lexicon order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpandedLexicon {
    pub entries: Vec<ExpandedEntry>,
}

impl ExpandedLexicon {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ExpandedEntry> {
        self.entries.iter()
    }
}

/// Expands every entry using the bundled verb table.
pub fn expand_lexicon(lexicon: &Lexicon) -> Result<ExpandedLexicon, MorphologyError> {
    expand_lexicon_with(lexicon, VerbTable::bundled())
}

pub fn expand_lexicon_with(lexicon: &Lexicon, table: &VerbTable) -> Result<ExpandedLexicon, MorphologyError> {
    let mut heads: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let entries = lexicon
        .iter()
        .map(|entry| {
            let integrated: BTreeSet<String> = table
                .inflect(&entry.integrated_lemma)?
                .into_iter()
                .map(|f| f.surface)
                .filter(|s| !entry.excluded_surfaces.contains(s))
                .collect();
            if integrated.is_empty() {
                return Err(MorphologyError::EmptySurfaceSet(entry.integrated_lemma.clone()));
            }
            let mut light = BTreeSet::new();
            for template in &entry.light_templates {
                if !heads.contains_key(&template.light_lemma) {
                    let forms = table
                        .conjugate_light_verb(&template.light_lemma)?
                        .into_iter()
                        .map(|f| f.surface)
                        .collect();
                    heads.insert(template.light_lemma.clone(), forms);
                }
                let forms = &heads[&template.light_lemma];
                for tail in template.tails() {
                    for head in forms {
                        light.insert(LightPhrase {
                            head: head.clone(),
                            tail: tail.clone(),
                            reflexive: template.reflexive,
                        });
                    }
                }
            }
            Ok(ExpandedEntry {
                entry: entry.clone(),
                surfaces: SurfaceFormSet { integrated, integrated_reflexive: entry.reflexive, light },
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExpandedLexicon { entries })
}
