use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::features::{z_normalize, AuthorProfile, LanguageBin, PostFeatures, Region};
use crate::lexicon::WordClass;

pub const RARE: &str = "RARE";

/// One observation: a matched verb use and its post features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    pub post_id: String,
    pub author_id: String,
    pub base: String,
    pub word_class: WordClass,
    pub integrated: bool,
    pub features: PostFeatures,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSpec {
    pub word_class: WordClass,
    pub rare_threshold: usize,
    pub l2_grid: Vec<f64>,
    pub test_fraction: f64,
    pub seed: u64,
}

impl RegressionSpec {
    pub fn new(word_class: WordClass, seed: u64) -> Self {
        RegressionSpec {
            word_class,
            rare_threshold: 5,
            l2_grid: super::grid::DEFAULT_L2_GRID.to_vec(),
            test_fraction: 0.10,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), StatsError> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(StatsError::InvalidSpec(format!("test fraction {} is not in (0, 1)", self.test_fraction)));
        }
        if self.l2_grid.is_empty() {
            return Err(StatsError::InvalidSpec("empty L2 grid".into()));
        }
        if let Some(bad) = self.l2_grid.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(StatsError::InvalidSpec(format!("L2 weight {bad} is not a finite non-negative number")));
        }
        if self.rare_threshold == 0 {
            return Err(StatsError::InvalidSpec("rare threshold must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Intercept,
    Scalar,
    Indicator,
    AuthorEffect,
    WordEffect,
}

impl ColumnKind {
    pub fn is_fixed_effect(self) -> bool {
        matches!(self, ColumnKind::AuthorEffect | ColumnKind::WordEffect)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    pub penalized: bool,
}

/// Sparse row-major design matrix with its outcome vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub columns: Vec<Column>,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
    pub y: Vec<f64>,
    /// Records left out for lacking a language bin or a required rate.
    pub dropped: usize,
}

impl Design {
    /// Builds a design from dense rows. Columns named "Intercept" are left
    /// unpenalized unless `penalized` says otherwise.
    pub fn from_dense(columns: Vec<Column>, rows: &[Vec<f64>], y: Vec<f64>) -> Self {
        assert_eq!(rows.len(), y.len(), "one outcome per row");
        let mut d = Design::empty(columns);
        for r in rows {
            assert_eq!(r.len(), d.columns.len(), "row width");
            d.push_row(r.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j as u32, *v)));
        }
        d.y = y;
        d
    }

    /// Dense columns with an unpenalized intercept prepended.
    pub fn with_intercept(names: &[&str], rows: &[Vec<f64>], y: Vec<f64>) -> Self {
        let mut columns = vec![Column { name: "Intercept".into(), kind: ColumnKind::Intercept, penalized: false }];
        columns.extend(names.iter().map(|n| Column { name: n.to_string(), kind: ColumnKind::Scalar, penalized: true }));
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| std::iter::once(1.0).chain(r.iter().copied()).collect()).collect();
        Design::from_dense(columns, &rows, y)
    }

    fn empty(columns: Vec<Column>) -> Self {
        Design { columns, indptr: vec![0], indices: Vec::new(), values: Vec::new(), y: Vec::new(), dropped: 0 }
    }

    fn push_row(&mut self, entries: impl IntoIterator<Item = (u32, f64)>) {
        for (j, v) in entries {
            self.indices.push(j);
            self.values.push(v);
        }
        self.indptr.push(self.indices.len());
    }

    pub fn n_rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn row_dot(&self, i: usize, beta: &[f64]) -> f64 {
        let (idx, val) = self.row(i);
        idx.iter().zip(val).map(|(&j, v)| beta[j as usize] * v).sum()
    }

    /// `X beta`.
    pub fn mul(&self, beta: &[f64]) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.row_dot(i, beta)).collect()
    }

    /// `X^T v`.
    pub fn mul_transpose(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols()];
        for (i, vi) in v.iter().enumerate() {
            let (idx, val) = self.row(i);
            for (&j, x) in idx.iter().zip(val) {
                out[j as usize] += x * vi;
            }
        }
        out
    }

    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut r = vec![0.0; self.n_cols()];
        let (idx, val) = self.row(i);
        for (&j, v) in idx.iter().zip(val) {
            r[j as usize] = *v;
        }
        r
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.dense_row(i)[j]).collect()
    }

    /// The rows at `rows`, in that order.
    pub fn subset(&self, rows: &[usize]) -> Design {
        let mut d = Design::empty(self.columns.clone());
        for &i in rows {
            let (idx, val) = self.row(i);
            d.push_row(idx.iter().copied().zip(val.iter().copied()));
            d.y.push(self.y[i]);
        }
        d
    }

    /// Applies `f` to every stored value of column `j`.
    pub fn map_column(&mut self, j: usize, f: impl Fn(f64) -> f64) {
        for (idx, v) in self.indices.iter().zip(self.values.iter_mut()) {
            if *idx as usize == j {
                *v = f(*v);
            }
        }
    }
}

struct Kept<'a> {
    record: &'a DesignRecord,
    profile: &'a AuthorProfile,
    bin: LanguageBin,
}

fn levels<'a>(keys: impl Iterator<Item = &'a str>, threshold: usize) -> (Vec<String>, bool) {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for k in keys {
        *counts.entry(k).or_default() += 1;
    }
    let frequent = counts.iter().filter(|(_, c)| **c >= threshold).map(|(k, _)| k.to_string()).collect();
    let any_rare = counts.values().any(|c| *c < threshold);
    (frequent, any_rare)
}

/// One-hot and scaled design for the records of `spec.word_class`.
///
/// Region and language bin are coded against "UNK" and low Spanish. Authors
/// and words seen fewer than `rare_threshold` times share a RARE column.
/// Scalars are `ln(x + 1)` then standardized over the kept records.
pub fn encode_design(
    records: &[DesignRecord],
    profiles: &HashMap<String, AuthorProfile>,
    spec: &RegressionSpec,
) -> Result<Design, StatsError> {
    spec.validate()?;
    let loanword = spec.word_class == WordClass::Loanword;
    let mut kept = Vec::new();
    let mut dropped = 0;
    for r in records.iter().filter(|r| r.word_class == spec.word_class) {
        let profile = profiles.get(&r.author_id).ok_or_else(|| StatsError::MissingProfile(r.post_id.clone()))?;
        match profile.language_bin {
            Some(bin) if !loanword || profile.native_integration_rate.is_some() => kept.push(Kept { record: r, profile, bin }),
            _ => dropped += 1,
        }
    }
    if kept.is_empty() {
        return Err(StatsError::EmptyDesign);
    }

    let mut scalar_names = vec!["Post length", "Post activity", "URL sharing", "RT sharing"];
    let mut scalar_raw: Vec<Vec<f64>> = vec![
        kept.iter().map(|k| k.record.features.post_length as f64).collect(),
        kept.iter().map(|k| k.profile.activity).collect(),
        kept.iter().map(|k| k.profile.url_share).collect(),
        kept.iter().map(|k| k.profile.rt_share).collect(),
    ];
    if loanword {
        scalar_names.push("Integrated verb use");
        scalar_raw.push(kept.iter().map(|k| k.profile.native_integration_rate.unwrap_or(0.0)).collect());
    }
    let scalars: Vec<Vec<f64>> =
        scalar_raw.iter().map(|col| z_normalize(&col.iter().map(|x| x.ln_1p()).collect::<Vec<_>>())).collect();

    let (authors, rare_authors) = levels(kept.iter().map(|k| k.record.author_id.as_str()), spec.rare_threshold);
    let (words, rare_words) = levels(kept.iter().map(|k| k.record.base.as_str()), spec.rare_threshold);

    let col = |name: &str, kind| Column { name: name.to_string(), kind, penalized: kind != ColumnKind::Intercept };
    let mut columns = vec![
        col("Intercept", ColumnKind::Intercept),
        col("Has hashtag", ColumnKind::Indicator),
        col("Has mention", ColumnKind::Indicator),
    ];
    let scalar_at = columns.len();
    columns.extend(scalar_names.iter().map(|n| col(n, ColumnKind::Scalar)));
    // "Integrated verb use" sits after the language dummies, as in the results table.
    let native_rate_col = loanword.then(|| columns.pop().expect("pushed above"));
    let region_at = columns.len();
    for name in ["Latin America", "Europe", "US", "Other"] {
        columns.push(col(name, ColumnKind::Indicator));
    }
    let bin_at = columns.len();
    columns.push(col("High Spanish", ColumnKind::Indicator));
    columns.push(col("Medium Spanish", ColumnKind::Indicator));
    let native_at = columns.len();
    if let Some(c) = native_rate_col {
        columns.push(c);
    }

    let author_at = columns.len();
    let author_index: HashMap<&str, usize> = authors.iter().enumerate().map(|(i, a)| (a.as_str(), author_at + i)).collect();
    columns.extend(authors.iter().map(|a| col(&format!("author:{a}"), ColumnKind::AuthorEffect)));
    let author_rare = rare_authors.then(|| {
        columns.push(col(&format!("author:{RARE}"), ColumnKind::AuthorEffect));
        columns.len() - 1
    });
    let word_at = columns.len();
    let word_index: HashMap<&str, usize> = words.iter().enumerate().map(|(i, w)| (w.as_str(), word_at + i)).collect();
    columns.extend(words.iter().map(|w| col(&format!("word:{w}"), ColumnKind::WordEffect)));
    let word_rare = rare_words.then(|| {
        columns.push(col(&format!("word:{RARE}"), ColumnKind::WordEffect));
        columns.len() - 1
    });

    let mut design = Design::empty(columns);
    for (i, k) in kept.iter().enumerate() {
        let mut row: Vec<(u32, f64)> = vec![(0, 1.0)];
        if k.record.features.has_hashtag {
            row.push((1, 1.0));
        }
        if k.record.features.has_mention {
            row.push((2, 1.0));
        }
        for (s, column) in scalars.iter().take(4).enumerate() {
            row.push(((scalar_at + s) as u32, column[i]));
        }
        let region = match k.profile.region {
            Region::Unknown => None,
            Region::LatinAmerica => Some(0),
            Region::Europe => Some(1),
            Region::US => Some(2),
            Region::Other => Some(3),
        };
        if let Some(r) = region {
            row.push(((region_at + r) as u32, 1.0));
        }
        match k.bin {
            LanguageBin::High => row.push((bin_at as u32, 1.0)),
            LanguageBin::Medium => row.push(((bin_at + 1) as u32, 1.0)),
            LanguageBin::Low => {}
        }
        if loanword {
            row.push((native_at as u32, scalars[4][i]));
        }
        let a = author_index.get(k.record.author_id.as_str()).copied().or(author_rare).expect("author level");
        let w = word_index.get(k.record.base.as_str()).copied().or(word_rare).expect("word level");
        row.push((a as u32, 1.0));
        row.push((w as u32, 1.0));
        row.retain(|(_, v)| *v != 0.0);
        design.push_row(row);
        design.y.push(if k.record.integrated { 1.0 } else { 0.0 });
    }
    design.dropped = dropped;
    Ok(design)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(id: &str, region: Region, bin: Option<LanguageBin>, native: Option<f64>) -> AuthorProfile {
        AuthorProfile {
            author_id: id.into(),
            posts: 10,
            activity: 1.0,
            rt_share: 0.1,
            url_share: 0.2,
            region,
            spanish_rate: bin.map(|_| 1.0),
            language_bin: bin,
            native_integration_rate: native,
        }
    }

    fn record(i: usize, author: &str, base: &str, class: WordClass) -> DesignRecord {
        DesignRecord {
            post_id: i.to_string(),
            author_id: author.into(),
            base: base.into(),
            word_class: class,
            integrated: i.is_multiple_of(2),
            features: PostFeatures { has_hashtag: i.is_multiple_of(3), has_mention: false, post_length: i },
        }
    }

    fn profiles() -> HashMap<String, AuthorProfile> {
        [
            profile("big", Region::LatinAmerica, Some(LanguageBin::High), Some(0.5)),
            profile("small", Region::Unknown, Some(LanguageBin::Low), Some(0.2)),
            profile("nobin", Region::Europe, None, Some(0.2)),
            profile("nonative", Region::US, Some(LanguageBin::Medium), None),
        ]
        .into_iter()
        .map(|p| (p.author_id.clone(), p))
        .collect()
    }

    fn records(class: WordClass) -> Vec<DesignRecord> {
        let mut r: Vec<DesignRecord> = (0..6).map(|i| record(i, "big", "like", class)).collect();
        r.extend((6..10).map(|i| record(i, "small", "ban", class)));
        r.push(record(10, "nobin", "like", class));
        r.push(record(11, "nonative", "like", class));
        r
    }

    #[test]
    fn loanword_design() {
        let spec = RegressionSpec::new(WordClass::Loanword, 1);
        let d = encode_design(&records(WordClass::Loanword), &profiles(), &spec).unwrap();
        assert_eq!(d.n_rows(), 10);
        assert_eq!(d.dropped, 2);
        assert_eq!(
            d.names(),
            [
                "Intercept", "Has hashtag", "Has mention", "Post length", "Post activity", "URL sharing", "RT sharing",
                "Latin America", "Europe", "US", "Other", "High Spanish", "Medium Spanish", "Integrated verb use",
                "author:big", "author:RARE", "word:like", "word:RARE",
            ]
        );
        // The 4-record author lands in RARE; UNK region sets no region dummy.
        let row = d.dense_row(7);
        assert_eq!(row[d.column_index("author:RARE").unwrap()], 1.0);
        assert_eq!(row[d.column_index("author:big").unwrap()], 0.0);
        assert!((7..=10).all(|j| row[j] == 0.0));
        assert!(!d.columns[0].penalized && d.columns[1..].iter().all(|c| c.penalized));
        let z = d.column(d.column_index("Post length").unwrap());
        assert!(z.iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn native_design_omits_native_rate() {
        let spec = RegressionSpec::new(WordClass::Native, 1);
        let d = encode_design(&records(WordClass::Native), &profiles(), &spec).unwrap();
        assert!(d.column_index("Integrated verb use").is_none());
        assert_eq!(d.n_rows(), 11);
        assert_eq!(d.dropped, 1);
    }

    #[test]
    fn missing_profile_is_an_error() {
        let spec = RegressionSpec::new(WordClass::Loanword, 1);
        let r = vec![record(0, "ghost", "like", WordClass::Loanword)];
        assert_eq!(encode_design(&r, &profiles(), &spec), Err(StatsError::MissingProfile("0".into())));
    }

    #[test]
    fn no_rare_column_when_all_frequent() {
        let spec = RegressionSpec { rare_threshold: 1, ..RegressionSpec::new(WordClass::Native, 1) };
        let d = encode_design(&records(WordClass::Native), &profiles(), &spec).unwrap();
        assert!(d.column_index("author:RARE").is_none());
        assert!(d.column_index("word:RARE").is_none());
    }

    #[test]
    fn spec_validation() {
        let mut spec = RegressionSpec::new(WordClass::Native, 1);
        spec.test_fraction = 1.0;
        assert!(spec.validate().is_err());
        spec.test_fraction = 0.1;
        spec.l2_grid.clear();
        assert!(spec.validate().is_err());
    }

    #[test]
    fn sparse_products() {
        let d = Design::with_intercept(&["x"], &[vec![2.0], vec![0.0], vec![-1.0]], vec![1.0, 0.0, 1.0]);
        assert_eq!(d.mul(&[1.0, 3.0]), [7.0, 1.0, -2.0]);
        assert_eq!(d.mul_transpose(&[1.0, 1.0, 1.0]), [3.0, 1.0]);
        assert_eq!(d.subset(&[2, 0]).dense_row(0), [1.0, -1.0]);
    }
}
