use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::wilcoxon::{bonferroni, wilcoxon_signed_rank, WilcoxonResult};
use super::StatsError;
use crate::lexicon::WordClass;
use crate::matcher::CorpusSummary;

/// `integrated / (integrated + light)`.
pub fn integration_rate(integrated: u64, light: u64) -> Result<f64, StatsError> {
    let total = integrated + light;
    if total == 0 {
        return Err(StatsError::UndefinedRate);
    }
    Ok(integrated as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub base: String,
    pub word_class: WordClass,
    pub integrated_count: u64,
    pub light_count: u64,
    /// Absent when the word was never seen.
    pub rate: Option<f64>,
}

impl RateRow {
    pub fn total(&self) -> u64 {
        self.integrated_count + self.light_count
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
}

impl RateTable {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("base\tclass\tintegrated_count\tlight_count\tintegration_rate\n");
        for r in &self.rows {
            let rate = r.rate.map_or_else(|| "NA".to_string(), |x| x.to_string());
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", r.base, r.word_class, r.integrated_count, r.light_count, rate);
        }
        out
    }
}

fn rows_of(summary: &CorpusSummary, class: WordClass) -> Vec<RateRow> {
    summary
        .counts
        .iter()
        .filter(|((_, c), _)| *c == class)
        .map(|((base, c), v)| RateRow {
            base: base.clone(),
            word_class: *c,
            integrated_count: v.integrated,
            light_count: v.light,
            rate: integration_rate(v.integrated, v.light).ok(),
        })
        .collect()
}

/// The `k` words of `class` with the most uses, ties broken by base.
pub fn top_k_rate_table(summary: &CorpusSummary, k: usize, class: WordClass) -> RateTable {
    let mut rows = rows_of(summary, class);
    rows.sort_by(|a, b| b.total().cmp(&a.total()).then_with(|| a.base.cmp(&b.base)));
    rows.truncate(k);
    RateTable { rows }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub base: String,
    pub rate_a: f64,
    pub rate_b: f64,
}

impl ComparisonRow {
    pub fn delta(&self) -> f64 {
        self.rate_b - self.rate_a
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub word_class: WordClass,
    pub rows: Vec<ComparisonRow>,
    pub mean_rate_a: f64,
    pub mean_rate_b: f64,
    /// Absent when every paired difference is zero.
    pub wilcoxon: Option<WilcoxonResult>,
    pub family_size: usize,
    pub adjusted_p: Option<f64>,
}

impl ComparisonReport {
    /// Per-word rates and their difference, then summary lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("word\trate_a\trate_b\tdelta\n");
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{:.6}\t{:.6}\t{:.6}", r.base, r.rate_a, r.rate_b, r.delta());
        }
        let _ = writeln!(out, "#mean\t{:.6}\t{:.6}\t{:.6}", self.mean_rate_a, self.mean_rate_b, self.mean_rate_b - self.mean_rate_a);
        match (&self.wilcoxon, self.adjusted_p) {
            (Some(w), Some(adj)) => {
                let _ = writeln!(out, "#wilcoxon\tW={}\tp={:e}\tp_bonferroni={:e}\tm={}", w.statistic, w.p_value, adj, self.family_size);
            }
            _ => out.push_str("#wilcoxon\tno test: all differences are zero\n"),
        }
        out
    }
}

/// Pairs the `k` most frequent words (pooled over both corpora) whose rate is
/// defined in both, and tests the paired rate differences.
pub fn compare_domains(
    a: &CorpusSummary,
    b: &CorpusSummary,
    class: WordClass,
    k: usize,
    family_size: usize,
) -> Result<ComparisonReport, StatsError> {
    let rates_b: BTreeMap<String, RateRow> = rows_of(b, class).into_iter().map(|r| (r.base.clone(), r)).collect();
    let mut paired: Vec<(u64, ComparisonRow)> = rows_of(a, class)
        .into_iter()
        .filter_map(|ra| {
            let rb = rates_b.get(&ra.base)?;
            Some((
                ra.total() + rb.total(),
                ComparisonRow { base: ra.base.clone(), rate_a: ra.rate?, rate_b: rb.rate? },
            ))
        })
        .collect();
    if paired.is_empty() {
        return Err(StatsError::DisjointVocabulary);
    }
    paired.sort_by(|(ta, ra), (tb, rb)| tb.cmp(ta).then_with(|| ra.base.cmp(&rb.base)));
    paired.truncate(k);
    let rows: Vec<ComparisonRow> = paired.into_iter().map(|(_, r)| r).collect();
    let n = rows.len() as f64;
    let mean_rate_a = rows.iter().map(|r| r.rate_a).sum::<f64>() / n;
    let mean_rate_b = rows.iter().map(|r| r.rate_b).sum::<f64>() / n;
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.rate_a, r.rate_b)).collect();
    let wilcoxon = match wilcoxon_signed_rank(&pairs) {
        Ok(w) => Some(w),
        Err(StatsError::AllZeroDifferences) => None,
        Err(e) => return Err(e),
    };
    let family_size = family_size.max(1);
    let adjusted_p = wilcoxon.as_ref().map(|w| bonferroni(w.p_value, family_size));
    Ok(ComparisonReport { word_class: class, rows, mean_rate_a, mean_rate_b, wilcoxon, family_size, adjusted_p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::VariantCounts;

    fn summary(rows: &[(&str, u64, u64)]) -> CorpusSummary {
        let counts = rows
            .iter()
            .map(|(b, i, l)| ((b.to_string(), WordClass::Loanword), VariantCounts { integrated: *i, light: *l }))
            .collect();
        CorpusSummary { counts }
    }

    #[test]
    fn rates() {
        assert_eq!(integration_rate(3, 1), Ok(0.75));
        assert_eq!(integration_rate(7, 0), Ok(1.0));
        assert_eq!(integration_rate(0, 0), Err(StatsError::UndefinedRate));
    }

    #[test]
    fn top_k_orders_by_total_then_base() {
        let s = summary(&[("box", 2, 2), ("ban", 3, 1), ("like", 9, 1), ("zap", 0, 0)]);
        let t = top_k_rate_table(&s, 50, WordClass::Loanword);
        let order: Vec<&str> = t.rows.iter().map(|r| r.base.as_str()).collect();
        assert_eq!(order, ["like", "ban", "box", "zap"]);
        assert_eq!(t.rows[3].rate, None);
        assert_eq!(top_k_rate_table(&s, 2, WordClass::Loanword).rows.len(), 2);
        assert!(top_k_rate_table(&s, 50, WordClass::Native).rows.is_empty());
    }

    #[test]
    fn identical_corpora_have_no_test() {
        let s = summary(&[("ban", 3, 1), ("like", 9, 1)]);
        let r = compare_domains(&s, &s, WordClass::Loanword, 50, 1).unwrap();
        assert!(r.rows.iter().all(|r| r.delta() == 0.0));
        assert!(r.wilcoxon.is_none());
        assert!(r.to_tsv().contains("no test"));
    }

    #[test]
    fn disjoint_corpora_error() {
        let a = summary(&[("ban", 3, 1)]);
        let b = summary(&[("like", 9, 1), ("ban", 0, 0)]);
        assert_eq!(compare_domains(&a, &b, WordClass::Loanword, 50, 1), Err(StatsError::DisjointVocabulary));
    }

    #[test]
    fn comparison_means() {
        let a = summary(&[("ban", 1, 1), ("like", 3, 1)]);
        let b = summary(&[("ban", 1, 0), ("like", 1, 0), ("only", 5, 0)]);
        let r = compare_domains(&a, &b, WordClass::Loanword, 50, 4).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.mean_rate_a, 0.625);
        assert_eq!(r.mean_rate_b, 1.0);
        let w = r.wilcoxon.unwrap();
        assert_eq!(w.p_value, 0.5);
        assert_eq!(r.adjusted_p, Some(1.0));
    }
}
