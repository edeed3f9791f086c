use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::StatsError;

/// Largest number of nonzero differences that gets the exact null distribution.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// `min(W+, W-)`.
    pub statistic: f64,
    pub w_plus: f64,
    /// Pairs left after dropping zero differences.
    pub n: usize,
    pub p_value: f64,
    pub exact: bool,
}

/// Average ranks of `|d|` (1-based), ties sharing the mean rank.
pub fn signed_ranks(diffs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut ranks = vec![0.0; diffs.len()];
    let mut i = 0;
    while i < order.len() {
        let base = diffs[order[i]].abs();
        let mut j = i + 1;
        while j < order.len() && (diffs[order[j]].abs() - base).abs() <= 1e-12 * base.max(1.0) {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

fn nonzero(diffs: &[f64]) -> Result<Vec<f64>, StatsError> {
    let d: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    if d.is_empty() {
        return Err(StatsError::AllZeroDifferences);
    }
    Ok(d)
}

fn w_plus(diffs: &[f64], ranks: &[f64]) -> f64 {
    // An empty float sum is -0.0.
    diffs.iter().zip(ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).fold(0.0, |acc, r| acc + r)
}

/// Two-sided exact p-value from the permutation distribution of `W+` under
/// random signs, ties included.
pub fn exact_p_value(diffs: &[f64]) -> Result<(f64, f64), StatsError> {
    let d = nonzero(diffs)?;
    let ranks = signed_ranks(&d);
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut ways = vec![0f64; max + 1];
    ways[0] = 1.0;
    for &r in &doubled {
        for s in (r..=max).rev() {
            ways[s] += ways[s - r];
        }
    }
    let total = 2f64.powi(d.len() as i32);
    let w = w_plus(&d, &ranks);
    let observed = (w * 2.0).round() as usize;
    let lower: f64 = ways[..=observed].iter().sum::<f64>() / total;
    let upper: f64 = ways[observed..].iter().sum::<f64>() / total;
    Ok(((2.0 * lower.min(upper)).min(1.0), w))
}

/// Two-sided p-value from the normal approximation with the tie-corrected
/// variance and no continuity correction.
pub fn normal_p_value(diffs: &[f64]) -> Result<(f64, f64), StatsError> {
    let d = nonzero(diffs)?;
    let ranks = signed_ranks(&d);
    let n = d.len() as f64;
    let w = w_plus(&d, &ranks);
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = ranks.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|r| **r == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return Ok((1.0, w));
    }
    let z = (w - mean) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(((2.0 * normal.cdf(-z.abs())).min(1.0), w))
}

/// Paired signed-rank test on `(a, b)` pairs, differences taken as `b - a`.
/// Exact up to [`EXACT_MAX_N`] nonzero differences, normal beyond.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<WilcoxonResult, StatsError> {
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| b - a).collect();
    let n = nonzero(&diffs)?.len();
    let exact = n <= EXACT_MAX_N;
    let (p_value, w_plus) = if exact { exact_p_value(&diffs)? } else { normal_p_value(&diffs)? };
    let total = n as f64 * (n as f64 + 1.0) / 2.0;
    Ok(WilcoxonResult { statistic: w_plus.min(total - w_plus), w_plus, n, p_value, exact })
}

/// `min(1, p * m)`.
pub fn bonferroni(p: f64, m: usize) -> f64 {
    (p * m.max(1) as f64).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(diffs: &[f64]) -> Vec<(f64, f64)> {
        diffs.iter().map(|d| (0.0, *d)).collect()
    }

    #[test]
    fn all_same_sign() {
        let r = wilcoxon_signed_rank(&pairs(&[1.0, 2.0, 3.0, 4.0, 5.0])).unwrap();
        assert!((r.p_value - 0.0625).abs() < 1e-15);
        assert_eq!(r.statistic, 0.0);
        assert!(r.exact);
    }

    #[test]
    fn single_pair() {
        assert_eq!(wilcoxon_signed_rank(&[(0.2, 0.7)]).unwrap().p_value, 1.0);
    }

    #[test]
    fn zeros_dropped_or_rejected() {
        assert_eq!(wilcoxon_signed_rank(&pairs(&[0.0, 0.0])), Err(StatsError::AllZeroDifferences));
        let r = wilcoxon_signed_rank(&pairs(&[0.0, 1.0, 2.0])).unwrap();
        assert_eq!(r.n, 2);
    }

    #[test]
    fn tied_ranks_average() {
        assert_eq!(signed_ranks(&[1.0, -1.0, 3.0, 2.0]), [1.5, 1.5, 4.0, 3.0]);
    }

    #[test]
    fn ties_in_exact_distribution() {
        // Ranks 1.5, 1.5, 3; sign patterns give W+ in {0,1.5,1.5,3,3,4.5,4.5,6}.
        let (p, w) = exact_p_value(&[1.0, 1.0, 2.0]).unwrap();
        assert_eq!(w, 6.0);
        assert!((p - 0.25).abs() < 1e-15);
    }

    #[test]
    fn bonferroni_cases() {
        assert!((bonferroni(0.01, 4) - 0.04).abs() < 1e-15);
        assert_eq!(bonferroni(0.5, 4), 1.0);
        assert_eq!(bonferroni(0.123, 1), 0.123);
    }
}
