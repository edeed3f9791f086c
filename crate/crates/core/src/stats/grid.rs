use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::design::{ColumnKind, Design, RegressionSpec};
use super::logistic::{fit_ridge_logistic, log_likelihood, lr_statistic, null_log_likelihood, FitOptions};
use super::StatsError;

/// Seven log-spaced weights from 1e-3 to 1e3.
pub const DEFAULT_L2_GRID: [f64; 7] = [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub l2: f64,
    pub train_log_likelihood: f64,
    pub test_log_likelihood: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub kind: ColumnKind,
    pub beta: f64,
    pub standard_error: Option<f64>,
    pub p_value: Option<f64>,
    pub p_adjusted: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub coefficients: Vec<Coefficient>,
    pub chosen_l2: f64,
    pub grid: Vec<GridPoint>,
    /// Holdout fit at the chosen weight.
    pub train_log_likelihood: f64,
    pub test_log_likelihood: f64,
    /// Refit on every observation at the chosen weight.
    pub log_likelihood: f64,
    pub null_log_likelihood: f64,
    pub lr_statistic: f64,
    pub n_observations: usize,
    pub n_dropped: usize,
    pub family_size: usize,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    /// Variable, estimate, standard error and a star at adjusted p < 0.01.
    /// Fixed-effect rows are left out.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("variable\tbeta\tse\tsignificant\n");
        for c in self.coefficients.iter().filter(|c| !c.kind.is_fixed_effect()) {
            let se = c.standard_error.map_or_else(|| "NA".into(), |s| format!("{s:.3}"));
            let star = if c.p_adjusted.is_some_and(|p| p < 0.01) { "*" } else { "" };
            let _ = writeln!(out, "{}\t{:.3}\t{se}\t{star}", c.name, c.beta);
        }
        let _ = writeln!(out, "#n\t{}", self.n_observations);
        let _ = writeln!(out, "#l2\t{}", self.chosen_l2);
        let _ = writeln!(out, "#lr_statistic\t{:.3}", self.lr_statistic);
        out
    }
}

/// Deterministic split stratified by outcome: `round(fraction * count)` of
/// each outcome class goes to the test side. Both index lists are sorted.
pub fn holdout_split(y: &[f64], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| (y[i] > 0.5) == class).collect();
        idx.shuffle(&mut rng);
        let k = (fraction * idx.len() as f64).round() as usize;
        test.extend_from_slice(&idx[..k]);
        train.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Picks the L2 weight with the best held-out log-likelihood, then refits on
/// all observations. Ties go to the smaller weight.
pub fn grid_search_l2(design: &Design, spec: &RegressionSpec) -> Result<RegressionResult, StatsError> {
    spec.validate()?;
    let mut grid = spec.l2_grid.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let (train_idx, test_idx) = holdout_split(&design.y, spec.test_fraction, spec.seed);
    let train = design.subset(&train_idx);
    let test = design.subset(&test_idx);
    let quick = FitOptions { standard_errors: false, ..FitOptions::default() };
    let points: Vec<(GridPoint, Vec<f64>)> = grid
        .par_iter()
        .map(|&l2| {
            let fit = fit_ridge_logistic(&train, l2, &quick)?;
            let point = GridPoint { l2, train_log_likelihood: fit.log_likelihood, test_log_likelihood: log_likelihood(&test, &fit.beta) };
            Ok((point, fit.beta))
        })
        .collect::<Result<_, StatsError>>()?;
    let best = points
        .iter()
        .enumerate()
        .fold(0, |best, (i, (p, _))| if p.test_log_likelihood > points[best].0.test_log_likelihood { i } else { best });
    let chosen = points[best].0.clone();
    let full = fit_ridge_logistic(design, chosen.l2, &FitOptions::default())?;
    let coefficients = design
        .columns
        .iter()
        .enumerate()
        .map(|(j, c)| Coefficient {
            name: c.name.clone(),
            kind: c.kind,
            beta: full.beta[j],
            standard_error: full.standard_errors[j],
            p_value: full.p_values[j],
            p_adjusted: full.p_adjusted[j],
        })
        .collect();
    Ok(RegressionResult {
        coefficients,
        chosen_l2: chosen.l2,
        train_log_likelihood: chosen.train_log_likelihood,
        test_log_likelihood: chosen.test_log_likelihood,
        grid: points.into_iter().map(|(p, _)| p).collect(),
        log_likelihood: full.log_likelihood,
        null_log_likelihood: null_log_likelihood(&design.y),
        lr_statistic: lr_statistic(full.log_likelihood, &design.y),
        n_observations: design.n_rows(),
        n_dropped: design.dropped,
        family_size: full.family_size,
    })
}
