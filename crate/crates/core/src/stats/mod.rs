//! Integration rates, paired domain comparisons and the fixed-effects ridge
//! logistic regression.

pub mod design;
pub mod grid;
pub mod logistic;
pub mod rates;
pub mod wilcoxon;

pub use design::{encode_design, Column, ColumnKind, Design, DesignRecord, RegressionSpec, RARE};
pub use grid::{grid_search_l2, holdout_split, Coefficient, GridPoint, RegressionResult, DEFAULT_L2_GRID};
pub use logistic::{
    fit_ridge_logistic, log_likelihood, lr_statistic, null_log_likelihood, penalized_gradient, penalized_log_likelihood, Fit,
    FitOptions,
};
pub use rates::{compare_domains, integration_rate, top_k_rate_table, ComparisonReport, ComparisonRow, RateRow, RateTable};
pub use wilcoxon::{bonferroni, wilcoxon_signed_rank, WilcoxonResult};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("integration rate undefined: no integrated or light uses")]
    UndefinedRate,
    #[error("all paired differences are zero")]
    AllZeroDifferences,
    #[error("the two corpora share no words with defined rates")]
    DisjointVocabulary,
    #[error("record {0} has no author profile")]
    MissingProfile(String),
    #[error("no usable observations")]
    EmptyDesign,
    #[error("outcome is constant, so the unpenalized model has no finite optimum")]
    DegenerateOutcome,
    #[error("invalid regression setting: {0}")]
    InvalidSpec(String),
    #[error("no convergence after {iterations} iterations (gradient norm {gradient_norm:e})")]
    Nonconvergence { iterations: usize, gradient_norm: f64 },
}
