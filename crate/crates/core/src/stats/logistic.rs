use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::design::Design;
use super::wilcoxon::bonferroni;
use super::StatsError;

/// Fits with more columns than this get standard errors for the non-fixed-
/// effect coefficients only.
pub const FULL_SE_MAX_COLUMNS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
    pub standard_errors: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { gradient_tolerance: 1e-8, max_iterations: 200, standard_errors: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub lambda: f64,
    pub beta: Vec<f64>,
    pub standard_errors: Vec<Option<f64>>,
    pub p_values: Vec<Option<f64>>,
    pub p_adjusted: Vec<Option<f64>>,
    /// Coefficients counted in the Bonferroni family.
    pub family_size: usize,
    /// Unpenalized Bernoulli log-likelihood at `beta`.
    pub log_likelihood: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub fn log_likelihood(design: &Design, beta: &[f64]) -> f64 {
    (0..design.n_rows())
        .map(|i| {
            let eta = design.row_dot(i, beta);
            design.y[i] * eta - softplus(eta)
        })
        .sum()
}

fn penalty(design: &Design, beta: &[f64], lambda: f64) -> f64 {
    lambda * design.columns.iter().zip(beta).filter(|(c, _)| c.penalized).map(|(_, b)| b * b).sum::<f64>()
}

/// `LL(beta) - lambda * sum of squared penalized coefficients`.
pub fn penalized_log_likelihood(design: &Design, beta: &[f64], lambda: f64) -> f64 {
    log_likelihood(design, beta) - penalty(design, beta, lambda)
}

/// Gradient of [`penalized_log_likelihood`].
pub fn penalized_gradient(design: &Design, beta: &[f64], lambda: f64) -> Vec<f64> {
    let resid: Vec<f64> = (0..design.n_rows()).map(|i| design.y[i] - sigmoid(design.row_dot(i, beta))).collect();
    let mut g = design.mul_transpose(&resid);
    for ((gj, c), b) in g.iter_mut().zip(&design.columns).zip(beta) {
        if c.penalized {
            *gj -= 2.0 * lambda * b;
        }
    }
    g
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Curvature of the negative penalized log-likelihood at fixed weights.
struct Hessian<'a> {
    design: &'a Design,
    weights: Vec<f64>,
    ridge: Vec<f64>,
}

impl<'a> Hessian<'a> {
    fn new(design: &'a Design, beta: &[f64], lambda: f64) -> Self {
        let weights = (0..design.n_rows())
            .map(|i| {
                let p = sigmoid(design.row_dot(i, beta));
                p * (1.0 - p)
            })
            .collect();
        let ridge = design.columns.iter().map(|c| if c.penalized { 2.0 * lambda } else { 0.0 }).collect();
        Hessian { design, weights, ridge }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let xv: Vec<f64> = self.design.mul(v).iter().zip(&self.weights).map(|(a, w)| a * w).collect();
        let mut out = self.design.mul_transpose(&xv);
        for ((o, r), vj) in out.iter_mut().zip(&self.ridge).zip(v) {
            *o += r * vj;
        }
        out
    }

    fn diagonal(&self) -> Vec<f64> {
        let mut d = self.ridge.clone();
        for i in 0..self.design.n_rows() {
            let (idx, val) = self.design.row(i);
            for (&j, x) in idx.iter().zip(val) {
                d[j as usize] += self.weights[i] * x * x;
            }
        }
        d
    }

    /// Jacobi-preconditioned conjugate gradients for `H x = b`.
    fn solve(&self, b: &[f64], precond: &[f64], rel_tol: f64, max_iter: usize) -> Vec<f64> {
        let inv: Vec<f64> = precond.iter().map(|d| if *d > 0.0 { 1.0 / d } else { 1.0 }).collect();
        let mut x = vec![0.0; b.len()];
        let mut r = b.to_vec();
        let target = rel_tol * norm(b);
        let mut z: Vec<f64> = r.iter().zip(&inv).map(|(a, m)| a * m).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        for _ in 0..max_iter {
            if norm(&r) <= target {
                break;
            }
            let hp = self.apply(&p);
            let php = dot(&p, &hp);
            if php <= 0.0 || !php.is_finite() {
                break;
            }
            let alpha = rz / php;
            for j in 0..x.len() {
                x[j] += alpha * p[j];
                r[j] -= alpha * hp[j];
            }
            z = r.iter().zip(&inv).map(|(a, m)| a * m).collect();
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for j in 0..p.len() {
                p[j] = z[j] + beta * p[j];
            }
        }
        x
    }
}

/// Maximizes the ridge-penalized Bernoulli log-likelihood by Newton's method
/// with conjugate-gradient steps and backtracking.
///
/// Standard errors come from the inverse penalized information at the
/// optimum. Wald p-values are two-sided; the Bonferroni family is every
/// coefficient that is neither the intercept nor a fixed effect.
pub fn fit_ridge_logistic(design: &Design, lambda: f64, options: &FitOptions) -> Result<Fit, StatsError> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(StatsError::InvalidSpec(format!("L2 weight {lambda} is not a finite non-negative number")));
    }
    let n = design.n_rows();
    let p = design.n_cols();
    if n == 0 || p == 0 {
        return Err(StatsError::EmptyDesign);
    }
    let positives = design.y.iter().filter(|y| **y > 0.5).count();
    let constant = positives == 0 || positives == n;
    if constant && (lambda == 0.0 || design.columns.iter().any(|c| !c.penalized)) {
        return Err(StatsError::DegenerateOutcome);
    }

    let mut beta = vec![0.0; p];
    let mut objective = -penalized_log_likelihood(design, &beta, lambda);
    let mut iterations = 0;
    let mut gradient: Vec<f64> = penalized_gradient(design, &beta, lambda);
    let mut gnorm = norm(&gradient);
    while gnorm >= options.gradient_tolerance {
        if iterations == options.max_iterations {
            return Err(StatsError::Nonconvergence { iterations, gradient_norm: gnorm });
        }
        iterations += 1;
        let h = Hessian::new(design, &beta, lambda);
        let forcing = gnorm.sqrt().clamp(1e-12, 0.1);
        // Ascent direction: H s = gradient of the log-likelihood.
        let step = h.solve(&gradient, &h.diagonal(), forcing, 10 * p + 100);
        let slope = -dot(&gradient, &step);
        let step = if slope < 0.0 { step } else { gradient.clone() };
        let slope = -dot(&gradient, &step);
        let slack = 64.0 * f64::EPSILON * (objective.abs() + 1.0);
        let mut t = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = beta.iter().zip(&step).map(|(b, s)| b + t * s).collect();
            let f = -penalized_log_likelihood(design, &trial, lambda);
            if f.is_finite() && f <= objective + 1e-4 * t * slope + slack {
                break Some((trial, f));
            }
            t *= 0.5;
            if t < 1e-12 {
                break None;
            }
        };
        let Some((next, f)) = accepted else {
            return Err(StatsError::Nonconvergence { iterations, gradient_norm: gnorm });
        };
        beta = next;
        objective = f;
        gradient = penalized_gradient(design, &beta, lambda);
        gnorm = norm(&gradient);
    }

    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let family: Vec<bool> = design
        .columns
        .iter()
        .map(|c| c.kind != super::ColumnKind::Intercept && !c.kind.is_fixed_effect())
        .collect();
    let family_size = family.iter().filter(|f| **f).count();
    let mut standard_errors = vec![None; p];
    if options.standard_errors {
        let h = Hessian::new(design, &beta, lambda);
        let diag = h.diagonal();
        for j in 0..p {
            if p > FULL_SE_MAX_COLUMNS && design.columns[j].kind.is_fixed_effect() {
                continue;
            }
            let mut e = vec![0.0; p];
            e[j] = 1.0;
            let col = h.solve(&e, &diag, 1e-10, 20 * p + 200);
            let var = col[j];
            if var.is_finite() && var > 0.0 {
                standard_errors[j] = Some(var.sqrt());
            }
        }
    }
    let p_values: Vec<Option<f64>> = standard_errors
        .iter()
        .zip(&beta)
        .map(|(se, b)| se.map(|s| (2.0 * normal.cdf(-(b / s).abs())).min(1.0)))
        .collect();
    let p_adjusted = p_values
        .iter()
        .zip(&family)
        .map(|(pv, in_family)| pv.map(|v| if *in_family { bonferroni(v, family_size) } else { v }))
        .collect();
    Ok(Fit {
        lambda,
        log_likelihood: log_likelihood(design, &beta),
        beta,
        standard_errors,
        p_values,
        p_adjusted,
        family_size,
        iterations,
        gradient_norm: gnorm,
    })
}

/// Log-likelihood of the intercept-only model at its maximum.
pub fn null_log_likelihood(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let k = y.iter().filter(|v| **v > 0.5).count() as f64;
    let term = |c: f64| if c > 0.0 { c * (c / n).ln() } else { 0.0 };
    term(k) + term(n - k)
}

/// `2 (LL_full - LL_null)`, floored at zero.
pub fn lr_statistic(full_log_likelihood: f64, y: &[f64]) -> f64 {
    (2.0 * (full_log_likelihood - null_log_likelihood(y))).max(0.0)
}
