use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use super::Outcome;
use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::stats::normal_sf;

pub const MAX_ITERATIONS: usize = 100;
const SCORE_TOL: f64 = 1e-8;
const LOGLIK_REL_TOL: f64 = 1e-10;
const MAX_HALVINGS: usize = 40;

/// Log partial likelihood with its gradient and observed information at a
/// coefficient vector.
#[derive(Debug, Clone)]
pub struct PartialLikelihood {
    pub log_likelihood: f64,
    pub score: Vec<f64>,
    pub information: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoxModel {
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub p_values: Vec<f64>,
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Log-likelihood after every accepted step, starting at beta = 0.
    pub trace: Vec<f64>,
}

impl CoxModel {
    /// Linear predictor `x . beta` for each row.
    pub fn risk(&self, x: &Matrix) -> Vec<f64> {
        (0..x.rows())
            .map(|r| {
                x.row(r)
                    .iter()
                    .zip(&self.coefficients)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

/// Efron-tie-corrected partial likelihood.
pub fn efron_partial_likelihood(
    x: &Matrix,
    outcomes: &[Outcome],
    beta: &[f64],
) -> Result<PartialLikelihood> {
    let (n, p) = (x.rows(), x.cols());
    if outcomes.len() != n || beta.len() != p {
        return Err(Error::Argument(format!(
            "design {n}x{p} does not match {} outcomes and {} coefficients",
            outcomes.len(),
            beta.len()
        )));
    }
    let eta: Vec<f64> = (0..n)
        .map(|r| x.row(r).iter().zip(beta).map(|(a, b)| a * b).sum())
        .collect();
    let shift = eta
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let w: Vec<f64> = eta.iter().map(|e| (e - shift).exp()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| outcomes[b].time.total_cmp(&outcomes[a].time));

    let mut ll = 0.0;
    let mut score = vec![0.0; p];
    let mut info = Matrix::zeros(p, p);
    let (mut s0, mut s1, mut s2) = (0.0, vec![0.0; p], vec![0.0; p * p]);
    let (mut d1, mut d2) = (vec![0.0; p], vec![0.0; p * p]);
    let mut i = 0;
    while i < n {
        let t = outcomes[order[i]].time;
        let mut j = i;
        while j < n && outcomes[order[j]].time == t {
            j += 1;
        }
        let mut d = 0usize;
        let mut d0 = 0.0;
        d1.iter_mut().for_each(|v| *v = 0.0);
        d2.iter_mut().for_each(|v| *v = 0.0);
        for &s in &order[i..j] {
            let row = x.row(s);
            s0 += w[s];
            for a in 0..p {
                s1[a] += w[s] * row[a];
                for b in 0..p {
                    s2[a * p + b] += w[s] * row[a] * row[b];
                }
            }
            if outcomes[s].event {
                d += 1;
                d0 += w[s];
                ll += eta[s];
                for a in 0..p {
                    score[a] += row[a];
                    d1[a] += w[s] * row[a];
                    for b in 0..p {
                        d2[a * p + b] += w[s] * row[a] * row[b];
                    }
                }
            }
        }
        for r in 0..d {
            let f = r as f64 / d as f64;
            let den = s0 - f * d0;
            ll -= den.ln() + shift;
            for a in 0..p {
                let va = (s1[a] - f * d1[a]) / den;
                score[a] -= va;
                for b in 0..p {
                    let vb = (s1[b] - f * d1[b]) / den;
                    info.add(a, b, (s2[a * p + b] - f * d2[a * p + b]) / den - va * vb);
                }
            }
        }
        i = j;
    }
    Ok(PartialLikelihood {
        log_likelihood: ll,
        score,
        information: info,
    })
}

/// Fits a Cox proportional-hazards model by damped Newton iterations on the
/// Efron partial likelihood. Columns are centered internally; coefficients
/// refer to the columns as given.
///
/// Converged when the largest absolute score drops below 1e-8 or the relative
/// log-likelihood change below 1e-10. A singular information matrix yields
/// [`Error::Collinear`] naming the offending columns.
pub fn cox_fit(x: &Matrix, outcomes: &[Outcome]) -> Result<CoxModel> {
    let (n, p) = (x.rows(), x.cols());
    if outcomes.len() != n {
        return Err(Error::Argument(format!(
            "{n} rows for {} outcomes",
            outcomes.len()
        )));
    }
    if p == 0 {
        return Err(Error::Argument("no covariates".into()));
    }
    if (0..n).any(|r| x.row(r).iter().any(|v| !v.is_finite())) {
        return Err(Error::Argument(
            "design matrix contains missing or non-finite values".into(),
        ));
    }
    if !outcomes.iter().any(|o| o.event) {
        return Err(Error::Undefined("no events".into()));
    }
    let mut xc = x.clone();
    let mut constant = Vec::new();
    for c in 0..p {
        let col = x.column(c);
        let mean = col.iter().sum::<f64>() / n as f64;
        if col.iter().all(|v| *v == col[0]) {
            constant.push(c);
        }
        for r in 0..n {
            xc.set(r, c, x.get(r, c) - mean);
        }
    }
    if !constant.is_empty() {
        return Err(Error::Collinear(constant));
    }

    let mut beta = vec![0.0; p];
    let mut pl = efron_partial_likelihood(&xc, outcomes, &beta)?;
    let mut trace = vec![pl.log_likelihood];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        if pl.score.iter().all(|g| g.abs() < SCORE_TOL) {
            converged = true;
            break;
        }
        iterations += 1;
        let chol = Cholesky::new(&pl.information).map_err(|j| Error::Collinear(vec![j]))?;
        let delta = chol.solve(&pl.score);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = beta.iter().zip(&delta).map(|(b, d)| b + step * d).collect();
            let next = efron_partial_likelihood(&xc, outcomes, &trial)?;
            if next.log_likelihood.is_finite() && next.log_likelihood >= pl.log_likelihood {
                accepted = Some((trial, next));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, next)) = accepted else { break };
        let change =
            (next.log_likelihood - pl.log_likelihood).abs() / pl.log_likelihood.abs().max(1e-300);
        beta = trial;
        pl = next;
        trace.push(pl.log_likelihood);
        if change < LOGLIK_REL_TOL {
            converged = true;
            break;
        }
    }
    let inv = Cholesky::new(&pl.information)
        .map_err(|j| Error::Collinear(vec![j]))?
        .inverse();
    let standard_errors: Vec<f64> = (0..p).map(|c| inv.get(c, c).max(0.0).sqrt()).collect();
    let p_values = beta
        .iter()
        .zip(&standard_errors)
        .map(|(b, se)| {
            if *se > 0.0 {
                (2.0 * normal_sf((b / se).abs())).min(1.0)
            } else {
                1.0
            }
        })
        .collect();
    Ok(CoxModel {
        coefficients: beta,
        standard_errors,
        p_values,
        log_likelihood: pl.log_likelihood,
        converged,
        iterations,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(cols: &[&[f64]]) -> Matrix {
        let n = cols[0].len();
        let mut m = Matrix::zeros(n, cols.len());
        for (c, col) in cols.iter().enumerate() {
            for r in 0..n {
                m.set(r, c, col[r]);
            }
        }
        m
    }

    fn outcomes(times: &[f64], events: &[bool]) -> Vec<Outcome> {
        times
            .iter()
            .zip(events)
            .map(|(&time, &event)| Outcome { time, event })
            .collect()
    }

    #[test]
    fn constant_column_is_collinear() {
        let x = design(&[&[1.0, 2.0, 3.0, 4.0], &[5.0; 4]]);
        let o = outcomes(&[1.0, 2.0, 3.0, 4.0], &[true; 4]);
        assert_eq!(cox_fit(&x, &o).unwrap_err(), Error::Collinear(vec![1]));
    }

    #[test]
    fn duplicated_column_is_collinear() {
        let a = [0.3, -1.0, 2.0, 0.5, 1.5, -0.7];
        let x = design(&[&a, &[1.0, 0.0, 1.0, 1.0, 0.0, 0.0], &a]);
        let o = outcomes(
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            &[true, false, true, true, true, false],
        );
        assert_eq!(cox_fit(&x, &o).unwrap_err(), Error::Collinear(vec![2]));
    }

    #[test]
    fn efron_reduces_to_breslow_without_ties() {
        // two subjects, one event: ll = eta_0 - log(e^eta_0 + e^eta_1)
        let x = design(&[&[1.0, 0.0]]);
        let o = outcomes(&[1.0, 2.0], &[true, false]);
        let pl = efron_partial_likelihood(&x, &o, &[0.7]).unwrap();
        let want = 0.7 - (0.7f64.exp() + 1.0).ln();
        assert!((pl.log_likelihood - want).abs() < 1e-14);
    }

    #[test]
    fn efron_tie_term() {
        // two tied events, one later censored subject, beta = 0:
        // ll = -log(3) - log(3 - 1) = -log 6
        let x = design(&[&[0.0, 1.0, 2.0]]);
        let o = outcomes(&[1.0, 1.0, 2.0], &[true, true, false]);
        let pl = efron_partial_likelihood(&x, &o, &[0.0]).unwrap();
        assert!((pl.log_likelihood + 6f64.ln()).abs() < 1e-14);
    }
}
