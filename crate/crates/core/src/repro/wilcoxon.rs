use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::stats::normal_sf;

/// Largest number of nonzero differences handled by exact enumeration under
/// [`WilcoxonMethod::Auto`].
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WilcoxonMethod {
    /// Exact for n <= 25, normal approximation above.
    #[default]
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonResult {
    /// Sum of ranks of positive differences (x - y > 0).
    pub w_plus: f64,
    pub w_minus: f64,
    pub p_two_sided: f64,
    /// Nonzero differences used.
    pub n: usize,
    pub method: WilcoxonMethod,
    /// Every difference was zero; `p_two_sided` is 1.
    pub all_zero: bool,
}

impl WilcoxonResult {
    /// The conventional statistic min(W+, W-).
    pub fn statistic(&self) -> f64 {
        self.w_plus.min(self.w_minus)
    }
}

/// Paired two-sided Wilcoxon signed-rank test of `x - y`.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<WilcoxonResult> {
    wilcoxon_signed_rank_with(x, y, WilcoxonMethod::Auto)
}

pub fn wilcoxon_signed_rank_with(
    x: &[f64],
    y: &[f64],
    method: WilcoxonMethod,
) -> Result<WilcoxonResult> {
    if x.len() != y.len() {
        return Err(Error::Argument(format!(
            "paired series lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Argument(
            "paired series contain missing or non-finite values".into(),
        ));
    }
    let mut d: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .filter(|v| *v != 0.0)
        .collect();
    let n = d.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            w_plus: 0.0,
            w_minus: 0.0,
            p_two_sided: 1.0,
            n: 0,
            method,
            all_zero: true,
        });
    }
    d.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    // doubled mid-ranks are integers
    let mut rank2 = vec![0u64; n];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && d[j].abs() == d[i].abs() {
            j += 1;
        }
        let r2 = (i + 1 + j) as u64; // (i+1 + j) = 2 * mean rank
        rank2[i..j].iter_mut().for_each(|r| *r = r2);
        ties.push(j - i);
        i = j;
    }
    let w_plus2: u64 = d
        .iter()
        .zip(&rank2)
        .filter(|(v, _)| **v > 0.0)
        .map(|(_, r)| r)
        .sum();
    let total2: u64 = rank2.iter().sum();
    let w_plus = w_plus2 as f64 / 2.0;
    let w_minus = (total2 - w_plus2) as f64 / 2.0;

    let method = match method {
        WilcoxonMethod::Auto if n <= EXACT_MAX_N => WilcoxonMethod::Exact,
        WilcoxonMethod::Auto => WilcoxonMethod::Normal,
        m => m,
    };
    let p = match method {
        WilcoxonMethod::Exact => exact_p(&rank2, w_plus2),
        _ => normal_p(n, &ties, w_plus),
    };
    Ok(WilcoxonResult {
        w_plus,
        w_minus,
        p_two_sided: p.min(1.0),
        n,
        method,
        all_zero: false,
    })
}

/// Enumerates the null distribution of the doubled W+ over all 2^n sign
/// assignments by dynamic programming.
fn exact_p(rank2: &[u64], observed2: u64) -> f64 {
    let total: u64 = rank2.iter().sum();
    let mut counts = vec![0.0f64; total as usize + 1];
    counts[0] = 1.0;
    let mut reach = 0usize;
    for &r in rank2 {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let all: f64 = counts.iter().sum();
    let lower: f64 = counts[..=observed2 as usize].iter().sum::<f64>() / all;
    let upper: f64 = counts[observed2 as usize..].iter().sum::<f64>() / all;
    2.0 * lower.min(upper)
}

fn normal_p(n: usize, ties: &[usize], w_plus: f64) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    2.0 * normal_sf(z)
}
