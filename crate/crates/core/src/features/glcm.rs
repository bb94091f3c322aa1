//! Gray-level co-occurrence features (24).

use alloc::vec;
use alloc::vec::Vec;

use super::matrices::TextureMatrix;
use super::{defined, entropy2};
use crate::linalg::{symmetric_eigenvalues, Matrix};
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

/// Features of one co-occurrence matrix in registry order. An empty matrix
/// yields all-missing values.
pub fn glcm_features(m: &TextureMatrix) -> Vec<Option<f64>> {
    let ng = m.rows;
    let total = m.total();
    if total <= 0.0 {
        return vec![None; 24];
    }
    let p: Vec<f64> = m.data.iter().map(|v| v / total).collect();
    let at = |i: usize, j: usize| p[i * ng + j];
    let lv = |i: usize| (i + 1) as f64;

    let mut px = vec![0.0; ng];
    let mut py = vec![0.0; ng];
    let mut p_sum = vec![0.0; 2 * ng + 1]; // index k = i + j (levels), 2..=2ng
    let mut p_diff = vec![0.0; ng]; // index k = |i - j|
    for i in 0..ng {
        for j in 0..ng {
            let v = at(i, j);
            px[i] += v;
            py[j] += v;
            p_sum[i + j + 2] += v;
            p_diff[i.abs_diff(j)] += v;
        }
    }
    let ux: f64 = (0..ng).map(|i| lv(i) * px[i]).sum();
    let uy: f64 = (0..ng).map(|j| lv(j) * py[j]).sum();
    let sigx = (0..ng)
        .map(|i| (lv(i) - ux).powi(2) * px[i])
        .sum::<f64>()
        .sqrt();
    let sigy = (0..ng)
        .map(|j| (lv(j) - uy).powi(2) * py[j])
        .sum::<f64>()
        .sqrt();

    let mut autocorr = 0.0;
    let mut prominence = 0.0;
    let mut shade = 0.0;
    let mut tendency = 0.0;
    let mut contrast = 0.0;
    let mut energy = 0.0;
    let mut hxy = 0.0;
    let mut hxy1 = 0.0;
    let mut sum_squares = 0.0;
    let mut max_p: f64 = 0.0;
    for i in 0..ng {
        for j in 0..ng {
            let v = at(i, j);
            let (a, b) = (lv(i), lv(j));
            autocorr += a * b * v;
            let c = a + b - ux - uy;
            prominence += c.powi(4) * v;
            shade += c.powi(3) * v;
            tendency += c * c * v;
            contrast += (a - b) * (a - b) * v;
            energy += v * v;
            sum_squares += (a - ux) * (a - ux) * v;
            max_p = max_p.max(v);
            if v > 0.0 {
                hxy -= v * v.log2();
                hxy1 -= v * (px[i] * py[j]).log2();
            }
        }
    }
    let mut hxy2 = 0.0;
    for i in 0..ng {
        for j in 0..ng {
            let q = px[i] * py[j];
            if q > 0.0 {
                hxy2 -= q * q.log2();
            }
        }
    }
    let hx = entropy2(&px);
    let hy = entropy2(&py);

    let correlation = if sigx * sigy > 0.0 {
        defined((autocorr - ux * uy) / (sigx * sigy))
    } else {
        None
    };
    let diff_avg: f64 = p_diff.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
    let diff_var: f64 = p_diff
        .iter()
        .enumerate()
        .map(|(k, v)| (k as f64 - diff_avg).powi(2) * v)
        .sum();
    let hmax = hx.max(hy);
    let imc1 = if hmax > 0.0 {
        defined((hxy - hxy1) / hmax)
    } else {
        None
    };
    // hxy2 >= hxy; a gap at rounding level means independence, and the square
    // root would otherwise turn 1e-16 noise into 1e-8.
    let gap = hxy2 - hxy;
    let gap = if gap <= 1e-12 * hxy2.max(1.0) {
        0.0
    } else {
        gap
    };
    let imc2 = defined((1.0 - (-2.0 * gap).exp()).sqrt());
    let ngf = ng as f64;
    let idm: f64 = p_diff
        .iter()
        .enumerate()
        .map(|(k, v)| v / (1.0 + (k * k) as f64))
        .sum();
    let idmn: f64 = p_diff
        .iter()
        .enumerate()
        .map(|(k, v)| v / (1.0 + (k * k) as f64 / (ngf * ngf)))
        .sum();
    let id: f64 = p_diff
        .iter()
        .enumerate()
        .map(|(k, v)| v / (1.0 + k as f64))
        .sum();
    let idn: f64 = p_diff
        .iter()
        .enumerate()
        .map(|(k, v)| v / (1.0 + k as f64 / ngf))
        .sum();
    let inv_var: f64 = p_diff
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| v / (k * k) as f64)
        .sum();
    let sum_avg: f64 = p_sum.iter().enumerate().map(|(k, v)| k as f64 * v).sum();

    vec![
        Some(autocorr),
        Some(ux),
        Some(prominence),
        Some(shade),
        Some(tendency),
        Some(contrast),
        correlation,
        Some(diff_avg),
        Some(entropy2(&p_diff)),
        Some(diff_var),
        Some(energy),
        Some(hxy),
        imc1,
        imc2,
        Some(idm),
        mcc(&p, &px, &py, ng),
        Some(idmn),
        Some(id),
        Some(idn),
        Some(inv_var),
        Some(max_p),
        Some(sum_avg),
        Some(entropy2(&p_sum)),
        Some(sum_squares),
    ]
}

/// Maximal correlation coefficient: square root of the second largest
/// eigenvalue of `Q(i,k) = sum_j p(i,j) p(k,j) / (px(i) py(j))`, obtained from
/// the symmetric similar matrix `A A^T` with `A = Dx^-1/2 P Dy^-1/2`.
fn mcc(p: &[f64], px: &[f64], py: &[f64], ng: usize) -> Option<f64> {
    let rows: Vec<usize> = (0..ng).filter(|&i| px[i] > 0.0).collect();
    let cols: Vec<usize> = (0..ng).filter(|&j| py[j] > 0.0).collect();
    if rows.len() < 2 {
        return None;
    }
    let mut a = Matrix::zeros(rows.len(), cols.len());
    for (r, &i) in rows.iter().enumerate() {
        for (c, &j) in cols.iter().enumerate() {
            a.set(r, c, p[i * ng + j] / (px[i] * py[j]).sqrt());
        }
    }
    let n = rows.len();
    let mut b = Matrix::zeros(n, n);
    for r in 0..n {
        for s in r..n {
            let v: f64 = (0..cols.len()).map(|c| a.get(r, c) * a.get(s, c)).sum();
            b.set(r, s, v);
            b.set(s, r, v);
        }
    }
    let ev = symmetric_eigenvalues(&b);
    // eigenvalues lie in [0, 1]; below 1e-12 is rounding noise around zero
    let second = if ev[1] <= 1e-12 { 0.0 } else { ev[1] };
    defined(second.sqrt())
}
