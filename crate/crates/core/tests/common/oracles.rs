//! Brute-force references for the survival and Pareto routines, written
//! from the definitions by pair enumeration and full recomputation.

#![allow(dead_code)]

use radrepro_core::linalg::Matrix;
use radrepro_core::survival::Outcome;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal};

pub fn dominates(q: (f64, f64), p: (f64, f64)) -> bool {
    q.0 >= p.0 && q.1 >= p.1 && (q.0 > p.0 || q.1 > p.1)
}

pub fn brute_front(p: &[(f64, f64)]) -> Vec<usize> {
    (0..p.len())
        .filter(|&i| !p.iter().any(|&q| dominates(q, p[i])))
        .collect()
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    let coarse = rng.random_bool(0.5);
    (0..n)
        .map(|_| {
            if coarse {
                (
                    rng.random_range(0..20) as f64 / 20.0,
                    rng.random_range(0..20) as f64 / 20.0,
                )
            } else {
                (rng.random::<f64>(), rng.random::<f64>())
            }
        })
        .collect()
}

pub fn brute_cindex(risk: &[f64], o: &[Outcome]) -> Option<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..o.len() {
        for j in 0..o.len() {
            if o[i].event && o[i].time < o[j].time {
                den += 1.0;
                if risk[i] > risk[j] {
                    num += 1.0;
                } else if risk[i] == risk[j] {
                    num += 0.5;
                }
            }
        }
    }
    (den > 0.0).then(|| num / den)
}

pub fn censored(rng: &mut ChaCha8Rng, n: usize, coarse: bool) -> (Vec<f64>, Vec<Outcome>) {
    let risk: Vec<f64> = (0..n)
        .map(|_| {
            if coarse {
                rng.random_range(0..5) as f64
            } else {
                rng.sample(StandardNormal)
            }
        })
        .collect();
    let o = risk
        .iter()
        .map(|r: &f64| {
            let t: f64 = rng.sample(Exp::new((0.5 * r).exp()).unwrap());
            let c: f64 = rng.random_range(0.0..2.0);
            let time = if coarse {
                (t.min(c) * 4.0).ceil()
            } else {
                t.min(c) + 1e-9
            };
            Outcome {
                time: time.max(1e-6),
                event: t <= c,
            }
        })
        .collect();
    (risk, o)
}

/// Greedy recurrence recomputed from scratch at every step.
pub fn mrmr_oracle(cols: &[Vec<f64>], rel: &[f64], ids: &[usize], k: usize) -> Vec<usize> {
    fn corr(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        if va == 0.0 || vb == 0.0 {
            0.0
        } else {
            cov / (va * vb).sqrt()
        }
    }
    let mut chosen: Vec<usize> = Vec::new();
    while chosen.len() < k.min(cols.len()) {
        let mut scored: Vec<(f64, usize)> = (0..cols.len())
            .filter(|f| !chosen.contains(f))
            .map(|f| {
                let red = if chosen.is_empty() {
                    0.0
                } else {
                    chosen
                        .iter()
                        .map(|&s| corr(&cols[f], &cols[s]).abs())
                        .sum::<f64>()
                        / chosen.len() as f64
                };
                (rel[f] - red, f)
            })
            .collect();
        scored.sort_by(|a, b| {
            if (a.0 - b.0).abs() > 1e-12 {
                b.0.total_cmp(&a.0)
            } else {
                rel[b.1].total_cmp(&rel[a.1]).then(ids[a.1].cmp(&ids[b.1]))
            }
        });
        chosen.push(scored[0].1);
    }
    chosen
}

/// Up to 8 correlated candidates (sometimes with an exact duplicate),
/// k <= 4 and reversed tie-break ids.
pub fn mrmr_instance(rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<f64>, Vec<usize>, usize) {
    let m = rng.random_range(1..=8);
    let k = rng.random_range(1..=4);
    let n = rng.random_range(5..30);
    let base: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mut cols: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let w: f64 = rng.random_range(-1.0..1.0);
            base.iter()
                .map(|b| w * b + rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    if m > 2 && rng.random_bool(0.3) {
        cols[m - 1] = cols[0].clone();
    }
    let rel: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..0.5)).collect();
    let ids: Vec<usize> = (0..m).rev().collect();
    (cols, rel, ids, k)
}

/// Gaussian covariates with a 0.5 effect of the first; coarse times create
/// ties and administrative censoring at 1.4.
pub fn random_design(rng: &mut ChaCha8Rng, n: usize, p: usize) -> (Matrix, Vec<Outcome>) {
    let mut x = Matrix::zeros(n, p);
    for r in 0..n {
        for c in 0..p {
            x.set(r, c, rng.sample(StandardNormal));
        }
    }
    let o = (0..n)
        .map(|r| {
            let lp: f64 = 0.5 * x.get(r, 0);
            let t: f64 = rng.sample(Exp::new(lp.exp()).unwrap());
            let t = (t * 5.0).ceil() / 5.0;
            Outcome {
                time: t.min(1.4),
                event: t < 1.4,
            }
        })
        .collect();
    (x, o)
}
