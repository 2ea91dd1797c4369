#![allow(dead_code)]

use pindex_core::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Least squares through the normal equations, solved by Gaussian
/// elimination with partial pivoting. Returns `(coefficients, rss)`.
pub fn normal_equations(y: &[f64], cols: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let k = cols.len();
    let n = y.len();
    if k == 0 {
        return (vec![], y.iter().map(|v| v * v).sum());
    }
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = (0..n).map(|t| cols[i][t] * cols[j][t]).sum();
        }
        a[i][k] = (0..n).map(|t| cols[i][t] * y[t]).sum();
    }
    for c in 0..k {
        let p = (c..k)
            .max_by(|&u, &v| a[u][c].abs().total_cmp(&a[v][c].abs()))
            .unwrap();
        a.swap(c, p);
        for r in 0..k {
            if r != c {
                let f = a[r][c] / a[c][c];
                let pivot = a[c].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot).skip(c) {
                    *x -= f * p;
                }
            }
        }
    }
    let beta: Vec<f64> = (0..k).map(|i| a[i][k] / a[i][i]).collect();
    let rss = (0..n)
        .map(|t| {
            let fit: f64 = (0..k).map(|j| beta[j] * cols[j][t]).sum();
            (y[t] - fit).powi(2)
        })
        .sum();
    (beta, rss)
}

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// `n × p` Gaussian predictors and a response that loads on the first few.
pub fn random_subset_dataset(seed: u64, n: usize, p: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let preds: Vec<Vec<f64>> = (0..p).map(|_| normals(&mut rng, n)).collect();
    let mut y = normals(&mut rng, n);
    for (j, x) in preds.iter().enumerate() {
        let b = if j % 3 == 0 {
            1.0 / (1.0 + j as f64)
        } else {
            0.0
        };
        for t in 0..n {
            y[t] += 1.5 + b * x[t];
        }
    }
    let labels = (1..=p).map(|j| format!("x{j}")).collect();
    Dataset::from_predictors(y, preds, labels).unwrap()
}

/// Design columns (intercept first) for a subset mask with the intercept forced.
pub fn mask_columns(ds: &Dataset, mask: u64) -> Vec<Vec<f64>> {
    let mut cols = vec![ds.design().column(0).to_vec()];
    for b in 0..ds.predictor_count() {
        if mask >> b & 1 == 1 {
            cols.push(ds.design().column(b + 1).to_vec());
        }
    }
    cols
}

pub fn mask_terms(mask: u64) -> Vec<usize> {
    (0..64)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| b + 1)
        .collect()
}

/// Best RSS per size 1..=p by enumerating every mask.
pub fn brute_force_best(ds: &Dataset) -> Vec<(u64, f64)> {
    let p = ds.predictor_count();
    let mut best = vec![(0u64, f64::INFINITY); p + 1];
    for mask in 1u64..(1 << p) {
        let (_, rss) = normal_equations(ds.y(), &mask_columns(ds, mask));
        let s = mask.count_ones() as usize;
        if rss < best[s].1 {
            best[s] = (mask, rss);
        }
    }
    best
}
