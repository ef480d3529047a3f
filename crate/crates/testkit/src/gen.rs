//! Random instance generators.

use rand::Rng;

/// Probability vector with strictly positive entries.
pub fn probability<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

/// Possibility vector with strictly positive entries and one entry exactly 1.
pub fn possibility<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    let top = rng.random_range(0..n);
    v[top] = 1.0;
    v
}

pub fn probability_rows<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|_| probability(rng, cols)).collect()
}

pub fn possibility_rows<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|_| possibility(rng, cols)).collect()
}

/// Row-major `rows×cols` matrix with entries uniform in `[-scale, scale]`.
pub fn matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> Vec<f64> {
    (0..rows * cols).map(|_| rng.random_range(-scale..scale)).collect()
}

/// Row-major symmetric positive definite matrix `A Aᵀ + floor·I`.
pub fn spd<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64, floor: f64) -> Vec<f64> {
    let a = matrix(rng, n, n, scale);
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += a[i * n + k] * a[j * n + k];
            }
            out[i * n + j] = s + if i == j { floor } else { 0.0 };
        }
    }
    out
}
