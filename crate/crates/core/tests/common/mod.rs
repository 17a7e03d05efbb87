//! Dense reference implementations used as independent oracles.
#![allow(dead_code)]

use std::collections::HashMap;

/// All compositions of `size` into `n` parts, in no particular order.
pub fn compositions(n: usize, size: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![size]];
    }
    let mut out = Vec::new();
    for first in 0..=size {
        for mut rest in compositions(n - 1, size - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Dense transition matrix written straight from the birth-death rule,
/// indexed by `states` order. `phi` maps a population distribution to an
/// incentive vector; mutation is uniform with rate `mu`.
pub fn dense_kernel(
    states: &[Vec<u32>],
    phi: impl Fn(&[f64]) -> Vec<f64>,
    mu: f64,
) -> Vec<Vec<f64>> {
    let index: HashMap<&[u32], usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let n = states[0].len();
    let size: u32 = states[0].iter().sum();
    let mut t = vec![vec![0.0; states.len()]; states.len()];
    for (i, s) in states.iter().enumerate() {
        let x: Vec<f64> = s.iter().map(|&c| c as f64 / size as f64).collect();
        let w = phi(&x);
        let total: f64 = w.iter().sum();
        let parent: Vec<f64> = w.iter().map(|v| v / total).collect();
        let p: Vec<f64> = (0..n)
            .map(|child| {
                (0..n)
                    .map(|k| {
                        let m = if k == child { 1.0 - mu } else { mu / (n - 1) as f64 };
                        parent[k] * m
                    })
                    .sum()
            })
            .collect();
        let mut out = 0.0;
        for j in 0..n {
            for k in 0..n {
                if j != k && s[k] > 0 {
                    let mut b = s.clone();
                    b[j] += 1;
                    b[k] -= 1;
                    let prob = p[j] * x[k];
                    t[i][index[b.as_slice()]] += prob;
                    out += prob;
                }
            }
        }
        t[i][i] += 1.0 - out;
    }
    t
}

/// Solves `s (T - I) = 0`, `sum s = 1` by Gaussian elimination with partial
/// pivoting.
#[allow(clippy::needless_range_loop)]
pub fn dense_stationary(t: &[Vec<f64>]) -> Vec<f64> {
    let m = t.len();
    // rows: equations; unknowns s_0..s_{m-1}
    let mut a = vec![vec![0.0; m + 1]; m];
    for eq in 0..m - 1 {
        for (i, row) in t.iter().enumerate() {
            a[eq][i] = row[eq] - if i == eq { 1.0 } else { 0.0 };
        }
    }
    for v in a[m - 1].iter_mut().take(m) {
        *v = 1.0;
    }
    a[m - 1][m] = 1.0;
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=m {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    (0..m).map(|i| a[i][m] / a[i][i]).collect()
}

pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>()
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn multinomial(counts: &[u32]) -> f64 {
    let size: u32 = counts.iter().sum();
    let mut out = 1.0;
    let mut used = 0;
    for &c in counts {
        for i in 1..=c {
            used += 1;
            out *= used as f64 / i as f64;
        }
    }
    debug_assert_eq!(used, size);
    out
}

/// Dirichlet-multinomial weights evaluated with plain products.
pub fn dirichlet_multinomial(counts: &[u32], alpha: f64) -> f64 {
    let n = counts.len() as f64;
    let size: u32 = counts.iter().sum();
    let rising = |x: f64, y: u32| (0..y).map(|i| x + i as f64).product::<f64>();
    multinomial(counts) * counts.iter().map(|&c| rising(alpha, c)).product::<f64>()
        / rising(n * alpha, size)
}
