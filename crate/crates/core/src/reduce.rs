//! Basis saturation and reduction helpers (crate-internal).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// Row basis of the ℤ-span of `rows` in Hermite normal form (pivots
/// positive, entries above each pivot reduced into `[0, pivot)`).
pub(crate) fn hermite_row_basis(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let Some(ncols) = rows.first().map(Vec::len) else {
        return rows;
    };
    let mut r0 = 0;
    for col in 0..ncols {
        loop {
            let piv = (r0..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let Some(piv) = piv else { break };
            rows.swap(r0, piv);
            let mut clean = true;
            for i in (r0 + 1)..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[r0][col]);
                let pivot_row = rows[r0].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                if !rows[i][col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if r0 < rows.len() && !rows[r0][col].is_zero() {
            if rows[r0][col].is_negative() {
                for x in rows[r0].iter_mut() {
                    *x = -&*x;
                }
            }
            let pivot_row = rows[r0].clone();
            for i in 0..r0 {
                let q = rows[i][col].div_floor(&pivot_row[col]);
                if !q.is_zero() {
                    for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                        *x -= &q * y;
                    }
                }
            }
            r0 += 1;
        }
    }
    rows.truncate(r0);
    rows
}

/// Result of reducing a Gram matrix: `gram = T · G · Tᵀ` with `T` unimodular.
#[derive(Debug, Clone)]
pub(crate) struct Reduced {
    pub gram: Vec<i64>,
    pub transform: Vec<Vec<i64>>,
}

/// LLL reduction (δ = 0.99) of a positive-definite integral Gram matrix.
///
/// Gram–Schmidt data is recomputed in `f64` from the exact Gram matrix; the
/// basis updates themselves are exact integer operations, so the output is
/// always a valid unimodular change of basis even if rounding makes the
/// reduction less than optimal.
pub(crate) fn lll_gram(gram: &[i64], n: usize) -> Reduced {
    const DELTA: f64 = 0.99;
    let mut g: Vec<i128> = gram.iter().map(|&x| i128::from(x)).collect();
    let mut t: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n <= 1 {
        return Reduced {
            gram: gram.to_vec(),
            transform: t,
        };
    }
    let mut mu = vec![0f64; n * n];
    let mut r = vec![0f64; n * n];
    let mut k = 1;
    let mut steps = 0usize;
    gso_rows(&g, n, 0, k, &mut mu, &mut r);
    while k < n {
        steps += 1;
        if steps > 200_000 {
            break;
        }
        for j in (0..k).rev() {
            let q = mu[k * n + j].round();
            if q != 0.0 {
                let q = q as i128;
                sub_row(&mut g, &mut t, n, k, j, q);
                gso_rows(&g, n, k, k, &mut mu, &mut r);
            }
        }
        let m = mu[k * n + k - 1];
        if r[k * n + k] < (DELTA - m * m) * r[(k - 1) * n + k - 1] {
            swap_rows(&mut g, &mut t, n, k, k - 1);
            k = (k - 1).max(1);
            gso_rows(&g, n, k - 1, k, &mut mu, &mut r);
        } else {
            k += 1;
            if k < n {
                gso_rows(&g, n, k, k, &mut mu, &mut r);
            }
        }
    }
    let gram = g
        .iter()
        .map(|&x| x.to_i64().expect("reduced Gram entry fits in i64"))
        .collect();
    Reduced { gram, transform: t }
}

/// Recompute Gram–Schmidt rows `from..=to` (rows below `from` must be current).
fn gso_rows(g: &[i128], n: usize, from: usize, to: usize, mu: &mut [f64], r: &mut [f64]) {
    for i in from..=to {
        for j in 0..=i {
            let mut v = g[i * n + j] as f64;
            for l in 0..j {
                v -= mu[j * n + l] * r[i * n + l];
            }
            r[i * n + j] = v;
            if j < i {
                mu[i * n + j] = v / r[j * n + j];
            }
        }
        mu[i * n + i] = 1.0;
    }
}

/// `b_k ← b_k − q·b_j`.
fn sub_row(g: &mut [i128], t: &mut [Vec<i64>], n: usize, k: usize, j: usize, q: i128) {
    let gkj = g[k * n + j];
    let gjj = g[j * n + j];
    let gkk = g[k * n + k] - 2 * q * gkj + q * q * gjj;
    for i in 0..n {
        if i != k {
            let v = g[k * n + i] - q * g[j * n + i];
            g[k * n + i] = v;
            g[i * n + k] = v;
        }
    }
    g[k * n + k] = gkk;
    let qi = q as i64;
    let tj = t[j].clone();
    for (x, y) in t[k].iter_mut().zip(tj) {
        *x -= qi * y;
    }
}

fn swap_rows(g: &mut [i128], t: &mut [Vec<i64>], n: usize, a: usize, b: usize) {
    for i in 0..n {
        g.swap(a * n + i, b * n + i);
    }
    for i in 0..n {
        g.swap(i * n + a, i * n + b);
    }
    t.swap(a, b);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn hnf_of_redundant_generators() {
        let b = hermite_row_basis(big(&[&[2, 0], &[0, 2], &[1, 1]]));
        assert_eq!(b, big(&[&[1, 1], &[0, 2]]));
        let b = hermite_row_basis(big(&[&[4, 6], &[6, 9]]));
        assert_eq!(b, big(&[&[2, 3]]));
    }

    #[test]
    fn lll_keeps_gram_consistent() {
        // a badly skewed basis of Z^3 (Gram = T Tᵀ)
        let rows = [[1i64, 7, 40], [0, 1, 9], [0, 0, 1]];
        let mut g = vec![0i64; 9];
        for i in 0..3 {
            for j in 0..3 {
                g[i * 3 + j] = (0..3).map(|k| rows[i][k] * rows[j][k]).sum();
            }
        }
        let red = lll_gram(&g, 3);
        let mut diag: Vec<i64> = (0..3).map(|i| red.gram[i * 3 + i]).collect();
        diag.sort();
        assert_eq!(diag, vec![1, 1, 1]);
        for a in 0..3 {
            for b in 0..3 {
                let mut v = 0i64;
                for i in 0..3 {
                    for j in 0..3 {
                        v += red.transform[a][i] * g[i * 3 + j] * red.transform[b][j];
                    }
                }
                assert_eq!(v, red.gram[a * 3 + b]);
            }
        }
    }
}
