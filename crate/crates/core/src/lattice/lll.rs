use nalgebra::DMatrix;

/// Default Lovász parameter.
pub const DEFAULT_DELTA: f64 = 0.99;

/// Gram–Schmidt coefficients `mu[i][j]` (j < i) and squared norms of `b*_i`.
pub(crate) fn gso(b: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = b.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    let mut norms = vec![0.0; n];
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            let m = dot(&b[i], &star[j]) / norms[j];
            mu[i][j] = m;
            for (x, y) in v.iter_mut().zip(&star[j]) {
                *x -= m * y;
            }
        }
        mu[i][i] = 1.0;
        norms[i] = dot(&v, &v);
        star.push(v);
    }
    (mu, norms)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unimodular `T` such that `T·M` is LLL-reduced with parameter `delta`.
pub(crate) fn lll_transform(m: &DMatrix<f64>, delta: f64) -> Vec<Vec<i64>> {
    let n = m.nrows();
    let mut b: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).iter().copied().collect()).collect();
    let mut t: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n < 2 {
        return t;
    }
    let (mut mu, mut norms) = gso(&b);
    let mut k = 1;
    let mut swaps = 0usize;
    while k < n {
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q == 0.0 {
                continue;
            }
            let qi = q as i64;
            for c in 0..n {
                b[k][c] -= q * b[j][c];
                t[k][c] -= qi * t[j][c];
            }
            for l in 0..=j {
                mu[k][l] -= q * mu[j][l];
            }
        }
        if norms[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            t.swap(k, k - 1);
            // Recompute from the integer transform to avoid drift.
            for i in [k - 1, k] {
                for c in 0..n {
                    b[i][c] = (0..n).map(|l| t[i][l] as f64 * m[(l, c)]).sum();
                }
            }
            let g = gso(&b);
            mu = g.0;
            norms = g.1;
            k = (k - 1).max(1);
            swaps += 1;
            if swaps > 100_000 {
                log::warn!("LLL did not converge after {swaps} swaps; returning partial reduction");
                break;
            }
        }
    }
    t
}
