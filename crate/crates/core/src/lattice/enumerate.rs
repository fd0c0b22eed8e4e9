//! Fincke–Pohst enumeration and Schnorr–Euchner closest-vector search over an
//! LLL-reduced basis.
//!
//! The top-level search branches (values of the last coefficient) are
//! independent and may run in parallel; results are merged in a fixed order
//! and finally sorted by `(norm², coefficients)`, so output never depends on
//! the number of workers.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use nalgebra::DMatrix;

use super::lll::{gso, DEFAULT_DELTA};
use super::GeneratorMatrix;
use crate::error::{Error, Result};
use crate::par::ExecPolicy;

/// Default cap on the predicted number of enumerated points.
pub const DEFAULT_CAP: u64 = 10_000_000;

/// Search nodes allowed per predicted point before giving up.
const NODES_PER_POINT: u64 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    pub cap: u64,
    pub policy: ExecPolicy,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { cap: DEFAULT_CAP, policy: ExecPolicy::default() }
    }
}

impl EnumOptions {
    pub fn sequential() -> Self {
        EnumOptions { policy: ExecPolicy::Sequential, ..Default::default() }
    }

    pub fn with_policy(policy: ExecPolicy) -> Self {
        EnumOptions { policy, ..Default::default() }
    }

    fn node_cap(&self) -> u64 {
        self.cap.saturating_mul(NODES_PER_POINT).max(1_000_000)
    }
}

/// One enumerated lattice point.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortVector {
    /// Integer coefficients in the generator's own basis.
    pub coeffs: Vec<i64>,
    pub vector: Vec<f64>,
    /// `‖vector − center‖²` (just `‖vector‖²` without a center).
    pub norm2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShortVectorList {
    pub radius2: f64,
    pub entries: Vec<ShortVector>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosestVector {
    pub coeffs: Vec<i64>,
    pub point: Vec<f64>,
    pub dist2: f64,
}

/// Precomputed reduction data for repeated searches in one lattice.
#[derive(Debug)]
pub struct LatticeSearch {
    dim: usize,
    reduced: Vec<Vec<f64>>,
    t: Vec<Vec<i64>>,
    reduced_inv_t: DMatrix<f64>,
    mu: Vec<Vec<f64>>,
    norms: Vec<f64>,
    det: f64,
}

fn pad(r2: f64) -> f64 {
    r2 * (1.0 + 1e-9) + 1e-12
}

fn ln_gamma_half(k: usize) -> f64 {
    // ln Γ(k/2), exact recursion from Γ(1/2) and Γ(1).
    let mut acc = if k % 2 == 0 { 0.0 } else { 0.5 * std::f64::consts::PI.ln() };
    let mut j = if k % 2 == 0 { 2 } else { 1 };
    while j + 2 <= k {
        acc += (j as f64 / 2.0).ln();
        j += 2;
    }
    acc
}

/// Gaussian-heuristic point count of a ball of squared radius `r2`.
pub(crate) fn predicted_count(dim: usize, det: f64, r2: f64) -> f64 {
    let d = dim as f64;
    let ln_vol = d / 2.0 * (std::f64::consts::PI * r2).ln() - ln_gamma_half(dim + 2);
    (ln_vol - det.ln()).exp()
}

struct Budget<'a> {
    shared: &'a AtomicU64,
    local: u64,
    cap: u64,
}

impl Budget<'_> {
    #[inline]
    fn tick(&mut self) -> bool {
        self.local += 1;
        if self.local >= 4096 {
            let total = self.shared.fetch_add(self.local, AtomicOrdering::Relaxed) + self.local;
            self.local = 0;
            return total <= self.cap;
        }
        true
    }
}

impl LatticeSearch {
    pub fn new(m: &GeneratorMatrix) -> Self {
        let dim = m.dim();
        let (red, t) = m
            .lll_reduce_with_transform(DEFAULT_DELTA)
            .expect("default LLL parameter is valid and the basis is full rank");
        let reduced: Vec<Vec<f64>> = red.rows();
        let (mu, norms) = gso(&reduced);
        let reduced_inv_t = red.inverse().transpose();
        LatticeSearch { dim, reduced, t, reduced_inv_t, mu, norms, det: m.abs_det() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Squared norms of the Gram–Schmidt vectors of the reduced basis.
    pub fn gso_norms(&self) -> &[f64] {
        &self.norms
    }

    /// Rows of the LLL-reduced basis.
    pub fn reduced_basis(&self) -> &[Vec<f64>] {
        &self.reduced
    }

    fn target_coeffs(&self, center: Option<&[f64]>) -> Result<Vec<f64>> {
        match center {
            None => Ok(vec![0.0; self.dim]),
            Some(c) => {
                if c.len() != self.dim {
                    return Err(Error::DimensionMismatch { expected: self.dim, got: c.len() });
                }
                let v = &self.reduced_inv_t * nalgebra::DVector::from_column_slice(c);
                Ok(v.iter().copied().collect())
            }
        }
    }

    /// Lattice vector for reduced-basis coefficients.
    pub(crate) fn point(&self, x: &[i64]) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            let f = xi as f64;
            for (o, b) in v.iter_mut().zip(&self.reduced[i]) {
                *o += f * b;
            }
        }
        v
    }

    /// Coefficients in the original basis.
    pub(crate) fn original_coeffs(&self, x: &[i64]) -> Vec<i64> {
        let mut a = vec![0i64; self.dim];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (o, t) in a.iter_mut().zip(&self.t[i]) {
                *o += xi * t;
            }
        }
        a
    }

    pub(crate) fn check_prediction(&self, r2: f64, cap: u64) -> Result<()> {
        let p = predicted_count(self.dim, self.det, r2);
        if p > cap as f64 {
            return Err(Error::RadiusTooLarge { what: "predicted lattice points", count: p.min(u64::MAX as f64) as u64, cap });
        }
        Ok(())
    }

    /// Visit every lattice point within `r2` of `center`. Each top-level
    /// branch gets its own accumulator from `make`; accumulators are
    /// returned in branch order.
    pub(crate) fn visit_ball<A, Mk, V>(
        &self,
        center: Option<&[f64]>,
        r2: f64,
        opts: &EnumOptions,
        make: Mk,
        visit: V,
    ) -> Result<Vec<A>>
    where
        A: Send,
        Mk: Fn() -> A + Sync + Send,
        V: Fn(&mut A, &[i64], &[f64], f64) + Sync + Send,
    {
        if !(r2 >= 0.0) || !r2.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid squared radius {r2}")));
        }
        self.check_prediction(r2, opts.cap)?;
        let t = self.target_coeffs(center)?;
        let top = self.dim - 1;
        let r2p = pad(r2);
        let c = t[top];
        let w = (r2p / self.norms[top]).sqrt();
        let lo = (c - w).ceil() as i64;
        let hi = (c + w).floor() as i64;
        if hi < lo {
            return Ok(Vec::new());
        }
        let shared = AtomicU64::new(0);
        let node_cap = opts.node_cap();
        let branches = (hi - lo + 1) as usize;
        let results = opts.policy.map_indexed(branches, |b| {
            let v = lo + b as i64;
            let mut acc = make();
            let mut x = vec![0i64; self.dim];
            x[top] = v;
            let d = v as f64 - c;
            let partial = d * d * self.norms[top];
            let mut budget = Budget { shared: &shared, local: 0, cap: node_cap };
            let ok = if partial > r2p {
                true
            } else if top == 0 {
                self.leaf(&x, center, r2p, &mut acc, &visit);
                true
            } else {
                self.dfs(top - 1, &mut x, &t, partial, r2p, center, &mut budget, &mut acc, &visit)
            };
            let total = shared.fetch_add(budget.local, AtomicOrdering::Relaxed) + budget.local;
            (acc, ok && total <= node_cap)
        });
        let mut out = Vec::with_capacity(results.len());
        for (acc, ok) in results {
            if !ok {
                return Err(Error::RadiusTooLarge {
                    what: "search nodes",
                    count: shared.load(AtomicOrdering::Relaxed),
                    cap: node_cap,
                });
            }
            out.push(acc);
        }
        Ok(out)
    }

    fn leaf<A, V>(&self, x: &[i64], center: Option<&[f64]>, r2p: f64, acc: &mut A, visit: &V)
    where
        V: Fn(&mut A, &[i64], &[f64], f64),
    {
        let p = self.point(x);
        let n2 = match center {
            None => p.iter().map(|v| v * v).sum::<f64>(),
            Some(c) => p.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum(),
        };
        if n2 <= r2p {
            visit(acc, x, &p, n2);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs<A, V>(
        &self,
        level: usize,
        x: &mut [i64],
        t: &[f64],
        partial: f64,
        r2p: f64,
        center: Option<&[f64]>,
        budget: &mut Budget<'_>,
        acc: &mut A,
        visit: &V,
    ) -> bool
    where
        V: Fn(&mut A, &[i64], &[f64], f64),
    {
        let mut c = t[level];
        for j in level + 1..self.dim {
            c -= self.mu[j][level] * (x[j] as f64 - t[j]);
        }
        let rem = r2p - partial;
        if rem < 0.0 {
            return true;
        }
        let w = (rem / self.norms[level]).sqrt();
        let lo = (c - w).ceil() as i64;
        let hi = (c + w).floor() as i64;
        for v in lo..=hi {
            if !budget.tick() {
                return false;
            }
            let d = v as f64 - c;
            let p = partial + d * d * self.norms[level];
            if p > r2p {
                continue;
            }
            x[level] = v;
            if level == 0 {
                self.leaf(x, center, r2p, acc, visit);
            } else if !self.dfs(level - 1, x, t, p, r2p, center, budget, acc, visit) {
                return false;
            }
        }
        x[level] = 0;
        true
    }

    /// Sorted list of all lattice points within `radius2` of `center`.
    pub fn enumerate(&self, radius2: f64, center: Option<&[f64]>, opts: &EnumOptions) -> Result<ShortVectorList> {
        let parts = self.visit_ball(center, radius2, opts, Vec::new, |acc: &mut Vec<ShortVector>, x, p, n2| {
            acc.push(ShortVector { coeffs: self.original_coeffs(x), vector: p.to_vec(), norm2: n2 });
        })?;
        let mut entries: Vec<ShortVector> = parts.into_iter().flatten().collect();
        entries.sort_by(|a, b| a.norm2.total_cmp(&b.norm2).then_with(|| a.coeffs.cmp(&b.coeffs)));
        Ok(ShortVectorList { radius2, entries })
    }

    /// Closest lattice point to `x`; ties within `1e-9·max(1, d²)` go to the
    /// lexicographically smallest coefficient vector.
    pub fn closest(&self, target: &[f64], opts: &EnumOptions) -> Result<ClosestVector> {
        let t = self.target_coeffs(Some(target))?;
        // Babai nearest plane seeds the radius.
        let mut y = vec![0i64; self.dim];
        for i in (0..self.dim).rev() {
            let mut c = t[i];
            for j in i + 1..self.dim {
                c -= self.mu[j][i] * (y[j] as f64 - t[j]);
            }
            y[i] = c.round() as i64;
        }
        let p = self.point(&y);
        let d2 = dist2(&p, target);
        let mut st = CvpState {
            best: d2,
            best_coeffs: self.original_coeffs(&y),
            best_point: p,
            r2: pad(d2),
            nodes: 0,
            node_cap: opts.node_cap(),
        };
        let mut x = vec![0i64; self.dim];
        if !self.cvp_dfs(self.dim - 1, &mut x, &t, 0.0, target, &mut st) {
            return Err(Error::RadiusTooLarge { what: "closest-vector search nodes", count: st.nodes, cap: st.node_cap });
        }
        Ok(ClosestVector { coeffs: st.best_coeffs, point: st.best_point, dist2: st.best })
    }

    fn cvp_dfs(&self, level: usize, x: &mut [i64], t: &[f64], partial: f64, target: &[f64], st: &mut CvpState) -> bool {
        let mut c = t[level];
        for j in level + 1..self.dim {
            c -= self.mu[j][level] * (x[j] as f64 - t[j]);
        }
        let norm = self.norms[level];
        let mut left = c.floor() as i64;
        let mut right = left + 1;
        let mut left_open = true;
        let mut right_open = true;
        while left_open || right_open {
            let dl = c - left as f64;
            let dr = right as f64 - c;
            let take_left = left_open && (!right_open || dl <= dr);
            let v = if take_left { left } else { right };
            let d = if take_left { dl } else { dr };
            let p = partial + d * d * norm;
            if p > st.r2 {
                if take_left {
                    left_open = false;
                } else {
                    right_open = false;
                }
                continue;
            }
            if take_left {
                left -= 1;
            } else {
                right += 1;
            }
            st.nodes += 1;
            if st.nodes > st.node_cap {
                return false;
            }
            x[level] = v;
            if level == 0 {
                let pt = self.point(x);
                let d2 = dist2(&pt, target);
                let tol = 1e-9 * st.best.max(1.0);
                if d2 < st.best - tol {
                    st.best = d2;
                    st.best_coeffs = self.original_coeffs(x);
                    st.best_point = pt;
                    st.r2 = pad(d2);
                } else if d2 <= st.best + tol {
                    let coeffs = self.original_coeffs(x);
                    if coeffs.cmp(&st.best_coeffs) == Ordering::Less {
                        st.best = st.best.min(d2);
                        st.best_coeffs = coeffs;
                        st.best_point = pt;
                    }
                }
            } else if !self.cvp_dfs(level - 1, x, t, p, target, st) {
                return false;
            }
        }
        x[level] = 0;
        true
    }
}

struct CvpState {
    best: f64,
    best_coeffs: Vec<i64>,
    best_point: Vec<f64>,
    r2: f64,
    nodes: u64,
    node_cap: u64,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
