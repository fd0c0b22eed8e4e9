//! Binary vectors of length ≤ 64 packed into `u64`.

/// Reduced row echelon basis over GF(2).
#[derive(Clone, Debug, Default)]
pub(crate) struct Gf2Basis {
    rows: Vec<u64>,
}

impl Gf2Basis {
    pub(crate) fn reduce(&self, mut v: u64) -> u64 {
        for &r in &self.rows {
            let top = 63 - r.leading_zeros();
            if v >> top & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    /// Insert `v`; false if it was already in the span.
    pub(crate) fn insert(&mut self, v: u64) -> bool {
        let w = self.reduce(v);
        if w == 0 {
            return false;
        }
        let top = 63 - w.leading_zeros();
        for r in self.rows.iter_mut() {
            if *r >> top & 1 == 1 {
                *r ^= w;
            }
        }
        self.rows.push(w);
        self.rows.sort_unstable_by(|a, b| b.cmp(a));
        true
    }

    pub(crate) fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }
}

pub(crate) fn rank(vs: &[u64]) -> usize {
    let mut b = Gf2Basis::default();
    vs.iter().filter(|&&v| b.insert(v)).count()
}

/// Basis of `{x : popcount(x & row) even for every row}` in `len` bits.
pub(crate) fn nullspace(rows: &[u64], len: usize) -> Vec<u64> {
    // Gauss–Jordan on the rows, then read off free columns.
    let mut m: Vec<u64> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..len {
        let Some(p) = (r..m.len()).find(|&i| m[i] >> col & 1 == 1) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i] >> col & 1 == 1 {
                m[i] ^= m[r];
            }
        }
        pivots.push(col);
        r += 1;
    }
    let mut out = Vec::new();
    for free in (0..len).filter(|c| !pivots.contains(c)) {
        let mut v = 1u64 << free;
        for (i, &pc) in pivots.iter().enumerate() {
            if m[i] >> free & 1 == 1 {
                v |= 1 << pc;
            }
        }
        out.push(v);
    }
    out
}

/// Visit all `2^k` elements of the span of `gens` in Gray-code order.
pub(crate) fn for_each_in_span(gens: &[u64], mut f: impl FnMut(u64)) {
    let mut v = 0u64;
    f(v);
    let total: u64 = 1 << gens.len();
    for i in 1..total {
        v ^= gens[i.trailing_zeros() as usize];
        f(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_is_orthogonal() {
        let rows = [0b0011u64, 0b0110];
        let ns = nullspace(&rows, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for r in &rows {
                assert_eq!((v & r).count_ones() % 2, 0);
            }
        }
        assert_eq!(rank(&ns), 2);
    }

    #[test]
    fn span_enumeration() {
        let mut seen = Vec::new();
        for_each_in_span(&[0b01, 0b10], |v| seen.push(v));
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 3]);
    }

    #[test]
    fn basis_membership() {
        let mut b = Gf2Basis::default();
        assert!(b.insert(0b101));
        assert!(b.insert(0b011));
        assert!(b.contains(0b110));
        assert!(!b.insert(0b110));
        assert!(!b.contains(0b001));
    }
}
