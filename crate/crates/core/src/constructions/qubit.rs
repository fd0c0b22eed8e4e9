use crate::error::{Error, Result};
use crate::gf2::{self, Gf2Basis};

/// Largest group enumerated by brute force (`2^24` elements).
pub const MAX_GROUP_BITS: usize = 24;

/// An `[[n, k]]` qubit stabilizer code given by `r = n − k` independent,
/// commuting generators. Each generator row is a `2n`-bit vector: the first
/// `n` entries are the Z-part, the last `n` the X-part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitStabilizerCode {
    n: usize,
    k: usize,
    generators: Vec<Vec<u8>>,
}

impl QubitStabilizerCode {
    pub fn new(n: usize, generators: Vec<Vec<u8>>) -> Result<Self> {
        if n == 0 || n > 32 {
            return Err(Error::InvalidQubitCode(format!("n = {n} outside 1..=32")));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.len() != 2 * n {
                return Err(Error::InvalidQubitCode(format!("generator {i} has length {}, expected {}", g.len(), 2 * n)));
            }
            if g.iter().any(|&b| b > 1) {
                return Err(Error::InvalidQubitCode(format!("generator {i} is not binary")));
            }
        }
        let code = QubitStabilizerCode { n, k: n.saturating_sub(generators.len()), generators };
        if code.generators.len() > n {
            return Err(Error::InvalidQubitCode(format!("{} generators on {n} qubits", code.generators.len())));
        }
        let masks = code.lattice_masks();
        for i in 0..masks.len() {
            for j in i + 1..masks.len() {
                if code.symplectic(masks[i], masks[j]) {
                    return Err(Error::InvalidQubitCode(format!("generators {i} and {j} anticommute")));
                }
            }
        }
        if gf2::rank(&masks) != masks.len() {
            return Err(Error::InvalidQubitCode("generators are linearly dependent over GF(2)".into()));
        }
        Ok(code)
    }

    /// Parse Pauli strings such as `"ZZI"` or `"XXXX"` (`Y` sets both parts).
    pub fn from_paulis(paulis: &[&str]) -> Result<Self> {
        let n = paulis.first().map_or(0, |p| p.len());
        let mut rows = Vec::with_capacity(paulis.len());
        for p in paulis {
            if p.len() != n {
                return Err(Error::InvalidQubitCode(format!("Pauli string {p:?} has the wrong length")));
            }
            let mut row = vec![0u8; 2 * n];
            for (i, ch) in p.chars().enumerate() {
                match ch {
                    'I' | '_' => {}
                    'Z' => row[i] = 1,
                    'X' => row[n + i] = 1,
                    'Y' => {
                        row[i] = 1;
                        row[n + i] = 1;
                    }
                    other => return Err(Error::InvalidQubitCode(format!("unknown Pauli {other:?}"))),
                }
            }
            rows.push(row);
        }
        Self::new(n, rows)
    }

    /// Code with no stabilizers on `n` qubits.
    pub fn trivial(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Vec<u8>] {
        &self.generators
    }

    /// Generators as lattice vectors in `qqpp` order: X-part in the q block,
    /// Z-part in the p block.
    pub fn lattice_rows(&self) -> Vec<Vec<u8>> {
        let n = self.n;
        self.generators
            .iter()
            .map(|g| g[n..].iter().chain(&g[..n]).copied().collect())
            .collect()
    }

    /// [`lattice_rows`](Self::lattice_rows) packed into bit masks (bit `i` = coordinate `i`).
    pub fn lattice_masks(&self) -> Vec<u64> {
        self.lattice_rows().iter().map(|r| pack(r)).collect()
    }

    /// Symplectic product of two lattice masks (true = anticommute).
    pub fn symplectic(&self, u: u64, v: u64) -> bool {
        (u & self.swap_blocks(v)).count_ones() % 2 == 1
    }

    fn swap_blocks(&self, v: u64) -> u64 {
        let n = self.n;
        let low = (1u64 << n) - 1;
        ((v & low) << n) | (v >> n)
    }

    /// Basis of the normalizer (symplectic complement of the stabilizer
    /// space) as lattice masks; dimension `n + k`.
    pub fn normalizer_basis(&self) -> Vec<u64> {
        let rows: Vec<u64> = self.lattice_masks().iter().map(|&m| self.swap_blocks(m)).collect();
        gf2::nullspace(&rows, 2 * self.n)
    }

    /// `2k` normalizer vectors completing the stabilizers to a normalizer basis.
    pub fn logical_basis(&self) -> Vec<u64> {
        let mut span = Gf2Basis::default();
        for m in self.lattice_masks() {
            span.insert(m);
        }
        self.normalizer_basis().into_iter().filter(|&c| span.insert(c)).collect()
    }

    /// Whether the stabilizer group splits into pure-X and pure-Z parts.
    pub fn is_css(&self) -> bool {
        let n = self.n;
        let low = (1u64 << n) - 1;
        let masks = self.lattice_masks();
        let q_part: Vec<u64> = masks.iter().map(|m| m & low).collect();
        let p_part: Vec<u64> = masks.iter().map(|m| m >> n).collect();
        let r = masks.len();
        let pure_p = r - gf2::rank(&q_part);
        let pure_q = r - gf2::rank(&p_part);
        pure_p + pure_q == r
    }

    /// Symplectic weight (number of qubits acted on) of a lattice mask.
    pub fn symplectic_weight(&self, v: u64) -> usize {
        let low = (1u64 << self.n) - 1;
        ((v & low) | (v >> self.n)).count_ones() as usize
    }

    /// Qubit code distance: minimum symplectic weight over normalizer
    /// elements outside the stabilizer group (brute force).
    pub fn distance(&self) -> Result<usize> {
        if self.k == 0 {
            return Err(Error::TrivialCode);
        }
        let basis = self.normalizer_basis();
        if basis.len() > MAX_GROUP_BITS {
            return Err(Error::GroupTooLarge(basis.len()));
        }
        let mut stab = Gf2Basis::default();
        for m in self.lattice_masks() {
            stab.insert(m);
        }
        let mut best = usize::MAX;
        gf2::for_each_in_span(&basis, |v| {
            if v != 0 && !stab.contains(v) {
                best = best.min(self.symplectic_weight(v));
            }
        });
        Ok(best)
    }
}

pub(crate) fn pack(bits: &[u8]) -> u64 {
    bits.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (u64::from(b & 1) << i))
}
