//! JSON file formats for GKP codes (`gkp-code/1`) and qubit stabilizer codes
//! (`qubit-stab/1`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::code::GkpCode;
use crate::constructions::QubitStabilizerCode;
use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::lattice::GeneratorMatrix;

pub const CODE_FORMAT: &str = "gkp-code/1";
pub const QUBIT_FORMAT: &str = "qubit-stab/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    Qqpp,
    Interleaved,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Float { matrix: Vec<Vec<f64>> },
    /// `M = matrix/√c`.
    ExactSqrt { c: u64, matrix: Vec<Vec<i64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeFile {
    pub format: String,
    pub name: String,
    pub n_modes: usize,
    pub ordering: Ordering,
    pub generator: GeneratorSpec,
    /// Qubit code the lattice was concatenated from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<QubitCodeFile>,
}

/// A stabilizer row: either a `"0110"` bit string or a list of bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BitRow {
    Text(String),
    Bits(Vec<u8>),
}

impl BitRow {
    fn bits(&self) -> Result<Vec<u8>> {
        match self {
            BitRow::Text(s) => s
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    other => Err(Error::Format(format!("invalid bit {other:?}"))),
                })
                .collect(),
            BitRow::Bits(b) => {
                if b.iter().any(|&x| x > 1) {
                    return Err(Error::Format("bits must be 0 or 1".into()));
                }
                Ok(b.clone())
            }
        }
    }
}

/// Generators are `2n`-bit rows: Z part first, X part last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitCodeFile {
    pub format: String,
    pub n: usize,
    pub k: usize,
    pub generators: Vec<BitRow>,
}

impl QubitCodeFile {
    pub fn from_code(q: &QubitStabilizerCode) -> Self {
        let generators = q
            .generators()
            .iter()
            .map(|g| BitRow::Text(g.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()))
            .collect();
        QubitCodeFile { format: QUBIT_FORMAT.into(), n: q.n(), k: q.k(), generators }
    }

    pub fn to_code(&self) -> Result<QubitStabilizerCode> {
        check_format(&self.format, QUBIT_FORMAT)?;
        let rows = self.generators.iter().map(BitRow::bits).collect::<Result<Vec<_>>>()?;
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != 2 * self.n) {
            return Err(Error::Format(format!("generator {i} has {} bits, expected {}", r.len(), 2 * self.n)));
        }
        let q = QubitStabilizerCode::new(self.n, rows)?;
        if q.k() != self.k {
            return Err(Error::Format(format!("declared k = {} but the generators give k = {}", self.k, q.k())));
        }
        Ok(q)
    }
}

fn check_format(got: &str, want: &str) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::Format(format!("expected format {want:?}, found {got:?}")))
    }
}

impl CodeFile {
    /// Exact form whenever the generator has one with machine-size entries.
    pub fn from_code(code: &GkpCode) -> Self {
        let m = code.generator();
        let generator = match m.exact().and_then(|e| e.b.to_i64_rows().map(|rows| (rows, e.c))) {
            Some((matrix, c)) => GeneratorSpec::ExactSqrt { c, matrix },
            None => GeneratorSpec::Float { matrix: m.rows() },
        };
        CodeFile {
            format: CODE_FORMAT.into(),
            name: code.name().to_string(),
            n_modes: code.n_modes(),
            ordering: Ordering::Qqpp,
            generator,
            origin: code.origin().map(QubitCodeFile::from_code),
        }
    }

    pub fn to_code(&self) -> Result<GkpCode> {
        check_format(&self.format, CODE_FORMAT)?;
        let dim = 2 * self.n_modes;
        let rows_ok = |m: usize, lens: &mut dyn Iterator<Item = usize>| -> Result<()> {
            if m != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: m });
            }
            match lens.enumerate().find(|(_, l)| *l != dim) {
                Some((_, l)) => Err(Error::DimensionMismatch { expected: dim, got: l }),
                None => Ok(()),
            }
        };
        let m = match &self.generator {
            GeneratorSpec::Float { matrix } => {
                rows_ok(matrix.len(), &mut matrix.iter().map(Vec::len))?;
                GeneratorMatrix::from_rows(matrix)?
            }
            GeneratorSpec::ExactSqrt { c, matrix } => {
                rows_ok(matrix.len(), &mut matrix.iter().map(Vec::len))?;
                GeneratorMatrix::from_exact(ExactMatrix::from_i64_rows(matrix), *c)?
            }
        };
        let m = match self.ordering {
            Ordering::Qqpp => m,
            Ordering::Interleaved => m.from_interleaved()?,
        };
        let code = GkpCode::validate(self.name.clone(), m)?;
        match &self.origin {
            Some(q) => Ok(code.with_origin(q.to_code()?)),
            None => Ok(code),
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn read_code(path: &Path) -> Result<GkpCode> {
    read_json::<CodeFile>(path)?.to_code()
}

pub fn write_code(path: &Path, code: &GkpCode) -> Result<()> {
    write_json(path, &CodeFile::from_code(code))
}

pub fn read_qubit_code(path: &Path) -> Result<QubitStabilizerCode> {
    read_json::<QubitCodeFile>(path)?.to_code()
}

pub fn write_qubit_code(path: &Path, q: &QubitStabilizerCode) -> Result<()> {
    write_json(path, &QubitCodeFile::from_code(q))
}
