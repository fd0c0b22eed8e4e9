//! Built-in codes, seeds and qubit codes, looked up by name.

use super::{construction_a, construction_a_with_order, scaled_code, QubitStabilizerCode};
use crate::code::GkpCode;
use crate::error::{Error, Result};
use crate::lattice::GeneratorMatrix;

/// Names accepted by [`code`].
pub const CODE_NAMES: &[&str] = &["square", "hexagonal", "sensor", "rep2", "rep3", "surface17", "d4"];

/// Names accepted by [`seed`].
pub const SEED_NAMES: &[&str] = &["square", "hexagonal", "d4"];

/// Names accepted by [`qubit_code`].
pub const QUBIT_NAMES: &[&str] = &["rep2", "rep3", "surface17"];

/// Surface-17 on a 3×3 grid (mode `3·row + col`).
const SURFACE17_X: [&[usize]; 4] = [&[1, 2, 4, 5], &[3, 4, 6, 7], &[0, 1], &[7, 8]];
const SURFACE17_Z: [&[usize]; 4] = [&[0, 1, 3, 4], &[4, 5, 7, 8], &[3, 6], &[2, 5]];

/// Completion order reproducing the checkerboard of single-mode stabilizers:
/// q-type on the corners and centre, p-type on the edges and centre.
const SURFACE17_ORDER_Q: [usize; 9] = [4, 0, 2, 6, 8, 1, 3, 5, 7];
const SURFACE17_ORDER_P: [usize; 9] = [4, 1, 3, 5, 7, 0, 2, 6, 8];

pub fn surface17_completion_order() -> Vec<usize> {
    SURFACE17_ORDER_Q.iter().copied().chain(SURFACE17_ORDER_P.iter().map(|i| i + 9)).collect()
}

pub fn qubit_code(name: &str) -> Result<QubitStabilizerCode> {
    match name {
        "rep2" => QubitStabilizerCode::from_paulis(&["ZZ"]),
        "rep3" => QubitStabilizerCode::from_paulis(&["ZZI", "IZZ"]),
        "surface17" => {
            let n = 9;
            let mut gens = Vec::new();
            for s in SURFACE17_X {
                let mut g = vec![0u8; 2 * n];
                s.iter().for_each(|&i| g[n + i] = 1);
                gens.push(g);
            }
            for s in SURFACE17_Z {
                let mut g = vec![0u8; 2 * n];
                s.iter().for_each(|&i| g[i] = 1);
                gens.push(g);
            }
            QubitStabilizerCode::new(n, gens)
        }
        other => Err(Error::InvalidArgument(format!("unknown qubit code {other:?}"))),
    }
}

/// Self-dual seeds `M₀` (`|det M₀JM₀ᵀ| = 1`).
pub fn seed(name: &str) -> Result<GeneratorMatrix> {
    match name {
        "square" => GeneratorMatrix::from_int_rows(&[vec![1, 0], vec![0, 1]], 1),
        "hexagonal" => {
            let s = 3f64.powf(-0.25) / 2f64.sqrt();
            GeneratorMatrix::from_rows(&[vec![2.0 * s, 0.0], vec![s, 3f64.sqrt() * s]])
        }
        "d4" => {
            let a = 2f64.powf(0.25);
            let b = 2f64.powf(-0.25);
            let c = 2f64.powf(-0.75);
            GeneratorMatrix::from_rows(&[
                vec![a, 0.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0, a],
                vec![0.0, b, -b, 0.0],
                vec![c, 0.0, -b, c],
            ])
        }
        other => Err(Error::InvalidArgument(format!("unknown seed {other:?}"))),
    }
}

pub fn code(name: &str) -> Result<GkpCode> {
    let code = match name {
        "square" => scaled_code(name, &seed("square")?, 2, false)?,
        "hexagonal" => scaled_code(name, &seed("hexagonal")?, 2, false)?,
        "d4" => scaled_code(name, &seed("d4")?, 2, false)?,
        "sensor" => GkpCode::validate(name, seed("square")?)?,
        "rep2" | "rep3" => construction_a(&qubit_code(name)?)?,
        "surface17" => construction_a_with_order(&qubit_code(name)?, &surface17_completion_order())?,
        other => return Err(Error::InvalidArgument(format!("unknown code {other:?}"))),
    };
    Ok(code.with_name(name))
}

pub fn is_code_name(name: &str) -> bool {
    CODE_NAMES.contains(&name)
}
