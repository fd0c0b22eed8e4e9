//! Lattice toolkit for Gottesman–Kitaev–Preskill (GKP) codes.

pub mod code;
pub mod constructions;
pub mod decoder;
pub mod error;
pub mod exact;
mod gf2;
pub mod io;
pub mod lattice;
pub mod par;
pub mod sim;
pub mod theta;

pub use error::{Error, Result};
