//! Packing the squares of side `n^-t`, `n = 1, 2, ...`, into the rectangle
//! `zeta(2t) x 1`.
//!
//! [`packer::pack`] seeds the container with the three largest squares and
//! then runs a recursive guillotine procedure that places every further
//! square in order. Runs are deterministic and instrumented: each outer step
//! records the residual area, height and width so the height and area
//! budgets that guarantee progress can be audited afterwards, and
//! [`verifier`] independently checks the resulting geometry.

pub mod boxset;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod io;
pub mod numerics;
pub mod packer;
pub mod verifier;

pub use error::{Error, Result};
pub use numerics::Exponent;
pub use packer::{pack, PackOptions, PackingReport};
