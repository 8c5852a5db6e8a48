//! Construction and verification laboratory for rational solutions of the
//! Painlevé-IV hierarchy (dressing chains).
//!
//! * [`exactalg`]: polynomials and rational functions over ℚ, Wronskians.
//! * [`families`]: Hermite, Adler–Moser and Hermite-Wronskian polynomials.
//! * [`solutions`]: the rational functions `f`, `w = -(z + f)`, `u = f' + f²`.
//! * [`relations`]: Stieltjes, Calogero and generalized Stieltjes verifiers.
//! * [`monodromy`]: pole discovery, Laurent windows, trivial-monodromy test.
//! * [`chains`]: dressing chains, PIV parameters, residue cycles.
//! * [`equilibria`]: Newton solver for the electrostatic equilibrium systems.

pub mod chains;
pub mod equilibria;
mod error;
pub mod exactalg;
pub mod families;
pub mod laurent;
pub mod monodromy;
pub mod mp;
pub mod relations;
pub mod report;
pub mod roots;
pub mod solutions;

pub use error::{Error, Result};
pub use rug::{Complex, Float, Integer, Rational};

/// Default working precision in bits.
pub const DEFAULT_BITS: u32 = 256;
