//! Exact certificates for the apolar ideal of a general cubic in six
//! variables and the truncated ideal `I = F^⊥ + (g)`: Hilbert functions,
//! resolution shape, graded tangent spaces, primary obstructions and the
//! one-parameter family built from `F(t·x + y)`.
//!
//! Everything is exact linear algebra over `Q`; see [`certifier::certify`]
//! for the full chain.

pub mod apolarity;
pub mod certifier;
pub mod error;
pub mod fractal;
pub mod linalg;
pub mod obstruction;
pub mod poly;
pub mod resolution;
pub mod tangent;

pub use error::{Error, Result};
pub use poly::{parse_poly, Poly};

/// The running example `x1x2x4 − x1x5² + x2x3² + x3x5x6 + x4x6²`.
pub const F_EXAMPLE: &str = "x1*x2*x4 - x1*x5^2 + x2*x3^2 + x3*x5*x6 + x4*x6^2";

pub fn f_example() -> Poly {
    parse_poly(F_EXAMPLE).expect("example parses")
}
