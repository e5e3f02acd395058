//! Exact arithmetic over GF(p): polynomials, rational functions, places of the
//! projective line, residue fields and valuations.

pub mod factor;
pub mod fp;
pub mod parse;
pub mod place;
pub mod poly;
pub mod ratfunc;
pub mod residue;

pub use factor::{factor, factor_by_trial_division, irreducibles_up_to, Factorization};
pub use fp::{is_prime, Fp};
pub use parse::{parse_poly, parse_ratfunc, ParseError};
pub use place::{power_class_index, residue, valuation, valuation_poly, Place, PlaceKind, PowerClass};
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use residue::ResidueField;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("modulus {0} is not a supported prime")]
    BadModulus(u32),
    #[error("cannot factor zero")]
    FactorZero,
    #[error("pole at place {0}")]
    Pole(String),
    #[error("power class of zero is undefined")]
    ZeroPowerClass,
    #[error("power class exponent must be positive")]
    ZeroExponent,
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("place polynomial {0} is not monic irreducible")]
    NotIrreducible(String),
}
