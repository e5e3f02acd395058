//! Elliptic surfaces over GF(p)(t) for small p: Kodaira fibers via Tate's
//! algorithm, Frobenius pullbacks, torsion sections, Mordell-Weil lattice
//! determinants and formal Brauer height flags.

pub mod algebra;
pub mod brauer;
pub mod families;
pub mod frobext;
pub mod golden;
pub mod lattice;
pub mod parallel;
pub mod sections;
pub mod tate;
pub mod weierstrass;

use thiserror::Error;

/// Any error raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] algebra::AlgebraError),
    #[error(transparent)]
    Parse(#[from] algebra::ParseError),
    #[error(transparent)]
    Weierstrass(#[from] weierstrass::WeierstrassError),
    #[error(transparent)]
    Tate(#[from] tate::TateError),
    #[error(transparent)]
    Frobext(#[from] frobext::FrobextError),
    #[error(transparent)]
    Sections(#[from] sections::SectionsError),
    #[error(transparent)]
    Lattice(#[from] lattice::LatticeError),
    #[error(transparent)]
    Brauer(#[from] brauer::BrauerError),
    #[error(transparent)]
    Family(#[from] families::FamilyError),
    #[error(transparent)]
    Golden(#[from] golden::GoldenError),
}
