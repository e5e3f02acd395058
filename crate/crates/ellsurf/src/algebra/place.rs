use std::fmt;

use serde::Serialize;

use super::factor::factor;
use super::fp::{gcd_u64, inv_mod, mul_mod, pow_mod};
use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::residue::ResidueField;
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PlaceKind {
    /// Zero of a monic irreducible polynomial.
    Finite(Poly),
    Infinity,
}

/// A closed point of the projective line over GF(p).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Place {
    kind: PlaceKind,
    degree: usize,
}

impl Place {
    pub fn finite(pi: Poly) -> Result<Self, AlgebraError> {
        if !pi.is_monic() || !super::factor::is_irreducible(&pi) {
            return Err(AlgebraError::NotIrreducible(pi.to_string()));
        }
        let degree = pi.degree().unwrap_or(0);
        Ok(Place { kind: PlaceKind::Finite(pi), degree })
    }

    /// Trusted constructor for factors coming out of [`factor`].
    pub(crate) fn finite_unchecked(pi: Poly) -> Self {
        let degree = pi.degree().unwrap_or(0);
        Place { kind: PlaceKind::Finite(pi), degree }
    }

    /// The rational place `t = a`.
    pub fn at(p: u32, a: u32) -> Self {
        Self::finite_unchecked(Poly::linear_root(p, a))
    }

    pub fn infinity() -> Self {
        Place { kind: PlaceKind::Infinity, degree: 1 }
    }

    pub fn kind(&self) -> &PlaceKind {
        &self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self.kind, PlaceKind::Infinity)
    }

    pub fn uniformizer(&self) -> Option<&Poly> {
        match &self.kind {
            PlaceKind::Finite(pi) => Some(pi),
            PlaceKind::Infinity => None,
        }
    }

    /// Residue field GF(p)[t]/(pi); the place at infinity has residue field GF(p).
    pub fn residue_field(&self, p: u32) -> ResidueField {
        match &self.kind {
            PlaceKind::Finite(pi) => ResidueField::new_unchecked(pi.clone()),
            PlaceKind::Infinity => ResidueField::new_unchecked(Poly::t(p)),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PlaceKind::Finite(pi) => write!(f, "{pi}"),
            PlaceKind::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Valuation of a polynomial; `None` stands for the zero polynomial (+infinity).
pub fn valuation_poly(f: &Poly, v: &Place) -> Option<i64> {
    if f.is_zero() {
        return None;
    }
    match &v.kind {
        PlaceKind::Infinity => Some(-(f.degree().unwrap() as i64)),
        PlaceKind::Finite(pi) => {
            if pi.degree() == Some(1) && pi.coeff(0) == 0 {
                return Some(f.low_degree().unwrap() as i64);
            }
            let mut n = 0;
            let mut g = f.clone();
            while let Some(q) = g.div_exact(pi) {
                g = q;
                n += 1;
            }
            Some(n)
        }
    }
}

pub fn valuation(x: &RatFunc, v: &Place) -> Option<i64> {
    let a = valuation_poly(x.num(), v)?;
    let b = valuation_poly(x.den(), v).expect("denominator is nonzero");
    Some(a - b)
}

/// Image of `x` in the residue field at `v` (a polynomial of degree below `deg v`).
pub fn residue(x: &RatFunc, v: &Place) -> Result<Poly, AlgebraError> {
    let p = x.p();
    match valuation(x, v) {
        None => return Ok(Poly::zero(p)),
        Some(k) if k < 0 => return Err(AlgebraError::Pole(v.to_string())),
        Some(k) if k > 0 => return Ok(Poly::zero(p)),
        _ => {}
    }
    match &v.kind {
        PlaceKind::Infinity => {
            let c = mul_mod(p, x.num().leading(), inv_mod(p, x.den().leading()));
            Ok(Poly::constant(p, c as i64))
        }
        PlaceKind::Finite(pi) => {
            let f = ResidueField::new_unchecked(pi.clone());
            Ok(f.div(x.num(), x.den()).expect("unit at place"))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerClass {
    Trivial,
    Nontrivial,
}

/// Class of `x` in GF(p)(t)^x modulo k-th powers.
pub fn power_class_index(x: &RatFunc, k: u32) -> Result<PowerClass, AlgebraError> {
    if x.is_zero() {
        return Err(AlgebraError::ZeroPowerClass);
    }
    if k == 0 {
        return Err(AlgebraError::ZeroExponent);
    }
    let p = x.p();
    for part in [x.num(), x.den()] {
        if part.is_constant() {
            continue;
        }
        let fac = factor(part)?;
        if fac.factors.iter().any(|(_, m)| m % k != 0) {
            return Ok(PowerClass::Nontrivial);
        }
    }
    let c = x.num().leading();
    let order = (p - 1) as u64;
    let e = order / gcd_u64(k as u64, order);
    Ok(if pow_mod(p, c, e) == 1 % p { PowerClass::Trivial } else { PowerClass::Nontrivial })
}
