//! Frobenius pullback, base change along classifying maps, Artin-Schreier
//! twists in characteristic 2 and the universal curves over rational Igusa curves.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{parse_ratfunc, Poly, RatFunc};
use crate::tate::{minimalize_global, TateError};
use crate::weierstrass::{WeierstrassError, WeierstrassModel, WEIGHTS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrobextError {
    #[error("constant classifying map")]
    ConstantMap,
    #[error("classifying map has zero denominator")]
    ZeroDenominator,
    #[error("modulus mismatch between model and map")]
    ModulusMismatch,
    #[error("Artin-Schreier twist needs characteristic 2, got {0}")]
    NotCharTwo(u32),
    #[error("Artin-Schreier twist needs an ordinary generic fiber (a1 != 0)")]
    SupersingularGeneric,
    #[error("no Igusa curve entry for p^n = {0}; available: 3, 4, 5, 7, 8, 9, 11")]
    UnsupportedIgusa(u32),
    #[error(transparent)]
    Model(#[from] WeierstrassError),
    #[error(transparent)]
    Tate(#[from] TateError),
}

/// `a_i(t) -> a_i(t^p)` without minimalization.
pub fn frobenius_pullback_raw(m: &WeierstrassModel) -> WeierstrassModel {
    m.substitute_power(m.p() as usize)
}

/// `a_i(t) -> a_i(t^p)` followed by global minimalization.
pub fn frobenius_pullback(m: &WeierstrassModel) -> Result<WeierstrassModel, FrobextError> {
    Ok(minimalize_global(&frobenius_pullback_raw(m))?.0)
}

/// `n`-fold Frobenius pullback, minimalized.
pub fn frobenius_pullback_n(m: &WeierstrassModel, n: u32) -> Result<WeierstrassModel, FrobextError> {
    let raw = m.substitute_power((m.p() as usize).pow(n));
    Ok(minimalize_global(&raw)?.0)
}

/// Inverse of the raw pullback when every coefficient lies in GF(p)[t^p].
pub fn frobenius_descent(m: &WeierstrassModel) -> Option<WeierstrassModel> {
    let p = m.p() as usize;
    let a: Vec<Poly> = m.a().iter().map(|f| f.deflate(p)).collect::<Option<_>>()?;
    m.with_coeffs(a.try_into().ok()?).ok()
}

/// `t = num(s) / den(s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifyingMap {
    map: RatFunc,
}

impl ClassifyingMap {
    pub fn new(num: Poly, den: Poly) -> Result<Self, FrobextError> {
        if num.p() != den.p() {
            return Err(FrobextError::ModulusMismatch);
        }
        let map = RatFunc::new(num, den).map_err(|_| FrobextError::ZeroDenominator)?;
        if map.is_constant() {
            return Err(FrobextError::ConstantMap);
        }
        Ok(ClassifyingMap { map })
    }

    pub fn from_ratfunc(map: RatFunc) -> Result<Self, FrobextError> {
        Self::new(map.num().clone(), map.den().clone())
    }

    pub fn parse(src: &str, p: u32) -> Result<Self, crate::Error> {
        Ok(Self::from_ratfunc(parse_ratfunc(src, p)?)?)
    }

    /// The `p`-power map.
    pub fn frobenius(p: u32) -> Self {
        Self::new(Poly::monomial(p, 1, p as usize), Poly::one(p)).expect("nonconstant")
    }

    pub fn num(&self) -> &Poly {
        self.map.num()
    }

    pub fn den(&self) -> &Poly {
        self.map.den()
    }

    pub fn degree(&self) -> usize {
        self.map.map_degree()
    }

    pub fn as_ratfunc(&self) -> &RatFunc {
        &self.map
    }
}

/// `den^(i chi) a_i(num / den)`, a polynomial of degree at most `i chi deg(phi)`.
fn homogenized(f: &Poly, weight: usize, chi: usize, phi: &ClassifyingMap) -> Poly {
    let p = f.p();
    let total = weight * chi;
    let mut acc = Poly::zero(p);
    let mut num_pow = Poly::one(p);
    for (k, &c) in f.coeffs().iter().enumerate() {
        if k > 0 {
            num_pow = &num_pow * phi.num();
        }
        if c == 0 {
            continue;
        }
        let term = &(&num_pow * &phi.den().pow((total - k) as u32)).scale(c);
        acc = &acc + term;
    }
    acc
}

/// Substitutes `t = phi(s)`, clears denominators, keeps the raw result.
pub fn base_change_raw(m: &WeierstrassModel, phi: &ClassifyingMap) -> Result<WeierstrassModel, FrobextError> {
    if phi.num().p() != m.p() {
        return Err(FrobextError::ModulusMismatch);
    }
    let chi = m.chi() as usize;
    let a = std::array::from_fn(|i| homogenized(&m.a()[i], WEIGHTS[i], chi, phi));
    Ok(m.with_coeffs(a)?)
}

/// Base change along a classifying map, minimalized.
pub fn base_change(m: &WeierstrassModel, phi: &ClassifyingMap) -> Result<WeierstrassModel, FrobextError> {
    Ok(minimalize_global(&base_change_raw(m, phi)?)?.0)
}

/// Artin-Schreier twist `a2 -> a2 + g a1^2`, with denominators cleared and minimalized.
pub fn quadratic_twist_char2(m: &WeierstrassModel, g: &RatFunc) -> Result<WeierstrassModel, FrobextError> {
    let p = m.p();
    if p != 2 {
        return Err(FrobextError::NotCharTwo(p));
    }
    if m.a1().is_zero() {
        return Err(FrobextError::SupersingularGeneric);
    }
    if g.is_zero() {
        return Ok(m.clone());
    }
    let d = g.den().clone();
    let mut a: [Poly; 5] = std::array::from_fn(|i| &m.a()[i] * &d.pow(WEIGHTS[i] as u32));
    let shift = &(&(g.num() * &d) * &m.a1().square()) * &Poly::one(p);
    a[1] = &a[1] + &shift;
    let raw = m.with_coeffs(a)?;
    Ok(minimalize_global(&raw)?.0)
}

/// Clears denominators of rational coefficients by scaling with their common denominator.
pub fn model_from_rational(p: u32, a: [RatFunc; 5]) -> Result<WeierstrassModel, FrobextError> {
    let mut lcm = Poly::one(p);
    for f in &a {
        let g = lcm.gcd(f.den());
        lcm = (&lcm * f.den()).div_exact(&g).expect("gcd divides");
    }
    let polys: Vec<Poly> = a
        .iter()
        .zip(WEIGHTS)
        .map(|(f, w)| {
            let scaled = f.mul_poly(&lcm.pow(w as u32));
            scaled.as_poly().expect("common denominator clears").clone()
        })
        .collect();
    Ok(WeierstrassModel::new(p, polys.try_into().expect("five"))?)
}

/// One equation of the Igusa table.
#[derive(Clone, Debug, Serialize)]
pub struct IgusaRow {
    /// `E`, `E^(p)`, `E^(p^2)`, ...
    pub label: String,
    /// Number of Frobenius pullbacks applied to the base curve.
    pub frobenius_power: u32,
    #[serde(serialize_with = "serialize_model")]
    pub model: WeierstrassModel,
    /// Whether the model was taken from the printed equation (otherwise it is the computed pullback).
    pub printed: bool,
    pub expected_fibers: Vec<String>,
}

fn serialize_model<S: serde::Serializer>(m: &WeierstrassModel, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&m.to_file(), s)
}

#[derive(Clone, Debug, Serialize)]
pub struct IgusaEntry {
    pub p_power: u32,
    pub p: u32,
    pub level: u32,
    #[serde(serialize_with = "serialize_model")]
    pub model: WeierstrassModel,
    pub fiber_table: Vec<String>,
    pub tower: Vec<IgusaRow>,
}

struct RowSpec {
    coeffs: Option<[&'static str; 5]>,
    fibers: &'static [(&'static str, usize)],
}

struct EntrySpec {
    p_power: u32,
    p: u32,
    level: u32,
    rows: &'static [RowSpec],
}

const IGUSA: &[EntrySpec] = &[
    EntrySpec {
        p_power: 11,
        p: 11,
        level: 1,
        rows: &[
            RowSpec {
                coeffs: Some(["0", "0", "0", "(t-1)^-1*t", "5*t^-1*(t-1)"]),
                fibers: &[("I_1", 5), ("II*", 1), ("III*", 1)],
            },
            RowSpec {
                coeffs: Some(["0", "0", "0", "(t-1)^-11*t^11", "5*t^-11*(t-1)^11"]),
                fibers: &[("I_{11}", 5), ("II", 1), ("III", 1)],
            },
        ],
    },
    EntrySpec {
        p_power: 9,
        p: 3,
        level: 2,
        rows: &[
            RowSpec { coeffs: Some(["t", "0", "0", "0", "-t^3*(t^2-1)"]), fibers: &[("I_1", 3), ("IV*_1", 1)] },
            RowSpec { coeffs: None, fibers: &[("I_3", 3), ("II_1", 1)] },
            RowSpec { coeffs: None, fibers: &[("I_9", 3), ("IV*_1", 1)] },
        ],
    },
    EntrySpec {
        p_power: 8,
        p: 2,
        level: 3,
        rows: &[
            RowSpec { coeffs: Some(["1", "0", "0", "0", "t*(t+1)"]), fibers: &[("I_1", 2), ("III*_1", 1)] },
            RowSpec { coeffs: Some(["1", "0", "0", "0", "t^2*(1+t^2)"]), fibers: &[("I_2", 2), ("I*_{1,1}", 1)] },
            RowSpec { coeffs: Some(["1", "0", "0", "0", "t^4*(1+t^4)"]), fibers: &[("I_4", 2), ("III_1", 1)] },
            RowSpec { coeffs: Some(["1", "0", "0", "0", "t^8*(1+t^8)"]), fibers: &[("I_8", 2), ("I*_{1,1}", 1)] },
        ],
    },
    EntrySpec {
        p_power: 7,
        p: 7,
        level: 1,
        rows: &[
            RowSpec { coeffs: Some(["0", "0", "0", "t^3", "5*t^6"]), fibers: &[("I_1", 3), ("III*", 1)] },
            RowSpec { coeffs: Some(["0", "0", "0", "t", "5*t^12"]), fibers: &[("I_7", 3), ("III", 1)] },
        ],
    },
    EntrySpec {
        p_power: 5,
        p: 5,
        level: 1,
        rows: &[
            RowSpec { coeffs: Some(["0", "0", "0", "3*t^4", "t^5"]), fibers: &[("I_1", 2), ("II*", 1)] },
            RowSpec { coeffs: Some(["0", "0", "0", "3*t^4", "t"]), fibers: &[("I_5", 2), ("II", 1)] },
        ],
    },
    EntrySpec {
        p_power: 4,
        p: 2,
        level: 2,
        rows: &[
            RowSpec { coeffs: Some(["1", "0", "0", "0", "t"]), fibers: &[("I_1", 1), ("II*_1", 1)] },
            RowSpec { coeffs: Some(["1", "0", "0", "0", "t^2"]), fibers: &[("I_2", 1), ("III*_1", 1)] },
            RowSpec { coeffs: Some(["1", "0", "0", "0", "t^4"]), fibers: &[("I_4", 1), ("I*_{1,1}", 1)] },
        ],
    },
    EntrySpec {
        p_power: 3,
        p: 3,
        level: 1,
        rows: &[
            RowSpec { coeffs: Some(["t", "0", "0", "0", "-t^5"]), fibers: &[("I_1", 1), ("II*_1", 1)] },
            RowSpec { coeffs: Some(["t", "0", "t^2", "0", "0"]), fibers: &[("I_3", 1), ("IV*_1", 1)] },
        ],
    },
];

/// Supported `p^n`, largest first.
pub const IGUSA_LEVELS: [u32; 7] = [11, 9, 8, 7, 5, 4, 3];

fn tower_label(k: u32) -> String {
    match k {
        0 => "E".into(),
        1 => "E^(p)".into(),
        _ => format!("E^(p^{k})"),
    }
}

fn expand_fibers(spec: &[(&str, usize)]) -> Vec<String> {
    let mut v: Vec<String> = spec.iter().flat_map(|(s, n)| std::iter::repeat_n(s.to_string(), *n)).collect();
    v.sort();
    v
}

/// The universal curve over the Igusa curve of level `p^n` and its Frobenius tower.
pub fn igusa_universal(p_power: u32) -> Result<IgusaEntry, FrobextError> {
    let spec = IGUSA.iter().find(|e| e.p_power == p_power).ok_or(FrobextError::UnsupportedIgusa(p_power))?;
    let p = spec.p;
    let mut tower = Vec::with_capacity(spec.rows.len());
    let mut base: Option<WeierstrassModel> = None;
    for (k, row) in spec.rows.iter().enumerate() {
        let k = k as u32;
        let model = match row.coeffs {
            Some(c) => {
                let a = c.map(|s| parse_ratfunc(s, p).expect("embedded equation parses"));
                minimalize_global(&model_from_rational(p, a)?)?.0
            }
            None => frobenius_pullback_n(base.as_ref().expect("base curve first"), k)?,
        };
        let model = model.with_label(format!("Ig({p_power}) {}", tower_label(k)));
        if k == 0 {
            base = Some(model.clone());
        }
        tower.push(IgusaRow {
            label: tower_label(k),
            frobenius_power: k,
            model,
            printed: row.coeffs.is_some(),
            expected_fibers: expand_fibers(row.fibers),
        });
    }
    let first = &tower[0];
    Ok(IgusaEntry {
        p_power,
        p,
        level: spec.level,
        model: first.model.clone(),
        fiber_table: first.expected_fibers.clone(),
        tower,
    })
}

/// Every Igusa entry, largest level first.
pub fn igusa_table() -> Vec<IgusaEntry> {
    IGUSA_LEVELS.iter().map(|&q| igusa_universal(q).expect("embedded entry")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(p: u32, a: [&str; 5]) -> WeierstrassModel {
        WeierstrassModel::from_strs(p, a).unwrap()
    }

    #[test]
    fn p7_pullback() {
        let e = model(7, ["0", "0", "0", "t^3", "5*t^6"]);
        assert_eq!(frobenius_pullback(&e).unwrap().equation(), "y^2 = x^3 + t*x + 5*t^12");
    }

    #[test]
    fn p2_triple_pullback() {
        let e = model(2, ["1", "0", "0", "0", "t*(t+1)"]);
        let printed = model(2, ["1", "0", "0", "0", "t^8*(1+t^8)"]);
        assert_eq!(e.substitute_power(8).a(), printed.a());
        assert_eq!(frobenius_pullback_n(&e, 3).unwrap(), minimalize_global(&printed).unwrap().0);
    }

    #[test]
    fn constant_model_fixed_by_frobenius() {
        let m = model(5, ["0", "0", "0", "1", "1"]);
        assert_eq!(frobenius_pullback(&m).unwrap(), m);
    }

    #[test]
    fn identity_base_change() {
        let m = model(5, ["0", "0", "0", "3*t^4", "t^5"]);
        let id = ClassifyingMap::new(Poly::t(5), Poly::one(5)).unwrap();
        assert_eq!(base_change(&m, &id).unwrap(), m);
        assert_eq!(ClassifyingMap::new(Poly::constant(5, 2), Poly::one(5)), Err(FrobextError::ConstantMap));
    }

    #[test]
    fn base_change_of_p5_universal() {
        let m = model(5, ["0", "0", "0", "3*t^4", "t^5"]);
        let phi = ClassifyingMap::parse("(2*t^2+3)/(t^2+1)", 5).unwrap();
        let y = base_change_raw(&m, &phi).unwrap();
        assert_eq!(y, model(5, ["0", "0", "0", "3*(2*t^2+3)^4", "(2*t^2+3)^5*(t^2+1)"]));
    }

    #[test]
    fn twist_requires_char2() {
        let m = model(3, ["t", "0", "0", "0", "-t^5"]);
        assert_eq!(quadratic_twist_char2(&m, &RatFunc::one(3)), Err(FrobextError::NotCharTwo(3)));
    }

    #[test]
    fn unsupported_level() {
        assert!(matches!(igusa_universal(6), Err(FrobextError::UnsupportedIgusa(6))));
        let e8 = igusa_universal(8).unwrap();
        assert_eq!(e8.model.equation(), "y^2 + x*y = x^3 + t^2 + t");
    }
}
