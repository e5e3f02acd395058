//! Generators for the parametrized constructions: each family builds a
//! rational or base surface `Y` and returns its Frobenius pullback `X`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{parse_ratfunc, Fp, Poly, RatFunc};
use crate::frobext::{
    base_change, frobenius_pullback, frobenius_pullback_n, igusa_universal, quadratic_twist_char2, ClassifyingMap,
};
use crate::sections::SectionPoint;
use crate::weierstrass::WeierstrassModel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("family {family} requires parameter '{name}'")]
    MissingParameter { family: &'static str, name: &'static str },
    #[error("family {family} does not take parameter '{name}'")]
    UnknownParameter { family: &'static str, name: String },
    #[error("parameter '{name}' is not an element of GF({p}): {value}")]
    NotFieldElement { name: String, p: u32, value: String },
    #[error("constraint violated: {0}")]
    Constraint(&'static str),
    #[error("parameter '{name}' must be a nonnegative integer")]
    NotInteger { name: &'static str },
    #[error("tower level {level} out of range for p^n = {p_power} (0..={max})")]
    TowerLevel { p_power: u32, level: u32, max: u32 },
}

/// Named parametrized constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Degree-2 base change `t = (alpha s^2 + beta) / (s^2 + 1)` of the level-5 universal curve.
    P5AlphaBeta,
    /// `y^2 = x^3 + s^2 x^2 + s^5 + r4 s^4 + ... + r0` with `r1 r0 != 0`.
    P3Deg6,
    /// Same shape with `r1 != 0`, `r0 = 0`.
    P3Deg5,
    /// Same shape with `r2 != 0`, `r1 = r0 = 0`.
    P3Deg4,
    /// `y^2 + t x y = x^3 + t^5 + r4 t^4 + r3 t^3 + r2 t^2`, pulled back twice.
    P2E84,
    /// Artin-Schreier twist of a characteristic 2 base curve.
    P2Twist,
    /// A member of an Igusa Frobenius tower.
    IgusaTower,
    /// `y^2 = x^3 + (t^2 + c) x^2 + (q1 t + q0) x + t^5 + r4 t^4 + ... + r0`, pulled back once.
    /// The pullback carries a rational 3-torsion section exactly when `c = 0`.
    P3E8e8,
    /// Base change of an Igusa universal curve along `phi`, then `pullbacks` Frobenius pullbacks.
    IgusaBaseChange,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 9] = [
        FamilyKind::P5AlphaBeta,
        FamilyKind::P3Deg6,
        FamilyKind::P3Deg5,
        FamilyKind::P3Deg4,
        FamilyKind::P2E84,
        FamilyKind::P2Twist,
        FamilyKind::IgusaTower,
        FamilyKind::P3E8e8,
        FamilyKind::IgusaBaseChange,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::P5AlphaBeta => "p5_alpha_beta",
            FamilyKind::P3Deg6 => "p3_deg6",
            FamilyKind::P3Deg5 => "p3_deg5",
            FamilyKind::P3Deg4 => "p3_deg4",
            FamilyKind::P2E84 => "p2_e84",
            FamilyKind::P2Twist => "p2_twist",
            FamilyKind::IgusaTower => "igusa_tower",
            FamilyKind::P3E8e8 => "p3_e8e8",
            FamilyKind::IgusaBaseChange => "igusa_base_change",
        }
    }

    pub fn characteristic(self) -> Option<u32> {
        match self {
            FamilyKind::P5AlphaBeta => Some(5),
            FamilyKind::P3Deg6 | FamilyKind::P3Deg5 | FamilyKind::P3Deg4 | FamilyKind::P3E8e8 => Some(3),
            FamilyKind::P2E84 | FamilyKind::P2Twist => Some(2),
            FamilyKind::IgusaTower | FamilyKind::IgusaBaseChange => None,
        }
    }

    /// Accepted parameter names.
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            FamilyKind::P5AlphaBeta => &["alpha", "beta"],
            FamilyKind::P3Deg6 | FamilyKind::P3Deg5 | FamilyKind::P3Deg4 => &["r4", "r3", "r2", "r1", "r0"],
            FamilyKind::P2E84 => &["r4", "r3", "r2"],
            FamilyKind::P2Twist => &["base", "g"],
            FamilyKind::IgusaTower => &["p_power", "level"],
            FamilyKind::P3E8e8 => &["c", "q1", "q0", "r4", "r3", "r2", "r1", "r0"],
            FamilyKind::IgusaBaseChange => &["p_power", "phi", "pullbacks"],
        }
    }
}

/// A family name with its parameter values, as read from a family spec file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: FamilyKind,
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
}

impl FamilySpec {
    pub fn new(family: FamilyKind) -> Self {
        FamilySpec { family, parameters: BTreeMap::new() }
    }

    pub fn with(mut self, name: &str, value: impl ToString) -> Self {
        self.parameters.insert(name.to_string(), value.to_string());
        self
    }

    fn check_names(&self) -> Result<(), FamilyError> {
        let allowed = self.family.parameters();
        match self.parameters.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(FamilyError::UnknownParameter { family: self.family.name(), name: k.clone() }),
            None => Ok(()),
        }
    }

    fn raw_param(&self, name: &'static str) -> Result<&str, FamilyError> {
        self.parameters
            .get(name)
            .map(String::as_str)
            .ok_or(FamilyError::MissingParameter { family: self.family.name(), name })
    }

    fn element(&self, name: &'static str, p: u32, default: Option<u32>) -> Result<u32, FamilyError> {
        let Some(src) = self.parameters.get(name) else {
            return default.ok_or(FamilyError::MissingParameter { family: self.family.name(), name });
        };
        let bad = || FamilyError::NotFieldElement { name: name.to_string(), p, value: src.clone() };
        let v: i64 = src.trim().parse().map_err(|_| bad())?;
        Ok(Fp::new(p, v).map_err(|_| bad())?.value())
    }
}

/// The two sides of a generated member: the base surface and its Frobenius pullback.
#[derive(Clone, Debug)]
pub struct Generated {
    pub base: WeierstrassModel,
    pub pullback: WeierstrassModel,
}

/// Char-3 quintic `s^5 + r4 s^4 + r3 s^3 + r2 s^2 + r1 s + r0`.
pub fn p3_quintic(r: [u32; 5]) -> Poly {
    let mut c: Vec<i64> = r.iter().rev().map(|&v| v as i64).collect();
    c.push(1);
    Poly::from_coeffs(3, &c)
}

fn p3_constraint(kind: FamilyKind, r: [u32; 5]) -> Result<(), FamilyError> {
    let [_, _, r2, r1, r0] = r;
    match kind {
        FamilyKind::P3Deg6 if r1 == 0 || r0 == 0 => Err(FamilyError::Constraint("deg phi = 6 requires r1 r0 != 0")),
        FamilyKind::P3Deg5 if r1 == 0 || r0 != 0 => {
            Err(FamilyError::Constraint("deg phi = 5 requires r1 != 0, r0 = 0"))
        }
        FamilyKind::P3Deg4 if r2 == 0 || r1 != 0 || r0 != 0 => {
            Err(FamilyError::Constraint("deg phi = 4 requires r2 != 0, r1 = r0 = 0"))
        }
        _ => Ok(()),
    }
}

/// Rational surface `y^2 = x^3 + s^2 x^2 + g(s)` for the char-3 families.
pub fn p3_base(r: [u32; 5]) -> Result<WeierstrassModel, crate::Error> {
    Ok(WeierstrassModel::new(3, [Poly::zero(3), Poly::monomial(3, 1, 2), Poly::zero(3), Poly::zero(3), p3_quintic(r)])?)
}

/// The 3-torsion section `(-g(t), t^3 g(t))` on the unminimalized pullback of [`p3_base`].
pub fn p3_torsion_section(r: [u32; 5]) -> SectionPoint {
    let g = RatFunc::from_poly(p3_quintic(r));
    let t3 = RatFunc::from_poly(Poly::monomial(3, 1, 3));
    SectionPoint::affine(g.neg_ref(), t3.mul_ref(&g))
}

fn p5_params(spec: &FamilySpec) -> Result<(u32, u32), FamilyError> {
    let alpha = spec.element("alpha", 5, None)?;
    let beta = spec.element("beta", 5, None)?;
    if alpha == beta {
        return Err(FamilyError::Constraint("alpha != beta (the classifying map must be nonconstant)"));
    }
    Ok((alpha, beta))
}

/// Classifying map `(alpha s^2 + beta) / (s^2 + 1)` over GF(5).
pub fn p5_map(alpha: u32, beta: u32) -> Result<ClassifyingMap, crate::Error> {
    let num = Poly::from_coeffs(5, &[beta as i64, 0, alpha as i64]);
    let den = Poly::from_coeffs(5, &[1, 0, 1]);
    Ok(ClassifyingMap::new(num, den)?)
}

fn twist_base(name: &str) -> Result<WeierstrassModel, crate::Error> {
    let a = match name {
        "igusa4" => ["1", "0", "0", "0", "t^2"],
        "isotrivial" => ["1", "0", "0", "0", "1"],
        _ => return Err(FamilyError::Constraint("p2_twist base must be 'igusa4' or 'isotrivial'").into()),
    };
    Ok(WeierstrassModel::from_strs(2, a)?)
}

fn integer_param(spec: &FamilySpec, name: &'static str, default: Option<u32>) -> Result<u32, FamilyError> {
    match spec.parameters.get(name) {
        Some(s) => s.trim().parse().map_err(|_| FamilyError::NotInteger { name }),
        None => default.ok_or(FamilyError::MissingParameter { family: spec.family.name(), name }),
    }
}

/// Builds both sides of a family member.
pub fn generate_both(spec: &FamilySpec) -> Result<Generated, crate::Error> {
    spec.check_names()?;
    let kind = spec.family;
    match kind {
        FamilyKind::P5AlphaBeta => {
            let (alpha, beta) = p5_params(spec)?;
            let universal = igusa_universal(5)?.model;
            let base = base_change(&universal, &p5_map(alpha, beta)?)?;
            let pullback = frobenius_pullback(&base)?;
            Ok(Generated { base, pullback })
        }
        FamilyKind::P3Deg6 | FamilyKind::P3Deg5 | FamilyKind::P3Deg4 => {
            let names = ["r4", "r3", "r2", "r1", "r0"];
            let mut r = [0u32; 5];
            for (slot, name) in r.iter_mut().zip(names) {
                *slot = spec.element(name, 3, Some(0))?;
            }
            p3_constraint(kind, r)?;
            let base = p3_base(r)?;
            let pullback = frobenius_pullback(&base)?;
            Ok(Generated { base, pullback })
        }
        FamilyKind::P2E84 => {
            let r4 = spec.element("r4", 2, Some(0))?;
            let r3 = spec.element("r3", 2, Some(0))?;
            let r2 = spec.element("r2", 2, Some(0))?;
            let a6 = Poly::from_coeffs(2, &[0, 0, r2 as i64, r3 as i64, r4 as i64, 1]);
            let base = WeierstrassModel::new(2, [Poly::t(2), Poly::zero(2), Poly::zero(2), Poly::zero(2), a6])?;
            let pullback = frobenius_pullback_n(&base, 2)?;
            Ok(Generated { base, pullback })
        }
        FamilyKind::P2Twist => {
            let base = twist_base(spec.parameters.get("base").map(String::as_str).unwrap_or("igusa4"))?;
            let g = parse_ratfunc(spec.raw_param("g")?, 2)?;
            let pullback = quadratic_twist_char2(&base, &g)?;
            Ok(Generated { base, pullback })
        }
        FamilyKind::IgusaTower => {
            let p_power = integer_param(spec, "p_power", None)?;
            let entry = igusa_universal(p_power)?;
            let max = entry.tower.len() as u32 - 1;
            let level = integer_param(spec, "level", Some(max))?;
            if level > max {
                return Err(FamilyError::TowerLevel { p_power, level, max }.into());
            }
            Ok(Generated { base: entry.model.clone(), pullback: entry.tower[level as usize].model.clone() })
        }
        FamilyKind::P3E8e8 => {
            let names = ["c", "q1", "q0", "r4", "r3", "r2", "r1", "r0"];
            let mut v = [0i64; 8];
            for (slot, name) in v.iter_mut().zip(names) {
                *slot = spec.element(name, 3, Some(0))? as i64;
            }
            let [c, q1, q0, r4, r3, r2, r1, r0] = v;
            let a = [
                Poly::zero(3),
                Poly::from_coeffs(3, &[c, 0, 1]),
                Poly::zero(3),
                Poly::from_coeffs(3, &[q0, q1]),
                Poly::from_coeffs(3, &[r0, r1, r2, r3, r4, 1]),
            ];
            let base = WeierstrassModel::new(3, a)?;
            let pullback = frobenius_pullback(&base)?;
            Ok(Generated { base, pullback })
        }
        FamilyKind::IgusaBaseChange => {
            let p_power = integer_param(spec, "p_power", None)?;
            let universal = igusa_universal(p_power)?.model;
            let phi = ClassifyingMap::parse(spec.raw_param("phi")?, universal.p())?;
            let pullbacks = integer_param(spec, "pullbacks", Some(1))?;
            let base = base_change(&universal, &phi)?;
            let pullback = if pullbacks == 0 { base.clone() } else { frobenius_pullback_n(&base, pullbacks)? };
            Ok(Generated { base, pullback })
        }
    }
}

/// The pullback side of a family member, or the base side when `raw` is set.
pub fn generate(spec: &FamilySpec, raw: bool) -> Result<WeierstrassModel, crate::Error> {
    let g = generate_both(spec)?;
    Ok(if raw { g.base } else { g.pullback })
}
