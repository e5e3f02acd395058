//! Long Weierstrass models over GF(p)[t], their invariants and coordinate changes.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{parse_poly, ParseError, Poly, RatFunc};

/// Weights of a1, a2, a3, a4, a6.
pub const WEIGHTS: [usize; 5] = [1, 2, 3, 4, 6];
pub const NAMES: [&str; 5] = ["a1", "a2", "a3", "a4", "a6"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeierstrassError {
    #[error("singular generic fiber (discriminant is zero)")]
    Singular,
    #[error("coefficient {name}: {error}")]
    Coefficient { name: &'static str, error: ParseError },
    #[error("model file: {0}")]
    File(String),
    #[error("non-invertible scaling u in coordinate change")]
    NonInvertibleScaling,
    #[error("coordinate change leaves GF(p)[t]: {0} is not a polynomial")]
    NotPolynomial(&'static str),
    #[error("normalization {target} impossible in characteristic {p}")]
    CharacteristicObstruction { target: &'static str, p: u32 },
    #[error("model is not globally minimal; minimalize it first")]
    NotMinimal,
    #[error("modulus mismatch in coefficients")]
    ModulusMismatch,
    #[error("unsupported modulus {0}")]
    BadModulus(u32),
}

/// `y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6` with `a_i` in GF(p)[t].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassModel {
    p: u32,
    a: [Poly; 5],
    chi: u32,
    label: String,
}

/// The standard quantities b2..b8, c4, c6, discriminant and j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantSet {
    pub b2: Poly,
    pub b4: Poly,
    pub b6: Poly,
    pub b8: Poly,
    pub c4: Poly,
    pub c6: Poly,
    pub delta: Poly,
    pub j: RatFunc,
}

/// `x = u^2 x' + r`, `y = u^3 y' + s u^2 x' + w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateChange {
    pub u: RatFunc,
    pub r: RatFunc,
    pub s: RatFunc,
    pub w: RatFunc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalForm {
    /// a1 = a3 = 0, needs p != 2.
    A1A3Zero,
    /// a1 = a2 = a3 = 0, needs p >= 5.
    A1A2A3Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "class", content = "chi")]
pub enum SurfaceClass {
    Rational,
    K3,
    Other(u32),
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceClass::Rational => write!(f, "rational"),
            SurfaceClass::K3 => write!(f, "K3"),
            SurfaceClass::Other(c) => write!(f, "other(chi={c})"),
        }
    }
}

/// JSON model file: `p`, `a1`..`a6` polynomial strings, optional `label`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModelFile {
    pub p: u32,
    #[serde(default = "zero_str")]
    pub a1: String,
    #[serde(default = "zero_str")]
    pub a2: String,
    #[serde(default = "zero_str")]
    pub a3: String,
    #[serde(default = "zero_str")]
    pub a4: String,
    #[serde(default = "zero_str")]
    pub a6: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
}

fn zero_str() -> String {
    "0".into()
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Smallest chi with deg a_i <= i * chi for every coefficient.
pub fn degree_chi(a: &[Poly; 5]) -> u32 {
    a.iter().zip(WEIGHTS).filter_map(|(c, w)| c.degree().map(|d| ceil_div(d, w))).max().unwrap_or(0) as u32
}

fn universal_invariants(p: u32, a: &[Poly; 5]) -> InvariantSet {
    let [a1, a2, a3, a4, a6] = a;
    let k = |v: i64| Poly::constant(p, v);
    let b2 = &a1.square() + &a2.scale_i64(4);
    let b4 = &a4.scale_i64(2) + &(a1 * a3);
    let b6 = &a3.square() + &a6.scale_i64(4);
    let b8 = &(&(&(&a1.square() * a6) + &(a2 * a6).scale_i64(4)) - &(&(a1 * a3) * a4))
        + &(&(a2 * &a3.square()) - &a4.square());
    let c4 = &b2.square() - &b4.scale_i64(24);
    let c6 = &(&(-&(&b2.square() * &b2)) + &(&b2 * &b4).scale_i64(36)) - &b6.scale_i64(216);
    let delta = &(&(&(-&(&b2.square() * &b8)) - &(&b4.square() * &b4).scale_i64(8)) - &b6.square().scale_i64(27))
        + &(&(&b2 * &b4) * &b6).scale_i64(9);
    let _ = k;
    let j = if delta.is_zero() {
        RatFunc::zero(p)
    } else {
        RatFunc::new(&c4.square() * &c4, delta.clone()).expect("nonzero discriminant")
    };
    InvariantSet { b2, b4, b6, b8, c4, c6, delta, j }
}

impl WeierstrassModel {
    pub fn new(p: u32, a: [Poly; 5]) -> Result<Self, WeierstrassError> {
        if !crate::algebra::is_prime(p) {
            return Err(WeierstrassError::BadModulus(p));
        }
        if a.iter().any(|c| c.p() != p) {
            return Err(WeierstrassError::ModulusMismatch);
        }
        let inv = universal_invariants(p, &a);
        if inv.delta.is_zero() {
            return Err(WeierstrassError::Singular);
        }
        let chi = degree_chi(&a);
        Ok(WeierstrassModel { p, a, chi, label: String::new() })
    }

    /// Builds a model from integer coefficient lists (lowest degree first).
    pub fn from_coeffs(p: u32, a: [&[i64]; 5]) -> Result<Self, WeierstrassError> {
        Self::new(p, a.map(|c| Poly::from_coeffs(p, c)))
    }

    pub fn from_strs(p: u32, a: [&str; 5]) -> Result<Self, WeierstrassError> {
        let mut polys = Vec::with_capacity(5);
        for (i, s) in a.iter().enumerate() {
            let f = parse_poly(s, p).map_err(|e| WeierstrassError::Coefficient { name: NAMES[i], error: e })?;
            polys.push(f);
        }
        Self::new(p, polys.try_into().expect("five coefficients"))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn a(&self) -> &[Poly; 5] {
        &self.a
    }

    pub fn a1(&self) -> &Poly {
        &self.a[0]
    }
    pub fn a2(&self) -> &Poly {
        &self.a[1]
    }
    pub fn a3(&self) -> &Poly {
        &self.a[2]
    }
    pub fn a4(&self) -> &Poly {
        &self.a[3]
    }
    pub fn a6(&self) -> &Poly {
        &self.a[4]
    }

    /// Coefficient of `t^j` in `a_i` (i in 1, 2, 3, 4, 6).
    pub fn coeff(&self, i: usize, j: usize) -> u32 {
        let idx = WEIGHTS.iter().position(|&w| w == i).expect("index in 1,2,3,4,6");
        self.a[idx].coeff(j)
    }

    pub fn chi(&self) -> u32 {
        self.chi
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn invariants(&self) -> InvariantSet {
        universal_invariants(self.p, &self.a)
    }

    pub fn discriminant(&self) -> Poly {
        self.invariants().delta
    }

    pub fn j_invariant(&self) -> RatFunc {
        self.invariants().j
    }

    pub fn has_constant_j(&self) -> bool {
        self.j_invariant().is_constant()
    }

    /// Replaces the coefficients, keeping the label.
    pub(crate) fn with_coeffs(&self, a: [Poly; 5]) -> Result<Self, WeierstrassError> {
        Ok(Self::new(self.p, a)?.with_label(self.label.clone()))
    }

    /// Polynomial translation `x -> x + r`, `y -> y + s x + w`.
    pub fn translate(&self, r: &Poly, s: &Poly, w: &Poly) -> Self {
        let [a1, a2, a3, a4, a6] = &self.a;
        let n1 = a1 + &s.scale_i64(2);
        let n2 = &(&(a2 - &(s * a1)) + &r.scale_i64(3)) - &s.square();
        let n3 = &(a3 + &(r * a1)) + &w.scale_i64(2);
        let n4 = &(&(&(&(a4 - &(s * a3)) + &(r * a2).scale_i64(2)) - &(&(w + &(r * s)) * a1))
            + &r.square().scale_i64(3))
            - &(s * w).scale_i64(2);
        let n6 = &(&(&(&(&(a6 + &(r * a4)) + &(&r.square() * a2)) + &(&r.square() * r)) - &(w * a3)) - &w.square())
            - &(&(r * w) * a1);
        WeierstrassModel { p: self.p, a: [n1, n2, n3, n4, n6], chi: 0, label: self.label.clone() }.rechi()
    }

    fn rechi(mut self) -> Self {
        self.chi = degree_chi(&self.a);
        self
    }

    /// Divides every `a_i` by `pi^i`, if exact.
    pub fn scale_down(&self, pi: &Poly) -> Option<Self> {
        let mut out = self.a.clone();
        for (k, w) in WEIGHTS.iter().enumerate() {
            out[k] = self.a[k].div_exact(&pi.pow(*w as u32))?;
        }
        Some(WeierstrassModel { p: self.p, a: out, chi: 0, label: self.label.clone() }.rechi())
    }

    /// Coefficients of the chart at infinity with parameter `s = 1/t`, for a given chi.
    pub fn flip(&self, chi: u32) -> Self {
        let a = std::array::from_fn(|k| self.a[k].reverse(WEIGHTS[k] * chi as usize));
        WeierstrassModel { p: self.p, a, chi, label: self.label.clone() }
    }

    /// `a_i(t) -> a_i(t^k)`.
    pub fn substitute_power(&self, k: usize) -> Self {
        let a = std::array::from_fn(|i| self.a[i].substitute_power(k));
        WeierstrassModel { p: self.p, a, chi: 0, label: self.label.clone() }.rechi()
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            p: self.p,
            a1: self.a[0].to_string(),
            a2: self.a[1].to_string(),
            a3: self.a[2].to_string(),
            a4: self.a[3].to_string(),
            a6: self.a[4].to_string(),
            label: self.label.clone(),
        }
    }

    /// The equation in the usual long form.
    pub fn equation(&self) -> String {
        fn term(c: &Poly, mono: &str) -> Option<String> {
            if c.is_zero() {
                return None;
            }
            if mono.is_empty() {
                return Some(c.to_string());
            }
            if c.is_one() {
                return Some(mono.to_string());
            }
            let s = c.to_string();
            Some(if s.contains(' ') { format!("({s})*{mono}") } else { format!("{s}*{mono}") })
        }
        let lhs: Vec<String> =
            ["y^2".to_string()].into_iter().chain(term(&self.a[0], "x*y")).chain(term(&self.a[2], "y")).collect();
        let rhs: Vec<String> = ["x^3".to_string()]
            .into_iter()
            .chain(term(&self.a[1], "x^2"))
            .chain(term(&self.a[3], "x"))
            .chain(term(&self.a[4], ""))
            .collect();
        format!("{} = {}", lhs.join(" + "), rhs.join(" + "))
    }
}

impl fmt::Display for WeierstrassModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over GF({})", self.equation(), self.p)
    }
}

impl ModelFile {
    pub fn to_model(&self) -> Result<WeierstrassModel, WeierstrassError> {
        let m = WeierstrassModel::from_strs(self.p, [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6])?;
        Ok(m.with_label(self.label.clone()))
    }
}

/// Parses a JSON model file.
pub fn parse_model(text: &str) -> Result<WeierstrassModel, WeierstrassError> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| WeierstrassError::File(e.to_string()))?;
    file.to_model()
}

impl CoordinateChange {
    pub fn identity(p: u32) -> Self {
        CoordinateChange { u: RatFunc::one(p), r: RatFunc::zero(p), s: RatFunc::zero(p), w: RatFunc::zero(p) }
    }

    pub fn new(u: RatFunc, r: RatFunc, s: RatFunc, w: RatFunc) -> Self {
        CoordinateChange { u, r, s, w }
    }

    pub fn translation(r: Poly, s: Poly, w: Poly) -> Self {
        let p = r.p();
        CoordinateChange { u: RatFunc::one(p), r: r.into(), s: s.into(), w: w.into() }
    }

    pub fn scaling(u: RatFunc) -> Self {
        let p = u.p();
        CoordinateChange { u, r: RatFunc::zero(p), s: RatFunc::zero(p), w: RatFunc::zero(p) }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.u.p())
    }

    /// The change equal to applying `self` first and then `next`.
    pub fn then(&self, next: &CoordinateChange) -> CoordinateChange {
        let (u1, r1, s1, w1) = (&self.u, &self.r, &self.s, &self.w);
        let (u2, r2, s2, w2) = (&next.u, &next.r, &next.s, &next.w);
        let u1sq = u1 * u1;
        let u = u1 * u2;
        let r = r1 + &(&u1sq * r2);
        let s = s1 + &(u1 * s2);
        let w = &(w1 + &(&(&u1sq * s1) * r2)) + &(&(&u1sq * u1) * w2);
        CoordinateChange { u, r, s, w }
    }

    pub fn inverse(&self) -> Result<CoordinateChange, WeierstrassError> {
        let ui = self.u.inv().map_err(|_| WeierstrassError::NonInvertibleScaling)?;
        let ui2 = &ui * &ui;
        let ui3 = &ui2 * &ui;
        let r = -&(&self.r * &ui2);
        let s = -&(&self.s * &ui);
        let w = &(&(&self.r * &self.s) - &self.w) * &ui3;
        Ok(CoordinateChange { u: ui, r, s, w })
    }
}

/// Applies a coordinate change; the result must again have polynomial coefficients.
pub fn change_coordinates(m: &WeierstrassModel, c: &CoordinateChange) -> Result<WeierstrassModel, WeierstrassError> {
    if c.u.is_zero() {
        return Err(WeierstrassError::NonInvertibleScaling);
    }
    let a: Vec<RatFunc> = m.a.iter().map(|f| RatFunc::from_poly(f.clone())).collect();
    let (a1, a2, a3, a4, a6) = (&a[0], &a[1], &a[2], &a[3], &a[4]);
    let (u, r, s, w) = (&c.u, &c.r, &c.s, &c.w);
    let k = |v: i64| RatFunc::constant(m.p, v);
    let n1 = a1 + &(&k(2) * s);
    let n2 = &(&(a2 - &(s * a1)) + &(&k(3) * r)) - &(s * s);
    let n3 = &(a3 + &(r * a1)) + &(&k(2) * w);
    let n4 = &(&(&(&(a4 - &(s * a3)) + &(&k(2) * &(r * a2))) - &(&(w + &(r * s)) * a1)) + &(&k(3) * &(r * r)))
        - &(&k(2) * &(s * w));
    let n6 =
        &(&(&(&(&(a6 + &(r * a4)) + &(&(r * r) * a2)) + &(&(r * r) * r)) - &(w * a3)) - &(w * w)) - &(&(r * w) * a1);
    let mut out = Vec::with_capacity(5);
    for (idx, (val, wgt)) in [n1, n2, n3, n4, n6].into_iter().zip(WEIGHTS).enumerate() {
        let scaled = &val / &u.pow(wgt as i64).expect("nonzero u");
        match scaled.as_poly() {
            Some(f) => out.push(f.clone()),
            None => return Err(WeierstrassError::NotPolynomial(NAMES[idx])),
        }
    }
    m.with_coeffs(out.try_into().expect("five coefficients"))
}

/// Completes the square (and the cube for p >= 5).
pub fn normalize(
    m: &WeierstrassModel,
    target: NormalForm,
) -> Result<(WeierstrassModel, CoordinateChange), WeierstrassError> {
    let p = m.p;
    match target {
        NormalForm::A1A3Zero if p == 2 => {
            return Err(WeierstrassError::CharacteristicObstruction { target: "a1 = a3 = 0", p })
        }
        NormalForm::A1A2A3Zero if p < 5 => {
            return Err(WeierstrassError::CharacteristicObstruction { target: "a1 = a2 = a3 = 0", p })
        }
        _ => {}
    }
    let half = RatFunc::constant(p, 1).div_ref(&RatFunc::constant(p, 2)).expect("2 invertible");
    let s = -&(&RatFunc::from_poly(m.a[0].clone()) * &half);
    let w = -&(&RatFunc::from_poly(m.a[2].clone()) * &half);
    let first = CoordinateChange::new(RatFunc::one(p), RatFunc::zero(p), s, w);
    let m1 = change_coordinates(m, &first)?;
    if target == NormalForm::A1A3Zero {
        return Ok((m1, first));
    }
    let third = RatFunc::constant(p, 1).div_ref(&RatFunc::constant(p, 3)).expect("3 invertible");
    let r = -&(&RatFunc::from_poly(m1.a[1].clone()) * &third);
    let second = CoordinateChange::new(RatFunc::one(p), r, RatFunc::zero(p), RatFunc::zero(p));
    let m2 = change_coordinates(&m1, &second)?;
    Ok((m2, first.then(&second)))
}

/// Rational (chi = 1), K3 (chi = 2) or other, for a globally minimal model.
pub fn classify_surface(m: &WeierstrassModel) -> Result<SurfaceClass, WeierstrassError> {
    if !crate::tate::is_globally_minimal(m) {
        return Err(WeierstrassError::NotMinimal);
    }
    Ok(match m.chi {
        1 => SurfaceClass::Rational,
        2 => SurfaceClass::K3,
        c => SurfaceClass::Other(c),
    })
}
