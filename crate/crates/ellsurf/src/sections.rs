//! Sections of elliptic surfaces: the group law over GF(p)(t), exact orders,
//! bounded torsion search, fixed loci of torsion translation and the
//! torsion height identity.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{factor, parse_ratfunc, ParseError, Poly, RatFunc};
use crate::parallel::{self, Execution};
use crate::tate::{FiberAnalysis, KodairaSymbol, ReductionClass};
use crate::weierstrass::WeierstrassModel;

/// Largest number of candidates a torsion search may scan.
pub const MAX_CANDIDATES: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SectionsError {
    #[error("search space of {0} candidates exceeds {MAX_CANDIDATES}; use a smaller degree bound")]
    SearchTooLarge(u64),
    #[error("torsion order {0} outside the supported range 2..=16")]
    BadOrder(u32),
    #[error("degree bound {0} exceeds 16")]
    BadDegreeBound(usize),
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("point coordinate: {0}")]
    Coordinate(#[from] ParseError),
    #[error("fixed-locus table has no row for {0}")]
    FixedLocus(String),
    #[error("torsion height identity needs multiplicative fibers I_(p n): {0}")]
    HeightIdentity(String),
    #[error("{0} fibers with non-empty fixed locus; at most two are possible")]
    TooManyFixedFibers(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SectionPoint {
    Zero,
    Affine { x: RatFunc, y: RatFunc },
}

impl SectionPoint {
    pub fn affine(x: RatFunc, y: RatFunc) -> Self {
        SectionPoint::Affine { x, y }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SectionPoint::Zero)
    }

    pub fn x(&self) -> Option<&RatFunc> {
        match self {
            SectionPoint::Zero => None,
            SectionPoint::Affine { x, .. } => Some(x),
        }
    }

    /// Parses `x` and `y` rational-function strings.
    pub fn parse(m: &WeierstrassModel, x: &str, y: &str) -> Result<Self, SectionsError> {
        let pt = SectionPoint::affine(parse_ratfunc(x, m.p())?, parse_ratfunc(y, m.p())?);
        if !on_curve(m, &pt) {
            return Err(SectionsError::NotOnCurve);
        }
        Ok(pt)
    }
}

impl fmt::Display for SectionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectionPoint::Zero => write!(f, "zero"),
            SectionPoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

impl Serialize for SectionPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            SectionPoint::Zero => s.serialize_str("zero"),
            SectionPoint::Affine { x, y } => {
                let mut map = s.serialize_map(Some(2))?;
                map.serialize_entry("x", &x.to_string())?;
                map.serialize_entry("y", &y.to_string())?;
                map.end()
            }
        }
    }
}

fn coeffs(m: &WeierstrassModel) -> [RatFunc; 5] {
    std::array::from_fn(|i| RatFunc::from_poly(m.a()[i].clone()))
}

pub fn on_curve(m: &WeierstrassModel, pt: &SectionPoint) -> bool {
    match pt {
        SectionPoint::Zero => true,
        SectionPoint::Affine { x, y } => {
            let [a1, a2, a3, a4, a6] = coeffs(m);
            let lhs = &(y * y) + &(&(&(&a1 * x) * y) + &(&a3 * y));
            let rhs = &(&(&(x * x) * x) + &(&(&a2 * x) * x)) + &(&(&a4 * x) + &a6);
            lhs == rhs
        }
    }
}

pub fn neg(m: &WeierstrassModel, pt: &SectionPoint) -> SectionPoint {
    match pt {
        SectionPoint::Zero => SectionPoint::Zero,
        SectionPoint::Affine { x, y } => {
            let [a1, _, a3, _, _] = coeffs(m);
            SectionPoint::affine(x.clone(), &(&-y - &(&a1 * x)) - &a3)
        }
    }
}

/// Chord-tangent addition on the long Weierstrass form.
pub fn add(m: &WeierstrassModel, a: &SectionPoint, b: &SectionPoint) -> SectionPoint {
    let (x1, y1, x2, y2) = match (a, b) {
        (SectionPoint::Zero, _) => return b.clone(),
        (_, SectionPoint::Zero) => return a.clone(),
        (SectionPoint::Affine { x: x1, y: y1 }, SectionPoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
    };
    let [a1, a2, a3, a4, a6] = coeffs(m);
    let p = m.p();
    let k = |v: i64| RatFunc::constant(p, v);
    let (lambda, nu) = if x1 != x2 {
        let dx = x2 - x1;
        let lambda = (y2 - y1).div_ref(&dx).expect("distinct x");
        let nu = (&(y1 * x2) - &(y2 * x1)).div_ref(&dx).expect("distinct x");
        (lambda, nu)
    } else {
        if (&(&(y1 + y2) + &(&a1 * x1)) + &a3).is_zero() {
            return SectionPoint::Zero;
        }
        let denom = &(&(&k(2) * y1) + &(&a1 * x1)) + &a3;
        if denom.is_zero() {
            return SectionPoint::Zero;
        }
        let x1sq = x1 * x1;
        let num_l = &(&(&(&k(3) * &x1sq) + &(&(&k(2) * &a2) * x1)) + &a4) - &(&a1 * y1);
        let num_n = &(&(&(-&(&x1sq * x1)) + &(&a4 * x1)) + &(&k(2) * &a6)) - &(&a3 * y1);
        (num_l.div_ref(&denom).expect("nonzero"), num_n.div_ref(&denom).expect("nonzero"))
    };
    let x3 = &(&(&(&(&lambda * &lambda) + &(&a1 * &lambda)) - &a2) - x1) - x2;
    let y3 = &(&(-&(&(&lambda + &a1) * &x3)) - &nu) - &a3;
    SectionPoint::affine(x3, y3)
}

/// `n * P` by double-and-add.
pub fn multiply(m: &WeierstrassModel, pt: &SectionPoint, n: u64) -> SectionPoint {
    let mut acc = SectionPoint::Zero;
    let mut base = pt.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = add(m, &acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = add(m, &base, &base);
        }
    }
    acc
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Exact order of `P` if it is at most `bound`.
pub fn order_of(m: &WeierstrassModel, pt: &SectionPoint, bound: u32) -> Option<u32> {
    let mut q = pt.clone();
    for n in 1..=bound.max(1) {
        if q.is_zero() {
            let certified = prime_factors(n).into_iter().all(|r| !multiply(m, pt, (n / r) as u64).is_zero());
            return certified.then_some(n);
        }
        q = add(m, &q, pt);
    }
    None
}

/// Square roots of `r` in GF(2)[t]-coefficients solving `B^2 + h B = r`.
fn solve_artin_schreier(h: &Poly, r: &Poly) -> Vec<Poly> {
    let p = 2;
    if h.is_zero() {
        return r.sqrt().into_iter().collect();
    }
    let dh = h.degree().unwrap();
    let dr = r.degree().map(|d| d.div_ceil(2)).unwrap_or(0);
    let nb = dh.max(dr) + 1;
    let rows = (2 * (nb - 1)).max(dh + nb - 1).max(r.degree().unwrap_or(0)) + 1;
    // columns: image of each basis monomial t^i under B -> B^2 + hB
    let mut cols: Vec<Vec<u8>> = Vec::with_capacity(nb);
    for i in 0..nb {
        let b = Poly::monomial(p, 1, i);
        let img = &b.square() + &(h * &b);
        cols.push((0..rows).map(|k| img.coeff(k) as u8).collect());
    }
    let target: Vec<u8> = (0..rows).map(|k| r.coeff(k) as u8).collect();
    // Gaussian elimination on the augmented matrix [cols | target]
    let mut mat: Vec<Vec<u8>> = (0..rows)
        .map(|k| {
            let mut row: Vec<u8> = cols.iter().map(|c| c[k]).collect();
            row.push(target[k]);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..nb {
        let Some(pr) = (row..rows).find(|&k| mat[k][col] == 1) else { continue };
        mat.swap(row, pr);
        for k in 0..rows {
            if k != row && mat[k][col] == 1 {
                let pivot_row = mat[row].clone();
                for (a, b) in mat[k].iter_mut().zip(pivot_row) {
                    *a ^= b;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if mat[row..].iter().any(|r| r[nb] == 1) {
        return Vec::new();
    }
    let mut sol = vec![0i64; nb];
    for (i, &col) in pivots.iter().enumerate() {
        sol[col] = mat[i][nb] as i64;
    }
    let b0 = Poly::from_coeffs(p, &sol);
    let b1 = &b0 + h;
    let mut out = vec![b0, b1];
    out.sort_by(|a, b| a.canonical_cmp(b));
    out.dedup();
    out
}

fn candidate_poly(p: u32, mut idx: u64, len: usize) -> Poly {
    let mut c = Vec::with_capacity(len);
    for _ in 0..len {
        c.push((idx % p as u64) as i64);
        idx /= p as u64;
    }
    Poly::from_coeffs(p, &c)
}

/// Finite places of good supersingular reduction, where a `p`-power torsion section may meet the zero section.
fn good_supersingular_factors(m: &WeierstrassModel) -> Vec<Poly> {
    let j = m.j_invariant();
    if j.is_constant() {
        return Vec::new();
    }
    let ss = crate::brauer::supersingular_j(m.p()).polynomial;
    let value = RatFunc::eval_poly(&ss, &j);
    if value.num().is_constant() {
        return Vec::new();
    }
    let delta = m.discriminant();
    factor(value.num())
        .expect("nonzero")
        .factors
        .into_iter()
        .map(|(f, _)| f)
        .filter(|f| !delta.rem(f).is_zero())
        .collect()
}

/// Sections of exact order `n` with `x = A/E^2`, `deg A <= deg_bound`, `E` a square-free
/// product of bad finite places (and of good supersingular ones when `p` divides `n`).
/// Output order follows the candidate encoding.
pub fn torsion_search(m: &WeierstrassModel, n: u32, deg_bound: usize) -> Result<Vec<SectionPoint>, SectionsError> {
    torsion_search_with(m, n, deg_bound, Execution::best())
}

pub fn torsion_search_with(
    m: &WeierstrassModel,
    n: u32,
    deg_bound: usize,
    mode: Execution,
) -> Result<Vec<SectionPoint>, SectionsError> {
    if !(2..=16).contains(&n) {
        return Err(SectionsError::BadOrder(n));
    }
    if deg_bound > 16 {
        return Err(SectionsError::BadDegreeBound(deg_bound));
    }
    let p = m.p();
    let delta = m.discriminant();
    let places: Vec<Poly> = if delta.is_constant() {
        Vec::new()
    } else {
        factor(&delta).expect("nonzero").factors.into_iter().map(|(f, _)| f).collect()
    };
    let mut places = places;
    if n.is_multiple_of(p) {
        places.extend(good_supersingular_factors(m));
    }
    let denominators: Vec<Poly> = (0..1u64 << places.len())
        .map(|mask| {
            places.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(Poly::one(p), |acc, (_, f)| &acc * f)
        })
        .collect();
    let per_den = (p as u64).checked_pow(deg_bound as u32 + 1).unwrap_or(u64::MAX);
    let total = per_den.saturating_mul(denominators.len() as u64);
    if total > MAX_CANDIDATES {
        return Err(SectionsError::SearchTooLarge(total));
    }
    let [a1, a2, a3, a4, a6] = m.a().clone();
    let found: Vec<Vec<SectionPoint>> = parallel::filter_map_range(mode, total, |idx| {
        let e = &denominators[(idx / per_den) as usize];
        let a = candidate_poly(p, idx % per_den, deg_bound + 1);
        let e2 = e.square();
        let e3 = &e2 * e;
        let h = &(&(&a1 * &a) * e) + &(&a3 * &e3);
        let r = &(&(&(&(&a.square() * &a) + &(&(&a2 * &a.square()) * &e2)) + &(&(&a4 * &a) * &e2.square()))
            + &(&a6 * &e3.square()));
        let bs: Vec<Poly> = if p == 2 {
            solve_artin_schreier(&h, r)
        } else {
            let disc = &h.square() + &r.scale_i64(4);
            let root = disc.sqrt()?;
            let half = Poly::constant(p, 1).scale(crate::algebra::fp::inv_mod(p, 2));
            let mut v = vec![&(&-&h + &root) * &half, &(&-&h - &root) * &half];
            v.sort_by(|x, y| x.canonical_cmp(y));
            v.dedup();
            v
        };
        let x = RatFunc::new(a.clone(), e2.clone()).expect("nonzero denominator");
        let pts: Vec<SectionPoint> = bs
            .into_iter()
            .map(|b| SectionPoint::affine(x.clone(), RatFunc::new(b, e3.clone()).expect("nonzero denominator")))
            .filter(|pt| order_of(m, pt, n) == Some(n))
            .collect();
        (!pts.is_empty()).then_some(pts)
    });
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for pt in found.into_iter().flatten() {
        debug_assert!(on_curve(m, &pt));
        if seen.insert(pt.to_string()) {
            out.push(pt);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixedLocusKind {
    Empty,
    WholeFiber,
    OnePoint,
    Curve,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedLocusDescriptor {
    pub kind: FixedLocusKind,
    pub detail: String,
}

/// Where the torsion section meets the special fiber, away from the zero section.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Specialization {
    /// The identity component.
    Identity,
    /// A simple component (index 0 is the identity component); for I_n^* the index is 1, 2 or 3 (the
    /// far components, with 2 and 3 meeting a common double component).
    Component(u32),
}

fn descriptor(kind: FixedLocusKind, detail: &str) -> Result<FixedLocusDescriptor, SectionsError> {
    Ok(FixedLocusDescriptor { kind, detail: detail.to_string() })
}

/// Fixed locus of translation by a `p`-torsion section on one special fiber.
pub fn fixed_locus(
    fiber: &FiberAnalysis,
    p: u32,
    intersects_zero: bool,
    specialization: Specialization,
) -> Result<FixedLocusDescriptor, SectionsError> {
    use FixedLocusKind::*;
    use KodairaSymbol as K;
    let specialization = match specialization {
        Specialization::Component(0) => Specialization::Identity,
        other => other,
    };
    let name = fiber.kodaira.to_string();
    let bad = |why: &str| Err(SectionsError::FixedLocus(format!("{name}: {why}")));
    match fiber.reduction_class {
        ReductionClass::GoodOrdinary => {
            if intersects_zero || specialization != Specialization::Identity {
                return bad("a good ordinary fiber is never met by the torsion section at the zero section");
            }
            return descriptor(Empty, "no fixed points");
        }
        ReductionClass::GoodSupersingular => {
            if !intersects_zero {
                return bad("on a good supersingular fiber the torsion section meets the zero section");
            }
            return descriptor(WholeFiber, "the whole fiber");
        }
        ReductionClass::Multiplicative => {
            if intersects_zero || specialization == Specialization::Identity {
                return bad("on a multiplicative fiber the torsion section specializes into the component group");
            }
            return descriptor(Empty, "no fixed points");
        }
        _ => {}
    }
    if intersects_zero {
        return descriptor(WholeFiber, "the whole fiber");
    }
    let symbol = fiber.symbol();
    match specialization {
        Specialization::Identity => match symbol {
            K::II | K::III | K::IV => descriptor(OnePoint, "the singular point of the fiber"),
            K::I0Star | K::IStar(_) | K::IVStar | K::IIIStar | K::IIStar => {
                descriptor(Curve, "the union of components of multiplicity at least 2")
            }
            _ => bad("not an additive type"),
        },
        Specialization::Component(k) => match symbol {
            K::IVStar if p == 3 && (1..=2).contains(&k) => {
                descriptor(OnePoint, "one point on the component of multiplicity 3")
            }
            K::IIIStar if p == 2 && k == 1 => descriptor(
                OnePoint,
                "the intersection of the component of multiplicity 4 with the one of multiplicity 2",
            ),
            K::I0Star | K::IStar(1) if p == 2 && (1..=3).contains(&k) => descriptor(OnePoint, "one point"),
            K::IStar(n) if p == 2 && n >= 3 && n % 2 == 1 => {
                if k == 1 {
                    descriptor(Curve, "a curve")
                } else {
                    bad("for odd n the section necessarily specializes into the first far component")
                }
            }
            K::IStar(n) if p == 2 && n >= 2 && n % 2 == 0 => match k {
                1 => descriptor(Curve, "a curve"),
                2 | 3 => descriptor(OnePoint, "one point"),
                _ => bad("component index must be 1, 2 or 3"),
            },
            _ => bad(&format!("no specialization into the component group in characteristic {p}")),
        },
    }
}

/// Number of fibers with a non-empty fixed locus, rejected when above two.
pub fn check_fixed_fiber_bound(descriptors: &[(FixedLocusDescriptor, usize)]) -> Result<usize, SectionsError> {
    let count: usize = descriptors.iter().filter(|(d, _)| d.kind != FixedLocusKind::Empty).map(|(_, deg)| deg).sum();
    if count > 2 {
        return Err(SectionsError::TooManyFixedFibers(count));
    }
    Ok(count)
}

/// Both sides of `4 + 2 (O . P) = sum n_v k_v (p - k_v) / p` over fibers `I_(p n_v)`.
pub fn torsion_height_identity(
    fibers: &[FiberAnalysis],
    ks: &[u32],
    p: u32,
    intersection: i64,
) -> Result<(Rational64, Rational64), SectionsError> {
    if fibers.len() != ks.len() {
        return Err(SectionsError::HeightIdentity("one component index per fiber".into()));
    }
    let lhs = Rational64::from_integer(4 + 2 * intersection);
    let mut rhs = Rational64::from_integer(0);
    for (f, &k) in fibers.iter().zip(ks) {
        let KodairaSymbol::I(n) = f.symbol() else {
            return Err(SectionsError::HeightIdentity(format!("{} is not multiplicative", f.kodaira)));
        };
        if n % p != 0 {
            return Err(SectionsError::HeightIdentity(format!("I_{n} is not of the form I_(p n)")));
        }
        if k == 0 || k >= p {
            return Err(SectionsError::HeightIdentity(format!("component index {k} outside 1..{}", p - 1)));
        }
        let nv = (n / p) as i64;
        let term = Rational64::new(nv * k as i64 * (p - k) as i64, p as i64);
        rhs += term * f.degree() as i64;
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn artin_schreier_solver() {
        let h = Poly::from_coeffs(2, &[0, 1]);
        let b = Poly::from_coeffs(2, &[1, 1, 0, 1]);
        let r = &b.square() + &(&h * &b);
        let sols = solve_artin_schreier(&h, &r);
        assert!(sols.contains(&b));
        assert!(sols.contains(&(&b + &h)));
        // B^2 + t B = 1 has no polynomial solution: degree and parity clash
        assert!(solve_artin_schreier(&h, &Poly::one(2)).is_empty());
    }

    #[test]
    fn zero_and_inverse() {
        let m = WeierstrassModel::from_strs(5, ["t", "1", "t", "t^3", "0"]).unwrap();
        let pt = SectionPoint::affine(RatFunc::zero(5), RatFunc::zero(5));
        assert!(on_curve(&m, &pt));
        assert_eq!(add(&m, &pt, &SectionPoint::Zero), pt);
        assert!(add(&m, &pt, &neg(&m, &pt)).is_zero());
        assert_eq!(order_of(&m, &SectionPoint::Zero, 5), Some(1));
    }
}
