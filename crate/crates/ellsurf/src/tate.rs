//! Kodaira types at every place via Tate's algorithm, Swan conductors from
//! Ogg's formula, global minimal models and the Euler number.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{factor, residue, valuation, Place, Poly, RatFunc, ResidueField};
use crate::parallel::{self, Execution};
use crate::weierstrass::{CoordinateChange, SurfaceClass, WeierstrassError, WeierstrassModel, WEIGHTS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TateError {
    #[error(transparent)]
    Model(#[from] WeierstrassError),
    #[error("minimal model at infinity is not polynomial in t")]
    InfinityChart,
    #[error("Ogg consistency violated at {place}: {detail}")]
    Ogg { place: String, detail: String },
    #[error("Euler number {c2} differs from 12*chi = {expected}")]
    Euler { c2: i64, expected: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KodairaSymbol {
    I0,
    I(u32),
    II,
    III,
    IV,
    I0Star,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl KodairaSymbol {
    pub fn is_additive(self) -> bool {
        !matches!(self, KodairaSymbol::I0 | KodairaSymbol::I(_))
    }

    /// Number of irreducible components of the special fiber.
    pub fn components(self) -> u32 {
        match self {
            KodairaSymbol::I0 | KodairaSymbol::II => 1,
            KodairaSymbol::I(n) => n,
            KodairaSymbol::III => 2,
            KodairaSymbol::IV => 3,
            KodairaSymbol::I0Star => 5,
            KodairaSymbol::IStar(n) => n + 5,
            KodairaSymbol::IVStar => 7,
            KodairaSymbol::IIIStar => 8,
            KodairaSymbol::IIStar => 9,
        }
    }

    pub fn component_group(self) -> ComponentGroup {
        match self {
            KodairaSymbol::I0 | KodairaSymbol::II | KodairaSymbol::IIStar => ComponentGroup::Trivial,
            KodairaSymbol::I(n) => ComponentGroup::cyclic(n),
            KodairaSymbol::III | KodairaSymbol::IIIStar => ComponentGroup::Cyclic(2),
            KodairaSymbol::IV | KodairaSymbol::IVStar => ComponentGroup::Cyclic(3),
            KodairaSymbol::I0Star => ComponentGroup::Klein,
            KodairaSymbol::IStar(n) if n % 2 == 0 => ComponentGroup::Klein,
            KodairaSymbol::IStar(_) => ComponentGroup::Cyclic(4),
        }
    }

    fn base_name(self) -> String {
        match self {
            KodairaSymbol::I0 => "I_0".into(),
            KodairaSymbol::I(n) => braced("I", n),
            KodairaSymbol::II => "II".into(),
            KodairaSymbol::III => "III".into(),
            KodairaSymbol::IV => "IV".into(),
            KodairaSymbol::I0Star => "I*_0".into(),
            KodairaSymbol::IStar(n) => braced("I*", n),
            KodairaSymbol::IVStar => "IV*".into(),
            KodairaSymbol::IIIStar => "III*".into(),
            KodairaSymbol::IIStar => "II*".into(),
        }
    }
}

fn braced(stem: &str, n: u32) -> String {
    if n >= 10 {
        format!("{stem}_{{{n}}}")
    } else {
        format!("{stem}_{n}")
    }
}

/// Kodaira symbol with Swan conductor; `wild` marks residue characteristic 2 or 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KodairaType {
    pub symbol: KodairaSymbol,
    pub swan: u32,
    pub wild: bool,
}

impl KodairaType {
    pub fn new(symbol: KodairaSymbol, swan: u32, p: u32) -> Self {
        KodairaType { symbol, swan, wild: p == 2 || p == 3 }
    }
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.symbol;
        if !s.is_additive() || !self.wild {
            return write!(f, "{}", s.base_name());
        }
        match s {
            KodairaSymbol::I0Star => write!(f, "I*_{{0,{}}}", self.swan),
            KodairaSymbol::IStar(n) => write!(f, "I*_{{{n},{}}}", self.swan),
            _ => {
                let base = s.base_name();
                if self.swan >= 10 {
                    write!(f, "{base}_{{{}}}", self.swan)
                } else {
                    write!(f, "{base}_{}", self.swan)
                }
            }
        }
    }
}

impl Serialize for KodairaType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentGroup {
    Trivial,
    Cyclic(u32),
    /// (Z/2)^2
    Klein,
}

impl ComponentGroup {
    fn cyclic(n: u32) -> Self {
        if n <= 1 {
            ComponentGroup::Trivial
        } else {
            ComponentGroup::Cyclic(n)
        }
    }

    pub fn order(self) -> u32 {
        match self {
            ComponentGroup::Trivial => 1,
            ComponentGroup::Cyclic(n) => n,
            ComponentGroup::Klein => 4,
        }
    }
}

impl fmt::Display for ComponentGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentGroup::Trivial => write!(f, "0"),
            ComponentGroup::Cyclic(n) => write!(f, "Z/{n}"),
            ComponentGroup::Klein => write!(f, "(Z/2)^2"),
        }
    }
}

impl Serialize for ComponentGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionClass {
    GoodOrdinary,
    GoodSupersingular,
    Multiplicative,
    AdditivePotMultiplicative,
    AdditivePotOrdinary,
    AdditivePotSupersingular,
}

impl ReductionClass {
    pub fn is_additive(self) -> bool {
        matches!(
            self,
            ReductionClass::AdditivePotMultiplicative
                | ReductionClass::AdditivePotOrdinary
                | ReductionClass::AdditivePotSupersingular
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberAnalysis {
    pub place: Place,
    #[serde(rename = "type")]
    pub kodaira: KodairaType,
    /// The `n` of I_n or I*_n, zero otherwise.
    pub n: u32,
    pub swan: u32,
    pub m: u32,
    pub v_delta_min: u32,
    pub component_group: ComponentGroup,
    pub reduction_class: ReductionClass,
}

impl FiberAnalysis {
    pub fn symbol(&self) -> KodairaSymbol {
        self.kodaira.symbol
    }

    pub fn degree(&self) -> usize {
        self.place.degree()
    }

    /// Checks Ogg's formula and the multiplicative-fiber identities.
    pub fn check_ogg(&self) -> Result<(), TateError> {
        let fail = |detail: String| Err(TateError::Ogg { place: self.place.to_string(), detail });
        match self.kodaira.symbol {
            KodairaSymbol::I0 => {
                if self.v_delta_min != 0 || self.m != 1 {
                    return fail("good fiber with nonzero discriminant valuation".into());
                }
            }
            KodairaSymbol::I(n) => {
                if self.v_delta_min != n || self.m != n || self.swan != 0 {
                    return fail(format!("I_{n} with v = {}, m = {}", self.v_delta_min, self.m));
                }
            }
            _ => {
                if self.v_delta_min != 2 + self.swan + self.m - 1 {
                    return fail(format!("v = {} but 2 + {} + ({} - 1)", self.v_delta_min, self.swan, self.m));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of Tate's algorithm on a polynomial model at one finite place.
#[derive(Clone, Debug)]
pub(crate) struct LocalTate {
    pub symbol: KodairaSymbol,
    pub v_delta: u32,
    /// Number of times the model was divided by the uniformizer.
    pub scalings: u32,
    /// The model right after the last division (the input when never divided).
    pub minimal: WeierstrassModel,
    pub change: CoordinateChange,
}

struct Local<'a> {
    field: ResidueField,
    pi: &'a Poly,
    p: u32,
}

impl Local<'_> {
    fn val(&self, f: &Poly) -> u32 {
        if f.is_zero() {
            return u32::MAX;
        }
        let mut n = 0;
        let mut g = f.clone();
        while let Some(q) = g.div_exact(self.pi) {
            g = q;
            n += 1;
        }
        n
    }

    fn divides(&self, f: &Poly) -> bool {
        self.field.is_zero(f)
    }

    fn div_pow(&self, f: &Poly, k: u32) -> Poly {
        f.div_exact(&self.pi.pow(k)).expect("valuation bound in Tate's algorithm")
    }

    fn red(&self, f: &Poly) -> Poly {
        self.field.reduce(f)
    }

    fn inv(&self, f: &Poly) -> Poly {
        self.field.inv(f).expect("unit in Tate's algorithm")
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.field.mul(a, b)
    }

    fn sqrt(&self, f: &Poly) -> Poly {
        debug_assert_eq!(self.p, 2);
        self.field.pth_root(f)
    }

    fn cbrt(&self, f: &Poly) -> Poly {
        debug_assert_eq!(self.p, 3);
        self.field.pth_root(f)
    }

    fn k(&self, v: i64) -> Poly {
        Poly::constant(self.p, v)
    }

    fn kinv(&self, v: i64) -> Poly {
        self.inv(&self.k(v))
    }
}

fn translate_tracked(m: &mut WeierstrassModel, change: &mut CoordinateChange, r: &Poly, s: &Poly, w: &Poly) {
    *m = m.translate(r, s, w);
    *change = change.then(&CoordinateChange::translation(r.clone(), s.clone(), w.clone()));
}

/// Tate's algorithm at the finite place `pi` (monic irreducible).
pub(crate) fn tate_at(model: &WeierstrassModel, pi: &Poly) -> LocalTate {
    let p = model.p();
    let loc = Local { field: ResidueField::new_unchecked(pi.clone()), pi, p };
    let zero = Poly::zero(p);
    let mut m = model.clone();
    let mut change = CoordinateChange::identity(p);
    let mut minimal = model.clone();
    let mut minimal_change = change.clone();
    let mut scalings = 0u32;
    loop {
        let inv = m.invariants();
        let vd = loc.val(&inv.delta);
        let finish = |symbol| LocalTate {
            symbol,
            v_delta: vd,
            scalings,
            minimal: minimal.clone(),
            change: minimal_change.clone(),
        };
        if vd == 0 {
            return finish(KodairaSymbol::I0);
        }
        if loc.val(&inv.c4) == 0 {
            return finish(KodairaSymbol::I(vd));
        }
        let [a1, a2, a3, a4, a6] = m.a().clone();
        let (r, w) = match p {
            2 => {
                if loc.divides(&inv.b2) {
                    let r = loc.sqrt(&a4);
                    let w = loc.sqrt(&(&(&(&(&r + &a2) * &r) + &a4) * &r + &a6));
                    (r, w)
                } else {
                    let ia1 = loc.inv(&a1);
                    let r = loc.mul(&ia1, &a3);
                    let w = loc.mul(&ia1, &(&a4 + &r.square()));
                    (r, w)
                }
            }
            3 => {
                let r = if loc.divides(&inv.b2) {
                    loc.cbrt(&-&inv.b6)
                } else {
                    loc.red(&-&loc.mul(&loc.inv(&inv.b2), &inv.b4))
                };
                let w = loc.red(&(&(&a1 * &r) + &a3));
                (r, w)
            }
            _ => {
                let r = if loc.divides(&inv.c4) {
                    loc.red(&-&loc.mul(&loc.kinv(12), &inv.b2))
                } else {
                    let den = loc.inv(&inv.c4.scale_i64(12));
                    loc.red(&-&loc.mul(&den, &(&inv.c6 + &(&inv.b2 * &inv.c4))))
                };
                let w = loc.red(&-&loc.mul(&loc.kinv(2), &(&(&a1 * &r) + &a3)));
                (r, w)
            }
        };
        translate_tracked(&mut m, &mut change, &r, &zero, &w);
        let inv = m.invariants();
        if loc.val(m.a6()) < 2 {
            return finish(KodairaSymbol::II);
        }
        if loc.val(&inv.b8) < 3 {
            return finish(KodairaSymbol::III);
        }
        if loc.val(&inv.b6) < 3 {
            return finish(KodairaSymbol::IV);
        }
        let (s, w) = match p {
            2 => {
                let s = loc.sqrt(m.a2());
                let w = loc.pi * &loc.sqrt(&loc.div_pow(m.a6(), 2));
                (s, w)
            }
            3 => (m.a1().clone(), m.a3().clone()),
            _ => {
                let h = crate::algebra::fp::inv_mod(p, 2);
                (m.a1().scale(h).neg_ref(), m.a3().scale(h).neg_ref())
            }
        };
        translate_tracked(&mut m, &mut change, &zero, &s, &w);
        let b = loc.red(&loc.div_pow(m.a2(), 1));
        let c = loc.red(&loc.div_pow(m.a4(), 2));
        let d = loc.red(&loc.div_pow(m.a6(), 3));
        let disc = &(&(&(&d.square().scale_i64(27) - &(&b.square() * &c.square()))
            + &(&(&b.square() * &b) * &d).scale_i64(4))
            - &(&(&b * &c) * &d).scale_i64(18))
            + &(&c.square() * &c).scale_i64(4);
        let x = &c.scale_i64(3) - &b.square();
        if !loc.divides(&disc) {
            return finish(KodairaSymbol::I0Star);
        }
        if !loc.divides(&x) {
            // double root
            let r0 = match p {
                2 => loc.sqrt(&c),
                3 => loc.mul(&c, &loc.inv(&b)),
                _ => loc.mul(&(&(&b * &c) - &d.scale_i64(9)), &loc.inv(&x.scale_i64(2))),
            };
            let r = loc.pi * &loc.red(&r0);
            translate_tracked(&mut m, &mut change, &r, &zero, &zero);
            let (mut ix, mut iy) = (3u32, 3u32);
            let mut mx = loc.pi.square();
            let mut my = mx.clone();
            loop {
                let a3t = loc.red(&m.a3().div_exact(&my).expect("valuation bound"));
                let a6t = loc.red(&m.a6().div_exact(&(&mx * &my)).expect("valuation bound"));
                if !loc.divides(&(&a3t.square() + &a6t.scale_i64(4))) {
                    break;
                }
                let w = if p == 2 { &my * &loc.sqrt(&a6t) } else { &my * &loc.red(&-&loc.mul(&a3t, &loc.kinv(2))) };
                translate_tracked(&mut m, &mut change, &zero, &zero, &w);
                my = &my * loc.pi;
                iy += 1;
                let a2t = loc.red(&loc.div_pow(m.a2(), 1));
                let a4t = loc.red(&m.a4().div_exact(&(loc.pi * &mx)).expect("valuation bound"));
                let a6t = loc.red(&m.a6().div_exact(&(&mx * &my)).expect("valuation bound"));
                if !loc.divides(&(&a4t.square() - &(&a6t * &a2t).scale_i64(4))) {
                    break;
                }
                let ia2t = loc.inv(&a2t);
                let r = if p == 2 {
                    &mx * &loc.sqrt(&loc.mul(&a6t, &ia2t))
                } else {
                    &mx * &loc.red(&-&loc.mul(&a4t, &loc.mul(&ia2t, &loc.kinv(2))))
                };
                translate_tracked(&mut m, &mut change, &r, &zero, &zero);
                mx = &mx * loc.pi;
                ix += 1;
            }
            return finish(KodairaSymbol::IStar(ix + iy - 5));
        }
        // triple root
        let r0 = match p {
            2 => b.clone(),
            3 => loc.cbrt(&-&d),
            _ => loc.red(&-&loc.mul(&b, &loc.kinv(3))),
        };
        let r = loc.pi * &loc.red(&r0);
        translate_tracked(&mut m, &mut change, &r, &zero, &zero);
        let x3t = loc.red(&loc.div_pow(m.a3(), 2));
        let x6t = loc.red(&loc.div_pow(m.a6(), 4));
        if !loc.divides(&(&x3t.square() + &x6t.scale_i64(4))) {
            return finish(KodairaSymbol::IVStar);
        }
        let pi2 = loc.pi.square();
        let w = if p == 2 { -&(&pi2 * &loc.sqrt(&x6t)) } else { &pi2 * &loc.red(&-&loc.mul(&x3t, &loc.kinv(2))) };
        translate_tracked(&mut m, &mut change, &zero, &zero, &w);
        if loc.val(m.a4()) < 4 {
            return finish(KodairaSymbol::IIIStar);
        }
        if loc.val(m.a6()) < 6 {
            return finish(KodairaSymbol::IIStar);
        }
        m = m.scale_down(loc.pi).expect("non-minimal model divides");
        change = change.then(&CoordinateChange::scaling(RatFunc::from_poly(loc.pi.clone())));
        scalings += 1;
        minimal = m.clone();
        minimal_change = change.clone();
    }
}

/// Model in the chart at infinity, with parameter `s = 1/t`.
fn infinity_chart(m: &WeierstrassModel) -> WeierstrassModel {
    m.flip(m.chi())
}

/// `t -> 1/t` applied to a rational function in the chart variable.
fn invert_variable(f: &RatFunc) -> RatFunc {
    let p = f.p();
    let inv_t = RatFunc::new(Poly::one(p), Poly::t(p)).expect("nonzero");
    f.compose(&inv_t).expect("composition with 1/t")
}

fn monomial_rf(p: u32, k: i64) -> RatFunc {
    RatFunc::from_poly(Poly::t(p)).pow(k).expect("t is nonzero")
}

/// Minimal at every finite place and at infinity, together with the change realizing it.
pub fn minimalize_global(model: &WeierstrassModel) -> Result<(WeierstrassModel, CoordinateChange), TateError> {
    let p = model.p();
    let mut m = model.clone();
    let mut total = CoordinateChange::identity(p);
    loop {
        let mut changed = false;
        let delta = m.discriminant();
        if !delta.is_constant() {
            let fac = factor(&delta).expect("nonzero discriminant");
            for (pi, e) in fac.factors {
                if e < 12 {
                    continue;
                }
                let local = tate_at(&m, &pi);
                if local.scalings > 0 {
                    total = total.then(&local.change);
                    m = local.minimal;
                    changed = true;
                }
            }
        }
        let chi = m.chi();
        let deg = m.discriminant().degree().unwrap_or(0) as i64;
        if 12 * chi as i64 - deg >= 12 {
            let flipped = infinity_chart(&m);
            let local = tate_at(&flipped, &Poly::t(p));
            if local.scalings > 0 {
                let new_chi = chi - local.scalings;
                let mut a: [Poly; 5] = std::array::from_fn(|_| Poly::zero(p));
                for (k, w) in WEIGHTS.iter().enumerate() {
                    let b = &local.minimal.a()[k];
                    if b.degree_or_neg() > (w * new_chi as usize) as i64 {
                        return Err(TateError::InfinityChart);
                    }
                    a[k] = b.reverse(w * new_chi as usize);
                }
                let next = m.with_coeffs(a)?;
                let c = &local.change;
                let in_t = CoordinateChange::new(
                    invert_variable(&c.u),
                    invert_variable(&c.r),
                    invert_variable(&c.s),
                    invert_variable(&c.w),
                );
                let step = CoordinateChange::scaling(monomial_rf(p, chi as i64))
                    .then(&in_t)
                    .then(&CoordinateChange::scaling(monomial_rf(p, -(new_chi as i64))));
                total = total.then(&step);
                m = next;
                changed = true;
            }
        }
        if !changed {
            return Ok((m, total));
        }
    }
}

/// Whether no finite place and not infinity admits a smaller model.
pub fn is_globally_minimal(m: &WeierstrassModel) -> bool {
    match minimalize_global(m) {
        Ok((min, _)) => min.chi() == m.chi() && min.discriminant().degree() == m.discriminant().degree(),
        Err(_) => false,
    }
}

/// Supersingular j-invariants as roots of a polynomial over GF(p).
fn ss_polynomial(p: u32) -> Poly {
    crate::brauer::supersingular_j(p).polynomial
}

fn j_is_supersingular_at(j: &RatFunc, place: &Place, ss: &Poly) -> bool {
    let field = place.residue_field(j.p());
    match residue(j, place) {
        Ok(r) => field.is_zero(&field.eval(ss, &r)),
        Err(_) => false,
    }
}

fn classify(symbol: KodairaSymbol, j: &RatFunc, place: &Place, ss: &Poly) -> ReductionClass {
    let pole = valuation(j, place).is_some_and(|v| v < 0);
    match symbol {
        KodairaSymbol::I0 => {
            if j_is_supersingular_at(j, place, ss) {
                ReductionClass::GoodSupersingular
            } else {
                ReductionClass::GoodOrdinary
            }
        }
        KodairaSymbol::I(_) => ReductionClass::Multiplicative,
        _ if pole => ReductionClass::AdditivePotMultiplicative,
        _ if j_is_supersingular_at(j, place, ss) => ReductionClass::AdditivePotSupersingular,
        _ => ReductionClass::AdditivePotOrdinary,
    }
}

fn fiber_from_local(
    local: &LocalTate,
    place: Place,
    j: &RatFunc,
    ss: &Poly,
    p: u32,
) -> Result<FiberAnalysis, TateError> {
    let symbol = local.symbol;
    let m = symbol.components();
    let swan = if symbol.is_additive() {
        let s = local.v_delta as i64 - 1 - m as i64;
        if s < 0 || (p >= 5 && s != 0) {
            return Err(TateError::Ogg {
                place: place.to_string(),
                detail: format!("Swan conductor {s} for {symbol:?}"),
            });
        }
        s as u32
    } else {
        0
    };
    let n = match symbol {
        KodairaSymbol::I(n) | KodairaSymbol::IStar(n) => n,
        _ => 0,
    };
    let fa = FiberAnalysis {
        reduction_class: classify(symbol, j, &place, ss),
        place,
        kodaira: KodairaType::new(symbol, swan, p),
        n,
        swan,
        m,
        v_delta_min: local.v_delta,
        component_group: symbol.component_group(),
    };
    fa.check_ogg()?;
    Ok(fa)
}

/// Fiber at one place of a model (minimalized at that place internally).
pub fn tate_local(m: &WeierstrassModel, v: &Place) -> Result<FiberAnalysis, TateError> {
    let p = m.p();
    let j = m.j_invariant();
    let ss = ss_polynomial(p);
    let local = match v.uniformizer() {
        Some(pi) => tate_at(m, pi),
        None => tate_at(&infinity_chart(m), &Poly::t(p)),
    };
    fiber_from_local(&local, v.clone(), &j, &ss, p)
}

/// Height of the formal Brauer group, as far as it is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HeightFlag {
    #[serde(rename = "h=1")]
    One,
    #[serde(rename = "h>=2")]
    AtLeastTwo,
    #[serde(rename = "h=inf")]
    Infinite,
    #[serde(rename = "undetermined")]
    Undetermined,
}

impl fmt::Display for HeightFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HeightFlag::One => "h=1",
            HeightFlag::AtLeastTwo => "h>=2",
            HeightFlag::Infinite => "h=inf",
            HeightFlag::Undetermined => "undetermined",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceReport {
    #[serde(serialize_with = "serialize_model")]
    pub model: WeierstrassModel,
    pub surface_class: SurfaceClass,
    pub chi: u32,
    pub c2: i64,
    pub fibers: Vec<FiberAnalysis>,
    pub height_flag: HeightFlag,
    pub supersingular: Option<bool>,
    pub unirational_implied: Option<bool>,
    pub sigma0: Option<u32>,
    pub mw_rank: Option<u32>,
}

fn serialize_model<S: serde::Serializer>(m: &WeierstrassModel, s: S) -> Result<S::Ok, S::Error> {
    m.to_file().serialize(s)
}

impl SurfaceReport {
    pub fn p(&self) -> u32 {
        self.model.p()
    }

    /// Bad fibers, each listed with its geometric multiplicity (the place degree).
    pub fn fiber_types(&self) -> Vec<(String, usize)> {
        self.fibers
            .iter()
            .filter(|f| f.symbol() != KodairaSymbol::I0)
            .map(|f| (f.kodaira.to_string(), f.degree()))
            .collect()
    }

    /// Sorted multiset of type strings over the algebraic closure.
    pub fn geometric_fiber_multiset(&self) -> Vec<String> {
        let mut v: Vec<String> = self.fiber_types().into_iter().flat_map(|(s, d)| std::iter::repeat_n(s, d)).collect();
        v.sort();
        v
    }

    pub fn additive_fibers(&self) -> impl Iterator<Item = &FiberAnalysis> {
        self.fibers.iter().filter(|f| f.symbol().is_additive())
    }

    /// Number of additive fibers over the algebraic closure.
    pub fn additive_count(&self) -> usize {
        self.additive_fibers().map(|f| f.degree()).sum()
    }

    /// Number of potentially supersingular bad fibers over the algebraic closure.
    pub fn pot_supersingular_count(&self) -> usize {
        self.fibers
            .iter()
            .filter(|f| f.reduction_class == ReductionClass::AdditivePotSupersingular)
            .map(|f| f.degree())
            .sum()
    }

    /// Sum of `(m - 1)` over reducible fibers, counted geometrically.
    pub fn fiber_rank(&self) -> u32 {
        self.fibers.iter().map(|f| (f.m.saturating_sub(1)) * f.degree() as u32).sum()
    }
}

#[derive(Clone, Debug, Default)]
pub struct AnalyzeOptions {
    /// Skip global minimalization.
    pub raw: bool,
    /// Declared order `p^n` of a torsion section.
    pub torsion: Option<u32>,
    /// Picard number assumption (for the Mordell-Weil rank).
    pub assume_rho: Option<u32>,
    pub execution: Execution,
}

/// Bad places of a model: the finite factors of the discriminant and, if bad, infinity.
fn bad_places(m: &WeierstrassModel) -> Vec<Place> {
    let delta = m.discriminant();
    let mut places: Vec<Place> = if delta.is_constant() {
        Vec::new()
    } else {
        factor(&delta)
            .expect("nonzero discriminant")
            .factors
            .into_iter()
            .map(|(pi, _)| Place::finite_unchecked(pi))
            .collect()
    };
    let deg = delta.degree().unwrap_or(0);
    if 12 * m.chi() as usize > deg {
        places.push(Place::infinity());
    }
    places
}

/// Places of good reduction whose fiber is supersingular (non-constant j only).
fn good_supersingular_places(m: &WeierstrassModel, ss: &Poly) -> Vec<Place> {
    let j = m.j_invariant();
    if j.is_constant() {
        return Vec::new();
    }
    let delta = m.discriminant();
    let value = RatFunc::eval_poly(ss, &j);
    let mut out = Vec::new();
    if !value.num().is_constant() {
        for (pi, _) in factor(value.num()).expect("nonzero").factors {
            if delta.rem(&pi).is_zero() {
                continue;
            }
            out.push(Place::finite_unchecked(pi));
        }
    }
    let deg = delta.degree().unwrap_or(0);
    if 12 * m.chi() as usize == deg && j_is_supersingular_at(&j, &Place::infinity(), ss) {
        out.push(Place::infinity());
    }
    out
}

/// Full report: minimal model, every bad fiber, Euler number and height data.
pub fn analyze(model: &WeierstrassModel, opts: &AnalyzeOptions) -> Result<SurfaceReport, crate::Error> {
    let m = if opts.raw { model.clone() } else { minimalize_global(model)?.0 };
    let p = m.p();
    let j = m.j_invariant();
    let ss = ss_polynomial(p);
    let places = bad_places(&m);
    let infinity_model = infinity_chart(&m);
    let results = parallel::map_collect(opts.execution, &places, |v| {
        let local = match v.uniformizer() {
            Some(pi) => tate_at(&m, pi),
            None => tate_at(&infinity_model, &Poly::t(p)),
        };
        fiber_from_local(&local, v.clone(), &j, &ss, p)
    });
    let mut fibers = Vec::with_capacity(results.len());
    for r in results {
        let f = r?;
        if f.symbol() != KodairaSymbol::I0 {
            fibers.push(f);
        }
    }
    for v in good_supersingular_places(&m, &ss) {
        fibers.push(FiberAnalysis {
            place: v,
            kodaira: KodairaType::new(KodairaSymbol::I0, 0, p),
            n: 0,
            swan: 0,
            m: 1,
            v_delta_min: 0,
            component_group: ComponentGroup::Trivial,
            reduction_class: ReductionClass::GoodSupersingular,
        });
    }
    fibers.sort_by(|a, b| match (a.place.uniformizer(), b.place.uniformizer()) {
        (Some(x), Some(y)) => x.canonical_cmp(y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    let c2: i64 = fibers.iter().map(|f| f.degree() as i64 * f.v_delta_min as i64).sum();
    let expected = 12 * m.chi() as i64;
    if c2 != expected && !opts.raw {
        return Err(TateError::Euler { c2, expected }.into());
    }
    let surface_class = match m.chi() {
        1 => SurfaceClass::Rational,
        2 => SurfaceClass::K3,
        c => SurfaceClass::Other(c),
    };
    let mut report = SurfaceReport {
        chi: m.chi(),
        model: m,
        surface_class,
        c2,
        fibers,
        height_flag: HeightFlag::Undetermined,
        supersingular: None,
        unirational_implied: None,
        sigma0: None,
        mw_rank: None,
    };
    crate::brauer::annotate(&mut report, opts)?;
    if let Some(rho) = opts.assume_rho {
        report.mw_rank = Some(crate::lattice::mw_rank(rho, &report.fibers)?);
    }
    if report.supersingular == Some(true) && opts.assume_rho == Some(22) {
        report.sigma0 = crate::lattice::sigma0_from_known_mw(&report);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weierstrass::change_coordinates;

    fn model(p: u32, a: [&str; 5]) -> WeierstrassModel {
        WeierstrassModel::from_strs(p, a).unwrap()
    }

    #[test]
    fn rendering() {
        assert_eq!(KodairaType::new(KodairaSymbol::IStar(1), 1, 2).to_string(), "I*_{1,1}");
        assert_eq!(KodairaType::new(KodairaSymbol::I0Star, 0, 3).to_string(), "I*_{0,0}");
        assert_eq!(KodairaType::new(KodairaSymbol::IVStar, 1, 3).to_string(), "IV*_1");
        assert_eq!(KodairaType::new(KodairaSymbol::II, 4, 3).to_string(), "II_4");
        assert_eq!(KodairaType::new(KodairaSymbol::I(16), 0, 2).to_string(), "I_{16}");
        assert_eq!(KodairaType::new(KodairaSymbol::III, 0, 7).to_string(), "III");
        assert_eq!(KodairaType::new(KodairaSymbol::IStar(2), 0, 5).to_string(), "I*_2");
    }

    #[test]
    fn good_place_is_i0() {
        let m = model(7, ["0", "0", "0", "t", "t^12"]);
        let f = tate_local(&m, &Place::at(7, 1)).unwrap();
        assert_eq!(f.symbol(), KodairaSymbol::I0);
        assert_eq!((f.m, f.swan, f.v_delta_min), (1, 0, 0));
    }

    #[test]
    fn char3_ii_star_with_swan_one() {
        let m = model(3, ["t", "0", "0", "0", "-t^5"]);
        let f = tate_local(&m, &Place::at(3, 0)).unwrap();
        assert_eq!(f.kodaira.to_string(), "II*_1");
        assert_eq!(f.v_delta_min, 11);
    }

    #[test]
    fn p7_raw_pullback_minimalizes() {
        let m = model(7, ["0", "0", "0", "t^21", "5*t^42"]);
        let (min, c) = minimalize_global(&m).unwrap();
        assert_eq!(min.equation(), "y^2 = x^3 + t*x + 5*t^12");
        assert_eq!(min.chi(), 2);
        assert_eq!(change_coordinates(&m, &c).unwrap(), min);
    }

    #[test]
    fn already_minimal_has_identity_change() {
        let m = model(2, ["1", "0", "0", "0", "t^2*(1+t^2)"]);
        let (min, c) = minimalize_global(&m).unwrap();
        assert_eq!(min, m);
        assert!(c.is_identity());
        assert_eq!(min.chi(), 1);
    }

    #[test]
    fn infinity_minimalization_reduces_chi() {
        // x -> x + t^4 inflates degrees of y^2 = x^3 + t x + 1 over GF(5)
        let base = model(5, ["0", "0", "0", "t", "1"]);
        let t4 = Poly::monomial(5, 1, 4);
        let z = Poly::zero(5);
        let inflated = base.translate(&t4, &z, &z);
        assert!(inflated.chi() > base.chi());
        let (min, c) = minimalize_global(&inflated).unwrap();
        assert_eq!(min.chi(), 1);
        assert_eq!(change_coordinates(&inflated, &c).unwrap(), min);
    }
}
