//! Shared generators, independent oracles and checks for the integration suites.
#![allow(dead_code)]

use ellsurf::algebra::Place;
use ellsurf::algebra::{Poly, PowerClass, RatFunc};
use ellsurf::brauer::{hasse_invariant, height_flag, supersingular_j};
use ellsurf::families::{generate, p3_base, p3_torsion_section, FamilyKind, FamilySpec};
use ellsurf::frobext::{base_change, frobenius_pullback, frobenius_pullback_raw, igusa_universal, ClassifyingMap};
use ellsurf::sections::{
    add, fixed_locus, multiply, neg, on_curve, order_of, torsion_height_identity, torsion_search, FixedLocusKind,
    SectionPoint, Specialization,
};
use ellsurf::tate::{
    analyze, AnalyzeOptions, FiberAnalysis, HeightFlag, KodairaSymbol, KodairaType, ReductionClass, SurfaceReport,
};
use ellsurf::weierstrass::{change_coordinates, CoordinateChange, WeierstrassModel, WEIGHTS};
use num_rational::Rational64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_poly(rng: &mut impl Rng, p: u32, max_deg: usize) -> Poly {
    let deg = rng.gen_range(0..=max_deg);
    let c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(0..p) as i64).collect();
    Poly::from_coeffs(p, &c)
}

fn nonzero_constant(rng: &mut impl Rng, p: u32) -> i64 {
    rng.gen_range(1..p) as i64
}

/// A nonsingular model with `chi <= 2`.
pub fn random_model(rng: &mut impl Rng, p: u32) -> WeierstrassModel {
    loop {
        let scale = if rng.gen_bool(0.5) { 1 } else { 2 };
        let a: [Poly; 5] = std::array::from_fn(|i| {
            if rng.gen_bool(0.3) {
                Poly::zero(p)
            } else {
                random_poly(rng, p, WEIGHTS[i] * scale)
            }
        });
        if let Ok(m) = WeierstrassModel::new(p, a) {
            return m;
        }
    }
}

/// `u = c / pi` with `pi` of degree at most one, polynomial `r, s, w`.
pub fn random_change(rng: &mut impl Rng, p: u32) -> CoordinateChange {
    let c = nonzero_constant(rng, p);
    let pi = match rng.gen_range(0..3) {
        0 => Poly::one(p),
        1 => Poly::t(p),
        _ => Poly::from_coeffs(p, &[rng.gen_range(0..p) as i64, 1]),
    };
    let u = RatFunc::new(Poly::constant(p, c), pi).expect("nonzero denominator");
    let r = RatFunc::from_poly(random_poly(rng, p, 2));
    let s = RatFunc::from_poly(random_poly(rng, p, 1));
    let w = RatFunc::from_poly(random_poly(rng, p, 3));
    CoordinateChange::new(u, r, s, w)
}

/// Fiber types and chi are unchanged by `count` random admissible coordinate changes.
pub fn tate_invariance(seed: u64, p: u32, count: usize) -> Result<usize, String> {
    let mut rng = rng(seed);
    let opts = AnalyzeOptions::default();
    for i in 0..count {
        let m = random_model(&mut rng, p);
        let c = random_change(&mut rng, p);
        let changed = change_coordinates(&m, &c).map_err(|e| format!("case {i}: {e}"))?;
        let before = analyze(&m, &opts).map_err(|e| format!("case {i} ({}): {e}", m.equation()))?;
        let after = analyze(&changed, &opts).map_err(|e| format!("case {i} ({}): {e}", changed.equation()))?;
        if before.geometric_fiber_multiset() != after.geometric_fiber_multiset() || before.chi != after.chi {
            return Err(format!(
                "case {i}: {} gives {:?}, changed model {} gives {:?}",
                m.equation(),
                before.geometric_fiber_multiset(),
                changed.equation(),
                after.geometric_fiber_multiset()
            ));
        }
    }
    Ok(count)
}

/// A model through two chosen points `(x, y1)` and `(x + 1, y2)`.
pub fn random_point_pair(rng: &mut impl Rng, p: u32) -> (WeierstrassModel, SectionPoint, SectionPoint) {
    loop {
        let a1 = random_poly(rng, p, 1);
        let a2 = random_poly(rng, p, 2);
        let a3 = random_poly(rng, p, 2);
        let x1 = random_poly(rng, p, 2);
        let x2 = &x1 + &Poly::one(p);
        let y1 = random_poly(rng, p, 3);
        let y2 = random_poly(rng, p, 3);
        let lhs = |x: &Poly, y: &Poly| {
            &(&(&y.square() + &(&(&a1 * x) * y)) + &(&a3 * y)) - &(&(&x.square() * x) + &(&a2 * &x.square()))
        };
        let f1 = lhs(&x1, &y1);
        let f2 = lhs(&x2, &y2);
        let a4 = &f2 - &f1;
        let a6 = &f1 - &(&a4 * &x1);
        let Ok(m) = WeierstrassModel::new(p, [a1, a2, a3, a4, a6]) else { continue };
        let pt = |x: Poly, y: Poly| SectionPoint::affine(RatFunc::from_poly(x), RatFunc::from_poly(y));
        return (m, pt(x1, y1), pt(x2, y2));
    }
}

/// Identity, inverse, commutativity, closure and associativity on random triples.
pub fn group_law_triples(seed: u64, count: usize) -> Result<usize, String> {
    let mut rng = rng(seed);
    for i in 0..count {
        let p = [2, 3, 5, 7][i % 4];
        let (m, pt, qt) = random_point_pair(&mut rng, p);
        let (k, l) = (rng.gen_range(-2i64..=2), rng.gen_range(-2i64..=2));
        let scaled = |pt: &SectionPoint, k: i64| {
            let q = multiply(&m, pt, k.unsigned_abs());
            if k < 0 {
                neg(&m, &q)
            } else {
                q
            }
        };
        let rt = add(&m, &scaled(&pt, k), &scaled(&qt, l));
        let fail = |what: &str| Err(format!("triple {i} on {}: {what}", m.equation()));
        for x in [&pt, &qt, &rt] {
            if !on_curve(&m, x) {
                return fail("point off the curve");
            }
            if add(&m, x, &SectionPoint::Zero) != *x || !add(&m, x, &neg(&m, x)).is_zero() {
                return fail("identity or inverse");
            }
        }
        if add(&m, &pt, &qt) != add(&m, &qt, &pt) {
            return fail("commutativity");
        }
        let left = add(&m, &add(&m, &pt, &qt), &rt);
        let right = add(&m, &pt, &add(&m, &qt, &rt));
        if left != right {
            return fail("associativity");
        }
        if !on_curve(&m, &left) {
            return fail("closure");
        }
    }
    Ok(count)
}

/// GF(p^2) as `a + b w` with `w^2 = c1 w + c0`.
#[derive(Clone, Copy)]
struct Quadratic {
    p: u32,
    c1: u32,
    c0: u32,
}

type Q = (u32, u32);

impl Quadratic {
    fn new(p: u32) -> Self {
        if p == 2 {
            return Quadratic { p, c1: 1, c0: 1 };
        }
        let squares: Vec<u32> = (1..p).map(|x| x * x % p).collect();
        let d = (2..p).find(|d| !squares.contains(d)).expect("a non-square exists");
        Quadratic { p, c1: 0, c0: d }
    }
    fn elements(&self) -> Vec<Q> {
        (0..self.p).flat_map(|a| (0..self.p).map(move |b| (a, b))).collect()
    }
    fn add(&self, x: Q, y: Q) -> Q {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }
    fn neg(&self, x: Q) -> Q {
        ((self.p - x.0) % self.p, (self.p - x.1) % self.p)
    }
    fn mul(&self, x: Q, y: Q) -> Q {
        let p = self.p as u64;
        let (a, b, c, d) = (x.0 as u64, x.1 as u64, y.0 as u64, y.1 as u64);
        let bd = b * d % p;
        (((a * c + bd * self.c0 as u64) % p) as u32, ((a * d + b * c + bd * self.c1 as u64) % p) as u32)
    }
    fn int(&self, v: i64) -> Q {
        (v.rem_euclid(self.p as i64) as u32, 0)
    }
    fn inv(&self, x: Q) -> Q {
        *self.elements().iter().find(|&&y| self.mul(x, y) == (1, 0)).expect("unit")
    }
    fn count_points(&self, a: [Q; 5]) -> usize {
        let [a1, a2, a3, a4, a6] = a;
        let els = self.elements();
        let mut n = 1;
        for &x in &els {
            let x2 = self.mul(x, x);
            let rhs = self.add(self.add(self.mul(x2, x), self.mul(a2, x2)), self.add(self.mul(a4, x), a6));
            let lin = self.add(self.mul(a1, x), a3);
            n += els.iter().filter(|&&y| self.add(self.mul(y, y), self.mul(lin, y)) == rhs).count();
        }
        n
    }
    /// A curve with the given j-invariant.
    fn curve_with_j(&self, j: Q) -> [Q; 5] {
        let z = (0, 0);
        let one = (1, 0);
        match self.p {
            2 if j == z => [z, z, one, z, z],
            2 => [one, z, z, z, self.inv(j)],
            3 if j == z => [z, z, z, self.neg(one), z],
            3 => [z, one, z, z, self.neg(self.inv(j))],
            _ if j == z => [z, z, z, z, one],
            _ if j == self.int(1728) => [z, z, z, one, z],
            _ => {
                let k = self.add(self.int(1728), self.neg(j));
                let jk = self.mul(j, k);
                [z, z, z, self.mul(self.int(3), jk), self.mul(self.int(2), self.mul(jk, k))]
            }
        }
    }
}

/// Product of `(X - j)` over j-invariants whose curves have trace divisible by `p` over GF(p^2).
pub fn ss_oracle(p: u32) -> Result<(Poly, usize), String> {
    let f = Quadratic::new(p);
    let q = (p * p) as i64;
    let trace = |j: Q| q + 1 - f.count_points(f.curve_with_j(j)) as i64;
    let ss: Vec<Q> = f.elements().into_iter().filter(|&j| trace(j) % p as i64 == 0).collect();
    let mut coeffs: Vec<Q> = vec![(1, 0)];
    for &j in &ss {
        let mut next = vec![(0, 0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] = f.add(next[i + 1], c);
            next[i] = f.add(next[i], f.neg(f.mul(c, j)));
        }
        coeffs = next;
    }
    if coeffs.iter().any(|c| c.1 != 0) {
        return Err(format!("p = {p}: product of (X - j) leaves GF(p)"));
    }
    let flat: Vec<i64> = coeffs.iter().map(|c| c.0 as i64).collect();
    Ok((Poly::from_coeffs(p, &flat), ss.len()))
}

pub fn ss_j_matches_oracle(p: u32) -> Result<(), String> {
    let (poly, count) = ss_oracle(p)?;
    let lib = supersingular_j(p);
    if lib.polynomial != poly || lib.values.len() != count {
        return Err(format!(
            "p = {p}: library {} ({} values), oracle {poly} ({count} values)",
            lib.polynomial,
            lib.values.len()
        ));
    }
    Ok(())
}

fn fiber(symbol: KodairaSymbol, class: ReductionClass) -> FiberAnalysis {
    let n = match symbol {
        KodairaSymbol::I(n) | KodairaSymbol::IStar(n) => n,
        _ => 0,
    };
    FiberAnalysis {
        place: Place::infinity(),
        kodaira: KodairaType::new(symbol, 0, 5),
        n,
        swan: 0,
        m: symbol.components(),
        v_delta_min: 0,
        component_group: symbol.component_group(),
        reduction_class: class,
    }
}

/// Expected fixed locus, or `None` where the input cannot occur.
pub fn fixed_locus_oracle(
    symbol: KodairaSymbol,
    class: ReductionClass,
    p: u32,
    meets_zero: bool,
    component: u32,
) -> Option<FixedLocusKind> {
    use FixedLocusKind::*;
    use KodairaSymbol as K;
    match class {
        ReductionClass::GoodOrdinary => return (!meets_zero && component == 0).then_some(Empty),
        ReductionClass::GoodSupersingular => return meets_zero.then_some(WholeFiber),
        ReductionClass::Multiplicative => return (!meets_zero && component >= 1).then_some(Empty),
        _ => {}
    }
    if meets_zero {
        return Some(WholeFiber);
    }
    if component == 0 {
        return Some(match symbol {
            K::II | K::III | K::IV => OnePoint,
            _ => Curve,
        });
    }
    match (symbol, p, component) {
        (K::IVStar, 3, 1 | 2) => Some(OnePoint),
        (K::IIIStar, 2, 1) => Some(OnePoint),
        (K::I0Star | K::IStar(1), 2, 1..=3) => Some(OnePoint),
        (K::IStar(n), 2, 1) if n >= 2 => Some(Curve),
        (K::IStar(n), 2, 2 | 3) if n >= 2 && n % 2 == 0 => Some(OnePoint),
        _ => None,
    }
}

/// Every (type, reduction class, p, meets-zero, component) input agrees with the oracle.
pub fn fixed_locus_enumeration() -> Result<usize, String> {
    use KodairaSymbol as K;
    let mut symbols = vec![K::I0, K::II, K::III, K::IV, K::I0Star, K::IVStar, K::IIIStar, K::IIStar];
    symbols.extend((1..=8).map(K::I));
    symbols.extend((1..=8).map(K::IStar));
    let mut cases = 0;
    for symbol in symbols {
        let classes: &[ReductionClass] = match symbol {
            K::I0 => &[ReductionClass::GoodOrdinary, ReductionClass::GoodSupersingular],
            K::I(_) => &[ReductionClass::Multiplicative],
            _ => &[
                ReductionClass::AdditivePotMultiplicative,
                ReductionClass::AdditivePotOrdinary,
                ReductionClass::AdditivePotSupersingular,
            ],
        };
        for &class in classes {
            let f = fiber(symbol, class);
            for p in [2, 3, 5, 7] {
                for meets_zero in [false, true] {
                    for component in 0..=4 {
                        let spec = if component == 0 {
                            Specialization::Identity
                        } else {
                            Specialization::Component(component)
                        };
                        let got = fixed_locus(&f, p, meets_zero, spec).ok().map(|d| d.kind);
                        let want = fixed_locus_oracle(symbol, class, p, meets_zero, component);
                        if got != want {
                            return Err(format!(
                                "{symbol:?} {class:?} p={p} meets_zero={meets_zero} component={component}: got {got:?}, want {want:?}"
                            ));
                        }
                        if component == 0 {
                            let via_zero =
                                fixed_locus(&f, p, meets_zero, Specialization::Component(0)).ok().map(|d| d.kind);
                            if via_zero != got {
                                return Err(format!("{symbol:?}: Component(0) differs from Identity"));
                            }
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(cases)
}

/// Intersection number of an affine section with the zero section, for a model with the given chi.
pub fn zero_section_intersection(pt: &SectionPoint, chi: u32) -> i64 {
    let SectionPoint::Affine { x, .. } = pt else { return 0 };
    let den = x.den();
    let finite = den.degree().unwrap_or(0) as i64 / 2;
    let pole_at_infinity = x.num().degree_or_neg() - den.degree_or_neg() - 2 * chi as i64;
    finite + (pole_at_infinity.max(0) / 2)
}

/// The Frobenius pullback of `y^2 + t x y + y = x^3`: semistable in characteristic 2
/// with a 2-torsion section; returns both sides of the height identity.
pub fn semistable_char2_identity() -> Result<(Rational64, Rational64, String), String> {
    let base = WeierstrassModel::from_strs(2, ["t", "0", "1", "0", "0"]).map_err(|e| e.to_string())?;
    let x = frobenius_pullback(&base).map_err(|e| e.to_string())?;
    let report = analyze(&x, &AnalyzeOptions::default()).map_err(|e| e.to_string())?;
    if report.chi != 2 || report.additive_count() != 0 {
        return Err(format!("not a semistable K3: {:?}", report.geometric_fiber_multiset()));
    }
    let sections = torsion_search(&report.model, 2, 6).map_err(|e| e.to_string())?;
    let sigma = sections.first().ok_or("no 2-torsion section found")?;
    let intersection = zero_section_intersection(sigma, report.chi);
    let bad: Vec<FiberAnalysis> =
        report.fibers.iter().filter(|f| f.reduction_class == ReductionClass::Multiplicative).cloned().collect();
    let ks = vec![1; bad.len()];
    let (lhs, rhs) = torsion_height_identity(&bad, &ks, 2, intersection).map_err(|e| e.to_string())?;
    let good_ss = report.fibers.iter().filter(|f| f.reduction_class == ReductionClass::GoodSupersingular).count();
    if good_ss != 1 {
        return Err(format!("expected one good supersingular fiber, found {good_ss}"));
    }
    Ok((lhs, rhs, format!("{:?}, O.P = {intersection}", report.geometric_fiber_multiset())))
}

/// A random family member carrying a section of order `torsion`.
pub struct Member {
    pub label: String,
    pub model: WeierstrassModel,
    pub torsion: u32,
}

fn random_map(rng: &mut impl Rng, p: u32, degree: usize) -> Option<ClassifyingMap> {
    let num = random_poly(rng, p, degree);
    let den = random_poly(rng, p, degree);
    if den.is_zero() || num.degree().max(den.degree()) != Some(degree) || !num.gcd(&den).is_constant() {
        return None;
    }
    ClassifyingMap::new(num, den).ok()
}

fn p3_params(rng: &mut impl Rng, kind: FamilyKind) -> [u32; 5] {
    let mut r: [u32; 5] = std::array::from_fn(|_| rng.gen_range(0..3));
    let nz = |rng: &mut dyn rand::RngCore| rng.gen_range(1..3);
    match kind {
        FamilyKind::P3Deg6 => {
            r[3] = nz(rng);
            r[4] = nz(rng);
        }
        FamilyKind::P3Deg5 => {
            r[3] = nz(rng);
            r[4] = 0;
        }
        _ => {
            r[2] = nz(rng);
            r[3] = 0;
            r[4] = 0;
        }
    }
    r
}

fn p3_spec(kind: FamilyKind, r: [u32; 5]) -> FamilySpec {
    ["r4", "r3", "r2", "r1", "r0"].iter().zip(r).fold(FamilySpec::new(kind), |s, (n, v)| s.with(n, v))
}

/// Random K3 members of the torsion families in characteristic at least 3.
pub fn dichotomy_members(seed: u64, target: usize) -> Vec<Member> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    let mut source = 0usize;
    while out.len() < target {
        source += 1;
        let member = match source % 8 {
            0 => {
                let (a, b) = (rng.gen_range(0..5u32), rng.gen_range(0..5u32));
                let spec = FamilySpec::new(FamilyKind::P5AlphaBeta).with("alpha", a).with("beta", b);
                generate(&spec, false).ok().map(|m| (format!("p5 alpha={a} beta={b}"), m, 5))
            }
            k @ 1..=3 => {
                let kind = [FamilyKind::P3Deg6, FamilyKind::P3Deg5, FamilyKind::P3Deg4][k - 1];
                let r = p3_params(&mut rng, kind);
                generate(&p3_spec(kind, r), false).ok().map(|m| (format!("{} {r:?}", kind.name()), m, 3))
            }
            4 => {
                let v: Vec<u32> = (0..8).map(|_| rng.gen_range(0..3)).collect();
                let names = ["c", "q1", "q0", "r4", "r3", "r2", "r1", "r0"];
                let spec = names.iter().zip(&v).fold(FamilySpec::new(FamilyKind::P3E8e8), |s, (n, x)| s.with(n, x));
                // the pullback has a rational 3-torsion section only when the base Hasse class is trivial
                let base = generate(&spec, true).ok().filter(|b| hasse_invariant(b).class == Some(PowerClass::Trivial));
                base.and_then(|_| generate(&spec, false).ok()).map(|m| (format!("p3_e8e8 {v:?}"), m, 3))
            }
            k => {
                let (p_power, degree) = match k {
                    5 => (7, 1),
                    6 => (5, 2),
                    _ => (3, rng.gen_range(4..=6)),
                };
                let universal = igusa_universal(p_power).expect("embedded level").model;
                random_map(&mut rng, universal.p(), degree).and_then(|phi| {
                    let label = format!("Ig({p_power}) along {}", phi.as_ratfunc());
                    let base = base_change(&universal, &phi).ok()?;
                    Some((label, frobenius_pullback(&base).ok()?, p_power))
                })
            }
        };
        if let Some((label, model, torsion)) = member {
            if model.chi() == 2 {
                out.push(Member { label, model, torsion });
            }
        }
    }
    out
}

/// The additive fiber count decides ordinary versus supersingular on one member.
pub fn dichotomy_holds(member: &Member) -> Result<(), String> {
    let opts = AnalyzeOptions { torsion: Some(member.torsion), ..AnalyzeOptions::default() };
    let report: SurfaceReport = analyze(&member.model, &opts).map_err(|e| format!("{}: {e}", member.label))?;
    let count = report.pot_supersingular_count();
    let fail =
        |what: &str| Err(format!("{}: {what} (count {count}, {:?})", member.label, report.geometric_fiber_multiset()));
    if !(1..=2).contains(&count) || count != report.additive_count() {
        return fail("potentially supersingular fibers are not the 1 or 2 additive fibers");
    }
    let ordinary = count == 2;
    if (report.height_flag == HeightFlag::One) != ordinary || report.supersingular != Some(!ordinary) {
        return fail("height flag or classification disagrees with the fiber count");
    }
    if ordinary && report.height_flag != HeightFlag::One {
        return fail("ordinary without h = 1");
    }
    if !ordinary && report.height_flag != HeightFlag::Infinite {
        return fail("supersingular without h = infinity");
    }
    if matches!(member.model.p(), 3 | 5) {
        let criterion = height_flag(&report.model).map_err(|e| e.to_string())?;
        if (criterion == HeightFlag::One) != ordinary {
            return fail("coefficient criterion disagrees with the fiber count");
        }
    }
    Ok(())
}

/// The explicit 3-torsion section on raw pullbacks of a char-3 degree family has exact order 3.
pub fn p3_section_orders(seed: u64, kind: FamilyKind, count: usize) -> Result<usize, String> {
    let mut rng = rng(seed);
    for _ in 0..count {
        let r = p3_params(&mut rng, kind);
        let base = p3_base(r).map_err(|e| e.to_string())?;
        let raw = frobenius_pullback_raw(&base);
        let pt = p3_torsion_section(r);
        if !on_curve(&raw, &pt) || order_of(&raw, &pt, 3) != Some(3) {
            return Err(format!("{} {r:?}: section {pt} is not of exact order 3", kind.name()));
        }
    }
    Ok(count)
}
