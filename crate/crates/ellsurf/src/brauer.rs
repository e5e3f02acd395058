//! Hasse invariants, supersingular j-values, coefficient criteria for the
//! height of the formal Brauer group and the supersingular/ordinary decision.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::fp::{inv_mod, mul_mod};
use crate::algebra::{power_class_index, Poly, PowerClass, RatFunc, ResidueField};
use crate::tate::{AnalyzeOptions, HeightFlag, KodairaSymbol, ReductionClass, SurfaceReport};
use crate::weierstrass::{normalize, NormalForm, WeierstrassError, WeierstrassModel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BrauerError {
    #[error("height criteria need a K3 model (chi = 2), got chi = {0}")]
    NotK3(u32),
    #[error(transparent)]
    Model(#[from] WeierstrassError),
    #[error("{additive} additive fibers with a declared {order}-torsion section; at most two fibers can be additive")]
    TooManyAdditive { additive: usize, order: u32 },
    #[error("declared {order}-torsion needs at least one additive fiber")]
    NoAdditive { order: u32 },
    #[error("torsion order {0} is not a power of the characteristic")]
    NotPrimePower(u32),
    #[error("coefficient criterion gives {criterion} but the fiber configuration gives {decision}")]
    Inconsistent { criterion: HeightFlag, decision: String },
}

/// The Hasse invariant and its class modulo (p-1)-th powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HasseClass {
    pub raw: RatFunc,
    pub class: Option<PowerClass>,
    pub zero: bool,
}

/// Coefficient of `(xyz)^(p-1)` in `F^(p-1)` for the homogeneous cubic `F`; `a1` when `p = 2`.
pub fn hasse_invariant(m: &WeierstrassModel) -> HasseClass {
    let p = m.p();
    let raw = if p == 2 { m.a1().clone() } else { hasse_coefficient(m) };
    let zero = raw.is_zero();
    let raw = RatFunc::from_poly(raw);
    let class = if zero { None } else { power_class_index(&raw, p - 1).ok() };
    HasseClass { raw, class, zero }
}

fn hasse_coefficient(m: &WeierstrassModel) -> Poly {
    let p = m.p();
    let cap = (p - 1) as usize;
    let neg = |f: &Poly| -f;
    // terms (x-exponent, y-exponent, z-exponent, coefficient) of the cubic
    let one = Poly::one(p);
    let cubic: Vec<(usize, usize, usize, Poly)> = vec![
        (0, 2, 1, one.clone()),
        (1, 1, 1, m.a1().clone()),
        (0, 1, 2, m.a3().clone()),
        (3, 0, 0, neg(&one)),
        (2, 0, 1, neg(m.a2())),
        (1, 0, 2, neg(m.a4())),
        (0, 0, 3, neg(m.a6())),
    ];
    let width = cap + 1;
    let idx = |x: usize, y: usize, z: usize| (x * width + y) * width + z;
    let mut acc: Vec<Poly> = vec![Poly::zero(p); width * width * width];
    acc[idx(0, 0, 0)] = one;
    for _ in 0..cap {
        let mut next: Vec<Poly> = vec![Poly::zero(p); acc.len()];
        for x in 0..width {
            for y in 0..width {
                for z in 0..width {
                    let c = &acc[idx(x, y, z)];
                    if c.is_zero() {
                        continue;
                    }
                    for (dx, dy, dz, k) in &cubic {
                        let (nx, ny, nz) = (x + dx, y + dy, z + dz);
                        if nx > cap || ny > cap || nz > cap || k.is_zero() {
                            continue;
                        }
                        let slot = idx(nx, ny, nz);
                        next[slot] = &next[slot] + &(c * k);
                    }
                }
            }
        }
        acc = next;
    }
    acc[idx(cap, cap, cap)].clone()
}

/// Supersingular j-invariants: their values in GF(p^2) and the polynomial over GF(p) they cut out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupersingularSet {
    pub p: u32,
    /// GF(p^2) realized by [`ResidueField::extension`]; values as residues, sorted.
    pub values: Vec<Poly>,
    /// Product of `(X - j)` over the set, a polynomial over GF(p).
    pub polynomial: Poly,
}

fn binomial_mod(p: u32, n: u32, k: u32) -> u32 {
    let mut acc = 1u32;
    for i in 0..k {
        acc = mul_mod(p, acc, (n - i) % p);
        acc = mul_mod(p, acc, inv_mod(p, (i + 1) % p));
    }
    acc
}

/// Supersingular j-values via the roots of the Legendre-form Hasse polynomial.
pub fn supersingular_j(p: u32) -> SupersingularSet {
    let field = ResidueField::extension(p, 2).expect("prime modulus");
    if p == 2 || p == 3 {
        return SupersingularSet { p, values: vec![Poly::zero(p)], polynomial: Poly::t(p) };
    }
    let half = (p - 1) / 2;
    let deuring: Vec<i64> = (0..=half).map(|i| binomial_mod(p, half, i).pow(2) as i64).collect();
    let deuring = Poly::from_coeffs(p, &deuring);
    let mut values: Vec<Poly> = Vec::new();
    for lambda in field.elements() {
        if !field.is_zero(&field.eval(&deuring, &lambda)) {
            continue;
        }
        let one = Poly::one(p);
        let l2 = field.mul(&lambda, &lambda);
        let num = field.pow(&field.add(&field.sub(&l2, &lambda), &one), 3);
        let num = field.mul(&field.from_int(256), &num);
        let lm1 = field.sub(&lambda, &one);
        let den = field.mul(&l2, &field.mul(&lm1, &lm1));
        let j = field.div(&num, &den).expect("lambda not 0 or 1");
        if !values.contains(&j) {
            values.push(j);
        }
    }
    values.sort_by(|a, b| a.canonical_cmp(b));
    // product of (X - j) with coefficients in GF(p^2)
    let mut coeffs: Vec<Poly> = vec![Poly::one(p)];
    for j in &values {
        let mut next = vec![Poly::zero(p); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = field.add(&next[i + 1], c);
            next[i] = field.sub(&next[i], &field.mul(c, j));
        }
        coeffs = next;
    }
    let flat: Vec<i64> = coeffs
        .iter()
        .map(|c| {
            assert!(c.is_constant(), "supersingular polynomial has coefficients in GF(p)");
            c.coeff(0) as i64
        })
        .collect();
    SupersingularSet { p, values, polynomial: Poly::from_coeffs(p, &flat) }
}

/// Coefficient criteria for `h = 1` on a K3 model.
pub fn height_flag(m: &WeierstrassModel) -> Result<HeightFlag, BrauerError> {
    if m.chi() != 2 {
        return Err(BrauerError::NotK3(m.chi()));
    }
    let flag = |nonzero: bool| if nonzero { HeightFlag::One } else { HeightFlag::AtLeastTwo };
    Ok(match m.p() {
        2 => flag(m.coeff(1, 1) != 0),
        3 => {
            let (n, _) = normalize(m, NormalForm::A1A3Zero)?;
            flag(n.coeff(2, 2) != 0)
        }
        5 => {
            let (n, _) = normalize(m, NormalForm::A1A2A3Zero)?;
            flag(n.coeff(4, 4) != 0)
        }
        _ => HeightFlag::Undetermined,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    SupersingularUnirational,
    Ordinary,
    /// Char 2: `h >= 2` is certain, supersingularity is not decided.
    HeightAtLeastTwo,
    Undecided,
}

fn prime_power_exponent(p: u32, mut q: u32) -> Option<u32> {
    if q < p {
        return None;
    }
    let mut n = 0;
    while q.is_multiple_of(p) {
        q /= p;
        n += 1;
    }
    (q == 1).then_some(n)
}

/// Supersingular or ordinary from the additive fibers, given a declared torsion section of order `p^n`.
pub fn supersingularity_decision(report: &SurfaceReport, torsion: Option<u32>) -> Result<Decision, BrauerError> {
    let Some(order) = torsion else {
        return Ok(Decision::Undecided);
    };
    let p = report.p();
    if prime_power_exponent(p, order).is_none() {
        return Err(BrauerError::NotPrimePower(order));
    }
    let additive = report.additive_count();
    if order >= 3 {
        return match additive {
            1 => Ok(Decision::SupersingularUnirational),
            2 => Ok(Decision::Ordinary),
            0 => Err(BrauerError::NoAdditive { order }),
            _ => Err(BrauerError::TooManyAdditive { additive, order }),
        };
    }
    // 2-torsion in characteristic 2
    let add: Vec<_> = report.additive_fibers().flat_map(|f| std::iter::repeat_n(f, f.degree())).collect();
    let is_star =
        |f: &crate::tate::FiberAnalysis, n: u32, swan: u32| f.symbol() == KodairaSymbol::IStar(n) && f.swan == swan;
    if report.model.has_constant_j() {
        return Ok(match add.as_slice() {
            [f] if is_star(f, 12, 6) => Decision::HeightAtLeastTwo,
            [f, g] if is_star(f, 4, 2) && is_star(g, 4, 2) => Decision::Ordinary,
            _ => Decision::Undecided,
        });
    }
    let pot_ss = |f: &&crate::tate::FiberAnalysis| f.reduction_class == ReductionClass::AdditivePotSupersingular;
    Ok(match add.as_slice() {
        [] => {
            if report.fibers.iter().any(|f| f.reduction_class == ReductionClass::GoodSupersingular) {
                Decision::SupersingularUnirational
            } else {
                Decision::Undecided
            }
        }
        [f] if pot_ss(f) => Decision::HeightAtLeastTwo,
        [f, g] if pot_ss(f) && pot_ss(g) => Decision::Ordinary,
        [f, g] if (pot_ss(f) && is_star(g, 4, 2)) || (pot_ss(g) && is_star(f, 4, 2)) => Decision::Ordinary,
        _ if add.len() > 2 => return Err(BrauerError::TooManyAdditive { additive: add.len(), order }),
        _ => Decision::Undecided,
    })
}

/// Fills the height and supersingularity fields of a report.
pub(crate) fn annotate(report: &mut SurfaceReport, opts: &AnalyzeOptions) -> Result<(), BrauerError> {
    let criterion = if report.chi == 2 { height_flag(&report.model)? } else { HeightFlag::Undetermined };
    report.height_flag = criterion;
    let decision = supersingularity_decision(report, opts.torsion)?;
    let conflict = |d: &str| BrauerError::Inconsistent { criterion, decision: d.to_string() };
    match decision {
        Decision::SupersingularUnirational => {
            if criterion == HeightFlag::One {
                return Err(conflict("supersingular"));
            }
            report.height_flag = HeightFlag::Infinite;
            report.supersingular = Some(true);
            report.unirational_implied = Some(true);
        }
        Decision::Ordinary => {
            if criterion == HeightFlag::AtLeastTwo {
                return Err(conflict("ordinary"));
            }
            report.height_flag = HeightFlag::One;
            report.supersingular = Some(false);
            report.unirational_implied = Some(false);
        }
        Decision::HeightAtLeastTwo => {
            if criterion == HeightFlag::One {
                return Err(conflict("height at least two"));
            }
            report.height_flag = HeightFlag::AtLeastTwo;
        }
        Decision::Undecided => {
            if criterion == HeightFlag::One {
                report.supersingular = Some(false);
            }
        }
    }
    Ok(())
}

/// Whether the model carries a section of order `p^n`: through the Hasse class of a
/// syntactic Frobenius descent when `n = 1`, and through a bounded search otherwise.
pub fn p_torsion_exists(m: &WeierstrassModel, n: u32, deg_bound: usize) -> Result<bool, crate::Error> {
    let p = m.p();
    let order = p.pow(n);
    if n == 1 {
        if let Some(desc) = crate::frobext::frobenius_descent(m) {
            let h = hasse_invariant(&desc);
            if h.class == Some(PowerClass::Trivial) {
                return Ok(true);
            }
        }
    }
    let found = crate::sections::torsion_search(m, order, deg_bound)?;
    Ok(!found.is_empty())
}
