use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fp::inv_mod;
use super::poly::Poly;
use super::AlgebraError;

/// `unit * prod(factor^multiplicity)` with monic irreducible factors in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: u32,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn expand(&self, p: u32) -> Poly {
        self.factors.iter().fold(Poly::constant(p, self.unit as i64), |acc, (f, m)| &acc * &f.pow(*m))
    }

    /// Multiset union of two factorizations (the factorization of the product).
    pub fn merge(&self, other: &Factorization, p: u32) -> Factorization {
        let mut factors = self.factors.clone();
        for (f, m) in &other.factors {
            match factors.iter_mut().find(|(g, _)| g == f) {
                Some(entry) => entry.1 += m,
                None => factors.push((f.clone(), *m)),
            }
        }
        sort_factors(&mut factors);
        Factorization { unit: super::fp::mul_mod(p, self.unit, other.unit), factors }
    }
}

fn sort_factors(v: &mut [(Poly, u32)]) {
    v.sort_by(|a, b| a.0.canonical_cmp(&b.0));
}

/// `t^(p^k) mod f` by iterated Frobenius.
fn frobenius_power_of_t(f: &Poly, k: usize) -> Poly {
    let p = f.p() as u64;
    let mut h = Poly::t(f.p()).rem(f);
    for _ in 0..k {
        h = h.pow_mod(p, f);
    }
    h
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
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

/// Rabin irreducibility test.
pub fn is_irreducible(f: &Poly) -> bool {
    let n = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let f = f.monic();
    let t = Poly::t(f.p());
    if frobenius_power_of_t(&f, n) != t.rem(&f) {
        return false;
    }
    prime_divisors(n).into_iter().all(|q| {
        let h = frobenius_power_of_t(&f, n / q);
        (&h - &t).gcd(&f).is_one()
    })
}

/// Square-free decomposition of a monic polynomial: `(g, i)` with `f = prod g^i`.
fn squarefree(f: &Poly) -> Vec<(Poly, u32)> {
    let p = f.p();
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div_exact(&c).expect("gcd divides");
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_exact(&y).expect("gcd divides");
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        w = y.clone();
        c = c.div_exact(&y).expect("gcd divides");
    }
    if !c.is_one() {
        let root = c.pth_root().expect("derivative-free part is a p-th power");
        for (g, m) in squarefree(&root) {
            out.push((g, m * p));
        }
    }
    out
}

/// Distinct-degree factorization of a monic square-free polynomial.
fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let p = f.p() as u64;
    let t = Poly::t(f.p());
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = t.rem(&rest);
    let mut d = 0;
    while rest.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(p, &rest);
        let g = (&h - &t).gcd(&rest);
        if !g.is_one() {
            rest = rest.div_exact(&g).expect("gcd divides");
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    if rest.degree().unwrap_or(0) > 0 {
        let d = rest.degree().unwrap();
        out.push((rest, d));
    }
    out
}

fn random_poly(rng: &mut ChaCha8Rng, p: u32, below: usize) -> Poly {
    let c: Vec<i64> = (0..below).map(|_| rng.gen_range(0..p) as i64).collect();
    Poly::from_coeffs(p, &c)
}

/// Splits a product of distinct irreducibles all of degree `d`.
fn equal_degree(g: &Poly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
    let n = g.degree().unwrap_or(0);
    if n == 0 {
        return;
    }
    if n == d {
        out.push(g.clone());
        return;
    }
    let p = g.p();
    loop {
        let a = random_poly(rng, p, n);
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let witness = if p == 2 {
            // absolute trace a + a^2 + ... + a^(2^(d-1))
            let mut acc = Poly::zero(p);
            let mut term = a.rem(g);
            for _ in 0..d {
                acc = &acc + &term;
                term = term.square().rem(g);
            }
            acc
        } else {
            // norm to GF(p), then the quadratic character
            let mut norm = Poly::one(p);
            let mut term = a.rem(g);
            for _ in 0..d {
                norm = (&norm * &term).rem(g);
                term = term.pow_mod(p as u64, g);
            }
            &norm.pow_mod((p as u64 - 1) / 2, g) - &Poly::one(p)
        };
        let h = witness.gcd(g);
        let hd = h.degree().unwrap_or(0);
        if h.is_zero() || hd == 0 || hd == n {
            continue;
        }
        let other = g.div_exact(&h).expect("gcd divides");
        equal_degree(&h, d, rng, out);
        equal_degree(&other, d, rng, out);
        return;
    }
}

/// Factors a nonzero polynomial into monic irreducibles.
pub fn factor(f: &Poly) -> Result<Factorization, AlgebraError> {
    if f.is_zero() {
        return Err(AlgebraError::FactorZero);
    }
    let unit = f.leading();
    let monic = f.monic();
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed0f_fac7);
    let mut factors = Vec::new();
    for (sq, mult) in squarefree(&monic) {
        for (block, d) in distinct_degree(&sq) {
            let mut pieces = Vec::new();
            equal_degree(&block, d, &mut rng, &mut pieces);
            factors.extend(pieces.into_iter().map(|g| (g, mult)));
        }
    }
    sort_factors(&mut factors);
    Ok(Factorization { unit, factors })
}

/// All monic polynomials of degree exactly `d`.
fn monic_of_degree(p: u32, d: usize) -> Vec<Poly> {
    let total = (p as u64).pow(d as u32);
    (0..total)
        .map(|mut k| {
            let mut c = Vec::with_capacity(d + 1);
            for _ in 0..d {
                c.push((k % p as u64) as u32);
                k /= p as u64;
            }
            c.push(1);
            Poly::from_raw(p, c)
        })
        .collect()
}

/// Monic irreducibles of degree `1..=max_deg`, generated by sieving out products.
pub fn irreducibles_up_to(p: u32, max_deg: usize) -> Vec<Vec<Poly>> {
    let mut by_degree: Vec<Vec<Poly>> = vec![Vec::new()];
    for d in 1..=max_deg {
        let mut composite = HashSet::new();
        for (k, smaller) in by_degree.iter().enumerate().take(d / 2 + 1).skip(1) {
            for a in smaller {
                for b in monic_of_degree(p, d - k) {
                    composite.insert(a * &b);
                }
            }
        }
        let irr = monic_of_degree(p, d).into_iter().filter(|f| !composite.contains(f)).collect();
        by_degree.push(irr);
    }
    by_degree
}

/// Monic irreducibles of one degree, in canonical order (found by the Rabin test).
pub fn irreducibles_of_degree(p: u32, d: usize) -> Vec<Poly> {
    let mut v: Vec<Poly> = monic_of_degree(p, d).into_iter().filter(is_irreducible).collect();
    v.sort_by(|a, b| a.canonical_cmp(b));
    v
}

/// Reference factorization by trial division against sieved irreducibles.
pub fn factor_by_trial_division(f: &Poly) -> Result<Factorization, AlgebraError> {
    if f.is_zero() {
        return Err(AlgebraError::FactorZero);
    }
    let p = f.p();
    let unit = f.leading();
    let mut rest = f.scale(inv_mod(p, unit));
    let n = rest.degree().unwrap_or(0);
    let table = irreducibles_up_to(p, (n / 2).max(1));
    let mut factors = Vec::new();
    for irr in table.iter().flatten() {
        if rest.degree().unwrap_or(0) < 2 * irr.degree().unwrap() {
            break;
        }
        let mut m = 0;
        while let Some(q) = rest.div_exact(irr) {
            rest = q;
            m += 1;
        }
        if m > 0 {
            factors.push((irr.clone(), m));
        }
    }
    if rest.degree().unwrap_or(0) > 0 {
        match factors.iter_mut().find(|(g, _)| *g == rest) {
            Some(e) => e.1 += 1,
            None => factors.push((rest, 1)),
        }
    }
    sort_factors(&mut factors);
    Ok(Factorization { unit, factors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(p: u32, c: &[i64]) -> Poly {
        Poly::from_coeffs(p, c)
    }

    #[test]
    fn small_examples() {
        let f = factor(&pl(2, &[0, 1, 1])).unwrap();
        assert_eq!(f.factors, vec![(pl(2, &[0, 1]), 1), (pl(2, &[1, 1]), 1)]);
        let g = factor(&pl(3, &[1, 0, 1])).unwrap();
        assert_eq!(g.factors, vec![(pl(3, &[1, 0, 1]), 1)]);
        assert_eq!(factor(&Poly::zero(5)), Err(AlgebraError::FactorZero));
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // number of monic irreducibles of degree d over GF(2): 2, 1, 2, 3, 6, 9
        let t = irreducibles_up_to(2, 6);
        let counts: Vec<usize> = t.iter().skip(1).map(|v| v.len()).collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6, 9]);
        for d in 1..=6 {
            assert_eq!(irreducibles_of_degree(2, d).len(), counts[d - 1]);
        }
    }

    #[test]
    fn pth_power_parts() {
        // (t+1)^6 * t^3 over GF(3)
        let f = pl(3, &[1, 1]).pow(6) * pl(3, &[0, 1]).pow(3);
        let fac = factor(&f).unwrap();
        assert_eq!(fac.factors, vec![(pl(3, &[0, 1]), 3), (pl(3, &[1, 1]), 6)]);
        assert_eq!(fac.expand(3), f);
    }

    #[test]
    fn agrees_with_trial_division() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2u32, 3, 5, 7] {
            for _ in 0..30 {
                let deg = rng.gen_range(1..12);
                let mut f = random_poly(&mut rng, p, deg + 1);
                if f.is_zero() {
                    f = Poly::one(p);
                }
                let a = factor(&f).unwrap();
                let b = factor_by_trial_division(&f).unwrap();
                assert_eq!(a, b, "p={p} f={f}");
                assert_eq!(a.expand(p), f);
            }
        }
    }
}
