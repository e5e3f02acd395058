use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::fp::{add_mod, inv_mod, mul_mod, reduce_i64, sub_mod};

/// Univariate polynomial over GF(p), coefficients lowest degree first.
///
/// The coefficient vector never ends in a zero, so the zero polynomial is the
/// empty vector and has no degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    p: u32,
    c: Vec<u32>,
}

impl Poly {
    fn trimmed(p: u32, mut c: Vec<u32>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly { p, c }
    }

    /// Builds a polynomial from residues that are already reduced mod p.
    pub(crate) fn from_raw(p: u32, c: Vec<u32>) -> Self {
        debug_assert!(c.iter().all(|&x| x < p));
        Self::trimmed(p, c)
    }

    pub fn from_coeffs(p: u32, coeffs: &[i64]) -> Self {
        Self::trimmed(p, coeffs.iter().map(|&v| reduce_i64(p, v)).collect())
    }

    pub fn zero(p: u32) -> Self {
        Poly { p, c: Vec::new() }
    }

    pub fn one(p: u32) -> Self {
        Self::constant(p, 1)
    }

    pub fn constant(p: u32, v: i64) -> Self {
        Self::trimmed(p, vec![reduce_i64(p, v)])
    }

    /// The variable `t`.
    pub fn t(p: u32) -> Self {
        Self::monomial(p, 1, 1)
    }

    pub fn monomial(p: u32, coeff: i64, deg: usize) -> Self {
        let v = reduce_i64(p, coeff);
        if v == 0 {
            return Self::zero(p);
        }
        let mut c = vec![0; deg + 1];
        c[deg] = v;
        Poly { p, c }
    }

    /// `t - a` for a residue `a`.
    pub fn linear_root(p: u32, a: u32) -> Self {
        Self::from_raw(p, vec![sub_mod(p, 0, a % p), 1])
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to `None` ordering below every degree.
    pub fn degree_or_neg(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn leading(&self) -> u32 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    /// Lowest power of `t` dividing a nonzero polynomial.
    pub fn low_degree(&self) -> Option<usize> {
        self.c.iter().position(|&x| x != 0)
    }

    pub fn scale(&self, k: u32) -> Self {
        let k = k % self.p;
        Self::trimmed(self.p, self.c.iter().map(|&x| mul_mod(self.p, x, k)).collect())
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.scale(reduce_i64(self.p, k))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.p, self.leading()))
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![0; k];
        c.extend_from_slice(&self.c);
        Poly { p: self.p, c }
    }

    pub fn add_ref(&self, o: &Poly) -> Poly {
        debug_assert_eq!(self.p, o.p);
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| add_mod(self.p, self.coeff(i), o.coeff(i))).collect();
        Self::trimmed(self.p, c)
    }

    pub fn sub_ref(&self, o: &Poly) -> Poly {
        debug_assert_eq!(self.p, o.p);
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| sub_mod(self.p, self.coeff(i), o.coeff(i))).collect();
        Self::trimmed(self.p, c)
    }

    pub fn neg_ref(&self) -> Poly {
        Poly { p: self.p, c: self.c.iter().map(|&x| sub_mod(self.p, 0, x)).collect() }
    }

    pub fn mul_ref(&self, o: &Poly) -> Poly {
        debug_assert_eq!(self.p, o.p);
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p as u64;
        let mut acc = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u64 * b as u64) % p;
            }
        }
        Self::trimmed(self.p, acc.into_iter().map(|x| x as u32).collect())
    }

    pub fn square(&self) -> Poly {
        self.mul_ref(self)
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut r = Self::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        r
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let p = self.p;
        if self.c.len() < d.c.len() {
            return (Self::zero(p), self.clone());
        }
        let dl = d.c.len();
        let inv = inv_mod(p, d.leading());
        let mut r = self.c.clone();
        let mut q = vec![0u32; r.len() - dl + 1];
        for k in (0..q.len()).rev() {
            let coef = mul_mod(p, r[k + dl - 1], inv);
            q[k] = coef;
            if coef == 0 {
                continue;
            }
            for (j, &dj) in d.c.iter().enumerate() {
                r[k + j] = sub_mod(p, r[k + j], mul_mod(p, coef, dj));
            }
        }
        r.truncate(dl - 1);
        (Self::trimmed(p, q), Self::trimmed(p, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).1
    }

    /// Quotient when `d` divides `self`, otherwise `None`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, u, v)` with `u*self + v*o = g`, `g` monic.
    pub fn ext_gcd(&self, o: &Poly) -> (Poly, Poly, Poly) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(p), Self::zero(p));
        let (mut t0, mut t1) = (Self::zero(p), Self::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub_ref(&q.mul_ref(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub_ref(&q.mul_ref(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let k = inv_mod(p, r0.leading());
        (r0.scale(k), s0.scale(k), t0.scale(k))
    }

    pub fn eval(&self, x: u32) -> u32 {
        let p = self.p;
        self.c.iter().rev().fold(0, |acc, &a| add_mod(p, mul_mod(p, acc, x % p), a))
    }

    /// `self(g(t))`.
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut r = Self::zero(self.p);
        for &a in self.c.iter().rev() {
            r = r.mul_ref(g).add_ref(&Self::constant(self.p, a as i64));
        }
        r
    }

    /// `self(t^k)`.
    pub fn substitute_power(&self, k: usize) -> Poly {
        if self.is_zero() || k == 1 {
            return self.clone();
        }
        assert!(k > 0, "substitution t -> t^0 is not supported");
        let mut c = vec![0; (self.c.len() - 1) * k + 1];
        for (i, &a) in self.c.iter().enumerate() {
            c[i * k] = a;
        }
        Poly { p: self.p, c }
    }

    /// Inverse of `substitute_power(k)` when every exponent is a multiple of `k`.
    pub fn deflate(&self, k: usize) -> Option<Poly> {
        if k == 0 {
            return None;
        }
        if self.c.iter().enumerate().any(|(i, &a)| a != 0 && i % k != 0) {
            return None;
        }
        Some(Self::trimmed(self.p, self.c.iter().step_by(k).copied().collect()))
    }

    /// `t^d * self(1/t)`; requires `d >= deg self`.
    pub fn reverse(&self, d: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        assert!(self.c.len() <= d + 1, "reverse degree below polynomial degree");
        let mut c = vec![0; d + 1];
        for (i, &a) in self.c.iter().enumerate() {
            c[d - i] = a;
        }
        Self::trimmed(self.p, c)
    }

    pub fn derivative(&self) -> Poly {
        let p = self.p;
        let c = self.c.iter().enumerate().skip(1).map(|(i, &a)| mul_mod(p, a, (i as u64 % p as u64) as u32)).collect();
        Self::trimmed(p, c)
    }

    /// Square root in GF(p)[t] if one exists.
    pub fn sqrt(&self) -> Option<Poly> {
        let p = self.p;
        if self.is_zero() {
            return Some(self.clone());
        }
        let d = self.degree().unwrap();
        if d % 2 == 1 {
            return None;
        }
        if p == 2 {
            let half = self.deflate(2)?;
            return Some(half);
        }
        let n = d / 2;
        let lead = (0..p).find(|&x| mul_mod(p, x, x) == self.leading())?;
        let mut g = vec![0u32; n + 1];
        g[n] = lead;
        let inv2g = inv_mod(p, mul_mod(p, 2, lead));
        for k in (0..n).rev() {
            let mut s = self.coeff(n + k);
            for i in (k + 1)..n {
                let j = n + k - i;
                if j > k && j < n {
                    s = sub_mod(p, s, mul_mod(p, g[i], g[j]));
                }
            }
            g[k] = mul_mod(p, s, inv2g);
        }
        let cand = Self::trimmed(p, g);
        (cand.square() == *self).then_some(cand)
    }

    /// Returns `q` with `q^p = self` (Frobenius is the identity on GF(p) coefficients).
    pub fn pth_root(&self) -> Option<Poly> {
        self.deflate(self.p as usize)
    }

    pub fn pow_mod(&self, mut e: u64, m: &Poly) -> Poly {
        let mut base = self.rem(m);
        let mut r = Self::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul_ref(&base).rem(m);
            }
            e >>= 1;
            if e > 0 {
                base = base.square().rem(m);
            }
        }
        r
    }

    /// Canonical total order used for sorting factorizations: degree, then
    /// coefficients from the top.
    pub fn canonical_cmp(&self, o: &Poly) -> std::cmp::Ordering {
        self.c.len().cmp(&o.c.len()).then_with(|| self.c.iter().rev().cmp(o.c.iter().rev()))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &a) in self.c.iter().enumerate().rev() {
            if a == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{a}*t")?,
                (_, 1) => write!(f, "t^{i}")?,
                _ => write!(f, "{a}*t^{i}")?,
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $m(self, o: &Poly) -> Poly {
                self.$inner(o)
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                self.$inner(&o)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: &Poly) -> Poly {
                self.$inner(o)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                self.$inner(&o)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.neg_ref()
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(p: u32, c: &[i64]) -> Poly {
        Poly::from_coeffs(p, c)
    }

    #[test]
    fn canonical_form_drops_trailing_zeros() {
        let f = pl(5, &[1, 2, 5, 10]);
        assert_eq!(f.degree(), Some(1));
        assert_eq!(Poly::zero(3).degree(), None);
        assert_eq!(pl(3, &[3, 6]), Poly::zero(3));
    }

    #[test]
    fn display_descending() {
        assert_eq!(pl(3, &[1, 1, 0, 2]).to_string(), "2*t^3 + t + 1");
        assert_eq!(Poly::zero(2).to_string(), "0");
        assert_eq!(pl(7, &[0, 0, 1]).to_string(), "t^2");
    }

    #[test]
    fn division_roundtrip() {
        let f = pl(7, &[3, 1, 4, 1, 5, 2]);
        let d = pl(7, &[2, 0, 3]);
        let (q, r) = f.divrem(&d);
        assert_eq!(&(&q * &d) + &r, f);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_and_bezout() {
        let a = pl(5, &[1, 1]) * pl(5, &[2, 0, 1]);
        let b = pl(5, &[1, 1]) * pl(5, &[3, 1]);
        let (g, u, v) = a.ext_gcd(&b);
        assert_eq!(g, pl(5, &[1, 1]));
        assert_eq!(&(&u * &a) + &(&v * &b), g);
    }

    #[test]
    fn substitution_and_deflation() {
        let f = pl(2, &[1, 1, 0, 1]);
        let g = f.substitute_power(2);
        assert_eq!(g, pl(2, &[1, 0, 1, 0, 0, 0, 1]));
        assert_eq!(g.deflate(2), Some(f.clone()));
        assert_eq!(f.deflate(2), None);
        assert_eq!(f.reverse(3), pl(2, &[1, 0, 1, 1]));
    }

    #[test]
    fn square_roots() {
        for p in [2u32, 3, 5, 7] {
            let g = pl(p, &[1, 2, 0, 1]);
            assert_eq!(g.square().sqrt().map(|s| s.square()), Some(g.square()));
        }
        assert_eq!(pl(3, &[0, 1]).sqrt(), None);
        assert_eq!(pl(5, &[2]).sqrt(), None);
    }

    #[test]
    fn derivative_kills_pth_powers() {
        let f = pl(3, &[1, 0, 0, 2, 0, 0, 1]);
        assert!(f.derivative().is_zero());
    }
}
