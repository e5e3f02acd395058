use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::AlgebraError;

/// Largest modulus accepted; keeps every product of two residues inside `u64`.
pub const MAX_MODULUS: u32 = 1 << 20;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn check_modulus(p: u32) -> Result<(), AlgebraError> {
    if p > MAX_MODULUS || !is_prime(p) {
        return Err(AlgebraError::BadModulus(p));
    }
    Ok(())
}

#[inline]
pub(crate) fn reduce_i64(p: u32, v: i64) -> u32 {
    v.rem_euclid(p as i64) as u32
}

#[inline]
pub(crate) fn mul_mod(p: u32, a: u32, b: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
pub(crate) fn add_mod(p: u32, a: u32, b: u32) -> u32 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(p: u32, a: u32, b: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub(crate) fn pow_mod(p: u32, mut a: u32, mut e: u64) -> u32 {
    let mut r = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(p, r, a);
        }
        a = mul_mod(p, a, a);
        e >>= 1;
    }
    r
}

/// Inverse of a nonzero residue (Fermat).
#[inline]
pub(crate) fn inv_mod(p: u32, a: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(p, a, p as u64 - 2)
}

/// An element of the prime field GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp {
    p: u32,
    value: u32,
}

impl Fp {
    pub fn new(p: u32, value: i64) -> Result<Self, AlgebraError> {
        check_modulus(p)?;
        Ok(Self { p, value: reduce_i64(p, value) })
    }

    pub fn zero(p: u32) -> Self {
        Self { p, value: 0 }
    }

    pub fn one(p: u32) -> Self {
        Self { p, value: 1 % p }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inv(&self) -> Option<Self> {
        if self.value == 0 {
            None
        } else {
            Some(Self { p: self.p, value: inv_mod(self.p, self.value) })
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        Self { p: self.p, value: pow_mod(self.p, self.value, e) }
    }

    /// Whether this nonzero element is a k-th power in F_p^x.
    pub fn is_kth_power(&self, k: u64) -> bool {
        if self.value == 0 {
            return true;
        }
        let order = (self.p - 1) as u64;
        let g = gcd_u64(k, order);
        self.pow(order / g).value == 1
    }
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        debug_assert_eq!(self.p, o.p);
        Fp { p: self.p, value: add_mod(self.p, self.value, o.value) }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        debug_assert_eq!(self.p, o.p);
        Fp { p: self.p, value: sub_mod(self.p, self.value, o.value) }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        debug_assert_eq!(self.p, o.p);
        Fp { p: self.p, value: mul_mod(self.p, self.value, o.value) }
    }
}

impl Div for Fp {
    type Output = Fp;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Fp) -> Fp {
        self * o.inv().expect("division by zero in GF(p)")
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp { p: self.p, value: sub_mod(self.p, 0, self.value) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let primes: Vec<u32> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(Fp::new(6, 1).is_err());
        assert!(Fp::new(1, 0).is_err());
    }

    #[test]
    fn field_axioms_small() {
        for p in [2u32, 3, 5, 7] {
            for a in 1..p {
                let x = Fp::new(p, a as i64).unwrap();
                assert_eq!(x * x.inv().unwrap(), Fp::one(p));
                assert_eq!(x + (-x), Fp::zero(p));
            }
        }
    }

    #[test]
    fn kth_powers() {
        // squares mod 7: 1, 2, 4
        let sq: Vec<u32> = (1..7).filter(|&a| Fp::new(7, a as i64).unwrap().is_kth_power(2)).collect();
        assert_eq!(sq, vec![1, 2, 4]);
        // sixth powers mod 7: only 1
        let six: Vec<u32> = (1..7).filter(|&a| Fp::new(7, a as i64).unwrap().is_kth_power(6)).collect();
        assert_eq!(six, vec![1]);
    }
}
