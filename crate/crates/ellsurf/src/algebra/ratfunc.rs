use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::fp::inv_mod;
use super::poly::Poly;
use super::AlgebraError;

/// Element of GF(p)(t) in lowest terms with a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if num.p() != den.p() {
            return Err(AlgebraError::ModulusMismatch(num.p(), den.p()));
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        let p = num.p();
        if num.is_zero() {
            return RatFunc { num, den: Poly::one(p) };
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        if !d.is_monic() {
            let k = inv_mod(p, d.leading());
            n = n.scale(k);
            d = d.scale(k);
        }
        RatFunc { num: n, den: d }
    }

    pub fn from_poly(f: Poly) -> Self {
        let p = f.p();
        RatFunc { num: f, den: Poly::one(p) }
    }

    pub fn zero(p: u32) -> Self {
        Self::from_poly(Poly::zero(p))
    }

    pub fn one(p: u32) -> Self {
        Self::from_poly(Poly::one(p))
    }

    pub fn constant(p: u32, v: i64) -> Self {
        Self::from_poly(Poly::constant(p, v))
    }

    pub fn p(&self) -> u32 {
        self.num.p()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_poly().then_some(&self.num)
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: i64) -> Result<Self, AlgebraError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Ok(RatFunc { num: base.num.pow(k), den: base.den.pow(k) })
    }

    pub fn scale(&self, k: u32) -> Self {
        RatFunc { num: self.num.scale(k), den: self.den.clone() }
    }

    /// Degree of the map P^1 -> P^1 defined by a nonconstant function.
    pub fn map_degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    pub fn add_ref(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return Self::normalized(&self.num + &o.num, self.den.clone());
        }
        Self::normalized(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn sub_ref(&self, o: &RatFunc) -> RatFunc {
        self.add_ref(&o.neg_ref())
    }

    pub fn neg_ref(&self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul_ref(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p());
        }
        // Cross-cancel first to keep intermediate degrees small.
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = o.den.div_exact(&g1).expect("gcd divides");
        let n2 = o.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let k = inv_mod(self.p(), den.leading());
        RatFunc { num: num.scale(k), den: den.scale(k) }
    }

    pub fn div_ref(&self, o: &RatFunc) -> Result<RatFunc, AlgebraError> {
        Ok(self.mul_ref(&o.inv()?))
    }

    pub fn mul_poly(&self, f: &Poly) -> RatFunc {
        self.mul_ref(&RatFunc::from_poly(f.clone()))
    }

    /// Evaluates a polynomial at this rational function.
    pub fn eval_poly(f: &Poly, x: &RatFunc) -> RatFunc {
        let p = f.p();
        let mut acc = RatFunc::zero(p);
        for &a in f.coeffs().iter().rev() {
            acc = acc.mul_ref(x).add_ref(&RatFunc::constant(p, a as i64));
        }
        acc
    }

    /// `self(g)` for a rational function `g`.
    pub fn compose(&self, g: &RatFunc) -> Result<RatFunc, AlgebraError> {
        Self::eval_poly(&self.num, g).div_ref(&Self::eval_poly(&self.den, g))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |q: &Poly| {
            let s = q.to_string();
            if s.contains(' ') {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr<&RatFunc> for &RatFunc {
            type Output = RatFunc;
            fn $m(self, o: &RatFunc) -> RatFunc {
                self.$inner(o)
            }
        }
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc {
                self.$inner(&o)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Div<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn div(self, o: &RatFunc) -> RatFunc {
        self.div_ref(o).expect("rational function division by zero")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        self.neg_ref()
    }
}

impl From<Poly> for RatFunc {
    fn from(f: Poly) -> Self {
        RatFunc::from_poly(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(p: u32, c: &[i64]) -> Poly {
        Poly::from_coeffs(p, c)
    }

    #[test]
    fn lowest_terms_and_monic_denominator() {
        let f = RatFunc::new(pl(5, &[0, 2, 2]), pl(5, &[0, 3])).unwrap();
        assert_eq!(f.num(), &pl(5, &[4, 4]));
        assert_eq!(f.den(), &Poly::one(5));
        assert!(RatFunc::new(Poly::one(5), Poly::zero(5)).is_err());
    }

    #[test]
    fn field_operations() {
        let a = RatFunc::new(pl(7, &[1, 1]), pl(7, &[0, 1])).unwrap();
        let b = RatFunc::new(pl(7, &[2]), pl(7, &[1, 0, 1])).unwrap();
        let s = &a + &b;
        assert_eq!(&s - &b, a);
        let q = &a / &b;
        assert_eq!(&q * &b, a);
        assert_eq!(&a * &a.inv().unwrap(), RatFunc::one(7));
    }

    #[test]
    fn composition() {
        // (t + 1) o (1/t) = (1 + t)/t
        let f = RatFunc::from_poly(pl(3, &[1, 1]));
        let g = RatFunc::new(Poly::one(3), Poly::t(3)).unwrap();
        assert_eq!(f.compose(&g).unwrap(), RatFunc::new(pl(3, &[1, 1]), Poly::t(3)).unwrap());
    }

    #[test]
    fn display_wraps_sums() {
        let f = RatFunc::new(Poly::one(2), pl(2, &[1, 1])).unwrap();
        assert_eq!(f.to_string(), "1/(t + 1)");
    }
}
