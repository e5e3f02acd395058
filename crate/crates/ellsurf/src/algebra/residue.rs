use super::fp::check_modulus;
use super::poly::Poly;
use super::AlgebraError;

/// The finite field GF(p)[t]/(modulus) for a monic irreducible modulus.
///
/// Elements are polynomials of degree below `degree()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueField {
    modulus: Poly,
}

impl ResidueField {
    pub fn new(modulus: Poly) -> Result<Self, AlgebraError> {
        check_modulus(modulus.p())?;
        if !modulus.is_monic() || modulus.degree().unwrap_or(0) == 0 || !super::factor::is_irreducible(&modulus) {
            return Err(AlgebraError::NotIrreducible(modulus.to_string()));
        }
        Ok(ResidueField { modulus })
    }

    /// Skips the irreducibility test for moduli known to be irreducible.
    pub(crate) fn new_unchecked(modulus: Poly) -> Self {
        ResidueField { modulus }
    }

    /// GF(p^d) realized with the smallest monic irreducible of degree d in canonical order.
    pub fn extension(p: u32, d: usize) -> Result<Self, AlgebraError> {
        check_modulus(p)?;
        let m = super::factor::irreducibles_of_degree(p, d)
            .into_iter()
            .next()
            .ok_or(AlgebraError::NotIrreducible(format!("degree {d}")))?;
        Ok(ResidueField { modulus: m })
    }

    pub fn p(&self) -> u32 {
        self.modulus.p()
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap_or(0)
    }

    pub fn order(&self) -> u64 {
        (self.p() as u64).pow(self.degree() as u32)
    }

    pub fn reduce(&self, a: &Poly) -> Poly {
        if a.degree_or_neg() < self.degree() as i64 {
            a.clone()
        } else {
            a.rem(&self.modulus)
        }
    }

    pub fn from_int(&self, v: i64) -> Poly {
        Poly::constant(self.p(), v)
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        self.reduce(&(a + b))
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.reduce(&(a - b))
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        self.reduce(&-a)
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.reduce(&(a * b))
    }

    pub fn is_zero(&self, a: &Poly) -> bool {
        self.reduce(a).is_zero()
    }

    pub fn inv(&self, a: &Poly) -> Option<Poly> {
        let a = self.reduce(a);
        if a.is_zero() {
            return None;
        }
        let (g, u, _) = a.ext_gcd(&self.modulus);
        debug_assert!(g.is_one());
        Some(self.reduce(&u))
    }

    pub fn div(&self, a: &Poly, b: &Poly) -> Option<Poly> {
        Some(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Poly, e: u64) -> Poly {
        self.reduce(a).pow_mod(e, &self.modulus)
    }

    /// Unique p-th root (Frobenius is bijective on a finite field).
    pub fn pth_root(&self, a: &Poly) -> Poly {
        let d = self.degree() as u32;
        if d <= 1 {
            return self.reduce(a);
        }
        self.pow(a, (self.p() as u64).pow(d - 1))
    }

    /// Whether `a` is a square in this field.
    pub fn is_square(&self, a: &Poly) -> bool {
        let a = self.reduce(a);
        if a.is_zero() || self.p() == 2 {
            return true;
        }
        self.pow(&a, (self.order() - 1) / 2).is_one()
    }

    /// Evaluates a GF(p)-polynomial at a field element.
    pub fn eval(&self, f: &Poly, x: &Poly) -> Poly {
        let mut acc = Poly::zero(self.p());
        for &c in f.coeffs().iter().rev() {
            acc = self.add(&self.mul(&acc, x), &self.from_int(c as i64));
        }
        acc
    }

    /// Every element in a fixed enumeration order.
    pub fn elements(&self) -> Vec<Poly> {
        let p = self.p();
        let d = self.degree();
        (0..self.order())
            .map(|mut k| {
                let mut c = Vec::with_capacity(d);
                for _ in 0..d {
                    c.push((k % p as u64) as u32);
                    k /= p as u64;
                }
                Poly::from_raw(p, c)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf9_inverse_and_roots() {
        let f = ResidueField::new(Poly::from_coeffs(3, &[1, 0, 1])).unwrap();
        assert_eq!(f.order(), 9);
        for a in f.elements().into_iter().filter(|a| !a.is_zero()) {
            let i = f.inv(&a).unwrap();
            assert!(f.mul(&a, &i).is_one());
            let r = f.pth_root(&a);
            assert_eq!(f.pow(&r, 3), a);
        }
    }

    #[test]
    fn squares_in_gf25() {
        let f = ResidueField::extension(5, 2).unwrap();
        let squares = f.elements().iter().filter(|a| f.is_square(a)).count();
        assert_eq!(squares, 13);
    }

    #[test]
    fn rejects_reducible_modulus() {
        assert!(ResidueField::new(Poly::from_coeffs(2, &[0, 1, 1])).is_err());
    }
}
