//! Exact lattice arithmetic: root lattices, duals, scalings, trivial lattices
//! from fiber data, Shioda-Tate determinants and Artin invariants.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::tate::{FiberAnalysis, KodairaSymbol, SurfaceReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("invalid root lattice {0}")]
    InvalidKind(String),
    #[error("singular Gram matrix")]
    Singular,
    #[error("not supersingular-shaped determinant: {0} is not an even power of {1}")]
    NotPPower(String, u32),
    #[error("rho inconsistent with fibers: rho = {rho} but the trivial lattice has rank {trivial}")]
    RhoTooSmall { rho: u32, trivial: u32 },
    #[error("lattice expression error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootKind {
    A(usize),
    D(usize),
    E(usize),
    U,
    L2,
    L3,
    L4,
}

/// Symmetric Gram matrix with exact rational entries. An overlattice index `k`
/// stands for a lattice containing this one with index `k` (determinant divided by `k^2`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub name: String,
    pub gram: Vec<Vec<BigRational>>,
    pub overlattice_index: u32,
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn from_ints(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
    rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
}

/// Cartan-type Gram matrix of a tree with the given edges.
fn dynkin(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<BigRational>> {
    let mut g = vec![vec![q(0); n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = q(2);
    }
    for &(a, b) in edges {
        g[a][b] = q(-1);
        g[b][a] = q(-1);
    }
    g
}

pub fn root_lattice(kind: RootKind) -> Result<Lattice, LatticeError> {
    let (name, gram) = match kind {
        RootKind::A(n) if n >= 1 => (format!("A{n}"), dynkin(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())),
        RootKind::D(n) if n >= 4 => {
            let mut edges: Vec<(usize, usize)> = (1..n - 1).map(|i| (i - 1, i)).collect();
            edges.push((n - 3, n - 1));
            (format!("D{n}"), dynkin(n, &edges))
        }
        RootKind::E(n) if (6..=8).contains(&n) => {
            let mut edges: Vec<(usize, usize)> = (1..n - 1).map(|i| (i - 1, i)).collect();
            edges.push((2, n - 1));
            (format!("E{n}"), dynkin(n, &edges))
        }
        RootKind::U => ("U".into(), from_ints(&[&[0, 1], &[1, 0]])),
        RootKind::L2 => ("L2".into(), from_ints(&[&[4, -2], &[-2, 4]])),
        RootKind::L3 => ("L3".into(), from_ints(&[&[2, 0, -1], &[0, 2, -1], &[-1, -1, 4]])),
        RootKind::L4 => ("L4".into(), from_ints(&[&[4, -1, 0, 1], &[-1, 2, -1, 0], &[0, -1, 2, -1], &[1, 0, -1, 2]])),
        other => return Err(LatticeError::InvalidKind(format!("{other:?}"))),
    };
    Ok(Lattice { name, gram, overlattice_index: 1 })
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    if n == 0 {
        return BigRational::one();
    }
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut sign = BigRational::one();
    let mut prev = BigRational::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigRational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pr = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, pr);
        let piv = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = &*v / &piv;
        }
        let pivot_row = a[col].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = &*v - &f * pv;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

impl Lattice {
    pub fn zero() -> Self {
        Lattice { name: "0".into(), gram: Vec::new(), overlattice_index: 1 }
    }

    /// Rank-one lattice `<v>`.
    pub fn rank_one(v: BigRational) -> Self {
        Lattice { name: format!("<{v}>"), gram: vec![vec![v]], overlattice_index: 1 }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn det(&self) -> BigRational {
        let idx = q(self.overlattice_index as i64);
        determinant(&self.gram) / (&idx * &idx)
    }

    pub fn dual(&self) -> Result<Lattice, LatticeError> {
        if self.overlattice_index != 1 {
            return Err(LatticeError::InvalidKind("dual of an overlattice given only by its index".into()));
        }
        let gram = inverse(&self.gram).ok_or(LatticeError::Singular)?;
        Ok(Lattice { name: format!("{}*", self.name), gram, overlattice_index: 1 })
    }

    pub fn scale(&self, k: &BigRational) -> Lattice {
        let gram = self.gram.iter().map(|r| r.iter().map(|v| v * k).collect()).collect();
        Lattice { name: format!("{}({k})", self.name), gram, overlattice_index: self.overlattice_index }
    }

    pub fn dual_scale(&self, k: &BigRational) -> Result<Lattice, LatticeError> {
        Ok(self.dual()?.scale(k))
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let n = self.rank();
        let m = other.rank();
        let mut gram = vec![vec![BigRational::zero(); n + m]; n + m];
        for (row, src) in gram.iter_mut().zip(&self.gram) {
            row[..n].clone_from_slice(src);
        }
        for (row, src) in gram[n..].iter_mut().zip(&other.gram) {
            row[n..].clone_from_slice(src);
        }
        let name = match (self.rank(), other.rank()) {
            (0, _) => other.name.clone(),
            (_, 0) => self.name.clone(),
            _ => format!("{}+{}", self.name, other.name),
        };
        Lattice { name, gram, overlattice_index: self.overlattice_index * other.overlattice_index }
    }

    /// A lattice containing this one with index `k`.
    pub fn overlattice(&self, k: u32) -> Lattice {
        Lattice {
            name: format!("{k}.({})", self.name),
            gram: self.gram.clone(),
            overlattice_index: self.overlattice_index * k,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn to_json(&self) -> LatticeDump {
        LatticeDump {
            name: self.name.clone(),
            rank: self.rank(),
            gram: self.gram.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect(),
            det: self.det().to_string(),
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (rank {}, det {})", self.name, self.rank(), self.det())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeDump {
    pub name: String,
    pub rank: usize,
    pub gram: Vec<Vec<String>>,
    pub det: String,
}

struct LatticeParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl LatticeParser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, LatticeError> {
        Err(LatticeError::Parse { offset: self.pos, message: message.into() })
    }

    fn skip(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn uint(&mut self) -> Result<u64, LatticeError> {
        self.skip();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().or_else(|_| self.err("integer too large"))
    }

    fn rational(&mut self) -> Result<BigRational, LatticeError> {
        let neg = self.eat(b'-');
        let n = self.uint()? as i64;
        let d = if self.eat(b'/') { self.uint()? as i64 } else { 1 };
        if d == 0 {
            return self.err("zero denominator");
        }
        let v = BigRational::new(BigInt::from(n), BigInt::from(d));
        Ok(if neg { -v } else { v })
    }

    fn sum(&mut self) -> Result<Lattice, LatticeError> {
        let mut acc = self.power()?;
        while self.eat(b'+') {
            acc = acc.direct_sum(&self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Lattice, LatticeError> {
        let base = self.postfix()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let k = self.uint()?;
        if k == 0 {
            return Ok(Lattice::zero());
        }
        let mut acc = base.clone();
        for _ in 1..k {
            acc = acc.direct_sum(&base);
        }
        Ok(acc)
    }

    fn postfix(&mut self) -> Result<Lattice, LatticeError> {
        let mut l = self.atom()?;
        loop {
            if self.eat(b'*') {
                l = l.dual()?;
            } else if self.peek() == Some(b'(') {
                self.pos += 1;
                let k = self.rational()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                l = l.scale(&k);
            } else {
                return Ok(l);
            }
        }
    }

    fn atom(&mut self) -> Result<Lattice, LatticeError> {
        match self.peek() {
            Some(b'<') => {
                self.pos += 1;
                let v = self.rational()?;
                if !self.eat(b'>') {
                    return self.err("expected '>'");
                }
                Ok(Lattice::rank_one(v))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let k = self.uint()?;
                if k == 0 {
                    return Ok(Lattice::zero());
                }
                if !self.eat(b'.') {
                    return self.err("expected '.' after an overlattice index");
                }
                let inner = self.postfix()?;
                Ok(inner.overlattice(k as u32))
            }
            Some(c @ (b'A' | b'D' | b'E' | b'L')) => {
                self.pos += 1;
                let n = self.uint()? as usize;
                let kind = match c {
                    b'A' => RootKind::A(n),
                    b'D' => RootKind::D(n),
                    b'E' => RootKind::E(n),
                    _ => match n {
                        2 => RootKind::L2,
                        3 => RootKind::L3,
                        4 => RootKind::L4,
                        _ => return self.err(format!("unknown lattice L{n}")),
                    },
                };
                root_lattice(kind)
            }
            Some(b'U') => {
                self.pos += 1;
                root_lattice(RootKind::U)
            }
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses expressions such as `A1*(7)`, `3.(E7*(3))`, `<5/6>`, `A2(3)^2`, `D4(3)+A1(3)`, `0`.
pub fn parse_lattice(src: &str) -> Result<Lattice, LatticeError> {
    let mut p = LatticeParser { s: src.as_bytes(), pos: 0 };
    let l = p.sum()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(l.with_name(src.trim()))
}

/// Root lattice spanned by the non-identity components of one fiber.
pub fn fiber_root_lattice(symbol: KodairaSymbol) -> Lattice {
    let kind = match symbol {
        KodairaSymbol::I(n) if n >= 2 => RootKind::A(n as usize - 1),
        KodairaSymbol::III => RootKind::A(1),
        KodairaSymbol::IV => RootKind::A(2),
        KodairaSymbol::I0Star => RootKind::D(4),
        KodairaSymbol::IStar(n) => RootKind::D(n as usize + 4),
        KodairaSymbol::IVStar => RootKind::E(6),
        KodairaSymbol::IIIStar => RootKind::E(7),
        KodairaSymbol::IIStar => RootKind::E(8),
        _ => return Lattice::zero(),
    };
    root_lattice(kind).expect("valid fiber root lattice")
}

/// `U` plus the fiber root lattices, each fiber counted with its place degree.
pub fn trivial_lattice(fibers: &[FiberAnalysis]) -> Lattice {
    let mut acc = root_lattice(RootKind::U).expect("U");
    for f in fibers {
        let r = fiber_root_lattice(f.symbol());
        for _ in 0..f.degree() {
            acc = acc.direct_sum(&r);
        }
    }
    acc
}

/// `|det NS| = |det T| * det MW_free / |MW_tors|^2`.
pub fn shioda_tate(det_t: &BigRational, mw_free: &Lattice, torsion_order: u64) -> BigRational {
    let t = q(torsion_order as i64);
    det_t.abs() * mw_free.det().abs() / (&t * &t)
}

/// Half the `p`-exponent of a determinant `p^(2 sigma0)`.
pub fn artin_invariant(det_ns: &BigRational, p: u32) -> Result<u32, LatticeError> {
    let fail = || LatticeError::NotPPower(det_ns.to_string(), p);
    let v = det_ns.abs();
    if !v.is_integer() {
        return Err(fail());
    }
    let mut n = v.to_integer();
    let bp = BigInt::from(p);
    let mut e = 0u32;
    while !n.is_one() {
        if n.is_zero() || !(&n % &bp).is_zero() {
            return Err(fail());
        }
        n /= &bp;
        e += 1;
    }
    if !e.is_multiple_of(2) {
        return Err(fail());
    }
    Ok(e / 2)
}

/// `rho - 2 - sum (m_v - 1)`.
pub fn mw_rank(rho: u32, fibers: &[FiberAnalysis]) -> Result<u32, LatticeError> {
    let contribution: u32 = fibers.iter().map(|f| (f.m.saturating_sub(1)) * f.degree() as u32).sum();
    let trivial = 2 + contribution;
    rho.checked_sub(trivial).ok_or(LatticeError::RhoTooSmall { rho, trivial })
}

/// Index of the narrow Mordell-Weil lattice in the free part, from determinants.
pub fn narrow_index(narrow: &Lattice, free: &Lattice) -> Option<u64> {
    if narrow.rank() != free.rank() {
        return None;
    }
    if narrow.rank() == 0 {
        return Some(1);
    }
    let ratio = narrow.det() / free.det();
    if !ratio.is_integer() {
        return None;
    }
    let r = ratio.to_integer().to_u64()?;
    let s = (r as f64).sqrt().round() as u64;
    (s * s == r).then_some(s)
}

/// Artin invariant of a supersingular K3 surface with `rho = 22`, using the
/// Mordell-Weil lattice recorded for its fiber configuration.
pub fn sigma0_from_known_mw(report: &SurfaceReport) -> Option<u32> {
    let (mw, torsion) = crate::golden::known_mordell_weil(report.p(), &report.geometric_fiber_multiset())?;
    let det_t = trivial_lattice(&report.fibers).det();
    artin_invariant(&shioda_tate(&det_t, &mw, torsion), report.p()).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det_of(s: &str) -> BigRational {
        parse_lattice(s).unwrap().det()
    }

    #[test]
    fn root_determinants() {
        for n in 1..8 {
            assert_eq!(root_lattice(RootKind::A(n)).unwrap().det(), q(n as i64 + 1));
        }
        for n in 4..10 {
            assert_eq!(root_lattice(RootKind::D(n)).unwrap().det(), q(4));
        }
        assert_eq!(root_lattice(RootKind::E(6)).unwrap().det(), q(3));
        assert_eq!(root_lattice(RootKind::E(7)).unwrap().det(), q(2));
        assert_eq!(root_lattice(RootKind::E(8)).unwrap().det(), q(1));
        assert_eq!(root_lattice(RootKind::U).unwrap().det(), q(-1));
        for k in [RootKind::L2, RootKind::L3, RootKind::L4] {
            assert_eq!(root_lattice(k).unwrap().det(), q(12));
        }
        assert!(root_lattice(RootKind::D(3)).is_err());
        assert!(root_lattice(RootKind::A(0)).is_err());
    }

    #[test]
    fn parser_and_determinants() {
        assert_eq!(det_of("A1*(7)"), BigRational::new(7.into(), 2.into()));
        assert_eq!(det_of("E8(3)"), q(3i64.pow(8)));
        assert_eq!(det_of("3.(E8(3))"), q(3i64.pow(6)));
        assert_eq!(det_of("<5/6>"), BigRational::new(5.into(), 6.into()));
        assert_eq!(det_of("A2(3)^2"), q(729));
        assert_eq!(det_of("D4(3)+A1(3)"), q(4 * 81 * 6));
        assert_eq!(det_of("0"), q(1));
        assert!(parse_lattice("A1(3").is_err());
        assert!(parse_lattice("Q2").is_err());
    }

    #[test]
    fn dual_of_dual() {
        let l = parse_lattice("L4").unwrap();
        assert_eq!(l.dual().unwrap().dual().unwrap().gram, l.gram);
        assert_eq!(l.dual().unwrap().det() * l.det(), q(1));
    }

    #[test]
    fn artin_examples() {
        assert_eq!(artin_invariant(&q(49), 7).unwrap(), 1);
        assert_eq!(artin_invariant(&q(3i64.pow(12)), 3).unwrap(), 6);
        assert!(artin_invariant(&q(12), 2).is_err());
        assert!(artin_invariant(&q(8), 2).is_err());
    }

    #[test]
    fn shioda_tate_p7() {
        let mw = parse_lattice("A1*(7)").unwrap();
        let det_t = q(2 * 343);
        let ns = shioda_tate(&det_t, &mw, 7);
        assert_eq!(ns, q(49));
    }
}
