//! Arithmetic in GF(2^n) for n ≤ 12.
//!
//! Elements are coefficient bitmasks (bit i holds the coefficient of t^i)
//! reduced modulo a fixed irreducible polynomial. The ordering of elements
//! is the ordering of their masks, and every canonical choice further down
//! the crate breaks ties with it.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 12;

/// Lexicographically smallest primitive polynomial for each degree 1..=12.
pub const DEFAULT_POLYS: [u32; 12] = [
    0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11D, 0x211, 0x409, 0x805, 0x1053,
];

/// Defining polynomial used for the P(ε) constructions: x^6+x^4+x^3+x+1.
pub const PEPS_POLY: u32 = 0x5B;

/// An element of GF(2^n).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(transparent)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn bits(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;
    // Addition in characteristic 2 is XOR.
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl std::ops::AddAssign for FieldElement {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

/// The field GF(2^n) presented as GF(2)[t]/(poly).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldContext {
    n: u32,
    poly: u32,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}; {:#x})", self.n, self.poly)
    }
}

/// Degree of a nonzero GF(2)[x] polynomial mask.
fn poly_degree(p: u64) -> u32 {
    63 - p.leading_zeros()
}

fn poly_rem(mut a: u64, d: u64) -> u64 {
    let dd = poly_degree(d);
    while a != 0 && poly_degree(a) >= dd {
        a ^= d << (poly_degree(a) - dd);
    }
    a
}

/// Irreducibility over GF(2) by trial division with every polynomial of
/// degree at most n/2.
pub fn is_irreducible_poly(poly: u32) -> bool {
    if poly < 2 {
        return false;
    }
    let n = poly_degree(poly as u64);
    if n == 0 {
        return false;
    }
    for d in 2u64..(1u64 << (n / 2 + 1)) {
        if poly_rem(poly as u64, d) == 0 {
            return false;
        }
    }
    true
}

impl FieldContext {
    /// Builds GF(2^n), using the shipped default primitive polynomial when
    /// `poly` is `None`.
    pub fn new(n: u32, poly: Option<u32>) -> Result<Self> {
        if n == 0 || n > MAX_DEGREE {
            return Err(Error::BadDegree(format!("extension degree {n} outside 1..=12")));
        }
        let poly = poly.unwrap_or(DEFAULT_POLYS[n as usize - 1]);
        if poly == 0 || poly_degree(poly as u64) != n {
            return Err(Error::BadDegree(format!("polynomial {poly:#x} does not have degree {n}")));
        }
        if !is_irreducible_poly(poly) {
            return Err(Error::PolynomialNotIrreducible(poly));
        }
        Ok(FieldContext { n, poly })
    }

    /// GF(2), used for every restricted-scalar object.
    pub fn gf2() -> Self {
        FieldContext { n: 1, poly: 0x3 }
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Number of elements, 2^n.
    pub fn order(&self) -> usize {
        1usize << self.n
    }

    pub fn mask(&self) -> u32 {
        (1u32 << self.n) - 1
    }

    /// The class of t, i.e. a root of the defining polynomial.
    pub fn root(&self) -> FieldElement {
        if self.n == 1 {
            FieldElement::ONE
        } else {
            FieldElement(2)
        }
    }

    pub fn elem(&self, bits: u32) -> FieldElement {
        debug_assert!(bits <= self.mask());
        FieldElement(bits as u16)
    }

    pub fn contains(&self, x: FieldElement) -> bool {
        x.bits() <= self.mask()
    }

    /// All elements in mask order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..(1u32 << self.n)).map(|b| FieldElement(b as u16))
    }

    #[inline]
    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        x + y
    }

    #[inline]
    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if self.n == 1 {
            return FieldElement(x.0 & y.0);
        }
        let (mut a, mut b) = (x.bits(), y.bits());
        let mut acc = 0u32;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> self.n & 1 != 0 {
                a ^= self.poly;
            }
        }
        FieldElement(acc as u16)
    }

    pub fn square(&self, x: FieldElement) -> FieldElement {
        self.mul(x, x)
    }

    pub fn pow(&self, x: FieldElement, mut e: u64) -> FieldElement {
        let mut base = x;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse as x^(2^n - 2).
    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(x, (1u64 << self.n) - 2))
    }

    /// x ↦ x^(2^k); k is taken modulo n and may be negative.
    pub fn frobenius(&self, x: FieldElement, k: i64) -> FieldElement {
        let k = k.rem_euclid(self.n as i64);
        let mut y = x;
        for _ in 0..k {
            y = self.square(y);
        }
        y
    }

    /// Trace from GF(2^n) down to the subfield GF(2^m), computed inside the
    /// big field: Σ_{i < n/m} x^(2^(m i)).
    pub fn trace_to_subfield(&self, x: FieldElement, m: u32) -> Result<FieldElement> {
        if m == 0 || !self.n.is_multiple_of(m) {
            return Err(Error::BadSubfield { n: self.n, m });
        }
        let mut acc = FieldElement::ZERO;
        let mut y = x;
        for _ in 0..self.n / m {
            acc += y;
            y = self.frobenius(y, m as i64);
        }
        Ok(acc)
    }

    /// Whether x lies in the subfield GF(2^m), i.e. is fixed by x ↦ x^(2^m).
    pub fn in_subfield(&self, x: FieldElement, m: u32) -> bool {
        self.frobenius(x, m as i64) == x
    }

    /// Elements of the subfield GF(2^m) in mask order.
    pub fn subfield_elements(&self, m: u32) -> Result<Vec<FieldElement>> {
        if m == 0 || !self.n.is_multiple_of(m) {
            return Err(Error::BadSubfield { n: self.n, m });
        }
        Ok(self.elements().filter(|&x| self.in_subfield(x, m)).collect())
    }

    /// Least k ≥ 1 with x^k = 1, by enumerating powers.
    pub fn multiplicative_order(&self, x: FieldElement) -> Result<u64> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut y = x;
        let mut k = 1u64;
        while y != FieldElement::ONE {
            y = self.mul(y, x);
            k += 1;
        }
        Ok(k)
    }

    pub fn is_generator(&self, x: FieldElement) -> bool {
        self.multiplicative_order(x)
            .map(|k| k == (1u64 << self.n) - 1)
            .unwrap_or(false)
    }

    /// Whether the class of t generates the multiplicative group.
    pub fn is_primitive(&self) -> bool {
        self.is_generator(self.root())
    }

    /// Smallest multiplicative generator in mask order.
    pub fn primitive_element(&self) -> FieldElement {
        if self.is_primitive() {
            return self.root();
        }
        self.elements()
            .find(|&x| self.is_generator(x))
            .expect("finite field has a generator")
    }

    /// Distinct Galois conjugates x, x^2, x^4, ... in orbit order.
    pub fn conjugates(&self, x: FieldElement) -> Vec<FieldElement> {
        let mut out = vec![x];
        let mut y = self.square(x);
        while y != x {
            out.push(y);
            y = self.square(y);
        }
        out
    }

    /// Monic minimal polynomial of x over GF(2), as a mask.
    pub fn minimal_polynomial(&self, x: FieldElement) -> u32 {
        // Coefficients over GF(2^n), lowest degree first.
        let mut coeffs = vec![FieldElement::ONE];
        for c in self.conjugates(x) {
            let mut next = vec![FieldElement::ZERO; coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i + 1] += a;
                next[i] += self.mul(a, c);
            }
            coeffs = next;
        }
        coeffs.iter().enumerate().fold(0u32, |mask, (i, &a)| {
            debug_assert!(a.0 <= 1, "minimal polynomial has GF(2) coefficients");
            mask | ((a.0 as u32 & 1) << i)
        })
    }

    /// Evaluates a GF(2)[x] polynomial mask at x.
    pub fn eval_poly(&self, poly: u32, x: FieldElement) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for i in (0..32 - poly.leading_zeros()).rev() {
            acc = self.mul(acc, x);
            if poly >> i & 1 == 1 {
                acc += FieldElement::ONE;
            }
        }
        acc
    }

    /// Coordinates of x over GF(2) with respect to `basis`, solved by
    /// elimination; `None` when x is outside the span.
    pub fn coordinates(&self, x: FieldElement, basis: &[FieldElement]) -> Option<u32> {
        // Echelon form on masks, tracking which basis vectors combine.
        let mut rows: Vec<(u32, u32)> = basis
            .iter()
            .enumerate()
            .map(|(i, b)| (b.bits(), 1u32 << i))
            .collect();
        let mut pivots: Vec<(u32, u32, u32)> = Vec::new();
        for (mut v, mut c) in rows.drain(..) {
            for &(p, pv, pc) in &pivots {
                if v >> p & 1 == 1 {
                    v ^= pv;
                    c ^= pc;
                }
            }
            if v != 0 {
                let p = 31 - v.leading_zeros();
                pivots.push((p, v, c));
            }
        }
        let (mut v, mut c) = (x.bits(), 0u32);
        for &(p, pv, pc) in &pivots {
            if v >> p & 1 == 1 {
                v ^= pv;
                c ^= pc;
            }
        }
        (v == 0).then_some(c)
    }
}

/// Parses a polynomial mask written as hexadecimal, with or without `0x`.
pub fn parse_poly_hex(s: &str) -> Result<u32> {
    let t = s.trim();
    let t = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    u32::from_str_radix(t, 16).map_err(|_| Error::BadFormat(format!("bad polynomial mask {s:?}")))
}

pub fn format_poly(poly: u32) -> String {
    let mut terms = Vec::new();
    for i in (0..32 - poly.leading_zeros()).rev() {
        if poly >> i & 1 == 1 {
            terms.push(match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            });
        }
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}
