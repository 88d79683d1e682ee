//! Exact arithmetic in GF(p^e).
//!
//! A [`FiniteField`] holds the modulus data plus lookup tables; elements are
//! integer codes `Σ cᵢ·pⁱ` computed from the coefficient vector of the
//! polynomial representative, so code 0 is zero and code 1 is one. When no
//! modulus polynomial is supplied the lexicographically least monic
//! irreducible of degree e is chosen (coefficient tuples compared from the
//! constant term upward).
//!
//! [`FieldExt`] is a degree-n polynomial extension over an arbitrary base
//! field, used to present GF(q^n) with explicit GF(q)-coordinates (the form
//! field reduction needs). The prime-power `FiniteField` constructor is
//! itself bootstrapped through a `FieldExt` over GF(p).

use std::sync::Arc;
use thiserror::Error;

/// Largest supported field order. Lookup tables are quadratic in q for small
/// q and linear beyond `ADD_TABLE_MAX`, so this bound keeps memory sane.
pub const MAX_ORDER: u64 = 1 << 16;
/// Full q×q addition tables are built only below this order.
const ADD_TABLE_MAX: u64 = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree must be at least 1")]
    BadDegree,
    #[error("modulus polynomial is reducible")]
    ReduciblePoly,
    #[error("modulus polynomial does not have degree e (expected {expected} lower coefficients)")]
    DegreeMismatch { expected: usize },
    #[error("polynomial coefficient {0} out of range")]
    CoeffOutOfRange(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("element code {0} out of range")]
    CodeOutOfRange(u64),
    #[error("field order {0} exceeds the supported bound 2^16")]
    OrderTooLarge(u64),
}

/// Deterministic 64-bit FNV-1a, used for the structural field signature.
fn fnv1a(words: &[u64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &w in words {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of a specific field: the field's structural signature plus the
/// integer code. Mixing elements of structurally different fields errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem {
    pub sig: u64,
    pub code: u32,
}

/// GF(p^e) with table-backed arithmetic on integer codes.
pub struct FiniteField {
    p: u32,
    e: u32,
    q: u32,
    poly: Vec<u32>,
    sig: u64,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg_t: Vec<u32>,
    inv_t: Vec<u32>,
    frob_t: Vec<u32>,
    add_t: Option<Vec<u32>>,
}

impl std::fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("poly", &self.poly)
            .finish()
    }
}

impl FiniteField {
    /// Builds GF(p^e). `poly`, if given, lists the e lower coefficients
    /// c₀..c_{e-1} of a monic degree-e polynomial over GF(p); otherwise the
    /// lexicographically least monic irreducible is found by search.
    pub fn new(p: u64, e: u32, poly: Option<&[u64]>) -> Result<Arc<FiniteField>, GfError> {
        if !is_prime(p) {
            return Err(GfError::NonPrime(p));
        }
        if e == 0 {
            return Err(GfError::BadDegree);
        }
        let mut q: u64 = 1;
        for _ in 0..e {
            q = q.saturating_mul(p);
            if q > MAX_ORDER {
                return Err(GfError::OrderTooLarge(q));
            }
        }
        let poly32: Vec<u32> = match poly {
            Some(cs) => {
                if cs.len() != e as usize {
                    return Err(GfError::DegreeMismatch { expected: e as usize });
                }
                for &c in cs {
                    if c >= p {
                        return Err(GfError::CoeffOutOfRange(c));
                    }
                }
                cs.iter().map(|&c| c as u32).collect()
            }
            None => Vec::new(),
        };

        if e == 1 {
            let poly = if poly32.is_empty() { vec![0] } else { poly32 };
            return Ok(Arc::new(Self::prime_field(p as u32, poly)));
        }

        // Bootstrap through an extension of the prime field.
        let base = Arc::new(Self::prime_field(p as u32, vec![0]));
        let ext = if poly32.is_empty() {
            FieldExt::search(base, e as usize)?
        } else {
            FieldExt::new(base, e as usize, poly32)?
        };
        Ok(Arc::new(Self::tabulate(&ext)))
    }

    fn prime_field(p: u32, poly: Vec<u32>) -> FiniteField {
        let q = p;
        let mul = |a: u32, b: u32| ((a as u64 * b as u64) % p as u64) as u32;
        Self::build_tables(p, 1, q, poly, &mul, &|a| {
            let mut d = vec![0u32; 1];
            d[0] = a;
            d
        })
    }

    fn tabulate(ext: &FieldExt) -> FiniteField {
        let p = ext.base.p;
        let e = ext.deg as u32;
        let q = ext.order() as u32;
        let mul = |a: u32, b: u32| ext.code_of(&ext.mul(&ext.elem_of(a as u64), &ext.elem_of(b as u64))) as u32;
        let digits = |a: u32| ext.elem_of(a as u64);
        Self::build_tables(p, e, q, ext.poly.clone(), &mul, &digits)
    }

    fn build_tables(
        p: u32,
        e: u32,
        q: u32,
        poly: Vec<u32>,
        mul: &dyn Fn(u32, u32) -> u32,
        digits: &dyn Fn(u32) -> Vec<u32>,
    ) -> FiniteField {
        // Discrete-log tables from a primitive element.
        let qm1 = (q - 1) as u64;
        let mut prime_factors = Vec::new();
        let mut r = qm1;
        let mut d = 2u64;
        while d * d <= r {
            if r % d == 0 {
                prime_factors.push(d);
                while r % d == 0 {
                    r /= d;
                }
            }
            d += 1;
        }
        if r > 1 {
            prime_factors.push(r);
        }
        let pow_slow = |a: u32, mut k: u64| -> u32 {
            let mut acc = 1u32;
            let mut b = a;
            while k > 0 {
                if k & 1 == 1 {
                    acc = mul(acc, b);
                }
                b = mul(b, b);
                k >>= 1;
            }
            acc
        };
        let mut g = 1u32;
        for cand in 1..q {
            if qm1 == 0 {
                break;
            }
            let primitive = prime_factors.iter().all(|&l| pow_slow(cand, qm1 / l) != 1);
            if primitive {
                g = cand;
                break;
            }
        }
        let mut exp = vec![0u32; qm1.max(1) as usize];
        let mut log = vec![0u32; q as usize];
        let mut acc = 1u32;
        for i in 0..exp.len() {
            exp[i] = acc;
            log[acc as usize] = i as u32;
            acc = mul(acc, g);
        }

        let addc = |a: u32, b: u32| -> u32 {
            let da = digits(a);
            let db = digits(b);
            let mut code = 0u64;
            let mut w = 1u64;
            for i in 0..e as usize {
                let s = (da.get(i).copied().unwrap_or(0) + db.get(i).copied().unwrap_or(0)) % p;
                code += s as u64 * w;
                w *= p as u64;
            }
            code as u32
        };
        let add_t = if (q as u64) <= ADD_TABLE_MAX {
            let mut t = vec![0u32; q as usize * q as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = addc(a, b);
                }
            }
            Some(t)
        } else {
            None
        };
        let mut neg_t = vec![0u32; q as usize];
        for a in 0..q {
            let da = digits(a);
            let mut code = 0u64;
            let mut w = 1u64;
            for i in 0..e as usize {
                let v = da.get(i).copied().unwrap_or(0);
                code += (((p - v) % p) as u64) * w;
                w *= p as u64;
            }
            neg_t[a as usize] = code as u32;
        }
        let mut inv_t = vec![0u32; q as usize];
        for a in 1..q {
            inv_t[a as usize] = exp[((qm1 - log[a as usize] as u64) % qm1.max(1)) as usize];
        }
        let mut frob_t = vec![0u32; q as usize];
        for a in 0..q {
            frob_t[a as usize] = pow_slow(a, p as u64);
        }

        let mut sigwords = vec![p as u64, e as u64];
        sigwords.extend(poly.iter().map(|&c| c as u64));
        let sig = fnv1a(&sigwords);
        FiniteField { p, e, q, poly, sig, exp, log, neg_t, inv_t, frob_t, add_t }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    /// Lower coefficients c₀..c_{e-1} of the monic modulus polynomial.
    pub fn poly(&self) -> &[u32] {
        &self.poly
    }
    /// Structural signature: equal iff (p, e, poly) are equal.
    pub fn sig(&self) -> u64 {
        self.sig
    }
    pub fn same_field(&self, other: &FiniteField) -> bool {
        self.sig == other.sig
    }
    pub fn is_even(&self) -> bool {
        self.p == 2
    }

    /// Raw-code addition (unchecked bounds in release builds).
    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.q && b < self.q);
        match &self.add_t {
            Some(t) => t[(a * self.q + b) as usize],
            None => {
                let (p, e) = (self.p, self.e);
                let (mut x, mut y) = (a, b);
                let mut code = 0u64;
                let mut w = 1u64;
                for _ in 0..e {
                    let s = (x % p + y % p) % p;
                    code += s as u64 * w;
                    w *= p as u64;
                    x /= p;
                    y /= p;
                }
                code as u32
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg_t[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let qm1 = (self.q - 1) as u64;
        let s = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % qm1;
        self.exp[s as usize]
    }

    /// Multiplicative inverse of a raw code; code 0 is a caller error.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        self.inv_t[a as usize]
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> Result<u32, GfError> {
        if b == 0 {
            return Err(GfError::DivisionByZero);
        }
        Ok(self.mul(a, self.inv(b)))
    }

    pub fn pow(&self, a: u32, k: i64) -> Result<u32, GfError> {
        if a == 0 {
            return match k.cmp(&0) {
                std::cmp::Ordering::Greater => Ok(0),
                std::cmp::Ordering::Equal => Ok(1),
                std::cmp::Ordering::Less => Err(GfError::DivisionByZero),
            };
        }
        if self.q == 2 {
            return Ok(1); // the only nonzero element
        }
        let qm1 = (self.q - 1) as i64;
        let kr = ((k % qm1) + qm1) % qm1;
        let s = (self.log[a as usize] as u64 * kr as u64) % qm1 as u64;
        Ok(self.exp[s as usize])
    }

    /// x ↦ x^p, the generating field automorphism.
    #[inline]
    pub fn frobenius(&self, a: u32) -> u32 {
        self.frob_t[a as usize]
    }

    /// True iff `a` is a square in the field (0 counts as a square).
    pub fn is_square(&self, a: u32) -> bool {
        if a == 0 || self.p == 2 {
            return true;
        }
        self.log[a as usize] % 2 == 0
    }

    /// Coefficient digits c₀..c_{e-1} of a code.
    pub fn coeffs(&self, a: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.e as usize);
        let mut x = a;
        for _ in 0..self.e {
            out.push(x % self.p);
            x /= self.p;
        }
        out
    }

    pub fn elem(&self, code: u64) -> Result<FieldElem, GfError> {
        if code >= self.q as u64 {
            return Err(GfError::CodeOutOfRange(code));
        }
        Ok(FieldElem { sig: self.sig, code: code as u32 })
    }

    pub fn elements(&self) -> Vec<FieldElem> {
        (0..self.q).map(|c| FieldElem { sig: self.sig, code: c }).collect()
    }

    fn check(&self, a: FieldElem) -> Result<u32, GfError> {
        if a.sig != self.sig {
            return Err(GfError::FieldMismatch);
        }
        Ok(a.code)
    }

    pub fn add_elems(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, GfError> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        Ok(FieldElem { sig: self.sig, code: self.add(a, b) })
    }

    pub fn sub_elems(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, GfError> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        Ok(FieldElem { sig: self.sig, code: self.sub(a, b) })
    }

    pub fn mul_elems(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, GfError> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        Ok(FieldElem { sig: self.sig, code: self.mul(a, b) })
    }

    pub fn div_elems(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, GfError> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        if b == 0 {
            return Err(GfError::DivisionByZero);
        }
        Ok(FieldElem { sig: self.sig, code: self.mul(a, self.inv(b)) })
    }

    pub fn inv_elem(&self, a: FieldElem) -> Result<FieldElem, GfError> {
        let a = self.check(a)?;
        if a == 0 {
            return Err(GfError::DivisionByZero);
        }
        Ok(FieldElem { sig: self.sig, code: self.inv(a) })
    }

    pub fn neg_elem(&self, a: FieldElem) -> Result<FieldElem, GfError> {
        let a = self.check(a)?;
        Ok(FieldElem { sig: self.sig, code: self.neg(a) })
    }

    pub fn pow_elem(&self, a: FieldElem, k: i64) -> Result<FieldElem, GfError> {
        let a = self.check(a)?;
        Ok(FieldElem { sig: self.sig, code: self.pow(a, k)? })
    }
}

/// A degree-`deg` polynomial extension over `base`, with elements stored as
/// coefficient vectors of base-field codes. Used to present GF(q^n) with
/// explicit GF(q)-coordinates for field reduction; arithmetic is schoolbook
/// polynomial arithmetic modulo the (monic, irreducible) `poly`.
#[derive(Clone)]
pub struct FieldExt {
    pub base: Arc<FiniteField>,
    pub deg: usize,
    /// Lower coefficients c₀..c_{deg-1}; the leading coefficient is 1.
    pub poly: Vec<u32>,
}

pub type ExtElem = Vec<u32>;

impl FieldExt {
    pub fn new(base: Arc<FiniteField>, deg: usize, poly: Vec<u32>) -> Result<FieldExt, GfError> {
        if deg == 0 {
            return Err(GfError::BadDegree);
        }
        if poly.len() != deg {
            return Err(GfError::DegreeMismatch { expected: deg });
        }
        for &c in &poly {
            if c >= base.q() {
                return Err(GfError::CoeffOutOfRange(c as u64));
            }
        }
        if deg > 1 && !irreducible(&base, &poly) {
            return Err(GfError::ReduciblePoly);
        }
        Ok(FieldExt { base, deg, poly })
    }

    /// Lexicographically least monic irreducible of the given degree
    /// (coefficient tuples compared from the constant term upward).
    pub fn search(base: Arc<FiniteField>, deg: usize) -> Result<FieldExt, GfError> {
        if deg == 0 {
            return Err(GfError::BadDegree);
        }
        let q = base.q() as u64;
        let mut total = 1u64;
        for _ in 0..deg {
            total = total.saturating_mul(q);
        }
        for code in 0..total {
            let mut cs = Vec::with_capacity(deg);
            let mut x = code;
            for _ in 0..deg {
                cs.push((x % q) as u32);
                x /= q;
            }
            if deg == 1 || irreducible(&base, &cs) {
                return Ok(FieldExt { base, deg, poly: cs });
            }
        }
        Err(GfError::ReduciblePoly)
    }

    pub fn order(&self) -> u64 {
        (self.base.q() as u64).pow(self.deg as u32)
    }

    pub fn zero(&self) -> ExtElem {
        vec![0; self.deg]
    }

    pub fn one(&self) -> ExtElem {
        let mut v = vec![0; self.deg];
        v[0] = 1;
        v
    }

    /// The class of x, i.e. the adjoined root (zero in a degree-1 tower).
    pub fn gen(&self) -> ExtElem {
        let mut v = vec![0; self.deg];
        if self.deg > 1 {
            v[1] = 1;
        } else {
            // x ≡ -c₀ in base[x]/(x + c₀)
            v[0] = self.base.neg(self.poly[0]);
        }
        v
    }

    pub fn from_base(&self, c: u32) -> ExtElem {
        let mut v = vec![0; self.deg];
        v[0] = c;
        v
    }

    pub fn is_zero(&self, a: &ExtElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        (0..self.deg).map(|i| self.base.add(a[i], b[i])).collect()
    }

    pub fn neg(&self, a: &ExtElem) -> ExtElem {
        a.iter().map(|&c| self.base.neg(c)).collect()
    }

    pub fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        (0..self.deg).map(|i| self.base.sub(a[i], b[i])).collect()
    }

    pub fn scale(&self, a: &ExtElem, c: u32) -> ExtElem {
        a.iter().map(|&x| self.base.mul(x, c)).collect()
    }

    pub fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let f = &self.base;
        let n = self.deg;
        let mut prod = vec![0u32; 2 * n - 1];
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                prod[i + j] = f.add(prod[i + j], f.mul(a[i], b[j]));
            }
        }
        // Reduce modulo x^n + Σ polyᵢ xⁱ from the top down.
        for i in (n..2 * n - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..n {
                let t = f.mul(c, self.poly[j]);
                prod[i - n + j] = f.sub(prod[i - n + j], t);
            }
        }
        prod.truncate(n);
        prod
    }

    pub fn inv(&self, a: &ExtElem) -> Result<ExtElem, GfError> {
        if self.is_zero(a) {
            return Err(GfError::DivisionByZero);
        }
        // a^(q^n - 2) by square and multiply; the orders here are tiny.
        let mut k = self.order() - 2;
        let mut acc = self.one();
        let mut b = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            k >>= 1;
        }
        Ok(acc)
    }

    pub fn pow(&self, a: &ExtElem, mut k: u64) -> ExtElem {
        let mut acc = self.one();
        let mut b = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            k >>= 1;
        }
        acc
    }

    /// Integer code Σ cᵢ·qⁱ of an element.
    pub fn code_of(&self, a: &ExtElem) -> u64 {
        let q = self.base.q() as u64;
        let mut code = 0u64;
        let mut w = 1u64;
        for &c in a {
            code += c as u64 * w;
            w *= q;
        }
        code
    }

    pub fn elem_of(&self, code: u64) -> ExtElem {
        let q = self.base.q() as u64;
        let mut v = Vec::with_capacity(self.deg);
        let mut x = code;
        for _ in 0..self.deg {
            v.push((x % q) as u32);
            x /= q;
        }
        v
    }

    pub fn elements(&self) -> impl Iterator<Item = ExtElem> + '_ {
        (0..self.order()).map(move |c| self.elem_of(c))
    }
}

/// Trial-division irreducibility over the base field for a monic polynomial
/// given by its lower coefficients.
fn irreducible(base: &FiniteField, lower: &[u32]) -> bool {
    let deg = lower.len();
    let mut full = lower.to_vec();
    full.push(1);
    let q = base.q() as u64;
    for d in 1..=deg / 2 {
        let mut count = 1u64;
        for _ in 0..d {
            count = count.saturating_mul(q);
        }
        for code in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut x = code;
            for _ in 0..d {
                div.push((x % q) as u32);
                x /= q;
            }
            div.push(1);
            if poly_rem_is_zero(base, &full, &div) {
                return false;
            }
        }
    }
    true
}

/// True iff `num` (monic allowed to be anything) is divisible by the monic
/// polynomial `div`; both are full little-endian coefficient vectors.
fn poly_rem_is_zero(f: &FiniteField, num: &[u32], div: &[u32]) -> bool {
    let dd = div.len() - 1;
    let mut r = num.to_vec();
    while r.len() > dd {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if lead != 0 {
            for i in 0..=dd {
                let t = f.mul(lead, div[i]);
                r[shift + i] = f.sub(r[shift + i], t);
            }
        }
        r.pop();
    }
    r.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prime_field_uses_linear_modulus() {
        let f = FiniteField::new(3, 1, None).unwrap();
        assert_eq!((f.p(), f.e(), f.q()), (3, 1, 3));
        assert_eq!(f.poly(), &[0]);
    }

    #[test]
    fn gf4_default_modulus_is_the_unique_irreducible_quadratic() {
        // Oracle: scan all four monic quadratics over GF(2) for roots/factors.
        let base = FiniteField::new(2, 1, None).unwrap();
        let mut irreducibles = Vec::new();
        for code in 0..4u64 {
            let lower = [(code % 2) as u32, (code / 2) as u32];
            if super::irreducible(&base, &lower) {
                irreducibles.push(lower.to_vec());
            }
        }
        assert_eq!(irreducibles, vec![vec![1, 1]]); // x^2 + x + 1
        let f = FiniteField::new(2, 2, None).unwrap();
        assert_eq!(f.poly(), &[1, 1]);
    }

    #[test]
    fn gf4_generator_squares_to_generator_plus_one() {
        let f = FiniteField::new(2, 2, None).unwrap();
        // code 2 is the class of x; x^2 = x + 1 has code 3.
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.add(2, 1), 3);
    }

    #[test]
    fn composite_order_is_rejected() {
        assert_eq!(FiniteField::new(4, 1, None).unwrap_err(), GfError::NonPrime(4));
    }

    #[test]
    fn reducible_modulus_is_rejected() {
        // x^2 + 1 = (x+1)^2 over GF(2).
        assert_eq!(FiniteField::new(2, 2, Some(&[1, 0])).unwrap_err(), GfError::ReduciblePoly);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let f = FiniteField::new(5, 1, None).unwrap();
        assert_eq!(f.div(3, 0).unwrap_err(), GfError::DivisionByZero);
    }

    #[test]
    fn mixing_fields_is_an_error() {
        let f3 = FiniteField::new(3, 1, None).unwrap();
        let f5 = FiniteField::new(5, 1, None).unwrap();
        let a = f3.elem(1).unwrap();
        let b = f5.elem(1).unwrap();
        assert_eq!(f3.add_elems(a, b).unwrap_err(), GfError::FieldMismatch);
    }

    #[test]
    fn frobenius_is_additive_and_multiplicative_up_to_81() {
        for (p, e) in [(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (3, 4), (5, 1), (7, 1), (9, 1), (81, 1)] {
            if !super::is_prime(p) {
                continue;
            }
            let f = FiniteField::new(p, e, None).unwrap();
            for a in 0..f.q() {
                for b in 0..f.q() {
                    assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                    assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
                }
            }
        }
        let f81 = FiniteField::new(3, 4, None).unwrap();
        assert_eq!(f81.q(), 81);
    }

    #[test]
    fn nonzero_element_orders_divide_group_order() {
        for (p, e) in [(3u64, 2u32), (2, 4), (5, 2)] {
            let f = FiniteField::new(p, e, None).unwrap();
            for a in 1..f.q() {
                let mut ord = 1u32;
                let mut acc = a;
                while acc != 1 {
                    acc = f.mul(acc, a);
                    ord += 1;
                }
                assert_eq!((f.q() - 1) % ord, 0);
                assert_eq!(f.pow(a, (f.q() - 1) as i64).unwrap(), 1);
            }
        }
    }

    #[test]
    fn tower_over_prime_base_matches_direct_construction() {
        // GF(9) as a tower over GF(3) must agree with GF(3^2) on codes.
        let base = FiniteField::new(3, 1, None).unwrap();
        let ext = FieldExt::search(base, 2).unwrap();
        let f9 = FiniteField::new(3, 2, None).unwrap();
        assert_eq!(ext.poly, f9.poly());
        for a in 0..9u64 {
            for b in 0..9u64 {
                let ea = ext.elem_of(a);
                let eb = ext.elem_of(b);
                assert_eq!(ext.code_of(&ext.mul(&ea, &eb)), f9.mul(a as u32, b as u32) as u64);
                assert_eq!(ext.code_of(&ext.add(&ea, &eb)), f9.add(a as u32, b as u32) as u64);
            }
        }
    }

    #[test]
    fn tower_inverse_is_correct() {
        let base = FiniteField::new(3, 2, None).unwrap(); // GF(9)
        let ext = FieldExt::search(base, 2).unwrap(); // GF(81) over GF(9)
        for code in 1..ext.order() {
            let a = ext.elem_of(code);
            let inv = ext.inv(&a).unwrap();
            assert_eq!(ext.mul(&a, &inv), ext.one());
        }
    }

    proptest! {
        #[test]
        fn gf8_and_gf9_satisfy_field_axioms(a in 0u32..9, b in 0u32..9, c in 0u32..9) {
            for q in [8u64, 9] {
                let (p, e) = if q == 8 { (2, 3) } else { (3, 2) };
                let f = FiniteField::new(p, e, None).unwrap();
                let (a, b, c) = (a % f.q(), b % f.q(), c % f.q());
                prop_assert_eq!(f.add(a, b), f.add(b, a));
                prop_assert_eq!(f.mul(a, b), f.mul(b, a));
                prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                prop_assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    prop_assert_eq!(f.mul(a, f.inv(a)), 1);
                }
            }
        }
    }
}
