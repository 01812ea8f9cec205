//! Arithmetic over GF(p^α).
//!
//! Elements are carried as canonical integer representatives: the base-p digits
//! of a rep are the polynomial coefficients (constant term least significant)
//! of the residue modulo the field's modulus. Fields with q ≤ 2^16 use log/exp
//! tables; larger extension fields fall back to polynomial arithmetic.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NonPrime(u64),
    #[error("extension degree {0} out of range (1..=8)")]
    DegreeOutOfRange(u32),
    #[error("field order {p}^{alpha} does not fit in 64 bits")]
    OrderOverflow { p: u64, alpha: u32 },
    #[error("GF({small}) is not a subfield of GF({big})")]
    NotSubfield { small: u64, big: u64 },
    #[error("extension field GF({0}) too large for subfield embedding")]
    ExtensionTooLarge(u128),
}

enum Kind {
    Prime,
    Table { exp: Vec<u64>, log: Vec<u32> },
    Poly,
}

struct Inner {
    p: u64,
    alpha: u32,
    q: u64,
    modulus: Vec<u64>,
    kind: Kind,
}

/// A finite field GF(p^α), cheap to clone and share across threads.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        // The modulus is canonical, so (p, α) identifies the field.
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.alpha == other.0.alpha)
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.0.q)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

// Dense polynomials over GF(p), low-to-high coefficients, no trailing zeros.
mod poly {
    use super::{mulmod, powmod};

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = powmod(m[dm], p - 2, p);
        while a.len() > dm {
            let da = a.len() - 1;
            let c = mulmod(a[da], lead_inv, p);
            for i in 0..=dm {
                let sub = mulmod(c, m[i], p);
                let idx = da - dm + i;
                a[idx] = (a[idx] + p - sub) % p;
            }
            a = trim(a);
        }
        a
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
            }
        }
        trim(out)
    }

    pub fn mulmod_poly(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let len = a.len().max(b.len());
        let mut out = vec![0u64; len];
        for i in 0..len {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            out[i] = (x + p - y) % p;
        }
        trim(out)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// x^(p^d) mod m by repeated p-th powering.
    pub fn frobenius_power(d: u32, m: &[u64], p: u64) -> Vec<u64> {
        let mut x = rem(&[0, 1], m, p);
        for _ in 0..d {
            let mut acc = vec![1u64];
            let mut base = x.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mulmod_poly(&acc, &base, m, p);
                }
                base = mulmod_poly(&base, &base, m, p);
                e >>= 1;
            }
            x = acc;
        }
        x
    }

    /// Rabin-style irreducibility for small degree: no factor of degree ≤ deg/2.
    pub fn is_irreducible(m: &[u64], p: u64) -> bool {
        let deg = (m.len() - 1) as u32;
        if deg == 1 {
            return true;
        }
        for d in 1..=deg / 2 {
            let xp = frobenius_power(d, m, p);
            let diff = sub(&xp, &[0, 1], p);
            let g = gcd(m, &diff, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

fn digits(mut rep: u64, p: u64, alpha: u32) -> Vec<u64> {
    let mut out = Vec::with_capacity(alpha as usize);
    for _ in 0..alpha {
        out.push(rep % p);
        rep /= p;
    }
    out
}

fn undigits(coeffs: &[u64], p: u64) -> u64 {
    coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c)
}

impl Field {
    /// GF(p^α) with the lexicographically smallest monic irreducible modulus.
    pub fn new(p: u64, alpha: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        if !(1..=8).contains(&alpha) {
            return Err(FieldError::DegreeOutOfRange(alpha));
        }
        Self::build(p, alpha)
    }

    /// Like [`Field::new`] but without the α ≤ 8 cap, used for extension fields.
    fn build(p: u64, alpha: u32) -> Result<Self, FieldError> {
        let q = p
            .checked_pow(alpha)
            .ok_or(FieldError::OrderOverflow { p, alpha })?;
        let modulus = if alpha == 1 {
            vec![0, 1]
        } else {
            let mut found = None;
            for low in 0..q {
                let mut m = digits(low, p, alpha);
                if m[0] == 0 {
                    continue;
                }
                m.push(1);
                if poly::is_irreducible(&m, p) {
                    found = Some(m);
                    break;
                }
            }
            found.expect("an irreducible polynomial exists for every degree")
        };
        let mut inner = Inner {
            p,
            alpha,
            q,
            modulus,
            kind: Kind::Poly,
        };
        if alpha == 1 {
            inner.kind = Kind::Prime;
        } else if q <= TABLE_LIMIT {
            inner.kind = build_tables(&inner);
        }
        Ok(Field(Arc::new(inner)))
    }

    /// GF(2).
    pub fn binary() -> Self {
        Self::new(2, 1).expect("GF(2)")
    }

    /// GF(q) from its order, e.g. 8 or 13.
    pub fn from_order(q: u64) -> Result<Self, FieldError> {
        let (p, alpha) = prime_power(q).ok_or(FieldError::NonPrime(q))?;
        Self::new(p, alpha)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn alpha(&self) -> u32 {
        self.0.alpha
    }
    pub fn order(&self) -> u64 {
        self.0.q
    }
    /// Modulus coefficients, low-to-high (monic).
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let i = &*self.0;
        match i.kind {
            Kind::Prime => ((a as u128 + b as u128) % i.p as u128) as u64,
            _ if i.p == 2 => a ^ b,
            _ => {
                let (mut a, mut b, mut out, mut scale) = (a, b, 0u64, 1u64);
                for _ in 0..i.alpha {
                    out += ((a % i.p + b % i.p) % i.p) * scale;
                    a /= i.p;
                    b /= i.p;
                    scale *= i.p;
                }
                out
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        let i = &*self.0;
        match i.kind {
            Kind::Prime => {
                if a == 0 {
                    0
                } else {
                    i.p - a
                }
            }
            _ if i.p == 2 => a,
            _ => {
                let (mut a, mut out, mut scale) = (a, 0u64, 1u64);
                for _ in 0..i.alpha {
                    out += ((i.p - a % i.p) % i.p) * scale;
                    a /= i.p;
                    scale *= i.p;
                }
                out
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let i = &*self.0;
        match &i.kind {
            Kind::Prime => mulmod(a, b, i.p),
            Kind::Table { exp, log } => {
                if a == 0 || b == 0 {
                    0
                } else {
                    exp[log[a as usize] as usize + log[b as usize] as usize]
                }
            }
            Kind::Poly => {
                let pa = poly::trim(digits(a, i.p, i.alpha));
                let pb = poly::trim(digits(b, i.p, i.alpha));
                undigits(&poly::mulmod_poly(&pa, &pb, &i.modulus, i.p), i.p)
            }
        }
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let i = &*self.0;
        Some(match &i.kind {
            Kind::Prime => powmod(a, i.p - 2, i.p),
            Kind::Table { exp, log } => {
                let l = log[a as usize] as u64;
                exp[((i.q - 1 - l) % (i.q - 1)) as usize]
            }
            Kind::Poly => self.pow(a, i.q - 2),
        })
    }

    pub fn div(&self, a: u64, b: u64) -> Option<u64> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// A generator of the multiplicative group (deterministic: smallest one found).
    pub fn primitive_element(&self) -> u64 {
        let i = &*self.0;
        if let Kind::Table { exp, .. } = &i.kind {
            return exp[1];
        }
        if i.q == 2 {
            return 1;
        }
        let order = i.q - 1;
        let factors = prime_factors(order);
        (2..i.q)
            .find(|&g| factors.iter().all(|&f| self.pow(g, order / f) != 1))
            .expect("multiplicative group is cyclic")
    }

    /// Element from its polynomial coefficients (low-to-high).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> u64 {
        let i = &*self.0;
        let m: Vec<u64> = coeffs.iter().map(|c| c % i.p).collect();
        let r = poly::rem(&m, &i.modulus, i.p);
        undigits(&r, i.p)
    }

    pub fn element(&self, rep: u64) -> FieldElement {
        FieldElement {
            field: self.clone(),
            rep: rep % self.0.q,
        }
    }

    pub fn contains(&self, rep: u64) -> bool {
        rep < self.0.q
    }

    /// GF(p^{αℓ}); the subfield embedding is available via [`Field::embedding_into`].
    pub fn extension(&self, ell: u32) -> Result<Field, FieldError> {
        if ell == 1 {
            return Ok(self.clone());
        }
        let alpha = self.0.alpha.checked_mul(ell).ok_or(FieldError::DegreeOutOfRange(ell))?;
        let big = Self::build(self.0.p, alpha)?;
        if big.order() > TABLE_LIMIT {
            return Err(FieldError::ExtensionTooLarge(big.order() as u128));
        }
        Ok(big)
    }

    /// Image table of every element of `self` inside `big` (the embedding GF(q) → GF(q^ℓ)).
    ///
    /// Deterministic: z is sent to the root of the modulus with the smallest discrete log
    /// relative to `big`'s primitive element.
    pub fn embedding_into(&self, big: &Field) -> Result<Vec<u64>, FieldError> {
        if self == big {
            return Ok((0..self.order()).collect());
        }
        let (s, b) = (&*self.0, &*big.0);
        if s.p != b.p || b.alpha % s.alpha != 0 {
            return Err(FieldError::NotSubfield { small: s.q, big: b.q });
        }
        if s.alpha == 1 {
            return Ok((0..s.q).collect());
        }
        let g = big.primitive_element();
        let h = big.pow(g, (b.q - 1) / (s.q - 1));
        let eval = |x: u64| {
            s.modulus
                .iter()
                .rev()
                .fold(0u64, |acc, &c| big.add(big.mul(acc, x), c))
        };
        let mut x = 1u64;
        let mut root = None;
        for _ in 0..s.q - 1 {
            if eval(x) == 0 {
                root = Some(x);
                break;
            }
            x = big.mul(x, h);
        }
        let root = root.ok_or(FieldError::NotSubfield { small: s.q, big: b.q })?;
        let mut basis = Vec::with_capacity(s.alpha as usize);
        let mut acc = 1u64;
        for _ in 0..s.alpha {
            basis.push(acc);
            acc = big.mul(acc, root);
        }
        Ok((0..s.q)
            .map(|rep| {
                digits(rep, s.p, s.alpha)
                    .iter()
                    .zip(&basis)
                    .fold(0u64, |acc, (&d, &bz)| big.add(acc, big.mul(d, bz)))
            })
            .collect())
    }

    pub fn is_subfield_of(&self, big: &Field) -> bool {
        self.0.p == big.0.p && big.0.alpha % self.0.alpha == 0
    }
}

fn build_tables(i: &Inner) -> Kind {
    let mulp = |a: u64, b: u64| {
        let pa = poly::trim(digits(a, i.p, i.alpha));
        let pb = poly::trim(digits(b, i.p, i.alpha));
        undigits(&poly::mulmod_poly(&pa, &pb, &i.modulus, i.p), i.p)
    };
    let order = i.q - 1;
    let factors = prime_factors(order);
    let pow = |a: u64, mut e: u64| {
        let (mut base, mut acc) = (a, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulp(acc, base);
            }
            base = mulp(base, base);
            e >>= 1;
        }
        acc
    };
    let g = (2..i.q)
        .find(|&g| factors.iter().all(|&f| pow(g, order / f) != 1))
        .expect("multiplicative group is cyclic");
    let mut exp = vec![0u64; 2 * order as usize];
    let mut log = vec![0u32; i.q as usize];
    let mut x = 1u64;
    for e in 0..order as usize {
        exp[e] = x;
        exp[e + order as usize] = x;
        log[x as usize] = e as u32;
        x = mulp(x, g);
    }
    Kind::Table { exp, log }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
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

/// Decompose q = p^α, if q is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut r, mut a) = (q, 0u32);
    while r % p == 0 {
        r /= p;
        a += 1;
    }
    (r == 1).then_some((p, a))
}

/// A field element bundled with its field, for ergonomic (slower) arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    rep: u64,
}

impl FieldElement {
    pub fn rep(&self) -> u64 {
        self.rep
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn is_zero(&self) -> bool {
        self.rep == 0
    }
    pub fn inv(&self) -> Option<FieldElement> {
        self.field.inv(self.rep).map(|r| self.field.element(r))
    }
    fn same(&self, o: &FieldElement) {
        assert!(self.field == o.field, "mixing elements of different fields");
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{:?}", self.rep, self.field)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                self.same(&o);
                let r = $body(&self.field, self.rep, o.rep);
                FieldElement { field: self.field, rep: r }
            }
        }
        impl<'a> $tr<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &FieldElement) -> FieldElement {
                self.same(o);
                let r = $body(&self.field, self.rep, o.rep);
                FieldElement { field: self.field.clone(), rep: r }
            }
        }
    };
}

binop!(Add, add, |f: &Field, a, b| f.add(a, b));
binop!(Sub, sub, |f: &Field, a, b| f.sub(a, b));
binop!(Mul, mul, |f: &Field, a, b| f.mul(a, b));
binop!(Div, div, |f: &Field, a, b| f.div(a, b).expect("division by zero"));

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let r = self.field.neg(self.rep);
        FieldElement { field: self.field, rep: r }
    }
}
