//! Finite fields GF(p^f) with table-driven arithmetic.
//!
//! An element is stored as the integer `Σ c_i p^i` built from its coefficient
//! vector in the power basis of the generator `x` modulo the field's modulus.
//! Index 0 is zero and index 1 is one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u32 = 1 << 16;

/// Add tables are materialised below this size.
const ADD_TABLE_LIMIT: u32 = 256;

/// An element of a finite field, identified by its canonical index.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fq(pub u16);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// GF(p^f) together with its arithmetic tables.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    p: u32,
    f: u32,
    q: u32,
    modulus: Vec<u32>,
    primitive: Fq,
    exp: Vec<u16>,
    log: Vec<u32>,
    neg: Vec<u16>,
    add: Vec<u16>,
    frob: Vec<u16>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

pub(crate) fn is_prime_u32(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factors of `n` without multiplicity.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
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

/// Dense polynomials over GF(p) used only while building tables.
mod prime_poly {
    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv(m[dm], p);
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let c = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
            for (i, &mi) in m.iter().enumerate() {
                let t = (c as u64 * mi as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
            }
        }
        rem(&prod, m, p)
    }

    pub fn inv(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64 % p as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    fn pow_mod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut result = vec![1u32];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod(&result, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        result
    }

    /// Rabin's test: m of degree f is irreducible iff x^(p^f) = x mod m and
    /// gcd(x^(p^(f/r)) - x, m) = 1 for every prime r dividing f.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let f = m.len() - 1;
        if f == 1 {
            return true;
        }
        let x = vec![0u32, 1];
        let frob_power = |k: usize| -> Vec<u32> {
            let mut h = x.clone();
            for _ in 0..k {
                h = pow_mod(&h, p as u64, m, p);
            }
            h
        };
        let sub_x = |mut h: Vec<u32>| -> Vec<u32> {
            h.resize(h.len().max(2), 0);
            h[1] = (h[1] + p - 1) % p;
            trim(h)
        };
        if !sub_x(frob_power(f)).is_empty() {
            return false;
        }
        for r in super::prime_factors(f as u64) {
            let g = gcd(&sub_x(frob_power(f / r as usize)), m, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

impl FieldSpec {
    /// Builds GF(p^f) with the least monic irreducible modulus, where monic
    /// polynomials of degree f are ordered by `Σ c_i p^i` over their lower
    /// coefficients.
    pub fn new(p: u32, f: u32) -> Result<FieldSpec> {
        if !is_prime_u32(p) {
            return Err(Error::NonPrime(p));
        }
        if f == 0 {
            return Err(Error::EnvelopeExceeded { p, f });
        }
        let q = (p as u64).checked_pow(f).filter(|&q| q <= MAX_FIELD_SIZE as u64);
        let Some(q) = q else {
            return Err(Error::EnvelopeExceeded { p, f });
        };
        let q = q as u32;
        let modulus = if f == 1 {
            vec![0, 1]
        } else {
            (0..q)
                .map(|low| {
                    let mut coeffs = digits(low, p, f as usize);
                    coeffs.push(1);
                    coeffs
                })
                .find(|m| m[0] != 0 && prime_poly::is_irreducible(m, p))
                .expect("an irreducible polynomial of every degree exists")
        };
        Ok(Self::with_modulus(p, f, q, modulus))
    }

    /// Convenience constructor from a prime power.
    pub fn from_order(q: u32) -> Result<FieldSpec> {
        let (p, f) = prime_power(q).ok_or(Error::NonPrime(q))?;
        Self::new(p, f)
    }

    fn with_modulus(p: u32, f: u32, q: u32, modulus: Vec<u32>) -> FieldSpec {
        let fu = f as usize;
        let to_index = |c: &[u32]| -> u16 {
            let mut idx = 0u32;
            for &ci in c.iter().rev() {
                idx = idx * p + ci;
            }
            idx as u16
        };
        let mul_slow = |a: u32, b: u32| -> u32 {
            let prod = prime_poly::mul_mod(
                &prime_poly::trim(digits(a, p, fu)),
                &prime_poly::trim(digits(b, p, fu)),
                &modulus,
                p,
            );
            to_index(&prod) as u32
        };

        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let pow_slow = |a: u32, mut e: u64| -> u32 {
            let mut r = 1u32;
            let mut b = a;
            while e > 0 {
                if e & 1 == 1 {
                    r = mul_slow(r, b);
                }
                b = mul_slow(b, b);
                e >>= 1;
            }
            r
        };
        let primitive = (1..q)
            .find(|&a| factors.iter().all(|&r| pow_slow(a, order / r) != 1))
            .unwrap_or(1);

        let mut exp = vec![0u16; 2 * (q as usize - 1).max(1)];
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for k in 0..(q - 1) as usize {
            exp[k] = cur as u16;
            exp[k + q as usize - 1] = cur as u16;
            log[cur as usize] = k as u32;
            cur = mul_slow(cur, primitive);
        }

        let add_digits = |a: u32, b: u32| -> u16 {
            let da = digits(a, p, fu);
            let db = digits(b, p, fu);
            let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            to_index(&s)
        };
        let neg: Vec<u16> = (0..q)
            .map(|a| {
                let d: Vec<u32> = digits(a, p, fu).iter().map(|&x| (p - x) % p).collect();
                to_index(&d)
            })
            .collect();
        let add = if q <= ADD_TABLE_LIMIT {
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = add_digits(a, b);
                }
            }
            t
        } else {
            Vec::new()
        };

        let mut field = FieldSpec {
            p,
            f,
            q,
            modulus,
            primitive: Fq(primitive as u16),
            exp,
            log,
            neg,
            add,
            frob: Vec::new(),
        };
        field.frob = (0..q).map(|a| field.pow(Fq(a as u16), p as u64).0).collect();
        field
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Coefficients of the modulus, low to high, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The least generator of the multiplicative group.
    pub fn primitive(&self) -> Fq {
        self.primitive
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> + '_ {
        (0..self.q).map(|a| Fq(a as u16))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fq> + '_ {
        (1..self.q).map(|a| Fq(a as u16))
    }

    pub fn coeffs(&self, a: Fq) -> Vec<u32> {
        digits(a.0 as u32, self.p, self.f as usize)
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Fq {
        let mut idx = 0u32;
        for &ci in c.iter().rev() {
            idx = idx * self.p + ci % self.p;
        }
        Fq(idx as u16)
    }

    /// The image of an integer under Z → GF(p) ⊂ GF(q).
    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.p as i64) as u16)
    }

    /// Inverse of `from_int` on the prime field.
    pub fn to_prime_int(&self, a: Fq) -> Option<u32> {
        ((a.0 as u32) < self.p).then_some(a.0 as u32)
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if !self.add.is_empty() {
            return Fq(self.add[a.index() * self.q as usize + b.index()]);
        }
        if self.p == 2 {
            return Fq(a.0 ^ b.0);
        }
        let p = self.p;
        let (mut x, mut y) = (a.0 as u32, b.0 as u32);
        let mut out = 0u32;
        let mut scale = 1u32;
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * scale;
            x /= p;
            y /= p;
            scale *= p;
        }
        Fq(out as u16)
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        Fq(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a.is_zero() || b.is_zero() {
            return Fq::ZERO;
        }
        Fq(self.exp[(self.log[a.index()] + self.log[b.index()]) as usize])
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: Fq) -> Fq {
        assert!(!a.is_zero(), "inverse of zero");
        let l = self.log[a.index()];
        Fq(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
    }

    #[inline]
    pub fn div(&self, a: Fq, b: Fq) -> Fq {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fq, e: u64) -> Fq {
        if e == 0 {
            return Fq::ONE;
        }
        if a.is_zero() {
            return Fq::ZERO;
        }
        let l = self.log[a.index()] as u64 * (e % (self.q as u64 - 1)) % (self.q as u64 - 1);
        Fq(self.exp[l as usize])
    }

    /// Discrete logarithm to the base `primitive()`.
    pub fn log(&self, a: Fq) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.index()])
    }

    /// `primitive()^k`.
    pub fn exp(&self, k: u64) -> Fq {
        Fq(self.exp[(k % (self.q as u64 - 1)) as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Fq) -> u64 {
        let m = self.q as u64 - 1;
        let l = self.log[a.index()] as u64;
        m / num_integer::gcd(m, l)
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: Fq, k: u32) -> Fq {
        let mut x = a;
        for _ in 0..(k % self.f) {
            x = Fq(self.frob[x.index()]);
        }
        x
    }

    /// The unique square root in characteristic 2.
    pub fn sqrt_char2(&self, a: Fq) -> Result<Fq> {
        if self.p != 2 {
            return Err(Error::WrongCharacteristic { expected: 2, found: self.p });
        }
        Ok(self.frobenius(a, self.f - 1))
    }

    pub fn is_square(&self, a: Fq) -> bool {
        a.is_zero() || self.p == 2 || self.log[a.index()].is_multiple_of(2)
    }

    /// A square root when one exists.
    pub fn sqrt(&self, a: Fq) -> Option<Fq> {
        if a.is_zero() {
            return Some(Fq::ZERO);
        }
        if self.p == 2 {
            return Some(self.frobenius(a, self.f - 1));
        }
        let l = self.log[a.index()];
        l.is_multiple_of(2).then(|| self.exp((l / 2) as u64))
    }

    /// The least non-square in index order (odd characteristic).
    pub fn least_nonsquare(&self) -> Option<Fq> {
        self.nonzero().find(|&a| !self.is_square(a))
    }

    /// For q = q0², the involution a ↦ a^q0.
    pub fn conj(&self, a: Fq) -> Fq {
        debug_assert!(self.f.is_multiple_of(2));
        self.frobenius(a, self.f / 2)
    }

    /// q0 when the field order is a square.
    pub fn sqrt_order(&self) -> Option<u32> {
        self.f.is_multiple_of(2).then(|| self.p.pow(self.f / 2))
    }

    /// Short human-readable form, e.g. `z^3` or `2`.
    pub fn format(&self, a: Fq) -> String {
        if self.f == 1 {
            return a.0.to_string();
        }
        match self.log(a) {
            None => "0".into(),
            Some(0) => "1".into(),
            Some(1) => "z".into(),
            Some(k) => format!("z^{k}"),
        }
    }

    pub fn name(&self) -> String {
        format!("GF({})", self.q)
    }
}

fn digits(mut a: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for d in out.iter_mut() {
        *d = a % p;
        a /= p;
    }
    out
}

/// Splits a prime power q as (p, f).
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut f = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        f += 1;
    }
    (r == 1).then_some((p, f))
}

/// Serialized form of a field for reports.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldRecord {
    pub p: u32,
    pub f: u32,
    pub modulus: Vec<u32>,
}

impl From<&FieldSpec> for FieldRecord {
    fn from(f: &FieldSpec) -> Self {
        FieldRecord { p: f.p, f: f.f, modulus: f.modulus.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_fields() -> Vec<FieldSpec> {
        [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (5, 2), (2, 6), (7, 2)]
            .iter()
            .map(|&(p, f)| FieldSpec::new(p, f).unwrap())
            .collect()
    }

    #[test]
    fn prime_field_modulus_is_x() {
        let f = FieldSpec::new(2, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.q(), 2);
    }

    #[test]
    fn gf9_modulus_is_least_irreducible_quadratic() {
        // oracle: a monic quadratic over GF(3) is irreducible iff it has no root
        let has_root = |c0: u32, c1: u32| (0..3).any(|x| (x * x + c1 * x + c0).is_multiple_of(3));
        let mut least = None;
        'outer: for c1 in 0..3 {
            for c0 in 0..3 {
                if !has_root(c0, c1) {
                    least = Some(vec![c0, c1, 1]);
                    break 'outer;
                }
            }
        }
        let f = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f.modulus(), least.unwrap().as_slice());
    }

    #[test]
    fn composite_characteristic_is_rejected() {
        assert!(matches!(FieldSpec::new(4, 1), Err(Error::NonPrime(4))));
        assert!(matches!(FieldSpec::new(2, 17), Err(Error::EnvelopeExceeded { .. })));
    }

    #[test]
    fn frobenius_in_gf4() {
        let f = FieldSpec::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let g = f.from_coeffs(&[0, 1]);
        let g_plus_1 = f.from_coeffs(&[1, 1]);
        assert_eq!(f.frobenius(g, 1), g_plus_1);
        assert_eq!(f.frobenius(Fq::ONE, 1), Fq::ONE);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in small_fields().into_iter().filter(|f| f.q() <= 64) {
            let els: Vec<Fq> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), Fq::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a)), Fq::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    // frobenius is a ring automorphism
                    let p = f.p();
                    let fr = |x| f.frobenius(x, 1);
                    assert_eq!(fr(f.add(a, b)), f.add(fr(a), fr(b)));
                    assert_eq!(fr(f.mul(a, b)), f.mul(fr(a), fr(b)));
                    assert_eq!(fr(a), f.pow(a, p as u64));
                }
            }
            // associativity and distributivity on a strided sample of triples
            for (i, &a) in els.iter().enumerate() {
                for &b in els.iter().skip(i % 3).step_by(3) {
                    for &c in els.iter().skip(i % 5).step_by(5) {
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                        assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn large_field_digitwise_addition_matches_coefficients() {
        let f = FieldSpec::new(3, 6).unwrap();
        for a in (0..f.q()).step_by(37) {
            for b in (0..f.q()).step_by(53) {
                let (x, y) = (Fq(a as u16), Fq(b as u16));
                let s: Vec<u32> =
                    f.coeffs(x).iter().zip(f.coeffs(y)).map(|(u, v)| (u + v) % 3).collect();
                assert_eq!(f.add(x, y), f.from_coeffs(&s));
            }
        }
    }

    #[test]
    fn sqrt_char2_is_inverse_of_squaring() {
        let f = FieldSpec::new(2, 3).unwrap();
        for a in f.elements() {
            let r = f.sqrt_char2(a).unwrap();
            assert_eq!(f.mul(r, r), a);
        }
        assert_eq!(f.sqrt_char2(Fq::ZERO).unwrap(), Fq::ZERO);
        assert_eq!(f.sqrt_char2(Fq::ONE).unwrap(), Fq::ONE);
        let g3 = FieldSpec::new(3, 1).unwrap();
        assert!(g3.sqrt_char2(Fq::ONE).is_err());
    }

    #[test]
    fn conjugation_fixes_subfield_of_size_q0() {
        for (p, f) in [(2, 2), (3, 2), (2, 4), (5, 2), (7, 2)] {
            let field = FieldSpec::new(p, f).unwrap();
            let fixed = field.elements().filter(|&a| field.conj(a) == a).count() as u32;
            assert_eq!(Some(fixed), field.sqrt_order());
        }
    }

    #[test]
    fn primitive_element_generates() {
        for f in small_fields() {
            assert_eq!(f.order(f.primitive()), f.q() as u64 - 1);
            let mut seen = std::collections::HashSet::new();
            for k in 0..f.q() - 1 {
                seen.insert(f.exp(k as u64));
            }
            assert_eq!(seen.len() as u32, f.q() - 1);
        }
    }

    proptest! {
        #[test]
        fn frobenius_has_order_f(idx in 0u32..625, which in 0usize..4) {
            let (p, fdeg) = [(5, 4), (2, 6), (3, 4), (7, 3)][which];
            let field = FieldSpec::new(p, fdeg).unwrap();
            let a = Fq((idx % field.q()) as u16);
            prop_assert_eq!(field.frobenius(field.frobenius(a, 1), fdeg - 1), a);
        }

        #[test]
        fn inverse_law(idx in 1u32..729) {
            let field = FieldSpec::new(3, 6).unwrap();
            let a = Fq(idx as u16);
            prop_assert_eq!(field.mul(a, field.inv(a)), Fq::ONE);
            prop_assert_eq!(field.div(a, a), Fq::ONE);
        }
    }
}
