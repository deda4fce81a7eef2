//! Exact arithmetic in Q(ζ_n), power basis reduced modulo Φ_n.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Reduction data for level n: `x^m mod Φ_n` for 0 ≤ m < n.
#[derive(Debug)]
pub struct CycloCtx {
    pub n: u32,
    pub phi: usize,
    /// Sparse rows: (index, coefficient).
    powers: Vec<Vec<(usize, i64)>>,
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // den monic
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i64; r.len() - dd];
    for i in (0..q.len()).rev() {
        let c = r[i + dd];
        q[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                r[i + j] -= c * d;
            }
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

/// Coefficients of Φ_n, low to high.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = poly_div_exact(&p, &cyclotomic_polynomial(d));
        }
    }
    cache.lock().unwrap().insert(n, p.clone());
    p
}

pub fn ctx(n: u32) -> Arc<CycloCtx> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CycloCtx>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&n) {
        return c.clone();
    }
    let phi_poly = cyclotomic_polynomial(n);
    let phi = phi_poly.len() - 1;
    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; phi];
    if phi > 0 {
        cur[0] = 1;
    }
    for _ in 0..n {
        powers.push(cur.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect());
        // multiply by x and reduce
        let top = cur[phi - 1];
        let mut next = vec![0i64; phi];
        next[1..phi].copy_from_slice(&cur[..(phi - 1)]);
        if top != 0 {
            for i in 0..phi {
                next[i] -= top * phi_poly[i];
            }
        }
        cur = next;
    }
    let c = Arc::new(CycloCtx { n, phi, powers });
    cache.lock().unwrap().insert(n, c.clone());
    c
}

/// `Σ num_k ζ_n^k / den` with `0 ≤ k < φ(n)`.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    n: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Cyclotomic {
    pub fn zero(n: u32) -> Cyclotomic {
        Cyclotomic { n, num: vec![BigInt::zero(); ctx(n).phi], den: BigInt::one() }
    }

    pub fn from_int(n: u32, v: impl Into<BigInt>) -> Cyclotomic {
        let mut c = Cyclotomic::zero(n);
        c.num[0] = v.into();
        c
    }

    pub fn one(n: u32) -> Cyclotomic {
        Cyclotomic::from_int(n, 1)
    }

    pub fn from_rational(n: u32, r: &BigRational) -> Cyclotomic {
        let mut c = Cyclotomic::zero(n);
        c.num[0] = r.numer().clone();
        c.den = r.denom().clone();
        c.normalize();
        c
    }

    /// ζ_n^k.
    pub fn zeta(n: u32, k: i64) -> Cyclotomic {
        Cyclotomic::from_exponent_sum(n, &[(k.rem_euclid(n as i64) as usize, BigInt::one())])
    }

    /// `Σ c·ζ_n^m` over the given (m, c) pairs with arbitrary m < n.
    pub fn from_exponent_sum(n: u32, terms: &[(usize, BigInt)]) -> Cyclotomic {
        let cx = ctx(n);
        let mut num = vec![BigInt::zero(); cx.phi];
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            for &(i, t) in &cx.powers[m % n as usize] {
                num[i] += c * t;
            }
        }
        let mut out = Cyclotomic { n, num, den: BigInt::one() };
        out.normalize();
        out
    }

    /// Build from raw power-basis coefficients at level n.
    pub fn from_coeffs(n: u32, num: Vec<BigInt>, den: BigInt) -> Option<Cyclotomic> {
        if num.len() != ctx(n).phi || den.is_zero() {
            return None;
        }
        let mut out = Cyclotomic { n, num, den };
        out.normalize();
        Some(out)
    }

    /// Level n at which the value is stored (a multiple of the minimal conductor).
    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> (&[BigInt], &BigInt) {
        (&self.num, &self.den)
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -self.den.clone();
            for c in self.num.iter_mut() {
                *c = -c.clone();
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() && !g.is_zero() {
            self.den /= &g;
            for c in self.num.iter_mut() {
                *c /= &g;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    /// `Some(r)` when the value is rational.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.num.iter().skip(1).all(|c| c.is_zero()) {
            Some(BigRational::new(self.num.first().cloned().unwrap_or_default(), self.den.clone()))
        } else {
            None
        }
    }

    /// The same number at level m, a multiple of the current level.
    pub fn lift(&self, m: u32) -> Cyclotomic {
        if m == self.n {
            return self.clone();
        }
        assert!(m.is_multiple_of(self.n), "level {m} is not a multiple of {}", self.n);
        let step = (m / self.n) as usize;
        let terms: Vec<(usize, BigInt)> =
            self.num.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k * step, c.clone())).collect();
        let mut out = Cyclotomic::from_exponent_sum(m, &terms);
        out.den = self.den.clone();
        out.normalize();
        out
    }

    fn common(&self, other: &Cyclotomic) -> (Cyclotomic, Cyclotomic) {
        if self.n == other.n {
            (self.clone(), other.clone())
        } else {
            let l = self.n.lcm(&other.n);
            (self.lift(l), other.lift(l))
        }
    }

    fn add_same(&self, other: &Cyclotomic, sign: i32) -> Cyclotomic {
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| {
                let x = a * &other.den;
                let y = b * &self.den;
                if sign > 0 {
                    x + y
                } else {
                    x - y
                }
            })
            .collect();
        let mut out = Cyclotomic { n: self.n, num, den: &self.den * &other.den };
        out.normalize();
        out
    }

    fn mul_same(&self, other: &Cyclotomic) -> Cyclotomic {
        let n = self.n as usize;
        let mut acc: Vec<BigInt> = vec![BigInt::zero(); n.min(2 * self.num.len())];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                acc[(i + j) % n] += a * b;
            }
        }
        let terms: Vec<(usize, BigInt)> = acc.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        let mut out = Cyclotomic::from_exponent_sum(self.n, &terms);
        out.den = &self.den * &other.den;
        out.normalize();
        out
    }

    pub fn scale_int(&self, k: &BigInt) -> Cyclotomic {
        let mut out = Cyclotomic { n: self.n, num: self.num.iter().map(|c| c * k).collect(), den: self.den.clone() };
        out.normalize();
        out
    }

    pub fn scale(&self, r: &BigRational) -> Cyclotomic {
        let mut out = Cyclotomic {
            n: self.n,
            num: self.num.iter().map(|c| c * r.numer()).collect(),
            den: &self.den * r.denom(),
        };
        out.normalize();
        out
    }

    /// ζ ↦ ζ^k for k coprime to the level.
    pub fn galois(&self, k: i64) -> Cyclotomic {
        let n = self.n as i64;
        let terms: Vec<(usize, BigInt)> = self
            .num
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (((i as i64) * k).rem_euclid(n) as usize, c.clone()))
            .collect();
        let mut out = Cyclotomic::from_exponent_sum(self.n, &terms);
        out.den = self.den.clone();
        out.normalize();
        out
    }

    pub fn conj(&self) -> Cyclotomic {
        self.galois(-1)
    }

    /// `|x|²` as a cyclotomic (real, usually rational for character values).
    pub fn abs_sq(&self) -> Cyclotomic {
        self.mul_same(&self.conj())
    }

    pub fn pow(&self, mut e: u32) -> Cyclotomic {
        let mut out = Cyclotomic::one(self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul_same(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_same(&base);
            }
        }
        out
    }

    /// Sign of the real part, certified against the rounding error of a
    /// scaled float evaluation; `None` when the evaluation cannot separate it from 0.
    pub fn real_sign(&self) -> Option<Ordering> {
        if let Some(r) = self.to_rational() {
            return Some(r.numer().cmp(&BigInt::zero()));
        }
        let bits = self.num.iter().map(|c| c.bits()).max().unwrap_or(0);
        let shift = bits.saturating_sub(60);
        let mut sum = 0.0f64;
        let mut err = 0.0f64;
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = (c >> shift).to_f64().unwrap();
            let a = std::f64::consts::TAU * k as f64 / self.n as f64;
            sum += v * a.cos();
            // truncation of the shift, rounding of v, cos and the running sum
            err += if shift > 0 { 1.0 } else { 0.0 } + v.abs() * 4.0 * f64::EPSILON;
        }
        err += sum.abs() * f64::EPSILON * self.num.len() as f64;
        if sum.abs() > 2.0 * err {
            Some(if sum > 0.0 { Ordering::Greater } else { Ordering::Less })
        } else if self.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let den = self.den.to_f64().unwrap();
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let a = std::f64::consts::TAU * k as f64 / self.n as f64;
            let v = c.to_f64().unwrap();
            re += v * a.cos();
            im += v * a.sin();
        }
        (re / den, im / den)
    }

    pub fn abs_f64(&self) -> f64 {
        let (re, im) = self.to_complex();
        re.hypot(im)
    }

    /// The same value at the smallest level dividing the current one.
    pub fn reduce_level(&self) -> Cyclotomic {
        let n = self.n;
        for d in 1..n {
            if n.is_multiple_of(d) {
                if let Some(c) = self.express_at(d) {
                    return c;
                }
            }
        }
        self.clone()
    }

    /// Solve `self = Σ c_i ζ_d^i` over Q, if the value lies in Q(ζ_d).
    fn express_at(&self, d: u32) -> Option<Cyclotomic> {
        let phi_d = ctx(d).phi;
        let cols: Vec<Cyclotomic> = (0..phi_d).map(|i| Cyclotomic::zeta(d, i as i64).lift(self.n)).collect();
        let rows = self.num.len();
        // augmented matrix, one row per coordinate at level n
        let mut m: Vec<Vec<BigRational>> = (0..rows)
            .map(|r| {
                let mut row: Vec<BigRational> =
                    cols.iter().map(|c| BigRational::new(c.num[r].clone(), c.den.clone())).collect();
                row.push(BigRational::new(self.num[r].clone(), self.den.clone()));
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..phi_d {
            let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
            m.swap(p, r);
            let inv = m[r][c].recip();
            for x in m[r].iter_mut() {
                *x = &*x * &inv;
            }
            for i in 0..rows {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for j in 0..=phi_d {
                        let t = &f * &m[r][j];
                        m[i][j] = &m[i][j] - &t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        if m[r..].iter().any(|row| !row[phi_d].is_zero()) {
            return None;
        }
        let mut coeffs = vec![BigRational::zero(); phi_d];
        for (row, &c) in pivots.iter().enumerate() {
            coeffs[c] = m[row][phi_d].clone();
        }
        let den = coeffs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let num = coeffs.iter().map(|x| x.numer() * (&den / x.denom())).collect();
        let mut out = Cyclotomic { n: d, num, den };
        out.normalize();
        Some(out)
    }

    /// Render as a sum of `z<n>^k` terms.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        if let Some(r) = self.to_rational() {
            return r.to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let coef = BigRational::new(c.clone(), self.den.clone());
            let term = if k == 0 {
                coef.to_string()
            } else if coef.is_one() {
                format!("z{}^{}", self.n, k)
            } else if coef == -BigRational::one() {
                format!("-z{}^{}", self.n, k)
            } else {
                format!("{}*z{}^{}", coef, self.n, k)
            };
            parts.push(term);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for Cyclotomic {}

impl PartialOrd for Cyclotomic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A total order used only for canonical sorting: coefficients at the common
/// level, as rationals.
impl Ord for Cyclotomic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = self.common(other);
        for (x, y) in a.num.iter().zip(&b.num) {
            let o = (x * &b.den).cmp(&(y * &a.den));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (a, b) = self.common(rhs);
        a.add_same(&b, 1)
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (a, b) = self.common(rhs);
        a.add_same(&b, -1)
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        if self.n == rhs.n {
            self.mul_same(rhs)
        } else {
            let (a, b) = self.common(rhs);
            a.mul_same(&b)
        }
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic { n: self.n, num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }
}

/// Accumulates integer-weighted values, grouped by level, lifting once at the end.
#[derive(Default)]
pub struct LevelSum {
    parts: HashMap<u32, Cyclotomic>,
}

impl LevelSum {
    pub fn add(&mut self, v: &Cyclotomic, weight: &BigInt) {
        if weight.is_zero() || v.is_zero() {
            return;
        }
        let term = v.scale_int(weight);
        let e = self.parts.entry(v.level()).or_insert_with(|| Cyclotomic::zero(v.level()));
        *e = &*e + &term;
    }

    pub fn add_value(&mut self, v: &Cyclotomic) {
        self.add(v, &BigInt::one());
    }

    /// The sum at the lcm of the levels seen.
    pub fn finish_lcm(self) -> Cyclotomic {
        let level = self.parts.keys().fold(1u32, |acc, &k| acc.lcm(&k));
        self.finish(level)
    }

    pub fn finish(self, level: u32) -> Cyclotomic {
        let mut acc = Cyclotomic::zero(level);
        let mut keys: Vec<u32> = self.parts.keys().copied().collect();
        keys.sort_unstable();
        for k in keys {
            acc = &acc + &self.parts[&k].lift(level);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        let p105 = cyclotomic_polynomial(105);
        assert_eq!(p105.len() - 1, 48);
        assert!(p105.contains(&-2));
    }

    #[test]
    fn certified_real_signs() {
        // ζ5 + ζ5⁴ = (√5 − 1)/2
        let g = &Cyclotomic::zeta(5, 1) + &Cyclotomic::zeta(5, 4);
        assert_eq!(g.real_sign(), Some(Ordering::Greater));
        assert_eq!((&g - &Cyclotomic::one(5)).real_sign(), Some(Ordering::Less));
        let r2 = &Cyclotomic::zeta(8, 1) + &Cyclotomic::zeta(8, 7);
        assert_eq!(r2.pow(2), Cyclotomic::from_int(8, 2));
        assert_eq!(r2.pow(7), Cyclotomic::from_int(8, 8).mul_same(&r2));
        let big = r2.pow(40);
        assert_eq!((&big - &Cyclotomic::from_int(8, 1u64 << 20)).real_sign(), Some(Ordering::Equal));
        let close = &r2.pow(41) - &Cyclotomic::from_int(8, 1_482_910u64);
        assert_eq!(close.real_sign(), Some(Ordering::Greater));
        let above = &r2.pow(41) - &Cyclotomic::from_int(8, 1_482_911u64);
        assert_eq!(above.real_sign(), Some(Ordering::Less));
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for n in [2u32, 3, 4, 5, 6, 8, 9, 12, 15] {
            let mut s = Cyclotomic::zero(n);
            for k in 0..n {
                s = &s + &Cyclotomic::zeta(n, k as i64);
            }
            assert!(s.is_zero(), "n={n}");
            assert_eq!(Cyclotomic::zeta(n, 1).pow(n), Cyclotomic::one(n));
        }
    }

    #[test]
    fn lifting_preserves_values() {
        let z3 = Cyclotomic::zeta(3, 1);
        let z6 = Cyclotomic::zeta(6, 2);
        assert_eq!(z3, z6);
        let z4 = Cyclotomic::zeta(4, 1);
        assert_eq!(&z4 * &z4, Cyclotomic::from_int(4, -1));
        // i·ζ_3 at level 12
        let p = &z4 * &z3;
        assert_eq!(p.level(), 12);
        assert_eq!(p, Cyclotomic::zeta(12, 7));
        assert_eq!(Cyclotomic::zeta(12, 4).reduce_level().level(), 3);
        assert_eq!(Cyclotomic::zeta(6, 2).reduce_level().level(), 3);
        assert_eq!(Cyclotomic::zeta(6, 3).reduce_level().level(), 1);
        let s = &Cyclotomic::zeta(8, 1) + &Cyclotomic::zeta(8, 7);
        let r = s.reduce_level();
        assert_eq!(r.level(), 8);
        assert_eq!(r, s);
        let i = Cyclotomic::zeta(12, 3).reduce_level();
        assert_eq!(i.level(), 4);
    }

    #[test]
    fn conjugation_and_abs() {
        // (−1 + √−3)/2 = ζ_3
        let z = Cyclotomic::zeta(3, 1);
        assert_eq!(z.abs_sq(), Cyclotomic::one(3));
        let s = &z - &z.conj();
        assert_eq!(s.abs_sq().to_rational().unwrap(), BigRational::from_integer(3.into()));
        let (re, im) = z.to_complex();
        assert!((re + 0.5).abs() < 1e-12 && (im - 0.75f64.sqrt()).abs() < 1e-12);
        assert_eq!(z.render(), "z3^1");
    }

    fn arb(n: u32) -> impl Strategy<Value = Cyclotomic> {
        prop::collection::vec(-5i64..=5, n as usize).prop_map(move |v| {
            let terms: Vec<(usize, BigInt)> = v.into_iter().enumerate().map(|(k, c)| (k, BigInt::from(c))).collect();
            Cyclotomic::from_exponent_sum(n, &terms)
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb(12), b in arb(12), c in arb(12)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        }

        #[test]
        fn galois_is_multiplicative(a in arb(9), b in arb(9), k in prop::sample::select(vec![1i64, 2, 4, 5, 7, 8])) {
            prop_assert_eq!((&a * &b).galois(k), &a.galois(k) * &b.galois(k));
        }

        #[test]
        fn numeric_embedding_matches(a in arb(8), b in arb(8)) {
            let (ar, ai) = a.to_complex();
            let (br, bi) = b.to_complex();
            let (pr, pi) = (&a * &b).to_complex();
            prop_assert!((pr - (ar * br - ai * bi)).abs() < 1e-6);
            prop_assert!((pi - (ar * bi + ai * br)).abs() < 1e-6);
        }
    }
}
