//! Arithmetic, polynomials and linear algebra modulo a word-size prime.

use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, m: u64) -> u64 {
    pow_mod(a, m - 2, m)
}

/// Reduce a signed integer.
pub fn from_i128(v: i128, m: u64) -> u64 {
    v.rem_euclid(m as i128) as u64
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Least prime `ℓ > lower` with `ℓ ≡ 1 (mod e)`.
pub fn prime_one_mod(e: u64, lower: u64) -> Result<u64> {
    let mut k = lower / e + 1;
    let limit = lower.saturating_mul(4).max(lower + 1_000_000 * e);
    loop {
        let cand = k.checked_mul(e).and_then(|x| x.checked_add(1)).ok_or(Error::NoSuitablePrime { exponent: e })?;
        if cand > limit || cand >= (1u64 << 62) {
            return Err(Error::NoSuitablePrime { exponent: e });
        }
        if cand > lower && is_prime(cand) {
            return Ok(cand);
        }
        k += 1;
    }
}

fn factor(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Least primitive root modulo a prime.
pub fn primitive_root(p: u64) -> u64 {
    let fs = factor(p - 1);
    (2..p).find(|&g| fs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1)).unwrap_or(1)
}

/// Polynomials over GF(ℓ), coefficients low to high.
pub mod poly {
    use super::*;

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn rem(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let db = b.len() - 1;
        let inv_lead = inv_mod(b[db], m);
        while r.len() > db {
            let c = mul_mod(*r.last().unwrap(), inv_lead, m);
            let shift = r.len() - 1 - db;
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = sub_mod(r[shift + i], mul_mod(c, bi, m), m);
            }
            r = trim(r);
        }
        r
    }

    pub fn mul(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = add_mod(out[i + j], mul_mod(x, y, m), m);
            }
        }
        trim(out)
    }

    pub fn monic(a: &[u64], m: u64) -> Vec<u64> {
        let inv = inv_mod(*a.last().unwrap(), m);
        a.iter().map(|&x| mul_mod(x, inv, m)).collect()
    }

    pub fn gcd(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, m);
            a = b;
            b = r;
        }
        if a.is_empty() {
            a
        } else {
            monic(&a, m)
        }
    }

    pub fn pow_mod_poly(base: &[u64], mut e: u64, modulus: &[u64], m: u64) -> Vec<u64> {
        let mut result = vec![1u64];
        let mut b = rem(base, modulus, m);
        while e > 0 {
            if e & 1 == 1 {
                result = rem(&mul(&result, &b, m), modulus, m);
            }
            b = rem(&mul(&b, &b, m), modulus, m);
            e >>= 1;
        }
        result
    }

    fn div(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let db = b.len() - 1;
        let inv_lead = inv_mod(b[db], m);
        let mut q = vec![0u64; r.len().saturating_sub(db)];
        while r.len() > db {
            let c = mul_mod(*r.last().unwrap(), inv_lead, m);
            let shift = r.len() - 1 - db;
            q[shift] = c;
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = sub_mod(r[shift + i], mul_mod(c, bi, m), m);
            }
            r = trim(r);
        }
        trim(q)
    }

    /// Distinct roots in GF(ℓ), sorted.
    pub fn roots(f: &[u64], m: u64) -> Vec<u64> {
        let f = trim(f.to_vec());
        if f.len() <= 1 {
            return Vec::new();
        }
        let f = monic(&f, m);
        // split off the product of distinct linear factors: gcd(f, x^ℓ − x)
        let xl = pow_mod_poly(&[0, 1], m, &f, m);
        let mut xl_minus_x = xl.clone();
        xl_minus_x.resize(xl_minus_x.len().max(2), 0);
        xl_minus_x[1] = sub_mod(xl_minus_x[1], 1, m);
        let mut g = gcd(&f, &trim(xl_minus_x), m);
        if g.is_empty() {
            g = f.clone();
        }
        let mut out = Vec::new();
        if g.len() > 1 && g[0] == 0 {
            out.push(0);
            g = div(&g, &[0, 1], m);
        }
        split(&g, m, 1, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn split(g: &[u64], m: u64, mut shift: u64, out: &mut Vec<u64>) {
        match g.len() {
            0 | 1 => return,
            2 => {
                out.push(sub_mod(0, mul_mod(g[0], inv_mod(g[1], m), m), m));
                return;
            }
            _ => {}
        }
        loop {
            // gcd(g, (x + shift)^((ℓ−1)/2) − 1)
            let mut h = pow_mod_poly(&[shift % m, 1], (m - 1) / 2, g, m);
            if h.is_empty() {
                h = vec![0];
            }
            h[0] = sub_mod(h[0], 1, m);
            let d = gcd(g, &trim(h), m);
            if d.len() > 1 && d.len() < g.len() {
                let other = div(g, &d, m);
                split(&d, m, shift + 1, out);
                split(&other, m, shift + 1, out);
                return;
            }
            shift += 1;
        }
    }
}

/// Dense matrix over GF(ℓ), row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl ModMatrix {
    pub fn zero(rows: usize, cols: usize) -> ModMatrix {
        ModMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> ModMatrix {
        let mut m = ModMatrix::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> ModMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        ModMatrix { rows: r, cols: c, data: rows.concat() }
    }

    pub fn mul(&self, other: &ModMatrix, m: u64) -> ModMatrix {
        let mut out = ModMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = add_mod(out.get(i, j), mul_mod(a, other.get(k, j), m), m);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// `self · v` for a column vector.
    pub fn apply(&self, v: &[u64], m: u64) -> Vec<u64> {
        (0..self.rows)
            .map(|i| {
                let mut acc: u128 = 0;
                for (j, &x) in v.iter().enumerate() {
                    acc = (acc + self.get(i, j) as u128 * x as u128) % m as u128;
                }
                acc as u64
            })
            .collect()
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, m: u64) -> (ModMatrix, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| a.get(i, c) != 0) else { continue };
            if p != r {
                for j in 0..a.cols {
                    a.data.swap(p * a.cols + j, r * a.cols + j);
                }
            }
            let inv = inv_mod(a.get(r, c), m);
            for j in 0..a.cols {
                a.set(r, j, mul_mod(a.get(r, j), inv, m));
            }
            for i in 0..a.rows {
                if i != r {
                    let f = a.get(i, c);
                    if f != 0 {
                        for j in 0..a.cols {
                            let v = sub_mod(a.get(i, j), mul_mod(f, a.get(r, j), m), m);
                            a.set(i, j, v);
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    /// Basis of the right kernel, as row vectors.
    pub fn kernel(&self, m: u64) -> Vec<Vec<u64>> {
        let (r, pivots) = self.rref(m);
        let mut is_pivot = vec![None; self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(row);
        }
        let mut out = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = sub_mod(0, r.get(row, free), m);
            }
            out.push(v);
        }
        out
    }

    /// Characteristic polynomial via Hessenberg reduction.
    pub fn char_poly(&self, m: u64) -> Vec<u64> {
        let n = self.rows;
        let mut h = self.clone();
        for c in 0..n.saturating_sub(2) {
            let Some(p) = (c + 1..n).find(|&i| h.get(i, c) != 0) else { continue };
            if p != c + 1 {
                for j in 0..n {
                    h.data.swap(p * n + j, (c + 1) * n + j);
                }
                for i in 0..n {
                    h.data.swap(i * n + p, i * n + c + 1);
                }
            }
            let inv = inv_mod(h.get(c + 1, c), m);
            for i in c + 2..n {
                let f = mul_mod(h.get(i, c), inv, m);
                if f == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = sub_mod(h.get(i, j), mul_mod(f, h.get(c + 1, j), m), m);
                    h.set(i, j, v);
                }
                for k in 0..n {
                    let v = add_mod(h.get(k, c + 1), mul_mod(f, h.get(k, i), m), m);
                    h.set(k, c + 1, v);
                }
            }
        }
        // p_k(x) = (x − h_kk) p_{k−1} − Σ_{i<k} h_ik (Π_{j=i+1}^{k} h_{j,j−1}) p_{i−1}
        let mut polys: Vec<Vec<u64>> = vec![vec![1]];
        for k in 0..n {
            let mut pk = poly::mul(&polys[k], &[sub_mod(0, h.get(k, k), m), 1], m);
            let mut t = 1u64;
            for i in (0..k).rev() {
                t = mul_mod(t, h.get(i + 1, i), m);
                if t == 0 {
                    break;
                }
                let c = mul_mod(t, h.get(i, k), m);
                let sub: Vec<u64> = polys[i].iter().map(|&x| mul_mod(x, c, m)).collect();
                pk.resize(pk.len().max(sub.len()), 0);
                for (a, b) in pk.iter_mut().zip(sub) {
                    *a = sub_mod(*a, b, m);
                }
            }
            polys.push(poly::trim(pk));
        }
        polys.pop().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_roots() {
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(3_215_031_751));
        let p = prime_one_mod(12, 1000).unwrap();
        assert_eq!(p % 12, 1);
        assert!(p > 1000 && is_prime(p));
        assert_eq!(p, 1009);
        let g = primitive_root(1009);
        assert_eq!(pow_mod(g, 1008, 1009), 1);
        assert_ne!(pow_mod(g, 504, 1009), 1);
    }

    #[test]
    fn root_finding() {
        let m = 1_000_000_007u64;
        // (x−3)(x−5)(x−7)² (x²+1 has roots mod this prime? 1e9+7 ≡ 3 mod 4, so no)
        let mut f = vec![1u64];
        for r in [3u64, 5, 7, 7] {
            f = poly::mul(&f, &[m - r, 1], m);
        }
        f = poly::mul(&f, &[1, 0, 1], m);
        assert_eq!(poly::roots(&f, m), vec![3, 5, 7]);
        assert_eq!(poly::roots(&[0, 1], m), vec![0]);
    }

    #[test]
    fn char_poly_and_kernel() {
        let m = 101;
        let a = ModMatrix::from_rows(&[vec![2, 1, 0], vec![0, 2, 0], vec![0, 0, 5]]);
        let cp = a.char_poly(m);
        // (x−2)²(x−5)
        let mut expect = vec![1u64];
        for r in [2u64, 2, 5] {
            expect = poly::mul(&expect, &[m - r, 1], m);
        }
        assert_eq!(cp, expect);
        let mut b = a.clone();
        for i in 0..3 {
            b.set(i, i, sub_mod(b.get(i, i), 2, m));
        }
        let k = b.kernel(m);
        assert_eq!(k, vec![vec![1, 0, 0]]);
        let dense = ModMatrix::from_rows(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]);
        let cp = dense.char_poly(m);
        // trace 16, det −3
        assert_eq!(cp[2], m - 16);
        assert_eq!(cp[0], 3);
    }
}
