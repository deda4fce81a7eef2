//! Dense linear algebra and univariate polynomials over GF(q).

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Fq};

/// A dense row-major matrix over a finite field. The field itself is passed to
/// every arithmetic operation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatrixFq {
    rows: usize,
    cols: usize,
    entries: Vec<Fq>,
}

pub type Vector = Vec<Fq>;

impl MatrixFq {
    pub fn zero(rows: usize, cols: usize) -> Self {
        MatrixFq { rows, cols, entries: vec![Fq::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Fq::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Fq) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        MatrixFq { rows, cols, entries }
    }

    pub fn from_rows(rows: &[Vector]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        MatrixFq { rows: rows.len(), cols, entries: rows.concat() }
    }

    /// Square matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector]) -> Self {
        let n = cols.first().map_or(0, |c| c.len());
        Self::from_fn(n, cols.len(), |i, j| cols[j][i])
    }

    pub fn diagonal(d: &[Fq]) -> Self {
        let mut m = Self::zero(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// Block-diagonal sum `diag(a, b)`.
    pub fn direct_sum(a: &MatrixFq, b: &MatrixFq) -> Self {
        let n = a.rows + b.rows;
        let mut m = Self::zero(n, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                m.set(i, j, a.get(i, j));
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                m.set(a.rows + i, a.cols + j, b.get(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Dimension of a square matrix.
    #[inline]
    pub fn n(&self) -> usize {
        debug_assert_eq!(self.rows, self.cols);
        self.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fq {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fq) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Fq] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Fq] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Canonical little-endian serialization of the reduced entries.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.entries.iter().flat_map(|e| e.0.to_le_bytes()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| self.get(i, j) == if i == j { Fq::ONE } else { Fq::ZERO }))
    }

    pub fn is_scalar(&self) -> bool {
        let d = self.get(0, 0);
        (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == if i == j { d } else { Fq::ZERO }))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn map(&self, f: impl Fn(Fq) -> Fq) -> Self {
        MatrixFq { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|&x| f(x)).collect() }
    }

    pub fn mul(&self, other: &MatrixFq, f: &FieldSpec) -> MatrixFq {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = MatrixFq::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.entries[idx] = f.add(out.entries[idx], f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &MatrixFq, f: &FieldSpec) -> MatrixFq {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        MatrixFq {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(&a, &b)| f.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, other: &MatrixFq, f: &FieldSpec) -> MatrixFq {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        MatrixFq {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(&a, &b)| f.sub(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: Fq, f: &FieldSpec) -> MatrixFq {
        self.map(|x| f.mul(c, x))
    }

    /// `self - c·I`.
    pub fn minus_scalar(&self, c: Fq, f: &FieldSpec) -> MatrixFq {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m.set(i, i, f.sub(m.get(i, i), c));
        }
        m
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[Fq], f: &FieldSpec) -> Vector {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = Fq::ZERO;
                for (j, &x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        s = f.add(s, f.mul(self.get(i, j), x));
                    }
                }
                s
            })
            .collect()
    }

    pub fn pow(&self, mut e: u64, f: &FieldSpec) -> MatrixFq {
        let mut result = MatrixFq::identity(self.n());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, f);
            }
        }
        result
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self, f: &FieldSpec) -> (MatrixFq, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = f.inv(m.get(r, c));
            for j in c..m.cols {
                let v = f.mul(inv, m.get(r, j));
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn rank(&self, f: &FieldSpec) -> usize {
        self.rref(f).1.len()
    }

    pub fn det(&self, f: &FieldSpec) -> Fq {
        let n = self.n();
        let mut m = self.clone();
        let mut det = Fq::ONE;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Fq::ZERO;
            };
            if pr != c {
                m.swap_rows(pr, c);
                det = f.neg(det);
            }
            let piv = m.get(c, c);
            det = f.mul(det, piv);
            let inv = f.inv(piv);
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), inv);
                if factor.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self, f: &FieldSpec) -> Option<MatrixFq> {
        let n = self.n();
        let aug = MatrixFq::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j)
            } else if j - n == i {
                Fq::ONE
            } else {
                Fq::ZERO
            }
        });
        let (r, pivots) = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(MatrixFq::from_fn(n, n, |i, j| r.get(i, n + j)))
    }

    /// Entrywise `a ↦ a^(p^k)`.
    pub fn frobenius(&self, k: u32, f: &FieldSpec) -> MatrixFq {
        self.map(|x| f.frobenius(x, k))
    }

    pub fn trace(&self, f: &FieldSpec) -> Fq {
        (0..self.n()).fold(Fq::ZERO, |s, i| f.add(s, self.get(i, i)))
    }

    /// Characteristic polynomial det(xI − A) via reduction to upper Hessenberg
    /// form followed by the standard determinant recurrence.
    pub fn char_poly(&self, f: &FieldSpec) -> PolyFq {
        let n = self.n();
        let mut h = self.clone();
        for j in 0..n.saturating_sub(2) {
            let Some(pr) = (j + 1..n).find(|&i| !h.get(i, j).is_zero()) else {
                continue;
            };
            if pr != j + 1 {
                h.swap_rows(pr, j + 1);
                h.swap_cols(pr, j + 1);
            }
            let inv = f.inv(h.get(j + 1, j));
            for i in j + 2..n {
                let u = f.mul(h.get(i, j), inv);
                if u.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let v = f.sub(h.get(i, c), f.mul(u, h.get(j + 1, c)));
                    h.set(i, c, v);
                }
                for r in 0..n {
                    let v = f.add(h.get(r, j + 1), f.mul(u, h.get(r, i)));
                    h.set(r, j + 1, v);
                }
            }
        }
        let mut polys: Vec<PolyFq> = vec![PolyFq::one()];
        for m in 1..=n {
            let lin = PolyFq::new(vec![f.neg(h.get(m - 1, m - 1)), Fq::ONE]);
            let mut pm = lin.mul(&polys[m - 1], f);
            let mut t = Fq::ONE;
            for i in (1..m).rev() {
                t = f.mul(t, h.get(i, i - 1));
                if t.is_zero() {
                    break;
                }
                let c = f.mul(t, h.get(i - 1, m - 1));
                pm = pm.sub(&polys[i - 1].scale(c, f), f);
            }
            polys.push(pm);
        }
        polys.pop().unwrap()
    }
}

/// Rank and a canonical (reduced echelon) kernel basis of a matrix.
pub fn rank_and_kernel(m: &MatrixFq, f: &FieldSpec) -> (usize, Vec<Vector>) {
    let (r, pivots) = m.rref(f);
    let mut basis = Vec::new();
    let mut pivot_row = vec![None; m.cols()];
    for (row, &c) in pivots.iter().enumerate() {
        pivot_row[c] = Some(row);
    }
    for free in 0..m.cols() {
        if pivot_row[free].is_some() {
            continue;
        }
        let mut v = vec![Fq::ZERO; m.cols()];
        v[free] = Fq::ONE;
        for (row, &c) in pivots.iter().enumerate() {
            v[c] = f.neg(r.get(row, free));
        }
        basis.push(v);
    }
    (pivots.len(), echelon_basis(&basis, f))
}

/// Reduced echelon basis of the span of the given vectors.
pub fn echelon_basis(vectors: &[Vector], f: &FieldSpec) -> Vec<Vector> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let (r, pivots) = MatrixFq::from_rows(vectors).rref(f);
    (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
}

pub fn span_dim(vectors: &[Vector], f: &FieldSpec) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    MatrixFq::from_rows(vectors).rank(f)
}

pub fn dot(a: &[Fq], b: &[Fq], f: &FieldSpec) -> Fq {
    a.iter().zip(b).fold(Fq::ZERO, |s, (&x, &y)| f.add(s, f.mul(x, y)))
}

pub fn vec_add(a: &[Fq], b: &[Fq], f: &FieldSpec) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

pub fn vec_sub(a: &[Fq], b: &[Fq], f: &FieldSpec) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect()
}

pub fn vec_scale(c: Fq, a: &[Fq], f: &FieldSpec) -> Vector {
    a.iter().map(|&x| f.mul(c, x)).collect()
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = vec![Fq::ZERO; n];
    v[i] = Fq::ONE;
    v
}

/// All q^n vectors of GF(q)^n in lexicographic index order.
pub fn all_vectors(n: usize, f: &FieldSpec) -> Vec<Vector> {
    let q = f.q() as usize;
    let total = q.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            let mut v = vec![Fq::ZERO; n];
            for x in v.iter_mut() {
                *x = Fq((idx % q) as u16);
                idx /= q;
            }
            v
        })
        .collect()
}

/// A polynomial over GF(q), coefficients low to high, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyFq {
    coeffs: Vec<Fq>,
}

impl PartialOrd for PolyFq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients from the top down.
impl Ord for PolyFq {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PolyFq {
    pub fn new(mut coeffs: Vec<Fq>) -> Self {
        while coeffs.last() == Some(&Fq::ZERO) {
            coeffs.pop();
        }
        PolyFq { coeffs }
    }

    pub fn zero() -> Self {
        PolyFq { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        PolyFq { coeffs: vec![Fq::ONE] }
    }

    pub fn x() -> Self {
        PolyFq { coeffs: vec![Fq::ZERO, Fq::ONE] }
    }

    /// x − a.
    pub fn linear(a: Fq, f: &FieldSpec) -> Self {
        PolyFq::new(vec![f.neg(a), Fq::ONE])
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or(Fq::ZERO)
    }

    /// Degree, with −1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [Fq::ONE]
    }

    pub fn lead(&self) -> Fq {
        self.coeffs.last().copied().unwrap_or(Fq::ZERO)
    }

    pub fn monic(&self, f: &FieldSpec) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(f.inv(self.lead()), f)
    }

    pub fn scale(&self, c: Fq, f: &FieldSpec) -> Self {
        PolyFq::new(self.coeffs.iter().map(|&a| f.mul(c, a)).collect())
    }

    pub fn add(&self, other: &PolyFq, f: &FieldSpec) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        PolyFq::new((0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &PolyFq, f: &FieldSpec) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        PolyFq::new((0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn mul(&self, other: &PolyFq, f: &FieldSpec) -> Self {
        if self.is_zero() || other.is_zero() {
            return PolyFq::zero();
        }
        let mut out = vec![Fq::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        PolyFq::new(out)
    }

    pub fn div_rem(&self, d: &PolyFq, f: &FieldSpec) -> (PolyFq, PolyFq) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.coeffs.len() - 1;
        if r.len() <= dd {
            return (PolyFq::zero(), self.clone());
        }
        let mut quot = vec![Fq::ZERO; r.len() - dd];
        let lead_inv = f.inv(d.lead());
        for k in (0..quot.len()).rev() {
            let c = f.mul(r[k + dd], lead_inv);
            quot[k] = c;
            if c.is_zero() {
                continue;
            }
            for (j, &dj) in d.coeffs.iter().enumerate() {
                r[k + j] = f.sub(r[k + j], f.mul(c, dj));
            }
        }
        r.truncate(dd);
        (PolyFq::new(quot), PolyFq::new(r))
    }

    pub fn rem(&self, d: &PolyFq, f: &FieldSpec) -> PolyFq {
        self.div_rem(d, f).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &PolyFq, f: &FieldSpec) -> PolyFq {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn mul_mod(&self, other: &PolyFq, m: &PolyFq, f: &FieldSpec) -> PolyFq {
        self.mul(other, f).rem(m, f)
    }

    /// self^e mod m, exponent given as big-endian bits of an arbitrary integer.
    pub fn pow_mod_big(&self, e: &num_bigint::BigUint, m: &PolyFq, f: &FieldSpec) -> PolyFq {
        let mut result = PolyFq::one().rem(m, f);
        let base = self.rem(m, f);
        for i in (0..e.bits()).rev() {
            result = result.mul_mod(&result, m, f);
            if e.bit(i) {
                result = result.mul_mod(&base, m, f);
            }
        }
        result
    }

    pub fn pow_mod(&self, e: u64, m: &PolyFq, f: &FieldSpec) -> PolyFq {
        self.pow_mod_big(&num_bigint::BigUint::from(e), m, f)
    }

    pub fn derivative(&self, f: &FieldSpec) -> PolyFq {
        PolyFq::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(f.from_int(i as i64), c))
                .collect(),
        )
    }

    pub fn eval(&self, x: Fq, f: &FieldSpec) -> Fq {
        self.coeffs.iter().rev().fold(Fq::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// For a polynomial in x^p, its p-th root.
    fn pth_root(&self, f: &FieldSpec) -> PolyFq {
        let p = f.p() as usize;
        PolyFq::new(
            self.coeffs
                .iter()
                .step_by(p)
                .map(|&c| f.frobenius(c, f.degree() - 1))
                .collect(),
        )
    }

    /// Rabin irreducibility test over GF(q).
    pub fn is_irreducible(&self, f: &FieldSpec) -> bool {
        let d = self.degree();
        if d < 1 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let g = self.monic(f);
        let q = f.q() as u64;
        let frob_iter = |h: &PolyFq, k: usize| -> PolyFq {
            let mut h = h.clone();
            for _ in 0..k {
                h = h.pow_mod(q, &g, f);
            }
            h
        };
        let x = PolyFq::x();
        if !frob_iter(&x, d as usize).sub(&x, f).rem(&g, f).is_zero() {
            return false;
        }
        crate::field::prime_factors(d as u64).into_iter().all(|r| {
            let h = frob_iter(&x, d as usize / r as usize).sub(&x, f);
            g.gcd(&h, f).is_one()
        })
    }

    pub fn to_string_with(&self, f: &FieldSpec) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = f.format(c);
            let mono = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            terms.push(match (cs.as_str(), mono.is_empty()) {
                (_, true) => cs,
                ("1", false) => mono,
                _ => format!("{cs}*{mono}"),
            });
        }
        terms.join(" + ")
    }
}

/// Horner evaluation of a polynomial at a square matrix.
pub fn eval_poly_at_matrix(p: &PolyFq, m: &MatrixFq, f: &FieldSpec) -> MatrixFq {
    let n = m.n();
    let mut acc = MatrixFq::zero(n, n);
    for &c in p.coeffs().iter().rev() {
        acc = acc.mul(m, f);
        for i in 0..n {
            acc.set(i, i, f.add(acc.get(i, i), c));
        }
    }
    acc
}

/// Factorization into monic irreducibles with multiplicities, sorted by
/// (degree, coefficients). The leading unit is dropped.
pub fn factor_squarefree_irreducible(p: &PolyFq, f: &FieldSpec) -> Result<Vec<(PolyFq, usize)>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut out: Vec<(PolyFq, usize)> = Vec::new();
    for (part, mult) in squarefree_decomposition(&p.monic(f), f) {
        for (deg, block) in distinct_degree(&part, f) {
            for fac in equal_degree(&block, deg, f) {
                out.push((fac, mult));
            }
        }
    }
    out.sort();
    let mut merged: Vec<(PolyFq, usize)> = Vec::new();
    for (fac, m) in out {
        match merged.last_mut() {
            Some((last, lm)) if *last == fac => *lm += m,
            _ => merged.push((fac, m)),
        }
    }
    Ok(merged)
}

fn squarefree_decomposition(p: &PolyFq, f: &FieldSpec) -> Vec<(PolyFq, usize)> {
    let mut out = Vec::new();
    if p.degree() < 1 {
        return out;
    }
    let dp = p.derivative(f);
    if dp.is_zero() {
        for (g, m) in squarefree_decomposition(&p.pth_root(f), f) {
            out.push((g, m * f.p() as usize));
        }
        return out;
    }
    let mut c = p.gcd(&dp, f);
    let mut w = p.div_rem(&c, f).0;
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c, f);
        let fac = w.div_rem(&y, f).0;
        if fac.degree() > 0 {
            out.push((fac.monic(f), i));
        }
        w = y;
        c = c.div_rem(&w, f).0;
        i += 1;
    }
    if c.degree() > 0 {
        for (g, m) in squarefree_decomposition(&c.monic(f).pth_root(f), f) {
            out.push((g, m * f.p() as usize));
        }
    }
    out
}

fn distinct_degree(p: &PolyFq, f: &FieldSpec) -> Vec<(usize, PolyFq)> {
    let mut out = Vec::new();
    let mut rest = p.monic(f);
    let x = PolyFq::x();
    let mut h = x.clone();
    let mut d = 0;
    while rest.degree() > 0 {
        d += 1;
        if 2 * d > rest.degree() as usize {
            out.push((rest.degree() as usize, rest.clone()));
            break;
        }
        h = h.pow_mod(f.q() as u64, &rest, f);
        let g = rest.gcd(&h.sub(&x, f), f);
        if !g.is_one() {
            out.push((d, g.clone()));
            rest = rest.div_rem(&g, f).0;
            h = h.rem(&rest, f);
        }
    }
    out
}

/// Splits a product of distinct monic irreducibles of degree d. Splitting
/// polynomials are tried in a fixed order so the result is reproducible.
fn equal_degree(p: &PolyFq, d: usize, f: &FieldSpec) -> Vec<PolyFq> {
    let n = p.degree() as usize;
    if n == d {
        return vec![p.monic(f)];
    }
    let q = f.q() as u64;
    let qd = num_bigint::BigUint::from(q).pow(d as u32);
    let one = PolyFq::one();
    let mut counter: u64 = 0;
    loop {
        counter += 1;
        let h = nth_poly(counter, n, f);
        if h.degree() < 1 {
            continue;
        }
        let split = if f.p() == 2 {
            // absolute trace map h + h^2 + ... + h^(2^(k-1)), q^d = 2^k
            let k = (f.degree() as usize) * d;
            let mut t = h.rem(p, f);
            let mut acc = t.clone();
            for _ in 1..k {
                t = t.mul_mod(&t, p, f);
                acc = acc.add(&t, f);
            }
            acc
        } else {
            let e = (&qd - 1u32) / 2u32;
            h.pow_mod_big(&e, p, f).sub(&one, f)
        };
        let g = p.gcd(&split, f);
        if g.degree() > 0 && g.degree() < p.degree() {
            let other = p.div_rem(&g, f).0;
            let mut out = equal_degree(&g, d, f);
            out.extend(equal_degree(&other.monic(f), d, f));
            return out;
        }
    }
}

/// The polynomial whose base-q digits (low to high) are `idx`, truncated to
/// degree < n.
fn nth_poly(mut idx: u64, n: usize, f: &FieldSpec) -> PolyFq {
    let q = f.q() as u64;
    let mut c = Vec::new();
    while idx > 0 && c.len() < n {
        c.push(Fq((idx % q) as u16));
        idx /= q;
    }
    PolyFq::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(q: u32) -> FieldSpec {
        FieldSpec::from_order(q).unwrap()
    }

    fn random_matrix(n: usize, f: &FieldSpec, rng: &mut ChaCha8Rng) -> MatrixFq {
        MatrixFq::from_fn(n, n, |_, _| Fq(rng.random_range(0..f.q()) as u16))
    }

    fn poly(c: &[u16]) -> PolyFq {
        PolyFq::new(c.iter().map(|&x| Fq(x)).collect())
    }

    #[test]
    fn identity_and_zero_kernels() {
        let f = gf(3);
        let (r, k) = rank_and_kernel(&MatrixFq::identity(3), &f);
        assert_eq!((r, k.len()), (3, 0));
        let (r, k) = rank_and_kernel(&MatrixFq::zero(3, 3), &f);
        assert_eq!(r, 0);
        assert_eq!(k, (0..3).map(|i| unit_vector(3, i)).collect::<Vec<_>>());
    }

    #[test]
    fn rank_of_product_of_rank_two_factors() {
        let f = gf(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut found = 0;
        while found < 20 {
            let u = MatrixFq::from_fn(4, 2, |_, _| Fq(rng.random_range(0..3)));
            let v = MatrixFq::from_fn(2, 4, |_, _| Fq(rng.random_range(0..3)));
            if u.rank(&f) < 2 || v.rank(&f) < 2 {
                continue;
            }
            found += 1;
            let m = u.mul(&v, &f);
            let (r, kernel) = rank_and_kernel(&m, &f);
            assert_eq!(r, 2);
            assert_eq!(kernel.len(), 2);
            for k in &kernel {
                assert!(m.apply(k, &f).iter().all(|x| x.is_zero()));
            }
            assert_eq!(echelon_basis(&kernel, &f), kernel);
        }
    }

    #[test]
    fn char_poly_examples() {
        let f = gf(2);
        assert_eq!(MatrixFq::identity(2).char_poly(&f), poly(&[1, 0, 1]));
        // companion matrix of x^3 + x + 1 over GF(3) gives it back
        let f3 = gf(3);
        let target = poly(&[1, 1, 0, 1]);
        let comp = MatrixFq::from_fn(3, 3, |i, j| {
            if j == 2 {
                f3.neg(target.coeff(i))
            } else if i == j + 1 {
                Fq::ONE
            } else {
                Fq::ZERO
            }
        });
        assert_eq!(comp.char_poly(&f3), target);
    }

    #[test]
    fn cayley_hamilton_and_det_agree_with_char_poly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [2, 3, 4, 5, 9] {
            let f = gf(q);
            for n in 1..=5 {
                for _ in 0..10 {
                    let m = random_matrix(n, &f, &mut rng);
                    let cp = m.char_poly(&f);
                    assert_eq!(cp.degree(), n as isize);
                    assert_eq!(cp.lead(), Fq::ONE);
                    let z = eval_poly_at_matrix(&cp, &m, &f);
                    assert!(z.entries().iter().all(|x| x.is_zero()));
                    // constant term is (-1)^n det
                    let sign = if n % 2 == 0 { Fq::ONE } else { f.neg(Fq::ONE) };
                    assert_eq!(cp.coeff(0), f.mul(sign, m.det(&f)));
                    assert_eq!(f.neg(cp.coeff(n - 1)), m.trace(&f));
                }
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = gf(7);
        for _ in 0..50 {
            let m = random_matrix(4, &f, &mut rng);
            match m.inverse(&f) {
                Some(inv) => {
                    assert!(m.mul(&inv, &f).is_identity());
                    assert!(!m.det(&f).is_zero());
                }
                None => assert!(m.det(&f).is_zero()),
            }
        }
    }

    #[test]
    fn factor_examples() {
        let f2 = gf(2);
        let fac = factor_squarefree_irreducible(&poly(&[1, 0, 1]), &f2).unwrap();
        assert_eq!(fac, vec![(poly(&[1, 1]), 2)]);
        let f3 = gf(3);
        let fac = factor_squarefree_irreducible(&poly(&[1, 0, 1]), &f3).unwrap();
        assert_eq!(fac, vec![(poly(&[1, 0, 1]), 1)]);
        // x^3 - x = x (x+1) (x+2)
        let fac = factor_squarefree_irreducible(&poly(&[0, 2, 0, 1]), &f3).unwrap();
        assert_eq!(fac, vec![(poly(&[0, 1]), 1), (poly(&[1, 1]), 1), (poly(&[2, 1]), 1)]);
        assert!(matches!(factor_squarefree_irreducible(&PolyFq::zero(), &f3), Err(Error::ZeroPolynomial)));
    }

    fn product_of_factors(fac: &[(PolyFq, usize)], f: &FieldSpec) -> PolyFq {
        fac.iter().fold(PolyFq::one(), |acc, (g, m)| (0..*m).fold(acc, |a, _| a.mul(g, f)))
    }

    #[test]
    fn factorization_round_trip_all_monic_cubics() {
        for q in [2u32, 3] {
            let f = gf(q);
            for idx in 0..q.pow(3) {
                let mut c: Vec<Fq> = (0..3).map(|i| Fq(((idx / q.pow(i)) % q) as u16)).collect();
                c.push(Fq::ONE);
                let p = PolyFq::new(c);
                let fac = factor_squarefree_irreducible(&p, &f).unwrap();
                assert_eq!(product_of_factors(&fac, &f), p);
                for (g, _) in &fac {
                    assert!(g.is_irreducible(&f));
                    assert_eq!(g.lead(), Fq::ONE);
                }
            }
        }
    }

    #[test]
    fn factorization_of_high_powers_in_small_characteristic() {
        let f = gf(4);
        let a = poly(&[2, 1]);
        let b = poly(&[1, 1, 1]); // x^2+x+1 splits over GF(4)
        let c = poly(&[2, 1, 1]); // x^2+x+z over GF(4) with z^2=z+1
        let mut p = PolyFq::one();
        for _ in 0..4 {
            p = p.mul(&a, &f);
        }
        p = p.mul(&b, &f).mul(&b, &f).mul(&c, &f);
        let fac = factor_squarefree_irreducible(&p, &f).unwrap();
        assert_eq!(product_of_factors(&fac, &f), p);
        assert!(fac.iter().all(|(g, _)| g.is_irreducible(&f)));
    }

    #[test]
    fn eval_examples() {
        let f = gf(3);
        let x_minus_1 = PolyFq::linear(Fq::ONE, &f);
        assert!(eval_poly_at_matrix(&x_minus_1, &MatrixFq::identity(3), &f)
            .entries()
            .iter()
            .all(|x| x.is_zero()));
        let t = MatrixFq::from_rows(&[vec![Fq::ONE, Fq::ONE], vec![Fq::ZERO, Fq::ONE]]);
        let x2 = poly(&[0, 0, 1]);
        assert_eq!(eval_poly_at_matrix(&x2, &t, &f), t.mul(&t, &f));
        assert_eq!(eval_poly_at_matrix(&PolyFq::x(), &t, &f), t);
        assert!(eval_poly_at_matrix(&PolyFq::one(), &t, &f).is_identity());
    }

    proptest! {
        #[test]
        fn rank_of_product_is_submultiplicative(seed in any::<u64>(), q in prop::sample::select(vec![2u32, 3, 4]), n in 1usize..=5) {
            let f = gf(q);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(n, &f, &mut rng);
            let b = random_matrix(n, &f, &mut rng);
            let r = a.mul(&b, &f).rank(&f);
            prop_assert!(r <= a.rank(&f).min(b.rank(&f)));
        }

        #[test]
        fn kernel_basis_is_canonical(seed in any::<u64>(), n in 1usize..=5) {
            let f = gf(5);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut m = random_matrix(n, &f, &mut rng);
            // force a nontrivial kernel half of the time
            if seed % 2 == 0 {
                for i in 0..n { m.set(i, 0, Fq::ZERO); }
            }
            let (r, k) = rank_and_kernel(&m, &f);
            prop_assert_eq!(r + k.len(), n);
            prop_assert_eq!(echelon_basis(&k, &f), k.clone());
            for v in &k {
                prop_assert!(m.apply(v, &f).iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn factorization_round_trip_random(seed in any::<u64>(), q in prop::sample::select(vec![2u32, 3, 4, 5, 8, 9]), deg in 1usize..=8) {
            let f = gf(q);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut c: Vec<Fq> = (0..deg).map(|_| Fq(rng.random_range(0..q) as u16)).collect();
            c.push(Fq::ONE);
            let p = PolyFq::new(c);
            let fac = factor_squarefree_irreducible(&p, &f).unwrap();
            prop_assert_eq!(product_of_factors(&fac, &f), p);
            for (g, _) in &fac {
                prop_assert!(g.is_irreducible(&f));
            }
        }
    }
}
