//! Classical forms, isometry tests, Ω membership and generating sets.
//!
//! Standard bases put hyperbolic pairs first: coordinates `2i` and `2i+1` are
//! `e_i` and `f_i`. An anisotropic tail (one vector for odd `n`, or a plane for
//! type `−`) comes last.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{prime_power, FieldSpec, Fq};
use crate::matspace::{all_vectors, dot, unit_vector, vec_add, vec_scale, vec_sub, MatrixFq, Vector};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    SL,
    SU,
    Sp,
    SO,
    Omega,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Epsilon {
    Plus,
    Minus,
    None,
}

impl Epsilon {
    pub fn sign(self) -> i64 {
        match self {
            Epsilon::Minus => -1,
            _ => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Epsilon::Plus => "+",
            Epsilon::Minus => "-",
            Epsilon::None => "",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormKind {
    None,
    Alternating,
    Symmetric,
    Hermitian,
    Quadratic,
}

/// A nondegenerate form on GF(q)^n in a fixed basis.
///
/// For `Symmetric` the quadratic form is `Q(v) = vᵀ·gram·v`; for `Quadratic`
/// it is `Q(v) = vᵀ·M·v` with `M` upper triangular and `gram = M + Mᵀ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormData {
    pub kind: FormKind,
    pub gram: MatrixFq,
    pub qmat: Option<MatrixFq>,
}

impl FormData {
    /// `(u|v) = uᵀ·gram·σ(v)` with σ the involution for Hermitian forms.
    pub fn bilinear(&self, u: &[Fq], v: &[Fq], f: &FieldSpec) -> Fq {
        let gv = match self.kind {
            FormKind::Hermitian => {
                let vbar: Vector = v.iter().map(|&x| f.conj(x)).collect();
                self.gram.apply(&vbar, f)
            }
            _ => self.gram.apply(v, f),
        };
        dot(u, &gv, f)
    }

    /// The quadratic form for orthogonal kinds, `(v|v)` otherwise.
    pub fn quad(&self, v: &[Fq], f: &FieldSpec) -> Fq {
        match (&self.kind, &self.qmat) {
            (FormKind::Quadratic, Some(m)) => dot(v, &m.apply(v, f), f),
            _ => self.bilinear(v, v, f),
        }
    }

    /// Checks `gᵀ·gram·σ(g) = gram`, plus `Q(g·e_i) = Q(e_i)` for quadratic forms.
    pub fn is_isometry(&self, g: &MatrixFq, f: &FieldSpec) -> Result<bool> {
        let n = self.gram.rows();
        if g.rows() != n || g.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.rows() });
        }
        if self.kind == FormKind::None {
            return Ok(true);
        }
        let gs = if self.kind == FormKind::Hermitian { g.map(|x| f.conj(x)) } else { g.clone() };
        if g.transpose().mul(&self.gram, f).mul(&gs, f) != self.gram {
            return Ok(false);
        }
        if self.kind == FormKind::Quadratic {
            for i in 0..n {
                let e = unit_vector(n, i);
                if self.quad(&g.apply(&e, f), f) != self.quad(&e, f) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// Number of nonzero vectors with `Q(v) = 0`.
    pub fn singular_vector_count(&self, f: &FieldSpec) -> usize {
        all_vectors(self.dim(), f)
            .iter()
            .filter(|v| v.iter().any(|x| !x.is_zero()) && self.quad(v, f).is_zero())
            .count()
    }

    /// Gram matrix of the restriction to the span of `basis`.
    pub fn restrict(&self, basis: &[Vector], f: &FieldSpec) -> FormData {
        let k = basis.len();
        let gram = MatrixFq::from_fn(k, k, |i, j| self.bilinear(&basis[i], &basis[j], f));
        let qmat = self.qmat.as_ref().map(|_| {
            MatrixFq::from_fn(k, k, |i, j| match i.cmp(&j) {
                std::cmp::Ordering::Less => gram.get(i, j),
                std::cmp::Ordering::Equal => self.quad(&basis[i], f),
                std::cmp::Ordering::Greater => Fq::ZERO,
            })
        });
        FormData { kind: self.kind, gram, qmat }
    }
}

fn hyperbolic_gram(n: usize, planes: usize, f: &FieldSpec, alternating: bool) -> MatrixFq {
    let mut g = MatrixFq::zero(n, n);
    for i in 0..planes {
        g.set(2 * i, 2 * i + 1, Fq::ONE);
        g.set(2 * i + 1, 2 * i, if alternating { f.neg(Fq::ONE) } else { Fq::ONE });
    }
    g
}

/// The fixed standard form for a family.
pub fn standard_form(family: Family, n: usize, f: &FieldSpec, eps: Epsilon) -> Result<FormData> {
    let odd_q = f.p() != 2;
    let bad = |why: &str| Err(Error::InconsistentSpec(why.to_string()));
    match family {
        Family::SL => Ok(FormData { kind: FormKind::None, gram: MatrixFq::identity(n), qmat: None }),
        Family::Sp => {
            if !n.is_multiple_of(2) {
                return bad("Sp needs even dimension");
            }
            Ok(FormData { kind: FormKind::Alternating, gram: hyperbolic_gram(n, n / 2, f, true), qmat: None })
        }
        Family::SU => {
            if !f.degree().is_multiple_of(2) {
                return bad("SU needs a field of square order");
            }
            let mut g = hyperbolic_gram(n, n / 2, f, false);
            if n % 2 == 1 {
                g.set(n - 1, n - 1, Fq::ONE);
            }
            Ok(FormData { kind: FormKind::Hermitian, gram: g, qmat: None })
        }
        Family::SO | Family::Omega => {
            if n % 2 == 1 && eps != Epsilon::None {
                return bad("odd-dimensional orthogonal groups have no type");
            }
            if n.is_multiple_of(2) && eps == Epsilon::None {
                return bad("even-dimensional orthogonal groups need a type + or -");
            }
            if odd_q {
                let planes = if eps == Epsilon::Minus { n / 2 - 1 } else { n / 2 };
                let mut g = hyperbolic_gram(n, planes, f, false);
                if n % 2 == 1 {
                    g.set(n - 1, n - 1, Fq::ONE);
                } else if eps == Epsilon::Minus {
                    let nu = f.least_nonsquare().expect("odd q has non-squares");
                    g.set(n - 2, n - 2, Fq::ONE);
                    g.set(n - 1, n - 1, f.neg(nu));
                }
                Ok(FormData { kind: FormKind::Symmetric, gram: g, qmat: None })
            } else {
                if family == Family::SO {
                    return bad("SO is only used for odd q; use O+/O- in characteristic 2");
                }
                if n % 2 == 1 {
                    return bad("odd-dimensional orthogonal groups in characteristic 2 are symplectic");
                }
                let planes = if eps == Epsilon::Minus { n / 2 - 1 } else { n / 2 };
                let mut m = MatrixFq::zero(n, n);
                for i in 0..planes {
                    m.set(2 * i, 2 * i + 1, Fq::ONE);
                }
                if eps == Epsilon::Minus {
                    // x² + xy + c·y² with x² + x + c irreducible
                    let c = f
                        .elements()
                        .find(|&c| f.elements().all(|x| !f.add(f.add(f.mul(x, x), x), c).is_zero()))
                        .expect("an irreducible Artin-Schreier quadratic exists");
                    m.set(n - 2, n - 2, Fq::ONE);
                    m.set(n - 2, n - 1, Fq::ONE);
                    m.set(n - 1, n - 1, c);
                }
                let gram = m.add(&m.transpose(), f);
                Ok(FormData { kind: FormKind::Quadratic, gram, qmat: Some(m) })
            }
        }
    }
}

/// A classical group together with its field and standard form.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub family: Family,
    pub n: usize,
    pub field: Arc<FieldSpec>,
    pub epsilon: Epsilon,
    pub form: FormData,
    /// Dimension D of the ambient algebraic group, measured against
    /// `q_param()`: for SU this is n²−1 over q0, i.e. (n²−1)/2 over q0².
    pub dim_d: u32,
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
            && self.n == other.n
            && self.epsilon == other.epsilon
            && *self.field == *other.field
    }
}

impl Eq for GroupSpec {}

impl GroupSpec {
    /// `q` is the order of the defining field, except for SU where it is q0 and
    /// the matrix entries live in GF(q0²).
    pub fn new(family: Family, n: usize, q: u32, epsilon: Epsilon) -> Result<GroupSpec> {
        if n == 0 {
            return Err(Error::InconsistentSpec("dimension must be positive".into()));
        }
        let (p, fdeg) = prime_power(q).ok_or_else(|| Error::InconsistentSpec(format!("{q} is not a prime power")))?;
        let field = match family {
            Family::SU => FieldSpec::new(p, 2 * fdeg)?,
            _ => FieldSpec::new(p, fdeg)?,
        };
        if matches!(family, Family::SL | Family::SU | Family::Sp) && epsilon != Epsilon::None {
            return Err(Error::InconsistentSpec(format!("{family:?} takes no orthogonal type")));
        }
        if family == Family::SO && p == 2 {
            return Err(Error::InconsistentSpec("SO is only used for odd q; use O+/O- in characteristic 2".into()));
        }
        let form = standard_form(family, n, &field, epsilon)?;
        let n32 = n as u32;
        let dim_d = match family {
            Family::SL => n32 * n32 - 1,
            Family::Sp => n32 * (n32 + 1) / 2,
            Family::SO | Family::Omega => n32 * (n32 - 1) / 2,
            Family::SU => n32 * n32 - 1,
        };
        Ok(GroupSpec { family, n, field: Arc::new(field), epsilon, form, dim_d })
    }

    pub fn parse(s: &str) -> Result<GroupSpec> {
        s.parse()
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// q0 for SU, q otherwise.
    pub fn q_param(&self) -> u32 {
        match self.family {
            Family::SU => self.field.sqrt_order().unwrap(),
            _ => self.field.q(),
        }
    }

    /// The order of the field of the natural module V (q0² for SU).
    pub fn q_module(&self) -> u32 {
        self.field.q()
    }

    /// `q_param()^D`, the upper end of the order sandwich.
    pub fn q_to_d(&self) -> BigUint {
        Pow::pow(BigUint::from(self.q_param()), self.dim_d)
    }

    /// Exact order from the classical product formulas.
    pub fn order(&self) -> BigUint {
        let n = self.n as u32;
        let big = |x: u32| BigUint::from(x);
        let q = big(self.q_param());
        let prod = |range: std::ops::RangeInclusive<u32>, term: &dyn Fn(u32) -> BigUint| {
            range.fold(BigUint::one(), |acc, i| acc * term(i))
        };
        let odd_q = self.field.p() != 2;
        match self.family {
            Family::SL => {
                Pow::pow(&q, n * (n - 1) / 2) * prod(2..=n, &|i| Pow::pow(&q, i) - 1u32)
            }
            Family::SU => {
                let term = |i: u32| {
                    if i.is_multiple_of(2) {
                        Pow::pow(&q, i) - 1u32
                    } else {
                        Pow::pow(&q, i) + 1u32
                    }
                };
                Pow::pow(&q, n * (n - 1) / 2) * prod(2..=n, &term)
            }
            Family::Sp => {
                let m = n / 2;
                Pow::pow(&q, m * m) * prod(1..=m, &|i| Pow::pow(&q, 2 * i) - 1u32)
            }
            Family::SO | Family::Omega => {
                let so = if n % 2 == 1 {
                    let m = (n - 1) / 2;
                    Pow::pow(&q, m * m) * prod(1..=m, &|i| Pow::pow(&q, 2 * i) - 1u32)
                } else {
                    let m = n / 2;
                    let qm = Pow::pow(&q, m);
                    let middle = if self.epsilon == Epsilon::Minus { qm + 1u32 } else { qm - 1u32 };
                    let rest = if m >= 2 { prod(1..=m - 1, &|i| Pow::pow(&q, 2 * i) - 1u32) } else { BigUint::one() };
                    Pow::pow(&q, m * (m - 1)) * middle * rest
                };
                if self.family == Family::Omega && odd_q {
                    so / 2u32
                } else {
                    so
                }
            }
        }
    }

    /// Whether the classical lower bound `|G| > q^D/2` is stated for this
    /// family; for Ω with odd q only `|G| > q^D/4` holds.
    pub fn sandwich_divisor(&self) -> u32 {
        if self.family == Family::Omega && self.field.p() != 2 {
            4
        } else {
            2
        }
    }

    /// Membership in the group: isometry, determinant one, and Ω where needed.
    pub fn contains(&self, g: &MatrixFq) -> Result<bool> {
        let f = self.field();
        if !self.form.is_isometry(g, f)? {
            return Ok(false);
        }
        if g.det(f) != Fq::ONE {
            return Ok(false);
        }
        if self.family == Family::Omega {
            return omega_membership(g, &self.form, f);
        }
        Ok(true)
    }

    /// A generating set; see the module docs for the basis layout.
    pub fn generators(&self) -> Result<Vec<MatrixFq>> {
        let f = self.field();
        let n = self.n;
        let mut cands: Vec<MatrixFq> = Vec::new();
        let omega = f.primitive();
        match self.family {
            Family::SL => {
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            let mut m = MatrixFq::identity(n);
                            m.set(i, j, Fq::ONE);
                            cands.push(m);
                        }
                    }
                }
                if f.q() > 2 && n >= 2 {
                    let mut d = vec![Fq::ONE; n];
                    d[0] = omega;
                    d[1] = f.inv(omega);
                    cands.push(MatrixFq::diagonal(&d));
                }
            }
            Family::Sp => {
                let planes = n / 2;
                let mut vs: Vec<Vector> = Vec::new();
                for i in 0..planes {
                    vs.push(unit_vector(n, 2 * i));
                    vs.push(unit_vector(n, 2 * i + 1));
                    if i + 1 < planes {
                        vs.push(vec_add(&unit_vector(n, 2 * i), &unit_vector(n, 2 * i + 2), f));
                        vs.push(vec_add(&unit_vector(n, 2 * i), &unit_vector(n, 2 * i + 3), f));
                    }
                }
                for v in &vs {
                    cands.push(self.transvection(v, Fq::ONE));
                }
                if f.q() > 3 {
                    cands.push(self.plane_torus(omega));
                }
                cands.extend(self.plane_swaps());
            }
            Family::SU => {
                let trace_zero: Vec<Fq> =
                    f.nonzero().filter(|&a| f.add(a, f.conj(a)).is_zero()).collect();
                for i in 0..n / 2 {
                    for v in [unit_vector(n, 2 * i), unit_vector(n, 2 * i + 1)] {
                        for &a in &trace_zero {
                            cands.push(self.transvection(&v, a));
                        }
                    }
                }
                cands.extend(self.eichler_family(&[Fq::ONE, omega]));
                cands.push(self.unitary_torus(omega));
                cands.extend(self.plane_swaps());
            }
            Family::SO | Family::Omega => {
                if n <= 2 {
                    return self.generators_from_isometries();
                }
                let scalars: Vec<Fq> = (0..f.degree()).map(|k| f.exp(k as u64)).collect();
                let mut scal = scalars.clone();
                if f.p() != 2 && !scal.contains(&omega) {
                    scal.push(omega);
                }
                cands.extend(self.eichler_family(&scal));
                if f.q() > 3 && self.planes() > 0 {
                    cands.push(self.plane_torus(omega));
                }
                cands.extend(self.plane_swaps());
                if self.family == Family::SO && self.planes() > 0 {
                    // ρ_a·ρ_b in the first hyperbolic plane with Q(a)Q(b) a non-square
                    let nu = f.least_nonsquare().unwrap();
                    let e = unit_vector(n, 0);
                    let fv = unit_vector(n, 1);
                    let a = vec_add(&e, &fv, f);
                    let b = vec_add(&e, &vec_scale(nu, &fv, f), f);
                    cands.push(self.reflection(&a).mul(&self.reflection(&b), f));
                }
            }
        }
        let mut out = Vec::new();
        for g in cands {
            if !g.is_identity() && self.contains(&g)? && !out.contains(&g) {
                out.push(g);
            }
        }
        Ok(out)
    }

    fn planes(&self) -> usize {
        match (self.family, self.epsilon) {
            (Family::SO | Family::Omega, Epsilon::Minus) => self.n / 2 - 1,
            _ => self.n / 2,
        }
    }

    fn generators_from_isometries(&self) -> Result<Vec<MatrixFq>> {
        let mut all = Vec::new();
        for g in isometries(&self.form, self.field())? {
            if self.contains(&g)? && !g.is_identity() {
                all.push(g);
            }
        }
        Ok(all)
    }

    /// `x ↦ x + a·(x|v)·v`.
    pub fn transvection(&self, v: &[Fq], a: Fq) -> MatrixFq {
        let f = self.field();
        let n = self.n;
        let cols: Vec<Vector> = (0..n)
            .map(|j| {
                let e = unit_vector(n, j);
                let c = f.mul(a, self.form.bilinear(&e, v, f));
                vec_add(&e, &vec_scale(c, v, f), f)
            })
            .collect();
        MatrixFq::from_columns(&cols)
    }

    /// Eichler transformation `y ↦ y + (y|u)w − (y|w)u + c(y|u)u` for
    /// isotropic `u` and `w ⊥ u`, with c chosen so that the map is an isometry.
    pub fn eichler(&self, u: &[Fq], w: &[Fq]) -> MatrixFq {
        let f = self.field();
        let n = self.n;
        let ww = self.form.bilinear(w, w, f);
        let c = match self.form.kind {
            FormKind::Quadratic => f.neg(self.form.quad(w, f)),
            FormKind::Hermitian => f
                .elements()
                .find(|&c| f.add(f.add(c, f.conj(c)), ww).is_zero())
                .expect("trace is surjective"),
            _ => f.neg(f.div(ww, f.from_int(2))),
        };
        let cols: Vec<Vector> = (0..n)
            .map(|j| {
                let y = unit_vector(n, j);
                let yu = self.form.bilinear(&y, u, f);
                let yw = self.form.bilinear(&y, w, f);
                let mut out = vec_add(&y, &vec_scale(yu, w, f), f);
                out = vec_sub(&out, &vec_scale(yw, u, f), f);
                vec_add(&out, &vec_scale(f.mul(c, yu), u, f), f)
            })
            .collect();
        MatrixFq::from_columns(&cols)
    }

    fn eichler_family(&self, scalars: &[Fq]) -> Vec<MatrixFq> {
        let f = self.field();
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..self.planes() {
            for u in [unit_vector(n, 2 * i), unit_vector(n, 2 * i + 1)] {
                for b in 0..n {
                    let w = unit_vector(n, b);
                    if w == u || !self.form.bilinear(&w, &u, f).is_zero() {
                        continue;
                    }
                    for &a in scalars {
                        out.push(self.eichler(&u, &vec_scale(a, &w, f)));
                    }
                }
            }
        }
        out
    }

    /// Reflection in an anisotropic vector of a symmetric form.
    pub fn reflection(&self, w: &[Fq]) -> MatrixFq {
        reflection_in(&self.form, w, self.field())
    }

    fn plane_torus(&self, lambda: Fq) -> MatrixFq {
        let f = self.field();
        let mut d = vec![Fq::ONE; self.n];
        d[0] = lambda;
        d[1] = f.inv(lambda);
        MatrixFq::diagonal(&d)
    }

    fn unitary_torus(&self, lambda: Fq) -> MatrixFq {
        let f = self.field();
        let n = self.n;
        let mut d = vec![Fq::ONE; n];
        d[0] = lambda;
        d[1] = f.inv(f.conj(lambda));
        if n % 2 == 1 {
            d[n - 1] = f.div(f.conj(lambda), lambda);
        } else if n >= 4 {
            d[2] = f.inv(lambda);
            d[3] = f.conj(lambda);
        }
        MatrixFq::diagonal(&d)
    }

    fn plane_swaps(&self) -> Vec<MatrixFq> {
        let n = self.n;
        (0..self.planes().saturating_sub(1))
            .map(|i| {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.swap(2 * i, 2 * i + 2);
                perm.swap(2 * i + 1, 2 * i + 3);
                MatrixFq::from_fn(n, n, |r, c| if perm[c] == r { Fq::ONE } else { Fq::ZERO })
            })
            .collect()
    }
}

fn reflection_in(form: &FormData, w: &[Fq], f: &FieldSpec) -> MatrixFq {
    let n = w.len();
    let ww = form.bilinear(w, w, f);
    let two_over = f.div(f.from_int(2), ww);
    let cols: Vec<Vector> = (0..n)
        .map(|j| {
            let y = unit_vector(n, j);
            let c = f.mul(two_over, form.bilinear(&y, w, f));
            vec_sub(&y, &vec_scale(c, w, f), f)
        })
        .collect();
    MatrixFq::from_columns(&cols)
}

/// Ω membership: spinor norm for odd q, Dickson invariant for even q.
pub fn omega_membership(g: &MatrixFq, form: &FormData, f: &FieldSpec) -> Result<bool> {
    if !matches!(form.kind, FormKind::Symmetric | FormKind::Quadratic) || !form.is_isometry(g, f)? {
        return Err(Error::NotAnIsometry);
    }
    if f.p() == 2 {
        let r = g.sub(&MatrixFq::identity(g.n()), f).rank(f);
        return Ok(r.is_multiple_of(2));
    }
    if g.det(f) != Fq::ONE {
        return Ok(false);
    }
    Ok(f.is_square(spinor_norm(g, form, f)?))
}

/// Product of `(w|w)` over a reflection decomposition of `g`, built by the
/// constructive Cartan–Dieudonné loop in an orthogonal basis.
pub fn spinor_norm(g: &MatrixFq, form: &FormData, f: &FieldSpec) -> Result<Fq> {
    if form.kind != FormKind::Symmetric {
        return Err(Error::UnsupportedFamily("spinor norm needs a symmetric form over odd q".into()));
    }
    let n = g.n();
    let p = orthogonal_basis(form, f);
    let pinv = p.inverse(f).ok_or_else(|| Error::Inconsistent("degenerate form".into()))?;
    let diag: Vector = (0..n).map(|i| form.bilinear(&p.column(i), &p.column(i), f)).collect();
    let dform = FormData { kind: FormKind::Symmetric, gram: MatrixFq::diagonal(&diag), qmat: None };
    let mut h = pinv.mul(g, f).mul(&p, f);
    let mut norm = Fq::ONE;
    for i in 0..n {
        let x = unit_vector(n, i);
        let y = h.apply(&x, f);
        if y == x {
            continue;
        }
        let w = vec_sub(&y, &x, f);
        let qw = dform.bilinear(&w, &w, f);
        if !qw.is_zero() {
            h = reflection_in(&dform, &w, f).mul(&h, f);
            norm = f.mul(norm, qw);
        } else {
            let s = vec_add(&x, &y, f);
            let qs = dform.bilinear(&s, &s, f);
            let qx = dform.bilinear(&x, &x, f);
            h = reflection_in(&dform, &x, f).mul(&reflection_in(&dform, &s, f).mul(&h, f), f);
            norm = f.mul(norm, f.mul(qs, qx));
        }
    }
    debug_assert!(h.is_identity());
    Ok(norm)
}

/// Columns form a basis in which the symmetric form is diagonal.
fn orthogonal_basis(form: &FormData, f: &FieldSpec) -> MatrixFq {
    let n = form.dim();
    let mut rest: Vec<Vector> = (0..n).map(|i| unit_vector(n, i)).collect();
    let mut chosen: Vec<Vector> = Vec::new();
    while !rest.is_empty() {
        let anis = |v: &Vector| !form.bilinear(v, v, f).is_zero();
        let w = rest.iter().find(|v| anis(v)).cloned().or_else(|| {
            (0..rest.len())
                .flat_map(|i| (i + 1..rest.len()).map(move |j| (i, j)))
                .map(|(i, j)| vec_add(&rest[i], &rest[j], f))
                .find(|v| anis(v))
        });
        let w = w.expect("nondegenerate symmetric form over odd q has anisotropic vectors");
        let ww = form.bilinear(&w, &w, f);
        let mut next = Vec::new();
        for v in &rest {
            let c = f.div(form.bilinear(v, &w, f), ww);
            let proj = vec_sub(v, &vec_scale(c, &w, f), f);
            next.push(proj);
        }
        // drop one dependent vector to keep a basis of w⊥
        let mut basis = Vec::new();
        for v in next {
            let mut trial = basis.clone();
            trial.push(v.clone());
            if crate::matspace::span_dim(&trial, f) == trial.len() {
                basis.push(v);
            }
        }
        chosen.push(w);
        rest = basis;
    }
    MatrixFq::from_columns(&chosen)
}

/// All isometries of a form, by choosing images of basis vectors one at a
/// time subject to the Gram constraints.
pub fn isometries(form: &FormData, f: &FieldSpec) -> Result<Vec<MatrixFq>> {
    if form.kind == FormKind::None {
        return Err(Error::UnsupportedFamily("GL is not enumerated by isometry search".into()));
    }
    let n = form.dim();
    let total = (f.q() as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if total > 1 << 20 {
        return Err(Error::GuardExceeded(format!("q^n = {total} vectors")));
    }
    let vectors = all_vectors(n, f);
    let basis: Vec<Vector> = (0..n).map(|i| unit_vector(n, i)).collect();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn extend(
        form: &FormData,
        f: &FieldSpec,
        vectors: &[Vector],
        basis: &[Vector],
        chosen: &mut Vec<usize>,
        out: &mut Vec<MatrixFq>,
    ) {
        let i = chosen.len();
        if i == basis.len() {
            let cols: Vec<Vector> = chosen.iter().map(|&k| vectors[k].clone()).collect();
            out.push(MatrixFq::from_columns(&cols));
            return;
        }
        let target_q = form.quad(&basis[i], f);
        for (k, v) in vectors.iter().enumerate() {
            if form.quad(v, f) != target_q || form.bilinear(v, v, f) != form.bilinear(&basis[i], &basis[i], f) {
                continue;
            }
            let ok = chosen.iter().enumerate().all(|(j, &c)| {
                form.bilinear(v, &vectors[c], f) == form.bilinear(&basis[i], &basis[j], f)
                    && form.bilinear(&vectors[c], v, f) == form.bilinear(&basis[j], &basis[i], f)
            });
            if ok {
                chosen.push(k);
                extend(form, f, vectors, basis, chosen, out);
                chosen.pop();
            }
        }
    }
    extend(form, f, &vectors, &basis, &mut chosen, &mut out);
    Ok(out)
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.q_param();
        let n = self.n;
        match (self.family, self.epsilon) {
            (Family::SL, _) => write!(fm, "SL({n},{q})"),
            (Family::SU, _) => write!(fm, "SU({n},{q})"),
            (Family::Sp, _) => write!(fm, "Sp({n},{q})"),
            (Family::SO, Epsilon::None) => write!(fm, "SO({n},{q})"),
            (Family::SO, e) => write!(fm, "SO{}({n},{q})", e.symbol()),
            (Family::Omega, Epsilon::None) => write!(fm, "O({n},{q})"),
            (Family::Omega, e) => write!(fm, "O{}({n},{q})", e.symbol()),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Accepts `SL(n,q)`, `SU(n,q0)`, `Sp(n,q)`, `SO(n,q)`, `SO±(n,q)`,
    /// `O±(n,q)` / `Omega±(n,q)` for Ω^±, and `O(n,q)` for odd-dimensional Ω.
    fn from_str(s: &str) -> Result<GroupSpec> {
        let err = |reason: &str| Error::Parse { input: s.to_string(), reason: reason.to_string() };
        let compact: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| if c == '−' || c == '–' { '-' } else { c })
            .collect::<String>()
            .to_ascii_uppercase()
            .replace('Ω', "O");
        let open = compact.find('(').ok_or_else(|| err("expected NAME(n,q)"))?;
        if !compact.ends_with(')') {
            return Err(err("missing closing parenthesis"));
        }
        let name = &compact[..open];
        let args: Vec<&str> = compact[open + 1..compact.len() - 1].split(',').collect();
        if args.len() != 2 {
            return Err(err("expected two arguments n,q"));
        }
        let n: usize = args[0].parse().map_err(|_| err("dimension is not an integer"))?;
        let q: u32 = args[1].parse().map_err(|_| err("field order is not an integer"))?;
        let (family, eps) = match name {
            "SL" => (Family::SL, Epsilon::None),
            "SU" => (Family::SU, Epsilon::None),
            "SP" => (Family::Sp, Epsilon::None),
            "SO" => (Family::SO, Epsilon::None),
            "SO+" => (Family::SO, Epsilon::Plus),
            "SO-" => (Family::SO, Epsilon::Minus),
            "O" | "OMEGA" => (Family::Omega, Epsilon::None),
            "O+" | "OMEGA+" => (Family::Omega, Epsilon::Plus),
            "O-" | "OMEGA-" => (Family::Omega, Epsilon::Minus),
            _ => return Err(err("unknown family")),
        };
        GroupSpec::new(family, n, q, eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> GroupSpec {
        GroupSpec::parse(s).unwrap()
    }

    #[test]
    fn parse_round_trip() {
        for s in ["SL(3,2)", "SU(3,3)", "Sp(4,3)", "SO(3,3)", "O+(4,2)", "O-(6,2)", "SO+(4,3)", "O(5,3)"] {
            assert_eq!(spec(s).to_string(), s);
        }
        assert_eq!(spec("sp(4, 2)").to_string(), "Sp(4,2)");
        assert_eq!(spec("Ω−(4,3)").to_string(), "O-(4,3)");
        assert!(GroupSpec::parse("SL(3,6)").is_err());
        assert!(GroupSpec::parse("Sp(3,2)").is_err());
        assert!(GroupSpec::parse("SO(4,3)").is_err());
        assert!(GroupSpec::parse("XY(3,2)").is_err());
    }

    #[test]
    fn standard_form_examples() {
        let f3 = FieldSpec::new(3, 1).unwrap();
        let sp = standard_form(Family::Sp, 2, &f3, Epsilon::None).unwrap();
        assert_eq!(sp.gram, MatrixFq::from_rows(&[vec![Fq(0), Fq(1)], vec![Fq(2), Fq(0)]]));
        let f2 = FieldSpec::new(2, 1).unwrap();
        let plus = standard_form(Family::Omega, 2, &f2, Epsilon::Plus).unwrap();
        assert_eq!(plus.qmat.clone().unwrap(), MatrixFq::from_rows(&[vec![Fq(0), Fq(1)], vec![Fq(0), Fq(0)]]));
        assert!(plus.quad(&[Fq(1), Fq(0)], &f2).is_zero());
        assert!(plus.quad(&[Fq(0), Fq(1)], &f2).is_zero());
        let minus = standard_form(Family::Omega, 2, &f2, Epsilon::Minus).unwrap();
        assert_eq!(minus.qmat.clone().unwrap(), MatrixFq::from_rows(&[vec![Fq(1), Fq(1)], vec![Fq(0), Fq(1)]]));
        assert_eq!(minus.singular_vector_count(&f2), 0);
    }

    #[test]
    fn orthogonal_type_is_certified_by_singular_vector_count() {
        for (q, n) in [(2u32, 2usize), (2, 4), (2, 6), (3, 2), (3, 4), (5, 4), (4, 4)] {
            let f = FieldSpec::from_order(q).unwrap();
            let m = (n / 2) as i64;
            for eps in [Epsilon::Plus, Epsilon::Minus] {
                let form = standard_form(Family::Omega, n, &f, eps).unwrap();
                let e = eps.sign();
                let qi = q as i64;
                let expected = (qi.pow(m as u32) - e) * (qi.pow(m as u32 - 1) + e);
                assert_eq!(form.singular_vector_count(&f) as i64, expected, "q={q} n={n} {eps:?}");
            }
        }
    }

    #[test]
    fn isometry_examples() {
        let f5 = FieldSpec::new(5, 1).unwrap();
        let sp = standard_form(Family::Sp, 2, &f5, Epsilon::None).unwrap();
        for a in f5.nonzero() {
            let d = MatrixFq::diagonal(&[a, f5.inv(a)]);
            assert!(sp.is_isometry(&d, &f5).unwrap());
        }
        assert!(sp.is_isometry(&MatrixFq::identity(2), &f5).unwrap());
        let swap = MatrixFq::from_rows(&[vec![Fq(0), Fq(1)], vec![Fq(1), Fq(0)]]);
        assert!(!sp.is_isometry(&swap, &f5).unwrap());
        assert!(matches!(sp.is_isometry(&MatrixFq::identity(3), &f5), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn omega_membership_examples() {
        let g = spec("SO(3,3)");
        let f = g.field();
        assert!(omega_membership(&MatrixFq::identity(3), &g.form, f).unwrap());
        // reflection in a vector with non-square norm
        let nu = f.least_nonsquare().unwrap();
        let w = vec![Fq::ZERO, Fq::ZERO, Fq::ONE];
        let w = vec_scale(Fq::ONE, &w, f);
        let r = g.reflection(&w);
        assert!(g.form.is_isometry(&r, f).unwrap());
        // Q(w)=1 is a square but det = -1, so r is outside Ω
        assert!(!omega_membership(&r, &g.form, f).unwrap());
        let e1f1 = vec![Fq::ONE, Fq::ONE, Fq::ZERO];
        let qv = g.form.quad(&e1f1, f);
        assert!(!f.is_square(qv));
        let sn = spinor_norm(&g.reflection(&e1f1), &g.form, f).unwrap();
        assert!(!f.is_square(sn));
        // ρ_a·ρ_b with Q(a)Q(b) = ν lies in SO but not in Ω
        let b = vec![Fq::ONE, nu, Fq::ZERO];
        let rr = g.reflection(&e1f1).mul(&g.reflection(&b), f);
        assert_eq!(rr.det(f), Fq::ONE);
        assert!(!omega_membership(&rr, &g.form, f).unwrap());

        // orthogonal transvection over GF(2): x ↦ x + B(x,v)/Q(v) v
        let o = spec("O+(4,2)");
        let f2 = o.field();
        let v = vec![Fq::ONE, Fq::ONE, Fq::ZERO, Fq::ZERO];
        assert_eq!(o.form.quad(&v, f2), Fq::ONE);
        let cols: Vec<Vector> = (0..4)
            .map(|j| {
                let e = unit_vector(4, j);
                let c = o.form.bilinear(&e, &v, f2);
                vec_add(&e, &vec_scale(c, &v, f2), f2)
            })
            .collect();
        let t = MatrixFq::from_columns(&cols);
        assert!(o.form.is_isometry(&t, f2).unwrap());
        assert!(!omega_membership(&t, &o.form, f2).unwrap());
    }

    /// Wall's formula: for g ∈ SO, the spinor norm is the discriminant of the
    /// form (x, y) ↦ B(x, y') on Im(g − 1), where y = (g − 1)y'.
    fn wall_spinor_norm(g: &MatrixFq, form: &FormData, f: &FieldSpec) -> Fq {
        let n = g.n();
        let a = g.sub(&MatrixFq::identity(n), f);
        let image = crate::matspace::echelon_basis(&(0..n).map(|j| a.column(j)).collect::<Vec<_>>(), f);
        let pre: Vec<Vector> = image
            .iter()
            .map(|w| {
                let aug = MatrixFq::from_fn(n, n + 1, |i, j| if j < n { a.get(i, j) } else { w[i] });
                let (r, piv) = aug.rref(f);
                let mut y = vec![Fq::ZERO; n];
                for (row, &c) in piv.iter().enumerate() {
                    y[c] = r.get(row, n);
                }
                y
            })
            .collect();
        let k = image.len();
        if k == 0 {
            return Fq::ONE;
        }
        let m = MatrixFq::from_fn(k, k, |i, j| form.bilinear(&image[i], &pre[j], f));
        m.det(f)
    }

    #[test]
    fn spinor_norm_matches_wall_form_on_so() {
        for s in ["SO(3,3)", "SO+(4,3)", "SO-(4,3)", "SO(3,5)"] {
            let g = spec(s);
            let f = g.field();
            let els = isometries(&g.form, f).unwrap();
            let mut checked = 0;
            for h in els.iter().filter(|h| h.det(f) == Fq::ONE) {
                let cd = f.is_square(spinor_norm(h, &g.form, f).unwrap());
                let wall = f.is_square(wall_spinor_norm(h, &g.form, f));
                assert_eq!(cd, wall, "{s}");
                checked += 1;
            }
            assert!(checked > 0);
        }
    }

    #[test]
    fn orders_match_known_values() {
        let cases = [
            ("SL(2,2)", 6u64),
            ("SL(3,2)", 168),
            ("SL(3,3)", 5616),
            ("SU(3,2)", 216),
            ("SU(3,3)", 6048),
            ("Sp(4,2)", 720),
            ("Sp(4,3)", 51840),
            ("SO(3,3)", 24),
            ("O+(4,2)", 36),
            ("O-(4,2)", 60),
            ("O+(4,3)", 288),
            ("O-(4,3)", 360),
            ("O+(6,2)", 20160),
            ("O-(6,2)", 25920),
        ];
        for (s, o) in cases {
            assert_eq!(spec(s).order(), BigUint::from(o), "{s}");
        }
    }

    #[test]
    fn order_sandwich_on_roster() {
        let roster = [
            "SL(2,2)", "SL(2,3)", "SL(2,4)", "SL(2,5)", "SL(2,7)", "SL(3,2)", "SL(3,3)", "SU(3,2)",
            "SU(3,3)", "Sp(2,3)", "Sp(4,2)", "Sp(4,3)", "SO(3,3)", "O+(4,2)", "O-(4,2)", "O+(4,3)",
            "O-(4,3)", "O+(6,2)", "O-(6,2)",
        ];
        for s in roster {
            let g = spec(s);
            let qd = g.q_to_d();
            let o = g.order();
            assert!(qd > o, "{s}");
            assert!(&o * g.sandwich_divisor() > qd, "{s}");
        }
    }

    #[test]
    fn isometry_search_matches_order_formulas() {
        // full isometry groups: |Sp| and |GO| = 2|SO| (odd q) or 2|Ω| (even q)
        for (s, factor) in [("Sp(4,2)", 1u32), ("SO(3,3)", 2), ("O+(4,2)", 2), ("O-(4,2)", 2), ("SU(3,2)", 3)] {
            let g = spec(s);
            let all = isometries(&g.form, g.field()).unwrap();
            assert_eq!(BigUint::from(all.len()), g.order() * factor, "{s}");
        }
    }

    #[test]
    fn generators_lie_in_the_group() {
        for s in ["SL(2,2)", "SL(3,3)", "SU(3,3)", "Sp(4,3)", "SO(3,3)", "O-(4,3)", "O+(6,2)", "Sp(8,2)"] {
            let g = spec(s);
            let gens = g.generators().unwrap();
            assert!(!gens.is_empty());
            for h in &gens {
                assert!(g.contains(h).unwrap(), "{s}");
            }
        }
        let sl22 = spec("SL(2,2)").generators().unwrap();
        let expected = [
            MatrixFq::from_rows(&[vec![Fq(1), Fq(1)], vec![Fq(0), Fq(1)]]),
            MatrixFq::from_rows(&[vec![Fq(1), Fq(0)], vec![Fq(1), Fq(1)]]),
        ];
        assert_eq!(sl22.len(), 2);
        assert!(expected.iter().all(|m| sl22.contains(m)));
    }
}
