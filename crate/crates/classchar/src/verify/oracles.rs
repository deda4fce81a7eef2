//! Brute-force counts for the vector, stabilizer, orbit and conjugate-tuple lemmas.

use std::cmp::Ordering;
use std::collections::HashSet;

use indexmap::IndexSet;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::element::support;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Fq};
use crate::forms::{Family, FormData, GroupSpec};
use crate::grp::EnumeratedGroup;
use crate::matspace::{all_vectors, eval_poly_at_matrix, rank_and_kernel, span_dim, MatrixFq, PolyFq, Vector};
use crate::report::{BoundReport, BoundRow, Verdict};

/// Largest search space an exhaustive oracle will walk.
pub const ORACLE_GUARD: u64 = 10_000_000;
/// Largest group scanned element by element.
pub const SCAN_LIMIT: u64 = 1_000_000;
const ORBIT_CAP: usize = 2_000_000;

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// `count` against `mult · q^{e2/2}`, exactly.
fn cmp_half_power(count: &BigUint, mult: &BigUint, q: u32, e2: i64) -> Ordering {
    let lhs = count * count;
    let m2 = mult * mult;
    if e2 >= 0 {
        lhs.cmp(&(m2 * Pow::pow(big(q as u64), e2 as u64)))
    } else {
        (lhs * Pow::pow(big(q as u64), (-e2) as u64)).cmp(&m2)
    }
}

fn log_q(x: &BigUint, q: u32) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    ((x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2) / (q as f64).ln()
}

fn soft(ok: bool, hypothesis: bool) -> Verdict {
    match (hypothesis, ok) {
        (true, ok) => Verdict::from_bool(ok),
        (false, _) => Verdict::Advisory,
    }
}

/// Row for `count ≤ mult·q^{e2/2}` (or `<` when `strict`), in log_q units.
fn power_row(label: &str, count: &BigUint, mult: &BigUint, q: u32, e2: i64, strict: bool, hypothesis: bool) -> BoundRow {
    let ord = cmp_half_power(count, mult, q, e2);
    let ok = if strict { ord == Ordering::Less } else { ord != Ordering::Greater };
    let measured = log_q(count, q);
    let bound = log_q(mult, q) + e2 as f64 / 2.0;
    BoundRow::new(label, measured, bound, soft(ok, hypothesis))
        .with_note(format!("count={count} {}", if ok { "holds" } else { "fails" }))
}

/// Lower-bound variant: `count ≥ mult·q^{e2/2}`.
fn power_row_lower(label: &str, count: &BigUint, mult: &BigUint, q: u32, e2: i64, hypothesis: bool) -> BoundRow {
    let ok = cmp_half_power(count, mult, q, e2) != Ordering::Less;
    let measured = log_q(count, q);
    let bound = log_q(mult, q) + e2 as f64 / 2.0;
    BoundRow::new(label, measured, bound, soft(ok, hypothesis))
        .with_margin(measured - bound)
        .with_note(format!("count={count} {}", if ok { "holds" } else { "fails" }))
}

/// q-exponent scale of the module field relative to `q_param`.
fn module_scale(spec: &GroupSpec) -> i64 {
    if spec.family == Family::SU {
        2
    } else {
        1
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * big(n - i) / big(i + 1))
}

fn check_independent(vs: &[Vector], n: usize, f: &FieldSpec, what: &str) -> Result<()> {
    if vs.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: vs.iter().map(|v| v.len()).find(|&l| l != n).unwrap() });
    }
    if span_dim(vs, f) != vs.len() {
        return Err(Error::OutOfRange(format!("{what} vectors are not linearly independent")));
    }
    Ok(())
}

/// Incrementally maintained echelon basis.
#[derive(Clone, Default)]
struct Echelon {
    rows: Vec<(usize, Vector)>,
}

impl Echelon {
    /// Adds `v` if it is outside the span; returns whether it was new.
    fn insert(&mut self, v: &[Fq], f: &FieldSpec) -> bool {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            let c = v[*p];
            if !c.is_zero() {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(p) => {
                let inv = f.inv(v[p]);
                let row = v.iter().map(|&x| f.mul(inv, x)).collect();
                self.rows.push((p, row));
                true
            }
        }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Exhaustive count of `(v_1,…,v_k)` with `dim Span(v, w) = k + r`, against
/// `binom(k,r)·q^{rn+k²−r²}`.
pub fn oracle_count_v(f: &FieldSpec, n: usize, k: usize, r: usize, ws: &[Vector]) -> Result<BoundReport> {
    if ws.len() != k || r > k || k == 0 {
        return Err(Error::OutOfRange(format!("need k = |w| >= 1 and r <= k, got k={k}, |w|={}, r={r}", ws.len())));
    }
    check_independent(ws, n, f, "w")?;
    let q = f.q();
    let space = (q as f64).powi((k * n) as i32);
    if space > ORACLE_GUARD as f64 {
        return Err(Error::GuardExceeded(format!("q^(kn) = {q}^{} exceeds {ORACLE_GUARD}", k * n)));
    }
    let vectors = all_vectors(n, f);
    let mut start = Echelon::default();
    for w in ws {
        start.insert(w, f);
    }
    fn walk(depth: usize, k: usize, target: usize, basis: &Echelon, vectors: &[Vector], f: &FieldSpec) -> u64 {
        if depth == k {
            return (basis.dim() == target) as u64;
        }
        let mut total = 0;
        for v in vectors {
            let mut next = basis.clone();
            next.insert(v, f);
            total += walk(depth + 1, k, target, &next, vectors, f);
        }
        total
    }
    let count = big(walk(0, k, k + r, &start, &vectors, f));
    let mult = binomial(k as u64, r as u64);
    let e = (r * n + k * k - r * r) as i64;
    let mut report = BoundReport::new("count-v", None);
    let label = format!("q={q} n={n} k={k} r={r}");
    let ord = cmp_half_power(&count, &mult, q, 2 * e);
    let bound = &mult * Pow::pow(big(q as u64), e as u64);
    let verdict = match ord {
        Ordering::Less => Verdict::Pass,
        Ordering::Equal => Verdict::Advisory,
        Ordering::Greater => Verdict::Fail,
    };
    let mut row = BoundRow::new(label, count.to_f64().unwrap(), bound.to_f64().unwrap(), verdict);
    if ord == Ordering::Equal {
        row = row.with_note("count equals the bound; flagged for review");
    }
    report.push(row);
    Ok(report)
}

/// The orbit of a tuple of vectors under a generating set.
#[derive(Clone, Debug)]
pub struct TupleOrbit {
    /// Orbit points as concatenated coordinate vectors.
    pub points: IndexSet<Vec<Fq>>,
    /// `transversal[i]` maps the base tuple to point i.
    pub transversal: Option<Vec<MatrixFq>>,
    pub arity: usize,
}

impl TupleOrbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Vec<Vector> {
        let p = &self.points[i];
        let n = p.len() / self.arity.max(1);
        p.chunks(n.max(1)).map(|c| c.to_vec()).collect()
    }
}

fn act(m: &MatrixFq, flat: &[Fq], n: usize, f: &FieldSpec) -> Vec<Fq> {
    flat.chunks(n).flat_map(|c| m.apply(c, f)).collect()
}

/// Breadth-first orbit of `base` (a tuple of vectors) under `gens`.
pub fn tuple_orbit(gens: &[MatrixFq], base: &[Vector], f: &FieldSpec, transversal: bool) -> Result<TupleOrbit> {
    let arity = base.len();
    let n = base.first().map(|v| v.len()).unwrap_or(0);
    let mut points = IndexSet::new();
    let flat: Vec<Fq> = base.iter().flatten().copied().collect();
    points.insert(flat);
    let mut trans = transversal.then(|| vec![MatrixFq::identity(n.max(gens.first().map(|g| g.n()).unwrap_or(0)))]);
    if arity == 0 {
        return Ok(TupleOrbit { points, transversal: trans, arity });
    }
    let mut i = 0;
    while i < points.len() {
        for s in gens {
            let image = act(s, &points[i], n, f);
            if points.insert(image) {
                if points.len() > ORBIT_CAP {
                    return Err(Error::GuardExceeded(format!("tuple orbit longer than {ORBIT_CAP}")));
                }
                if let Some(t) = trans.as_mut() {
                    let m = s.mul(&t[i], f);
                    t.push(m);
                }
            }
        }
        i += 1;
    }
    Ok(TupleOrbit { points, transversal: trans, arity })
}

/// The pointwise stabilizer of a subspace given by a basis.
#[derive(Clone, Debug)]
pub struct Stabilizer {
    pub order: BigUint,
    pub orbit_len: usize,
    /// Schreier generators.
    pub generators: Vec<MatrixFq>,
}

/// `|H| = |G|/|orbit of the basis tuple|` with Schreier generators for H.
pub fn pointwise_stabilizer(spec: &GroupSpec, basis: &[Vector]) -> Result<Stabilizer> {
    let f = spec.field();
    check_independent(basis, spec.n, f, "U")?;
    let gens = spec.generators()?;
    if basis.is_empty() {
        return Ok(Stabilizer { order: spec.order(), orbit_len: 1, generators: gens });
    }
    let orbit = tuple_orbit(&gens, basis, f, true)?;
    let (order, rem) = spec.order().div_rem(&big(orbit.len() as u64));
    if !rem.is_zero() {
        return Err(Error::Inconsistent(format!("orbit length {} does not divide |G|", orbit.len())));
    }
    let trans = orbit.transversal.as_ref().unwrap();
    let n = spec.n;
    let mut seen = HashSet::new();
    let mut generators = Vec::new();
    for (i, t) in trans.iter().enumerate() {
        for s in &gens {
            let j = orbit.points.get_index_of(&act(s, &orbit.points[i], n, f)).unwrap();
            let tj_inv = trans[j].inverse(f).ok_or_else(|| Error::Inconsistent("singular transversal".into()))?;
            let h = tj_inv.mul(s, f).mul(t, f);
            if !h.is_identity() && seen.insert(h.clone()) {
                generators.push(h);
            }
        }
    }
    Ok(Stabilizer { order, orbit_len: orbit.len(), generators })
}

/// `|H|` against `q^{D−dn}` (SL, with the exact formula) or `q^{D−dn+d(d+1)/2}`.
pub fn oracle_pointwise_stabilizer(spec: &GroupSpec, basis: &[Vector]) -> Result<BoundReport> {
    let st = pointwise_stabilizer(spec, basis)?;
    let n = spec.n as i64;
    let d = basis.len() as i64;
    let q = spec.q_param();
    let hypothesis = 2 * d + 3 <= n;
    let mut report = BoundReport::new("order", Some(spec.to_string()));
    let label = format!("d={d}");
    if spec.family == Family::SL {
        let m = (n - d) as u32;
        let sl = GroupSpec::new(Family::SL, m.max(1) as usize, q, spec.epsilon).map(|s| s.order());
        let sl = if m <= 1 { BigUint::one() } else { sl? };
        let exact = Pow::pow(big(q as u64), (d * (n - d)) as u64) * sl;
        report.push(
            BoundRow::new(format!("{label} exact"), log_q(&st.order, q), log_q(&exact, q), Verdict::from_bool(exact == st.order))
                .with_margin(0.0)
                .with_note(format!("|H|={}", st.order)),
        );
        let e2 = 2 * (spec.dim_d as i64 - d * n);
        report.push(power_row(&format!("{label} bound"), &st.order, &BigUint::one(), q, e2, true, hypothesis));
    } else {
        let rr = module_scale(spec);
        let e2 = 2 * spec.dim_d as i64 + rr * (-2 * d * n + d * (d + 1));
        report.push(power_row(&format!("{label} bound"), &st.order, &BigUint::one(), q, e2, false, hypothesis));
    }
    report.data = serde_json::json!({"order": st.order.to_string(), "orbit": st.orbit_len, "generators": st.generators.len()});
    Ok(report)
}

fn radical(form: &FormData, f: &FieldSpec) -> Vec<Vector> {
    rank_and_kernel(&form.gram.transpose(), f).1
}

fn in_span(basis: &[Vector], v: &[Fq], f: &FieldSpec) -> bool {
    let mut all = basis.to_vec();
    all.push(v.to_vec());
    span_dim(&all, f) == span_dim(basis, f)
}

/// `|Ω(v)| ≥ q^{k−2}` for the vectors of K outside the radical with the same
/// form value as v.
pub fn oracle_orbit1(form: &FormData, f: &FieldSpec, v: &[Fq]) -> Result<BoundReport> {
    let k = form.dim();
    let q = f.q();
    if (q as f64).powi(k as i32) > ORACLE_GUARD as f64 {
        return Err(Error::GuardExceeded(format!("q^k = {q}^{k} exceeds {ORACLE_GUARD}")));
    }
    let rad = radical(form, f);
    if rad.len() == k {
        return Err(Error::OutOfRange("the form is zero".into()));
    }
    if in_span(&rad, v, f) {
        return Err(Error::OutOfRange("v lies in the radical".into()));
    }
    let value = |u: &[Fq]| if form.qmat.is_some() { form.quad(u, f) } else { form.bilinear(u, u, f) };
    let target = value(v);
    let count = all_vectors(k, f).iter().filter(|u| !in_span(&rad, u, f) && value(u) == target).count() as u64;
    let mut report = BoundReport::new("orbit1", None);
    report.push(power_row_lower(&format!("k={k} radical={}", rad.len()), &big(count), &BigUint::one(), q, 2 * (k as i64 - 2), true));
    Ok(report)
}

/// `|v^H|` for the pointwise stabilizer H of U, plus the orbit1 count on V.
pub fn oracle_orbits(spec: &GroupSpec, basis: &[Vector], v: &[Fq]) -> Result<BoundReport> {
    let f = spec.field();
    let d = basis.len();
    let n = spec.n;
    if in_span(basis, v, f) {
        return Err(Error::OutOfRange("v lies in U".into()));
    }
    let st = pointwise_stabilizer(spec, basis)?;
    let orbit = tuple_orbit(&st.generators, &[v.to_vec()], f, false)?;
    let len = big(orbit.len() as u64);
    let qm = spec.q_module();
    let hypothesis = 2 * d + 3 <= n;
    let mut report = BoundReport::new("orbit2", Some(spec.to_string()));
    if spec.family == Family::SL {
        let expect = Pow::pow(big(qm as u64), n as u64) - Pow::pow(big(qm as u64), d as u64);
        let ok = len == expect;
        report.push(
            BoundRow::new(format!("d={d} |v^H|"), orbit.len() as f64, expect.to_f64().unwrap(), soft(ok, hypothesis || d + 2 <= n))
                .with_margin(0.0),
        );
    } else {
        let e2 = 2 * (n as i64 - d as i64 - 2);
        report.push(power_row_lower(&format!("d={d} |v^H|"), &len, &BigUint::one(), qm, e2, hypothesis));
        if !in_span(&radical(&spec.form, f), v, f) {
            if let Ok(o1) = oracle_orbit1(&spec.form, f, v) {
                for mut row in o1.rows {
                    row.label = format!("orbit1 {}", row.label);
                    report.push(row);
                }
            }
        }
    }
    Ok(report)
}

/// `#{x : x⁻¹gx(w_i) = v_i}` against the transitivity bound.
pub fn oracle_trans(spec: &GroupSpec, group: Option<&EnumeratedGroup>, g: &MatrixFq, v: &[Vector], w: &[Vector]) -> Result<BoundReport> {
    let f = spec.field();
    let n = spec.n;
    let k = v.len();
    if w.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: w.len() });
    }
    check_independent(v, n, f, "v")?;
    check_independent(w, n, f, "w")?;
    let mut both = v.to_vec();
    both.extend_from_slice(w);
    let r = span_dim(&both, f) - k;
    let s = support(g, f).supp;
    let m = (n - s).max(1);
    let count = match group {
        Some(grp) if grp.order() <= SCAN_LIMIT => {
            let c = grp
                .elements()
                .filter(|x| (0..k).all(|i| g.apply(&x.apply(&w[i], f), f) == x.apply(&v[i], f)))
                .count();
            big(c as u64)
        }
        _ => {
            // x ↦ (x·w, x·v): count orbit points (a, b) with g·a = b, times the stabilizer order
            let mut base = w.to_vec();
            base.extend_from_slice(v);
            let orbit = tuple_orbit(&spec.generators()?, &base, f, false)?;
            let good = (0..orbit.len())
                .filter(|&i| {
                    let p = orbit.point(i);
                    (0..k).all(|j| g.apply(&p[j], f) == p[k + j])
                })
                .count();
            if k == 0 {
                spec.order()
            } else {
                spec.order() / big(orbit.len() as u64) * big(good as u64)
            }
        }
    };
    let q = spec.q_param();
    let (nn, kk, rr_, mm) = (n as i64, k as i64, r as i64, m as i64);
    let hypothesis = n >= 5 && m < n && k >= 1 && 4 * k < n;
    let label = format!("supp={s} k={k} r={r} m={m}");
    let row = if spec.family == Family::SL {
        let e2 = 2 * (nn * nn - kk * (nn - mm) - rr_ * mm);
        power_row(&label, &count, &Pow::pow(big(2), r as u64), q, e2, false, hypothesis)
    } else {
        let sc = module_scale(spec);
        let e2 = 2 * spec.dim_d as i64 + sc * (-2 * kk * (nn - mm) + 2 * rr_ * (kk - mm + 1) + kk * (kk + 1));
        power_row(&label, &count, &BigUint::one(), q, e2, false, hypothesis)
    };
    let mut report = BoundReport::new("trans", Some(spec.to_string()));
    report.push(row);
    Ok(report)
}

/// Pairs `(x₁, x₂)` with `P(g^{x₂}g^{x₁})u_i = 0`, counted through the class of g.
pub fn oracle_tuples(g: &EnumeratedGroup, x: usize, p: &PolyFq, u: &[Vector]) -> Result<BoundReport> {
    let f = g.field();
    let n = g.spec.n;
    check_independent(u, n, f, "u")?;
    if p.is_zero() || p.lead() != Fq::ONE {
        return Err(Error::OutOfRange("P must be monic".into()));
    }
    let class = g.class_of(x);
    let members = g.class_members(class);
    let size = members.len() as u64;
    if size * size > ORACLE_GUARD {
        return Err(Error::GuardExceeded(format!("class of size {size} gives too many pairs")));
    }
    let mut pairs = 0u64;
    for &c1 in members {
        for &c2 in members {
            let h = g.element(c2 as usize).mul(g.element(c1 as usize), f);
            let ph = eval_poly_at_matrix(p, &h, f);
            if u.iter().all(|ui| ph.apply(ui, f).iter().all(|c| c.is_zero())) {
                pairs += 1;
            }
        }
    }
    let cent = big(g.class(class).centralizer_order);
    let count = big(pairs) * &cent * &cent;
    let b = 2i64;
    let a = u.len() as i64;
    let d = p.degree() as i64 + 1;
    let k = a * d;
    let nn = n as i64;
    let s = g.class(class).support as i64;
    let m = (nn - s).max(1);
    let hypothesis = n >= 5 && 4 * k < nn && m < nn && b * (nn - m) >= nn;
    let q = g.spec.q_param();
    let label = format!("b=2 a={a} d={d} supp={s}");
    let row = if g.spec.family == Family::SL {
        let e2 = 2 * (b * nn * nn + (b - 1) * k * k + 2 * b * k - a * nn + 1);
        power_row(&label, &count, &BigUint::one(), q, e2, false, hypothesis)
    } else {
        let sc = module_scale(&g.spec);
        let e2 = 2 * b * g.spec.dim_d as i64 + sc * ((5 * b - 2) * k * k + 7 * b * k - 2 * a * nn);
        power_row(&label, &count, &BigUint::one(), q, e2, false, hypothesis)
    };
    let mut report = BoundReport::new("tuples", Some(g.spec.to_string()));
    report.push(row);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matspace::unit_vector;

    fn f(q: u32) -> FieldSpec {
        FieldSpec::from_order(q).unwrap()
    }

    /// Σ over r-subsets S of ∏ (q^n − q^{dim}) for s ∈ S and q^{dim} otherwise.
    fn closed_form(q: u64, n: u32, k: usize, r: usize) -> u64 {
        let mut total = 0;
        for mask in 0u32..(1 << k) {
            if mask.count_ones() as usize != r {
                continue;
            }
            let mut dim = k as u32;
            let mut prod = 1u64;
            for i in 0..k {
                if mask >> i & 1 == 1 {
                    prod *= q.pow(n) - q.pow(dim);
                    dim += 1;
                } else {
                    prod *= q.pow(dim);
                }
            }
            total += prod;
        }
        total
    }

    #[test]
    fn count_v_examples() {
        let f2 = f(2);
        let r = oracle_count_v(&f2, 2, 1, 1, &[unit_vector(2, 0)]).unwrap();
        assert_eq!(r.rows[0].measured, 2.0);
        assert_eq!(r.rows[0].bound, 4.0);
        assert_eq!(r.verdict, Verdict::Pass);
        let r = oracle_count_v(&f2, 2, 1, 0, &[unit_vector(2, 0)]).unwrap();
        assert_eq!(r.rows[0].measured, 2.0);
        assert_eq!(r.verdict, Verdict::Advisory);
        let r = oracle_count_v(&f2, 3, 2, 0, &[unit_vector(3, 0), unit_vector(3, 1)]).unwrap();
        assert_eq!(r.rows[0].measured, 16.0);
        assert_eq!(r.rows[0].bound, 16.0);
        assert!(oracle_count_v(&f(3), 20, 1, 0, &[unit_vector(20, 0)]).is_err());
    }

    #[test]
    fn count_v_matches_closed_form() {
        for (q, n, k) in [(2u32, 3usize, 2usize), (3, 2, 2), (2, 4, 2), (4, 2, 2), (2, 2, 3)] {
            let fq = f(q);
            let ws: Vec<Vector> = (0..k.min(n)).map(|i| unit_vector(n, i)).collect();
            if ws.len() < k {
                continue;
            }
            for r in 0..=k.min(n - k) {
                let rep = oracle_count_v(&fq, n, k, r, &ws).unwrap();
                assert_eq!(rep.rows[0].measured as u64, closed_form(q as u64, n as u32, k, r), "q={q} n={n} k={k} r={r}");
                assert!(rep.passed());
            }
        }
    }

    fn spec(s: &str) -> GroupSpec {
        GroupSpec::parse(s).unwrap()
    }

    #[test]
    fn stabilizer_matches_filtering() {
        for s in ["SL(3,2)", "Sp(4,2)", "SU(3,2)", "O-(4,3)"] {
            let sp = spec(s);
            let g = EnumeratedGroup::enumerate(&sp).unwrap();
            let fq = sp.field();
            let u = vec![unit_vector(sp.n, 0)];
            let st = pointwise_stabilizer(&sp, &u).unwrap();
            let direct = g.elements().filter(|x| x.apply(&u[0], fq) == u[0]).count();
            assert_eq!(st.order, big(direct as u64), "{s}");
            for h in &st.generators {
                assert_eq!(h.apply(&u[0], fq), u[0]);
                assert!(g.index_of(h).is_some());
            }
        }
    }

    #[test]
    fn sl52_stabilizer_and_orbit() {
        let sp = spec("SL(5,2)");
        let u = vec![unit_vector(5, 0)];
        let r = oracle_pointwise_stabilizer(&sp, &u).unwrap();
        assert_eq!(r.data["order"], "322560");
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.rows[1].bound > r.rows[1].measured && (r.rows[1].bound - 19.0).abs() < 1e-9);
        let o = oracle_orbits(&sp, &u, &unit_vector(5, 4)).unwrap();
        assert_eq!(o.rows[0].measured, 30.0);
        assert_eq!(o.verdict, Verdict::Pass);
        let all = oracle_pointwise_stabilizer(&sp, &[]).unwrap();
        assert_eq!(all.data["order"], sp.order().to_string());
    }

    #[test]
    fn sp43_orbits() {
        let sp = spec("Sp(4,3)");
        let r = oracle_pointwise_stabilizer(&sp, &[unit_vector(4, 0)]).unwrap();
        // orbit of a nonzero vector has length 80
        assert_eq!(r.data["orbit"], 80);
        assert!(r.rows[0].measured <= r.rows[0].bound);
        let o = oracle_orbits(&sp, &[], &unit_vector(4, 0)).unwrap();
        assert!(o.rows[0].note.as_deref().unwrap().starts_with("count=80"));
        let orbit1 = o.rows.iter().find(|r| r.label.starts_with("orbit1")).unwrap();
        assert!(orbit1.note.as_deref().unwrap().starts_with("count=80"));
        assert_eq!(o.verdict, Verdict::Pass);
    }

    #[test]
    fn orbit1_degenerate_subspace() {
        let sp = spec("Sp(4,3)");
        let fq = sp.field();
        // K = e_1^⊥ has a one-dimensional radical
        let perp = rank_and_kernel(&MatrixFq::from_rows(&[sp.form.gram.apply(&unit_vector(4, 0), fq)]), fq).1;
        let k = sp.form.restrict(&perp, fq);
        let rad = radical(&k, fq);
        assert_eq!(rad.len(), 1);
        let v = (0..3).map(|i| unit_vector(3, i)).find(|v| !in_span(&rad, v, fq)).unwrap();
        let r = oracle_orbit1(&k, fq, &v).unwrap();
        // every u outside the radical: 27 − 3
        assert!(r.rows[0].note.as_deref().unwrap().starts_with("count=24"));
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn trans_scan_matches_tuple_count() {
        for s in ["Sp(4,2)", "SL(3,3)", "O-(4,3)"] {
            let sp = spec(s);
            let g = EnumeratedGroup::enumerate(&sp).unwrap();
            let fq = sp.field();
            for c in g.classes().iter().filter(|c| c.support > 0).take(4) {
                let x = g.element(c.representative);
                for (v, w) in [(unit_vector(sp.n, 0), unit_vector(sp.n, 0)), (unit_vector(sp.n, 1), unit_vector(sp.n, 0))] {
                    let a = oracle_trans(&sp, Some(&g), x, std::slice::from_ref(&v), std::slice::from_ref(&w)).unwrap();
                    let b = oracle_trans(&sp, None, x, &[v], &[w]).unwrap();
                    assert_eq!(a.rows[0].note, b.rows[0].note, "{s}");
                }
            }
            let _ = fq;
        }
    }

    #[test]
    fn trans_empty_tuple_is_whole_group() {
        let sp = spec("SL(3,2)");
        let g = EnumeratedGroup::enumerate(&sp).unwrap();
        let r = oracle_trans(&sp, Some(&g), g.element(1), &[], &[]).unwrap();
        assert!(r.rows[0].note.as_deref().unwrap().starts_with("count=168"));
    }

    #[test]
    fn sl52_transvection_trans_bound() {
        let sp = spec("SL(5,2)");
        let fq = sp.field();
        let t = sp.transvection(&unit_vector(5, 0), Fq::ONE);
        let w = unit_vector(5, 1);
        let v = t.apply(&w, fq);
        let r = oracle_trans(&sp, None, &t, &[v], &[w]).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn tuples_small() {
        let sp = spec("Sp(4,2)");
        let g = EnumeratedGroup::enumerate(&sp).unwrap();
        let x = g.classes().iter().find(|c| c.support == 1).unwrap().representative;
        let p = PolyFq::new(vec![Fq::ONE, Fq::ONE]);
        let r = oracle_tuples(&g, x, &p, &[unit_vector(4, 0)]).unwrap();
        assert_eq!(r.verdict, Verdict::Advisory);
        assert!(r.rows[0].measured <= r.rows[0].bound);
    }
}
