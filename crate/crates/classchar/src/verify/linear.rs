//! Centralizer-dimension checks on GL(V): the matrix-centralizer lemma, the
//! kernel-dimension lemma and the two ways of counting dim C(u).

use num_bigint::BigUint;
use num_traits::{One, Pow, ToPrimitive};

use crate::element::{centralizer_dim_formula, dim_centralizer_end, jordan_decompose, jordan_type, two_ways, CentFamily, JordanType};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Fq};
use crate::forms::Family;
use crate::grp::EnumeratedGroup;
use crate::matspace::{eval_poly_at_matrix, MatrixFq, PolyFq};
use crate::report::{BoundReport, BoundRow, Verdict};

/// `|C_GL(g)|` from the elementary divisors: per irreducible factor of degree e
/// with block partition λ, `Q^{Σ λ'_i² − Σ m_i(m_i+1)/2} ∏_i ∏_{j ≤ m_i} (Q^j − 1)`
/// where `Q = q^e` and `m_i` counts blocks of size i.
pub fn gl_centralizer_order(jt: &JordanType, q: u32) -> BigUint {
    let mut out = BigUint::one();
    for (fac, part) in &jt.blocks {
        let qf = Pow::pow(BigUint::from(q), fac.degree() as u32);
        let counts = &part.counts;
        // λ'_i = number of blocks of size ≥ i
        let mut conj_sq = 0u64;
        let mut tail = 0u64;
        for &m in counts.iter().rev() {
            tail += m as u64;
            conj_sq += tail * tail;
        }
        let tri: u64 = counts.iter().map(|&m| (m * (m + 1) / 2) as u64).sum();
        out *= Pow::pow(&qf, (conj_sq - tri) as u32);
        for &m in counts {
            for j in 1..=m as u32 {
                out *= Pow::pow(&qf, j) - 1u32;
            }
        }
    }
    out
}

fn monic_polys(degree: usize, f: &FieldSpec) -> Vec<PolyFq> {
    let q = f.q() as usize;
    (0..q.pow(degree as u32))
        .map(|mut idx| {
            let mut c = Vec::with_capacity(degree + 1);
            for _ in 0..degree {
                c.push(Fq((idx % q) as u16));
                idx /= q;
            }
            c.push(Fq::ONE);
            PolyFq::new(c)
        })
        .collect()
}

/// `max dim Ker P(g)` over monic P with `1 ≤ deg P < d`, and a maximiser.
pub fn max_kernel_dim(g: &MatrixFq, d: usize, f: &FieldSpec) -> (usize, Option<PolyFq>) {
    let n = g.n();
    let mut best = (0, None);
    for deg in 1..d {
        for p in monic_polys(deg, f) {
            let k = n - eval_poly_at_matrix(&p, g, f).rank(f);
            if k > best.0 {
                best = (k, Some(p));
            }
        }
    }
    best
}

/// For ε = num/den on a grid: if every `dim Ker P(g) ≤ εn` with `deg P < ⌈1/ε⌉`
/// then `|C_GL(g)| ≤ q^{n²ε}`, decided by integer powers.
pub fn alpha_eps_check(g: &EnumeratedGroup, grid: &[(u32, u32)]) -> Result<BoundReport> {
    let f = g.field();
    let q = f.q();
    let n = g.spec.n as u32;
    let mut report = BoundReport::new("alpha-eps", Some(g.spec.to_string()));
    for &(num, den) in grid {
        let d = den.div_ceil(num) as usize;
        if (q as f64).powi(d as i32) > 1e5 {
            report.note(format!("ε={num}/{den}: polynomial enumeration skipped"));
            continue;
        }
        for c in g.classes() {
            let x = g.element(c.representative);
            let (kmax, _) = max_kernel_dim(x, d, f);
            let hypothesis = (kmax as u32) * den <= num * n;
            let cent = gl_centralizer_order(&jordan_type(x, f), q);
            // |C|^den ≤ q^{n² num}
            let ok = Pow::pow(&cent, den) <= Pow::pow(BigUint::from(q), n * n * num);
            let measured = cent.to_f64().unwrap().ln() / (q as f64).ln();
            let bound = (n * n) as f64 * num as f64 / den as f64;
            let verdict = if hypothesis { Verdict::from_bool(ok) } else { Verdict::Advisory };
            report.push(
                BoundRow::new(format!("eps {num}/{den} class {}", c.id), measured, bound, verdict)
                    .with_note(format!("max dim Ker P = {kmax}")),
            );
        }
    }
    Ok(report)
}

/// For ν = num/den on a grid with α = 1 − ν²/4: if `dim C_End(g) ≥ αn²` then
/// `|C_SL(g)| > |SL|^{1−ν}`.
pub fn matrix_cent_check(g: &EnumeratedGroup, grid: &[(u32, u32)]) -> Result<BoundReport> {
    if g.spec.family != Family::SL {
        return Err(Error::UnsupportedFamily(format!("{} is not a special linear group", g.spec)));
    }
    let f = g.field();
    let n = g.spec.n as u64;
    let order = BigUint::from(g.order());
    let mut report = BoundReport::new("matrix-cent", Some(g.spec.to_string()));
    for &(num, den) in grid {
        let (num, den) = (num as u64, den as u64);
        for c in g.classes() {
            let dim = dim_centralizer_end(g.element(c.representative), f) as u64;
            // dim ≥ (1 − ν²/4)n²  ⇔  4·den²·dim ≥ (4den² − num²)n²
            let hypothesis = 4 * den * den * dim >= (4 * den * den - num * num) * n * n;
            let cent = BigUint::from(c.centralizer_order);
            // |C| > |G|^{1−ν}  ⇔  |C|^den > |G|^{den−num}
            let ok = Pow::pow(&cent, den as u32) > Pow::pow(&order, (den - num) as u32);
            let measured = (c.centralizer_order as f64).ln() / (g.order() as f64).ln();
            let bound = 1.0 - num as f64 / den as f64;
            let verdict = if hypothesis { Verdict::from_bool(ok) } else { Verdict::Advisory };
            report.push(
                BoundRow::new(format!("nu {num}/{den} class {}", c.id), measured, bound, verdict)
                    .with_margin(measured - bound)
                    .with_note(format!("dim C_End = {dim}")),
            );
        }
    }
    Ok(report)
}

/// For each class: the two expressions for dim C(u) agree on the unipotent
/// part, and for SL the GL formula equals the computed dim C_End(u).
pub fn two_ways_check(g: &EnumeratedGroup) -> BoundReport {
    let f = g.field();
    let mut report = BoundReport::new("2ways", Some(g.spec.to_string()));
    for c in g.classes() {
        let (_, u, jt) = jordan_decompose(g.element(c.representative), f);
        let (lhs, rhs) = two_ways(&jt.unipotent);
        report.push(BoundRow::new(format!("class {} identity", c.id), lhs as f64, rhs as f64, Verdict::from_bool(lhs == rhs)).with_margin(0.0));
        if let Ok(formula) = centralizer_dim_formula(&jt.unipotent, CentFamily::GL, f.p() == 2) {
            let dim = dim_centralizer_end(&u, f) as i64;
            report.push(
                BoundRow::new(format!("class {} dim C_End(u)", c.id), dim as f64, formula.lo() as f64, Verdict::from_bool(dim == formula.lo()))
                    .with_margin(0.0),
            );
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::GroupSpec;

    fn group(s: &str) -> EnumeratedGroup {
        EnumeratedGroup::enumerate(&GroupSpec::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn centralizer_orders_match_gl_enumeration() {
        // SL(n,2) = GL(n,2)
        for s in ["SL(2,2)", "SL(3,2)"] {
            let g = group(s);
            for c in g.classes() {
                let jt = jordan_type(g.element(c.representative), g.field());
                assert_eq!(gl_centralizer_order(&jt, 2), BigUint::from(c.centralizer_order), "{s} class {}", c.id);
            }
        }
    }

    #[test]
    fn centralizer_order_of_identity_is_gl_order() {
        let g = group("SL(2,3)");
        let jt = jordan_type(g.element(g.identity()), g.field());
        assert_eq!(gl_centralizer_order(&jt, 3), BigUint::from(48u32));
        // |C_GL| / |C_SL| divides q − 1
        for c in g.classes() {
            let jt = jordan_type(g.element(c.representative), g.field());
            let gl = gl_centralizer_order(&jt, 3).to_u64().unwrap();
            assert!(gl.is_multiple_of(c.centralizer_order) && gl / c.centralizer_order <= 2);
        }
    }

    #[test]
    fn lemma_checks_on_sl() {
        let g = group("SL(3,3)");
        let grid = [(1, 2), (1, 3), (1, 4), (1, 10)];
        let a = alpha_eps_check(&g, &grid).unwrap();
        assert!(a.passed());
        assert!(a.rows.iter().any(|r| r.verdict == Verdict::Pass));
        let nus: Vec<(u32, u32)> = (1..10).map(|i| (i, 10)).collect();
        let m = matrix_cent_check(&g, &nus).unwrap();
        assert!(m.passed());
        assert!(matrix_cent_check(&group("Sp(4,2)"), &nus).is_err());
        assert!(two_ways_check(&g).passed());
        assert!(two_ways_check(&group("Sp(4,3)")).passed());
    }

    #[test]
    fn kernel_dim_of_scalar() {
        let f = FieldSpec::from_order(3).unwrap();
        let m = MatrixFq::diagonal(&[Fq(2), Fq(2), Fq(2)]);
        let (k, p) = max_kernel_dim(&m, 2, &f);
        assert_eq!(k, 3);
        assert_eq!(p.unwrap().eval(Fq(2), &f), Fq::ZERO);
    }
}
