//! Element invariants: support, Jordan data, centralizer dimensions and the
//! class-size/support sandwich.

use num_bigint::BigUint;
use num_traits::{Pow, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::forms::{Family, GroupSpec};
use crate::grp::EnumeratedGroup;
use crate::matspace::{eval_poly_at_matrix, factor_squarefree_irreducible, MatrixFq, PolyFq};
use crate::report::{BoundReport, BoundRow, Verdict};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenBlock {
    pub factor: PolyFq,
    pub algebraic: usize,
    /// Dimension of each eigenspace over the closure for a root of `factor`.
    pub geometric: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportProfile {
    pub n: usize,
    pub eigen_blocks: Vec<EigenBlock>,
    pub supp: usize,
}

/// Codimension of the largest eigenspace of `g` over the algebraic closure.
pub fn support(g: &MatrixFq, f: &FieldSpec) -> SupportProfile {
    let n = g.n();
    let cp = g.char_poly(f);
    let factors = factor_squarefree_irreducible(&cp, f).expect("characteristic polynomial is nonzero");
    let mut blocks = Vec::with_capacity(factors.len());
    for (fac, alg) in factors {
        let d = fac.degree() as usize;
        let ker = n - eval_poly_at_matrix(&fac, g, f).rank(f);
        blocks.push(EigenBlock { factor: fac, algebraic: alg, geometric: ker / d });
    }
    let best = blocks.iter().map(|b| b.geometric).max().unwrap_or(0);
    SupportProfile { n, eigen_blocks: blocks, supp: n - best }
}

/// Jordan block counts: `counts[i-1]` is the number n_i of blocks of size i.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    pub counts: Vec<usize>,
}

impl Partition {
    pub fn from_counts(mut counts: Vec<usize>) -> Partition {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        Partition { counts }
    }

    /// From parts in any order.
    pub fn from_parts(parts: &[usize]) -> Partition {
        let mut counts = vec![0; parts.iter().copied().max().unwrap_or(0)];
        for &p in parts.iter().filter(|&&p| p > 0) {
            counts[p - 1] += 1;
        }
        Partition::from_counts(counts)
    }

    /// From the kernel ladder `r_j = dim ker (g − λ)^j / deg` for j = 0, 1, ….
    pub fn from_ladder(r: &[usize]) -> Partition {
        let top = r.len().saturating_sub(1);
        // number of blocks of size ≥ j
        let ge = |j: usize| if j <= top { r[j] - r[j - 1] } else { 0 };
        let counts = (1..=top).map(|i| ge(i) - ge(i + 1)).collect();
        Partition::from_counts(counts)
    }

    pub fn n(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.counts.get(i - 1).copied().unwrap_or(0)
        }
    }

    pub fn size(&self) -> usize {
        self.counts.iter().enumerate().map(|(k, &c)| (k + 1) * c).sum()
    }

    pub fn num_blocks(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Parts m_1 ≥ m_2 ≥ ….
    pub fn parts(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for i in (1..=self.counts.len()).rev() {
            out.extend(std::iter::repeat_n(i, self.n(i)));
        }
        out
    }

    fn sizes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| (k + 1, c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanType {
    /// Block structure of the unipotent part at eigenvalue 1.
    pub unipotent: Partition,
    /// Per irreducible factor of the characteristic polynomial.
    pub blocks: Vec<(PolyFq, Partition)>,
}

fn ladder(a: &MatrixFq, deg: usize, f: &FieldSpec) -> Vec<usize> {
    let n = a.n();
    let mut r = vec![0usize];
    let mut p = MatrixFq::identity(n);
    loop {
        p = p.mul(a, f);
        let k = (n - p.rank(f)) / deg;
        if k == *r.last().unwrap() {
            break;
        }
        r.push(k);
    }
    r
}

pub fn jordan_type(g: &MatrixFq, f: &FieldSpec) -> JordanType {
    let n = g.n();
    let cp = g.char_poly(f);
    let mut blocks = Vec::new();
    let mut unipotent = Partition::default();
    for (fac, _) in factor_squarefree_irreducible(&cp, f).expect("nonzero") {
        let d = fac.degree() as usize;
        let part = Partition::from_ladder(&ladder(&eval_poly_at_matrix(&fac, g, f), d, f));
        blocks.push((fac, part));
    }
    // unipotent part: blocks of g on each generalized eigenspace, pooled
    let mut pooled: Vec<usize> = Vec::new();
    for (fac, part) in &blocks {
        let d = fac.degree() as usize;
        for m in part.parts() {
            pooled.extend(std::iter::repeat_n(m, d));
        }
    }
    if !pooled.is_empty() {
        unipotent = Partition::from_parts(&pooled);
    }
    debug_assert_eq!(unipotent.size(), n);
    JordanType { unipotent, blocks }
}

/// Order of an invertible matrix by repeated multiplication.
pub fn matrix_order(g: &MatrixFq, f: &FieldSpec) -> u64 {
    let mut acc = g.clone();
    let mut k = 1;
    while !acc.is_identity() {
        acc = acc.mul(g, f);
        k += 1;
    }
    k
}

/// `g = g_ss·u` with `g_ss` of p′-order and `u` unipotent, both powers of `g`.
pub fn jordan_decompose(g: &MatrixFq, f: &FieldSpec) -> (MatrixFq, MatrixFq, JordanType) {
    let order = matrix_order(g, f);
    let p = f.p() as u64;
    let mut pk = 1u64;
    let mut m = order;
    while m.is_multiple_of(p) {
        m /= p;
        pk *= p;
    }
    let n = g.n();
    let gss = if m == 1 {
        MatrixFq::identity(n)
    } else {
        let a = mod_inverse(pk % m, m);
        g.pow(a * pk % order, f)
    };
    let u = if pk == 1 {
        MatrixFq::identity(n)
    } else {
        let b = mod_inverse(m % pk, pk);
        g.pow(b * m % order, f)
    };
    let jt = jordan_type(&u, f);
    (gss, u, jt)
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut t, mut new_t, mut r, mut new_r) = (0i128, 1i128, m as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "not invertible");
    t.rem_euclid(m as i128) as u64
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CentFamily {
    GL,
    Sp,
    GO,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CentralizerDim {
    Exact(i64),
    /// Even characteristic with even-size blocks: the exact value depends on
    /// the W/V block decomposition, so only the window is returned.
    Window { lo: i64, hi: i64 },
}

impl CentralizerDim {
    pub fn lo(self) -> i64 {
        match self {
            CentralizerDim::Exact(d) => d,
            CentralizerDim::Window { lo, .. } => lo,
        }
    }

    pub fn hi(self) -> i64 {
        match self {
            CentralizerDim::Exact(d) => d,
            CentralizerDim::Window { hi, .. } => hi,
        }
    }
}

/// Dimension of the centralizer of a unipotent element with the given Jordan
/// blocks in GL, Sp or GO.
pub fn centralizer_dim_formula(p: &Partition, family: CentFamily, even_q: bool) -> Result<CentralizerDim> {
    let sizes: Vec<(usize, usize)> = p.sizes().collect();
    let mut quad = 0i64;
    for (a, &(i, ni)) in sizes.iter().enumerate() {
        quad += (i * ni * ni) as i64;
        for &(j, nj) in &sizes[a + 1..] {
            quad += 2 * (i.min(j) * ni * nj) as i64;
        }
    }
    if family == CentFamily::GL {
        return Ok(CentralizerDim::Exact(quad));
    }
    let parity_bad = sizes.iter().any(|&(i, c)| match family {
        CentFamily::Sp => i % 2 == 1 && c % 2 == 1,
        _ => !even_q && i % 2 == 0 && c % 2 == 1,
    });
    if parity_bad {
        return Err(Error::OutOfRange(format!("partition {:?} does not occur in {family:?}", p.parts())));
    }
    let odd_blocks: i64 = sizes.iter().filter(|(i, _)| i % 2 == 1).map(|&(_, c)| c as i64).sum();
    let twice = match family {
        CentFamily::Sp => quad + odd_blocks,
        _ => quad - odd_blocks,
    };
    if twice % 2 != 0 {
        return Err(Error::OutOfRange(format!("partition {:?} does not occur in {family:?}", p.parts())));
    }
    let d = twice / 2;
    let even_blocks: i64 = sizes.iter().filter(|(i, _)| i % 2 == 0).map(|&(_, c)| c as i64).sum();
    if !even_q || even_blocks == 0 {
        return Ok(CentralizerDim::Exact(d));
    }
    Ok(match family {
        CentFamily::Sp => CentralizerDim::Window { lo: d, hi: d + even_blocks },
        _ => CentralizerDim::Window { lo: d - even_blocks, hi: d },
    })
}

/// Both sides of `Σ i n_i² + 2Σ_{i<j} i n_i n_j = Σ_k (2k−1) m_k`.
pub fn two_ways(p: &Partition) -> (u64, u64) {
    let sizes: Vec<(usize, usize)> = p.sizes().collect();
    let mut lhs = 0u64;
    for (a, &(i, ni)) in sizes.iter().enumerate() {
        lhs += (i * ni * ni) as u64;
        for &(_, nj) in &sizes[a + 1..] {
            lhs += 2 * (i * ni * nj) as u64;
        }
    }
    let rhs = p.parts().iter().enumerate().map(|(k, &m)| ((2 * (k + 1) - 1) * m) as u64).sum();
    (lhs, rhs)
}

/// dim of `{X : gX = Xg}` over GF(q).
pub fn dim_centralizer_end(g: &MatrixFq, f: &FieldSpec) -> usize {
    let n = g.n();
    let n2 = n * n;
    // coordinate (i, j) of X at index i*n + j; (gX − Xg)_{ij} = Σ_k g_ik X_kj − X_ik g_kj
    let mut m = MatrixFq::zero(n2, n2);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                let a = k * n + j;
                m.set(row, a, f.add(m.get(row, a), g.get(i, k)));
                let b = i * n + k;
                m.set(row, b, f.sub(m.get(row, b), g.get(k, j)));
            }
        }
    }
    n2 - m.rank(f)
}

/// Is `base^(num/den) ≤ value`, decided exactly.
pub fn pow_frac_le(base: &BigUint, num: u64, den: u64, value: &BigUint) -> bool {
    Pow::pow(base, num) <= Pow::pow(value, den)
}

/// Is `value ≤ base^(num/den)`, decided exactly.
pub fn le_pow_frac(value: &BigUint, base: &BigUint, num: u64, den: u64) -> bool {
    Pow::pow(value, den) <= Pow::pow(base, num)
}

/// Exponent window `[lo_num/(lo_den·n)·s, hi_num/n·s]` for a family, with
/// whether the hypothesis of the statement holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SandwichRule {
    pub name: String,
    /// Lower exponent is s/(lower_den·n).
    pub lower_den: u64,
    /// Upper exponent is upper_num·s/n, as a fraction upper_num/upper_den.
    pub upper_num: u64,
    pub upper_den: u64,
    pub hypothesis: bool,
}

pub fn sandwich_rules(spec: &GroupSpec) -> Vec<SandwichRule> {
    let n = spec.n;
    let q0 = spec.q_param();
    let odd = spec.field().p() != 2;
    let rule = |name: &str, lower_den, upper_num, upper_den, hypothesis| SandwichRule {
        name: name.to_string(),
        lower_den,
        upper_num,
        upper_den,
        hypothesis,
    };
    let mut out = Vec::new();
    let cor_hyp = match spec.family {
        Family::SL => n >= 2,
        Family::SU => n >= 3 && (n, q0) != (3, 2),
        Family::Sp => n >= 4,
        Family::SO | Family::Omega => n >= 7 && spec.family == Family::Omega || (odd && n >= 7),
    };
    match spec.family {
        Family::SL => {
            out.push(rule("gl-s", 3, 3, 1, n >= 2));
            out.push(rule("gl-s-sharp", 2, 5, 2, n >= 2 && !(n == 2 && q0 <= 3)));
        }
        Family::SU => out.push(rule("gu-s", 2, 3, 1, n >= 3 && (n, q0) != (3, 2))),
        Family::Sp if odd => out.push(rule("bcd-odd", 2, 3, 1, n >= 4)),
        Family::Sp => out.push(rule("bcd-even", 3, 3, 1, n >= 4)),
        Family::SO | Family::Omega if odd => out.push(rule("bcd-odd", 3, 3, 1, n >= 7)),
        Family::SO | Family::Omega => out.push(rule("bcd-even", 3, 5, 1, n >= 8)),
    }
    out.push(rule("supp-size", 3, 5, 1, cor_hyp));
    out
}

/// `|G|^{s/(a n)} ≤ |g^G| ≤ |G|^{b s/n}` per family, decided by integer powers.
pub fn check_sandwich(g: &EnumeratedGroup, class: usize) -> BoundReport {
    let c = g.class(class);
    let n = g.spec.n as u64;
    let s = c.support as u64;
    let order = BigUint::from(g.order());
    let size = BigUint::from(c.size);
    let mut report = BoundReport::new("sandwich", Some(g.spec.to_string()));
    let lg = (g.order() as f64).ln();
    let measured = (c.size as f64).ln() / lg;
    for r in sandwich_rules(&g.spec) {
        let lower_ok = pow_frac_le(&order, s, r.lower_den * n, &size);
        let upper_ok = le_pow_frac(&size, &order, r.upper_num * s, r.upper_den * n);
        let soft = if r.hypothesis { Verdict::Pass } else { Verdict::Advisory };
        let verdict = |ok: bool| if ok { soft } else if r.hypothesis { Verdict::Fail } else { Verdict::Advisory };
        let lo = s as f64 / (r.lower_den * n) as f64;
        let hi = (r.upper_num * s) as f64 / (r.upper_den * n) as f64;
        report.push(
            BoundRow::new(format!("{} lower class {}", r.name, class), measured, lo, verdict(lower_ok))
                .with_margin(measured - lo)
                .with_note(format!("s={s} |g^G|={}", c.size)),
        );
        report.push(
            BoundRow::new(format!("{} upper class {}", r.name, class), measured, hi, verdict(upper_ok))
                .with_margin(hi - measured),
        );
    }
    report
}

/// Per-class CSV: id, size, centralizer, support, order, unipotent Jordan type, sandwich margins.
pub fn class_report_csv(g: &EnumeratedGroup) -> String {
    let mut out = String::from("class,size,centralizer,support,order,real,jordan,sandwich_lower_margin,sandwich_upper_margin\n");
    for c in g.classes() {
        let jt = jordan_type(g.element(c.representative), g.field());
        let rep = check_sandwich(g, c.id);
        let cor: Vec<_> = rep.rows.iter().filter(|r| r.label.starts_with("supp-size")).collect();
        let parts: Vec<String> = jt.unipotent.parts().iter().map(|p| p.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:.6},{:.6}\n",
            c.id,
            c.size,
            c.centralizer_order,
            c.support,
            c.order_of_rep,
            c.is_real,
            parts.join(" "),
            cor[0].margin,
            cor[1].margin
        ));
    }
    out
}

/// log_q of a positive integer.
pub fn log_q(x: u64, q: u32) -> f64 {
    (x.to_f64().unwrap()).ln() / (q as f64).ln()
}
