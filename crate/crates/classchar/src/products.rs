//! Class squares: Frobenius positivity, Thompson witnesses, the flip and
//! union constructions for block-diagonal elements, real covers, commutators
//! and power-word images.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::chars::{CharTable, Cyclotomic, LevelSum};
use crate::error::{Error, Result};
use crate::forms::{Epsilon, Family, GroupSpec};
use crate::grp::EnumeratedGroup;
use crate::matspace::{factor_squarefree_irreducible, MatrixFq};
use crate::report::{ser_rational_vec, BoundReport, BoundRow, Verdict};

fn check_table(g: &EnumeratedGroup, t: &CharTable) -> Result<()> {
    if g.num_classes() != t.num_classes() || g.order() != t.order {
        return Err(Error::Inconsistent(format!("table for {} does not match {}", t.group, g.spec)));
    }
    Ok(())
}

fn check_class(g: &EnumeratedGroup, c: usize) -> Result<()> {
    if c >= g.num_classes() {
        return Err(Error::OutOfRange(format!("class {c} not in a group with {} classes", g.num_classes())));
    }
    Ok(())
}

/// `Σ_χ χ(x)² χ̄(g_j)/χ(1)` for every class j, exactly.
pub fn frobenius_square_sums(t: &CharTable, x: usize) -> Result<Vec<BigRational>> {
    let k = t.num_chars();
    let r = t.num_classes();
    let l = (0..k).fold(1u64, |acc, i| acc.lcm(&t.degree(i)));
    let sq: Vec<Cyclotomic> = (0..k).map(|i| t.value(i, x).pow(2)).collect();
    let weights: Vec<BigInt> = (0..k).map(|i| BigInt::from(l / t.degree(i))).collect();
    (0..r)
        .into_par_iter()
        .map(|j| {
            let mut acc = LevelSum::default();
            for i in 0..k {
                acc.add(&(&sq[i] * &t.value(i, j).conj()), &weights[i]);
            }
            acc.finish_lcm()
                .to_rational()
                .map(|v| v / BigInt::from(l))
                .ok_or_else(|| Error::Inconsistent(format!("class square sum at class {j} is not rational")))
        })
        .collect()
}

/// Classes `z` with `z·g` central-translate images, i.e. the classes of `z·rep(c)`.
fn central_translates(g: &EnumeratedGroup, c: usize) -> Vec<usize> {
    let rep = g.class(c).representative;
    g.central_classes().into_iter().map(|z| g.class_of(g.mul(g.class(z).representative, rep))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub group: String,
    pub class: usize,
    /// Classes of `x^G·x^G`.
    pub covered: Vec<usize>,
    pub not_covered: Vec<usize>,
    /// A representative element index for each class in `not_covered`.
    pub witnesses: Vec<usize>,
    #[serde(serialize_with = "ser_rational_vec")]
    pub frobenius: Vec<BigRational>,
    pub structure_counts: Vec<u64>,
    /// The sign of each sum matches structure-constant membership, and
    /// `|G|·a_xx[j] = |x^G|²·F_j`.
    pub agrees: bool,
    pub full: bool,
    /// Every class has a central translate in the square.
    pub full_mod_center: bool,
    pub thompson_witness: Option<usize>,
}

impl CoverReport {
    pub fn to_bound_report(&self) -> BoundReport {
        let mut r = BoundReport::new("cover", Some(self.group.clone()));
        r.push(BoundRow::new("frobenius sign matches class products", 0.0, 0.0, Verdict::from_bool(self.agrees)));
        r.push(
            BoundRow::new("square is the whole group", self.covered.len() as f64, self.frobenius.len() as f64, Verdict::Observational)
                .with_note(if self.full { "full" } else if self.full_mod_center { "full modulo the center" } else { "not full" }),
        );
        r.data = serde_json::to_value(self).unwrap_or_default();
        r
    }
}

/// Which classes lie in `x^G·x^G`, decided by the sign of the Frobenius sum and
/// cross-checked against class multiplication coefficients.
pub fn class_square(g: &EnumeratedGroup, t: &CharTable, x: usize) -> Result<CoverReport> {
    check_table(g, t)?;
    check_class(g, x)?;
    let frobenius = frobenius_square_sums(t, x)?;
    let sc = g.structure_constants_table();
    let r = g.num_classes();
    let order = BigInt::from(g.order());
    let size_sq = BigInt::from(g.class(x).size).pow(2);
    let structure_counts: Vec<u64> = (0..r).map(|j| sc.get(x, x, j)).collect();
    let agrees = (0..r).all(|j| {
        let count = BigRational::from_integer(BigInt::from(structure_counts[j]) * &order);
        frobenius[j].is_positive() == (structure_counts[j] > 0) && count == &frobenius[j] * &size_sq
    });
    let (covered, not_covered): (Vec<usize>, Vec<usize>) = (0..r).partition(|&j| frobenius[j].is_positive());
    let in_square: HashSet<usize> = covered.iter().copied().collect();
    let full = not_covered.is_empty();
    let full_mod_center = (0..r).all(|j| central_translates(g, j).iter().any(|c| in_square.contains(c)));
    Ok(CoverReport {
        group: g.spec.to_string(),
        class: x,
        witnesses: not_covered.iter().map(|&j| g.class(j).representative).collect(),
        covered,
        not_covered,
        frobenius,
        structure_counts,
        agrees,
        full,
        full_mod_center,
        thompson_witness: full.then_some(x),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ThompsonEntry {
    pub class: usize,
    pub support: usize,
    pub full: bool,
    pub full_mod_center: bool,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThompsonReport {
    pub group: String,
    pub center_order: usize,
    /// Scan order: support descending, then class id.
    pub entries: Vec<ThompsonEntry>,
    pub witness: Option<usize>,
    pub witness_mod_center: Option<usize>,
    pub agrees_all: bool,
    pub vacuous: bool,
}

impl ThompsonReport {
    pub fn to_bound_report(&self) -> BoundReport {
        let mut r = BoundReport::new("thompson", Some(self.group.clone()));
        r.push(BoundRow::new("frobenius sign matches class products", 0.0, 0.0, Verdict::from_bool(self.agrees_all)));
        let found = |w: Option<usize>| w.map_or(f64::NAN, |c| c as f64);
        r.push(BoundRow::new("witness class", found(self.witness), 0.0, Verdict::Observational));
        r.push(BoundRow::new("witness class modulo the center", found(self.witness_mod_center), 0.0, Verdict::Observational));
        if self.vacuous {
            r.note("trivial group: every class square is the whole group");
        } else if self.witness_mod_center.is_none() {
            r.note("NoWitness: no class square covers the group, even modulo the center");
        }
        if self.center_order > 1 {
            r.note(format!("center of order {}: witnesses for the simple quotient use central translates", self.center_order));
        }
        r.data = serde_json::to_value(self).unwrap_or_default();
        r
    }
}

/// Scans every class, largest support first, for one whose square is the group.
pub fn thompson_search(g: &EnumeratedGroup, t: &CharTable) -> Result<ThompsonReport> {
    check_table(g, t)?;
    let mut order: Vec<usize> = (0..g.num_classes()).collect();
    order.sort_by_key(|&c| (std::cmp::Reverse(g.class(c).support), c));
    let mut entries = Vec::with_capacity(order.len());
    for c in order {
        let cover = class_square(g, t, c)?;
        entries.push(ThompsonEntry {
            class: c,
            support: g.class(c).support,
            full: cover.full,
            full_mod_center: cover.full_mod_center,
            agrees: cover.agrees,
        });
    }
    Ok(ThompsonReport {
        group: g.spec.to_string(),
        center_order: g.central_classes().len(),
        witness: entries.iter().find(|e| e.full).map(|e| e.class),
        witness_mod_center: entries.iter().find(|e| e.full_mod_center).map(|e| e.class),
        agrees_all: entries.iter().all(|e| e.agrees),
        vacuous: g.order() == 1,
        entries,
    })
}

/// `diag(m, I)` of size `n`.
pub fn embed(m: &MatrixFq, n: usize) -> MatrixFq {
    if m.n() >= n {
        return m.clone();
    }
    MatrixFq::direct_sum(m, &MatrixFq::identity(n - m.n()))
}

/// The `+`-type member of the ambient family in dimension `n`.
pub fn block_spec(ambient: &GroupSpec, n: usize) -> Result<GroupSpec> {
    let eps = match ambient.family {
        Family::Sp | Family::SU => Epsilon::None,
        Family::Omega => Epsilon::Plus,
        other => return Err(Error::UnsupportedFamily(format!("{other:?} has no flip decomposition"))),
    };
    if ambient.family == Family::Omega && ambient.epsilon != Epsilon::Plus {
        return Err(Error::UnsupportedFamily(format!("{ambient} is not of + type")));
    }
    GroupSpec::new(ambient.family, n, ambient.q_param(), eps)
}

fn forms_split(ambient: &GroupSpec, a: &GroupSpec, b: &GroupSpec) -> bool {
    let f = ambient.field();
    let gram = MatrixFq::direct_sum(&a.form.gram, &b.form.gram);
    let quad = match (&a.form.qmat, &b.form.qmat, &ambient.form.qmat) {
        (Some(x), Some(y), Some(z)) => MatrixFq::direct_sum(x, y) == *z,
        (None, None, None) => true,
        _ => false,
    };
    let _ = f;
    gram == ambient.form.gram && quad
}

/// The parity condition for the flip: Ω over odd q needs both halves of even rank.
pub fn flip_hypothesis(ambient: &GroupSpec, dim_x: usize, dim_y: usize) -> bool {
    let odd_omega = ambient.family == Family::Omega && ambient.field().p() != 2;
    dim_x.is_multiple_of(2) && dim_y.is_multiple_of(2) && (!odd_omega || (dim_x.is_multiple_of(4) && dim_y.is_multiple_of(4)))
}

#[derive(Clone, Debug, Serialize)]
pub struct FlipReport {
    pub group: String,
    pub dim_x: usize,
    pub dim_y: usize,
    pub hypothesis: bool,
    pub conjugate: bool,
}

impl FlipReport {
    /// True when the hypothesis holds and the flip is not a conjugation.
    pub fn contradicts(&self) -> bool {
        self.hypothesis && !self.conjugate
    }
}

/// Decides whether `diag(x,y)` and `diag(y,x)` are conjugate in the ambient
/// group. A violated parity hypothesis is reported, not raised.
pub fn flip_conjugacy_check(ambient: &EnumeratedGroup, x: &MatrixFq, y: &MatrixFq) -> Result<FlipReport> {
    let spec = &ambient.spec;
    let (m, n) = (x.n(), y.n());
    if m + n != spec.n {
        return Err(Error::DimensionMismatch { expected: spec.n, found: m + n });
    }
    let xs = block_spec(spec, m)?;
    let ys = block_spec(spec, n)?;
    if !forms_split(spec, &xs, &ys) {
        return Err(Error::Inconsistent(format!("the form of {spec} is not the block sum of {xs} and {ys}")));
    }
    if !xs.contains(x)? || !ys.contains(y)? {
        return Err(Error::NotAnIsometry);
    }
    let find = |a: &MatrixFq, b: &MatrixFq| {
        ambient
            .index_of(&MatrixFq::direct_sum(a, b))
            .ok_or_else(|| Error::Inconsistent("block-diagonal element outside the ambient group".into()))
    };
    let xy = find(x, y)?;
    let yx = find(y, x)?;
    Ok(FlipReport {
        group: spec.to_string(),
        dim_x: m,
        dim_y: n,
        hypothesis: flip_hypothesis(spec, m, n),
        conjugate: ambient.is_conjugate(xy, yx),
    })
}

/// The flip over every split `2m + 2n` of the ambient dimension and every
/// pair of block class representatives.
pub fn flip_scan(ambient: &EnumeratedGroup) -> Result<BoundReport> {
    let spec = &ambient.spec;
    block_spec(spec, spec.n)?;
    let mut report = BoundReport::new("flip", Some(spec.to_string()));
    for m in (2..spec.n - 1).step_by(2) {
        let n = spec.n - m;
        let gx = EnumeratedGroup::enumerate(&block_spec(spec, m)?)?;
        let gy = EnumeratedGroup::enumerate(&block_spec(spec, n)?)?;
        let mut pairs = 0usize;
        let mut conjugate = 0usize;
        for cx in gx.classes() {
            for cy in gy.classes() {
                let f = flip_conjugacy_check(ambient, gx.element(cx.representative), gy.element(cy.representative))?;
                pairs += 1;
                conjugate += f.conjugate as usize;
            }
        }
        let hypothesis = flip_hypothesis(spec, m, n);
        let verdict = if hypothesis { Verdict::from_bool(conjugate == pairs) } else { Verdict::Observational };
        let mut row = BoundRow::new(format!("{} + {}", gx.spec, gy.spec), conjugate as f64, pairs as f64, verdict)
            .with_note(format!("{conjugate} of {pairs} class pairs flip to a conjugate"));
        if !hypothesis {
            row = row.with_note(format!("HypothesisViolated: {conjugate} of {pairs} class pairs flip to a conjugate"));
        }
        report.push(row);
    }
    Ok(report)
}

/// Classes `z ≠ 1` that are real and whose square contains class `target`.
fn real_squares_containing(g: &EnumeratedGroup, target: usize) -> Vec<usize> {
    let sc = g.structure_constants_table();
    g.classes().iter().filter(|c| c.is_real && sc.get(c.id, c.id, target) > 0).map(|c| c.id).collect()
}

/// Some `(a, b)` with `a·b·a⁻¹·b⁻¹ = x`, by scan.
pub fn commutator_of(g: &EnumeratedGroup, x: usize) -> Option<(usize, usize)> {
    (0..g.order() as usize).find_map(|a| {
        let ai = g.inv(a);
        let target = g.mul(ai, x);
        if !g.is_conjugate(ai, target) {
            return None;
        }
        (0..g.order() as usize).find(|&b| g.conjugate(ai, b) == target).map(|b| (a, b))
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RealCoverReport {
    pub group: String,
    pub home: String,
    /// The ambient class of `diag(g, I)`.
    pub target_class: usize,
    pub real_witnesses: Vec<usize>,
    /// `(x, y)` in the home group with `g = xyx⁻¹y⁻¹`.
    pub commutator: Option<(usize, usize)>,
    /// The class of `diag(x, x⁻¹)` when the ambient has twice the home dimension.
    pub construction_class: Option<usize>,
    pub construction_real: Option<bool>,
    pub construction_covers: Option<bool>,
    pub hypothesis: bool,
    pub agrees: bool,
}

impl RealCoverReport {
    pub fn to_bound_report(&self) -> BoundReport {
        let mut r = BoundReport::new("real-cover", Some(self.group.clone()));
        r.push(BoundRow::new("frobenius sign matches class products", 0.0, 0.0, Verdict::from_bool(self.agrees)));
        let ok = !self.real_witnesses.is_empty()
            && self.commutator.is_some()
            && self.construction_real == Some(true)
            && self.construction_covers == Some(true);
        let verdict = if self.hypothesis { Verdict::from_bool(ok) } else { Verdict::Observational };
        r.push(BoundRow::new("covered by a real class", self.real_witnesses.len() as f64, 1.0, verdict));
        if !self.hypothesis {
            r.note("HypothesisViolated: the ambient is not of the lemma's shape, or g is not a commutator in its home group");
        }
        r.data = serde_json::to_value(self).unwrap_or_default();
        r
    }
}

/// Searches for real classes of the ambient whose square contains
/// `diag(g, I)`, and runs the commutator construction `z = diag(x, x⁻¹)`.
pub fn real_cover_check(ambient: &EnumeratedGroup, t: &CharTable, home: &EnumeratedGroup, g: usize) -> Result<RealCoverReport> {
    check_table(ambient, t)?;
    let big = ambient.spec.n;
    let small = home.spec.n;
    let target = ambient
        .index_of(&embed(home.element(g), big))
        .ok_or_else(|| Error::Inconsistent(format!("{} does not embed in {}", home.spec, ambient.spec)))?;
    let target_class = ambient.class_of(target);
    let real_witnesses = real_squares_containing(ambient, target_class);
    let mut agrees = true;
    for c in ambient.classes().iter().filter(|c| c.is_real) {
        let sums = frobenius_square_sums(t, c.id)?;
        agrees &= sums[target_class].is_positive() == real_witnesses.contains(&c.id);
    }
    let commutator = commutator_of(home, g);
    let shaped = big == 2 * small && block_spec(&ambient.spec, small).is_ok_and(|s| s == home.spec);
    let (mut construction_class, mut construction_real, mut construction_covers) = (None, None, None);
    if let (true, Some((x, _))) = (shaped, commutator) {
        let z = MatrixFq::direct_sum(home.element(x), home.element(home.inv(x)));
        if let Some(zi) = ambient.index_of(&z) {
            let zc = ambient.class_of(zi);
            construction_class = Some(zc);
            construction_real = Some(ambient.class(zc).is_real);
            construction_covers = Some(ambient.structure_constants_table().get(zc, zc, target_class) > 0);
        }
    }
    Ok(RealCoverReport {
        group: ambient.spec.to_string(),
        home: home.spec.to_string(),
        target_class,
        real_witnesses,
        commutator,
        construction_class,
        construction_real,
        construction_covers,
        hypothesis: shaped && commutator.is_some() && flip_hypothesis(&ambient.spec, small, small),
        agrees,
    })
}

/// Every class is a commutator: `Σ_χ χ(g)/χ(1) > 0`, checked against an
/// explicit scan when the group is small enough.
pub fn commutator_check(g: &EnumeratedGroup, t: &CharTable, scan_limit: u64) -> Result<BoundReport> {
    check_table(g, t)?;
    let k = t.num_chars();
    let l = (0..k).fold(1u64, |acc, i| acc.lcm(&t.degree(i)));
    let mut report = BoundReport::new("commutators", Some(g.spec.to_string()));
    for c in 0..g.num_classes() {
        let mut acc = LevelSum::default();
        for i in 0..k {
            acc.add(t.value(i, c), &BigInt::from(l / t.degree(i)));
        }
        let sum = acc
            .finish_lcm()
            .to_rational()
            .ok_or_else(|| Error::Inconsistent(format!("commutator sum at class {c} is not rational")))?;
        let positive = sum.is_positive();
        let mut row = BoundRow::new(format!("class {c} is a commutator"), positive as u8 as f64, 1.0, Verdict::from_bool(positive));
        if g.order() <= scan_limit {
            let found = commutator_of(g, g.class(c).representative).is_some();
            if found != positive {
                row = BoundRow::new(format!("class {c} is a commutator"), positive as u8 as f64, 1.0, Verdict::Fail)
                    .with_note("character sum and scan disagree");
            }
        }
        report.push(row);
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerWordReport {
    pub group: String,
    pub n: u64,
    /// Classes of `x^N`.
    pub image: Vec<usize>,
    /// Classes of `x^N·y^N`.
    pub reached: Vec<usize>,
    pub missed: Vec<usize>,
    pub surjective: bool,
    /// The element-level product set agrees with the class sumset; `None` when skipped.
    pub element_check: Option<bool>,
}

/// The image of `(x, y) ↦ x^N y^N` as a union of classes.
pub fn power_word_image(g: &EnumeratedGroup, n: u64, element_limit: u64) -> PowerWordReport {
    let r = g.num_classes();
    let mut image: Vec<usize> = (0..r).map(|c| g.power_class(c, (n % g.class(c).order_of_rep) as i64)).collect();
    image.sort_unstable();
    image.dedup();
    let sc = g.structure_constants_table();
    let reached: Vec<usize> = (0..r).filter(|&k| image.iter().any(|&i| image.iter().any(|&j| sc.get(i, j, k) > 0))).collect();
    let missed: Vec<usize> = (0..r).filter(|k| !reached.contains(k)).collect();
    let element_check = (g.order() <= element_limit).then(|| {
        let powers: Vec<usize> = {
            let mut v: Vec<usize> = (0..g.order() as usize).map(|x| g.pow(x, n % g.exponent())).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let mut hit = vec![false; r];
        for &a in &powers {
            for &b in &powers {
                hit[g.class_of(g.mul(a, b))] = true;
            }
        }
        (0..r).all(|k| hit[k] == reached.contains(&k))
    });
    PowerWordReport { group: g.spec.to_string(), n, surjective: missed.is_empty(), image, reached, missed, element_check }
}

pub fn power_word_check(g: &EnumeratedGroup, n: u64) -> BoundReport {
    let pw = power_word_image(g, n, 1000);
    let mut r = BoundReport::new("powerword", Some(g.spec.to_string()));
    r.push(
        BoundRow::new(format!("N={n} surjective"), pw.reached.len() as f64, g.num_classes() as f64, Verdict::Observational)
            .with_note(if pw.surjective { "surjective".to_string() } else { format!("missed classes {:?}", pw.missed) }),
    );
    if let Some(ok) = pw.element_check {
        r.push(BoundRow::new("class sumset equals element products", 0.0, 0.0, Verdict::from_bool(ok)));
    }
    r.data = serde_json::to_value(&pw).unwrap_or_default();
    r
}

#[derive(Clone, Debug, Serialize)]
pub struct SingerEntry {
    pub class: usize,
    /// Degrees of the irreducible factors of the characteristic polynomial.
    pub shape: Vec<usize>,
    pub singer: bool,
    pub covered: Vec<usize>,
    /// Largest support among classes outside the square.
    pub empirical_b: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingerScan {
    pub group: String,
    pub entries: Vec<SingerEntry>,
}

impl SingerScan {
    pub fn to_bound_report(&self) -> BoundReport {
        let mut r = BoundReport::new("singer-square", Some(self.group.clone()));
        for e in &self.entries {
            r.push(
                BoundRow::new(format!("class {} shape {:?}", e.class, e.shape), e.empirical_b.map_or(-1.0, |b| b as f64), f64::NAN, Verdict::Observational)
                    .with_note(if e.singer { "Singer" } else { "regular semisimple" }),
            );
        }
        r.data = serde_json::to_value(self).unwrap_or_default();
        r
    }
}

/// For every regular semisimple class: its square and the largest support
/// it misses.
pub fn singer_square_scan(g: &EnumeratedGroup, t: &CharTable) -> Result<SingerScan> {
    if !matches!(g.spec.family, Family::SL | Family::SU) {
        return Err(Error::UnsupportedFamily(format!("{} is not special linear or unitary", g.spec)));
    }
    let f = g.field();
    let n = g.spec.n;
    let mut entries = Vec::new();
    for c in g.classes() {
        let cp = g.element(c.representative).char_poly(f);
        let factors = factor_squarefree_irreducible(&cp, f)?;
        if factors.iter().any(|(_, m)| *m > 1) {
            continue;
        }
        let mut shape: Vec<usize> = factors.iter().map(|(p, _)| p.degree() as usize).collect();
        shape.sort_unstable_by(|a, b| b.cmp(a));
        let cover = class_square(g, t, c.id)?;
        if !cover.agrees {
            return Err(Error::Inconsistent(format!("class square of {} disagrees with class products", c.id)));
        }
        entries.push(SingerEntry {
            class: c.id,
            singer: shape == [n],
            empirical_b: cover.not_covered.iter().map(|&j| g.class(j).support).max(),
            covered: cover.covered,
            shape,
        });
    }
    Ok(SingerScan { group: g.spec.to_string(), entries })
}

/// For real `x` and `y` in the `+`-type blocks: the four flip companions
/// share a class `C`, and `C²` contains every `diag(g, I)` covered by `x`
/// and every `diag(h, I)` covered by `y`.
pub fn union_check(ambient: &EnumeratedGroup, gx: &EnumeratedGroup, x: usize, gy: &EnumeratedGroup, y: usize) -> Result<BoundReport> {
    let big = ambient.spec.n;
    let (mx, my) = (gx.element(x), gy.element(y));
    let hypothesis = gx.class(gx.class_of(x)).is_real && gy.class(gy.class_of(y)).is_real && flip_hypothesis(&ambient.spec, mx.n(), my.n());
    let find = |m: MatrixFq| ambient.index_of(&m).ok_or_else(|| Error::Inconsistent("block element outside the ambient group".into()));
    let z = [
        find(MatrixFq::direct_sum(mx, my))?,
        find(MatrixFq::direct_sum(mx, gy.element(gy.inv(y))))?,
        find(MatrixFq::direct_sum(my, mx))?,
        find(MatrixFq::direct_sum(my, gx.element(gx.inv(x))))?,
    ];
    let cls = ambient.class_of(z[0]);
    let same = z.iter().all(|&e| ambient.class_of(e) == cls);
    let sc = ambient.structure_constants_table();
    let mut report = BoundReport::new("union", Some(ambient.spec.to_string()));
    let verdict = |ok: bool| if hypothesis { Verdict::from_bool(ok) } else { Verdict::Observational };
    report.push(BoundRow::new("flip companions conjugate", same as u8 as f64, 1.0, verdict(same)));
    for (label, home, e) in [("x", gx, x), ("y", gy, y)] {
        let hsc = home.structure_constants_table();
        let ec = home.class_of(e);
        let covered: Vec<usize> = (0..home.num_classes()).filter(|&j| hsc.get(ec, ec, j) > 0).collect();
        let mut inside = 0;
        for &j in &covered {
            let g = find(embed(home.element(home.class(j).representative), big))?;
            inside += (sc.get(cls, cls, ambient.class_of(g)) > 0) as usize;
        }
        report.push(
            BoundRow::new(format!("classes covered by {label} lie in C²"), inside as f64, covered.len() as f64, verdict(inside == covered.len()))
                .with_note(format!("{inside} of {}", covered.len())),
        );
    }
    if !hypothesis {
        report.note("HypothesisViolated: x or y is not real, or the parity condition fails");
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::dixon_table;

    fn group(s: &str) -> (EnumeratedGroup, CharTable) {
        let g = EnumeratedGroup::enumerate(&GroupSpec::parse(s).unwrap()).unwrap();
        let t = dixon_table(&g).unwrap();
        (g, t)
    }

    #[test]
    fn identity_square_is_identity() {
        let (g, t) = group("SL(2,3)");
        let c = class_square(&g, &t, g.identity_class()).unwrap();
        assert_eq!(c.covered, vec![g.identity_class()]);
        assert!(c.agrees);
    }

    #[test]
    fn frobenius_sign_matches_products_everywhere() {
        for s in ["SL(2,3)", "SL(3,2)", "SU(3,2)"] {
            let (g, t) = group(s);
            for x in 0..g.num_classes() {
                let c = class_square(&g, &t, x).unwrap();
                assert!(c.agrees, "{s} class {x}");
                // element-level product set from a non-representative member
                let members = g.class_members(x);
                let a = *members.last().unwrap() as usize;
                let mut hit = vec![false; g.num_classes()];
                for &b in members {
                    hit[g.class_of(g.mul(a, b as usize))] = true;
                }
                let direct: Vec<usize> = (0..hit.len()).filter(|&j| hit[j]).collect();
                assert_eq!(direct, c.covered, "{s} class {x}");
                if g.class(x).is_real {
                    assert!(c.covered.contains(&g.identity_class()));
                }
            }
        }
    }

    #[test]
    fn sl23_central_obstruction() {
        let (g, t) = group("SL(2,3)");
        let th = thompson_search(&g, &t).unwrap();
        assert!(th.agrees_all);
        // no single class squares onto a group with a nontrivial center of order 2 here
        assert_eq!(th.center_order, 2);
        assert_eq!(th.witness, None);
    }

    #[test]
    fn psl27_witnesses() {
        let (g, t) = group("SL(3,2)");
        let th = thompson_search(&g, &t).unwrap();
        assert!(th.witness.is_some());
        let mut orders: Vec<u64> = th.entries.iter().filter(|e| e.full).map(|e| g.class(e.class).order_of_rep).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![3, 4]);
        // the order-7 classes are not real, so their squares miss the identity
        for e in th.entries.iter().filter(|e| g.class(e.class).order_of_rep == 7) {
            assert!(!e.full);
            assert!(!class_square(&g, &t, e.class).unwrap().covered.contains(&g.identity_class()));
        }
        assert!(th.to_bound_report().passed());
    }

    #[test]
    fn s6_squares_stay_in_a6() {
        // Sp(4,2) is S6: every class square lies in the alternating subgroup
        let (g, t) = group("Sp(4,2)");
        let th = thompson_search(&g, &t).unwrap();
        assert!(th.agrees_all);
        assert_eq!(th.witness, None);
        let even: Vec<usize> = (0..g.num_classes()).filter(|&c| commutator_of(&g, g.class(c).representative).is_some()).collect();
        assert_eq!(even.iter().map(|&c| g.class(c).size).sum::<u64>(), 360);
        let cover = (0..g.num_classes()).map(|x| class_square(&g, &t, x).unwrap()).find(|c| c.covered == even);
        assert!(cover.is_some(), "some class squares onto A6");
    }

    #[test]
    fn flip_on_sp42() {
        let (g, _) = group("Sp(4,2)");
        let r = flip_scan(&g).unwrap();
        assert!(r.passed() && r.rows.iter().all(|row| row.verdict == Verdict::Pass));
        let h = EnumeratedGroup::enumerate(&GroupSpec::parse("Sp(2,2)").unwrap()).unwrap();
        let x = h.element(h.identity());
        assert!(flip_conjugacy_check(&g, x, x).unwrap().conjugate);
    }

    #[test]
    fn flip_parity_violation_is_reported() {
        let (g, _) = group("O+(4,3)");
        let r = flip_scan(&g).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].verdict, Verdict::Observational);
        assert!(!flip_hypothesis(&g.spec, 2, 2));
        assert!(matches!(flip_scan(&group("SL(3,2)").0), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn real_cover_from_sp23() {
        let (g, t) = group("Sp(4,3)");
        let h = EnumeratedGroup::enumerate(&GroupSpec::parse("Sp(2,3)").unwrap()).unwrap();
        for c in h.classes() {
            let r = real_cover_check(&g, &t, &h, c.representative).unwrap();
            assert!(r.agrees);
            assert!(!r.real_witnesses.is_empty());
            assert!(r.to_bound_report().passed());
            // SL(2,3) is not perfect
            let Some((a, b)) = r.commutator else {
                assert!(!r.hypothesis);
                continue;
            };
            let comm = h.mul(h.mul(a, b), h.mul(h.inv(a), h.inv(b)));
            assert_eq!(comm, c.representative);
            assert_eq!(r.construction_real, Some(true));
            assert_eq!(r.construction_covers, Some(true));
            assert!(r.to_bound_report().passed());
        }
    }

    #[test]
    fn commutators() {
        for s in ["SL(3,2)", "SL(2,5)"] {
            let (g, t) = group(s);
            assert!(commutator_check(&g, &t, 1000).unwrap().passed(), "{s}");
        }
        // S6 and S3: odd permutations are not commutators, and the scan agrees
        for (s, odd) in [("Sp(4,2)", 5), ("SL(2,2)", 1)] {
            let (g, t) = group(s);
            let r = commutator_check(&g, &t, 1000).unwrap();
            assert_eq!(r.failures().count(), odd, "{s}");
            assert!(r.rows.iter().all(|row| row.note.is_none()));
        }
    }

    #[test]
    fn power_words_trivial_cases() {
        let (g, _) = group("SL(3,2)");
        let one = power_word_image(&g, 1, 1000);
        assert!(one.surjective && one.element_check == Some(true));
        let all = power_word_image(&g, g.order(), 1000);
        assert_eq!(all.image, vec![g.identity_class()]);
        assert_eq!(all.reached, vec![g.identity_class()]);
        assert!(!all.surjective);
    }

    #[test]
    fn power_words_on_small_groups() {
        for s in ["SL(3,2)", "SL(2,5)", "Sp(4,2)"] {
            let (g, _) = group(s);
            for n in [1, 2, 3, 6, 12, 30] {
                let pw = power_word_image(&g, n, 1000);
                assert_eq!(pw.element_check, Some(true), "{s} N={n}");
                assert_eq!(pw.surjective, pw.missed.is_empty());
            }
        }
    }

    #[test]
    fn singer_squares() {
        let (g, t) = group("SL(3,2)");
        let scan = singer_square_scan(&g, &t).unwrap();
        let singers: Vec<&SingerEntry> = scan.entries.iter().filter(|e| e.singer).collect();
        assert_eq!(singers.len(), 2);
        for e in singers {
            assert_eq!(g.class(e.class).order_of_rep, 7);
        }
        let (g, t) = group("SL(2,5)");
        let scan = singer_square_scan(&g, &t).unwrap();
        assert!(scan.entries.iter().any(|e| e.singer && g.class(e.class).order_of_rep % 3 == 0));
        assert!(singer_square_scan(&group("Sp(4,2)").0, &group("Sp(4,2)").1).is_err());
    }

    #[test]
    fn union_on_sp42() {
        let (g, _) = group("Sp(4,2)");
        let h = EnumeratedGroup::enumerate(&GroupSpec::parse("Sp(2,2)").unwrap()).unwrap();
        for cx in h.classes() {
            for cy in h.classes() {
                let r = union_check(&g, &h, cx.representative, &h, cy.representative).unwrap();
                assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
            }
        }
    }
}
