//! Random walks on Cayley graphs of conjugacy classes and on McKay graphs.

mod mckay;

pub use mckay::{
    character_products_check, covering_number, first_constituent_powers, mckay_graph, mckay_walk, McKayGraph, McKayStep,
    McKayWalk,
};

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chars::{CharTable, Cyclotomic, LevelSum};
use crate::error::Result;
use crate::forms::GroupSpec;
use crate::grp::EnumeratedGroup;
use crate::matspace::{factor_squarefree_irreducible, MatrixFq};
use crate::report::{ser_rational, BoundReport, BoundRow, Verdict};
use crate::verify::{conj_product, run_blocks, wilson_interval, BoundConstants, McOptions, Z95};

/// Total-variation normalisation: the full L¹ norm (at most 2) or half of it.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TvConvention {
    #[default]
    L1,
    Half,
}

impl TvConvention {
    pub fn apply(self, l1: &BigRational) -> BigRational {
        match self {
            TvConvention::L1 => l1.clone(),
            TvConvention::Half => l1 / BigInt::from(2),
        }
    }

    pub fn apply_f64(self, l1: f64) -> f64 {
        match self {
            TvConvention::L1 => l1,
            TvConvention::Half => l1 / 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TvConvention::L1 => "l1",
            TvConvention::Half => "half",
        }
    }
}

/// `x < 1/e`, decided with 20-digit rational bounds on e.
pub fn below_inv_e(x: &BigRational) -> bool {
    let scale = Pow::pow(BigInt::from(10u32), 20u32);
    let e_lo = BigRational::new(BigInt::parse_bytes(b"271828182845904523536", 10).unwrap(), scale.clone());
    let e_hi = &e_lo + BigRational::new(BigInt::one(), scale);
    let one = BigRational::one();
    if x * &e_hi < one {
        true
    } else if x * &e_lo >= one {
        false
    } else {
        x.to_f64().unwrap() * std::f64::consts::E < 1.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WalkStep {
    pub n: usize,
    /// `‖P^{*n} − U_G‖₁`.
    #[serde(serialize_with = "ser_rational")]
    pub tv: BigRational,
    /// `‖P^{*n} − U_T‖₁` with T the eventual support for the residue of n.
    #[serde(serialize_with = "ser_rational")]
    pub coset_tv: BigRational,
    pub support_classes: usize,
    /// `P^{*n}` at a single element of each class.
    #[serde(skip)]
    pub point_mass: Vec<BigRational>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WalkReport {
    pub group: String,
    pub class: usize,
    pub class_size: u64,
    pub convention: TvConvention,
    pub steps: Vec<WalkStep>,
    /// Least n with `‖P^{*n} − U_G‖₁ < 1/e`.
    pub mixing_time: Option<usize>,
    /// The same threshold against the uniform distribution on the reachable coset.
    pub coset_mixing_time: Option<usize>,
    /// Least n with `S^n = G`.
    pub diameter: Option<usize>,
    /// Period of the support sequence; 1 when aperiodic.
    pub period: usize,
    pub non_generating: bool,
    /// `log|G| / log|S|`.
    pub log_ratio: f64,
    /// `C′·log|G|/log|S|`.
    pub mixing_bound: f64,
    /// The character formula equals the class-level convolution at every step.
    pub formula_agrees: bool,
    /// TV is non-increasing along each residue class of the period.
    pub monotone: bool,
}

impl WalkReport {
    pub fn tv(&self, n: usize) -> BigRational {
        self.convention.apply(&self.steps[n].tv)
    }

    /// `n,tv,coset_tv` rows in the report's convention.
    pub fn to_csv(&self) -> String {
        let mut out = format!("n,tv_{0},coset_tv_{0}\n", self.convention.name());
        for s in &self.steps {
            let tv = self.convention.apply(&s.tv).to_f64().unwrap();
            let ctv = self.convention.apply(&s.coset_tv).to_f64().unwrap();
            out.push_str(&format!("{},{:.12},{:.12}\n", s.n, tv, ctv));
        }
        out
    }

    pub fn to_bound_report(&self) -> BoundReport {
        let mut r = BoundReport::new("walk", Some(self.group.clone()));
        r.push(BoundRow::new("character formula equals convolution", 0.0, 0.0, Verdict::from_bool(self.formula_agrees)));
        r.push(BoundRow::new("tv non-increasing", 0.0, 0.0, Verdict::from_bool(self.monotone)));
        let n_max = self.steps.len() - 1;
        match self.mixing_time {
            Some(m) => r.push(BoundRow::new("mixing time", m as f64, self.mixing_bound, Verdict::from_bool((m as f64) < self.mixing_bound))),
            None => {
                let verdict = if self.non_generating || self.period > 1 { Verdict::Vacuous } else { Verdict::Advisory };
                r.push(
                    BoundRow::new("mixing time", f64::NAN, self.mixing_bound, verdict).with_note(format!("not mixed within {n_max} steps")),
                );
            }
        }
        let diam = self.diameter.map_or(f64::NAN, |d| d as f64);
        r.push(BoundRow::new("diameter", diam, self.log_ratio, Verdict::Observational));
        if let (Some(m), Some(d)) = (self.mixing_time, self.diameter) {
            r.push(BoundRow::new("mixing time / diameter", m as f64 / d as f64, f64::NAN, Verdict::Observational));
        }
        if self.non_generating {
            r.note("NonGenerating: the class generates a proper normal subgroup");
        } else if self.period > 1 {
            r.note(format!("periodic support with period {}", self.period));
        }
        r.data = serde_json::to_value(self).unwrap_or_default();
        r
    }
}

/// The class-level support sets of `S^n`, with the start and period of their cycle.
struct Schedule {
    sets: Vec<Vec<bool>>,
    start: usize,
    period: usize,
}

impl Schedule {
    fn new(g: &EnumeratedGroup, c: usize) -> Schedule {
        let sc = g.structure_constants_table();
        let r = g.num_classes();
        let mut cur = vec![false; r];
        cur[g.identity_class()] = true;
        let mut seen: HashMap<Vec<bool>, usize> = HashMap::new();
        let mut sets = Vec::new();
        loop {
            if let Some(&i) = seen.get(&cur) {
                let period = sets.len() - i;
                return Schedule { sets, start: i, period };
            }
            seen.insert(cur.clone(), sets.len());
            let next = (0..r).map(|k| (0..r).any(|m| cur[m] && sc.get(m, c, k) > 0)).collect();
            sets.push(std::mem::replace(&mut cur, next));
        }
    }

    /// The support set that residue n settles into.
    fn eventual(&self, n: usize) -> &[bool] {
        let i = if n >= self.start { n } else { n + (self.start - n).div_ceil(self.period) * self.period };
        &self.sets[self.start + (i - self.start) % self.period]
    }

    fn cycle_union(&self) -> Vec<bool> {
        let r = self.sets[0].len();
        (0..r).map(|k| self.sets[self.start..].iter().any(|s| s[k])).collect()
    }
}

/// `P^{*n}(x_k)` from iterated class multiplication counts.
fn convolution_path(g: &EnumeratedGroup, c: usize, n_max: usize) -> Vec<Vec<BigRational>> {
    let sc = g.structure_constants_table();
    let r = g.num_classes();
    let sizes: Vec<BigInt> = g.classes().iter().map(|cl| BigInt::from(cl.size)).collect();
    let s = BigInt::from(g.class(c).size);
    let mut counts = vec![BigInt::zero(); r];
    counts[g.identity_class()] = BigInt::one();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut s_pow = BigInt::one();
    for _ in 0..=n_max {
        out.push((0..r).map(|k| BigRational::new(counts[k].clone(), &sizes[k] * &s_pow)).collect());
        let mut next = vec![BigInt::zero(); r];
        for m in 0..r {
            if counts[m].is_zero() {
                continue;
            }
            let per = &counts[m] / &sizes[m];
            for (k, slot) in next.iter_mut().enumerate() {
                let a = sc.get(m, c, k);
                if a != 0 {
                    *slot += &per * BigInt::from(a) * &sizes[k];
                }
            }
        }
        counts = next;
        s_pow *= &s;
    }
    out
}

/// `P^{*n}(x) = (1/|G|) Σ_χ χ(g)^n conj χ(x) / χ(1)^{n−1}`; `None` where the sum is not rational.
fn character_path(t: &CharTable, c: usize, n_max: usize) -> Vec<Vec<Option<BigRational>>> {
    let r = t.num_classes();
    let k = t.num_chars();
    let conj: Vec<Vec<Cyclotomic>> = t.values.iter().map(|row| row.iter().map(|v| v.conj()).collect()).collect();
    let mut pows: Vec<Cyclotomic> = (0..k).map(|_| Cyclotomic::one(1)).collect();
    let order = BigInt::from(t.order);
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let (l, weights): (BigInt, Vec<BigInt>) = if n == 0 {
            (BigInt::one(), t.degrees.iter().map(|&d| BigInt::from(d)).collect())
        } else {
            let dp: Vec<BigInt> = t.degrees.iter().map(|&d| Pow::pow(BigInt::from(d), (n - 1) as u32)).collect();
            let l = dp.iter().fold(BigInt::one(), |acc, x| acc.lcm(x));
            let w = dp.iter().map(|x| &l / x).collect();
            (l, w)
        };
        let denom = &l * &order;
        let row: Vec<Option<BigRational>> = (0..r)
            .into_par_iter()
            .map(|x| {
                let mut acc = LevelSum::default();
                for i in 0..k {
                    acc.add(&(&pows[i] * &conj[i][x]), &weights[i]);
                }
                acc.finish_lcm().to_rational().map(|v| v / BigRational::from_integer(denom.clone()))
            })
            .collect();
        out.push(row);
        pows = pows.iter().enumerate().map(|(i, p)| p * t.value(i, c)).collect();
    }
    out
}

/// `Σ_k |C_k|·|p_k − target_k|`.
fn l1_distance(sizes: &[u64], p: &[BigRational], target: &[BigRational]) -> BigRational {
    p.iter()
        .zip(target)
        .zip(sizes)
        .fold(BigRational::zero(), |acc, ((a, b), &s)| acc + (a - b).abs() * BigInt::from(s))
}

/// The exact walk driven by the uniform distribution on class `c`, for n = 0..=n_max.
pub fn exact_walk(g: &EnumeratedGroup, t: &CharTable, c: usize, n_max: usize) -> WalkReport {
    let k = BoundConstants::default();
    let r = g.num_classes();
    let sizes = g.class_sizes();
    let schedule = Schedule::new(g, c);
    let conv = convolution_path(g, c, n_max);
    let chars = character_path(t, c, n_max);
    let formula_agrees = conv.iter().zip(&chars).all(|(a, b)| a.iter().zip(b).all(|(x, y)| y.as_ref() == Some(x)));
    let uniform = vec![BigRational::new(BigInt::one(), BigInt::from(g.order())); r];
    let mut steps = Vec::with_capacity(n_max + 1);
    for (n, p) in conv.into_iter().enumerate() {
        let t_set = schedule.eventual(n);
        let t_size: u64 = (0..r).filter(|&j| t_set[j]).map(|j| sizes[j]).sum();
        let target: Vec<BigRational> = (0..r)
            .map(|j| if t_set[j] { BigRational::new(BigInt::one(), BigInt::from(t_size)) } else { BigRational::zero() })
            .collect();
        steps.push(WalkStep {
            n,
            tv: l1_distance(&sizes, &p, &uniform),
            coset_tv: l1_distance(&sizes, &p, &target),
            support_classes: p.iter().filter(|x| !x.is_zero()).count(),
            point_mass: p,
        });
    }
    let period = schedule.period;
    let monotone = (period..steps.len()).all(|n| steps[n].coset_tv <= steps[n - period].coset_tv)
        && (1..steps.len()).all(|n| steps[n].tv <= steps[n - 1].tv);
    let non_generating = schedule.cycle_union().iter().any(|&b| !b);
    let diameter = if non_generating || period > 1 {
        None
    } else {
        schedule.sets.iter().position(|s| s.iter().all(|&b| b))
    };
    let mixing_time = steps.iter().position(|s| below_inv_e(&s.tv));
    let coset_mixing_time = steps.iter().position(|s| below_inv_e(&s.coset_tv));
    let class_size = g.class(c).size;
    let log_ratio = (g.order() as f64).ln() / (class_size as f64).ln();
    WalkReport {
        group: g.spec.to_string(),
        class: c,
        class_size,
        convention: TvConvention::L1,
        steps,
        mixing_time,
        coset_mixing_time,
        diameter,
        period,
        non_generating,
        log_ratio,
        mixing_bound: k.c_prime.to_f64() * log_ratio,
        formula_agrees,
        monotone,
    }
}

/// The characteristic polynomial has at least n/2 irreducible factors, with multiplicity.
pub fn many_factors(m: &MatrixFq, f: &crate::field::FieldSpec) -> bool {
    let cp = m.char_poly(f);
    let count: usize = factor_squarefree_irreducible(&cp, f).map(|v| v.iter().map(|(_, e)| *e).sum()).unwrap_or(0);
    2 * count >= m.n()
}

#[derive(Clone, Debug, Serialize)]
pub struct McWalkPoint {
    pub n: usize,
    pub hits: u64,
    pub ci: (f64, f64),
    /// Lower bound on `‖P^{*n} − U_G‖₁` from the separator event, using the interval ends.
    pub tv_lower: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct McWalkReport {
    pub group: String,
    pub trials: usize,
    pub seed: u64,
    pub uniform_hits: u64,
    pub uniform_ci: (f64, f64),
    pub points: Vec<McWalkPoint>,
}

impl McWalkReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,freq,ci_lo,ci_hi,tv_lower\n");
        for p in &self.points {
            out.push_str(&format!("{},{:.6},{:.6},{:.6},{:.6}\n", p.n, p.hits as f64 / self.trials as f64, p.ci.0, p.ci.1, p.tv_lower));
        }
        out
    }

    pub fn to_bound_report(&self) -> BoundReport {
        let mut r = BoundReport::new("walk-mc", Some(self.group.clone()));
        let u = self.uniform_hits as f64 / self.trials as f64;
        r.push(BoundRow::new("separator under uniform", u, f64::NAN, Verdict::Observational));
        for p in &self.points {
            r.push(
                BoundRow::new(format!("n={} separator", p.n), p.hits as f64 / self.trials as f64, u, Verdict::Observational)
                    .with_note(format!("tv ≥ {:.4}", p.tv_lower)),
            );
        }
        r.data = serde_json::to_value(self).unwrap_or_default();
        r
    }
}

/// Frequency of the many-factors event after n = 0..=steps random conjugates of `g`,
/// against its frequency under the sampler itself.
pub fn mc_walk(spec: &GroupSpec, group: Option<&EnumeratedGroup>, g: &MatrixFq, steps: u32, opts: &McOptions) -> Result<McWalkReport> {
    let f = spec.field();
    let rows = run_blocks(spec, group, opts, |draw| {
        let walk: Vec<bool> = conj_product(g, steps, draw, f).iter().map(|h| many_factors(h, f)).collect();
        let uni = many_factors(&draw().0, f);
        (walk, uni)
    })?;
    let trials = rows.len() as u64;
    let uniform_hits = rows.iter().filter(|r| r.1).count() as u64;
    let uniform_ci = wilson_interval(uniform_hits, trials, Z95);
    let mut points = vec![McWalkPoint { n: 0, hits: trials, ci: wilson_interval(trials, trials, Z95), tv_lower: 0.0 }];
    for n in 1..=steps as usize {
        let hits = rows.iter().filter(|r| r.0[n - 1]).count() as u64;
        let ci = wilson_interval(hits, trials, Z95);
        points.push(McWalkPoint { n, hits, ci, tv_lower: 0.0 });
    }
    for p in &mut points {
        p.tv_lower = 2.0 * (p.ci.0 - uniform_ci.1).max(uniform_ci.0 - p.ci.1).max(0.0);
    }
    Ok(McWalkReport { group: spec.to_string(), trials: opts.trials, seed: opts.seed, uniform_hits, uniform_ci, points })
}
