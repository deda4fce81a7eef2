//! Claim ids and their default parameter sweeps.

use std::path::PathBuf;

use super::*;
use crate::chars::dixon_table_cached;
use crate::element::support;
use crate::error::{Error, Result};
use crate::field::Fq;
use crate::forms::{Family, GroupSpec};
use crate::grp::{EnumerateOptions, ProductReplacement, SampleMode, DEFAULT_CAP};
use crate::matspace::{unit_vector, vec_add, MatrixFq, PolyFq, Vector};

pub const CLAIM_IDS: [&str; 17] = [
    "thmA",
    "mb3",
    "linear-supp",
    "frob",
    "count-v",
    "order",
    "orbit1",
    "orbit2",
    "trans",
    "tuples",
    "aprods",
    "big-support",
    "mb2-curve",
    "sandwich",
    "2ways",
    "matrix-cent",
    "alpha-eps",
];

#[derive(Clone, Debug)]
pub struct ClaimOptions {
    pub seed: u64,
    pub trials: usize,
    pub cache_dir: Option<PathBuf>,
    pub cap: u64,
    /// Sampling mode; uniform over the enumerated group when unset and enumerable.
    pub mode: Option<SampleMode>,
}

impl Default for ClaimOptions {
    fn default() -> Self {
        ClaimOptions { seed: 0, trials: 10_000, cache_dir: None, cap: DEFAULT_CAP, mode: None }
    }
}

fn merge(claim: &str, spec: &GroupSpec, parts: Vec<BoundReport>) -> BoundReport {
    let mut out = BoundReport::new(claim, Some(spec.to_string()));
    let mut data = Vec::new();
    for p in parts {
        for row in p.rows {
            out.push(row);
        }
        out.notes.extend(p.notes);
        if !p.data.is_null() {
            data.push(p.data);
        }
    }
    if !data.is_empty() {
        out.data = serde_json::Value::Array(data);
    }
    out
}

fn units(n: usize, d: usize) -> Vec<Vector> {
    (0..d).map(|i| unit_vector(n, i)).collect()
}

/// Subspace dimensions swept by the stabilizer and orbit claims.
fn dims(n: usize) -> std::ops::RangeInclusive<usize> {
    0..=(n.saturating_sub(3) / 2 + 1).min(n - 1)
}

/// A non-scalar element of least support, from class representatives or
/// from generators and product-replacement samples.
fn probe_element(spec: &GroupSpec, group: Option<&EnumeratedGroup>, seed: u64) -> Result<MatrixFq> {
    let f = spec.field();
    let mut pool: Vec<MatrixFq> = match group {
        Some(g) => g.classes().iter().map(|c| g.element(c.representative).clone()).collect(),
        None => {
            let mut v = spec.generators()?;
            let mut pr = ProductReplacement::new(spec, seed)?;
            v.extend((0..64).map(|_| pr.next_element()));
            v
        }
    };
    pool.retain(|m| support(m, f).supp > 0);
    pool.into_iter()
        .min_by_key(|m| support(m, f).supp)
        .ok_or_else(|| Error::Inconsistent("no non-scalar element found".into()))
}

fn trans_elements(spec: &GroupSpec, group: Option<&EnumeratedGroup>, seed: u64) -> Result<Vec<MatrixFq>> {
    let f = spec.field();
    match group {
        Some(g) => {
            let mut reps: Vec<&crate::grp::ClassData> = g.classes().iter().filter(|c| c.support > 0).collect();
            reps.sort_by_key(|c| (std::cmp::Reverse(c.support), c.id));
            let mut out: Vec<MatrixFq> = reps.iter().take(5).map(|c| g.element(c.representative).clone()).collect();
            if let Some(c) = g.classes().iter().filter(|c| c.support > 0).min_by_key(|c| (c.support, c.id)) {
                out.push(g.element(c.representative).clone());
            }
            Ok(out)
        }
        None => {
            let mut pr = ProductReplacement::new(spec, seed)?;
            let mut out = vec![probe_element(spec, None, seed)?];
            out.extend((0..4).map(|_| pr.next_element()).filter(|m| support(m, f).supp > 0));
            Ok(out)
        }
    }
}

/// Character-ratio bounds need a quasisimple group.
fn quasisimple_only(t: &CharTable, mut r: BoundReport) -> BoundReport {
    if !t.is_quasisimple() {
        r.downgrade_failures(Verdict::Vacuous, "hypothesis violated: group is not quasisimple");
    }
    r
}

enum Handle<'a, T> {
    Borrowed(&'a T),
    Owned(T),
}

impl<T> std::ops::Deref for Handle<'_, T> {
    type Target = T;
    fn deref(&self) -> &T {
        match self {
            Handle::Borrowed(x) => x,
            Handle::Owned(x) => x,
        }
    }
}

/// Runs one claim with its default sweep.
pub fn run_claim(id: &str, spec: &GroupSpec, opts: &ClaimOptions) -> Result<BoundReport> {
    run_claim_inner(id, spec, None, None, opts)
}

/// As [`run_claim`], reusing an enumerated group and its table.
pub fn run_claim_with(id: &str, g: &EnumeratedGroup, t: &CharTable, opts: &ClaimOptions) -> Result<BoundReport> {
    run_claim_inner(id, &g.spec, Some(g), Some(t), opts)
}

fn run_claim_inner(id: &str, spec: &GroupSpec, pre: Option<&EnumeratedGroup>, table: Option<&CharTable>, opts: &ClaimOptions) -> Result<BoundReport> {
    let eopts = EnumerateOptions { cap: opts.cap, cache_dir: opts.cache_dir.clone() };
    let enumerate = || -> Result<Handle<EnumeratedGroup>> {
        match pre {
            Some(g) => Ok(Handle::Borrowed(g)),
            None => EnumeratedGroup::enumerate_with(spec, &eopts).map(Handle::Owned),
        }
    };
    let maybe_group = || match enumerate() {
        Ok(g) => Ok(Some(g)),
        Err(Error::CapExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let with_table = |f: &dyn Fn(&EnumeratedGroup, &CharTable) -> BoundReport| -> Result<BoundReport> {
        let g = enumerate()?;
        let t = match table {
            Some(t) => Handle::Borrowed(t),
            None => Handle::Owned(dixon_table_cached(&g, opts.cache_dir.as_deref())?),
        };
        Ok(f(&g, &t))
    };
    let k = BoundConstants::default();
    let n = spec.n;
    let f = spec.field();
    let mc = |group: Option<&EnumeratedGroup>| McOptions {
        trials: opts.trials,
        seed: opts.seed,
        mode: opts.mode.unwrap_or(if group.is_some() { SampleMode::UniformExact } else { SampleMode::ProductReplacement }),
        ..Default::default()
    };
    let report = match id {
        "thmA" => with_table(&|g, t| quasisimple_only(t, exponent_scan(g, t, &k)))?,
        "mb3" => with_table(&|g, t| quasisimple_only(t, merge("mb3", spec, vec![sigma_scan(g, t, &k), lower_scan(g, t)])))?,
        "linear-supp" => with_table(&|g, t| quasisimple_only(t, gamma_scan(g, t, &k)))?,
        "frob" => with_table(&|g, t| frob_identity_check(g, t, 3))?,
        "mb2-curve" => {
            let grid: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
            with_table(&|g, t| cent_bound_scan(g, t, &grid))?
        }
        "count-v" => {
            let mut parts = Vec::new();
            for kk in 1..=2.min(n) {
                for r in 0..=kk.min(n - kk) {
                    match oracle_count_v(f, n, kk, r, &units(n, kk)) {
                        Ok(rep) => parts.push(rep),
                        Err(Error::GuardExceeded(msg)) => {
                            let mut skipped = BoundReport::new("count-v", None);
                            skipped.note(format!("k={kk} r={r} skipped: {msg}"));
                            parts.push(skipped);
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            merge("count-v", spec, parts)
        }
        "order" => {
            let parts = dims(n).map(|d| oracle_pointwise_stabilizer(spec, &units(n, d))).collect::<Result<Vec<_>>>()?;
            merge("order", spec, parts)
        }
        "orbit2" => {
            let parts = dims(n).map(|d| oracle_orbits(spec, &units(n, d), &unit_vector(n, n - 1))).collect::<Result<Vec<_>>>()?;
            merge("orbit2", spec, parts)
        }
        "orbit1" => {
            if spec.family == Family::SL {
                return Err(Error::UnsupportedFamily("SL carries no form".into()));
            }
            let mut parts = Vec::new();
            let e0 = unit_vector(n, 0);
            for v in [e0.clone(), vec_add(&e0, &unit_vector(n, n - 1), f)] {
                if let Ok(r) = oracle_orbit1(&spec.form, f, &v) {
                    parts.push(r);
                }
            }
            // the degenerate subspace K = e_0^⊥
            let row = spec.form.gram.apply(&e0, f);
            let (_, perp) = crate::matspace::rank_and_kernel(&MatrixFq::from_rows(&[row]), f);
            let kform = spec.form.restrict(&perp, f);
            for i in 0..perp.len() {
                if let Ok(r) = oracle_orbit1(&kform, f, &unit_vector(perp.len(), i)) {
                    parts.push(r);
                    break;
                }
            }
            merge("orbit1", spec, parts)
        }
        "trans" => {
            let group = maybe_group()?;
            let mut parts = Vec::new();
            for x in trans_elements(spec, group.as_deref(), opts.seed)? {
                let e0 = unit_vector(n, 0);
                let e1 = unit_vector(n, 1);
                let xe0 = x.apply(&e0, f);
                for (v, w) in [(vec![e0.clone()], vec![e0.clone()]), (vec![e1.clone()], vec![e0.clone()]), (vec![xe0], vec![e0.clone()])] {
                    parts.push(oracle_trans(spec, group.as_deref(), &x, &v, &w)?);
                }
            }
            merge("trans", spec, parts)
        }
        "tuples" => {
            let g = enumerate()?;
            let mut parts = Vec::new();
            let minus_one = f.neg(Fq::ONE);
            let polys = [PolyFq::new(vec![minus_one, Fq::ONE]), PolyFq::new(vec![Fq::ONE, Fq::ONE])];
            for c in g.classes().iter().filter(|c| c.support > 0).take(4) {
                for p in &polys {
                    match oracle_tuples(&g, c.representative, p, &units(n, 1)) {
                        Ok(r) => parts.push(r),
                        Err(Error::GuardExceeded(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
            merge("tuples", spec, parts)
        }
        "aprods" => {
            let group = maybe_group()?;
            let x = probe_element(spec, group.as_deref(), opts.seed)?;
            mc_aprods(spec, group.as_deref(), &x, (1, 2), &mc(group.as_deref()))?
        }
        "big-support" => {
            let group = maybe_group()?;
            let x = probe_element(spec, group.as_deref(), opts.seed)?;
            mc_support_growth(spec, group.as_deref(), &x, None, &mc(group.as_deref()))?
        }
        "sandwich" => sandwich_check(&*enumerate()?),
        "2ways" => two_ways_check(&*enumerate()?),
        "matrix-cent" => {
            let grid: Vec<(u32, u32)> = (1..10).map(|i| (i, 10)).collect();
            matrix_cent_check(&*enumerate()?, &grid)?
        }
        "alpha-eps" => alpha_eps_check(&*enumerate()?, &[(1, 2), (1, 3), (2, 5), (1, 4), (1, 5)])?,
        other => return Err(Error::Parse { input: other.to_string(), reason: format!("unknown claim id; expected one of {}", CLAIM_IDS.join(", ")) }),
    };
    let mut report = report;
    report.claim = id.to_string();
    if report.group.is_none() {
        report.group = Some(spec.to_string());
    }
    Ok(report)
}
