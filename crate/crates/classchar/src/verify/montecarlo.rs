//! Monte Carlo harnesses for products of random conjugates and random images
//! of fixed vectors.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::conjugate_product_counts;
use super::linear::max_kernel_dim;
use crate::element::support;
use crate::error::{Error, Result};
use crate::forms::{Family, GroupSpec};
use crate::grp::{EnumeratedGroup, ProductReplacement, SampleMode};
use crate::matspace::{span_dim, unit_vector, MatrixFq};
use crate::report::{BoundReport, BoundRow, Verdict};

#[derive(Clone, Debug)]
pub struct McOptions {
    pub trials: usize,
    pub seed: u64,
    pub mode: SampleMode,
    /// Trials per RNG substream.
    pub block: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions { trials: 10_000, seed: 0, mode: SampleMode::ProductReplacement, block: 1000 }
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

pub(crate) const Z95: f64 = 1.959963984540054;

/// Runs `trial` over `opts.trials` draws, parallel over blocks with one RNG
/// substream per block, merged in block order.
pub(crate) fn run_blocks<T: Send>(
    spec: &GroupSpec,
    group: Option<&EnumeratedGroup>,
    opts: &McOptions,
    trial: impl Fn(&mut dyn FnMut() -> (MatrixFq, MatrixFq)) -> T + Sync,
) -> Result<Vec<T>> {
    if opts.mode == SampleMode::UniformExact && group.is_none() {
        return Err(Error::CapExceeded { order: spec.order().to_string(), cap: 0 });
    }
    let block = opts.block.max(1);
    let blocks = opts.trials.div_ceil(block);
    let field = spec.field.clone();
    let results: Vec<Result<Vec<T>>> = (0..blocks)
        .into_par_iter()
        .map(|bi| {
            let count = block.min(opts.trials - bi * block);
            let mut draw: Box<dyn FnMut() -> (MatrixFq, MatrixFq)> = match (opts.mode, group) {
                (SampleMode::UniformExact, Some(g)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                    rng.set_stream(bi as u64);
                    Box::new(move || {
                        let x = g.sample(&mut rng);
                        (g.element(x).clone(), g.element(g.inv(x)).clone())
                    })
                }
                _ => {
                    let mut pr = ProductReplacement::with_stream(spec, opts.seed, bi as u64)?;
                    let field = field.clone();
                    Box::new(move || {
                        let x = pr.next_element();
                        let inv = x.inverse(&field).expect("invertible");
                        (x, inv)
                    })
                }
            };
            Ok((0..count).map(|_| trial(&mut *draw)).collect())
        })
        .collect();
    let mut out = Vec::with_capacity(opts.trials);
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// The b from the support-growth argument: 1 when 6s ≥ n, else b ≥ 2 with n/3 ≤ bs < n/2.
pub fn big_support_b(n: usize, s: usize) -> u32 {
    if s == 0 {
        return 1;
    }
    if 6 * s >= n {
        return 1;
    }
    let b = (2..).find(|&b| 3 * b * s >= n).unwrap();
    b as u32
}

pub(crate) fn conj_product(g: &MatrixFq, b: u32, draw: &mut dyn FnMut() -> (MatrixFq, MatrixFq), f: &crate::field::FieldSpec) -> Vec<MatrixFq> {
    let mut prefixes = Vec::with_capacity(b as usize);
    let mut acc: Option<MatrixFq> = None;
    for _ in 0..b {
        let (x, xi) = draw();
        let c = xi.mul(g, f).mul(&x, f);
        let next = match acc {
            None => c,
            Some(a) => c.mul(&a, f),
        };
        prefixes.push(next.clone());
        acc = Some(next);
    }
    prefixes
}

fn median(hist: &[u64]) -> f64 {
    let total: u64 = hist.iter().sum();
    let mut seen = 0;
    for (v, &c) in hist.iter().enumerate() {
        seen += c;
        if 2 * seen >= total {
            return v as f64;
        }
    }
    f64::NAN
}

fn event_row(label: &str, hits: u64, trials: u64, bound: f64, verdict: Verdict) -> BoundRow {
    let (lo, hi) = wilson_interval(hits, trials, Z95);
    let freq = hits as f64 / trials.max(1) as f64;
    BoundRow::new(label, freq, bound, verdict).with_note(format!("{hits}/{trials}, 95% Wilson [{lo:.6}, {hi:.6}]"))
}

/// Support of products of b random conjugates of g: the event `supp < n/9`,
/// the support histogram, and the median support as b grows.
pub fn mc_support_growth(spec: &GroupSpec, group: Option<&EnumeratedGroup>, g: &MatrixFq, b: Option<u32>, opts: &McOptions) -> Result<BoundReport> {
    let f = spec.field();
    let n = spec.n;
    let s = support(g, f).supp;
    if s == 0 {
        return Err(Error::OutOfRange("g is scalar".into()));
    }
    let b = b.unwrap_or_else(|| big_support_b(n, s)).max(1);
    let depth = b.max(4);
    let supports: Vec<Vec<usize>> = run_blocks(spec, group, opts, |draw| {
        conj_product(g, depth, draw, f).iter().map(|h| support(h, f).supp).collect()
    })?;
    let trials = supports.len() as u64;
    let mut hist = vec![vec![0u64; n + 1]; depth as usize];
    for row in &supports {
        for (i, &sp) in row.iter().enumerate() {
            hist[i][sp] += 1;
        }
    }
    let hits = hist[b as usize - 1].iter().enumerate().filter(|(v, _)| 9 * v < n).map(|(_, c)| c).sum::<u64>();
    let q = spec.q_module() as f64;
    let nn = (n * n) as f64;
    let bound = if spec.family == Family::SL { q.powf(-nn / 20.0) } else { q.powf(-nn / 40.0) };
    let mut report = BoundReport::new("big-support", Some(spec.to_string()));
    report.push(event_row(&format!("supp < n/9, b={b}, supp(g)={s}"), hits, trials, bound, Verdict::Observational));
    let medians: Vec<f64> = hist.iter().map(|h| median(h)).collect();
    for (i, m) in medians.iter().enumerate() {
        report.push(BoundRow::new(format!("median supp b={}", i + 1), *m, n as f64, Verdict::Observational));
    }
    let span = mc_span_dimension(spec, group, 1, ((n / 2) as u32).max(2), opts)?;
    for row in span.rows {
        report.push(row);
    }
    report.data = serde_json::json!({
        "b": b,
        "support_of_g": s,
        "mode": opts.mode,
        "seed": opts.seed,
        "histograms": hist,
        "medians": medians,
    });
    Ok(report)
}

/// Frequency of `dim Span(X_i v_j) ≤ 2bk/3` for uniform X_1..X_b and v_j = e_j.
pub fn mc_span_dimension(spec: &GroupSpec, group: Option<&EnumeratedGroup>, k: usize, b: u32, opts: &McOptions) -> Result<BoundReport> {
    let f = spec.field();
    let n = spec.n;
    let vs: Vec<_> = (0..k.min(n)).map(|j| unit_vector(n, j)).collect();
    let dims: Vec<usize> = run_blocks(spec, group, opts, |draw| {
        let mut images = Vec::with_capacity(b as usize * vs.len());
        for _ in 0..b {
            let (x, _) = draw();
            images.extend(vs.iter().map(|v| x.apply(v, f)));
        }
        span_dim(&images, f)
    })?;
    let bk = b as usize * k;
    let hits = dims.iter().filter(|&&d| 3 * d <= 2 * bk).count() as u64;
    let q = spec.q_module() as f64;
    let scale = if spec.family == Family::SL { 6.0 } else { 12.0 };
    let bound = q.powf(bk as f64 * (1.0 - n as f64 / scale));
    let hypothesis = b >= 2 && 2 * bk <= n;
    let mut report = BoundReport::new("usually-almost-indep", Some(spec.to_string()));
    let verdict = if hypothesis { Verdict::Observational } else { Verdict::Vacuous };
    report.push(event_row(&format!("dim span <= 2bk/3, b={b}, k={k}"), hits, dims.len() as u64, bound, verdict));
    Ok(report)
}

/// Frequency of a polynomial of degree < ⌈1/ε⌉ with `dim Ker P(h) ≥ εn` on a
/// product h of `⌈n/s⌉` random conjugates.
pub fn mc_aprods(spec: &GroupSpec, group: Option<&EnumeratedGroup>, g: &MatrixFq, eps: (u32, u32), opts: &McOptions) -> Result<BoundReport> {
    let f = spec.field();
    let n = spec.n;
    let s = support(g, f).supp;
    if s == 0 {
        return Err(Error::OutOfRange("g is scalar".into()));
    }
    let (num, den) = eps;
    if num == 0 || num >= den {
        return Err(Error::OutOfRange(format!("ε = {num}/{den} must lie in (0, 1)")));
    }
    let d = (den.div_ceil(num) as usize).max(2);
    if (f.q() as f64).powi(d as i32 - 1) > 1e4 {
        return Err(Error::GuardExceeded(format!("q^{} polynomials per trial", d - 1)));
    }
    let b = n.div_ceil(s) as u32;
    let hits = run_blocks(spec, group, opts, |draw| {
        let h = conj_product(g, b, draw, f).pop().unwrap();
        let (k, _) = max_kernel_dim(&h, d, f);
        (k as u64) * den as u64 >= num as u64 * n as u64
    })?;
    let trials = hits.len() as u64;
    let hits = hits.iter().filter(|&&x| x).count() as u64;
    let e = num as f64 / den as f64;
    let dd = d as f64;
    let q = spec.q_module() as f64;
    let (c0, denom, need) = if spec.family == Family::SL { (3.0, 18.0, 8.0) } else { (2.0, 31.0, 23.0) };
    let bound = q.powf(c0 + dd - e * e * (n * s) as f64 / (denom * dd * dd));
    let hypothesis = n > s && s as f64 >= need * dd * dd / e;
    let mut report = BoundReport::new("aprods", Some(spec.to_string()));
    let verdict = if hypothesis { Verdict::Observational } else { Verdict::Vacuous };
    report.push(event_row(&format!("eps={num}/{den} d={d} b={b} supp(g)={s}"), hits, trials, bound, verdict));
    Ok(report)
}

/// Exact distribution of supp over products of b conjugates of class c.
pub fn exact_support_distribution(g: &EnumeratedGroup, class: usize, b: u32) -> Vec<BigRational> {
    let counts = conjugate_product_counts(g, class, b);
    let total = Pow::pow(BigInt::from(g.class(class).size), b);
    let mut out = vec![BigInt::from(0); g.spec.n + 1];
    for (k, c) in counts.into_iter().enumerate() {
        out[g.class(k).support] += c;
    }
    out.into_iter().map(|c| BigRational::new(c, total.clone())).collect()
}

/// Monte Carlo support histogram against the exact distribution, each
/// probability within three Wilson half-widths.
pub fn mc_vs_exact_support(g: &EnumeratedGroup, class: usize, b: u32, opts: &McOptions) -> Result<BoundReport> {
    let f = g.field();
    let x = g.element(g.class(class).representative).clone();
    let opts = McOptions { mode: SampleMode::UniformExact, ..opts.clone() };
    let sup: Vec<usize> = run_blocks(&g.spec, Some(g), &opts, |draw| {
        support(conj_product(&x, b, draw, f).last().unwrap(), f).supp
    })?;
    let exact = exact_support_distribution(g, class, b);
    let trials = sup.len() as u64;
    let mut report = BoundReport::new("support-distribution", Some(g.spec.to_string()));
    for (v, p) in exact.iter().enumerate() {
        let hits = sup.iter().filter(|&&s| s == v).count() as u64;
        let (lo, hi) = wilson_interval(hits, trials, Z95);
        let half = (hi - lo) / 2.0;
        let p = p.to_f64().unwrap();
        let freq = hits as f64 / trials as f64;
        let ok = (freq - p).abs() <= 3.0 * half.max(1.0 / trials as f64);
        report.push(
            BoundRow::new(format!("class {class} b={b} supp={v}"), freq, p, Verdict::from_bool(ok))
                .with_margin(3.0 * half - (freq - p).abs()),
        );
    }
    Ok(report)
}
