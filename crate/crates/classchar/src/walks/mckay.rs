//! McKay graphs, the Plancherel-stationary walk on them, and products of
//! irreducible characters.

use std::cmp::Ordering;
use std::collections::VecDeque;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::chars::{CharTable, Cyclotomic, LevelSum};
use crate::error::{Error, Result};
use crate::report::{ser_rational, ser_rational_vec, BoundReport, BoundRow, Verdict};
use crate::verify::BoundConstants;

fn check_char(t: &CharTable, chi: usize) -> Result<()> {
    if chi >= t.num_chars() {
        return Err(Error::OutOfRange(format!("character {chi} not in a table with {} characters", t.num_chars())));
    }
    Ok(())
}

fn trivial(t: &CharTable) -> usize {
    (0..t.num_chars()).find(|&i| t.is_trivial(i)).unwrap_or(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct McKayGraph {
    pub group: String,
    pub character: usize,
    /// `⟨χχ_a, χ_b⟩`; an edge a → b when positive.
    pub multiplicity: Vec<Vec<u64>>,
    /// Directed BFS distances; `None` when unreachable.
    pub distances: Vec<Vec<Option<usize>>>,
    pub connected: bool,
    pub faithful: bool,
    pub diameter: Option<usize>,
    /// `log|G| / log χ(1)`.
    pub log_ratio: f64,
    /// `γ·log|G|/log χ(1)` with the McKay constant γ.
    pub diameter_bound: f64,
}

impl McKayGraph {
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.multiplicity[a][b] > 0
    }

    /// Set when the graph is disconnected.
    pub fn not_faithful(&self) -> bool {
        !self.connected
    }

    pub fn to_bound_report(&self, t: &CharTable) -> BoundReport {
        let mut r = BoundReport::new("mckay", Some(self.group.clone()));
        r.push(BoundRow::new("connected iff faithful", self.connected as u8 as f64, self.faithful as u8 as f64, Verdict::from_bool(self.connected == self.faithful)));
        let d = t.degree(self.character);
        let sums_ok = (0..t.num_chars()).all(|a| {
            let s: u64 = (0..t.num_chars()).map(|b| self.multiplicity[a][b] * t.degree(b)).sum();
            s == d * t.degree(a)
        });
        r.push(BoundRow::new("degree sums", 0.0, 0.0, Verdict::from_bool(sums_ok)));
        let first = first_constituent_powers(t, self.character, t.num_chars());
        let triv = trivial(t);
        let dist_ok = first == self.distances[triv];
        r.push(BoundRow::new("distance from trivial equals first power", 0.0, 0.0, Verdict::from_bool(dist_ok)));
        let diam = self.diameter.map_or(f64::NAN, |x| x as f64);
        r.push(BoundRow::new("diameter", diam, self.diameter_bound, Verdict::Observational).with_note(format!("log|G|/log χ(1) = {:.4}", self.log_ratio)));
        if self.not_faithful() {
            r.note("NotFaithful: the McKay graph is disconnected");
        }
        r.data = serde_json::to_value(self).unwrap_or_default();
        r
    }
}

pub fn mckay_graph(t: &CharTable, chi: usize) -> Result<McKayGraph> {
    check_char(t, chi)?;
    let k = t.num_chars();
    let multiplicity = t.tensor_matrix(chi);
    let distances: Vec<Vec<Option<usize>>> = (0..k)
        .map(|a| {
            let mut dist = vec![None; k];
            dist[a] = Some(0);
            let mut queue = VecDeque::from([a]);
            while let Some(x) = queue.pop_front() {
                let dx = dist[x].unwrap();
                for y in 0..k {
                    if multiplicity[x][y] > 0 && dist[y].is_none() {
                        dist[y] = Some(dx + 1);
                        queue.push_back(y);
                    }
                }
            }
            dist
        })
        .collect();
    let connected = distances.iter().all(|row| row.iter().all(Option::is_some));
    let diameter = connected.then(|| distances.iter().flatten().map(|d| d.unwrap()).max().unwrap_or(0));
    let log_ratio = (t.order as f64).ln() / (t.degree(chi) as f64).ln();
    Ok(McKayGraph {
        group: t.group.clone(),
        character: chi,
        multiplicity,
        distances,
        connected,
        faithful: t.is_faithful(chi),
        diameter,
        log_ratio,
        diameter_bound: BoundConstants::default().mckay_gamma.to_f64() * log_ratio,
    })
}

fn times_matrix(v: &[BigUint], m: &[Vec<u64>]) -> Vec<BigUint> {
    let k = v.len();
    (0..k).map(|b| (0..k).fold(BigUint::zero(), |acc, a| acc + &v[a] * m[a][b])).collect()
}

/// For each θ, the least j ≤ m_max with `⟨χ^j, θ⟩ > 0`.
pub fn first_constituent_powers(t: &CharTable, chi: usize, m_max: usize) -> Vec<Option<usize>> {
    let m = t.tensor_matrix(chi);
    let k = t.num_chars();
    let mut v = vec![BigUint::zero(); k];
    v[trivial(t)] = BigUint::one();
    let mut first = vec![None; k];
    for j in 0..=m_max {
        for (th, slot) in first.iter_mut().enumerate() {
            if slot.is_none() && !v[th].is_zero() {
                *slot = Some(j);
            }
        }
        v = times_matrix(&v, &m);
    }
    first
}

/// Least m ∈ 1..=m_max with every irreducible a constituent of χ^m.
pub fn covering_number(t: &CharTable, chi: usize, m_max: usize) -> Option<usize> {
    let m = t.tensor_matrix(chi);
    let k = t.num_chars();
    let mut v = vec![BigUint::zero(); k];
    v[trivial(t)] = BigUint::one();
    for j in 1..=m_max {
        v = times_matrix(&v, &m);
        if v.iter().all(|x| !x.is_zero()) {
            return Some(j);
        }
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct McKayStep {
    pub l: usize,
    #[serde(serialize_with = "ser_rational_vec")]
    pub distribution: Vec<BigRational>,
    /// `½ Σ_β |K^l(β) − π(β)|`.
    #[serde(serialize_with = "ser_rational")]
    pub tv_half: BigRational,
    /// `Σ_{C≠1} |χ/χ(1)|^{2l} |C| |α/α(1)|²`.
    pub fourier_bound: f64,
    /// `4‖K^l − π‖² ≤` the bound; `None` when the sign is not certified.
    pub bound_holds: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct McKayWalk {
    pub group: String,
    pub character: usize,
    pub start: usize,
    pub steps: Vec<McKayStep>,
    /// The class-sum closed form equals powers of the transition matrix.
    pub closed_form_agrees: bool,
    /// One step from the Plancherel measure returns it.
    pub stationary: bool,
    pub normalized: bool,
}

impl McKayWalk {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,tv_half,fourier_bound\n");
        for s in &self.steps {
            out.push_str(&format!("{},{:.12},{:.6e}\n", s.l, s.tv_half.to_f64().unwrap(), s.fourier_bound));
        }
        out
    }

    pub fn to_bound_report(&self) -> BoundReport {
        let mut r = BoundReport::new("mckay-walk", Some(self.group.clone()));
        r.push(BoundRow::new("closed form equals transition powers", 0.0, 0.0, Verdict::from_bool(self.closed_form_agrees)));
        r.push(BoundRow::new("plancherel stationary", 0.0, 0.0, Verdict::from_bool(self.stationary)));
        r.push(BoundRow::new("distributions sum to one", 0.0, 0.0, Verdict::from_bool(self.normalized)));
        for s in &self.steps {
            let tv = s.tv_half.to_f64().unwrap();
            let verdict = match s.bound_holds {
                Some(ok) => Verdict::from_bool(ok),
                None => Verdict::Advisory,
            };
            r.push(BoundRow::new(format!("l={} fourier bound", s.l), 4.0 * tv * tv, s.fourier_bound, verdict));
        }
        r.data = serde_json::to_value(self).unwrap_or_default();
        r
    }
}

/// The l-step distributions of the McKay walk of χ from α, for l = 0..=l_max.
pub fn mckay_walk(t: &CharTable, chi: usize, start: usize, l_max: usize) -> Result<McKayWalk> {
    check_char(t, chi)?;
    check_char(t, start)?;
    let k = t.num_chars();
    let r = t.num_classes();
    let m = t.tensor_matrix(chi);
    let d = |i: usize| BigInt::from(t.degree(i));
    let dchi = d(chi);
    let trans: Vec<Vec<BigRational>> = (0..k)
        .map(|a| (0..k).map(|b| BigRational::new(BigInt::from(m[a][b]) * d(b), &dchi * d(a))).collect())
        .collect();
    let step = |p: &[BigRational]| -> Vec<BigRational> {
        (0..k).map(|b| (0..k).fold(BigRational::zero(), |acc, a| acc + &p[a] * &trans[a][b])).collect()
    };
    let order = BigInt::from(t.order);
    let pi: Vec<BigRational> = (0..k).map(|i| BigRational::new(d(i) * d(i), order.clone())).collect();
    let stationary = step(&pi) == pi;

    let id = t.identity_class();
    let conj: Vec<Vec<Cyclotomic>> = t.values.iter().map(|row| row.iter().map(|v| v.conj()).collect()).collect();
    let abs_chi: Vec<Cyclotomic> = (0..r).map(|c| t.value(chi, c).abs_sq()).collect();
    let abs_alpha: Vec<Cyclotomic> = (0..r).map(|c| t.value(start, c).abs_sq()).collect();
    // |C|·χ(C)^l·α(C), updated in place
    let mut weighted: Vec<Cyclotomic> =
        (0..r).map(|c| t.value(start, c).scale_int(&BigInt::from(t.class_sizes[c]))).collect();
    let mut abs_pow: Vec<Cyclotomic> = (0..r).map(|_| Cyclotomic::one(1)).collect();

    let mut dist: Vec<BigRational> = (0..k).map(|i| if i == start { BigRational::one() } else { BigRational::zero() }).collect();
    let mut steps = Vec::with_capacity(l_max + 1);
    let mut closed_form_agrees = true;
    let mut normalized = true;
    for l in 0..=l_max {
        let dl = Pow::pow(&dchi, l as u32);
        let closed: Vec<Option<BigRational>> = (0..k)
            .into_par_iter()
            .map(|b| {
                let mut acc = LevelSum::default();
                for c in 0..r {
                    acc.add_value(&(&weighted[c] * &conj[b][c]));
                }
                acc.finish_lcm()
                    .to_rational()
                    .map(|v| v * BigRational::new(d(b), &order * &dl * d(start)))
            })
            .collect();
        closed_form_agrees &= closed.iter().zip(&dist).all(|(a, b)| a.as_ref() == Some(b));
        normalized &= dist.iter().fold(BigRational::zero(), |acc, x| acc + x).is_one();

        let tv_half = dist.iter().zip(&pi).fold(BigRational::zero(), |acc, (a, b)| acc + (a - b).abs()) / BigInt::from(2);
        let mut acc = LevelSum::default();
        for c in (0..r).filter(|&c| c != id) {
            acc.add(&(&abs_pow[c] * &abs_alpha[c]), &BigInt::from(t.class_sizes[c]));
        }
        let da = d(start);
        let rhs = acc.finish_lcm().scale(&BigRational::new(BigInt::one(), &dl * &dl * &da * &da));
        let lhs = &tv_half * &tv_half * BigInt::from(4);
        let diff = &rhs - &Cyclotomic::from_rational(rhs.level(), &lhs);
        let bound_holds = diff.real_sign().map(|o| o != Ordering::Less);
        steps.push(McKayStep { l, fourier_bound: rhs.to_complex().0, distribution: dist.clone(), tv_half, bound_holds });

        dist = step(&dist);
        weighted = weighted.iter().enumerate().map(|(c, w)| w * t.value(chi, c)).collect();
        abs_pow = abs_pow.iter().zip(&abs_chi).map(|(p, a)| p * a).collect();
    }
    Ok(McKayWalk { group: t.group.clone(), character: chi, start, steps, closed_form_agrees, stationary, normalized })
}

/// Multiplicities `⟨χ₁⋯χ_m, θ⟩` by two exact routes, coverage of Irr(G), and the
/// covering number of each listed character up to `m_max`.
pub fn character_products_check(t: &CharTable, chis: &[usize], m_max: usize) -> Result<BoundReport> {
    for &c in chis {
        check_char(t, c)?;
    }
    let k = t.num_chars();
    let r = t.num_classes();
    let mut report = BoundReport::new("char-products", Some(t.group.clone()));
    let mut v = vec![BigUint::zero(); k];
    v[trivial(t)] = BigUint::one();
    let mut prod: Vec<Cyclotomic> = (0..r).map(|_| Cyclotomic::one(1)).collect();
    for &c in chis {
        v = times_matrix(&v, &t.tensor_matrix(c));
        prod = prod.iter().enumerate().map(|(j, p)| p * t.value(c, j)).collect();
    }
    for th in 0..k {
        let ip = t.inner_product(&prod, &t.values[th]).to_rational();
        let expected = BigRational::from_integer(BigInt::from(v[th].clone()));
        let ok = ip.as_ref() == Some(&expected) && !expected.is_negative();
        report.push(BoundRow::new(format!("theta {th} multiplicity"), v[th].to_f64().unwrap_or(f64::INFINITY), 0.0, Verdict::from_bool(ok)).with_margin(0.0));
    }
    let lg = (t.order as f64).ln();
    let delta: f64 = chis.iter().map(|&c| (t.degree(c) as f64).ln()).sum::<f64>() / lg;
    let covered = v.iter().all(|x| !x.is_zero());
    report.push(
        BoundRow::new("product covers Irr(G)", delta, f64::NAN, Verdict::Observational)
            .with_note(if covered { "covered" } else { "not covered" }),
    );
    let mut seen = Vec::new();
    for &c in chis {
        if seen.contains(&c) {
            continue;
        }
        seen.push(c);
        let cn = covering_number(t, c, m_max);
        report.push(
            BoundRow::new(format!("covering number chi {c}"), cn.map_or(f64::NAN, |x| x as f64), lg / (t.degree(c) as f64).ln(), Verdict::Observational)
                .with_note(match cn {
                    Some(x) => format!("m = {x}"),
                    None => format!("not covered by m ≤ {m_max}"),
                }),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::dixon_table;
    use crate::forms::GroupSpec;
    use crate::grp::EnumeratedGroup;

    fn table(s: &str) -> CharTable {
        let g = EnumeratedGroup::enumerate(&GroupSpec::parse(s).unwrap()).unwrap();
        dixon_table(&g).unwrap()
    }

    #[test]
    fn trivial_character_has_only_loops() {
        let t = table("SL(2,3)");
        let g = mckay_graph(&t, 0).unwrap();
        assert!(g.not_faithful() && !g.faithful);
        for a in 0..t.num_chars() {
            for b in 0..t.num_chars() {
                assert_eq!(g.has_edge(a, b), a == b);
            }
        }
        assert!(g.to_bound_report(&t).passed());
    }

    #[test]
    fn sl23_faithful_degree_two() {
        let t = table("SL(2,3)");
        let faithful: Vec<usize> = (0..t.num_chars()).filter(|&i| t.degree(i) == 2 && t.is_faithful(i)).collect();
        assert_eq!(faithful.len(), 3);
        for &chi in &faithful {
            let g = mckay_graph(&t, chi).unwrap();
            assert!(g.connected);
            assert_eq!(g.diameter, Some(4));
            assert!(g.to_bound_report(&t).passed());
        }
        // the Steinberg character kills the center
        let st = (0..t.num_chars()).find(|&i| t.degree(i) == 3).unwrap();
        let g = mckay_graph(&t, st).unwrap();
        assert!(!g.connected && !g.faithful);
        assert_eq!(covering_number(&t, st, 10), None);
    }

    #[test]
    fn walk_from_trivial_follows_constituents() {
        let t = table("SL(3,2)");
        let chi = (0..t.num_chars()).find(|&i| t.degree(i) == 6).unwrap();
        let w = mckay_walk(&t, chi, 0, 12).unwrap();
        assert!(w.closed_form_agrees && w.stationary && w.normalized);
        assert_eq!(w.steps[0].distribution[0], BigRational::one());
        // one step from 1_G is χ(1)-weighted on the constituents of χ
        for b in 0..t.num_chars() {
            let expect = if b == chi { BigRational::one() } else { BigRational::zero() };
            assert_eq!(w.steps[1].distribution[b], expect);
        }
        for s in &w.steps {
            assert_eq!(s.bound_holds, Some(true), "l={}", s.l);
        }
        for pair in w.steps.windows(2).skip(1) {
            assert!(pair[1].tv_half <= pair[0].tv_half);
        }
        assert!(w.to_bound_report().passed());
    }

    #[test]
    fn products_and_covering() {
        let t = table("SL(3,2)");
        let r = character_products_check(&t, &[1, 2], 6).unwrap();
        assert!(r.passed());
        let chi = (0..t.num_chars()).find(|&i| t.degree(i) == 7).unwrap();
        let cn = covering_number(&t, chi, 6).unwrap();
        let first = first_constituent_powers(&t, chi, 6);
        assert!(first.iter().map(|x| x.unwrap()).max().unwrap() <= cn);
        // a single irreducible covers only when the group is trivial
        let single = character_products_check(&t, &[chi], 1).unwrap();
        assert!(single.rows.iter().any(|row| row.note.as_deref() == Some("not covered")));
    }
}
