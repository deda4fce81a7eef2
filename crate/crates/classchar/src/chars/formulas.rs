//! Closed-form character data: hook unipotent degrees, Steinberg values, the
//! SL_n(2) character τ and the Plancherel measure.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{CharTable, Cyclotomic};
use crate::element::support;
use crate::error::{Error, Result};
use crate::forms::Family;
use crate::grp::EnumeratedGroup;
use crate::matspace::MatrixFq;
use crate::report::{BoundReport, BoundRow, Verdict};

/// Degree of the unipotent character labelled by the hook `(n−j, 1^j)`.
///
/// `eps = 1` for linear groups, `-1` for unitary groups over GF(q²).
pub fn hook_unipotent_degree(n: u32, q: u32, eps: i32, j: u32) -> Result<BigUint> {
    if n == 0 || j >= n {
        return Err(Error::OutOfRange(format!("hook index j={j} needs 0 <= j < n={n}")));
    }
    if eps != 1 && eps != -1 {
        return Err(Error::OutOfRange(format!("epsilon must be ±1, got {eps}")));
    }
    let q = BigInt::from(q);
    let term = |i: u32| -> BigInt {
        let e = if eps == -1 && i % 2 == 1 { -BigInt::one() } else { BigInt::one() };
        num_traits::pow(q.clone(), i as usize) - e
    };
    let mut num = num_traits::pow(q.clone(), (j * (j + 1) / 2) as usize);
    for i in (n - j)..n {
        num *= term(i);
    }
    let mut den = BigInt::one();
    for i in 1..=j {
        den *= term(i);
    }
    let (quot, rem) = num.div_rem(&den);
    if !rem.is_zero() {
        return Err(Error::Inconsistent(format!("hook degree is not integral for n={n}, j={j}")));
    }
    quot.abs().to_biguint().ok_or_else(|| Error::Inconsistent("negative hook degree".into()))
}

fn p_part(mut x: u64, p: u64) -> u64 {
    let mut out = 1;
    while x.is_multiple_of(p) {
        x /= p;
        out *= p;
    }
    out
}

/// `|St(g)| = |C_G(g)|_p` on every class of p′-elements.
pub fn steinberg_check(g: &EnumeratedGroup, table: &CharTable) -> Result<BoundReport> {
    let p = g.field().p() as u64;
    let st_deg = p_part(g.order(), p);
    let candidates: Vec<usize> = (0..table.num_chars()).filter(|&i| table.degrees[i] == st_deg).collect();
    if candidates.is_empty() {
        return Err(Error::SteinbergNotFound(st_deg.to_string()));
    }
    let mut report = BoundReport::new("steinberg", Some(g.spec.to_string()));
    let evaluate = |i: usize| -> Vec<BoundRow> {
        let mut rows = Vec::new();
        for j in 0..table.num_classes() {
            if table.class_orders[j].is_multiple_of(p) {
                continue;
            }
            let expect = p_part(g.class(j).centralizer_order, p);
            let sq = table.values[i][j].abs_sq();
            let ok = sq == Cyclotomic::from_int(1, expect * expect);
            let measured = sq.abs_f64().sqrt();
            rows.push(
                BoundRow::new(format!("class {j}"), measured, expect as f64, Verdict::from_bool(ok))
                    .with_margin(expect as f64 - measured),
            );
        }
        rows
    };
    let mut chosen = candidates[0];
    let mut rows = evaluate(chosen);
    if candidates.len() > 1 {
        report.note(format!("{} characters of degree {st_deg}; the Steinberg character is chosen by its values", candidates.len()));
        for &c in &candidates {
            let r = evaluate(c);
            if r.iter().all(|x| x.verdict == Verdict::Pass) {
                chosen = c;
                rows = r;
                break;
            }
        }
    }
    report.note(format!("Steinberg character X.{chosen}, degree {st_deg}"));
    for r in rows {
        report.push(r);
    }
    Ok(report)
}

/// The permutation character of SL_n(2) on F_2^n minus twice the trivial character.
pub fn sln2_tau_check(n: usize, g: &EnumeratedGroup, table: &CharTable) -> Result<BoundReport> {
    if g.spec.family != Family::SL || g.spec.n != n || g.field().q() != 2 {
        return Err(Error::UnsupportedFamily(format!("{} is not SL({n},2)", g.spec)));
    }
    let deg = (1u64 << n) - 2;
    let tau = (0..table.num_chars())
        .filter(|&i| table.degrees[i] == deg)
        .collect::<Vec<_>>();
    let mut report = BoundReport::new("sln2", Some(g.spec.to_string()));
    if tau.len() != 1 {
        report.note(format!("{} characters of degree {deg}", tau.len()));
    }
    let Some(&tau) = tau.first() else {
        report.push(BoundRow::new("tau", 0.0, deg as f64, Verdict::Fail).with_note("no character of degree 2^n-2"));
        return Ok(report);
    };
    let f = g.field();
    for j in 0..table.num_classes() {
        let m = g.element(g.class(j).representative);
        let fixed_dim = n - m.sub(&MatrixFq::identity(n), f).rank(f);
        let perm = (1i64 << fixed_dim) - 2;
        let value = &table.values[tau][j];
        let ok = *value == Cyclotomic::from_int(1, perm);
        let measured = value.to_rational().and_then(|r| r.to_f64()).unwrap_or(f64::NAN);
        report.push(BoundRow::new(format!("class {j} permutation"), measured, perm as f64, Verdict::from_bool(ok)));
        // the shape (1,…,1, ξ, ξ², …) with the rest a single irreducible block, or a transvection
        let prof = support(m, f);
        let s = prof.supp;
        let shaped = s >= 1 && fixed_dim == n - s && {
            let others: Vec<_> = prof.eigen_blocks.iter().filter(|b| b.factor.degree() != 1 || !is_x_minus_one(&b.factor)).collect();
            (s == 1 && others.is_empty()) || (others.len() == 1 && others[0].algebraic == 1 && others[0].factor.degree() as usize == s)
        };
        if shaped {
            let expect = (1i64 << (n - s)) - 2;
            let ok = *value == Cyclotomic::from_int(1, expect);
            report.push(BoundRow::new(format!("class {j} supp {s}"), measured, expect as f64, Verdict::from_bool(ok)));
        }
    }
    Ok(report)
}

fn is_x_minus_one(p: &crate::matspace::PolyFq) -> bool {
    p.degree() == 1 && p.coeffs().len() == 2 && p.coeffs()[1].0 == 1 && p.coeffs()[0].0 == 1
}

/// `π(χ) = χ(1)²/|G|`.
pub fn plancherel(table: &CharTable) -> Vec<BigRational> {
    let n = BigInt::from(table.order);
    table.degrees.iter().map(|&d| BigRational::new(BigInt::from(d) * BigInt::from(d), n.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::dixon_table;
    use crate::forms::GroupSpec;

    fn tab(s: &str) -> (EnumeratedGroup, CharTable) {
        let g = EnumeratedGroup::enumerate(&GroupSpec::parse(s).unwrap()).unwrap();
        let t = dixon_table(&g).unwrap();
        (g, t)
    }

    #[test]
    fn hook_degrees() {
        assert_eq!(hook_unipotent_degree(3, 2, 1, 1).unwrap(), BigUint::from(6u32));
        assert_eq!(hook_unipotent_degree(2, 3, 1, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(hook_unipotent_degree(3, 2, 1, 2).unwrap(), BigUint::from(8u32));
        assert_eq!(hook_unipotent_degree(3, 2, -1, 2).unwrap(), BigUint::from(8u32));
        assert_eq!(hook_unipotent_degree(5, 3, 1, 0).unwrap(), BigUint::one());
        assert!(hook_unipotent_degree(3, 2, 1, 3).is_err());
        // unitary: SU(3,3) has a unipotent character of degree q(q−1) = 6
        assert_eq!(hook_unipotent_degree(3, 3, -1, 1).unwrap(), BigUint::from(6u32));
        for n in 2..7u32 {
            for q in [2u32, 3, 4, 5] {
                assert_eq!(
                    hook_unipotent_degree(n, q, 1, n - 1).unwrap(),
                    num_traits::pow(BigUint::from(q), (n * (n - 1) / 2) as usize)
                );
            }
        }
    }

    #[test]
    fn hook_degrees_appear_in_tables() {
        let (_, t) = tab("SL(3,2)");
        assert!(t.degrees.contains(&6) && t.degrees.contains(&8));
        let (_, t) = tab("SL(3,3)");
        for j in 0..3 {
            let d = hook_unipotent_degree(3, 3, 1, j).unwrap().to_u64().unwrap();
            assert!(t.degrees.contains(&d), "degree {d}");
        }
        let (_, t) = tab("SU(3,3)");
        for j in 0..3 {
            let d = hook_unipotent_degree(3, 3, -1, j).unwrap().to_u64().unwrap();
            assert!(t.degrees.contains(&d), "degree {d}");
        }
    }

    #[test]
    fn steinberg_values() {
        for s in ["SL(2,3)", "SL(3,2)", "SL(2,5)", "Sp(4,2)"] {
            let (g, t) = tab(s);
            let r = steinberg_check(&g, &t).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{s}");
        }
        let (g, t) = tab("SL(2,3)");
        let order4 = (0..t.num_classes()).find(|&j| t.class_orders[j] == 4).unwrap();
        let st = t.degrees.iter().position(|&d| d == 3).unwrap();
        assert_eq!(t.values[st][order4].abs_sq(), Cyclotomic::one(1));
        assert_eq!(g.class(order4).centralizer_order, 4);
    }

    #[test]
    fn tau_on_sl32() {
        let (g, t) = tab("SL(3,2)");
        let r = sln2_tau_check(3, &g, &t).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let tau = t.degrees.iter().position(|&d| d == 6).unwrap();
        let seven = (0..t.num_classes()).find(|&j| t.class_orders[j] == 7).unwrap();
        assert_eq!(t.values[tau][seven], Cyclotomic::from_int(1, -1));
        let transvection = (0..t.num_classes()).find(|&j| g.class(j).support == 1 && t.class_orders[j] == 2).unwrap();
        assert_eq!(t.values[tau][transvection], Cyclotomic::from_int(1, 2));
        assert!(r.rows.iter().any(|row| row.label.contains("supp 1")));
    }

    #[test]
    fn plancherel_sums_to_one() {
        let (_, t) = tab("SL(2,2)");
        let p = plancherel(&t);
        assert_eq!(p[2], BigRational::new(4.into(), 6.into()));
        assert_eq!(p.iter().fold(BigRational::zero(), |a, b| a + b), BigRational::one());
    }
}
