//! Character tables by the Dixon–Schneider method, with exact cyclotomic values.

pub mod cyclotomic;
pub mod formulas;
pub mod modp;

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use cyclotomic::{Cyclotomic, LevelSum};
pub use formulas::{hook_unipotent_degree, plancherel, sln2_tau_check, steinberg_check};

use crate::error::{Error, Result};
use crate::grp::EnumeratedGroup;
use modp::{inv_mod, mul_mod, pow_mod, sub_mod, ModMatrix};

pub const TABLE_SCHEMA: &str = "classchar-chartable-v1";

/// Irreducible characters of an enumerated group, one row per character.
///
/// Rows are sorted by degree, with the trivial character first and ties
/// broken by the tuple of values. Values at class `j` are stored at level
/// equal to the order of the class representative.
#[derive(Clone, Debug)]
pub struct CharTable {
    pub group: String,
    pub order: u64,
    pub exponent: u64,
    pub class_sizes: Vec<u64>,
    pub class_orders: Vec<u64>,
    pub inverse_class: Vec<usize>,
    /// `power_map[j][t]` is the class of `g_j^t`, for `0 ≤ t < o(g_j)`.
    pub power_map: Vec<Vec<usize>>,
    pub degrees: Vec<u64>,
    pub values: Vec<Vec<Cyclotomic>>,
    /// Prime `ℓ ≡ 1 (mod exponent)` used for the modular computation.
    pub prime: u64,
    /// Image of `ζ_e` in GF(ℓ).
    pub root: u64,
    pub values_mod: Vec<Vec<u64>>,
}

impl CharTable {
    pub fn num_chars(&self) -> usize {
        self.degrees.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn degree(&self, i: usize) -> u64 {
        self.degrees[i]
    }

    pub fn value(&self, i: usize, j: usize) -> &Cyclotomic {
        &self.values[i][j]
    }

    pub fn identity_class(&self) -> usize {
        self.class_orders.iter().position(|&o| o == 1).unwrap_or(0)
    }

    pub fn is_trivial(&self, i: usize) -> bool {
        self.degrees[i] == 1 && self.values_mod[i].iter().all(|&v| v == 1)
    }

    /// Image in GF(ℓ) of a cyclotomic whose level divides the exponent.
    pub fn image_mod(&self, x: &Cyclotomic) -> u64 {
        image_mod(x, self.exponent, self.prime, self.root)
    }

    /// Classes on which χ_i takes the value χ_i(1).
    pub fn kernel(&self, i: usize) -> Vec<usize> {
        let d = Cyclotomic::from_int(1, self.degrees[i]);
        (0..self.num_classes()).filter(|&j| self.values[i][j] == d).collect()
    }

    pub fn is_faithful(&self, i: usize) -> bool {
        self.kernel(i).len() == 1
    }

    /// Perfect, and every nontrivial irreducible has a central kernel.
    pub fn is_quasisimple(&self) -> bool {
        let linear = self.degrees.iter().filter(|&&d| d == 1).count();
        linear == 1
            && (0..self.num_chars())
                .filter(|&i| !self.is_trivial(i))
                .all(|i| self.kernel(i).iter().all(|&j| self.class_sizes[j] == 1))
    }

    /// `(1/|G|) Σ_j |C_j| a_j conj(b_j)` for class functions with values at the class levels.
    pub fn inner_product(&self, a: &[Cyclotomic], b: &[Cyclotomic]) -> Cyclotomic {
        let mut acc = LevelSum::default();
        for j in 0..self.num_classes() {
            acc.add(&(&a[j] * &b[j].conj()), &BigInt::from(self.class_sizes[j]));
        }
        acc.finish(self.exponent as u32).scale(&BigRational::new(BigInt::one(), BigInt::from(self.order)))
    }

    /// Inner product of class functions given by their GF(ℓ) images.
    pub fn inner_product_mod(&self, a: &[u64], b: &[u64]) -> u64 {
        let l = self.prime;
        let mut acc = 0u64;
        for j in 0..self.num_classes() {
            let t = mul_mod(mul_mod(self.class_sizes[j] % l, a[j], l), b[self.inverse_class[j]], l);
            acc = modp::add_mod(acc, t, l);
        }
        mul_mod(acc, inv_mod(self.order % l, l), l)
    }

    /// `⟨χ_a χ_b, χ_c⟩`, an exact nonnegative integer.
    pub fn tensor_multiplicity(&self, a: usize, b: usize, c: usize) -> u64 {
        let l = self.prime;
        let prod: Vec<u64> =
            (0..self.num_classes()).map(|j| mul_mod(self.values_mod[a][j], self.values_mod[b][j], l)).collect();
        self.inner_product_mod(&prod, &self.values_mod[c])
    }

    /// Multiplicities of each irreducible in a character given by GF(ℓ) values.
    pub fn decompose_mod(&self, values: &[u64]) -> Vec<u64> {
        (0..self.num_chars()).map(|c| self.inner_product_mod(values, &self.values_mod[c])).collect()
    }

    /// Both orthogonality relations and the degree sum, with exact arithmetic.
    pub fn check_orthogonality(&self) -> Result<()> {
        let k = self.num_classes();
        if self.num_chars() != k {
            return Err(Error::Inconsistent(format!("{} characters for {k} classes", self.num_chars())));
        }
        let sum_sq: u128 = self.degrees.iter().map(|&d| d as u128 * d as u128).sum();
        if sum_sq != self.order as u128 {
            return Err(Error::Inconsistent(format!("sum of squared degrees {sum_sq} != {}", self.order)));
        }
        let conj: Vec<Vec<Cyclotomic>> = self.values.iter().map(|row| row.iter().map(|v| v.conj()).collect()).collect();
        for a in 0..k {
            for b in a..k {
                let mut acc = LevelSum::default();
                for j in 0..k {
                    acc.add(&(&self.values[a][j] * &conj[b][j]), &BigInt::from(self.class_sizes[j]));
                }
                let s = acc.finish_lcm();
                let expect = if a == b { self.order } else { 0 };
                if s != Cyclotomic::from_int(1, expect) {
                    return Err(Error::Inconsistent(format!("row orthogonality fails for ({a},{b}): {s}")));
                }
            }
        }
        for j in 0..k {
            for j2 in j..k {
                let mut acc = LevelSum::default();
                for i in 0..k {
                    acc.add_value(&(&self.values[i][j] * &conj[i][j2]));
                }
                let s = acc.finish_lcm();
                let expect = if j == j2 { self.order / self.class_sizes[j] } else { 0 };
                if s != Cyclotomic::from_int(1, expect) {
                    return Err(Error::Inconsistent(format!("column orthogonality fails for ({j},{j2}): {s}")));
                }
            }
        }
        Ok(())
    }

    /// `χ(g^t) = σ_t(χ(g))` for every t coprime to the order of g.
    pub fn check_power_maps(&self) -> Result<()> {
        for j in 0..self.num_classes() {
            let o = self.class_orders[j];
            for t in 1..o {
                if num_integer::gcd(t, o) != 1 {
                    continue;
                }
                let jt = self.power_map[j][t as usize];
                for i in 0..self.num_chars() {
                    if self.values[i][jt] != self.values[i][j].galois(t as i64) {
                        return Err(Error::Inconsistent(format!("power map fails for χ{i} on class {j}, t={t}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// `N[a][b] = ⟨χ χ_a, χ_b⟩`, the McKay matrix of χ = χ_i.
    pub fn tensor_matrix(&self, i: usize) -> Vec<Vec<u64>> {
        let k = self.num_chars();
        (0..k).map(|a| (0..k).map(|b| self.tensor_multiplicity(i, a, b)).collect()).collect()
    }

    /// Plain-text table with cyclotomics rendered as `z<n>^k` sums.
    pub fn render(&self) -> String {
        let k = self.num_classes();
        let mut cells: Vec<Vec<String>> = Vec::with_capacity(self.num_chars() + 2);
        let mut head = vec!["".to_string()];
        head.extend((0..k).map(|j| format!("{}{}", self.class_orders[j], class_letter(j))));
        cells.push(head);
        let mut sizes = vec!["|C|".to_string()];
        sizes.extend(self.class_sizes.iter().map(|s| s.to_string()));
        cells.push(sizes);
        for i in 0..self.num_chars() {
            let mut row = vec![format!("X.{}", i)];
            row.extend(self.values[i].iter().map(|v| v.reduce_level().render()));
            cells.push(row);
        }
        let widths: Vec<usize> = (0..=k).map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = format!("{}  |G| = {}  exponent = {}\n", self.group, self.order, self.exponent);
        for row in &cells {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    pub fn to_record(&self) -> TableRecord {
        TableRecord {
            schema: TABLE_SCHEMA.to_string(),
            group: self.group.clone(),
            order: self.order,
            conductor: self.exponent,
            prime: self.prime,
            root: self.root,
            class_sizes: self.class_sizes.clone(),
            class_orders: self.class_orders.clone(),
            inverse_class: self.inverse_class.clone(),
            power_map: self.power_map.clone(),
            degrees: self.degrees.clone(),
            values: self
                .values
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| {
                            let (num, den) = v.coeffs();
                            ValueRecord {
                                level: v.level(),
                                num: num.iter().map(|c| c.to_string()).collect(),
                                den: den.to_string(),
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_record(r: TableRecord) -> Result<CharTable> {
        if r.schema != TABLE_SCHEMA {
            return Err(Error::Cache(format!("unknown table schema {}", r.schema)));
        }
        let parse = |s: &str| s.parse::<BigInt>().map_err(|e| Error::Cache(e.to_string()));
        let mut values = Vec::with_capacity(r.values.len());
        for row in &r.values {
            let mut out = Vec::with_capacity(row.len());
            for v in row {
                let num = v.num.iter().map(|c| parse(c)).collect::<Result<Vec<_>>>()?;
                let x = Cyclotomic::from_coeffs(v.level, num, parse(&v.den)?)
                    .ok_or_else(|| Error::Cache("malformed cyclotomic value".into()))?;
                out.push(x);
            }
            values.push(out);
        }
        let values_mod = values.iter().map(|row| row.iter().map(|v| image_mod(v, r.conductor, r.prime, r.root)).collect()).collect();
        Ok(CharTable {
            group: r.group,
            order: r.order,
            exponent: r.conductor,
            class_sizes: r.class_sizes,
            class_orders: r.class_orders,
            inverse_class: r.inverse_class,
            power_map: r.power_map,
            degrees: r.degrees,
            values,
            prime: r.prime,
            root: r.root,
            values_mod,
        })
    }
}

fn class_letter(j: usize) -> String {
    format!("#{j}")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValueRecord {
    pub level: u32,
    pub num: Vec<String>,
    pub den: String,
}

/// Versioned JSON form of a table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableRecord {
    pub schema: String,
    pub group: String,
    pub order: u64,
    pub conductor: u64,
    pub prime: u64,
    pub root: u64,
    pub class_sizes: Vec<u64>,
    pub class_orders: Vec<u64>,
    pub inverse_class: Vec<usize>,
    pub power_map: Vec<Vec<usize>>,
    pub degrees: Vec<u64>,
    pub values: Vec<Vec<ValueRecord>>,
}

/// Image of `x` under `ζ_e ↦ root` in GF(ℓ).
pub fn image_mod(x: &Cyclotomic, exponent: u64, prime: u64, root: u64) -> u64 {
    let n = x.level() as u64;
    debug_assert!(exponent.is_multiple_of(n));
    let step = exponent / n;
    let (num, den) = x.coeffs();
    let reduce = |b: &BigInt| -> u64 {
        let r = b % BigInt::from(prime);
        let r = if r.is_negative() { r + BigInt::from(prime) } else { r };
        r.to_u64().unwrap()
    };
    let mut acc = 0u64;
    for (k, c) in num.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let t = mul_mod(reduce(c), pow_mod(root, k as u64 * step, prime), prime);
        acc = modp::add_mod(acc, t, prime);
    }
    mul_mod(acc, inv_mod(reduce(den), prime), prime)
}

/// Least prime `ℓ ≡ 1 (mod e)` above `max(|G|, 2·max|C|)²`.
pub fn choose_prime(order: u64, max_class: u64, exponent: u64) -> Result<u64> {
    let b = order.max(2 * max_class);
    let lower = b.checked_mul(b).ok_or(Error::NoSuitablePrime { exponent })?;
    modp::prime_one_mod(exponent, lower)
}

/// The character table of `g`, certified by both orthogonality relations.
pub fn dixon_table(g: &EnumeratedGroup) -> Result<CharTable> {
    let k = g.num_classes();
    let order = g.order();
    let exponent = g.exponent();
    let sizes = g.class_sizes();
    let max_class = sizes.iter().copied().max().unwrap_or(1);
    let l = choose_prime(order, max_class, exponent)?;
    let root = pow_mod(modp::primitive_root(l), (l - 1) / exponent, l);
    let sc = g.structure_constants_table();
    let id = g.identity_class();
    let inverse: Vec<usize> = (0..k).map(|c| g.inverse_class(c)).collect();

    // common eigenvectors of M_i, (M_i)_{jk} = a_{ijk}
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![(0..k).map(|i| unit(k, i)).collect()];
    let mut order_of_use: Vec<usize> = (0..k).filter(|&i| i != id).collect();
    order_of_use.sort_by_key(|&i| std::cmp::Reverse(sizes[i]));
    for &i in &order_of_use {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut m = ModMatrix::zero(k, k);
        for j in 0..k {
            for c in 0..k {
                m.set(j, c, sc.get(i, j, c) % l);
            }
        }
        let mut next = Vec::with_capacity(spaces.len());
        for space in spaces {
            if space.len() == 1 {
                next.push(space);
                continue;
            }
            next.extend(split_space(&m, &space, l)?);
        }
        spaces = next;
    }
    if spaces.len() != k {
        return Err(Error::Inconsistent(format!("class algebra split into {} of {k} pieces", spaces.len())));
    }

    let power_map: Vec<Vec<usize>> =
        (0..k).map(|j| (0..g.class(j).order_of_rep).map(|t| g.power_class(j, t as i64)).collect()).collect();
    let class_orders: Vec<u64> = (0..k).map(|j| g.class(j).order_of_rep).collect();
    let mut chars: Vec<(u64, Vec<u64>, Vec<Cyclotomic>)> = Vec::with_capacity(k);
    for space in spaces {
        let v = &space[0];
        if v[id] == 0 {
            return Err(Error::Inconsistent("eigenvector vanishes at the identity".into()));
        }
        let s = inv_mod(v[id], l);
        let w: Vec<u64> = v.iter().map(|&x| mul_mod(x, s, l)).collect();
        let mut t = 0u64;
        for j in 0..k {
            let term = mul_mod(mul_mod(w[j], w[inverse[j]], l), inv_mod(sizes[j] % l, l), l);
            t = modp::add_mod(t, term, l);
        }
        let d_sq = mul_mod(order % l, inv_mod(t, l), l);
        let d = (1..)
            .take_while(|d: &u64| d * d <= order)
            .find(|d| order.is_multiple_of(*d) && d * d == d_sq)
            .ok_or_else(|| Error::Inconsistent("no integral degree for an eigenvector".into()))?;
        let vals: Vec<u64> = (0..k).map(|j| mul_mod(mul_mod(w[j], d, l), inv_mod(sizes[j] % l, l), l)).collect();
        let exact = (0..k)
            .map(|j| lift_value(&vals, &power_map[j], class_orders[j], exponent, d, l, root))
            .collect::<Result<Vec<_>>>()?;
        chars.push((d, vals, exact));
    }
    chars.sort_by(|a, b| {
        let triv_a = a.1.iter().all(|&x| x == 1);
        let triv_b = b.1.iter().all(|&x| x == 1);
        a.0.cmp(&b.0).then(triv_b.cmp(&triv_a)).then_with(|| a.2.cmp(&b.2))
    });
    let table = CharTable {
        group: g.spec.to_string(),
        order,
        exponent,
        class_sizes: sizes,
        class_orders,
        inverse_class: inverse,
        power_map,
        degrees: chars.iter().map(|c| c.0).collect(),
        values_mod: chars.iter().map(|c| c.1.clone()).collect(),
        values: chars.into_iter().map(|c| c.2).collect(),
        prime: l,
        root,
    };
    table.check_orthogonality()?;
    Ok(table)
}

fn table_cache_path(dir: &Path, g: &EnumeratedGroup) -> PathBuf {
    let mut h = Sha256::new();
    h.update(g.spec.to_string().as_bytes());
    h.update(TABLE_SCHEMA.as_bytes());
    dir.join(format!("{}.table.json", hex::encode(h.finalize())))
}

/// `dixon_table`, reusing a JSON table from `cache_dir` when the class data match.
pub fn dixon_table_cached(g: &EnumeratedGroup, cache_dir: Option<&Path>) -> Result<CharTable> {
    let Some(dir) = cache_dir else { return dixon_table(g) };
    let path = table_cache_path(dir, g);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(rec) = serde_json::from_str::<TableRecord>(&text) {
            if let Ok(t) = CharTable::from_record(rec) {
                if t.class_sizes == g.class_sizes() && t.group == g.spec.to_string() && t.check_orthogonality().is_ok() {
                    return Ok(t);
                }
            }
        }
    }
    let t = dixon_table(g)?;
    fs::create_dir_all(dir)?;
    let text = serde_json::to_string(&t.to_record()).map_err(|e| Error::Cache(e.to_string()))?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, &path)?;
    Ok(t)
}

fn unit(k: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; k];
    v[i] = 1;
    v
}

/// Split an `M`-invariant subspace into eigenspaces of `M`.
fn split_space(m: &ModMatrix, space: &[Vec<u64>], l: u64) -> Result<Vec<Vec<Vec<u64>>>> {
    let (basis, pivots) = ModMatrix::from_rows(space).rref(l);
    let d = pivots.len();
    let rows: Vec<Vec<u64>> = (0..d).map(|r| basis.row(r).to_vec()).collect();
    let images: Vec<Vec<u64>> = rows.iter().map(|b| m.apply(b, l)).collect();
    let mut a = ModMatrix::zero(d, d);
    for r in 0..d {
        for c in 0..d {
            a.set(r, c, images[c][pivots[r]]);
        }
    }
    let roots = modp::poly::roots(&a.char_poly(l), l);
    let mut out = Vec::with_capacity(roots.len());
    let mut total = 0;
    for lambda in roots {
        let mut shifted = a.clone();
        for r in 0..d {
            shifted.set(r, r, sub_mod(shifted.get(r, r), lambda, l));
        }
        let ker = shifted.kernel(l);
        total += ker.len();
        let vecs: Vec<Vec<u64>> = ker
            .iter()
            .map(|x| {
                let mut v = vec![0u64; m.cols];
                for (c, &xc) in x.iter().enumerate() {
                    if xc == 0 {
                        continue;
                    }
                    for (t, &bt) in rows[c].iter().enumerate() {
                        v[t] = modp::add_mod(v[t], mul_mod(xc, bt, l), l);
                    }
                }
                v
            })
            .collect();
        out.push(vecs);
    }
    if total != d {
        return Err(Error::Inconsistent("class matrix is not diagonalizable modulo the chosen prime".into()));
    }
    Ok(out)
}

/// Recover χ(g) from the GF(ℓ) values of χ on the powers of g.
fn lift_value(vals: &[u64], powers: &[usize], o: u64, exponent: u64, degree: u64, l: u64, root: u64) -> Result<Cyclotomic> {
    let zeta_o = pow_mod(root, exponent / o, l);
    let zeta_inv = inv_mod(zeta_o, l);
    let o_inv = inv_mod(o % l, l);
    let mut terms = Vec::with_capacity(o as usize);
    for kk in 0..o {
        let step = pow_mod(zeta_inv, kk, l);
        let mut acc = 0u64;
        let mut w = 1u64;
        for t in 0..o as usize {
            acc = modp::add_mod(acc, mul_mod(vals[powers[t]], w, l), l);
            w = mul_mod(w, step, l);
        }
        let mult = mul_mod(acc, o_inv, l);
        if mult > degree {
            return Err(Error::Inconsistent(format!("eigenvalue multiplicity {mult} exceeds degree {degree}")));
        }
        if mult > 0 {
            terms.push((kk as usize, BigInt::from(mult)));
        }
    }
    Ok(Cyclotomic::from_exponent_sum(o as u32, &terms))
}

/// The exact value `|χ(g)|²` when rational, else `None`.
pub fn abs_sq_rational(x: &Cyclotomic) -> Option<BigRational> {
    x.abs_sq().to_rational()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::GroupSpec;

    fn table(s: &str) -> (EnumeratedGroup, CharTable) {
        let g = EnumeratedGroup::enumerate(&GroupSpec::parse(s).unwrap()).unwrap();
        let t = dixon_table(&g).unwrap();
        (g, t)
    }

    #[test]
    fn small_tables() {
        let (_, t) = table("SL(2,2)");
        assert_eq!(t.degrees, vec![1, 1, 2]);
        let (_, t) = table("SL(2,3)");
        assert_eq!(t.degrees, vec![1, 1, 1, 2, 2, 2, 3]);
        t.check_power_maps().unwrap();
        let (_, t) = table("SL(3,2)");
        assert_eq!(t.degrees, vec![1, 3, 3, 6, 7, 8]);
        t.check_power_maps().unwrap();
        assert!(t.is_trivial(0));
    }

    #[test]
    fn quasisimplicity() {
        for (s, want) in [("SL(2,5)", true), ("SL(3,2)", true), ("Sp(4,3)", true), ("SL(2,3)", false), ("Sp(4,2)", false), ("O+(4,3)", false), ("SU(3,2)", false)] {
            assert_eq!(table(s).1.is_quasisimple(), want, "{s}");
        }
    }

    #[test]
    fn values_agree_with_regular_character_count() {
        // independent oracle: trace of g acting on F_2^3 by permutation gives 2·1 + τ
        let (g, t) = table("SL(3,2)");
        let tau = t.degrees.iter().position(|&d| d == 6).unwrap();
        for j in 0..t.num_classes() {
            let m = g.element(g.class(j).representative);
            let fixed = crate::matspace::all_vectors(3, g.field()).into_iter().filter(|v| m.apply(v, g.field()) == *v).count();
            assert_eq!(t.values[tau][j], Cyclotomic::from_int(1, fixed as i64 - 2));
        }
    }

    #[test]
    fn irrational_values_in_sl23() {
        let (_, t) = table("SL(2,3)");
        // linear characters take cube roots of unity
        let nonreal = t.values.iter().flatten().filter(|v| *v != &v.conj()).count();
        assert!(nonreal > 0);
        for i in 0..t.num_chars() {
            assert_eq!(t.inner_product(&t.values[i], &t.values[i]), Cyclotomic::one(1));
        }
    }

    #[test]
    fn tensor_and_faithful() {
        let (_, t) = table("SL(2,3)");
        let two = t.degrees.iter().position(|&d| d == 2).unwrap();
        assert!(t.is_faithful(two));
        assert!(!t.is_faithful(0));
        let n = t.tensor_matrix(two);
        for a in 0..t.num_chars() {
            let dim: u64 = (0..t.num_chars()).map(|b| n[a][b] * t.degrees[b]).sum();
            assert_eq!(dim, 2 * t.degrees[a]);
        }
    }

    #[test]
    fn record_round_trip() {
        let (g, t) = table("SL(2,5)");
        let back = CharTable::from_record(serde_json::from_str(&serde_json::to_string(&t.to_record()).unwrap()).unwrap())
            .unwrap();
        assert_eq!(back.values, t.values);
        assert_eq!(back.values_mod, t.values_mod);
        let dir = std::env::temp_dir().join(format!("classchar-table-{}", std::process::id()));
        let a = dixon_table_cached(&g, Some(&dir)).unwrap();
        let b = dixon_table_cached(&g, Some(&dir)).unwrap();
        assert_eq!(a.values, b.values);
        let _ = fs::remove_dir_all(dir);
        assert!(t.render().contains("X.0"));
    }

    #[test]
    fn degrees_divide_order() {
        for s in ["SL(2,4)", "SL(2,7)", "Sp(4,2)", "SU(3,2)", "O-(4,2)"] {
            let (g, t) = table(s);
            for d in &t.degrees {
                assert_eq!(g.order() % d, 0, "{s}");
            }
            t.check_power_maps().unwrap();
        }
    }
}
