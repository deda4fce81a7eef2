//! Enumerated groups: elements, conjugacy classes, structure constants and sampling.

use std::collections::VecDeque;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use indexmap::IndexSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::element;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::forms::GroupSpec;
use crate::matspace::MatrixFq;

pub const DEFAULT_CAP: u64 = 2_000_000;
const CACHE_VERSION: &str = "classchar-cache-v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassData {
    pub id: usize,
    pub representative: usize,
    pub size: u64,
    pub centralizer_order: u64,
    pub support: usize,
    pub is_real: bool,
    pub order_of_rep: u64,
}

#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    pub cap: u64,
    pub cache_dir: Option<PathBuf>,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { cap: DEFAULT_CAP, cache_dir: None }
    }
}

/// Class multiplication coefficients `a[i][j][k] = #{(x,y) ∈ C_i×C_j : xy = rep_k}`.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    r: usize,
    data: Vec<u64>,
}

impl StructureConstants {
    pub fn get(&self, i: usize, j: usize, k: usize) -> u64 {
        self.data[(i * self.r + j) * self.r + k]
    }

    pub fn row(&self, i: usize, j: usize) -> &[u64] {
        let start = (i * self.r + j) * self.r;
        &self.data[start..start + self.r]
    }

    pub fn num_classes(&self) -> usize {
        self.r
    }
}

pub struct EnumeratedGroup {
    pub spec: GroupSpec,
    elements: IndexSet<MatrixFq>,
    inverse: Vec<u32>,
    class_of: Vec<u32>,
    classes: Vec<ClassData>,
    members: Vec<Vec<u32>>,
    generators: Vec<usize>,
    structure: OnceLock<StructureConstants>,
}

impl std::fmt::Debug for EnumeratedGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EnumeratedGroup")
            .field("spec", &self.spec.to_string())
            .field("order", &self.order())
            .field("classes", &self.classes.len())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct CacheBlob {
    version: String,
    spec: String,
    n: usize,
    entries: Vec<u16>,
    class_of: Vec<u32>,
}

fn cache_path(dir: &Path, spec: &GroupSpec) -> PathBuf {
    let mut h = Sha256::new();
    h.update(spec.to_string().as_bytes());
    h.update(CACHE_VERSION.as_bytes());
    dir.join(format!("{}.bin", hex::encode(h.finalize())))
}

impl EnumeratedGroup {
    pub fn enumerate(spec: &GroupSpec) -> Result<EnumeratedGroup> {
        Self::enumerate_with(spec, &EnumerateOptions::default())
    }

    pub fn enumerate_with(spec: &GroupSpec, opts: &EnumerateOptions) -> Result<EnumeratedGroup> {
        let order = spec.order();
        if order > opts.cap.into() {
            return Err(Error::CapExceeded { order: order.to_string(), cap: opts.cap });
        }
        if let Some(dir) = &opts.cache_dir {
            if let Some(g) = Self::load_cache(spec, dir)? {
                return Ok(g);
            }
        }
        let f = spec.field();
        let gens = spec.generators()?;
        let n = spec.n;
        let mut elements: IndexSet<MatrixFq> = IndexSet::new();
        elements.insert(MatrixFq::identity(n));
        let mut head = 0;
        while head < elements.len() {
            let x = elements.get_index(head).unwrap().clone();
            for s in &gens {
                elements.insert(x.mul(s, f));
            }
            head += 1;
            if elements.len() as u64 > opts.cap {
                return Err(Error::CapExceeded { order: order.to_string(), cap: opts.cap });
            }
        }
        if num_bigint::BigUint::from(elements.len()) != order {
            return Err(Error::Inconsistent(format!(
                "closure of {} generators has {} elements, expected {}",
                gens.len(),
                elements.len(),
                order
            )));
        }
        let mut g = Self::from_elements(spec.clone(), elements, &gens)?;
        g.compute_classes(None);
        if let Some(dir) = &opts.cache_dir {
            g.store_cache(dir)?;
        }
        Ok(g)
    }

    fn from_elements(spec: GroupSpec, elements: IndexSet<MatrixFq>, gens: &[MatrixFq]) -> Result<EnumeratedGroup> {
        let f = spec.field.clone();
        let mut inverse = vec![u32::MAX; elements.len()];
        for (i, x) in elements.iter().enumerate() {
            if inverse[i] != u32::MAX {
                continue;
            }
            let xi = x.inverse(&f).ok_or_else(|| Error::Inconsistent("singular group element".into()))?;
            let j = elements.get_index_of(&xi).ok_or_else(|| Error::Inconsistent("inverse outside group".into()))?;
            inverse[i] = j as u32;
            inverse[j] = i as u32;
        }
        let generators = gens
            .iter()
            .map(|s| elements.get_index_of(s).ok_or_else(|| Error::Inconsistent("generator outside group".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(EnumeratedGroup {
            spec,
            elements,
            inverse,
            class_of: Vec::new(),
            classes: Vec::new(),
            members: Vec::new(),
            generators,
            structure: OnceLock::new(),
        })
    }

    /// Orbits under conjugation by the generators, then the canonical class order.
    fn compute_classes(&mut self, known: Option<Vec<u32>>) {
        let total = self.elements.len();
        let raw = match known {
            Some(c) => c,
            None => {
                let mut raw = vec![u32::MAX; total];
                let mut next = 0u32;
                for start in 0..total {
                    if raw[start] != u32::MAX {
                        continue;
                    }
                    raw[start] = next;
                    let mut queue = VecDeque::from([start]);
                    while let Some(x) = queue.pop_front() {
                        for &s in &self.generators {
                            let y = self.conjugate(x, s);
                            if raw[y] == u32::MAX {
                                raw[y] = next;
                                queue.push_back(y);
                            }
                        }
                    }
                    next += 1;
                }
                raw
            }
        };
        let k = raw.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); k];
        for (x, &c) in raw.iter().enumerate() {
            members[c as usize].push(x as u32);
        }
        let f = self.spec.field.clone();
        let mut keyed: Vec<(u64, u64, Vec<u8>, usize, Vec<u32>)> = members
            .into_iter()
            .map(|m| {
                let rep = *m
                    .iter()
                    .min_by_key(|&&x| self.elements.get_index(x as usize).unwrap().to_bytes())
                    .unwrap() as usize;
                let ord = self.element_order(rep);
                let bytes = self.element(rep).to_bytes();
                (m.len() as u64, ord, bytes, rep, m)
            })
            .collect();
        keyed.sort_by(|a, b| (a.0, a.1, &a.2).cmp(&(b.0, b.1, &b.2)));
        let order = total as u64;
        let mut class_of = vec![0u32; total];
        let mut classes = Vec::with_capacity(keyed.len());
        let mut all_members = Vec::with_capacity(keyed.len());
        for (id, (size, ord, _, rep, m)) in keyed.into_iter().enumerate() {
            for &x in &m {
                class_of[x as usize] = id as u32;
            }
            let support = element::support(self.element(rep), &f).supp;
            classes.push(ClassData {
                id,
                representative: rep,
                size,
                centralizer_order: order / size,
                support,
                is_real: false,
                order_of_rep: ord,
            });
            all_members.push(m);
        }
        for c in classes.iter_mut() {
            c.is_real = class_of[self.inverse[c.representative] as usize] as usize == c.id;
        }
        self.class_of = class_of;
        self.classes = classes;
        self.members = all_members;
    }

    fn load_cache(spec: &GroupSpec, dir: &Path) -> Result<Option<EnumeratedGroup>> {
        let path = cache_path(dir, spec);
        let Ok(bytes) = fs::read(&path) else { return Ok(None) };
        let blob: CacheBlob = match bincode::deserialize(&bytes) {
            Ok(b) => b,
            Err(_) => return Ok(None),
        };
        if blob.version != CACHE_VERSION || blob.spec != spec.to_string() || blob.n != spec.n {
            return Ok(None);
        }
        let n2 = spec.n * spec.n;
        let mut elements = IndexSet::with_capacity(blob.class_of.len());
        for chunk in blob.entries.chunks(n2) {
            let m = MatrixFq::from_fn(spec.n, spec.n, |i, j| crate::field::Fq(chunk[i * spec.n + j]));
            elements.insert(m);
        }
        if elements.len() != blob.class_of.len() {
            return Err(Error::Cache(format!("corrupt cache file {}", path.display())));
        }
        let gens = spec.generators()?;
        let mut g = Self::from_elements(spec.clone(), elements, &gens)?;
        g.compute_classes(Some(blob.class_of));
        Ok(Some(g))
    }

    fn store_cache(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let entries: Vec<u16> = self.elements.iter().flat_map(|m| m.entries().iter().map(|x| x.0)).collect();
        let blob = CacheBlob {
            version: CACHE_VERSION.to_string(),
            spec: self.spec.to_string(),
            n: self.spec.n,
            entries,
            class_of: self.class_of.clone(),
        };
        let bytes = bincode::serialize(&blob).map_err(|e| Error::Cache(e.to_string()))?;
        let path = cache_path(dir, &self.spec);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn field(&self) -> &FieldSpec {
        self.spec.field()
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn element(&self, i: usize) -> &MatrixFq {
        self.elements.get_index(i).expect("element id in range")
    }

    pub fn elements(&self) -> impl Iterator<Item = &MatrixFq> {
        self.elements.iter()
    }

    pub fn index_of(&self, m: &MatrixFq) -> Option<usize> {
        self.elements.get_index_of(m)
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn generator_ids(&self) -> &[usize] {
        &self.generators
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        let m = self.element(a).mul(self.element(b), self.field());
        self.elements.get_index_of(&m).expect("group closed under multiplication")
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    /// `s·x·s⁻¹`.
    pub fn conjugate(&self, x: usize, s: usize) -> usize {
        let f = self.field();
        let m = self.element(s).mul(self.element(x), f).mul(self.element(self.inverse[s] as usize), f);
        self.elements.get_index_of(&m).expect("group closed under conjugation")
    }

    pub fn pow(&self, a: usize, e: u64) -> usize {
        let m = self.element(a).pow(e, self.field());
        self.elements.get_index_of(&m).expect("group closed under powers")
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let f = self.field();
        let x = self.element(a);
        let mut acc = x.clone();
        let mut k = 1;
        while !acc.is_identity() {
            acc = acc.mul(x, f);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> u64 {
        self.classes.iter().fold(1u64, |acc, c| num_integer::lcm(acc, c.order_of_rep))
    }

    pub fn classes(&self) -> &[ClassData] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, c: usize) -> &ClassData {
        &self.classes[c]
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x] as usize
    }

    pub fn class_members(&self, c: usize) -> &[u32] {
        &self.members[c]
    }

    pub fn class_sizes(&self) -> Vec<u64> {
        self.classes.iter().map(|c| c.size).collect()
    }

    pub fn identity_class(&self) -> usize {
        self.class_of(self.identity())
    }

    pub fn inverse_class(&self, c: usize) -> usize {
        self.class_of(self.inv(self.classes[c].representative))
    }

    /// The class of `g^k` for `g` in class `c`.
    pub fn power_class(&self, c: usize, k: i64) -> usize {
        let o = self.classes[c].order_of_rep as i64;
        let e = k.rem_euclid(o) as u64;
        self.class_of(self.pow(self.classes[c].representative, e))
    }

    pub fn is_conjugate(&self, a: usize, b: usize) -> bool {
        self.class_of(a) == self.class_of(b)
    }

    /// Classes of size one.
    pub fn central_classes(&self) -> Vec<usize> {
        self.classes.iter().filter(|c| c.size == 1).map(|c| c.id).collect()
    }

    pub fn is_central_class(&self, c: usize) -> bool {
        self.classes[c].size == 1
    }

    /// All class multiplication coefficients, computed once and cached.
    pub fn structure_constants_table(&self) -> &StructureConstants {
        self.structure.get_or_init(|| {
            use rayon::prelude::*;
            let r = self.classes.len();
            let total = self.elements.len();
            let columns: Vec<Vec<u64>> = (0..r)
                .into_par_iter()
                .map(|k| {
                    let rep = self.classes[k].representative;
                    let mut col = vec![0u64; r * r];
                    for x in 0..total {
                        let y = self.mul(self.inverse[x] as usize, rep);
                        col[self.class_of[x] as usize * r + self.class_of[y] as usize] += 1;
                    }
                    col
                })
                .collect();
            let mut data = vec![0u64; r * r * r];
            for (k, col) in columns.iter().enumerate() {
                for ij in 0..r * r {
                    data[ij * r + k] = col[ij];
                }
            }
            StructureConstants { r, data }
        })
    }

    /// `a_{ij}[k]` for all k, by one pass over `C_i` per target class.
    pub fn structure_constants(&self, i: usize, j: usize) -> Vec<u64> {
        if let Some(t) = self.structure.get() {
            return t.row(i, j).to_vec();
        }
        (0..self.classes.len())
            .map(|k| {
                let rep = self.classes[k].representative;
                self.members[i]
                    .iter()
                    .filter(|&&x| self.class_of(self.mul(self.inverse[x as usize] as usize, rep)) == j)
                    .count() as u64
            })
            .collect()
    }

    /// Distribution of the product of independent class-function-distributed factors.
    pub fn convolve(&self, a: &Distribution, b: &Distribution) -> Distribution {
        let sc = self.structure_constants_table();
        let r = self.classes.len();
        let mut out = vec![BigRational::zero(); r];
        for i in 0..r {
            if a.probs[i].is_zero() {
                continue;
            }
            for j in 0..r {
                if b.probs[j].is_zero() {
                    continue;
                }
                let w = &a.probs[i] * &b.probs[j]
                    / BigRational::from_integer(BigInt::from(self.classes[i].size * self.classes[j].size));
                for (k, o) in out.iter_mut().enumerate() {
                    let c = sc.get(i, j, k);
                    if c != 0 {
                        *o += &w * BigRational::from_integer(BigInt::from(c * self.classes[k].size));
                    }
                }
            }
        }
        Distribution { kind: DistributionKind::ClassFunction, probs: out }
    }

    pub fn uniform_on_class(&self, c: usize) -> Distribution {
        let mut probs = vec![BigRational::zero(); self.classes.len()];
        probs[c] = BigRational::from_integer(1.into());
        Distribution { kind: DistributionKind::ClassFunction, probs }
    }

    pub fn uniform(&self) -> Distribution {
        let total = BigInt::from(self.order());
        Distribution {
            kind: DistributionKind::ClassFunction,
            probs: self
                .classes
                .iter()
                .map(|c| BigRational::new(BigInt::from(c.size), total.clone()))
                .collect(),
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        rng.random_range(0..self.elements.len())
    }

    /// A uniformly random conjugate `x·g·x⁻¹`.
    pub fn random_conjugate(&self, g: usize, rng: &mut ChaCha8Rng) -> usize {
        let x = self.sample(rng);
        let f = self.field();
        let m = self.element(x).mul(self.element(g), f).mul(self.element(self.inverse[x] as usize), f);
        self.elements.get_index_of(&m).unwrap()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    ClassFunction,
    Point,
}

/// Probabilities by class id (mass of the whole class) or by element id.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub kind: DistributionKind,
    pub probs: Vec<BigRational>,
}

impl Distribution {
    pub fn total(&self) -> BigRational {
        self.probs.iter().fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn is_valid(&self) -> bool {
        self.probs.iter().all(|p| *p >= BigRational::zero()) && self.total() == BigRational::from_integer(1.into())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    UniformExact,
    ProductReplacement,
}

/// Product replacement with an accumulator slot.
pub struct ProductReplacement {
    slots: Vec<MatrixFq>,
    acc: MatrixFq,
    rng: ChaCha8Rng,
    field: std::sync::Arc<FieldSpec>,
}

impl ProductReplacement {
    /// Minimum slot count; raised to one more than the number of generators.
    pub const SLOTS: usize = 15;
    /// Minimum burn-in; raised to ten steps per slot.
    pub const BURN_IN: usize = 200;
    /// Steps between returned elements.
    pub const STRIDE: usize = 4;

    pub fn new(spec: &GroupSpec, seed: u64) -> Result<ProductReplacement> {
        Self::with_stream(spec, seed, 0)
    }

    /// Independent stream `stream` for the same seed.
    pub fn with_stream(spec: &GroupSpec, seed: u64, stream: u64) -> Result<ProductReplacement> {
        let gens = spec.generators()?;
        if gens.is_empty() {
            return Err(Error::Inconsistent("empty generating set".into()));
        }
        // every generator gets a slot
        let k = Self::SLOTS.max(gens.len() + 1);
        let slots = (0..k).map(|i| gens[i % gens.len()].clone()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut pr = ProductReplacement { slots, acc: MatrixFq::identity(spec.n), rng, field: spec.field.clone() };
        for _ in 0..Self::BURN_IN.max(10 * k) {
            pr.step();
        }
        Ok(pr)
    }

    fn step(&mut self) {
        let k = self.slots.len();
        let i = self.rng.random_range(0..k);
        let mut j = self.rng.random_range(0..k - 1);
        if j >= i {
            j += 1;
        }
        let f = &self.field;
        let other = if self.rng.random_bool(0.5) {
            self.slots[j].clone()
        } else {
            self.slots[j].inverse(f).expect("invertible")
        };
        self.slots[i] = if self.rng.random_bool(0.5) { self.slots[i].mul(&other, f) } else { other.mul(&self.slots[i], f) };
        self.acc = self.acc.mul(&self.slots[i], f);
    }

    pub fn next_element(&mut self) -> MatrixFq {
        for _ in 0..Self::STRIDE {
            self.step();
        }
        self.acc.clone()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// One sample with a fresh RNG derived from `seed`.
pub fn sample(g: Option<&EnumeratedGroup>, spec: &GroupSpec, seed: u64, mode: SampleMode) -> Result<MatrixFq> {
    match mode {
        SampleMode::UniformExact => {
            let g = g.ok_or_else(|| Error::CapExceeded { order: spec.order().to_string(), cap: 0 })?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(g.element(g.sample(&mut rng)).clone())
        }
        SampleMode::ProductReplacement => Ok(ProductReplacement::new(spec, seed)?.next_element()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(s: &str) -> EnumeratedGroup {
        EnumeratedGroup::enumerate(&GroupSpec::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn small_class_structures() {
        let g = group("SL(2,2)");
        assert_eq!(g.order(), 6);
        assert_eq!(g.class_sizes(), vec![1, 2, 3]);
        let g = group("SL(2,3)");
        assert_eq!(g.order(), 24);
        assert_eq!(g.num_classes(), 7);
        let g = group("Sp(4,2)");
        assert_eq!(g.order(), 720);
        assert_eq!(g.num_classes(), 11);
    }

    #[test]
    fn class_equation_and_centralizers() {
        for s in ["SL(2,5)", "SL(3,2)", "SU(3,2)", "O-(4,3)", "SO(3,3)"] {
            let g = group(s);
            assert_eq!(g.class_sizes().iter().sum::<u64>(), g.order());
            for c in g.classes() {
                assert_eq!(c.size * c.centralizer_order, g.order());
                let rep = c.representative;
                let fixers = (0..g.order() as usize).filter(|&x| g.mul(x, rep) == g.mul(rep, x)).count() as u64;
                assert_eq!(fixers, c.centralizer_order, "{s}");
                assert_eq!(c.is_real, g.is_conjugate(g.inv(rep), rep));
            }
            assert_eq!(g.class(0).representative, g.identity());
        }
    }

    #[test]
    fn every_element_is_in_the_group() {
        for s in ["Sp(4,2)", "O+(4,2)", "SU(3,2)", "O-(4,3)"] {
            let g = group(s);
            for m in g.elements() {
                assert!(g.spec.contains(m).unwrap());
            }
        }
    }

    #[test]
    fn random_conjugates_stay_in_class() {
        let g = group("SL(3,2)");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = g.sample(&mut rng);
            let b = g.random_conjugate(a, &mut rng);
            assert!(g.is_conjugate(a, b));
        }
        let g = group("SL(2,3)");
        let t = g.index_of(&MatrixFq::from_rows(&[vec![crate::field::Fq(1), crate::field::Fq(1)], vec![crate::field::Fq(0), crate::field::Fq(1)]])).unwrap();
        assert!(!g.is_conjugate(t, g.identity()));
    }

    #[test]
    fn structure_constant_examples() {
        let g = group("SL(2,2)");
        let t = g.structure_constants_table();
        // identity class row is an indicator
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(t.get(0, j, k), u64::from(j == k));
            }
        }
        // transpositions (size 3) squared
        assert_eq!(t.row(2, 2), &[3, 3, 0]);
        let row_sum: u64 = (0..3).map(|k| t.get(2, 2, k) * g.class(k).size).sum();
        assert_eq!(row_sum, 9);
    }

    #[test]
    fn structure_constants_consistency() {
        let g = group("SL(3,2)");
        let t = g.structure_constants_table();
        let r = g.num_classes();
        for i in 0..r {
            for j in 0..r {
                let s: u64 = (0..r).map(|k| t.get(i, j, k) * g.class(k).size).sum();
                assert_eq!(s, g.class(i).size * g.class(j).size);
                assert_eq!(t.row(i, j), t.row(j, i));
                assert_eq!(g.structure_constants(i, j), t.row(i, j));
            }
        }
        let fresh = group("SL(3,2)");
        for i in 0..r {
            assert_eq!(fresh.structure_constants(i, (i + 1) % r), t.row(i, (i + 1) % r));
        }
    }

    #[test]
    fn convolution_of_uniform_is_uniform() {
        let g = group("SL(2,3)");
        let u = g.uniform();
        assert!(u.is_valid());
        let p = g.convolve(&g.uniform_on_class(3), &u);
        assert_eq!(p, u);
    }

    #[test]
    fn sampling_is_deterministic_and_uniform() {
        let spec = GroupSpec::parse("SL(2,3)").unwrap();
        let g = EnumeratedGroup::enumerate(&spec).unwrap();
        let a = sample(Some(&g), &spec, 11, SampleMode::UniformExact).unwrap();
        let b = sample(Some(&g), &spec, 11, SampleMode::UniformExact).unwrap();
        assert_eq!(a, b);
        assert!(sample(None, &spec, 1, SampleMode::UniformExact).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws = 100_000;
        let mut counts = [0u64; 24];
        for _ in 0..draws {
            counts[g.sample(&mut rng)] += 1;
        }
        let e = draws as f64 / 24.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let pval = 1.0 - ChiSquared::new(23.0).unwrap().cdf(chi2);
        assert!(pval > 0.001, "chi2={chi2} p={pval}");
    }

    #[test]
    fn product_replacement_stays_in_group() {
        let spec = GroupSpec::parse("Sp(4,2)").unwrap();
        let mut pr = ProductReplacement::new(&spec, 9).unwrap();
        for _ in 0..100 {
            let m = pr.next_element();
            assert!(spec.form.is_isometry(&m, spec.field()).unwrap());
            assert_eq!(m.det(spec.field()), crate::field::Fq::ONE);
        }
        let a = ProductReplacement::new(&spec, 9).unwrap().next_element();
        let b = ProductReplacement::new(&spec, 9).unwrap().next_element();
        assert_eq!(a, b);
    }

    #[test]
    fn cap_is_enforced() {
        let spec = GroupSpec::parse("SL(3,3)").unwrap();
        let err = EnumeratedGroup::enumerate_with(&spec, &EnumerateOptions { cap: 1000, cache_dir: None }).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { ref order, cap: 1000 } if order == "5616"));
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("classchar-test-{}", std::process::id()));
        let spec = GroupSpec::parse("SL(2,5)").unwrap();
        let opts = EnumerateOptions { cap: DEFAULT_CAP, cache_dir: Some(dir.clone()) };
        let a = EnumeratedGroup::enumerate_with(&spec, &opts).unwrap();
        let b = EnumeratedGroup::enumerate_with(&spec, &opts).unwrap();
        assert_eq!(a.classes(), b.classes());
        assert_eq!(a.order(), b.order());
        let _ = fs::remove_dir_all(dir);
    }
}
