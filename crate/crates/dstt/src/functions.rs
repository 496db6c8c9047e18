//! Concrete function families over grids: bit-packed truth tables, direct
//! sums in gauge-fixed canonical form, corruption channels, and the
//! adversarial instances used by the reconstruction lower bounds.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::bits::BitSource;
use crate::error::{Error, Result};
use crate::grid::{GridDomain, GridPoint};

/// A bit-packed table of boolean values indexed by point index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    len: u64,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zeros(len: u64) -> Self {
        TruthTable { len, words: vec![0; len.div_ceil(64) as usize] }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut t = TruthTable::zeros(bits.len() as u64);
        for (i, &b) in bits.iter().enumerate() {
            if b {
                t.set(i as u64, true);
            }
        }
        t
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, idx: u64) -> bool {
        debug_assert!(idx < self.len);
        self.words[(idx / 64) as usize] >> (idx % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, idx: u64, v: bool) {
        debug_assert!(idx < self.len);
        let w = &mut self.words[(idx / 64) as usize];
        if v {
            *w |= 1 << (idx % 64);
        } else {
            *w &= !(1 << (idx % 64));
        }
    }

    pub fn flip(&mut self, idx: u64) {
        self.words[(idx / 64) as usize] ^= 1 << (idx % 64);
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Hamming distance between two tables of equal length.
    pub fn hamming(&self, other: &TruthTable) -> u64 {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as u64).sum()
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// `f(x) = sum_i L_i(x_i)` over `F_2`, stored as one 0/1 table per
/// coordinate.
///
/// Canonical (gauge-fixed) form: `tables[i][0] == 0` for every `i >= 1`,
/// with the absorbed constant living in table 0. Two direct sums evaluate
/// identically iff their canonical forms are equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectSum {
    sizes: Vec<u32>,
    offsets: Vec<u32>,
    bits: Vec<u8>,
}

impl DirectSum {
    pub fn new(tables: Vec<Vec<u8>>) -> Result<Self> {
        if tables.is_empty() {
            return Err(Error::Config("direct sum needs at least one table".into()));
        }
        let mut sizes = Vec::with_capacity(tables.len());
        let mut offsets = Vec::with_capacity(tables.len());
        let mut bits = Vec::new();
        for (i, t) in tables.iter().enumerate() {
            if t.len() < 2 {
                return Err(Error::Config(format!("table {i} has fewer than 2 entries")));
            }
            if t.iter().any(|&v| v > 1) {
                return Err(Error::Config(format!("table {i} has a non-bit entry")));
            }
            sizes.push(t.len() as u32);
            offsets.push(bits.len() as u32);
            bits.extend_from_slice(t);
        }
        Ok(DirectSum { sizes, offsets, bits })
    }

    pub fn zero(domain: &GridDomain) -> Self {
        DirectSum::new(domain.sizes().iter().map(|&s| vec![0u8; s as usize]).collect()).unwrap()
    }

    pub fn random(domain: &GridDomain, src: &mut BitSource) -> Self {
        let tables = domain
            .sizes()
            .iter()
            .map(|&s| (0..s).map(|_| src.bit() as u8).collect())
            .collect();
        DirectSum::new(tables).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn domain(&self) -> GridDomain {
        GridDomain::new(self.sizes.clone()).unwrap()
    }

    pub fn table(&self, i: usize) -> &[u8] {
        let start = self.offsets[i] as usize;
        &self.bits[start..start + self.sizes[i] as usize]
    }

    #[inline]
    pub fn eval(&self, p: &GridPoint) -> bool {
        let mut acc = 0u8;
        for (i, &c) in p.coords.iter().enumerate() {
            acc ^= self.bits[self.offsets[i] as usize + c as usize];
        }
        acc == 1
    }

    /// Gauge-fixes in place: zeroes `tables[i][0]` for `i >= 1` by moving
    /// the constants into table 0.
    pub fn canonicalize(&mut self) {
        let mut carry = 0u8;
        for i in 1..self.sizes.len() {
            let off = self.offsets[i] as usize;
            let c = self.bits[off];
            if c == 1 {
                carry ^= 1;
                for j in 0..self.sizes[i] as usize {
                    self.bits[off + j] ^= 1;
                }
            }
        }
        if carry == 1 {
            for j in 0..self.sizes[0] as usize {
                self.bits[j] ^= 1;
            }
        }
    }

    pub fn canonical(mut self) -> Self {
        self.canonicalize();
        self
    }

    pub fn is_canonical(&self) -> bool {
        (1..self.sizes.len()).all(|i| self.bits[self.offsets[i] as usize] == 0)
    }

    /// Number of distinct canonical forms on `domain`:
    /// `2^(1 + sum_i (n_i - 1))`, which is `2^(d(n-1)+1)` on uniform grids.
    pub fn canonical_count(domain: &GridDomain) -> Option<u64> {
        let bits: u64 = 1 + domain.sizes().iter().map(|&s| (s - 1) as u64).sum::<u64>();
        (bits < 64).then(|| 1u64 << bits)
    }

    /// Decodes the `idx`-th canonical form: the low `n_1` bits fill table 0,
    /// then `n_i - 1` bits fill entries `1..n_i` of each later table.
    pub fn from_canonical_index(domain: &GridDomain, mut idx: u64) -> Self {
        let mut tables = Vec::with_capacity(domain.dim());
        for (i, &s) in domain.sizes().iter().enumerate() {
            let mut t = vec![0u8; s as usize];
            let start = if i == 0 { 0 } else { 1 };
            for entry in t.iter_mut().skip(start) {
                *entry = (idx & 1) as u8;
                idx >>= 1;
            }
            tables.push(t);
        }
        DirectSum::new(tables).unwrap()
    }

    pub fn to_function(&self) -> BooleanFunction {
        BooleanFunction { domain: self.domain(), repr: Repr::Sum(self.clone()) }
    }
}

/// Named reference families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Majority of the input bits; requires `n = 2` and odd `d`.
    Majority,
    /// XOR of the input bits; requires `n = 2`.
    Parity,
    /// AND of the input bits; requires `n = 2`.
    And,
    /// A seed-deterministic uniformly random truth table.
    Random(u64),
}

#[derive(Debug, Clone)]
enum Repr {
    Table(TruthTable),
    Sum(DirectSum),
    Corrupted { base: Box<BooleanFunction>, flips: FlipSet },
    /// A planted direct sum flipped on every point whose count of
    /// zero-valued coordinates strictly exceeds `2d/n` (the query
    /// lower-bound instance).
    HeavyFlipped { sum: DirectSum },
    Majority,
    Parity,
    And,
}

#[derive(Debug, Clone)]
enum FlipSet {
    Points(HashSet<GridPoint>),
    /// Independent rate-`rate` flips keyed by a salt, so corruption works
    /// lazily on domains too large to materialize.
    Hashed { salt: u64, threshold: u64, rate: f64 },
}

fn hash_coin(salt: u64, idx: u64, threshold: u64) -> bool {
    let mut z = salt ^ idx.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    (z ^ (z >> 31)) >> 11 < threshold
}

/// An oracle-ready boolean function over a grid. Evaluation is total and
/// deterministic for every backing.
#[derive(Debug, Clone)]
pub struct BooleanFunction {
    domain: GridDomain,
    repr: Repr,
}

impl BooleanFunction {
    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn from_table(domain: GridDomain, table: TruthTable) -> Result<Self> {
        let n = domain.point_count().ok_or(Error::Config("domain too large for a table".into()))?;
        if n != table.len() {
            return Err(Error::Config(format!(
                "table has {} entries, domain has {n} points",
                table.len()
            )));
        }
        Ok(BooleanFunction { domain, repr: Repr::Table(table) })
    }

    pub fn from_bits(domain: GridDomain, bits: &[bool]) -> Result<Self> {
        BooleanFunction::from_table(domain, TruthTable::from_bits(bits))
    }

    /// Materializes `f` from a closure, visiting every point.
    pub fn from_fn(domain: GridDomain, f: impl Fn(&GridPoint) -> bool) -> Result<Self> {
        let n = domain.checked_point_count(u64::MAX / 2)?;
        let mut t = TruthTable::zeros(n);
        for i in 0..n {
            if f(&domain.point_at(i)) {
                t.set(i, true);
            }
        }
        BooleanFunction::from_table(domain, t)
    }

    pub fn from_direct_sum(sum: DirectSum) -> Self {
        sum.to_function()
    }

    pub fn named(kind: Family, domain: GridDomain) -> Result<Self> {
        match kind {
            Family::Majority => {
                if !domain.is_hypercube() {
                    return Err(Error::Unsupported("majority requires n = 2".into()));
                }
                if domain.dim() % 2 == 0 {
                    return Err(Error::Unsupported("majority requires odd d".into()));
                }
                Ok(BooleanFunction { domain, repr: Repr::Majority })
            }
            Family::Parity => {
                if !domain.is_hypercube() {
                    return Err(Error::Unsupported("parity requires n = 2".into()));
                }
                Ok(BooleanFunction { domain, repr: Repr::Parity })
            }
            Family::And => {
                if !domain.is_hypercube() {
                    return Err(Error::Unsupported("and requires n = 2".into()));
                }
                Ok(BooleanFunction { domain, repr: Repr::And })
            }
            Family::Random(seed) => {
                let n = domain.checked_point_count(1 << 28)?;
                let mut src = BitSource::new(seed);
                let mut t = TruthTable::zeros(n);
                for i in 0..n {
                    if src.bit() {
                        t.set(i, true);
                    }
                }
                BooleanFunction::from_table(domain, t)
            }
        }
    }

    pub fn constant(domain: GridDomain, value: bool) -> Result<Self> {
        let mut tables: Vec<Vec<u8>> =
            domain.sizes().iter().map(|&s| vec![0u8; s as usize]).collect();
        if value {
            for e in tables[0].iter_mut() {
                *e = 1;
            }
        }
        Ok(DirectSum::new(tables)?.to_function())
    }

    pub fn eval(&self, p: &GridPoint) -> Result<bool> {
        self.domain.check_point(p)?;
        Ok(self.eval_unchecked(p))
    }

    /// Evaluation without the domain check; callers guarantee `p` is valid.
    pub fn eval_unchecked(&self, p: &GridPoint) -> bool {
        match &self.repr {
            Repr::Table(t) => t.get(self.domain.index_of(p)),
            Repr::Sum(s) => s.eval(p),
            Repr::Corrupted { base, flips } => {
                let v = base.eval_unchecked(p);
                let flipped = match flips {
                    FlipSet::Points(set) => set.contains(p),
                    FlipSet::Hashed { salt, threshold, .. } => {
                        hash_coin(*salt, self.domain.index_of(p), *threshold)
                    }
                };
                v ^ flipped
            }
            Repr::HeavyFlipped { sum } => {
                let zeros = p.coords.iter().filter(|&&c| c == 0).count() as u64;
                let n = self.domain.size(0) as u64;
                let d = self.domain.dim() as u64;
                sum.eval(p) ^ (zeros * n > 2 * d)
            }
            Repr::Majority => {
                let ones: usize = p.coords.iter().map(|&c| c as usize).sum();
                2 * ones > p.dim()
            }
            Repr::Parity => p.coords.iter().fold(0u32, |acc, &c| acc ^ c) & 1 == 1,
            Repr::And => p.coords.iter().all(|&c| c == 1),
        }
    }

    pub fn eval_index(&self, idx: u64) -> bool {
        match &self.repr {
            Repr::Table(t) => t.get(idx),
            _ => self.eval_unchecked(&self.domain.point_at(idx)),
        }
    }

    /// Materializes the function as a packed truth table.
    pub fn truth_table(&self, budget: u64) -> Result<TruthTable> {
        let n = self.domain.checked_point_count(budget)?;
        if let Repr::Table(t) = &self.repr {
            return Ok(t.clone());
        }
        let mut t = TruthTable::zeros(n);
        for i in 0..n {
            if self.eval_index(i) {
                t.set(i, true);
            }
        }
        Ok(t)
    }

    /// The direct sum backing, when this function is one.
    pub fn as_direct_sum(&self) -> Option<&DirectSum> {
        match &self.repr {
            Repr::Sum(s) => Some(s),
            _ => None,
        }
    }

    /// Flips each point independently with probability `rate`, lazily.
    /// The flip set is a deterministic function of a salt drawn from `src`,
    /// so corruption needs no materialization and works at any domain size.
    pub fn corrupt_rate(&self, rate: f64, src: &mut BitSource) -> Result<BooleanFunction> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::Config(format!("corruption rate {rate} outside [0, 1]")));
        }
        let salt = src.bits(64);
        let threshold = (rate * (1u64 << 53) as f64).round() as u64;
        Ok(BooleanFunction {
            domain: self.domain.clone(),
            repr: Repr::Corrupted {
                base: Box::new(self.clone()),
                flips: FlipSet::Hashed { salt, threshold, rate },
            },
        })
    }

    /// Flips exactly the given points.
    pub fn corrupt_points(&self, points: &[GridPoint]) -> Result<BooleanFunction> {
        for p in points {
            self.domain.check_point(p)?;
        }
        Ok(BooleanFunction {
            domain: self.domain.clone(),
            repr: Repr::Corrupted {
                base: Box::new(self.clone()),
                flips: FlipSet::Points(points.iter().cloned().collect()),
            },
        })
    }

    /// The realized flip fraction of a corrupted function, by direct count.
    pub fn realized_corruption(&self, budget: u64) -> Result<BigRational> {
        match &self.repr {
            Repr::Corrupted { base, .. } => dist_exact(self, base, budget),
            _ => Ok(BigRational::zero()),
        }
    }
}

/// Exact disagreement fraction between `f` and `g`, by full enumeration.
pub fn dist_exact(f: &BooleanFunction, g: &BooleanFunction, budget: u64) -> Result<BigRational> {
    if f.domain() != g.domain() {
        return Err(Error::DomainMismatch);
    }
    let n = f.domain.checked_point_count(budget)?;
    let mut diff = 0u64;
    // compare through packed tables when both sides are already tables
    match (&f.repr, &g.repr) {
        (Repr::Table(a), Repr::Table(b)) => diff = a.hamming(b),
        _ => {
            for i in 0..n {
                let p = f.domain.point_at(i);
                if f.eval_unchecked(&p) != g.eval_unchecked(&p) {
                    diff += 1;
                }
            }
        }
    }
    Ok(BigRational::new(BigInt::from(diff), BigInt::from(n)))
}

/// Which reconstruction lower-bound instance to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversarialKind {
    /// Two equidistant closest direct sums; decoding is information-
    /// theoretically ambiguous. Requires even uniform `n` and `d >= 2`.
    InfoLb,
    /// A planted direct sum flipped on the heavy points, where fewer than
    /// `n/4` queries cannot pin down the plant. Requires `4 | n`.
    QueryLb,
}

pub struct AdversarialInstance {
    pub function: BooleanFunction,
    /// The relevant direct sums: both equidistant sums for `InfoLb`, the
    /// plant for `QueryLb`.
    pub witnesses: Vec<DirectSum>,
}

pub fn adversarial_instance(
    kind: AdversarialKind,
    domain: &GridDomain,
    src: &mut BitSource,
) -> Result<AdversarialInstance> {
    let n = domain
        .uniform_size()
        .ok_or_else(|| Error::Unsupported("adversarial instances need uniform n".into()))?;
    let d = domain.dim();
    match kind {
        AdversarialKind::InfoLb => {
            if n % 2 != 0 {
                return Err(Error::Unsupported("information lower bound needs even n".into()));
            }
            if d < 2 {
                return Err(Error::Unsupported("information lower bound needs d >= 2".into()));
            }
            let zero = DirectSum::zero(domain);
            // indicator of last coordinate = 0
            let mut tables: Vec<Vec<u8>> =
                domain.sizes().iter().map(|&s| vec![0u8; s as usize]).collect();
            tables[d - 1][0] = 1;
            let ind = DirectSum::new(tables)?;
            // f is zero off the slice x_d = 0 and one on exactly half of it
            let total = domain.checked_point_count(1 << 28)?;
            let mut slice: Vec<u64> =
                (0..total).filter(|&i| domain.point_at(i).coords[d - 1] == 0).collect();
            src.shuffle(&mut slice);
            let mut table = TruthTable::zeros(total);
            for &i in slice.iter().take(slice.len() / 2) {
                table.set(i, true);
            }
            let f = BooleanFunction::from_table(domain.clone(), table)?;
            Ok(AdversarialInstance { function: f, witnesses: vec![zero, ind] })
        }
        AdversarialKind::QueryLb => {
            if n % 4 != 0 {
                return Err(Error::Unsupported("query lower bound needs n divisible by 4".into()));
            }
            let plant = DirectSum::random(domain, src);
            let f = BooleanFunction {
                domain: domain.clone(),
                repr: Repr::HeavyFlipped { sum: plant.clone() },
            };
            Ok(AdversarialInstance { function: f, witnesses: vec![plant] })
        }
    }
}

/// Exact fraction of heavy points (more than `2d/n` zero coordinates) on
/// the uniform grid, by the binomial formula.
pub fn heavy_fraction_exact(n: u32, d: usize) -> BigRational {
    let mut num = BigInt::zero();
    for k in 0..=d {
        if (k as u64) * (n as u64) > 2 * d as u64 {
            num += binomial(d, k) * BigInt::from(n as u64 - 1).pow((d - k) as u32);
        }
    }
    BigRational::new(num, BigInt::from(n as u64).pow(d as u32))
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::from(1u32);
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from((n - i) as u64) / BigInt::from((i + 1) as u64);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, ToPrimitive};

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn direct_sum_eval_examples() {
        let dom = GridDomain::uniform(2, 2).unwrap();
        let zero = DirectSum::zero(&dom);
        for p in dom.iter_points() {
            assert!(!zero.eval(&p));
        }
        let parity = DirectSum::new(vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert!(!parity.eval(&GridPoint::new(vec![1, 1])));
        assert!(parity.eval(&GridPoint::new(vec![1, 0])));
    }

    #[test]
    fn majority_example() {
        let dom = GridDomain::hypercube(3).unwrap();
        let m = BooleanFunction::named(Family::Majority, dom).unwrap();
        assert!(m.eval(&GridPoint::new(vec![1, 1, 0])).unwrap());
        assert!(!m.eval(&GridPoint::new(vec![1, 0, 0])).unwrap());
    }

    #[test]
    fn and_truth_table_is_0001() {
        let dom = GridDomain::hypercube(2).unwrap();
        let f = BooleanFunction::named(Family::And, dom).unwrap();
        let bits: Vec<bool> = f.truth_table(16).unwrap().iter_bits().collect();
        assert_eq!(bits, vec![false, false, false, true]);
    }

    #[test]
    fn random_is_seed_deterministic() {
        let dom = GridDomain::hypercube(3).unwrap();
        let a = BooleanFunction::named(Family::Random(7), dom.clone()).unwrap();
        let b = BooleanFunction::named(Family::Random(7), dom).unwrap();
        assert_eq!(a.truth_table(8).unwrap(), b.truth_table(8).unwrap());
    }

    #[test]
    fn named_parameter_violations() {
        assert!(BooleanFunction::named(Family::Majority, GridDomain::hypercube(4).unwrap()).is_err());
        assert!(BooleanFunction::named(Family::Majority, GridDomain::uniform(3, 3).unwrap()).is_err());
    }

    #[test]
    fn dist_exact_examples() {
        let dom = GridDomain::uniform(3, 2).unwrap();
        let f = BooleanFunction::constant(dom.clone(), false).unwrap();
        assert_eq!(dist_exact(&f, &f, 100).unwrap(), BigRational::zero());
        let g = f.corrupt_points(&[GridPoint::new(vec![2, 1])]).unwrap();
        assert_eq!(dist_exact(&f, &g, 100).unwrap(), ratio(1, 9));
    }

    #[test]
    fn corrupt_explicit_set_differs_exactly_there() {
        let dom = GridDomain::hypercube(3).unwrap();
        let f = BooleanFunction::named(Family::Parity, dom.clone()).unwrap();
        let pts = vec![GridPoint::zeros(3)];
        let g = f.corrupt_points(&pts).unwrap();
        for p in dom.iter_points() {
            let flipped = pts.contains(&p);
            assert_eq!(f.eval(&p).unwrap() != g.eval(&p).unwrap(), flipped);
        }
        assert_eq!(dist_exact(&f, &g, 100).unwrap(), ratio(1, 8));
    }

    #[test]
    fn corrupt_rate_zero_and_realized_fraction() {
        let dom = GridDomain::uniform(3, 8).unwrap();
        let mut src = BitSource::new(5);
        let f = BooleanFunction::constant(dom, false).unwrap();
        let g = f.corrupt_rate(0.0, &mut src).unwrap();
        assert_eq!(dist_exact(&f, &g, 10_000).unwrap(), BigRational::zero());
        // realized fraction concentrates near the rate across seeds
        for seed in 0..10 {
            let mut src = BitSource::new(seed);
            let g = f.corrupt_rate(0.05, &mut src).unwrap();
            let realized = g.realized_corruption(10_000).unwrap().to_f64().unwrap();
            assert!((realized - 0.05).abs() < 0.02, "seed {seed}: realized {realized}");
        }
    }

    #[test]
    fn canonical_forms_are_distinct_and_spaced() {
        // exhaustive uniqueness + minimum distance 1/n at small sizes
        for (n, d) in [(2u32, 4usize), (3, 4)] {
            let dom = GridDomain::uniform(n, d).unwrap();
            let count = DirectSum::canonical_count(&dom).unwrap();
            let tables: Vec<TruthTable> = (0..count)
                .map(|i| {
                    let s = DirectSum::from_canonical_index(&dom, i);
                    assert!(s.is_canonical());
                    s.to_function().truth_table(1 << 20).unwrap()
                })
                .collect();
            let points = dom.point_count().unwrap();
            let floor = points / n as u64; // 1/n of the domain
            for i in 0..tables.len() {
                for j in (i + 1)..tables.len() {
                    let h = tables[i].hamming(&tables[j]);
                    assert!(h >= floor, "({n},{d}) pair {i},{j} at distance {h}/{points}");
                }
            }
        }
    }

    #[test]
    fn canonicalize_preserves_evaluation() {
        let dom = GridDomain::uniform(4, 3).unwrap();
        let mut src = BitSource::new(9);
        for _ in 0..20 {
            let s = DirectSum::random(&dom, &mut src);
            let c = s.clone().canonical();
            assert!(c.is_canonical());
            for p in dom.iter_points() {
                assert_eq!(s.eval(&p), c.eval(&p));
            }
        }
    }

    #[test]
    fn infolb_equidistant_witnesses() {
        for (n, d, expect) in [(2u32, 4usize, ratio(1, 4)), (4, 3, ratio(1, 8))] {
            let dom = GridDomain::uniform(n, d).unwrap();
            let mut src = BitSource::new(13);
            let inst = adversarial_instance(AdversarialKind::InfoLb, &dom, &mut src).unwrap();
            assert_eq!(inst.witnesses.len(), 2);
            for w in &inst.witnesses {
                let dw = dist_exact(&inst.function, &w.to_function(), 1 << 20).unwrap();
                assert_eq!(dw, expect, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn querylb_heavy_fraction_bound() {
        // fraction of flipped points is below (0.7)^(d/n) for n=4, d=16
        let frac = heavy_fraction_exact(4, 16);
        let bound = ratio(2401, 10_000); // 0.7^4
        assert!(frac < bound, "{frac} vs {bound}");
        // and the instance actually differs from the plant exactly on heavy points
        let dom = GridDomain::uniform(4, 4).unwrap();
        let mut src = BitSource::new(21);
        let inst = adversarial_instance(AdversarialKind::QueryLb, &dom, &mut src).unwrap();
        let plant = inst.witnesses[0].to_function();
        let mut heavy = 0u64;
        for p in dom.iter_points() {
            let zeros = p.coords.iter().filter(|&&c| c == 0).count() as u64;
            let is_heavy = zeros * 4 > 2 * 4;
            heavy += is_heavy as u64;
            assert_eq!(
                inst.function.eval(&p).unwrap() != plant.eval(&p).unwrap(),
                is_heavy
            );
        }
        let expect = heavy_fraction_exact(4, 4);
        assert_eq!(ratio(heavy as i64, 256), expect);
    }

    #[test]
    fn querylb_rejects_bad_n() {
        let dom = GridDomain::uniform(3, 4).unwrap();
        let mut src = BitSource::new(0);
        assert!(adversarial_instance(AdversarialKind::QueryLb, &dom, &mut src).is_err());
        let dom = GridDomain::uniform(3, 4).unwrap();
        assert!(adversarial_instance(AdversarialKind::InfoLb, &dom, &mut src).is_err());
    }

    #[test]
    fn mixed_radix_domain_works() {
        let dom = GridDomain::new(vec![2, 3]).unwrap();
        let s = DirectSum::new(vec![vec![0, 1], vec![0, 1, 0]]).unwrap();
        let f = s.to_function();
        assert_eq!(f.truth_table(6).unwrap().len(), 6);
        assert!(f.eval(&GridPoint::new(vec![1, 0])).unwrap());
        assert!(!f.eval(&GridPoint::new(vec![1, 1])).unwrap());
        assert!(f.eval(&GridPoint::new(vec![0, 1])).unwrap());
        assert!(dom.contains(&GridPoint::new(vec![1, 2])));
        assert!(!dom.contains(&GridPoint::new(vec![2, 0])));
    }

    #[test]
    fn dist_lower_bound_between_distinct_sums() {
        // any two distinct direct sums are at distance >= 1/n
        let dom = GridDomain::uniform(3, 3).unwrap();
        let mut src = BitSource::new(3);
        let third = ratio(1, 3);
        for _ in 0..50 {
            let a = DirectSum::random(&dom, &mut src).canonical();
            let b = DirectSum::random(&dom, &mut src).canonical();
            if a == b {
                continue;
            }
            let d = dist_exact(&a.to_function(), &b.to_function(), 100).unwrap();
            assert!(d >= third);
            assert!(d <= BigRational::one());
        }
    }
}
