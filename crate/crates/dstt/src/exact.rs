//! Exhaustive-enumeration oracles: exact rejection probabilities for every
//! tester, exact distances to the function classes, and the restricted
//! even-or-odd expectation. Everything is computed in exact rational
//! arithmetic; enumeration sizes are checked against an explicit budget and
//! refused, never truncated.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::functions::{BooleanFunction, DirectSum, TruthTable};
use crate::grid::GridDomain;
use crate::spectrum::wht;
use crate::testers::{InnerKind, TestKind, TupleOracle};

/// An exact rational value together with a note naming the enumeration
/// that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactValue {
    pub value: BigRational,
    pub provenance: String,
}

impl ExactValue {
    pub fn new(num: u128, den: u128, provenance: impl Into<String>) -> Self {
        ExactValue {
            value: BigRational::new(BigInt::from(num), BigInt::from(den)),
            provenance: provenance.into(),
        }
    }

    pub fn from_ratio(value: BigRational, provenance: impl Into<String>) -> Self {
        ExactValue { value, provenance: provenance.into() }
    }

    pub fn as_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

impl std::fmt::Display for ExactValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.value.numer(), self.value.denom())
    }
}

fn check_budget(required: u128, allowed: u64) -> Result<()> {
    if required > allowed as u128 {
        return Err(Error::Budget { required, allowed: allowed as u128 });
    }
    Ok(())
}

/// Grid data prepared for enumeration: the packed table, every point's
/// digit vector, and row-major strides.
struct Prepared {
    domain: GridDomain,
    table: TruthTable,
    digits: Vec<Vec<u32>>,
    strides: Vec<u64>,
}

impl Prepared {
    fn build(f: &BooleanFunction, budget: u64) -> Result<Self> {
        let domain = f.domain().clone();
        let n_points = domain.checked_point_count(budget)?;
        let table = f.truth_table(budget)?;
        let d = domain.dim();
        let mut strides = vec![1u64; d];
        for i in (0..d.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * domain.size(i + 1) as u64;
        }
        let digits = (0..n_points).map(|i| domain.point_at(i).coords).collect();
        Ok(Prepared { domain, table, digits, strides })
    }

    #[inline]
    fn interp_index(&self, a: &[u32], b: &[u32], x: u64) -> u64 {
        let d = a.len();
        let mut idx = 0u64;
        for i in 0..d {
            let c = if x >> (d - 1 - i) & 1 == 1 { b[i] } else { a[i] };
            idx += c as u64 * self.strides[i];
        }
        idx
    }

    fn points(&self) -> u64 {
        self.digits.len() as u64
    }

    /// Packed table of the restriction `x -> f(phi_x(a, b))`, indexed by
    /// the mask `x` in point-index bit order.
    fn restricted(&self, a: &[u32], b: &[u32]) -> Vec<u64> {
        let d = a.len();
        let mut words = vec![0u64; (1usize << d).div_ceil(64)];
        for x in 0..(1u64 << d) {
            if self.table.get(self.interp_index(a, b, x)) {
                words[(x / 64) as usize] |= 1 << (x % 64);
            }
        }
        words
    }
}

#[inline]
fn getw(words: &[u64], i: u64) -> bool {
    words[(i / 64) as usize] >> (i % 64) & 1 == 1
}

/// Exact rejection probability of `kind` on `f` by full enumeration of the
/// tester's randomness.
pub fn exact_rejection(kind: &TestKind, f: &BooleanFunction, budget: u64) -> Result<ExactValue> {
    match kind {
        TestKind::BlrLinearity => blr_linearity_exact(f, budget),
        TestKind::BlrAffinity => blr_affinity_exact(f, budget),
        TestKind::Diamond { rho } => {
            if rho.is_zero() {
                diamond_exact(f, budget)
            } else {
                rho_diamond_exact(f, *rho, budget)
            }
        }
        TestKind::SquareInCube => square_exact(f, budget),
        TestKind::AffineOnSubcube(inner) => affine_on_subcube_exact(f, *inner, budget),
        TestKind::DiamondInCube => diamond_in_cube_exact(f, budget),
        TestKind::Shapka => shapka_exact(f, budget),
        TestKind::SubcubeDegree { k } => subcube_degree_exact(f, *k, budget),
    }
}

fn hypercube_words(f: &BooleanFunction, budget: u64) -> Result<(usize, Vec<u64>)> {
    let domain = f.domain();
    if !domain.is_hypercube() {
        return Err(Error::Unsupported("this test runs on n = 2".into()));
    }
    let d = domain.dim();
    let table = f.truth_table(budget)?;
    let mut words = vec![0u64; (1usize << d).div_ceil(64)];
    for i in 0..table.len() {
        if table.get(i) {
            words[(i / 64) as usize] |= 1 << (i % 64);
        }
    }
    Ok((d, words))
}

fn blr_linearity_exact(f: &BooleanFunction, budget: u64) -> Result<ExactValue> {
    let (d, w) = hypercube_words(f, budget)?;
    let space = 1u128 << (2 * d);
    check_budget(space, budget)?;
    let n = 1u64 << d;
    let mut rej = 0u64;
    for x in 0..n {
        for y in 0..n {
            if getw(&w, x) ^ getw(&w, y) ^ getw(&w, x ^ y) {
                rej += 1;
            }
        }
    }
    Ok(ExactValue::new(rej as u128, space, format!("enumeration of {space} (x, y) pairs")))
}

fn blr_affinity_exact(f: &BooleanFunction, budget: u64) -> Result<ExactValue> {
    let (d, w) = hypercube_words(f, budget)?;
    let space = 1u128 << (3 * d);
    check_budget(space, budget)?;
    let n = 1u64 << d;
    let mut rej = 0u64;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if getw(&w, x) ^ getw(&w, x ^ y) ^ getw(&w, x ^ z) ^ getw(&w, x ^ y ^ z) {
                    rej += 1;
                }
            }
        }
    }
    Ok(ExactValue::new(rej as u128, space, format!("enumeration of {space} (x, y, z) triples")))
}

fn diamond_exact(f: &BooleanFunction, budget: u64) -> Result<ExactValue> {
    let domain = f.domain();
    let d = domain.dim();
    if domain.is_hypercube() {
        let (_, w) = hypercube_words(f, budget)?;
        let space = 1u128 << (3 * d);
        check_budget(space, budget)?;
        let n = 1u64 << d;
        let mut rej = 0u64;
        for a in 0..n {
            for b in 0..n {
                for x in 0..n {
                    let p = (a & !x) | (b & x);
                    let q = (b & !x) | (a & x);
                    if getw(&w, a) ^ getw(&w, b) ^ getw(&w, p) ^ getw(&w, q) {
                        rej += 1;
                    }
                }
            }
        }
        return Ok(ExactValue::new(
            rej as u128,
            space,
            format!("enumeration of {space} (a, b, x) triples"),
        ));
    }
    let prep = Prepared::build(f, budget)?;
    let pts = prep.points() as u128;
    let space = pts * pts * (1u128 << d);
    check_budget(space, budget)?;
    let mut rej = 0u64;
    for a in &prep.digits {
        for b in &prep.digits {
            let fa = prep.table.get(prep.interp_index(a, b, 0));
            let fb = prep.table.get(prep.interp_index(b, a, 0));
            for x in 0..(1u64 << d) {
                let p = prep.table.get(prep.interp_index(a, b, x));
                let q = prep.table.get(prep.interp_index(b, a, x));
                if fa ^ fb ^ p ^ q {
                    rej += 1;
                }
            }
        }
    }
    Ok(ExactValue::new(rej as u128, space, format!("enumeration of {space} (a, b, x) triples")))
}

/// Correlated-endpoint variant: the triple `(a, b, x)` is enumerated and
/// each `(a, b)` weighted by the noise-operator law `Pr[b_i | a_i]`, which
/// is `(1+rho)/2` on agreement and `(1-rho)/2` on disagreement.
fn rho_diamond_exact(f: &BooleanFunction, rho: Ratio<i64>, budget: u64) -> Result<ExactValue> {
    let (d, w) = hypercube_words(f, budget)?;
    if rho.abs() >= Ratio::one() {
        return Err(Error::Unsupported("correlation must lie in (-1, 1)".into()));
    }
    let space = 1u128 << (3 * d);
    check_budget(space, budget)?;
    let n = 1u64 << d;
    // rejection counts per agreement class of (a, b)
    let mut rej = vec![0u64; d + 1];
    for a in 0..n {
        for b in 0..n {
            let agree = d - (a ^ b).count_ones() as usize;
            for x in 0..n {
                let p = (a & !x) | (b & x);
                let q = (b & !x) | (a & x);
                if getw(&w, a) ^ getw(&w, b) ^ getw(&w, p) ^ getw(&w, q) {
                    rej[agree] += 1;
                }
            }
        }
    }
    let big = |r: Ratio<i64>| BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
    let keep = (big(rho) + BigRational::one()) / BigRational::from(BigInt::from(2));
    let flip = BigRational::one() - keep.clone();
    let mut acc = BigRational::zero();
    for (g, &count) in rej.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let mut weight = BigRational::from(BigInt::from(count));
        for _ in 0..g {
            weight *= keep.clone();
        }
        for _ in 0..(d - g) {
            weight *= flip.clone();
        }
        acc += weight;
    }
    // a and x are uniform; the weights above already integrate b
    acc /= BigRational::from(BigInt::from(1u64 << (2 * d)));
    Ok(ExactValue::from_ratio(
        acc,
        format!("weighted enumeration of {space} (a, b, x) triples at rho={rho}"),
    ))
}

fn square_exact(f: &BooleanFunction, budget: u64) -> Result<ExactValue> {
    let domain = f.domain();
    let d = domain.dim();
    let prep = Prepared::build(f, budget)?;
    let pts = prep.points() as u128;
    let space = pts * pts * (1u128 << (2 * d));
    check_budget(space, budget)?;
    let mut rej = 0u64;
    let n = 1u64 << d;
    for a in &prep.digits {
        for b in &prep.digits {
            let g = prep.restricted(a, b);
            for x in 0..n {
                for y in 0..n {
                    if getw(&g, 0) ^ getw(&g, x) ^ getw(&g, y) ^ getw(&g, x ^ y) {
                        rej += 1;
                    }
                }
            }
        }
    }
    Ok(ExactValue::new(rej as u128, space, format!("enumeration of {space} (a, b, x, y) tuples")))
}

fn affine_on_subcube_exact(
    f: &BooleanFunction,
    inner: InnerKind,
    budget: u64,
) -> Result<ExactValue> {
    let d = f.domain().dim();
    let prep = Prepared::build(f, budget)?;
    let pts = prep.points() as u128;
    let space = pts * pts * (1u128 << (3 * d));
    check_budget(space, budget)?;
    let n = 1u64 << d;
    let mut rej = 0u64;
    for a in &prep.digits {
        for b in &prep.digits {
            let g = prep.restricted(a, b);
            match inner {
                InnerKind::BlrAffinity => {
                    for x in 0..n {
                        for y in 0..n {
                            for z in 0..n {
                                if getw(&g, x) ^ getw(&g, x ^ y) ^ getw(&g, x ^ z) ^ getw(&g, x ^ y ^ z)
                                {
                                    rej += 1;
                                }
                            }
                        }
                    }
                }
                InnerKind::Diamond => {
                    for u in 0..n {
                        for v in 0..n {
                            for x in 0..n {
                                let p = (u & !x) | (v & x);
                                let q = (v & !x) | (u & x);
                                if getw(&g, u) ^ getw(&g, v) ^ getw(&g, p) ^ getw(&g, q) {
                                    rej += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(ExactValue::new(
        rej as u128,
        space,
        format!("enumeration of {space} (a, b, inner-randomness) tuples"),
    ))
}

/// Direct route for the diamond-in-cube composition: enumerates the two
/// endpoints and the inner `(u, v, x)`, interpolating each query on the
/// grid. Cross-checks the restricted-table route used by
/// `AffineOnSubcube(Diamond)`.
fn diamond_in_cube_exact(f: &BooleanFunction, budget: u64) -> Result<ExactValue> {
    let d = f.domain().dim();
    let prep = Prepared::build(f, budget)?;
    let pts = prep.points() as u128;
    let space = pts * pts * (1u128 << (3 * d));
    check_budget(space, budget)?;
    let n = 1u64 << d;
    let mut rej = 0u64;
    for a in &prep.digits {
        for b in &prep.digits {
            for u in 0..n {
                for v in 0..n {
                    for x in 0..n {
                        let s3 = (u & !x) | (v & x);
                        let s4 = (v & !x) | (u & x);
                        let val = prep.table.get(prep.interp_index(a, b, u))
                            ^ prep.table.get(prep.interp_index(a, b, v))
                            ^ prep.table.get(prep.interp_index(a, b, s3))
                            ^ prep.table.get(prep.interp_index(a, b, s4));
                        if val {
                            rej += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(ExactValue::new(
        rej as u128,
        space,
        format!("enumeration of {space} (a, b, u, v, x) tuples"),
    ))
}

fn shapka_exact(f: &BooleanFunction, budget: u64) -> Result<ExactValue> {
    let domain = f.domain();
    let d = domain.dim();
    let prep = Prepared::build(f, budget)?;
    let pts = prep.points() as u128;
    let space = pts * pts;
    check_budget(space, budget)?;
    let even = d % 2 == 0;
    let mut rej = 0u64;
    for a in &prep.digits {
        for b in &prep.digits {
            let mut s = prep.table.get(prep.interp_index(b, a, 0));
            for i in 0..d {
                let e = 1u64 << (d - 1 - i);
                s ^= prep.table.get(prep.interp_index(a, b, e));
            }
            if even {
                s ^= prep.table.get(prep.interp_index(a, b, 0));
            }
            if s {
                rej += 1;
            }
        }
    }
    Ok(ExactValue::new(rej as u128, space, format!("enumeration of {space} (a, b) pairs")))
}

fn subcube_degree_exact(f: &BooleanFunction, k: usize, budget: u64) -> Result<ExactValue> {
    if k == 0 {
        return Err(Error::Unsupported("degree test needs k >= 1".into()));
    }
    let d = f.domain().dim();
    let prep = Prepared::build(f, budget)?;
    let pts = prep.points() as u128;
    let space = pts
        .checked_mul(pts)
        .and_then(|s| 1u128.checked_shl(((k + 2) * d) as u32).and_then(|t| s.checked_mul(t)))
        .ok_or(Error::Budget { required: u128::MAX, allowed: budget as u128 })?;
    check_budget(space, budget)?;
    let n = 1u64 << d;
    let flats = 1u32 << (k + 1);
    let mut dirs = vec![0u64; k + 1];
    let mut rej = 0u64;
    for a in &prep.digits {
        for b in &prep.digits {
            let g = prep.restricted(a, b);
            for base in 0..n {
                // odometer over the k+1 direction vectors
                dirs.iter_mut().for_each(|v| *v = 0);
                loop {
                    let mut s = false;
                    for subset in 0..flats {
                        let mut x = base;
                        for (i, &dir) in dirs.iter().enumerate() {
                            if subset >> i & 1 == 1 {
                                x ^= dir;
                            }
                        }
                        s ^= getw(&g, x);
                    }
                    if s {
                        rej += 1;
                    }
                    let mut carry = 0;
                    while carry < dirs.len() {
                        dirs[carry] += 1;
                        if dirs[carry] < n {
                            break;
                        }
                        dirs[carry] = 0;
                        carry += 1;
                    }
                    if carry == dirs.len() {
                        break;
                    }
                }
            }
        }
    }
    Ok(ExactValue::new(
        rej as u128,
        space,
        format!("enumeration of {space} (a, b, base, directions) tuples"),
    ))
}

/// Exact rejection probability of the 4-function diamond test on the tuple
/// `(f, g, h, k)`.
pub fn exact_rejection_diamond4(
    f: &BooleanFunction,
    g: &BooleanFunction,
    h: &BooleanFunction,
    k: &BooleanFunction,
    budget: u64,
) -> Result<ExactValue> {
    for other in [g, h, k] {
        if other.domain() != f.domain() {
            return Err(Error::DomainMismatch);
        }
    }
    let d = f.domain().dim();
    let pf = Prepared::build(f, budget)?;
    let tg = g.truth_table(budget)?;
    let th = h.truth_table(budget)?;
    let tk = k.truth_table(budget)?;
    let pts = pf.points() as u128;
    let space = pts * pts * (1u128 << d);
    check_budget(space, budget)?;
    let mut rej = 0u64;
    for a in &pf.digits {
        for b in &pf.digits {
            let fa = pf.table.get(pf.interp_index(a, b, 0));
            let kb = tk.get(pf.interp_index(b, a, 0));
            for x in 0..(1u64 << d) {
                let gp = tg.get(pf.interp_index(a, b, x));
                let hq = th.get(pf.interp_index(b, a, x));
                if fa ^ gp ^ hq ^ kb {
                    rej += 1;
                }
            }
        }
    }
    Ok(ExactValue::new(rej as u128, space, format!("enumeration of {space} (a, b, x) triples")))
}

/// Exact rejection probability of the direct product agreement test, by
/// weighted enumeration over `(x, A, y)`.
pub fn exact_rejection_direct_product(
    oracle: &mut dyn TupleOracle,
    budget: u64,
) -> Result<ExactValue> {
    let domain = oracle.domain().clone();
    let d = domain.dim();
    let n_points = domain.checked_point_count(budget)?;
    let space = (n_points as u128) * (1u128 << d) * n_points as u128;
    check_budget(space, budget)?;
    let answers: Vec<Vec<u32>> =
        (0..n_points).map(|i| oracle.query(&domain.point_at(i))).collect();
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let three_quarters = BigRational::new(BigInt::from(3), BigInt::from(4));
    let mut total = BigRational::zero();
    for xi in 0..n_points {
        let x = domain.point_at(xi);
        for set in 0u64..(1 << d) {
            let members: Vec<usize> = (0..d).filter(|&i| set >> i & 1 == 1).collect();
            let mut w_set = BigRational::one();
            let mut off_count = 1u64;
            for i in 0..d {
                if set >> i & 1 == 1 {
                    w_set *= three_quarters.clone();
                } else {
                    w_set *= quarter.clone();
                    off_count *= domain.size(i) as u64;
                }
            }
            // enumerate y by an odometer over the off-set coordinates
            let mut y = x.clone();
            let off: Vec<usize> = (0..d).filter(|&i| set >> i & 1 == 0).collect();
            for &i in &off {
                y.coords[i] = 0;
            }
            let mut rejected = 0u64;
            loop {
                let yi = domain.index_of(&y);
                let (fx, fy) = (&answers[xi as usize], &answers[yi as usize]);
                if members.iter().any(|&i| fx[i] != fy[i]) {
                    rejected += 1;
                }
                let mut pos = off.len();
                loop {
                    if pos == 0 {
                        break;
                    }
                    let i = off[pos - 1];
                    y.coords[i] += 1;
                    if y.coords[i] < domain.size(i) {
                        break;
                    }
                    y.coords[i] = 0;
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
            }
            if rejected > 0 {
                total += w_set
                    * BigRational::new(BigInt::from(rejected), BigInt::from(off_count))
                    / BigRational::from(BigInt::from(n_points));
            }
        }
    }
    Ok(ExactValue::from_ratio(total, format!("weighted enumeration over (x, A, y), {space} states")))
}

/// The exact minimum distance from `f` to the direct sums, with every
/// minimizing canonical form reported (ties included).
pub struct DirectSumDistance {
    pub value: ExactValue,
    pub witnesses: Vec<DirectSum>,
}

pub fn dist_to_direct_sum(f: &BooleanFunction, budget: u64) -> Result<DirectSumDistance> {
    let domain = f.domain().clone();
    let n_points = domain.checked_point_count(budget)?;
    let candidates = DirectSum::canonical_count(&domain)
        .ok_or(Error::Budget { required: u128::MAX, allowed: budget as u128 })?;
    check_budget(candidates as u128 * n_points as u128, budget)?;
    let table = f.truth_table(budget)?;
    let mut best = u64::MAX;
    let mut witnesses = Vec::new();
    for c in 0..candidates {
        let sum = DirectSum::from_canonical_index(&domain, c);
        let cand = sum.to_function().truth_table(budget)?;
        let dist = table.hamming(&cand);
        if dist < best {
            best = dist;
            witnesses = vec![sum];
        } else if dist == best {
            witnesses.push(sum);
        }
    }
    Ok(DirectSumDistance {
        value: ExactValue::new(
            best as u128,
            n_points as u128,
            format!("minimum over {candidates} canonical direct sums"),
        ),
        witnesses,
    })
}

/// The spectral route to the same distance on the hypercube:
/// `(1 - max_S |fhat(S)|) / 2`.
pub fn dist_to_affine_spectral(f: &BooleanFunction, budget: u64) -> Result<ExactValue> {
    let s = wht(f, budget)?;
    Ok(ExactValue::from_ratio(s.dist_to_affine(), "spectral: (1 - max |fhat|)/2".into()))
}

/// Exact minimum distance from an `n = 2` function to the degree-at-most-k
/// polynomials, enumerating all of them (Gray-code XOR walk).
pub fn dist_to_junta_degree(f: &BooleanFunction, k: usize, budget: u64) -> Result<ExactValue> {
    let domain = f.domain();
    if !domain.is_hypercube() {
        return Err(Error::Unsupported("junta-degree distance implemented for n = 2".into()));
    }
    let d = domain.dim();
    let monomials = crate::poly::monomial_masks(d, k);
    if monomials.len() >= 40 {
        return Err(Error::Budget { required: u128::MAX, allowed: budget as u128 });
    }
    let combos = 1u64 << monomials.len();
    check_budget(combos as u128 * (1u128 << d), budget)?;
    let tables: Vec<Vec<u64>> = monomials
        .iter()
        .map(|&m| crate::poly::monomial_table_words(d, m))
        .collect();
    let f_words = {
        let (_, w) = hypercube_words(f, budget)?;
        w
    };
    let words = f_words.len();
    let mut current = vec![0u64; words];
    let mut best = {
        let diff: u64 =
            (0..words).map(|i| (current[i] ^ f_words[i]).count_ones() as u64).sum();
        mask_trim_distance(diff, d)
    };
    for c in 1..combos {
        let flip_idx = c.trailing_zeros() as usize;
        for i in 0..words {
            current[i] ^= tables[flip_idx][i];
        }
        let mut diff = 0u64;
        for i in 0..words {
            diff += (current[i] ^ f_words[i]).count_ones() as u64;
        }
        let diff = mask_trim_distance(diff, d);
        if diff < best {
            best = diff;
        }
    }
    Ok(ExactValue::new(
        best as u128,
        1u128 << d,
        format!("minimum over {combos} degree-<={k} polynomials"),
    ))
}

// tables shorter than a word carry zero padding on both sides, so the raw
// popcount is already the Hamming distance
fn mask_trim_distance(diff: u64, _d: usize) -> u64 {
    diff
}

/// Exact distance to the union of the even and odd classes on the
/// hypercube: `min(Pr[f(x) != f(x+1)], Pr[f(x) = f(x+1)]) / 2`.
pub fn dist_even_or_odd(f: &BooleanFunction) -> Result<ExactValue> {
    let (d, w) = hypercube_words(f, 1 << 30)?;
    let n = 1u64 << d;
    let full = n - 1;
    let mut flips = 0u64;
    for x in 0..n {
        if getw(&w, x) != getw(&w, x ^ full) {
            flips += 1;
        }
    }
    let c = flips.min(n - flips);
    Ok(ExactValue::new(
        c as u128,
        2 * n as u128,
        format!("paired counts over {n} points"),
    ))
}

/// The expected distance of a random restriction to the even-or-odd class:
/// the exact sum over all `3^d` patterns of `weight * dist`.
///
/// Every pattern's contribution has denominator `2^(2d+1)`, so the sum is
/// accumulated as a single integer count.
pub fn expected_restricted_distance(f: &BooleanFunction, budget: u64) -> Result<ExactValue> {
    let (d, w) = hypercube_words(f, budget)?;
    let patterns = 3u128.pow(d as u32);
    check_budget(patterns * (1u128 << d), budget)?;
    let mut numer = 0u64;
    // pattern encoded in base 3: 0 = fix 0, 1 = fix 1, 2 = free
    let mut pattern = vec![0u8; d];
    loop {
        let free: Vec<usize> = (0..d).filter(|&i| pattern[i] == 2).collect();
        let m = free.len();
        let mut fixed_bits = 0u64;
        for i in 0..d {
            if pattern[i] == 1 {
                fixed_bits |= 1 << (d - 1 - i);
            }
        }
        let flip_mask: u64 = free.iter().map(|&i| 1u64 << (d - 1 - i)).sum();
        let mut flips = 0u64;
        for y in 0..(1u64 << m) {
            let mut idx = fixed_bits;
            for (j, &i) in free.iter().enumerate() {
                if y >> (m - 1 - j) & 1 == 1 {
                    idx |= 1 << (d - 1 - i);
                }
            }
            if getw(&w, idx) != getw(&w, idx ^ flip_mask) {
                flips += 1;
            }
        }
        numer += flips.min((1u64 << m) - flips);
        // next pattern
        let mut carry = 0;
        while carry < d {
            pattern[carry] += 1;
            if pattern[carry] < 3 {
                break;
            }
            pattern[carry] = 0;
            carry += 1;
        }
        if carry == d {
            break;
        }
    }
    Ok(ExactValue::new(
        numer as u128,
        1u128 << (2 * d + 1),
        format!("sum over {patterns} restriction patterns"),
    ))
}

/// Noise stability at correlation `rho`, computed two ways: the spectral
/// sum and the direct pair enumeration `1 - 2 Pr[f(x) != f(y)]`. The two
/// must agree exactly; the spectral value is returned.
pub fn noise_stability(f: &BooleanFunction, rho: Ratio<i64>, budget: u64) -> Result<ExactValue> {
    let (d, w) = hypercube_words(f, budget)?;
    check_budget(1u128 << (2 * d), budget)?;
    let s = wht(f, budget)?;
    let rho_big = BigRational::new(BigInt::from(*rho.numer()), BigInt::from(*rho.denom()));
    let spectral = s.stability(&rho_big);
    // direct route: per-coordinate agreement probability (1+rho)/2
    let keep = (rho_big + BigRational::one()) / BigRational::from(BigInt::from(2));
    let flip = BigRational::one() - keep.clone();
    let n = 1u64 << d;
    let mut disagree_by_class = vec![0u64; d + 1];
    for x in 0..n {
        for y in 0..n {
            if getw(&w, x) != getw(&w, y) {
                let agree = d - (x ^ y).count_ones() as usize;
                disagree_by_class[agree] += 1;
            }
        }
    }
    let mut pr = BigRational::zero();
    for (g, &count) in disagree_by_class.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let mut weight = BigRational::from(BigInt::from(count));
        for _ in 0..g {
            weight *= keep.clone();
        }
        for _ in 0..(d - g) {
            weight *= flip.clone();
        }
        pr += weight;
    }
    pr /= BigRational::from(BigInt::from(n));
    let direct = BigRational::one() - BigRational::from(BigInt::from(2)) * pr;
    if direct != spectral {
        return Err(Error::Unsupported(format!(
            "noise stability routes disagree: spectral {spectral}, direct {direct}"
        )));
    }
    Ok(ExactValue::from_ratio(
        spectral,
        format!("spectral sum, cross-checked by enumeration of {} pairs", n as u128 * n as u128),
    ))
}
