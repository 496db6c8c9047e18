//! Multilinear polynomials over `F_2` in algebraic normal form, and the
//! biased-measure weight of their nonzero sets.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::functions::{BooleanFunction, TruthTable};
use crate::grid::GridDomain;

/// A polynomial `sum_{S in M} prod_{i in S} x_i` over `F_2^d`, stored as
/// the set of monomials with coefficient 1. Monomial masks use bit `i` for
/// coordinate `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct F2Polynomial {
    d: usize,
    monomials: Vec<u32>,
}

impl F2Polynomial {
    pub fn new(d: usize, monomials: impl IntoIterator<Item = u32>) -> Result<Self> {
        if d > 31 {
            return Err(Error::Unsupported("polynomials limited to d <= 31".into()));
        }
        let mut ms: Vec<u32> = monomials.into_iter().collect();
        ms.sort_unstable();
        ms.dedup();
        if let Some(&m) = ms.iter().find(|&&m| m >= 1u32 << d) {
            return Err(Error::Config(format!("monomial mask {m:#b} outside {d} variables")));
        }
        Ok(F2Polynomial { d, monomials: ms })
    }

    /// Builds from coordinate index sets, e.g. `[&[0], &[1, 2]]` for
    /// `x_1 + x_2 x_3`.
    pub fn from_sets(d: usize, sets: &[&[usize]]) -> Result<Self> {
        let masks = sets
            .iter()
            .map(|s| s.iter().fold(0u32, |m, &i| m | 1 << i))
            .collect::<Vec<_>>();
        F2Polynomial::new(d, masks)
    }

    pub fn zero(d: usize) -> Self {
        F2Polynomial { d, monomials: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.monomials.iter().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn monomials(&self) -> &[u32] {
        &self.monomials
    }

    /// Evaluates at the 0/1 assignment given by `support` (bit `i` is
    /// coordinate `i`).
    pub fn eval_support(&self, support: u32) -> bool {
        self.monomials.iter().filter(|&&m| m & support == m).count() % 2 == 1
    }

    pub fn to_function(&self) -> Result<BooleanFunction> {
        let domain = GridDomain::hypercube(self.d)?;
        let n = 1u64 << self.d;
        let mut t = TruthTable::zeros(n);
        for idx in 0..n {
            // point-index bit d-1-i carries coordinate i
            let support = (0..self.d)
                .filter(|&i| idx >> (self.d - 1 - i) & 1 == 1)
                .fold(0u32, |s, i| s | 1 << i);
            if self.eval_support(support) {
                t.set(idx, true);
            }
        }
        BooleanFunction::from_table(domain, t)
    }

    /// All nonzero polynomials of degree at most `k` on `d` variables.
    pub fn enumerate_nonzero(d: usize, k: usize) -> impl Iterator<Item = F2Polynomial> {
        let masks = monomial_masks(d, k);
        assert!(masks.len() < 40, "too many monomials to enumerate");
        let total = 1u64 << masks.len();
        (1..total).map(move |code| {
            let ms = masks
                .iter()
                .enumerate()
                .filter(|(i, _)| code >> i & 1 == 1)
                .map(|(_, &m)| m)
                .collect::<Vec<_>>();
            F2Polynomial { d, monomials: ms }
        })
    }
}

/// All monomial masks of degree at most `k` on `d` coordinates, the empty
/// monomial included, in increasing mask order.
pub fn monomial_masks(d: usize, k: usize) -> Vec<u32> {
    (0u32..1 << d).filter(|m| (m.count_ones() as usize) <= k).collect()
}

/// Packed truth table (point-index order) of a single monomial.
pub fn monomial_table_words(d: usize, mask: u32) -> Vec<u64> {
    let n = 1u64 << d;
    let mut words = vec![0u64; (n as usize).div_ceil(64)];
    for idx in 0..n {
        let support = (0..d)
            .filter(|&i| idx >> (d - 1 - i) & 1 == 1)
            .fold(0u32, |s, i| s | 1 << i);
        if mask & support == mask {
            words[(idx / 64) as usize] |= 1 << (idx % 64);
        }
    }
    words
}

/// Exact `Pr_D[f(x) != 0]` under a product measure with the given
/// per-coordinate marginals `Pr[x_i = 1]`.
///
/// Requires a nonzero polynomial and marginals in `[1/10, 9/10]`, the range
/// where the `1/10^k` lower bound applies.
pub fn biased_nonzero_weight(
    poly: &F2Polynomial,
    marginals: &[BigRational],
) -> Result<ExactValue> {
    if poly.is_zero() {
        return Err(Error::Config("weight of the zero polynomial is identically zero".into()));
    }
    if marginals.len() != poly.dim() {
        return Err(Error::DimensionMismatch { expected: poly.dim(), got: marginals.len() });
    }
    let lo = BigRational::new(BigInt::one(), BigInt::from(10));
    let hi = BigRational::new(BigInt::from(9), BigInt::from(10));
    for (i, p) in marginals.iter().enumerate() {
        if p < &lo || p > &hi {
            return Err(Error::Config(format!(
                "marginal {i} is {p}, outside [1/10, 9/10]"
            )));
        }
    }
    let d = poly.dim();
    let mut total = BigRational::zero();
    for support in 0u32..1 << d {
        if !poly.eval_support(support) {
            continue;
        }
        let mut w = BigRational::one();
        for (i, p) in marginals.iter().enumerate() {
            if support >> i & 1 == 1 {
                w *= p.clone();
            } else {
                w *= BigRational::one() - p.clone();
            }
        }
        total += w;
    }
    Ok(ExactValue::from_ratio(
        total,
        format!("weighted enumeration of {} assignments", 1u64 << d),
    ))
}

/// Convenience: every marginal equal to `p`.
pub fn uniform_marginals(d: usize, p: BigRational) -> Vec<BigRational> {
    vec![p; d]
}
