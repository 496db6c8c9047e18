//! Walsh-Hadamard analysis of hypercube functions.
//!
//! Coefficients are taken of the `+/-1`-valued form `(-1)^f`, so they are
//! exact rationals with denominator `2^d`, and Parseval reads
//! `sum_S fhat(S)^2 = 1`. Masks live in point-index space: bit `d-1-i` of a
//! mask pairs with coordinate `i`, matching the row-major table layout.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::functions::BooleanFunction;

/// The full Walsh-Hadamard coefficient table of an `n = 2` function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    d: usize,
    /// `nums[mask] = 2^d * fhat(mask)`, always an integer in `[-2^d, 2^d]`.
    nums: Vec<i64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.nums.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `fhat(mask)` as an exact rational.
    pub fn coefficient(&self, mask: usize) -> BigRational {
        BigRational::new(BigInt::from(self.nums[mask]), BigInt::from(1u64 << self.d))
    }

    /// Numerator of `2^d * fhat(mask)`.
    pub fn numerator(&self, mask: usize) -> i64 {
        self.nums[mask]
    }

    /// `fhat(S)` for a set of coordinate indices.
    pub fn coefficient_of_set(&self, coords: &[usize]) -> BigRational {
        self.coefficient(self.mask_of_set(coords))
    }

    pub fn mask_of_set(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0usize, |m, &i| m | 1 << (self.d - 1 - i))
    }

    /// Coordinate indices of a mask, in increasing order.
    pub fn set_of_mask(&self, mask: usize) -> Vec<usize> {
        (0..self.d).filter(|&i| mask >> (self.d - 1 - i) & 1 == 1).collect()
    }

    /// The largest-magnitude coefficient and its mask (first such mask in
    /// index order).
    pub fn max_abs(&self) -> (usize, BigRational) {
        let (mask, _) = self
            .nums
            .iter()
            .enumerate()
            .max_by_key(|(_, &v)| v.abs())
            .expect("spectrum is nonempty");
        (mask, self.coefficient(mask).abs())
    }

    /// Exact Parseval check: `sum_S (2^d fhat(S))^2 == 4^d`.
    pub fn parseval_holds(&self) -> bool {
        let sum: i128 = self.nums.iter().map(|&v| (v as i128) * (v as i128)).sum();
        sum == 1i128 << (2 * self.d)
    }

    /// `sum_S rho^{|S|} fhat(S)^2`, exactly.
    pub fn stability(&self, rho: &BigRational) -> BigRational {
        let den = BigInt::from(1u64) << (2 * self.d);
        let mut acc = BigRational::new(BigInt::from(0), BigInt::from(1));
        for (mask, &v) in self.nums.iter().enumerate() {
            if v == 0 {
                continue;
            }
            let sq = BigRational::new(BigInt::from(v as i128 * v as i128), den.clone());
            acc += pow_ratio(rho, mask.count_ones()) * sq;
        }
        acc
    }

    /// `(1 - max_S |fhat(S)|) / 2`: the spectral route to the distance from
    /// the affine functions.
    pub fn dist_to_affine(&self) -> BigRational {
        let one = BigRational::from(BigInt::from(1));
        let (_, m) = self.max_abs();
        (one - m) / BigRational::from(BigInt::from(2))
    }

    /// Iterates `(mask, numerator)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.nums.iter().copied().enumerate()
    }
}

fn pow_ratio(r: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::from(BigInt::from(1));
    for _ in 0..k {
        acc *= r.clone();
    }
    acc
}

/// Computes the spectrum by the fast transform, `d * 2^d` operations.
pub fn wht(f: &BooleanFunction, budget: u64) -> Result<Spectrum> {
    let domain = f.domain();
    if !domain.is_hypercube() {
        return Err(Error::Unsupported("Walsh-Hadamard analysis needs n = 2".into()));
    }
    let d = domain.dim();
    let table = f.truth_table(budget)?;
    let mut v: Vec<i64> = (0..table.len()).map(|i| if table.get(i) { -1 } else { 1 }).collect();
    let mut h = 1usize;
    while h < v.len() {
        let mut i = 0;
        while i < v.len() {
            for j in i..i + h {
                let (x, y) = (v[j], v[j + h]);
                v[j] = x + y;
                v[j + h] = x - y;
            }
            i += 2 * h;
        }
        h *= 2;
    }
    Ok(Spectrum { d, nums: v })
}
