//! Grid domains `[n_1] x .. x [n_d]`, points, bit masks over the
//! coordinates, subcube interpolation, and the noise operator.
//!
//! Alphabets are 0-indexed `{0, .., n_i - 1}` throughout. Point indices are
//! row-major with the last coordinate fastest.

use crate::bits::BitSource;
use crate::error::{Error, Result};

/// A product domain given by its per-coordinate alphabet sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridDomain {
    sizes: Vec<u32>,
}

impl GridDomain {
    pub fn new(sizes: Vec<u32>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::Config("domain needs at least one coordinate".into()));
        }
        if let Some((i, &s)) = sizes.iter().enumerate().find(|(_, &s)| s < 2) {
            return Err(Error::Config(format!("alphabet size at coordinate {i} is {s}, need >= 2")));
        }
        Ok(GridDomain { sizes })
    }

    /// The uniform grid `[n]^d`.
    pub fn uniform(n: u32, d: usize) -> Result<Self> {
        GridDomain::new(vec![n; d])
    }

    /// The hypercube `F_2^d`.
    pub fn hypercube(d: usize) -> Result<Self> {
        GridDomain::uniform(2, d)
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn size(&self, i: usize) -> u32 {
        self.sizes[i]
    }

    /// `Some(n)` when every coordinate has the same alphabet size `n`.
    pub fn uniform_size(&self) -> Option<u32> {
        let n = self.sizes[0];
        self.sizes.iter().all(|&s| s == n).then_some(n)
    }

    pub fn is_hypercube(&self) -> bool {
        self.uniform_size() == Some(2)
    }

    /// Total number of points, or `None` on overflow.
    pub fn point_count(&self) -> Option<u64> {
        self.sizes.iter().try_fold(1u64, |acc, &s| acc.checked_mul(s as u64))
    }

    /// Point count checked against an enumeration budget.
    pub fn checked_point_count(&self, budget: u64) -> Result<u64> {
        let n = self.point_count().ok_or(Error::Budget {
            required: u128::MAX,
            allowed: budget as u128,
        })?;
        if n > budget {
            return Err(Error::Budget { required: n as u128, allowed: budget as u128 });
        }
        Ok(n)
    }

    pub fn contains(&self, p: &GridPoint) -> bool {
        p.coords.len() == self.dim() && p.coords.iter().zip(&self.sizes).all(|(&c, &s)| c < s)
    }

    pub fn check_point(&self, p: &GridPoint) -> Result<()> {
        if p.coords.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.coords.len() });
        }
        for (i, (&c, &s)) in p.coords.iter().zip(&self.sizes).enumerate() {
            if c >= s {
                return Err(Error::OutOfRange { coord: i, value: c, size: s });
            }
        }
        Ok(())
    }

    /// Row-major index, last coordinate fastest.
    pub fn index_of(&self, p: &GridPoint) -> u64 {
        let mut idx = 0u64;
        for (&c, &s) in p.coords.iter().zip(&self.sizes) {
            idx = idx * s as u64 + c as u64;
        }
        idx
    }

    pub fn point_at(&self, mut idx: u64) -> GridPoint {
        let mut coords = vec![0u32; self.dim()];
        for i in (0..self.dim()).rev() {
            let s = self.sizes[i] as u64;
            coords[i] = (idx % s) as u32;
            idx /= s;
        }
        GridPoint::new(coords)
    }

    /// Uniform point, one alphabet draw per coordinate.
    pub fn sample(&self, src: &mut BitSource) -> GridPoint {
        GridPoint::new(self.sizes.iter().map(|&s| src.alphabet(s)).collect())
    }

    /// Iterates all points in index order. Intended for small domains.
    pub fn iter_points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        let total = self.point_count().expect("domain too large to iterate");
        (0..total).map(move |i| self.point_at(i))
    }
}

/// A point of the grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridPoint {
    pub coords: Vec<u32>,
}

impl GridPoint {
    pub fn new(coords: Vec<u32>) -> Self {
        GridPoint { coords }
    }

    pub fn zeros(d: usize) -> Self {
        GridPoint { coords: vec![0; d] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl From<Vec<u32>> for GridPoint {
    fn from(coords: Vec<u32>) -> Self {
        GridPoint { coords }
    }
}

/// A vector over `F_2^d` used to select between two points coordinate-wise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMask {
    pub bits: Vec<bool>,
}

impl BitMask {
    pub fn new(bits: Vec<bool>) -> Self {
        BitMask { bits }
    }

    pub fn zeros(d: usize) -> Self {
        BitMask { bits: vec![false; d] }
    }

    pub fn ones(d: usize) -> Self {
        BitMask { bits: vec![true; d] }
    }

    pub fn dim(&self) -> usize {
        self.bits.len()
    }

    /// `x + 1` over `F_2^d`.
    pub fn complement(&self) -> BitMask {
        BitMask { bits: self.bits.iter().map(|b| !b).collect() }
    }

    pub fn xor(&self, other: &BitMask) -> BitMask {
        assert_eq!(self.bits.len(), other.bits.len());
        BitMask { bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect() }
    }

    /// Unit vector `e_i`.
    pub fn unit(d: usize, i: usize) -> BitMask {
        let mut bits = vec![false; d];
        bits[i] = true;
        BitMask { bits }
    }

    pub fn sample(d: usize, src: &mut BitSource) -> BitMask {
        BitMask { bits: (0..d).map(|_| src.bit()).collect() }
    }

    /// Decodes `d` bits of `idx`, bit `d-1-i` giving coordinate `i`, matching
    /// the row-major point index convention on the hypercube.
    pub fn from_index(idx: u64, d: usize) -> BitMask {
        BitMask { bits: (0..d).map(|i| (idx >> (d - 1 - i)) & 1 == 1).collect() }
    }

    /// Interprets the mask as a point of `F_2^d`.
    pub fn to_point(&self) -> GridPoint {
        GridPoint::new(self.bits.iter().map(|&b| b as u32).collect())
    }
}

/// The interpolation of `a` and `b` along `x`: takes `a_i` where `x_i = 0`
/// and `b_i` where `x_i = 1`. Satisfies the flip identity
/// `interpolate(a, b, x) == interpolate(b, a, x + 1)`.
pub fn interpolate(a: &GridPoint, b: &GridPoint, x: &BitMask) -> Result<GridPoint> {
    let d = a.dim();
    if b.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: b.dim() });
    }
    if x.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.dim() });
    }
    Ok(GridPoint::new(
        (0..d).map(|i| if x.bits[i] { b.coords[i] } else { a.coords[i] }).collect(),
    ))
}

/// One sample of the noise operator applied at `x`.
///
/// For `p >= 0` each coordinate keeps its value with probability `p` and is
/// resampled uniformly otherwise. Negative `p` is the signed variant on the
/// hypercube only: the coordinate flips with probability `|p|` and is
/// resampled uniformly otherwise. `|p| < 1` is required.
pub fn noise_sample(
    x: &GridPoint,
    domain: &GridDomain,
    p: f64,
    src: &mut BitSource,
) -> Result<GridPoint> {
    domain.check_point(x)?;
    if !(p > -1.0 && p < 1.0) {
        return Err(Error::Unsupported(format!("noise correlation {p} outside (-1, 1)")));
    }
    if p < 0.0 && !domain.is_hypercube() {
        return Err(Error::Unsupported("negative correlation requires n = 2".into()));
    }
    let mut coords = Vec::with_capacity(x.dim());
    for (i, &c) in x.coords.iter().enumerate() {
        let n = domain.size(i);
        let v = if src.coin(p.abs()) {
            if p < 0.0 {
                c ^ 1
            } else {
                c
            }
        } else {
            src.alphabet(n)
        };
        coords.push(v);
    }
    Ok(GridPoint::new(coords))
}

/// The correlation that makes per-coordinate agreement probability `3/4`
/// on `[n]^d`: `(3n/4 - 1)/(n - 1)`.
pub fn eq_three_quarters(n: u32) -> f64 {
    (0.75 * n as f64 - 1.0) / (n as f64 - 1.0)
}
