//! Random restrictions of hypercube functions: each coordinate is fixed to
//! 0 with probability 1/4, fixed to 1 with probability 1/4, and left free
//! with probability 1/2.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::bits::BitSource;
use crate::error::{Error, Result};
use crate::functions::{BooleanFunction, TruthTable};
use crate::grid::GridDomain;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordAction {
    Fix(bool),
    Free,
}

/// A per-coordinate restriction pattern for `n = 2` functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionPattern {
    pub actions: Vec<CoordAction>,
}

impl RestrictionPattern {
    pub fn new(actions: Vec<CoordAction>) -> Self {
        RestrictionPattern { actions }
    }

    pub fn dim(&self) -> usize {
        self.actions.len()
    }

    pub fn free_count(&self) -> usize {
        self.actions.iter().filter(|a| matches!(a, CoordAction::Free)).count()
    }

    pub fn fixed_count(&self) -> usize {
        self.dim() - self.free_count()
    }

    /// Probability of this pattern: `(1/4)^fixed * (1/2)^free`.
    pub fn weight(&self) -> BigRational {
        let log2 = 2 * self.fixed_count() + self.free_count();
        BigRational::new(BigInt::from(1), BigInt::from(1u8) << log2)
    }

    /// Samples with the per-coordinate law (fix-to-0: 1/4, fix-to-1: 1/4,
    /// free: 1/2), spending one bit when the coordinate stays free.
    pub fn sample(d: usize, src: &mut BitSource) -> Self {
        let actions = (0..d)
            .map(|_| if src.bit() { CoordAction::Free } else { CoordAction::Fix(src.bit()) })
            .collect();
        RestrictionPattern { actions }
    }

    pub fn all_free(d: usize) -> Self {
        RestrictionPattern { actions: vec![CoordAction::Free; d] }
    }

    /// All `3^d` patterns, in a fixed order.
    pub fn enumerate(d: usize) -> impl Iterator<Item = RestrictionPattern> {
        let total = 3u64.checked_pow(d as u32).expect("too many patterns");
        (0..total).map(move |mut code| {
            let mut actions = Vec::with_capacity(d);
            for _ in 0..d {
                actions.push(match code % 3 {
                    0 => CoordAction::Fix(false),
                    1 => CoordAction::Fix(true),
                    _ => CoordAction::Free,
                });
                code /= 3;
            }
            RestrictionPattern { actions }
        })
    }
}

/// Applies a restriction to an `n = 2` function, producing the function of
/// the free coordinates that agrees with `f` on the fixed subcube. With the
/// row-major bit layout this is a strided copy of the table.
pub fn restriction_apply(f: &BooleanFunction, r: &RestrictionPattern) -> Result<BooleanFunction> {
    let domain = f.domain();
    if !domain.is_hypercube() {
        return Err(Error::Unsupported("restrictions apply to n = 2 functions".into()));
    }
    let d = domain.dim();
    if r.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: r.dim() });
    }
    let m = r.free_count();
    let table = f.truth_table(1 << 28)?;
    let mut out = TruthTable::zeros(1 << m);
    for y in 0..(1u64 << m) {
        let mut idx = 0u64;
        let mut free_seen = 0u32;
        for action in &r.actions {
            let bit = match action {
                CoordAction::Fix(b) => *b as u64,
                CoordAction::Free => {
                    let b = (y >> (m as u32 - 1 - free_seen)) & 1;
                    free_seen += 1;
                    b
                }
            };
            idx = idx << 1 | bit;
        }
        if table.get(idx) {
            out.set(y, true);
        }
    }
    BooleanFunction::from_table(GridDomain::hypercube(m.max(0))?, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::Family;
    use crate::grid::GridPoint;

    #[test]
    fn all_free_is_identity() {
        let dom = GridDomain::hypercube(3).unwrap();
        let f = BooleanFunction::named(Family::Majority, dom).unwrap();
        let g = restriction_apply(&f, &RestrictionPattern::all_free(3)).unwrap();
        assert_eq!(f.truth_table(8).unwrap(), g.truth_table(8).unwrap());
    }

    #[test]
    fn all_fixed_gives_a_constant() {
        let dom = GridDomain::hypercube(2).unwrap();
        let f = BooleanFunction::named(Family::And, dom).unwrap();
        let r = RestrictionPattern::new(vec![CoordAction::Fix(true), CoordAction::Fix(true)]);
        let g = restriction_apply(&f, &r).unwrap();
        assert_eq!(g.domain().dim(), 0);
        assert!(g.eval(&GridPoint::zeros(0)).unwrap());
    }

    #[test]
    fn restricted_agrees_on_the_subcube() {
        let dom = GridDomain::hypercube(4).unwrap();
        let f = BooleanFunction::named(Family::Random(3), dom).unwrap();
        let r = RestrictionPattern::new(vec![
            CoordAction::Fix(true),
            CoordAction::Free,
            CoordAction::Fix(false),
            CoordAction::Free,
        ]);
        let g = restriction_apply(&f, &r).unwrap();
        for y0 in 0..2u32 {
            for y1 in 0..2u32 {
                let full = GridPoint::new(vec![1, y0, 0, y1]);
                let reduced = GridPoint::new(vec![y0, y1]);
                assert_eq!(f.eval(&full).unwrap(), g.eval(&reduced).unwrap());
            }
        }
    }

    #[test]
    fn apply_rejects_grids() {
        let dom = GridDomain::uniform(3, 2).unwrap();
        let f = BooleanFunction::constant(dom, false).unwrap();
        assert!(restriction_apply(&f, &RestrictionPattern::all_free(2)).is_err());
    }

    #[test]
    fn sampled_pattern_frequencies() {
        let mut src = BitSource::new(8);
        let mut fix0 = 0u32;
        let mut fix1 = 0u32;
        let mut free = 0u32;
        let total = 100_000;
        for _ in 0..total {
            match RestrictionPattern::sample(1, &mut src).actions[0] {
                CoordAction::Fix(false) => fix0 += 1,
                CoordAction::Fix(true) => fix1 += 1,
                CoordAction::Free => free += 1,
            }
        }
        let t = total as f64;
        assert!((fix0 as f64 / t - 0.25).abs() < 0.01);
        assert!((fix1 as f64 / t - 0.25).abs() < 0.01);
        assert!((free as f64 / t - 0.5).abs() < 0.01);
    }

    #[test]
    fn enumeration_counts_and_weights() {
        let pats: Vec<_> = RestrictionPattern::enumerate(3).collect();
        assert_eq!(pats.len(), 27);
        let total: BigRational = pats.iter().map(|p| p.weight()).sum();
        assert_eq!(total, BigRational::from(BigInt::from(1)));
    }
}
