//! Local correction: recovering the closest direct sum's value at a point
//! from a corrupted oracle, by majority over independent votes.
//!
//! Two vote patterns ship. The hybrid-sum vote reads the `d` one-coordinate
//! hybrids of a fresh random endpoint (`d` queries per vote, odd `d`). The
//! fast vote partitions the coordinates and reads `n` points (`n + 1` for
//! even `n`), which is optimal up to constants: below `n/4` queries the
//! value is not determined, and below distance `1/(2n)` no unique closest
//! direct sum exists.

use crate::bits::BitSource;
use crate::error::{Error, Result};
use crate::grid::{interpolate, BitMask, GridPoint};
use crate::oracle::OracleHandle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeScheme {
    /// Hybrid-sum votes, `d` queries per vote (`d + 1` when `d` is even;
    /// the even-`d` variant carries no stated correctness bound and is
    /// experimental).
    Shapka,
    /// Partition votes, `n` queries per vote for odd `n`, `n + 1` for even.
    Fast,
}

/// Decoder configuration: the scheme and an odd number of votes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeConfig {
    pub scheme: DecodeScheme,
    pub votes: usize,
}

impl DecodeConfig {
    pub fn new(scheme: DecodeScheme, votes: usize) -> Result<Self> {
        if votes == 0 || votes % 2 == 0 {
            return Err(Error::Config(format!("vote count must be odd, got {votes}")));
        }
        Ok(DecodeConfig { scheme, votes })
    }
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig { scheme: DecodeScheme::Fast, votes: 101 }
    }
}

/// The outcome of a decode: the majority value and the full tally, so
/// callers can report near-ties (as happens at the information-theoretic
/// radius) instead of trusting the winner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub value: bool,
    pub ones: usize,
    pub zeros: usize,
    pub void_votes: usize,
    pub queries: u64,
}

/// One hybrid-sum vote: `sum_i f(phi_{e_i}(a, b))` for a fresh uniform `a`
/// (plus `f(a)` when `d` is even). `None` when any query was erased.
fn shapka_one_vote(
    oracle: &mut OracleHandle,
    b: &GridPoint,
    src: &mut BitSource,
) -> Result<Option<bool>> {
    let domain = oracle.function().domain();
    let d = domain.dim();
    let a = domain.sample(src);
    let mut acc = false;
    let mut void = false;
    for i in 0..d {
        let p = interpolate(&a, b, &BitMask::unit(d, i))?;
        match oracle.query(&p)? {
            Some(v) => acc ^= v,
            None => void = true,
        }
    }
    if d % 2 == 0 {
        match oracle.query(&a)? {
            Some(v) => acc ^= v,
            None => void = true,
        }
    }
    Ok(if void { None } else { Some(acc) })
}

/// One partition vote. Coordinates are split into `parts` classes; query
/// `i` takes `b_j` on class `i` and a shared off-target value `R_j`
/// elsewhere, chosen so that every query point is marginally uniform.
fn fast_one_vote(
    oracle: &mut OracleHandle,
    b: &GridPoint,
    src: &mut BitSource,
) -> Result<Option<bool>> {
    let domain = oracle.function().domain().clone();
    let d = domain.dim();
    let n = domain
        .uniform_size()
        .ok_or_else(|| Error::Unsupported("fast decode needs a uniform alphabet".into()))?;
    let parts = if n % 2 == 1 { n } else { n + 1 };
    let assignment: Vec<u32> = (0..d).map(|_| src.alphabet(parts)).collect();
    // off-target values: never b_j for odd n; b_j with probability 1/n^2
    // for even n, which restores uniform query marginals
    let off: Vec<u32> = (0..d)
        .map(|j| {
            let bj = b.coords[j];
            if n % 2 == 0 && src.alphabet(n) == 0 && src.alphabet(n) == 0 {
                bj
            } else {
                let r = src.alphabet(n - 1);
                if r >= bj {
                    r + 1
                } else {
                    r
                }
            }
        })
        .collect();
    let mut acc = false;
    let mut void = false;
    for i in 0..parts {
        let coords: Vec<u32> = (0..d)
            .map(|j| if assignment[j] == i { b.coords[j] } else { off[j] })
            .collect();
        match oracle.query(&GridPoint::new(coords))? {
            Some(v) => acc ^= v,
            None => void = true,
        }
    }
    Ok(if void { None } else { Some(acc) })
}

fn majority_decode(
    oracle: &mut OracleHandle,
    b: &GridPoint,
    votes: usize,
    src: &mut BitSource,
    one_vote: impl Fn(&mut OracleHandle, &GridPoint, &mut BitSource) -> Result<Option<bool>>,
) -> Result<DecodeOutcome> {
    if votes == 0 || votes % 2 == 0 {
        return Err(Error::Config(format!("vote count must be odd, got {votes}")));
    }
    oracle.function().domain().check_point(b)?;
    let before = oracle.query_count();
    let mut ones = 0usize;
    let mut zeros = 0usize;
    let mut void_votes = 0usize;
    for _ in 0..votes {
        match one_vote(oracle, b, src)? {
            Some(true) => ones += 1,
            Some(false) => zeros += 1,
            None => void_votes += 1,
        }
    }
    if ones + zeros == 0 {
        return Err(Error::DecodeFailed("every vote was void".into()));
    }
    if ones == zeros {
        return Err(Error::DecodeFailed(format!("tie at {ones} votes each")));
    }
    Ok(DecodeOutcome {
        value: ones > zeros,
        ones,
        zeros,
        void_votes,
        queries: oracle.query_count() - before,
    })
}

/// Majority of `votes` hybrid-sum votes for the closest direct sum's value
/// at `b`. The stated guarantee needs odd `d` and `n * dist * d < 1/4`.
pub fn shapka_vote(
    oracle: &mut OracleHandle,
    b: &GridPoint,
    votes: usize,
    src: &mut BitSource,
) -> Result<DecodeOutcome> {
    majority_decode(oracle, b, votes, src, shapka_one_vote)
}

/// Majority of `votes` partition votes. The stated guarantee needs
/// `(n + 1) * dist < 1/4`.
pub fn fast_decode(
    oracle: &mut OracleHandle,
    b: &GridPoint,
    votes: usize,
    src: &mut BitSource,
) -> Result<DecodeOutcome> {
    majority_decode(oracle, b, votes, src, fast_one_vote)
}

/// Dispatch by configuration.
pub fn decode(
    config: DecodeConfig,
    oracle: &mut OracleHandle,
    b: &GridPoint,
    src: &mut BitSource,
) -> Result<DecodeOutcome> {
    match config.scheme {
        DecodeScheme::Shapka => shapka_vote(oracle, b, config.votes, src),
        DecodeScheme::Fast => fast_decode(oracle, b, config.votes, src),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::DirectSum;
    use crate::grid::GridDomain;

    #[test]
    fn uncorrupted_sums_decode_exactly() {
        // fast votes cancel the off-target contributions for every parity of n
        for n in [3u32, 4, 5] {
            let dom = GridDomain::uniform(n, 5).unwrap();
            let mut src = BitSource::new(n as u64);
            let sum = DirectSum::random(&dom, &mut src);
            let f = sum.to_function();
            for _ in 0..30 {
                let b = dom.sample(&mut src);
                let mut h = OracleHandle::new(&f);
                let out = fast_decode(&mut h, &b, 5, &mut src).unwrap();
                assert_eq!(out.value, sum.eval(&b), "n={n}");
            }
        }
        // hybrid-sum votes, both parities of d
        for d in [3usize, 4] {
            let dom = GridDomain::uniform(3, d).unwrap();
            let mut src = BitSource::new(d as u64 + 17);
            let sum = DirectSum::random(&dom, &mut src);
            let f = sum.to_function();
            for _ in 0..30 {
                let b = dom.sample(&mut src);
                let mut h = OracleHandle::new(&f);
                let out = shapka_vote(&mut h, &b, 5, &mut src).unwrap();
                assert_eq!(out.value, sum.eval(&b), "d={d}");
            }
        }
    }

    #[test]
    fn vote_cancellation_brute_force() {
        // single votes on uncorrupted sums are always correct: n in {3, 5},
        // every d in 2..=6, many draws
        for n in [3u32, 5] {
            for d in 2..=6usize {
                let dom = GridDomain::uniform(n, d).unwrap();
                let mut src = BitSource::new(n as u64 * 100 + d as u64);
                let sum = DirectSum::random(&dom, &mut src);
                let f = sum.to_function();
                for _ in 0..200 {
                    let b = dom.sample(&mut src);
                    let mut h = OracleHandle::new(&f);
                    let vote = fast_one_vote(&mut h, &b, &mut src).unwrap().unwrap();
                    assert_eq!(vote, sum.eval(&b), "n={n} d={d}");
                    assert_eq!(h.query_count(), n as u64);
                }
            }
        }
    }

    #[test]
    fn query_counts_per_vote() {
        let cases: Vec<(u32, usize, u64)> = vec![(3, 4, 3), (4, 4, 5), (5, 3, 5)];
        for (n, d, per_vote) in cases {
            let dom = GridDomain::uniform(n, d).unwrap();
            let mut src = BitSource::new(1);
            let f = DirectSum::random(&dom, &mut src).to_function();
            let b = dom.sample(&mut src);
            let mut h = OracleHandle::new(&f);
            let out = fast_decode(&mut h, &b, 7, &mut src).unwrap();
            assert_eq!(out.queries, 7 * per_vote, "n={n}");
        }
        // hybrid-sum: d per vote (odd d), d + 1 (even d)
        for (d, per_vote) in [(3usize, 3u64), (4, 5)] {
            let dom = GridDomain::uniform(3, d).unwrap();
            let mut src = BitSource::new(2);
            let f = DirectSum::random(&dom, &mut src).to_function();
            let b = dom.sample(&mut src);
            let mut h = OracleHandle::new(&f);
            let out = shapka_vote(&mut h, &b, 7, &mut src).unwrap();
            assert_eq!(out.queries, 7 * per_vote, "d={d}");
        }
    }

    #[test]
    fn decode_query_marginals_are_uniform() {
        // the union-bound premise: every decode query is marginally uniform;
        // observed through a zero-budget adversary that sees the transcript
        use crate::oracle::ErasureStrategy;
        use std::cell::RefCell;
        use std::rc::Rc;

        struct Recorder {
            counts: Rc<RefCell<Vec<u64>>>,
        }
        impl ErasureStrategy for Recorder {
            fn erase(&mut self, transcript: &[GridPoint], _t: usize) -> Vec<GridPoint> {
                let p = transcript.last().unwrap();
                self.counts.borrow_mut()[p.coords[0] as usize] += 1;
                Vec::new()
            }
        }

        // fast votes: every query point is uniform on the whole grid
        for n in [3u32, 4] {
            let d = 8usize;
            let dom = GridDomain::uniform(n, d).unwrap();
            let mut src = BitSource::new(5);
            let f = DirectSum::random(&dom, &mut src).to_function();
            let b = dom.sample(&mut src);
            let counts = Rc::new(RefCell::new(vec![0u64; n as usize]));
            let votes = 20_000;
            let mut h = OracleHandle::with_erasure(
                &f,
                0,
                Box::new(Recorder { counts: Rc::clone(&counts) }),
            );
            for _ in 0..votes {
                fast_decode(&mut h, &b, 1, &mut src).unwrap();
            }
            let counts = counts.borrow();
            let total: u64 = counts.iter().sum();
            let expect = total as f64 / n as f64;
            for (v, &c) in counts.iter().enumerate() {
                let dev = (c as f64 - expect).abs() / expect;
                assert!(dev < 0.03, "n={n} value {v}: {c} vs {expect}");
            }
        }
        // hybrid-sum votes: each query is uniform on the slice that pins
        // one coordinate of b, so coordinate 0 is uniform except on the
        // first hybrid of each vote, where it is exactly b_0
        {
            let (n, d) = (3u32, 8usize);
            let dom = GridDomain::uniform(n, d).unwrap();
            let mut src = BitSource::new(6);
            let f = DirectSum::random(&dom, &mut src).to_function();
            let b = dom.sample(&mut src);
            let per_slot = Rc::new(RefCell::new(vec![0u64; 2 * n as usize]));

            struct SlotRecorder {
                per_slot: Rc<RefCell<Vec<u64>>>,
                d: usize,
                n: usize,
            }
            impl ErasureStrategy for SlotRecorder {
                fn erase(&mut self, transcript: &[GridPoint], _t: usize) -> Vec<GridPoint> {
                    let pos = (transcript.len() - 1) % self.d;
                    let c0 = transcript.last().unwrap().coords[0] as usize;
                    let slot = usize::from(pos != 0);
                    self.per_slot.borrow_mut()[slot * self.n + c0] += 1;
                    Vec::new()
                }
            }

            let votes = 30_000;
            let mut h = OracleHandle::with_erasure(
                &f,
                0,
                Box::new(SlotRecorder { per_slot: Rc::clone(&per_slot), d, n: n as usize }),
            );
            for _ in 0..votes {
                shapka_vote(&mut h, &b, 1, &mut src).unwrap();
            }
            let counts = per_slot.borrow();
            // first hybrid always carries b_0
            for v in 0..n as usize {
                let c = counts[v];
                if v == b.coords[0] as usize {
                    assert_eq!(c, votes as u64);
                } else {
                    assert_eq!(c, 0);
                }
            }
            // remaining hybrids: coordinate 0 comes from the fresh endpoint
            let total: u64 = counts[n as usize..].iter().sum();
            let expect = total as f64 / n as f64;
            for v in 0..n as usize {
                let c = counts[n as usize + v];
                assert!((c as f64 - expect).abs() / expect < 0.03, "value {v}: {c} vs {expect}");
            }
        }
    }

    #[test]
    fn decode_rejects_even_vote_counts() {
        let dom = GridDomain::uniform(3, 3).unwrap();
        let mut src = BitSource::new(0);
        let f = DirectSum::zero(&dom).to_function();
        let mut h = OracleHandle::new(&f);
        let b = GridPoint::zeros(3);
        assert!(fast_decode(&mut h, &b, 4, &mut src).is_err());
        assert!(DecodeConfig::new(DecodeScheme::Fast, 100).is_err());
        assert!(DecodeConfig::new(DecodeScheme::Fast, 101).is_ok());
    }

    #[test]
    fn strict_radius_decode_never_errs() {
        // n=2, d=7 with exactly two flips: dist = 1/64, n*dist*d = 7/32 < 1/4
        let dom = GridDomain::uniform(2, 7).unwrap();
        let mut src = BitSource::new(23);
        let sum = DirectSum::random(&dom, &mut src);
        let f = sum.to_function();
        let flips = vec![dom.sample(&mut src), {
            let mut p = dom.sample(&mut src);
            p.coords[0] ^= 1;
            p
        }];
        let g = f.corrupt_points(&flips).unwrap();
        for _ in 0..200 {
            let b = dom.sample(&mut src);
            let mut h = OracleHandle::new(&g);
            let out = shapka_vote(&mut h, &b, 101, &mut src).unwrap();
            assert_eq!(out.value, sum.eval(&b));
        }
    }
}
