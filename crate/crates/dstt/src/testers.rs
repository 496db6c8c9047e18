//! The randomized tests. Every tester takes an oracle handle and a bit
//! source and returns a [`TestRun`]: the verdict, the queried points in
//! issue order, and the exact number of random bits consumed.
//!
//! A verdict of `Void` only arises under an erasure oracle; all nominal
//! queries are still issued on such runs, so query counts are invariant.

use num_rational::Ratio;

use crate::bits::BitSource;
use crate::error::{Error, Result};
use crate::grid::{interpolate, BitMask, GridDomain, GridPoint};
use crate::lazy::{lazy_query_sample, LazyTestKind};
use crate::oracle::OracleHandle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
    Void,
}

/// The transcript of one tester run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestRun {
    pub verdict: Verdict,
    pub queries: Vec<GridPoint>,
    pub bits_consumed: u64,
}

/// A single-oracle test, in the parameterization shared by the Monte Carlo
/// harness, the exact-enumeration oracles, and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    BlrLinearity,
    BlrAffinity,
    /// `rho = 0` draws the two endpoints independently; `rho != 0` is the
    /// correlated variant and requires `n = 2`.
    Diamond { rho: Ratio<i64> },
    SquareInCube,
    AffineOnSubcube(InnerKind),
    DiamondInCube,
    Shapka,
    SubcubeDegree { k: usize },
}

/// Inner affinity testers shipped for the subcube composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerKind {
    BlrAffinity,
    Diamond,
}

impl TestKind {
    pub fn diamond() -> Self {
        TestKind::Diamond { rho: Ratio::new(0, 1) }
    }

    pub fn name(&self) -> String {
        match self {
            TestKind::BlrLinearity => "blr-linearity".into(),
            TestKind::BlrAffinity => "blr-affinity".into(),
            TestKind::Diamond { rho } => {
                if *rho == Ratio::new(0, 1) {
                    "diamond".into()
                } else {
                    format!("diamond:rho={}/{}", rho.numer(), rho.denom())
                }
            }
            TestKind::SquareInCube => "square-in-cube".into(),
            TestKind::AffineOnSubcube(InnerKind::BlrAffinity) => "affine-on-subcube:inner=blr".into(),
            TestKind::AffineOnSubcube(InnerKind::Diamond) => "affine-on-subcube:inner=diamond".into(),
            TestKind::DiamondInCube => "diamond-in-cube".into(),
            TestKind::Shapka => "shapka".into(),
            TestKind::SubcubeDegree { k } => format!("degree:k={k}"),
        }
    }

    /// Dispatches one run of this test.
    pub fn run(&self, oracle: &mut OracleHandle, src: &mut BitSource) -> Result<TestRun> {
        match self {
            TestKind::BlrLinearity => blr(BlrKind::Linearity, oracle, src),
            TestKind::BlrAffinity => blr(BlrKind::Affinity, oracle, src),
            TestKind::Diamond { rho } => diamond(oracle, src, ratio_f64(*rho)),
            TestKind::SquareInCube => square_in_cube(oracle, src),
            TestKind::AffineOnSubcube(InnerKind::BlrAffinity) => {
                affine_on_subcube(oracle, &BlrAffinityInner, src)
            }
            TestKind::AffineOnSubcube(InnerKind::Diamond) => {
                affine_on_subcube(oracle, &DiamondInner, src)
            }
            TestKind::DiamondInCube => diamond_in_cube(oracle, src),
            TestKind::Shapka => shapka(oracle, src),
            TestKind::SubcubeDegree { k } => subcube_degree_k(oracle, *k, src),
        }
    }
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Queries each point in order and folds the answers over `F_2`.
/// Any erased answer voids the run, but every query is still issued.
fn query_parity(
    oracle: &mut OracleHandle,
    points: Vec<GridPoint>,
    bits_before: u64,
    src: &BitSource,
) -> Result<TestRun> {
    let mut parity = false;
    let mut void = false;
    for p in &points {
        match oracle.query(p)? {
            Some(v) => parity ^= v,
            None => void = true,
        }
    }
    let verdict = if void {
        Verdict::Void
    } else if parity {
        Verdict::Reject
    } else {
        Verdict::Accept
    };
    Ok(TestRun { verdict, queries: points, bits_consumed: src.bits_consumed() - bits_before })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlrKind {
    Linearity,
    Affinity,
}

/// The classical linearity / affinity tests on `F_2^d`.
///
/// Linearity: accept iff `f(x) + f(y) = f(x+y)` (3 queries). Affinity:
/// accept iff `f(x) + f(x+y) + f(x+z) + f(x+y+z) = 0` (4 queries).
pub fn blr(kind: BlrKind, oracle: &mut OracleHandle, src: &mut BitSource) -> Result<TestRun> {
    let domain = oracle.function().domain();
    if !domain.is_hypercube() {
        return Err(Error::Unsupported("BLR tests run on n = 2".into()));
    }
    let d = domain.dim();
    let before = src.bits_consumed();
    let x = BitMask::sample(d, src);
    let y = BitMask::sample(d, src);
    let points = match kind {
        BlrKind::Linearity => {
            vec![x.to_point(), y.to_point(), x.xor(&y).to_point()]
        }
        BlrKind::Affinity => {
            let z = BitMask::sample(d, src);
            vec![
                x.to_point(),
                x.xor(&y).to_point(),
                x.xor(&z).to_point(),
                x.xor(&y).xor(&z).to_point(),
            ]
        }
    };
    query_parity(oracle, points, before, src)
}

/// The four-point interpolation test: accept iff
/// `f(a) + f(b) = f(phi_x(a,b)) + f(phi_x(b,a))`.
///
/// With `rho = 0` the endpoints are independent uniform grid points. A
/// nonzero `rho` correlates `b` with `a` through the (possibly signed)
/// noise operator and requires `n = 2`.
pub fn diamond(oracle: &mut OracleHandle, src: &mut BitSource, rho: f64) -> Result<TestRun> {
    let domain = oracle.function().domain();
    if rho != 0.0 && !domain.is_hypercube() {
        return Err(Error::Unsupported("correlated endpoints require n = 2".into()));
    }
    let d = domain.dim();
    let before = src.bits_consumed();
    let a = domain.sample(src);
    let b = if rho == 0.0 {
        domain.sample(src)
    } else {
        crate::grid::noise_sample(&a, domain, rho, src)?
    };
    let x = BitMask::sample(d, src);
    let p = interpolate(&a, &b, &x)?;
    let q = interpolate(&b, &a, &x)?;
    query_parity(oracle, vec![a, b, p, q], before, src)
}

/// The four-function variant: accept iff
/// `f(a) + g(phi_x(a,b)) + h(phi_x(b,a)) + k(b) = 0`.
pub fn diamond4(
    f: &mut OracleHandle,
    g: &mut OracleHandle,
    h: &mut OracleHandle,
    k: &mut OracleHandle,
    src: &mut BitSource,
) -> Result<TestRun> {
    let domain = f.function().domain().clone();
    for o in [&g, &h, &k] {
        if *o.function().domain() != domain {
            return Err(Error::DomainMismatch);
        }
    }
    let d = domain.dim();
    let before = src.bits_consumed();
    let a = domain.sample(src);
    let b = domain.sample(src);
    let x = BitMask::sample(d, src);
    let p = interpolate(&a, &b, &x)?;
    let q = interpolate(&b, &a, &x)?;
    let answers = [f.query(&a)?, g.query(&p)?, h.query(&q)?, k.query(&b)?];
    let verdict = if answers.iter().any(|v| v.is_none()) {
        Verdict::Void
    } else if answers.iter().fold(false, |acc, v| acc ^ v.unwrap()) {
        Verdict::Reject
    } else {
        Verdict::Accept
    };
    Ok(TestRun {
        verdict,
        queries: vec![a, p, q, b],
        bits_consumed: src.bits_consumed() - before,
    })
}

/// Accept iff `f(a) + f(phi_x(a,b)) + f(phi_y(a,b)) + f(phi_{x+y}(a,b)) = 0`.
pub fn square_in_cube(oracle: &mut OracleHandle, src: &mut BitSource) -> Result<TestRun> {
    let domain = oracle.function().domain();
    let d = domain.dim();
    let before = src.bits_consumed();
    let a = domain.sample(src);
    let b = domain.sample(src);
    let x = BitMask::sample(d, src);
    let y = BitMask::sample(d, src);
    let points = vec![
        a.clone(),
        interpolate(&a, &b, &x)?,
        interpolate(&a, &b, &y)?,
        interpolate(&a, &b, &x.xor(&y))?,
    ];
    query_parity(oracle, points, before, src)
}

/// An oracle over mask inputs, used by inner affinity testers running on a
/// virtual restricted function.
pub trait MaskOracle {
    fn dim(&self) -> usize;
    fn query(&mut self, x: &BitMask) -> Result<Option<bool>>;
}

/// An affinity tester for functions `F_2^d -> F_2`, pluggable into
/// [`affine_on_subcube`]. Implementations must be complete: every affine
/// function is accepted with probability 1.
pub trait InnerAffinityTester {
    fn name(&self) -> &'static str;
    fn run(&self, oracle: &mut dyn MaskOracle, src: &mut BitSource) -> Result<Verdict>;
}

/// BLR affinity as an inner tester.
pub struct BlrAffinityInner;

impl InnerAffinityTester for BlrAffinityInner {
    fn name(&self) -> &'static str {
        "blr-affinity"
    }

    fn run(&self, oracle: &mut dyn MaskOracle, src: &mut BitSource) -> Result<Verdict> {
        let d = oracle.dim();
        let x = BitMask::sample(d, src);
        let y = BitMask::sample(d, src);
        let z = BitMask::sample(d, src);
        let masks = [x.clone(), x.xor(&y), x.xor(&z), x.xor(&y).xor(&z)];
        mask_parity(oracle, &masks)
    }
}

/// The diamond identity as an inner tester on the hypercube.
pub struct DiamondInner;

impl InnerAffinityTester for DiamondInner {
    fn name(&self) -> &'static str {
        "diamond"
    }

    fn run(&self, oracle: &mut dyn MaskOracle, src: &mut BitSource) -> Result<Verdict> {
        let d = oracle.dim();
        let u = BitMask::sample(d, src);
        let v = BitMask::sample(d, src);
        let x = BitMask::sample(d, src);
        // phi_x(u, v) over F_2^d, coordinate-wise select
        let p = BitMask::new(
            (0..d).map(|i| if x.bits[i] { v.bits[i] } else { u.bits[i] }).collect(),
        );
        let q = BitMask::new(
            (0..d).map(|i| if x.bits[i] { u.bits[i] } else { v.bits[i] }).collect(),
        );
        mask_parity(oracle, &[u, v, p, q])
    }
}

fn mask_parity(oracle: &mut dyn MaskOracle, masks: &[BitMask]) -> Result<Verdict> {
    let mut parity = false;
    let mut void = false;
    for m in masks {
        match oracle.query(m)? {
            Some(v) => parity ^= v,
            None => void = true,
        }
    }
    Ok(if void {
        Verdict::Void
    } else if parity {
        Verdict::Reject
    } else {
        Verdict::Accept
    })
}

struct SubcubeOracle<'a, 'f> {
    handle: &'a mut OracleHandle<'f>,
    a: GridPoint,
    b: GridPoint,
    log: Vec<GridPoint>,
}

impl MaskOracle for SubcubeOracle<'_, '_> {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn query(&mut self, x: &BitMask) -> Result<Option<bool>> {
        let p = interpolate(&self.a, &self.b, x)?;
        self.log.push(p.clone());
        self.handle.query(&p)
    }
}

/// Samples a random subcube (a pair of endpoints) and runs `inner` on the
/// virtual function `x -> f(phi_x(a, b))`; inner queries are forwarded to
/// the oracle as grid points.
pub fn affine_on_subcube(
    oracle: &mut OracleHandle,
    inner: &dyn InnerAffinityTester,
    src: &mut BitSource,
) -> Result<TestRun> {
    let domain = oracle.function().domain().clone();
    let before = src.bits_consumed();
    let a = domain.sample(src);
    let b = domain.sample(src);
    let mut sub = SubcubeOracle { handle: oracle, a, b, log: Vec::new() };
    let verdict = inner.run(&mut sub, src)?;
    Ok(TestRun { verdict, queries: sub.log, bits_consumed: src.bits_consumed() - before })
}

/// The diamond test on a random subcube, drawn through the lazy sampler so
/// the run consumes the advertised `(2.5 + 1.5 log2 n) d` bits on average.
/// Equivalent in distribution to [`affine_on_subcube`] with the diamond
/// inner tester.
pub fn diamond_in_cube(oracle: &mut OracleHandle, src: &mut BitSource) -> Result<TestRun> {
    let domain = oracle.function().domain();
    let before = src.bits_consumed();
    let points = lazy_query_sample(LazyTestKind::DiamondInCube, domain, src)?;
    query_parity(oracle, points, before, src)
}

/// Accept iff `f(b)` equals the sum of the `d` one-coordinate hybrids
/// `f(phi_{e_i}(a, b))`, with the extra term `f(a)` when `d` is even.
/// Queries `d + 1` points for odd `d` and `d + 2` for even `d`.
pub fn shapka(oracle: &mut OracleHandle, src: &mut BitSource) -> Result<TestRun> {
    let domain = oracle.function().domain();
    let d = domain.dim();
    let before = src.bits_consumed();
    let a = domain.sample(src);
    let b = domain.sample(src);
    let mut points = Vec::with_capacity(d + 2);
    points.push(b.clone());
    for i in 0..d {
        points.push(interpolate(&a, &b, &BitMask::unit(d, i))?);
    }
    if d % 2 == 0 {
        points.push(a);
    }
    query_parity(oracle, points, before, src)
}

/// The degree-`k` test on a random subcube, with the `(k+1)`-flat test as
/// the inner tester: pick a base point and `k+1` directions in `F_2^d` and
/// accept iff the alternating sum of `f(phi)` over the flat vanishes.
/// Issues `2^(k+1)` queries.
pub fn subcube_degree_k(
    oracle: &mut OracleHandle,
    k: usize,
    src: &mut BitSource,
) -> Result<TestRun> {
    if k == 0 {
        return Err(Error::Unsupported("degree test needs k >= 1".into()));
    }
    if k > 16 {
        return Err(Error::Unsupported("degree test limited to k <= 16".into()));
    }
    let domain = oracle.function().domain();
    let d = domain.dim();
    let before = src.bits_consumed();
    let a = domain.sample(src);
    let b = domain.sample(src);
    let base = BitMask::sample(d, src);
    let dirs: Vec<BitMask> = (0..=k).map(|_| BitMask::sample(d, src)).collect();
    let mut points = Vec::with_capacity(1 << (k + 1));
    for subset in 0u32..(1 << (k + 1)) {
        let mut x = base.clone();
        for (i, dir) in dirs.iter().enumerate() {
            if subset >> i & 1 == 1 {
                x = x.xor(dir);
            }
        }
        points.push(interpolate(&a, &b, &x)?);
    }
    query_parity(oracle, points, before, src)
}

/// A vector-valued oracle `[n]^d -> V^d` for direct product testing.
pub trait TupleOracle {
    fn domain(&self) -> &GridDomain;
    fn query(&mut self, p: &GridPoint) -> Vec<u32>;
}

/// A true direct product `(G_1(x_1), .., G_d(x_d))` backed by tables.
pub struct DirectProductOracle {
    domain: GridDomain,
    tables: Vec<Vec<u32>>,
    /// Optional override: `(point, slot, value)` replaces one entry of one
    /// output tuple.
    pub override_entry: Option<(GridPoint, usize, u32)>,
}

impl DirectProductOracle {
    pub fn new(domain: GridDomain, tables: Vec<Vec<u32>>) -> Result<Self> {
        if tables.len() != domain.dim() {
            return Err(Error::DimensionMismatch { expected: domain.dim(), got: tables.len() });
        }
        for (i, t) in tables.iter().enumerate() {
            if t.len() != domain.size(i) as usize {
                return Err(Error::Config(format!("table {i} does not match the alphabet")));
            }
        }
        Ok(DirectProductOracle { domain, tables, override_entry: None })
    }

    /// The constant tuple oracle.
    pub fn constant(domain: GridDomain, value: u32) -> Self {
        let tables = domain.sizes().iter().map(|&s| vec![value; s as usize]).collect();
        DirectProductOracle { domain, tables, override_entry: None }
    }
}

impl TupleOracle for DirectProductOracle {
    fn domain(&self) -> &GridDomain {
        &self.domain
    }

    fn query(&mut self, p: &GridPoint) -> Vec<u32> {
        let mut out: Vec<u32> = p
            .coords
            .iter()
            .enumerate()
            .map(|(i, &c)| self.tables[i][c as usize])
            .collect();
        if let Some((at, slot, value)) = &self.override_entry {
            if p == at {
                out[*slot] = *value;
            }
        }
        out
    }
}

/// The agreement test for direct products: sample `x`, an agreement set `A`
/// including each coordinate with probability 3/4, and `y` agreeing with
/// `x` on `A`; accept iff the two output tuples agree on `A`.
pub fn direct_product_test(oracle: &mut dyn TupleOracle, src: &mut BitSource) -> Result<TestRun> {
    let domain = oracle.domain().clone();
    let d = domain.dim();
    let before = src.bits_consumed();
    let x = domain.sample(src);
    // Pr[include] = 3/4, lazily: 1 bit then maybe a second
    let set: Vec<bool> = (0..d).map(|_| src.bit() || src.bit()).collect();
    let mut y = x.clone();
    for i in 0..d {
        if !set[i] {
            y.coords[i] = src.alphabet(domain.size(i));
        }
    }
    let fx = oracle.query(&x);
    let fy = oracle.query(&y);
    let agree = (0..d).all(|i| !set[i] || fx[i] == fy[i]);
    Ok(TestRun {
        verdict: if agree { Verdict::Accept } else { Verdict::Reject },
        queries: vec![x, y],
        bits_consumed: src.bits_consumed() - before,
    })
}
