//! Query-counted oracle access, with an optional online-erasure adversary
//! that may erase up to `t` table entries after each answered query.
//! Erased points answer `None` (void) forever after.

use std::collections::HashSet;

use crate::error::Result;
use crate::functions::BooleanFunction;
use crate::grid::GridPoint;

/// How an adversary reacts to the transcript of queries seen so far.
/// Returns at most `t` points to erase.
pub trait ErasureStrategy {
    fn erase(&mut self, transcript: &[GridPoint], t: usize) -> Vec<GridPoint>;
}

/// Which tester's forced final query the adversary anticipates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcedQueryKind {
    /// Queries arrive as `a, b, phi_x(a,b)`; the fourth is forced.
    Diamond,
    /// Queries arrive as `a, phi_x(a,b), phi_y(a,b)`; the fourth is forced.
    SquareInCube,
}

/// After the third query of a four-query algebraic test, the identity
/// determines the fourth point; this adversary erases it.
pub struct AnticipateFourth {
    pub kind: ForcedQueryKind,
}

impl AnticipateFourth {
    /// The fourth query point forced by the first three.
    pub fn forced_fourth(kind: ForcedQueryKind, q: &[GridPoint]) -> GridPoint {
        let (q1, q2, q3) = (&q[0], &q[1], &q[2]);
        let d = q1.dim();
        let coords = match kind {
            ForcedQueryKind::Diamond => {
                // q4 completes {a,b} on each coordinate: where the third
                // query took a's value the fourth takes b's, and vice versa
                (0..d)
                    .map(|i| {
                        if q3.coords[i] == q1.coords[i] {
                            q2.coords[i]
                        } else {
                            q1.coords[i]
                        }
                    })
                    .collect()
            }
            ForcedQueryKind::SquareInCube => {
                // x_i + y_i decides between a_i and b_i; both are visible
                // from the transcript even though b itself never is
                (0..d)
                    .map(|i| {
                        if q2.coords[i] == q3.coords[i] {
                            q1.coords[i]
                        } else if q2.coords[i] != q1.coords[i] {
                            q2.coords[i]
                        } else {
                            q3.coords[i]
                        }
                    })
                    .collect()
            }
        };
        GridPoint::new(coords)
    }
}

impl ErasureStrategy for AnticipateFourth {
    fn erase(&mut self, transcript: &[GridPoint], t: usize) -> Vec<GridPoint> {
        if transcript.len() == 3 && t >= 1 {
            vec![AnticipateFourth::forced_fourth(self.kind, transcript)]
        } else {
            Vec::new()
        }
    }
}

struct ErasureState {
    t: usize,
    erased: HashSet<GridPoint>,
    strategy: Box<dyn ErasureStrategy>,
    transcript: Vec<GridPoint>,
}

/// A function wrapped for oracle access: counts every evaluation, and
/// optionally runs an erasure adversary between queries.
///
/// Stateful; confine each handle to one run on one thread.
pub struct OracleHandle<'f> {
    f: &'f BooleanFunction,
    queries: u64,
    erasure: Option<ErasureState>,
}

impl<'f> OracleHandle<'f> {
    pub fn new(f: &'f BooleanFunction) -> Self {
        OracleHandle { f, queries: 0, erasure: None }
    }

    /// Wraps `f` behind an adversary with per-query erasure budget `t`.
    pub fn with_erasure(
        f: &'f BooleanFunction,
        t: usize,
        strategy: Box<dyn ErasureStrategy>,
    ) -> Self {
        OracleHandle {
            f,
            queries: 0,
            erasure: Some(ErasureState {
                t,
                erased: HashSet::new(),
                strategy,
                transcript: Vec::new(),
            }),
        }
    }

    pub fn function(&self) -> &'f BooleanFunction {
        self.f
    }

    pub fn query_count(&self) -> u64 {
        self.queries
    }

    /// Evaluates `f` at `p`, `None` when the entry has been erased.
    pub fn query(&mut self, p: &GridPoint) -> Result<Option<bool>> {
        self.f.domain().check_point(p)?;
        self.queries += 1;
        match &mut self.erasure {
            None => Ok(Some(self.f.eval_unchecked(p))),
            Some(state) => {
                state.transcript.push(p.clone());
                if state.erased.contains(p) {
                    return Ok(None);
                }
                let v = self.f.eval_unchecked(p);
                for q in state.strategy.erase(&state.transcript, state.t).into_iter().take(state.t)
                {
                    state.erased.insert(q);
                }
                Ok(Some(v))
            }
        }
    }
}
