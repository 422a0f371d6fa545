use serde::ser::Serializer;
use serde::Serialize;

use super::{ClosedLoop, Gain, SystemSpec};
use crate::error::{Error, Result};
use crate::linalg::{dot, mat_mul, Matrix, Vector};
use crate::lp::{self, LpOutcome, LpProblem};

pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_STOP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetermineOptions {
    pub max_iter: usize,
    /// Slack on the stopping test `max r.x <= epsilon + stop_tol`.
    pub stop_tol: f64,
}

impl Default for DetermineOptions {
    fn default() -> Self {
        Self {
            max_iter: DEFAULT_MAX_ITER,
            stop_tol: DEFAULT_STOP_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Status {
    Determined,
    IterationLimitReached { k_reached: usize },
}

/// Optimal value of one stopping-test LP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpValue {
    Finite(f64),
    Unbounded,
}

impl LpValue {
    fn passes(self, bound: f64) -> bool {
        matches!(self, LpValue::Finite(v) if v <= bound)
    }
}

impl serde::Serialize for LpValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LpValue::Finite(v) => v.serialize(s),
            LpValue::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

/// LP maxima of one determination step; `maxima[s - 1]` belongs to the
/// signed constraint `s` (odd `s` for `+row`, even for `-row`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    pub maxima: Vec<LpValue>,
}

impl IterationRecord {
    pub fn max(&self) -> LpValue {
        self.maxima
            .iter()
            .fold(LpValue::Finite(f64::NEG_INFINITY), |acc, &v| {
                match (acc, v) {
                    (LpValue::Unbounded, _) | (_, LpValue::Unbounded) => LpValue::Unbounded,
                    (LpValue::Finite(a), LpValue::Finite(b)) => LpValue::Finite(a.max(b)),
                }
            })
    }

    pub fn passes(&self, epsilon: f64, stop_tol: f64) -> bool {
        self.maxima.iter().all(|v| v.passes(epsilon + stop_tol))
    }
}

/// Half-space description of the capacity set: `|r.x| <= epsilon` for every
/// row `r` of the stacked `C Ã^i`, `i = 0..=k0`. Redundant rows are kept.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacitySet {
    pub a_tilde: Matrix,
    pub constraint_rows: Matrix,
    pub epsilon: f64,
    /// Index of the last stacked block; the index of determination when
    /// `status` is `Determined`.
    pub k0: usize,
    pub status: Status,
    pub iterations: Vec<IterationRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    /// Time index `i` of the violated block.
    pub step: usize,
    /// Output component (zero-based).
    pub output: usize,
    /// Signed constraint index, `2j+1` for `+row_j` and `2j+2` for `-row_j`.
    pub s: usize,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub inside: bool,
    /// `false` when the set was not determined: a `true` answer is then only
    /// a necessary condition.
    pub certified: bool,
    pub violation: Option<Violation>,
}

impl CapacitySet {
    pub fn n(&self) -> usize {
        self.a_tilde.rows()
    }

    pub fn p(&self) -> usize {
        self.constraint_rows.rows() / (self.k0 + 1)
    }

    pub fn is_determined(&self) -> bool {
        self.status == Status::Determined
    }

    /// The index of determination, if the loop reached its fixpoint.
    pub fn determination_index(&self) -> Option<usize> {
        self.is_determined().then_some(self.k0)
    }

    /// Row block `C Ã^i`.
    pub fn block(&self, i: usize) -> Matrix {
        let p = self.p();
        self.constraint_rows.row_block(i * p, (i + 1) * p)
    }

    pub fn membership(&self, x: &Vector) -> Result<Membership> {
        self.membership_up_to(x, self.k0)
    }

    /// Membership against the first `k + 1` blocks only, i.e. the set `Θ_k`.
    pub fn membership_up_to(&self, x: &Vector, k: usize) -> Result<Membership> {
        if x.dim() != self.n() {
            return Err(Error::DimensionMismatch {
                op: "membership",
                left: self.constraint_rows.shape(),
                right: (x.dim(), 1),
            });
        }
        let p = self.p();
        let k = k.min(self.k0);
        let violation = self
            .constraint_rows
            .row_iter()
            .take((k + 1) * p)
            .enumerate()
            .find_map(|(t, r)| {
                let value = dot(r, x.as_slice());
                (value.abs() > self.epsilon).then(|| Violation {
                    step: t / p,
                    output: t % p,
                    s: 2 * (t % p) + if value > 0.0 { 1 } else { 2 },
                    magnitude: value.abs(),
                })
            });
        Ok(Membership {
            inside: violation.is_none(),
            certified: self.is_determined() || violation.is_some(),
            violation,
        })
    }
}

/// `[C; C Ã; ...; C Ã^horizon]` by row propagation.
pub fn sensitivity_rows(c: &Matrix, a_tilde: &Matrix, horizon: usize) -> Result<Matrix> {
    if c.cols() != a_tilde.rows() || !a_tilde.is_square() {
        return Err(Error::DimensionMismatch {
            op: "sensitivity_rows",
            left: a_tilde.shape(),
            right: c.shape(),
        });
    }
    let mut blocks = Vec::with_capacity(horizon + 1);
    blocks.push(c.clone());
    for i in 0..horizon {
        let next = mat_mul(&blocks[i], a_tilde)?;
        blocks.push(next);
    }
    Matrix::vstack(&blocks)
}

/// Runs the determination loop for the plant and gain.
pub fn determine(sys: &SystemSpec, gain: &Gain, opts: &DetermineOptions) -> Result<CapacitySet> {
    ClosedLoop::from_gain(sys, gain)?.determine(opts)
}

/// Maximizes each signed row of `next` over `{x : |r.x| <= epsilon, r in stack}`.
fn stop_test(
    stack: &[f64],
    n: usize,
    next: &Matrix,
    epsilon: f64,
    k: usize,
) -> Result<IterationRecord> {
    let rows = stack.len() / n;
    let mut g = Vec::with_capacity(2 * stack.len());
    g.extend_from_slice(stack);
    g.extend(stack.iter().map(|v| -v));
    let g = Matrix::new(2 * rows, n, g)?;
    let h = Vector::new(vec![epsilon; 2 * rows])?;

    let mut maxima = Vec::with_capacity(2 * next.rows());
    for (j, row) in next.row_iter().enumerate() {
        for (sign, s) in [(1.0, 2 * j + 1), (-1.0, 2 * j + 2)] {
            let objective = Vector::new(row.iter().map(|v| sign * v).collect())?;
            let problem = LpProblem::new(objective, g.clone(), h.clone())?;
            let outcome = lp::solve(&problem).map_err(|e| Error::Subproblem {
                k,
                s,
                source: Box::new(e),
            })?;
            maxima.push(match outcome {
                LpOutcome::Optimal { value, .. } => LpValue::Finite(value),
                LpOutcome::Unbounded => LpValue::Unbounded,
                LpOutcome::Infeasible => {
                    return Err(Error::Subproblem {
                        k,
                        s,
                        source: Box::new(Error::Numerical(
                            "LP infeasible over a set that contains the origin".into(),
                        )),
                    })
                }
            });
        }
    }
    Ok(IterationRecord { k, maxima })
}

impl ClosedLoop {
    /// Grows `Θ_k` until every signed row of `C Ã^{k+1}` is bounded by
    /// `epsilon` over it, or `max_iter` steps have been taken.
    pub fn determine(&self, opts: &DetermineOptions) -> Result<CapacitySet> {
        if opts.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        if opts.stop_tol.is_nan() || opts.stop_tol < 0.0 {
            return Err(Error::InvalidArgument(
                "stop_tol must be non-negative".into(),
            ));
        }
        let n = self.n();
        let mut stack = self.c.as_slice().to_vec();
        let mut last = self.c.clone();
        let mut iterations = Vec::new();

        for k in 0..opts.max_iter {
            let next = mat_mul(&last, &self.a_tilde)?;
            let record = stop_test(&stack, n, &next, self.epsilon, k)?;
            let done = record.passes(self.epsilon, opts.stop_tol);
            iterations.push(record);
            if done {
                return Ok(self.capacity_set(stack, k, Status::Determined, iterations));
            }
            stack.extend_from_slice(next.as_slice());
            last = next;
        }
        let k = opts.max_iter;
        Ok(self.capacity_set(
            stack,
            k,
            Status::IterationLimitReached { k_reached: k },
            iterations,
        ))
    }

    /// Re-runs the stopping test of step `k` from scratch.
    pub fn stop_test(&self, k: usize) -> Result<IterationRecord> {
        let rows = sensitivity_rows(&self.c, &self.a_tilde, k + 1)?;
        let p = self.p();
        let stack = rows.row_block(0, (k + 1) * p);
        let next = rows.row_block((k + 1) * p, (k + 2) * p);
        stop_test(stack.as_slice(), self.n(), &next, self.epsilon, k)
    }

    fn capacity_set(
        &self,
        stack: Vec<f64>,
        k0: usize,
        status: Status,
        iterations: Vec<IterationRecord>,
    ) -> CapacitySet {
        let n = self.n();
        CapacitySet {
            a_tilde: self.a_tilde.clone(),
            constraint_rows: Matrix::new(stack.len() / n, n, stack).expect("finite stack"),
            epsilon: self.epsilon,
            k0,
            status,
            iterations,
        }
    }
}
