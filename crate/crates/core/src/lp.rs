//! Dense linear programming: maximize `c.x` subject to `G x <= h` with
//! sign-free `x`.
//!
//! Every free variable is split as `x = x+ - x-` and each row receives a
//! slack, giving the standard form `max c.z, A z + w = h, z, w >= 0`. The
//! simplex runs on a dictionary (basic variables expressed through the
//! non-basic ones), so a pivot costs `O(rows * 2n)` regardless of how many
//! slacks there are. Rows with a negative right-hand side are handled by a
//! first phase with a single auxiliary variable. Bland's rule is used for
//! both the entering and the leaving variable, so degenerate vertices cannot
//! cycle.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Coefficients smaller than this never pivot.
pub const PIVOT_TOL: f64 = 1e-10;
/// Allowed constraint violation when deciding feasibility.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Pivot budget multiplier: `budget = 50 * (variables + constraints)`.
pub const BUDGET_FACTOR: usize = 50;

/// `maximize objective . x  subject to  g x <= h`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    objective: Vector,
    g: Matrix,
    h: Vector,
}

impl LpProblem {
    pub fn new(objective: Vector, g: Matrix, h: Vector) -> Result<Self> {
        if g.cols() != objective.dim() || g.rows() != h.dim() {
            return Err(Error::DimensionMismatch {
                op: "LpProblem",
                left: g.shape(),
                right: (h.dim(), objective.dim()),
            });
        }
        Ok(Self { objective, g, h })
    }

    pub fn objective(&self) -> &Vector {
        &self.objective
    }

    pub fn constraints(&self) -> (&Matrix, &Vector) {
        (&self.g, &self.h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { point: Vector, value: f64 },
    Unbounded,
    Infeasible,
}

impl LpOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

/// Solves `p` to optimality, or reports unboundedness / infeasibility.
///
/// Exceeding the pivot budget is an error, never a status.
pub fn solve(p: &LpProblem) -> Result<LpOutcome> {
    let n = p.objective.dim();

    // Equilibrate rows and the objective; neither changes the optimal point.
    let mut rows = Vec::with_capacity(p.g.rows());
    let mut rhs = Vec::with_capacity(p.g.rows());
    for (row, &h) in p.g.row_iter().zip(p.h.as_slice()) {
        let scale = row.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            if h < -FEASIBILITY_TOL {
                return Ok(LpOutcome::Infeasible);
            }
            continue;
        }
        rows.push(row.iter().map(|v| v / scale).collect::<Vec<_>>());
        rhs.push(h / scale);
    }
    let obj_scale = p.objective.inf_norm();
    let obj_scale = if obj_scale > 0.0 { obj_scale } else { 1.0 };
    let cost: Vec<f64> = p
        .objective
        .as_slice()
        .iter()
        .map(|c| c / obj_scale)
        .collect();

    let mut dict = Dictionary::new(n, &rows, &rhs, &cost);
    let budget = BUDGET_FACTOR * (dict.num_vars + 1 + 2 * dict.m);
    let mut pivots = 0;

    if rhs.iter().any(|&b| b < 0.0) {
        if !dict.phase_one(&mut pivots, budget)? {
            return Ok(LpOutcome::Infeasible);
        }
        dict.restore_objective(&cost);
    }

    match dict.run(&mut pivots, budget, false)? {
        Run::Unbounded => Ok(LpOutcome::Unbounded),
        Run::Optimal => {
            let values = dict.values();
            let point: Vec<f64> = (0..n).map(|j| values[2 * j] - values[2 * j + 1]).collect();
            let value = p
                .objective
                .as_slice()
                .iter()
                .zip(&point)
                .map(|(c, x)| c * x)
                .sum();
            Ok(LpOutcome::Optimal {
                point: Vector::new(point)?,
                value,
            })
        }
    }
}

enum Run {
    Optimal,
    Unbounded,
}

/// `basic[i] = rhs[i] + sum_j coef[i][j] * nonbasic[j]`,
/// `objective = obj_const + sum_j obj[j] * nonbasic[j]`.
struct Dictionary {
    m: usize,
    /// Structural (split) plus slack variables; the phase-one auxiliary, when
    /// present, is `num_vars`.
    num_vars: usize,
    num_structural: usize,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    rhs: Vec<f64>,
    coef: Vec<f64>,
    obj: Vec<f64>,
    obj_const: f64,
}

impl Dictionary {
    fn new(n: usize, rows: &[Vec<f64>], rhs: &[f64], cost: &[f64]) -> Self {
        let m = rows.len();
        let num_structural = 2 * n;
        let width = num_structural;
        let mut coef = vec![0.0; m * width];
        for (i, row) in rows.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                // w_i = h_i - g.x+ + g.x-
                coef[i * width + 2 * j] = -g;
                coef[i * width + 2 * j + 1] = g;
            }
        }
        let obj = cost.iter().flat_map(|&c| [c, -c]).collect();
        Self {
            m,
            num_vars: num_structural + m,
            num_structural,
            basic: (num_structural..num_structural + m).collect(),
            nonbasic: (0..num_structural).collect(),
            rhs: rhs.to_vec(),
            coef,
            obj,
            obj_const: 0.0,
        }
    }

    #[inline]
    fn width(&self) -> usize {
        self.nonbasic.len()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width();
        let a = self.coef[row * w + col];
        let inv = 1.0 / a;

        // Solve the leaving row for the entering variable.
        let leaving = self.basic[row];
        self.rhs[row] = -self.rhs[row] * inv;
        for j in 0..w {
            self.coef[row * w + j] = if j == col {
                inv
            } else {
                -self.coef[row * w + j] * inv
            };
        }
        self.basic[row] = self.nonbasic[col];
        self.nonbasic[col] = leaving;

        let (pivot_rhs, pivot_row) = (self.rhs[row], self.coef[row * w..(row + 1) * w].to_vec());
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let factor = self.coef[i * w + col];
            if factor == 0.0 {
                continue;
            }
            self.rhs[i] += factor * pivot_rhs;
            let target = &mut self.coef[i * w..(i + 1) * w];
            for (j, t) in target.iter_mut().enumerate() {
                if j == col {
                    *t = factor * pivot_row[j];
                } else {
                    *t += factor * pivot_row[j];
                }
            }
        }
        let factor = self.obj[col];
        if factor != 0.0 {
            self.obj_const += factor * pivot_rhs;
            for (j, t) in self.obj.iter_mut().enumerate() {
                if j == col {
                    *t = factor * pivot_row[j];
                } else {
                    *t += factor * pivot_row[j];
                }
            }
        }
    }

    /// Bland: lowest-index improving variable.
    fn entering(&self, forbid: Option<usize>) -> Option<usize> {
        self.obj
            .iter()
            .enumerate()
            .filter(|&(j, &c)| c > PIVOT_TOL && Some(self.nonbasic[j]) != forbid)
            .min_by_key(|&(j, _)| self.nonbasic[j])
            .map(|(j, _)| j)
    }

    /// Minimum ratio, ties to the lowest-index basic variable (the auxiliary
    /// variable wins ties outright so phase one ends with it non-basic).
    fn leaving(&self, col: usize, prefer: Option<usize>) -> Option<usize> {
        let w = self.width();
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.coef[i * w + col];
            if a >= -PIVOT_TOL {
                continue;
            }
            let ratio = self.rhs[i].max(0.0) / -a;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    let tie = (ratio - br).abs() <= 1e-12 * br.abs().max(1e-300);
                    let better = if tie {
                        let rank = |r: usize| {
                            if Some(self.basic[r]) == prefer {
                                0
                            } else {
                                self.basic[r] + 1
                            }
                        };
                        rank(i) < rank(bi)
                    } else {
                        ratio < br
                    };
                    if better {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn run(&mut self, pivots: &mut usize, budget: usize, phase_one: bool) -> Result<Run> {
        let aux = phase_one.then_some(self.num_vars);
        let forbid = if phase_one { None } else { Some(self.num_vars) };
        loop {
            let Some(col) = self.entering(forbid) else {
                return Ok(Run::Optimal);
            };
            let Some(row) = self.leaving(col, aux) else {
                return Ok(Run::Unbounded);
            };
            *pivots += 1;
            if *pivots > budget {
                return Err(Error::LpIterationBudget { budget });
            }
            self.pivot(row, col);
        }
    }

    /// Returns `false` when the constraints are infeasible.
    fn phase_one(&mut self, pivots: &mut usize, budget: usize) -> Result<bool> {
        let aux = self.num_vars;
        let old_w = self.width();
        let w = old_w + 1;
        let mut coef = vec![0.0; self.m * w];
        for i in 0..self.m {
            coef[i * w..i * w + old_w].copy_from_slice(&self.coef[i * old_w..(i + 1) * old_w]);
            coef[i * w + old_w] = 1.0;
        }
        self.coef = coef;
        self.nonbasic.push(aux);
        self.obj = vec![0.0; w];
        self.obj[old_w] = -1.0;
        self.obj_const = 0.0;

        // Aux enters, the most violated row leaves: the dictionary is then feasible.
        let worst = (0..self.m)
            .min_by(|&a, &b| self.rhs[a].total_cmp(&self.rhs[b]))
            .expect("phase one needs a row");
        self.pivot(worst, old_w);

        match self.run(pivots, budget, true)? {
            Run::Unbounded => unreachable!("phase one objective is bounded by zero"),
            Run::Optimal => {}
        }
        if self.obj_const < -FEASIBILITY_TOL {
            return Ok(false);
        }
        if let Some(row) = self.basic.iter().position(|&v| v == aux) {
            // Degenerate: aux sits at zero in the basis; swap it for any usable column.
            let w = self.width();
            let col = (0..w)
                .filter(|&j| self.nonbasic[j] != aux)
                .max_by(|&a, &b| {
                    self.coef[row * w + a]
                        .abs()
                        .total_cmp(&self.coef[row * w + b].abs())
                })
                .filter(|&j| self.coef[row * w + j].abs() > PIVOT_TOL);
            match col {
                Some(col) => self.pivot(row, col),
                None => {
                    // Row is identically aux = 0; drop it.
                    self.remove_row(row);
                }
            }
        }
        let col = self
            .nonbasic
            .iter()
            .position(|&v| v == aux)
            .expect("aux is non-basic");
        self.remove_column(col);
        Ok(true)
    }

    fn remove_row(&mut self, row: usize) {
        let w = self.width();
        self.coef.drain(row * w..(row + 1) * w);
        self.rhs.remove(row);
        self.basic.remove(row);
        self.m -= 1;
    }

    fn remove_column(&mut self, col: usize) {
        let w = self.width();
        let mut coef = Vec::with_capacity(self.m * (w - 1));
        for i in 0..self.m {
            for j in 0..w {
                if j != col {
                    coef.push(self.coef[i * w + j]);
                }
            }
        }
        self.coef = coef;
        self.nonbasic.remove(col);
        self.obj.remove(col);
    }

    /// Re-expresses the original objective over the current non-basic set.
    fn restore_objective(&mut self, cost: &[f64]) {
        let w = self.width();
        self.obj = vec![0.0; w];
        self.obj_const = 0.0;
        for var in 0..self.num_structural {
            let c = if var % 2 == 0 {
                cost[var / 2]
            } else {
                -cost[var / 2]
            };
            if c == 0.0 {
                continue;
            }
            if let Some(j) = self.nonbasic.iter().position(|&v| v == var) {
                self.obj[j] += c;
            } else if let Some(i) = self.basic.iter().position(|&v| v == var) {
                self.obj_const += c * self.rhs[i];
                for j in 0..w {
                    self.obj[j] += c * self.coef[i * w + j];
                }
            }
        }
    }

    fn values(&self) -> Vec<f64> {
        let mut values = vec![0.0; self.num_vars + 1];
        for (i, &var) in self.basic.iter().enumerate() {
            values[var] = self.rhs[i].max(0.0);
        }
        values
    }
}
