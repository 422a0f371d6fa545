//! The closed loop `x_{i+1} = (A + BK) x_i`, `y_i = C x_i` and its
//! epsilon-capacity: the set of initial states whose output never leaves the
//! `epsilon` ball of the max-coordinate norm.
//!
//! Because `dy_i/dalpha = C Ã^i tau0` and `dy_i/dbeta_j = C Ã^i e_j`, every
//! disturbance `(alpha, beta)` of the initial state `x_0 = alpha tau0 + beta`
//! is tolerable exactly when `tau0` and all `e_j` belong to the capacity set.

mod analysis;
mod determine;
mod phi;
mod region;
mod simulate;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{mat_mul, Matrix, Vector};

pub use analysis::{analyze, AnalysisReport, STABILITY_MARGIN};
pub use determine::{
    determine, sensitivity_rows, CapacitySet, DetermineOptions, IterationRecord, LpValue,
    Membership, Status, Violation, DEFAULT_MAX_ITER, DEFAULT_STOP_TOL,
};
pub use phi::{phi_check, BetaViolation, SensitivityReport};
pub use region::{region_sample, RegionRaster};
pub use simulate::{simulate, TrajectoryStep};

/// Plant `(A, B, C)` with nominal initial state `tau0` and tolerance
/// `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSpec {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub tau0: Vector,
    pub epsilon: f64,
}

impl SystemSpec {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, tau0: Vector, epsilon: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch {
                op: "SystemSpec B",
                left: a.shape(),
                right: b.shape(),
            });
        }
        check_output(&a, &c, &tau0, epsilon)?;
        Ok(Self {
            a,
            b,
            c,
            tau0,
            epsilon,
        })
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }

    pub fn p(&self) -> usize {
        self.c.rows()
    }
}

fn check_output(a: &Matrix, c: &Matrix, tau0: &Vector, epsilon: f64) -> Result<()> {
    let n = a.rows();
    if c.cols() != n {
        return Err(Error::DimensionMismatch {
            op: "output matrix C",
            left: a.shape(),
            right: c.shape(),
        });
    }
    if tau0.dim() != n {
        return Err(Error::DimensionMismatch {
            op: "tau0",
            left: a.shape(),
            right: (tau0.dim(), 1),
        });
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    Ok(())
}

/// State-feedback gain `K` (`m x n`), `u_i = K x_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gain(pub Matrix);

impl Gain {
    pub fn new(k: Matrix) -> Self {
        Self(k)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

/// `Ã = A + B K`.
pub fn closed_loop(sys: &SystemSpec, gain: &Gain) -> Result<Matrix> {
    let k = gain.matrix();
    if k.shape() != (sys.m(), sys.n()) {
        return Err(Error::DimensionMismatch {
            op: "gain K",
            left: (sys.m(), sys.n()),
            right: k.shape(),
        });
    }
    sys.a.add(&mat_mul(&sys.b, k)?)
}

/// Everything the capacity computation needs: the closed-loop matrix, the
/// output map, `tau0` and `epsilon`. Built either from a plant and a gain or
/// directly from a known `Ã`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoop {
    a_tilde: Matrix,
    c: Matrix,
    tau0: Vector,
    epsilon: f64,
}

impl ClosedLoop {
    pub fn new(a_tilde: Matrix, c: Matrix, tau0: Vector, epsilon: f64) -> Result<Self> {
        if !a_tilde.is_square() {
            return Err(Error::NotSquare {
                rows: a_tilde.rows(),
                cols: a_tilde.cols(),
            });
        }
        check_output(&a_tilde, &c, &tau0, epsilon)?;
        Ok(Self {
            a_tilde,
            c,
            tau0,
            epsilon,
        })
    }

    pub fn from_gain(sys: &SystemSpec, gain: &Gain) -> Result<Self> {
        let a_tilde = closed_loop(sys, gain)?;
        Ok(Self {
            a_tilde,
            c: sys.c.clone(),
            tau0: sys.tau0.clone(),
            epsilon: sys.epsilon,
        })
    }

    pub fn a_tilde(&self) -> &Matrix {
        &self.a_tilde
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn tau0(&self) -> &Vector {
        &self.tau0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n(&self) -> usize {
        self.a_tilde.rows()
    }

    pub fn p(&self) -> usize {
        self.c.rows()
    }

    /// Same loop with a different tolerance.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(
            self.a_tilde.clone(),
            self.c.clone(),
            self.tau0.clone(),
            epsilon,
        )
    }
}
