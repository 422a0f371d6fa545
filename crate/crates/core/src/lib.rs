//! Epsilon-capacity sets of state-feedback gains for discrete-time linear
//! systems with a perturbed initial state.
//!
//! For the closed loop `x_{i+1} = (A + BK) x_i`, `y_i = C x_i`, the
//! epsilon-capacity of `K` is the set of initial states whose output stays
//! within `epsilon` (max-coordinate norm) forever. The crate computes a finite
//! half-space description of that set by a sequence of linear programs,
//! decides membership, and from membership of `tau0` and of the canonical
//! basis vectors decides whether `K` makes every initial-state disturbance
//! tolerable.

pub mod capacity;
pub mod error;
pub mod linalg;
pub mod lp;

pub use capacity::{
    analyze, closed_loop, determine, phi_check, region_sample, sensitivity_rows, simulate,
    AnalysisReport, BetaViolation, CapacitySet, ClosedLoop, DetermineOptions, Gain,
    IterationRecord, LpValue, Membership, RegionRaster, SensitivityReport, Status, SystemSpec,
    TrajectoryStep, Violation,
};
pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
pub use lp::{LpOutcome, LpProblem};
