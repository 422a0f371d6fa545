use serde::Serialize;

use super::determine::{CapacitySet, DetermineOptions, Status, Violation};
use super::{ClosedLoop, Gain, SystemSpec};
use crate::error::Result;
use crate::linalg::Vector;

/// `e_j` leaves the capacity set: the output derivative with respect to
/// `beta_j` first exceeds `epsilon` at `first_violation_step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaViolation {
    /// One-based basis index.
    pub j: usize,
    pub first_violation_step: usize,
    pub magnitude: f64,
}

/// Whether the gain tolerates every initial-state disturbance.
///
/// The derivatives `C Ã^i tau0` and `C Ã^i e_j` do not depend on the
/// disturbance values, so one report covers all `(alpha, beta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    /// `tau0` is in the capacity set.
    pub alpha_tolerable: bool,
    pub alpha_violation: Option<Violation>,
    pub beta_violations: Vec<BetaViolation>,
    /// The gain belongs to `Φ`.
    pub admissible: bool,
    /// `false` if the capacity set hit the iteration limit; an admissible
    /// verdict is then unproven (an inadmissible one still stands).
    pub certified: bool,
    pub status: Status,
    pub k0: usize,
}

pub fn phi_check(
    sys: &SystemSpec,
    gain: &Gain,
    opts: &DetermineOptions,
) -> Result<SensitivityReport> {
    ClosedLoop::from_gain(sys, gain)?.phi_check(opts)
}

impl ClosedLoop {
    pub fn phi_check(&self, opts: &DetermineOptions) -> Result<SensitivityReport> {
        let cap = self.determine(opts)?;
        self.sensitivity_report(&cap)
    }

    /// Tests `tau0` and every `e_j` against an already computed set.
    pub fn sensitivity_report(&self, cap: &CapacitySet) -> Result<SensitivityReport> {
        let alpha = cap.membership(&self.tau0)?;
        let mut beta_violations = Vec::new();
        for j in 0..self.n() {
            if let Some(v) = cap.membership(&Vector::basis(self.n(), j))?.violation {
                beta_violations.push(BetaViolation {
                    j: j + 1,
                    first_violation_step: v.step,
                    magnitude: v.magnitude,
                });
            }
        }
        let admissible = alpha.inside && beta_violations.is_empty();
        Ok(SensitivityReport {
            alpha_tolerable: alpha.inside,
            alpha_violation: alpha.violation,
            beta_violations,
            admissible,
            certified: cap.is_determined() || !admissible,
            status: cap.status,
            k0: cap.k0,
        })
    }
}
