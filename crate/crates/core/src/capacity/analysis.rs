use serde::Serialize;

use super::{ClosedLoop, Gain, SystemSpec};
use crate::error::{Error, Result};
use crate::linalg::{
    controllability_matrix, induced_inf_norm, mat_mul, observability_matrix, rank, spectral_radius,
    Matrix, DEFAULT_RANK_TOL,
};

/// A spectral radius counts as `< 1` only below `1 - STABILITY_MARGIN`.
pub const STABILITY_MARGIN: f64 = 1e-9;
const EIGEN_TOL: f64 = 1e-9;

/// Sufficient conditions for finite determination and for insensitivity to
/// `beta`, evaluated on the closed loop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    /// `None` when `B` is unknown.
    pub controllable: Option<bool>,
    pub observable: bool,
    pub spectral_radius: f64,
    pub inf_norm: f64,
    /// `‖Ã‖∞ < 1`: the capacity set is finitely determined.
    pub prop9_guarantee: bool,
    /// Controllable, observable and asymptotically stable.
    pub thm13_guarantee: bool,
    /// Smallest `i <= horizon` from which `‖C Ã^l‖∞ <= epsilon` holds for
    /// every `l` up to the horizon; only reported for stable loops.
    pub thm11_k0: Option<usize>,
    pub horizon: usize,
}

pub fn analyze(sys: &SystemSpec, gain: &Gain, horizon: usize) -> Result<AnalysisReport> {
    ClosedLoop::from_gain(sys, gain)?.analyze(Some((&sys.a, &sys.b)), horizon)
}

impl ClosedLoop {
    /// `open_loop` is `(A, B)`; without it controllability is not evaluated.
    pub fn analyze(
        &self,
        open_loop: Option<(&Matrix, &Matrix)>,
        horizon: usize,
    ) -> Result<AnalysisReport> {
        let n = self.n();
        if horizon < n {
            return Err(Error::InvalidArgument(format!(
                "horizon {horizon} must be at least n = {n}"
            )));
        }
        let controllable = match open_loop {
            Some((a, b)) => Some(rank(&controllability_matrix(a, b)?, DEFAULT_RANK_TOL) == n),
            None => None,
        };
        let observable = rank(
            &observability_matrix(&self.a_tilde, &self.c)?,
            DEFAULT_RANK_TOL,
        ) == n;
        let radius = spectral_radius(&self.a_tilde, EIGEN_TOL)?;
        let inf_norm = induced_inf_norm(&self.a_tilde);
        let stable = radius < 1.0 - STABILITY_MARGIN;

        let thm11_k0 = if stable {
            let mut norms = Vec::with_capacity(horizon + 1);
            let mut block = self.c.clone();
            for _ in 0..=horizon {
                norms.push(induced_inf_norm(&block));
                block = mat_mul(&block, &self.a_tilde)?;
            }
            // Start of the longest tail that stays within epsilon.
            let tail = norms
                .iter()
                .rev()
                .take_while(|&&v| v <= self.epsilon)
                .count();
            (tail > 0).then(|| horizon + 1 - tail)
        } else {
            None
        };

        Ok(AnalysisReport {
            controllable,
            observable,
            spectral_radius: radius,
            inf_norm,
            prop9_guarantee: inf_norm < 1.0,
            thm13_guarantee: controllable == Some(true) && observable && stable,
            thm11_k0,
            horizon,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::linalg::Vector;

    #[test]
    fn example1_meets_every_guarantee() {
        let (sys, k) = example1();
        let r = analyze(&sys, &k, 8).unwrap();
        assert_eq!(r.controllable, Some(true));
        assert!(r.observable);
        assert!((r.spectral_radius - 0.9).abs() < 1e-12);
        assert!((r.inf_norm - 0.9).abs() < 1e-12);
        assert!(r.prop9_guarantee && r.thm13_guarantee);
        // ‖C‖ = 2 > √2, ‖C Ã‖ = 1.2 <= √2 and the norms keep shrinking.
        assert_eq!(r.thm11_k0, Some(1));
    }

    #[test]
    fn example7_is_only_lyapunov_stable() {
        let r = example7().analyze(None, 8).unwrap();
        assert!((r.spectral_radius - 1.0).abs() < 1e-12);
        assert!(!r.thm13_guarantee);
        assert_eq!(r.controllable, None);
        assert_eq!(r.thm11_k0, None);
    }

    #[test]
    fn zero_system() {
        let z = Matrix::zeros(2, 2);
        let sys = SystemSpec::new(
            z.clone(),
            z.clone(),
            Matrix::zeros(1, 2),
            Vector::zeros(2),
            1.0,
        )
        .unwrap();
        let r = analyze(&sys, &Gain::new(z), 2).unwrap();
        assert_eq!(r.controllable, Some(false));
        assert!(!r.observable);
        assert_eq!(r.spectral_radius, 0.0);
        assert!(!r.thm13_guarantee);
    }

    #[test]
    fn short_horizon_is_rejected() {
        assert!(example7().analyze(None, 1).is_err());
    }
}
