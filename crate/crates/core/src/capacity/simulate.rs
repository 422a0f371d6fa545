use serde::Serialize;

use super::{ClosedLoop, Gain, SystemSpec};
use crate::error::{Error, Result};
use crate::linalg::Vector;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryStep {
    pub step: usize,
    pub x: Vector,
    /// Control input; absent when only the closed loop is known.
    pub u: Option<Vector>,
    pub y: Vector,
}

fn initial_state(tau0: &Vector, alpha: f64, beta: &Vector) -> Result<Vector> {
    if beta.dim() != tau0.dim() {
        return Err(Error::DimensionMismatch {
            op: "beta",
            left: (tau0.dim(), 1),
            right: (beta.dim(), 1),
        });
    }
    if !alpha.is_finite() {
        return Err(Error::NonFinite { what: "alpha" });
    }
    tau0.scale(alpha).add(beta)
}

/// `x_0 = alpha tau0 + beta`, `u_i = K x_i`, `x_{i+1} = A x_i + B u_i`,
/// `y_i = C x_i` for `i = 0..=steps`.
pub fn simulate(
    sys: &SystemSpec,
    gain: &Gain,
    alpha: f64,
    beta: &Vector,
    steps: usize,
) -> Result<Vec<TrajectoryStep>> {
    let k = gain.matrix();
    if k.shape() != (sys.m(), sys.n()) {
        return Err(Error::DimensionMismatch {
            op: "gain K",
            left: (sys.m(), sys.n()),
            right: k.shape(),
        });
    }
    let mut x = initial_state(&sys.tau0, alpha, beta)?;
    let mut out = Vec::with_capacity(steps + 1);
    for step in 0..=steps {
        let u = k.mul_vec(&x)?;
        let y = sys.c.mul_vec(&x)?;
        let next = sys.a.mul_vec(&x)?.add(&sys.b.mul_vec(&u)?)?;
        out.push(TrajectoryStep {
            step,
            x: std::mem::replace(&mut x, next),
            u: Some(u),
            y,
        });
    }
    Ok(out)
}

impl ClosedLoop {
    /// Trajectory of `x_{i+1} = Ã x_i` without control inputs.
    pub fn simulate(&self, alpha: f64, beta: &Vector, steps: usize) -> Result<Vec<TrajectoryStep>> {
        let mut x = initial_state(&self.tau0, alpha, beta)?;
        let mut out = Vec::with_capacity(steps + 1);
        for step in 0..=steps {
            let y = self.c.mul_vec(&x)?;
            let next = self.a_tilde.mul_vec(&x)?;
            out.push(TrajectoryStep {
                step,
                x: std::mem::replace(&mut x, next),
                u: None,
                y,
            });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn zero_disturbance_gives_zero_trajectory() {
        let (sys, k) = example1();
        let traj = simulate(&sys, &k, 0.0, &Vector::zeros(2), 5).unwrap();
        assert_eq!(traj.len(), 6);
        assert!(traj
            .iter()
            .all(|s| s.x.inf_norm() == 0.0 && s.y.inf_norm() == 0.0));
    }

    #[test]
    fn example1_first_step() {
        let (sys, k) = example1();
        let traj = simulate(&sys, &k, 1.0, &Vector::zeros(2), 1).unwrap();
        assert_eq!(traj[0].x, v(&[0.3, 0.5]));
        let x1 = &traj[1].x;
        assert!((x1[0] - 0.27).abs() < 1e-12 && (x1[1] - 0.11).abs() < 1e-12);
        assert!((traj[1].y[0] - 0.38).abs() < 1e-12);
    }

    #[test]
    fn superposition() {
        let (sys, k) = example1();
        let b1 = v(&[0.7, -1.2]);
        let b2 = v(&[-0.4, 2.5]);
        let t1 = simulate(&sys, &k, 0.8, &b1, 10).unwrap();
        let t2 = simulate(&sys, &k, -1.3, &b2, 10).unwrap();
        let sum = simulate(&sys, &k, 0.8 - 1.3, &b1.add(&b2).unwrap(), 10).unwrap();
        for ((a, b), s) in t1.iter().zip(&t2).zip(&sum) {
            for i in 0..2 {
                assert!((a.x[i] + b.x[i] - s.x[i]).abs() < 1e-12);
            }
            assert!((a.y[0] + b.y[0] - s.y[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_loop_route_agrees() {
        let (sys, k) = example1();
        let cl = ClosedLoop::from_gain(&sys, &k).unwrap();
        let beta = v(&[0.1, -0.2]);
        let a = simulate(&sys, &k, 1.5, &beta, 6).unwrap();
        let b = cl.simulate(1.5, &beta, 6).unwrap();
        for (sa, sb) in a.iter().zip(&b) {
            assert!((sa.y[0] - sb.y[0]).abs() < 1e-12);
        }
        assert!(b[0].u.is_none());
    }

    #[test]
    fn wrong_beta_dimension() {
        let (sys, k) = example1();
        assert!(simulate(&sys, &k, 1.0, &Vector::zeros(3), 1).is_err());
    }
}
