//! Fixture systems shared by the benchmarks.

use epscap::{ClosedLoop, Matrix, Vector};

fn closed_loop(a_tilde: &[&[f64]], c: &[&[f64]], eps: f64) -> ClosedLoop {
    let a_tilde = Matrix::from_rows(a_tilde).expect("fixture");
    let n = a_tilde.rows();
    let tau0 = Vector::new(vec![0.3; n]).expect("fixture");
    ClosedLoop::new(a_tilde, Matrix::from_rows(c).expect("fixture"), tau0, eps).expect("fixture")
}

/// Stable 2-D loop that needs five steps to determine.
pub fn slow_planar() -> ClosedLoop {
    closed_loop(&[&[0.9, 0.0], &[0.99, 0.6]], &[&[1.0, 1.0]], 2f64.sqrt())
}

/// Three outputs, two states.
pub fn multi_output() -> ClosedLoop {
    closed_loop(
        &[&[1.0, -1.0], &[0.0, -1.0]],
        &[&[2.0, -2.0], &[-1.0, 0.04], &[-1.0, 3.0]],
        0.2,
    )
}

/// Lightly damped five-state rotation chain.
pub fn five_state() -> ClosedLoop {
    closed_loop(
        &[
            &[0.6, -0.5, 0.0, 0.0, 0.0],
            &[0.5, 0.6, 0.0, 0.0, 0.0],
            &[0.1, 0.0, 0.7, -0.4, 0.0],
            &[0.0, 0.1, 0.4, 0.7, 0.0],
            &[0.0, 0.0, 0.1, 0.1, 0.5],
        ],
        &[&[1.0, 0.0, 1.0, 0.0, 1.0], &[0.0, 1.0, 0.0, 1.0, 0.0]],
        1.0,
    )
}
