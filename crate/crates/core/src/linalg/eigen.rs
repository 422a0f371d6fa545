//! Eigenvalues of small dense matrices through the characteristic polynomial.
//!
//! The polynomial comes from the Faddeev-LeVerrier recursion and its roots
//! from Durand-Kerner simultaneous iteration. Repeated roots only converge
//! linearly under Durand-Kerner and stall at roughly `eps^(1/m)` accuracy, so
//! each tight cluster of `m` roots is polished afterwards by Newton's method
//! on the `(m-1)`-th derivative, where the repeated root is simple. The
//! polished value replaces the cluster only if it has a smaller residual.

use num_complex::Complex64;

use super::{mat_mul, Matrix};
use crate::error::{Error, Result};

/// Largest dimension accepted by the polynomial route.
pub const MAX_EIGEN_DIM: usize = 32;

const MAX_SWEEPS: usize = 500;
const STEP_CONVERGED: f64 = 1e-14;
const CLUSTER_RADIUS: f64 = 1e-4;

/// Monic characteristic polynomial `det(zI - m)`, lowest degree first; the
/// last coefficient is always `1`.
pub fn characteristic_polynomial(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n > MAX_EIGEN_DIM {
        return Err(Error::InvalidArgument(format!(
            "eigenvalues limited to n <= {MAX_EIGEN_DIM}, got {n}"
        )));
    }
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    // M_1 = I, c_{n-1} = -tr(A); M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k
    let mut mk = Matrix::identity(n);
    for k in 1..=n {
        if k > 1 {
            mk = mat_mul(m, &mk)?;
            let c = coeffs[n - k + 1];
            for i in 0..n {
                mk.data[i * n + i] += c;
            }
        }
        let am = mat_mul(m, &mk)?;
        let trace: f64 = (0..n).map(|i| am[(i, i)]).sum();
        coeffs[n - k] = -trace / k as f64;
    }
    Ok(coeffs)
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// `|p(z)| / sum |c_k| max(1, |z|)^k`.
fn relative_residual(coeffs: &[f64], z: Complex64) -> f64 {
    let r = z.norm().max(1.0);
    let scale = coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c.abs());
    horner(coeffs, z).norm() / scale
}

fn worst_residual(coeffs: &[f64], roots: &[Complex64]) -> f64 {
    roots
        .iter()
        .map(|&z| relative_residual(coeffs, z))
        .fold(0.0, f64::max)
}

/// Roots of a monic polynomial (lowest degree first) by Durand-Kerner.
fn polynomial_roots(coeffs: &[f64], tol: f64) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![Complex64::new(-coeffs[0], 0.0)]);
    }
    // Cauchy bound on root magnitude
    let bound = 1.0 + coeffs[..n].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|i| seed.powu(i as u32) * (0.5 * bound))
        .collect();

    let mut best = roots.clone();
    let mut best_residual = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let mut max_step = 0.0_f64;
        for i in 0..n {
            let zi = roots[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, &zj) in roots.iter().enumerate() {
                if j != i {
                    let mut d = zi - zj;
                    if d.norm() == 0.0 {
                        d = Complex64::new(f64::EPSILON * bound, f64::EPSILON * bound);
                    }
                    denom *= d;
                }
            }
            let step = horner(coeffs, zi) / denom;
            if step.is_finite() {
                roots[i] = zi - step;
                max_step = max_step.max(step.norm() / zi.norm().max(1.0));
            }
        }
        let residual = worst_residual(coeffs, &roots);
        if residual < best_residual {
            best_residual = residual;
            best.clone_from(&roots);
        }
        if max_step <= STEP_CONVERGED {
            break;
        }
    }

    let mut roots = best;
    polish_clusters(coeffs, &mut roots);
    let residual = worst_residual(coeffs, &roots);
    if residual.is_nan() || residual > tol {
        return Err(Error::EigenNonConvergence {
            iterations: MAX_SWEEPS,
            residual,
        });
    }
    Ok(roots)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

fn polish_clusters(coeffs: &[f64], roots: &mut [Complex64]) {
    let n = roots.len();
    let mut assigned = vec![false; n];
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let radius = CLUSTER_RADIUS * roots[i].norm().max(1.0);
        let members: Vec<usize> = (i..n)
            .filter(|&j| !assigned[j] && (roots[j] - roots[i]).norm() <= radius)
            .collect();
        for &j in &members {
            assigned[j] = true;
        }
        if members.len() < 2 {
            continue;
        }
        let mut q = coeffs.to_vec();
        for _ in 1..members.len() {
            q = derivative(&q);
        }
        let dq = derivative(&q);
        let mut z = members.iter().map(|&j| roots[j]).sum::<Complex64>() / members.len() as f64;
        for _ in 0..50 {
            let step = horner(&q, z) / horner(&dq, z);
            if !step.is_finite() {
                break;
            }
            z -= step;
            if step.norm() <= f64::EPSILON * z.norm().max(1.0) {
                break;
            }
        }
        let current = members
            .iter()
            .map(|&j| relative_residual(coeffs, roots[j]))
            .fold(0.0, f64::max);
        if relative_residual(coeffs, z) <= current {
            for &j in &members {
                roots[j] = z;
            }
        }
    }
}

/// All eigenvalues of a square matrix, each root accepted once its relative
/// polynomial residual is at most `tol`.
pub fn eigenvalues(m: &Matrix, tol: f64) -> Result<Vec<Complex64>> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(
            "eigenvalue tolerance must be positive".into(),
        ));
    }
    let coeffs = characteristic_polynomial(m)?;
    polynomial_roots(&coeffs, tol)
}

/// Largest eigenvalue magnitude.
pub fn spectral_radius(m: &Matrix, tol: f64) -> Result<f64> {
    Ok(eigenvalues(m, tol)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}
