use epscap::linalg::{
    controllability_matrix, induced_inf_norm, mat_mul, rank, spectral_radius, DEFAULT_RANK_TOL,
};
use epscap::Matrix;
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-3.0..3.0f64, rows * cols)
        .prop_map(move |data| Matrix::new(rows, cols, data).unwrap())
}

/// Integer-valued entries keep rank decisions far from the threshold.
fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-2i32..=2, rows * cols)
        .prop_map(move |v| Matrix::new(rows, cols, v.into_iter().map(f64::from).collect()).unwrap())
}

fn unit_lower(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-2i32..=2, n * n).prop_map(move |v| {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..i {
                data[i * n + j] = f64::from(v[i * n + j]);
            }
            data[i * n + i] = 1.0;
        }
        Matrix::new(n, n, data).unwrap()
    })
}

fn inverse_unit_lower(l: &Matrix) -> Matrix {
    let n = l.rows();
    let mut inv = vec![0.0; n * n];
    for col in 0..n {
        for i in 0..n {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for j in 0..i {
                s -= l[(i, j)] * inv[j * n + col];
            }
            inv[i * n + col] = s;
        }
    }
    Matrix::new(n, n, inv).unwrap()
}

proptest! {
    #[test]
    fn rank_is_transpose_invariant(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| int_matrix(r, c))) {
        prop_assert_eq!(rank(&m, DEFAULT_RANK_TOL), rank(&m.transpose(), DEFAULT_RANK_TOL));
    }

    #[test]
    fn controllability_rank_survives_similarity(
        (a, b, t) in (2usize..4).prop_flat_map(|n| (int_matrix(n, n), int_matrix(n, 1), unit_lower(n)))
    ) {
        let t_inv = inverse_unit_lower(&t);
        let a2 = mat_mul(&mat_mul(&t, &a).unwrap(), &t_inv).unwrap();
        let b2 = mat_mul(&t, &b).unwrap();
        let r1 = rank(&controllability_matrix(&a, &b).unwrap(), DEFAULT_RANK_TOL);
        let r2 = rank(&controllability_matrix(&a2, &b2).unwrap(), DEFAULT_RANK_TOL);
        prop_assert_eq!(r1, r2);
    }

    #[test]
    fn spectral_radius_below_inf_norm(m in (1usize..6).prop_flat_map(|n| matrix(n, n))) {
        let rho = spectral_radius(&m, 1e-6).unwrap();
        prop_assert!(rho <= induced_inf_norm(&m) * (1.0 + 1e-6) + 1e-9, "rho {} norm {}", rho, induced_inf_norm(&m));
    }

    #[test]
    fn triangular_radius_is_max_diagonal(
        (diag, below) in (1usize..5).prop_flat_map(|n| (
            prop::collection::vec(-100i32..=100, n),
            prop::collection::vec(-1.0..1.0f64, n * n),
        ))
    ) {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = f64::from(diag[i]) / 100.0;
            for j in 0..i {
                data[i * n + j] = below[i * n + j];
            }
        }
        let m = Matrix::new(n, n, data).unwrap();
        let expected = diag.iter().map(|d| f64::from(d.abs()) / 100.0).fold(0.0, f64::max);
        let rho = spectral_radius(&m, 1e-6).unwrap();
        prop_assert!((rho - expected).abs() <= 1e-4, "rho {} expected {}", rho, expected);
    }

    #[test]
    fn mat_mul_is_associative(
        (a, b, c) in (1usize..4, 1usize..4, 1usize..4, 1usize..4)
            .prop_flat_map(|(p, q, r, s)| (matrix(p, q), matrix(q, r), matrix(r, s)))
    ) {
        let left = mat_mul(&mat_mul(&a, &b).unwrap(), &c).unwrap();
        let right = mat_mul(&a, &mat_mul(&b, &c).unwrap()).unwrap();
        for (x, y) in left.as_slice().iter().zip(right.as_slice()) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }
}
