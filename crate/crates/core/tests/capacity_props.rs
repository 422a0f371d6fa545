use epscap::capacity::DEFAULT_STOP_TOL;
use epscap::linalg::induced_inf_norm;
use epscap::{sensitivity_rows, ClosedLoop, DetermineOptions, Matrix, Vector};
use proptest::prelude::*;

fn m(rows: &[&[f64]]) -> Matrix {
    Matrix::from_rows(rows).unwrap()
}

fn v(x: &[f64]) -> Vector {
    Vector::new(x.to_vec()).unwrap()
}

/// Random closed loop with `||Ã||_inf` strictly below 0.95.
fn contractive_loop() -> impl Strategy<Value = ClosedLoop> {
    (2usize..=4, 1usize..=2).prop_flat_map(|(n, p)| {
        (
            prop::collection::vec(-1.0..1.0f64, n * n),
            0.05..0.95f64,
            prop::collection::vec(-2.0..2.0f64, p * n),
            0.05..2.0f64,
        )
            .prop_map(move |(a, target, c, eps)| {
                let raw = Matrix::new(n, n, a).unwrap();
                let norm = induced_inf_norm(&raw).max(1e-12);
                let a_tilde = raw.scale(target / norm);
                let c = Matrix::new(p, n, c).unwrap();
                ClosedLoop::new(a_tilde, c, Vector::zeros(n), eps).unwrap()
            })
    })
}

fn examples() -> Vec<ClosedLoop> {
    let a = m(&[&[0.9, 0.0], &[0.6, 0.3]]);
    let tau0 = v(&[0.3, 0.5]);
    let sqrt2 = std::f64::consts::SQRT_2;
    vec![
        ClosedLoop::new(
            m(&[&[0.9, 0.0], &[0.2, 0.1]]),
            m(&[&[1.0, 1.0]]),
            tau0.clone(),
            sqrt2,
        )
        .unwrap(),
        ClosedLoop::new(
            m(&[&[0.5, 0.0], &[-1.0, -0.4]]),
            m(&[&[-1.0, 1.0]]),
            tau0.clone(),
            0.4,
        )
        .unwrap(),
        ClosedLoop::new(
            m(&[&[0.9, 0.0], &[0.99, 0.6]]),
            m(&[&[1.0, 1.0]]),
            tau0.clone(),
            sqrt2,
        )
        .unwrap(),
        ClosedLoop::new(
            m(&[&[1.0, 0.0], &[0.5, -0.1]]),
            m(&[&[1.0, 1.0]]),
            tau0.clone(),
            sqrt2,
        )
        .unwrap(),
        ClosedLoop::new(a.clone(), m(&[&[1.0, -1.0], &[0.5, 2.0]]), tau0, 1.0).unwrap(),
    ]
}

fn sample_points(n: usize, count: usize, radius: f64, seed: u64) -> Vec<Vector> {
    // xorshift keeps the sample deterministic without extra dependencies
    let mut state = seed.max(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..count)
        .map(|_| Vector::new((0..n).map(|_| radius * (2.0 * next() - 1.0)).collect()).unwrap())
        .collect()
}

#[test]
fn sets_are_symmetric_convex_and_contain_a_ball() {
    let opts = DetermineOptions::default();
    for cl in examples() {
        let cap = cl.determine(&opts).unwrap();
        let pts = sample_points(cl.n(), 400, 3.0, 7);
        let members: Vec<&Vector> = pts
            .iter()
            .filter(|x| cap.membership(x).unwrap().inside)
            .collect();
        for x in &pts {
            let inside = cap.membership(x).unwrap().inside;
            assert_eq!(inside, cap.membership(&x.scale(-1.0)).unwrap().inside);
        }
        for pair in members.windows(2) {
            let mid = pair[0].add(pair[1]).unwrap().scale(0.5);
            assert!(cap.membership(&mid).unwrap().inside);
        }
        let widest = cap
            .constraint_rows
            .row_iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let delta = 0.999 * cap.epsilon / widest;
        for x in sample_points(cl.n(), 50, delta, 11) {
            assert!(cap.membership(&x).unwrap().inside);
        }
    }
}

#[test]
fn stacks_are_nested() {
    let opts = DetermineOptions::default();
    for cl in examples() {
        let cap = cl.determine(&opts).unwrap();
        for x in sample_points(cl.n(), 300, 4.0, 3) {
            let mut previous = true;
            for k in 0..=cap.k0 {
                let inside = cap.membership_up_to(&x, k).unwrap().inside;
                assert!(previous || !inside, "Θ_{k} not contained in Θ_{}", k - 1);
                previous = inside;
            }
        }
    }
}

#[test]
fn fixpoint_persists_after_determination() {
    let opts = DetermineOptions::default();
    for cl in examples() {
        let cap = cl.determine(&opts).unwrap();
        assert!(cap.is_determined());
        for k in cap.k0..=cap.k0 + 5 {
            let record = cl.stop_test(k).unwrap();
            assert!(
                record.passes(cl.epsilon(), DEFAULT_STOP_TOL),
                "k = {k}: {record:?}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contraction_always_terminates(cl in contractive_loop()) {
        let cap = cl.determine(&DetermineOptions::default()).unwrap();
        prop_assert!(cap.is_determined());
    }

    #[test]
    fn epsilon_scaling_rescales_the_set(cl in contractive_loop(), t in 0.1..10.0f64) {
        let opts = DetermineOptions::default();
        let base = cl.determine(&opts).unwrap();
        let scaled = cl.with_epsilon(cl.epsilon() * t).unwrap().determine(&opts).unwrap();
        prop_assert_eq!(base.k0, scaled.k0);
        prop_assert_eq!(&base.constraint_rows, &scaled.constraint_rows);
        for x in sample_points(cl.n(), 40, 3.0, 5) {
            let a = base.membership(&x).unwrap().inside;
            let b = scaled.membership(&x.scale(t)).unwrap().inside;
            // points within rounding of the boundary may flip
            let margin = base.constraint_rows.row_iter()
                .map(|r| (r.iter().zip(x.as_slice()).map(|(p, q)| p * q).sum::<f64>().abs() - base.epsilon).abs())
                .fold(f64::INFINITY, f64::min);
            prop_assert!(a == b || margin < 1e-9);
        }
    }

    #[test]
    fn stable_loops_decay_below_epsilon(cl in contractive_loop()) {
        let horizon = 8 * cl.n();
        let report = cl.analyze(None, horizon).unwrap();
        prop_assert!(report.prop9_guarantee);
        let k = report.thm11_k0.expect("contraction implies a decaying tail");
        let rows = sensitivity_rows(cl.c(), cl.a_tilde(), horizon).unwrap();
        let p = cl.p();
        for i in k..=horizon {
            prop_assert!(induced_inf_norm(&rows.row_block(i * p, (i + 1) * p)) <= cl.epsilon());
        }
    }

    #[test]
    fn finite_differences_recover_sensitivity_rows(
        cl in contractive_loop(),
        tau in prop::collection::vec(-1.0..1.0f64, 4),
        alpha in -2.0..2.0f64,
    ) {
        let n = cl.n();
        let cl = ClosedLoop::new(cl.a_tilde().clone(), cl.c().clone(), v(&tau[..n]), cl.epsilon()).unwrap();
        let steps = 10;
        let h = 0.5;
        let zero = Vector::zeros(n);
        let rows = sensitivity_rows(cl.c(), cl.a_tilde(), steps).unwrap();
        let base = cl.simulate(alpha, &zero, steps).unwrap();
        let bumped = cl.simulate(alpha + h, &zero, steps).unwrap();
        let p = cl.p();
        for i in 0..=steps {
            for j in 0..p {
                let fd = (bumped[i].y[j] - base[i].y[j]) / h;
                let exact: f64 = rows.row(i * p + j).iter().zip(cl.tau0().as_slice()).map(|(a, b)| a * b).sum();
                prop_assert!((fd - exact).abs() <= 1e-9, "step {} output {}: {} vs {}", i, j, fd, exact);
            }
        }
    }
}
