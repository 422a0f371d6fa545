use epscap_cli::problem::{FileOptions, ProblemError, ProblemFile};
use proptest::prelude::*;

fn fixture(name: &str) -> ProblemFile {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"));
    ProblemFile::read(&path).unwrap()
}

const TABLE_ONE: [&str; 4] = ["ex02", "ex03", "ex04", "ex05"];

#[test]
fn every_fixture_validates() {
    for i in 1..=10 {
        let name = format!("ex{i:02}");
        let problem = fixture(&name)
            .validate()
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(problem.settings.horizon, 4 * problem.n());
    }
}

#[test]
fn second_example_closed_loop_is_exact() {
    let problem = fixture("ex02").validate().unwrap();
    let expected = [0.5, 0.0, -1.0, -0.4];
    for (x, e) in problem
        .closed_loop
        .a_tilde()
        .as_slice()
        .iter()
        .zip(expected)
    {
        assert!((x - e).abs() <= 1e-12, "{x} vs {e}");
    }
}

#[test]
fn perturbed_a_tilde_is_rejected() {
    for name in TABLE_ONE.iter().filter(|n| fixture(n).k.is_some()) {
        let mut file = fixture(name);
        file.a_tilde.as_mut().unwrap()[0][0] += 1e-3;
        assert!(
            matches!(file.validate(), Err(ProblemError::CrossCheck { .. })),
            "{name}"
        );
    }
}

#[test]
fn wrong_dimensions_are_rejected() {
    let mut file = fixture("ex02");
    file.tau0.push(1.0);
    assert!(file.validate().is_err());

    let mut file = fixture("ex02");
    file.c[0].pop();
    assert!(file.validate().is_err());

    let mut file = fixture("ex02");
    file.b = None;
    assert!(file.validate().is_err(), "K without B must be rejected");
}

#[test]
fn unknown_fields_are_rejected() {
    let text = fixture("ex02")
        .to_json()
        .replacen('{', "{\"colour\": 1,", 1);
    assert!(matches!(
        ProblemFile::from_json(&text),
        Err(ProblemError::Json(_))
    ));
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1e6..1e6f64, cols), rows)
}

fn problem_file() -> impl Strategy<Value = ProblemFile> {
    (1usize..4, 1usize..3, 1usize..3).prop_flat_map(|(n, m, p)| {
        (
            (
                proptest::option::of("[a-z0-9_]{1,8}"),
                matrix(n, n),
                proptest::option::of(matrix(n, m)),
            ),
            (
                matrix(p, n),
                proptest::option::of(matrix(m, n)),
                proptest::option::of(matrix(n, n)),
            ),
            (
                prop::collection::vec(-10.0..10.0f64, n),
                1e-6..1e3f64,
                proptest::option::of(0usize..50),
            ),
            (
                proptest::option::of(1usize..500),
                proptest::option::of(1e-12..1e-3f64),
                proptest::option::of(1usize..40),
            ),
        )
            .prop_map(
                move |(
                    (name, a, b),
                    (c, k, a_tilde),
                    (tau0, epsilon, reference_k0),
                    (max_iter, stop_tol, horizon),
                )| {
                    ProblemFile {
                        name,
                        n,
                        m: b.as_ref().map(|_| m),
                        p,
                        a,
                        b,
                        c,
                        k,
                        a_tilde,
                        tau0,
                        epsilon,
                        reference_k0,
                        options: FileOptions {
                            max_iter,
                            stop_tol,
                            horizon,
                        },
                    }
                },
            )
    })
}

proptest! {
    #[test]
    fn json_round_trip_is_identity(file in problem_file()) {
        let again = ProblemFile::from_json(&file.to_json()).unwrap();
        prop_assert_eq!(again, file);
    }
}
