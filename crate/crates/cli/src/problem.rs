//! Problem files: UTF-8 JSON describing a plant, a gain (or the closed-loop
//! matrix directly), `tau0`, `epsilon` and solver options. Matrices are
//! arrays of row arrays.
//!
//! ```json
//! { "n": 2, "m": 2, "p": 1,
//!   "A": [[0.9, 0.0], [0.6, 0.3]], "B": [[-1.5, 2.0], [1.0, -3.0]],
//!   "C": [[1.0, 1.0]], "K": [[0.32, 0.16], [0.24, 0.12]],
//!   "tau0": [0.3, 0.5], "epsilon": 1.4142135623730951 }
//! ```

use std::fs;
use std::path::Path;

use epscap::capacity::DetermineOptions;
use epscap::{ClosedLoop, Gain, Matrix, SystemSpec, Vector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Componentwise tolerance when both `K` and `A_tilde` are given.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed problem file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Field {
        field: &'static str,
        message: String,
    },
    #[error("A + B*K differs from A_tilde by {max_diff:e} (tolerance {CROSS_CHECK_TOL:e})")]
    CrossCheck { max_diff: f64 },
    #[error(transparent)]
    Core(#[from] epscap::Error),
}

fn field(field: &'static str, message: impl Into<String>) -> ProblemError {
    ProblemError::Field {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

impl FileOptions {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

/// The on-disk schema, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub p: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<f64>>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<Vec<f64>>>,
    #[serde(rename = "A_tilde", default, skip_serializing_if = "Option::is_none")]
    pub a_tilde: Option<Vec<Vec<f64>>>,
    pub tau0: Vec<f64>,
    pub epsilon: f64,
    /// Independently published determination index, echoed next to the
    /// computed one in reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_k0: Option<usize>,
    #[serde(default, skip_serializing_if = "FileOptions::is_empty")]
    pub options: FileOptions,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self, ProblemError> {
        let text = fs::read_to_string(path).map_err(|source| ProblemError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    pub fn validate(&self) -> Result<Problem, ProblemError> {
        Problem::from_file(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub max_iter: usize,
    pub stop_tol: f64,
    pub horizon: usize,
}

impl Settings {
    pub fn determine_options(&self) -> DetermineOptions {
        DetermineOptions {
            max_iter: self.max_iter,
            stop_tol: self.stop_tol,
        }
    }
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: Option<String>,
    pub closed_loop: ClosedLoop,
    pub a: Matrix,
    pub b: Option<Matrix>,
    /// Present when the file gave both `B` and `K`.
    pub plant: Option<(SystemSpec, Gain)>,
    pub reference_k0: Option<usize>,
    pub settings: Settings,
}

fn matrix(
    name: &'static str,
    rows: &[Vec<f64>],
    expect_rows: usize,
    expect_cols: usize,
) -> Result<Matrix, ProblemError> {
    if rows.len() != expect_rows {
        return Err(field(
            name,
            format!("expected {expect_rows} rows, found {}", rows.len()),
        ));
    }
    if let Some((i, r)) = rows
        .iter()
        .enumerate()
        .find(|(_, r)| r.len() != expect_cols)
    {
        return Err(field(
            name,
            format!("row {i} has {} entries, expected {expect_cols}", r.len()),
        ));
    }
    Matrix::from_rows(rows).map_err(|e| field(name, e.to_string()))
}

impl Problem {
    fn from_file(f: &ProblemFile) -> Result<Self, ProblemError> {
        let (n, p) = (f.n, f.p);
        if n == 0 {
            return Err(field("n", "must be positive"));
        }
        if p == 0 {
            return Err(field("p", "must be positive"));
        }
        if !(f.epsilon.is_finite() && f.epsilon > 0.0) {
            return Err(field("epsilon", format!("must be > 0, got {}", f.epsilon)));
        }
        let a = matrix("A", &f.a, n, n)?;
        let c = matrix("C", &f.c, p, n)?;
        if f.tau0.len() != n {
            return Err(field(
                "tau0",
                format!("expected {n} entries, found {}", f.tau0.len()),
            ));
        }
        let tau0 = Vector::new(f.tau0.clone()).map_err(|e| field("tau0", e.to_string()))?;

        let m = match (f.m, &f.b, &f.k) {
            (Some(0), _, _) => return Err(field("m", "must be positive")),
            (Some(m), _, _) => Some(m),
            (None, None, None) => None,
            (None, _, _) => return Err(field("m", "required when B or K is given")),
        };
        let b = match (&f.b, m) {
            (Some(rows), Some(m)) => Some(matrix("B", rows, n, m)?),
            _ => None,
        };
        let k = match (&f.k, m) {
            (Some(rows), Some(m)) => Some(matrix("K", rows, m, n)?),
            _ => None,
        };
        let a_tilde = f
            .a_tilde
            .as_ref()
            .map(|rows| matrix("A_tilde", rows, n, n))
            .transpose()?;

        let plant = match (&b, k) {
            (Some(b), Some(k)) => {
                let sys =
                    SystemSpec::new(a.clone(), b.clone(), c.clone(), tau0.clone(), f.epsilon)?;
                Some((sys, Gain::new(k)))
            }
            (None, Some(_)) => return Err(field("B", "required when K is given")),
            _ => None,
        };

        let closed = match (&plant, a_tilde) {
            (Some((sys, gain)), tabulated) => {
                let computed = epscap::closed_loop(sys, gain)?;
                if let Some(t) = tabulated {
                    let max_diff = computed
                        .as_slice()
                        .iter()
                        .zip(t.as_slice())
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max);
                    if max_diff > CROSS_CHECK_TOL {
                        return Err(ProblemError::CrossCheck { max_diff });
                    }
                }
                computed
            }
            (None, Some(t)) => t,
            (None, None) => return Err(field("A_tilde", "give either A_tilde or both B and K")),
        };
        let closed_loop = ClosedLoop::new(closed, c, tau0, f.epsilon)?;

        let max_iter = f
            .options
            .max_iter
            .unwrap_or(epscap::capacity::DEFAULT_MAX_ITER);
        let stop_tol = f
            .options
            .stop_tol
            .unwrap_or(epscap::capacity::DEFAULT_STOP_TOL);
        let horizon = f.options.horizon.unwrap_or(4 * n);
        let settings = Settings {
            max_iter,
            stop_tol,
            horizon,
        };
        settings.check(n)?;

        Ok(Self {
            name: f.name.clone(),
            closed_loop,
            a,
            b,
            plant,
            reference_k0: f.reference_k0,
            settings,
        })
    }

    pub fn n(&self) -> usize {
        self.closed_loop.n()
    }

    /// Overrides from the command line.
    pub fn with_overrides(
        mut self,
        max_iter: Option<usize>,
        stop_tol: Option<f64>,
        horizon: Option<usize>,
    ) -> Result<Self, ProblemError> {
        if let Some(v) = max_iter {
            self.settings.max_iter = v;
        }
        if let Some(v) = stop_tol {
            self.settings.stop_tol = v;
        }
        if let Some(v) = horizon {
            self.settings.horizon = v;
        }
        self.settings.check(self.n())?;
        Ok(self)
    }
}

impl Settings {
    fn check(&self, n: usize) -> Result<(), ProblemError> {
        if self.max_iter == 0 {
            return Err(field("max_iter", "must be at least 1"));
        }
        if !(self.stop_tol >= 0.0 && self.stop_tol.is_finite()) {
            return Err(field("stop_tol", "must be a finite non-negative number"));
        }
        if self.horizon < n {
            return Err(field("horizon", format!("must be at least n = {n}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = r#"{
        "n": 2, "m": 2, "p": 1,
        "A": [[0.9, 0.0], [0.6, 0.3]], "B": [[-1.5, 2.0], [1.0, -3.0]],
        "C": [[1.0, 1.0]], "K": [[0.32, 0.16], [0.24, 0.12]],
        "A_tilde": [[0.9, 0.0], [0.2, 0.1]],
        "tau0": [0.3, 0.5], "epsilon": 1.4142135623730951
    }"#;

    fn edit(f: impl FnOnce(&mut ProblemFile)) -> Result<Problem, ProblemError> {
        let mut file = ProblemFile::from_json(EX1).unwrap();
        f(&mut file);
        file.validate()
    }

    #[test]
    fn parses_and_defaults() {
        let p = edit(|_| {}).unwrap();
        assert_eq!(
            p.settings,
            Settings {
                max_iter: 200,
                stop_tol: 1e-9,
                horizon: 8
            }
        );
        assert!(p.plant.is_some());
        assert!((p.closed_loop.a_tilde()[(1, 0)] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn epsilon_must_be_positive() {
        let err = edit(|f| f.epsilon = 0.0).unwrap_err();
        assert!(
            matches!(
                err,
                ProblemError::Field {
                    field: "epsilon",
                    ..
                }
            ),
            "{err}"
        );
        assert!(err.to_string().contains("epsilon"));
        assert!(edit(|f| f.epsilon = -1.0).is_err());
    }

    #[test]
    fn perturbed_a_tilde_is_rejected() {
        let err = edit(|f| f.a_tilde.as_mut().unwrap()[1][1] += 1e-3).unwrap_err();
        assert!(matches!(err, ProblemError::CrossCheck { .. }), "{err}");
    }

    #[test]
    fn a_tilde_alone_is_enough() {
        let p = edit(|f| {
            f.k = None;
        })
        .unwrap();
        assert!(p.plant.is_none());
        assert!(p.b.is_some());
        let p = edit(|f| {
            f.k = None;
            f.b = None;
            f.m = None;
        })
        .unwrap();
        assert!(p.b.is_none());
    }

    #[test]
    fn missing_closed_loop_is_rejected() {
        let err = edit(|f| {
            f.k = None;
            f.a_tilde = None;
        })
        .unwrap_err();
        assert!(err.to_string().contains("A_tilde"));
        assert!(edit(|f| f.b = None)
            .unwrap_err()
            .to_string()
            .contains("`B`"));
    }

    #[test]
    fn shape_errors_name_the_field() {
        assert!(edit(|f| f.c[0].push(1.0))
            .unwrap_err()
            .to_string()
            .contains("`C`"));
        assert!(edit(|f| f.tau0.pop().map(drop).unwrap())
            .unwrap_err()
            .to_string()
            .contains("tau0"));
        assert!(edit(|f| f.a.pop().map(drop).unwrap())
            .unwrap_err()
            .to_string()
            .contains("`A`"));
        assert!(edit(|f| f.options.horizon = Some(1))
            .unwrap_err()
            .to_string()
            .contains("horizon"));
    }

    #[test]
    fn unknown_fields_and_bad_json() {
        assert!(ProblemFile::from_json("{").is_err());
        let extra = EX1.replacen("\"n\": 2", "\"n\": 2, \"bogus\": 1", 1);
        assert!(ProblemFile::from_json(&extra).is_err());
    }
}
