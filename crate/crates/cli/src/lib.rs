//! Command-line front end for epsilon-capacity analysis: problem-file
//! parsing, command dispatch and CSV/SVG rendering.
//!
//! Exit codes are a stable contract: `0` success (or admissible gain), `1`
//! usage or input error, `2` iteration limit reached, `3` inadmissible gain.

pub mod commands;
pub mod problem;
pub mod render;

pub use commands::{
    run, run_from_args, Cli, EXIT_INADMISSIBLE, EXIT_INPUT, EXIT_ITERATION_LIMIT, EXIT_OK,
};
pub use problem::{Problem, ProblemError, ProblemFile};
