//! Functional-discrete eigenpair approximations for
//!
//! ```text
//! u'''' + q2(x) u'' + q1(x) u' + (q0(x) - λ) u = 0,   x in [0, X],
//! u(0) = u''(0) = u(X) = u''(X) = 0,
//! ```
//!
//! with polynomial potentials. Each correction is an exact finite expansion in
//! `x^p {sin, cos, sinh, cosh}(nπx/X)` whose coefficients come from closed
//! recurrences, evaluated in arbitrary precision.
//!
//! ```no_run
//! use fdsl::{solve, PrecisionContext, ProblemSpec};
//!
//! let ctx = PrecisionContext::new(300).unwrap();
//! let spec = ProblemSpec::linear_potential(ctx);
//! let sol = solve(&spec, 1, 10).unwrap();
//! println!("{}", fdsl::format_real(&sol.lambda_approx, 50));
//! ```

pub mod config;
pub mod convergence;
pub mod corrections;
pub mod error;
pub mod numerics;
pub mod problem;
pub mod recursion;
pub mod rhs;
pub mod spectral;
pub mod verify;

pub use config::ProblemConfig;
pub use convergence::{error_bounds, majorant, ConvergenceReport};
pub use corrections::{CorrectionTerm, Expansion, FDSolution};
pub use error::{FdError, Result};
pub use numerics::{format_real, PrecisionContext, Real};
pub use problem::{Polynomial, ProblemSpec};
pub use spectral::{solve, solve_traced};
