//! Published reference values for the two worked problems.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rug::Float;

use crate::corrections::FDSolution;
use crate::error::{FdError, Result};
use crate::numerics::{agreement_digits, PrecisionContext, Real};
use crate::problem::ProblemSpec;

const FIXTURE_TEXT: &str = include_str!("../../data/fixtures.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Example {
    /// `X = 5`, `q0 = -0.02 + 0.0001 x^4`, `q1 = -0.04 x`, `q2 = -0.02 x^2`.
    SquaredHarmonic,
    /// `X = 1`, `q0 = x`.
    LinearPotential,
}

impl Example {
    pub fn spec(self, ctx: PrecisionContext) -> ProblemSpec {
        match self {
            Example::SquaredHarmonic => ProblemSpec::squared_harmonic(ctx),
            Example::LinearPotential => ProblemSpec::linear_potential(ctx),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Example::SquaredHarmonic => "squared-harmonic",
            Example::LinearPotential => "linear-potential",
        }
    }
}

type Keyed = BTreeMap<(u32, usize), String>;

/// Reference tables as decimal strings, exactly as printed.
#[derive(Clone, Debug, Default)]
pub struct FixtureSet {
    exact: BTreeMap<u32, String>,
    errors: Keyed,
    approx: Keyed,
    residuals: Keyed,
}

impl FixtureSet {
    pub fn parse(text: &str) -> Result<Self> {
        let mut set = FixtureSet::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let [kind, n, m, value] = fields[..] else {
                return Err(FdError::Parse {
                    line,
                    message: format!("expected 4 fields, found {}", fields.len()),
                });
            };
            let bad = |what: &str| FdError::Parse {
                line,
                message: format!("bad {what}"),
            };
            let n: u32 = n.parse().map_err(|_| bad("n"))?;
            let m: Option<usize> = if m == "-" {
                None
            } else {
                Some(m.parse().map_err(|_| bad("m"))?)
            };
            let value = value.to_string();
            let slot = match (kind, m) {
                ("sq_exact", None) => {
                    set.exact.insert(n, value);
                    continue;
                }
                ("sq_error", Some(m)) => set.errors.insert((n, m), value),
                ("lin_approx", Some(m)) => set.approx.insert((n, m), value),
                ("lin_residual", Some(m)) => set.residuals.insert((n, m), value),
                _ => return Err(bad("kind/rank combination")),
            };
            if slot.is_some() {
                return Err(FdError::Parse {
                    line,
                    message: "duplicate entry".into(),
                });
            }
        }
        Ok(set)
    }

    /// The shipped tables.
    pub fn builtin() -> &'static FixtureSet {
        static SET: OnceLock<FixtureSet> = OnceLock::new();
        SET.get_or_init(|| FixtureSet::parse(FIXTURE_TEXT).expect("shipped fixtures parse"))
    }

    /// Exact eigenvalue of the squared-harmonic problem.
    pub fn exact(&self, n: u32) -> Option<&str> {
        self.exact.get(&n).map(String::as_str)
    }

    /// Printed absolute error `|λ_n − λ_n^m|` for the squared-harmonic problem.
    pub fn error(&self, n: u32, m: usize) -> Option<&str> {
        self.errors.get(&(n, m)).map(String::as_str)
    }

    /// Printed rank-`m` eigenvalue for the linear-potential problem.
    pub fn approx(&self, n: u32, m: usize) -> Option<&str> {
        self.approx.get(&(n, m)).map(String::as_str)
    }

    /// Printed residual norm for the linear-potential problem.
    pub fn residual(&self, n: u32, m: usize) -> Option<&str> {
        self.residuals.get(&(n, m)).map(String::as_str)
    }

    pub fn exact_indices(&self) -> Vec<u32> {
        self.exact.keys().copied().collect()
    }

    pub fn error_entries(&self) -> impl Iterator<Item = ((u32, usize), &str)> {
        self.errors.iter().map(|(k, v)| (*k, v.as_str()))
    }

    pub fn residual_entries(&self) -> impl Iterator<Item = ((u32, usize), &str)> {
        self.residuals.iter().map(|(k, v)| (*k, v.as_str()))
    }

    pub fn approx_entries(&self) -> impl Iterator<Item = ((u32, usize), &str)> {
        self.approx.iter().map(|(k, v)| (*k, v.as_str()))
    }
}

/// How a solution compares with the printed tables.
#[derive(Clone, Debug)]
pub struct FixtureReport {
    pub example: Example,
    pub n: u32,
    pub m: usize,
    /// Leading digits shared with the printed eigenvalue (exact or rank-m).
    pub matching_digits: u32,
    /// `|λ_ref − λ_n^m|`.
    pub abs_error: Real,
    /// Printed error for this `(n, m)`, when one exists.
    pub printed_error: Option<f64>,
    /// `abs_error / printed_error`.
    pub error_ratio: Option<f64>,
}

impl FixtureReport {
    /// Whether the observed error is within `factor` of the printed one.
    pub fn within_factor(&self, factor: f64) -> Option<bool> {
        self.error_ratio.map(|r| r <= factor && r >= 1.0 / factor)
    }
}

/// Ratio of `observed` to a printed two-figure value.
pub fn printed_ratio(observed: &Real, printed: &str) -> Result<f64> {
    let p = Float::with_val(
        observed.prec(),
        Float::parse(printed).map_err(|e| FdError::InvalidArgument(e.to_string()))?,
    );
    if p.is_zero() {
        return Err(FdError::InvalidArgument("printed value is zero".into()));
    }
    Ok((observed.clone() / p).to_f64())
}

pub fn compare_to_fixture(
    sol: &FDSolution,
    example: Example,
    fixtures: &FixtureSet,
) -> Result<FixtureReport> {
    let prec = sol.lambda_approx.prec();
    let parse = |s: &str| -> Result<Real> {
        Ok(Float::with_val(
            prec,
            Float::parse(s).map_err(|e| FdError::InvalidArgument(e.to_string()))?,
        ))
    };
    let missing = || {
        FdError::InvalidArgument(format!(
            "no {} fixture for n = {}, m = {}",
            example.name(),
            sol.n,
            sol.m
        ))
    };
    let (reference, printed_error) = match example {
        Example::SquaredHarmonic => {
            let exact = fixtures.exact(sol.n).ok_or_else(missing)?;
            (parse(exact)?, fixtures.error(sol.n, sol.m))
        }
        Example::LinearPotential => (
            parse(fixtures.approx(sol.n, sol.m).ok_or_else(missing)?)?,
            None,
        ),
    };
    let abs_error = Float::with_val(prec, &reference - &sol.lambda_approx).abs();
    let printed_digits = reference_digits(match example {
        Example::SquaredHarmonic => fixtures.exact(sol.n).unwrap_or(""),
        Example::LinearPotential => fixtures.approx(sol.n, sol.m).unwrap_or(""),
    });
    let matching_digits = agreement_digits(&reference, &sol.lambda_approx, printed_digits);
    let error_ratio = printed_error
        .map(|p| printed_ratio(&abs_error, p))
        .transpose()?;
    Ok(FixtureReport {
        example,
        n: sol.n,
        m: sol.m,
        matching_digits,
        abs_error,
        printed_error: printed_error.and_then(|p| p.parse().ok()),
        error_ratio,
    })
}

/// Significant digits carried by a printed decimal.
fn reference_digits(s: &str) -> u32 {
    let mantissa = s.split(['e', 'E']).next().unwrap_or("");
    let digits = mantissa.trim_start_matches(['-', '0', '.']);
    digits.chars().filter(|c| c.is_ascii_digit()).count() as u32
}
