//! Plain-text problem files.
//!
//! ```text
//! # comments start with '#'
//! [problem]
//! X  = 5
//! q0 = [-0.02, 0, 0, 0, 0.0001]   # lowest degree first
//! q1 = [0, -0.04]
//! q2 = [0, 0, -0.02]
//! ```
//!
//! The `[problem]` header is optional. Missing potentials default to zero.
//! Numbers are kept as decimal strings and parsed at whatever precision the
//! problem is later built with.

use crate::error::{FdError, Result};
use crate::numerics::PrecisionContext;
use crate::problem::{Polynomial, ProblemSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemConfig {
    pub length: String,
    pub q0: Vec<String>,
    pub q1: Vec<String>,
    pub q2: Vec<String>,
}

fn parse_err(line: usize, message: impl Into<String>) -> FdError {
    FdError::Parse {
        line,
        message: message.into(),
    }
}

fn check_number(line: usize, key: &str, raw: &str) -> Result<String> {
    let value = raw.trim().replace('\u{2212}', "-");
    if value.is_empty() {
        return Err(parse_err(line, format!("empty value for `{key}`")));
    }
    let probe = PrecisionContext::new(PrecisionContext::MIN_DIGITS).expect("minimum precision");
    probe.parse(&value).map_err(|_| {
        parse_err(
            line,
            format!("`{key}`: `{}` is not a finite decimal number", raw.trim()),
        )
    })?;
    Ok(value)
}

fn parse_list(line: usize, key: &str, raw: &str) -> Result<Vec<String>> {
    let inner = raw
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| {
            parse_err(
                line,
                format!("`{key}` must be a bracketed list like [0, 1]"),
            )
        })?;
    if inner.trim().is_empty() {
        return Err(parse_err(line, format!("`{key}` has no coefficients")));
    }
    inner
        .split(',')
        .map(|item| check_number(line, key, item))
        .collect()
}

impl ProblemConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut length = None;
        let mut lists: [Option<Vec<String>>; 3] = [None, None, None];
        let mut seen_section = false;
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if content.starts_with('[') && !content.contains('=') {
                if content != "[problem]" {
                    return Err(parse_err(line, format!("unknown section `{content}`")));
                }
                if seen_section {
                    return Err(parse_err(line, "duplicate [problem] section"));
                }
                seen_section = true;
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                parse_err(line, format!("expected `key = value`, found `{content}`"))
            })?;
            let key = key.trim();
            match key {
                "X" => {
                    if length.is_some() {
                        return Err(parse_err(line, "duplicate key `X`"));
                    }
                    length = Some(check_number(line, key, value)?);
                }
                "q0" | "q1" | "q2" => {
                    let slot = &mut lists[(key.as_bytes()[1] - b'0') as usize];
                    if slot.is_some() {
                        return Err(parse_err(line, format!("duplicate key `{key}`")));
                    }
                    *slot = Some(parse_list(line, key, value)?);
                }
                other => return Err(parse_err(line, format!("unknown key `{other}`"))),
            }
        }
        let length = length.ok_or_else(|| parse_err(0, "missing required key `X`"))?;
        let [q0, q1, q2] = lists.map(|l| l.unwrap_or_else(|| vec!["0".to_string()]));
        Ok(Self { length, q0, q1, q2 })
    }

    pub fn to_spec(&self, ctx: PrecisionContext) -> Result<ProblemSpec> {
        let poly = |cs: &[String]| -> Result<Polynomial> {
            Ok(Polynomial::new(
                cs.iter().map(|c| ctx.parse(c)).collect::<Result<_>>()?,
            ))
        };
        ProblemSpec::new(
            ctx,
            ctx.parse(&self.length)?,
            poly(&self.q0)?,
            poly(&self.q1)?,
            poly(&self.q2)?,
        )
    }

    /// Renders the config back into the file grammar.
    pub fn render(&self) -> String {
        format!(
            "[problem]\nX = {}\nq0 = [{}]\nq1 = [{}]\nq2 = [{}]\n",
            self.length,
            self.q0.join(", "),
            self.q1.join(", "),
            self.q2.join(", ")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARED: &str = "\
# squared harmonic operator
[problem]
X  = 5
q0 = [\u{2212}0.02, 0, 0, 0, 0.0001]
q1 = [0, -0.04]   # trailing comment
q2 = [0, 0, -0.02]
";

    #[test]
    fn parses_full_file() {
        let cfg = ProblemConfig::parse(SQUARED).unwrap();
        assert_eq!(cfg.length, "5");
        assert_eq!(cfg.q0, ["-0.02", "0", "0", "0", "0.0001"]);
        let ctx = PrecisionContext::new(50).unwrap();
        let spec = cfg.to_spec(ctx).unwrap();
        assert_eq!(spec.budget().r, 4);
        assert_eq!(spec.q2().coeffs()[2], ctx.parse("-0.02").unwrap());
    }

    #[test]
    fn defaults_missing_potentials() {
        let cfg = ProblemConfig::parse("X = 1\nq0 = [0, 1]\n").unwrap();
        assert_eq!(cfg.q1, ["0"]);
        let spec = cfg.to_spec(PrecisionContext::new(40).unwrap()).unwrap();
        assert_eq!(spec.q1().degree(), 1);
    }

    #[test]
    fn reports_line_numbers() {
        let err = ProblemConfig::parse("X = 1\n\nq0 = [0, abc]\n").unwrap_err();
        assert!(matches!(err, FdError::Parse { line: 3, .. }), "{err}");
        let err = ProblemConfig::parse("X = 1\nq7 = [1]\n").unwrap_err();
        assert!(matches!(err, FdError::Parse { line: 2, .. }));
        let err = ProblemConfig::parse("q0 = [1]\n").unwrap_err();
        assert!(err.to_string().contains("missing required key"));
        let err = ProblemConfig::parse("X = 1\nX = 2\n").unwrap_err();
        assert!(matches!(err, FdError::Parse { line: 2, .. }));
        let err = ProblemConfig::parse("X = 1\nq0 = 1, 2\n").unwrap_err();
        assert!(err.to_string().contains("bracketed"));
    }

    #[test]
    fn render_round_trips() {
        let cfg = ProblemConfig::parse(SQUARED).unwrap();
        assert_eq!(ProblemConfig::parse(&cfg.render()).unwrap(), cfg);
    }

    #[test]
    fn nonpositive_length_fails_at_build() {
        let cfg = ProblemConfig::parse("X = 0\n").unwrap();
        assert!(cfg.to_spec(PrecisionContext::new(40).unwrap()).is_err());
    }
}
