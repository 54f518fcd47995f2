//! Working-precision context and elementary functions.
//!
//! Every quantity in the solver is an MPFR float whose precision is fixed by a
//! [`PrecisionContext`]. Results are certified by replaying a computation at a
//! lower precision and counting the digits on which the two runs agree
//! ([`stability_probe`]).

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{FdError, Result};

/// Arbitrary-precision real number.
pub type Real = Float;

const LOG2_10: f64 = std::f64::consts::LOG2_10;
const GUARD_BITS: u32 = 32;

/// Decimal working precision shared by all values of one computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    digits: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self {
            digits: Self::DEFAULT_DIGITS,
        }
    }
}

impl PrecisionContext {
    pub const DEFAULT_DIGITS: u32 = 300;
    pub const MIN_DIGITS: u32 = 30;

    pub fn new(digits: u32) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(FdError::InvalidArgument(format!(
                "precision must be at least {} digits, got {digits}",
                Self::MIN_DIGITS
            )));
        }
        Ok(Self { digits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Binary precision carried by every value: the decimal digits plus guard bits.
    pub fn bits(&self) -> u32 {
        (self.digits as f64 * LOG2_10).ceil() as u32 + GUARD_BITS
    }

    /// Context with half the digits (never below the minimum); used for replays.
    pub fn halved(&self) -> Self {
        Self {
            digits: (self.digits / 2).max(Self::MIN_DIGITS),
        }
    }

    pub fn zero(&self) -> Real {
        Float::new(self.bits())
    }

    pub fn int(&self, v: i64) -> Real {
        Float::with_val(self.bits(), v)
    }

    pub fn ratio(&self, num: i64, den: i64) -> Real {
        Float::with_val(self.bits(), num) / den
    }

    pub fn from_f64(&self, v: f64) -> Real {
        Float::with_val(self.bits(), v)
    }

    /// Copy of `x` rounded to this context's precision.
    pub fn round(&self, x: &Real) -> Real {
        Float::with_val(self.bits(), x)
    }

    /// Parses a decimal string (an optional leading unicode minus is accepted).
    pub fn parse(&self, s: &str) -> Result<Real> {
        let cleaned = s.trim().replace('\u{2212}', "-");
        let parsed = Float::parse(&cleaned).map_err(|e| {
            FdError::InvalidArgument(format!("cannot parse `{}` as a number: {e}", s.trim()))
        })?;
        let v = Float::with_val(self.bits(), parsed);
        if !v.is_finite() {
            return Err(FdError::InvalidArgument(format!(
                "`{}` is not finite",
                s.trim()
            )));
        }
        Ok(v)
    }

    pub fn pi(&self) -> Real {
        const_pi(self)
    }

    /// `10^e` at this precision.
    pub fn pow10(&self, e: i32) -> Real {
        Float::with_val(self.bits(), 10).pow(e)
    }

    /// `10^{-(digits - slack)}`, the customary tolerance for identities at this precision.
    pub fn tolerance(&self, slack: u32) -> Real {
        self.pow10(-(self.digits as i32 - slack as i32))
    }
}

pub fn const_pi(ctx: &PrecisionContext) -> Real {
    Float::with_val(ctx.bits(), Constant::Pi)
}

/// Elementary functions used by the basis representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElemFn {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Sqrt,
}

pub fn elem(f: ElemFn, x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let x = ctx.round(x);
    Ok(match f {
        ElemFn::Sin => x.sin(),
        ElemFn::Cos => x.cos(),
        ElemFn::Sinh => x.sinh(),
        ElemFn::Cosh => x.cosh(),
        ElemFn::Exp => x.exp(),
        ElemFn::Sqrt => {
            if x.is_sign_negative() && !x.is_zero() {
                return Err(FdError::Domain(format!(
                    "square root of negative number {}",
                    x.to_string_radix(10, Some(20))
                )));
            }
            x.sqrt()
        }
    })
}

/// Number of leading significant decimal digits on which `a` and `b` agree,
/// capped at `cap`.
pub fn agreement_digits(a: &Real, b: &Real, cap: u32) -> u32 {
    if a == b {
        return cap;
    }
    let scale = if a.clone().abs() > b.clone().abs() {
        a.clone().abs()
    } else {
        b.clone().abs()
    };
    let diff = (a.clone() - b).abs();
    if scale.is_zero() {
        return cap;
    }
    let rel = diff / scale;
    if rel.is_zero() {
        return cap;
    }
    let digits = -rel.log10().to_f64();
    if digits <= 0.0 {
        0
    } else {
        (digits.floor() as u32).min(cap)
    }
}

/// Runs `computation` under both contexts and reports how many leading
/// significant digits the results share.
pub fn stability_probe<F>(
    computation: F,
    hi: &PrecisionContext,
    lo: &PrecisionContext,
) -> Result<u32>
where
    F: Fn(&PrecisionContext) -> Result<Real>,
{
    if hi.digits() <= lo.digits() {
        return Err(FdError::InvalidArgument(format!(
            "probe needs a higher and a lower precision, got {} and {}",
            hi.digits(),
            lo.digits()
        )));
    }
    let a = computation(hi)?;
    let b = computation(lo)?;
    Ok(agreement_digits(&a, &b, lo.digits()))
}

/// Round-to-nearest decimal rendering with `sig` significant digits.
///
/// Moderate magnitudes print positionally (`97.90906...`), others in
/// scientific notation (`2.8e-39`).
pub fn format_real(x: &Real, sig: usize) -> String {
    let sig = sig.max(1);
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let raw = x.to_string_radix(10, Some(sig));
    let (negative, body) = match raw.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, raw.as_str()),
    };
    let (mantissa, exp) = match body.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (body, 0),
    };
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let int_len = mantissa.find('.').unwrap_or(mantissa.len()) as i64;
    // position of the decimal point relative to the first digit
    let point = int_len + exp;
    let sign = if negative { "-" } else { "" };
    if (-4..=24).contains(&point) {
        let out = if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), digits)
        } else if point as usize >= digits.len() {
            format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
        } else {
            format!(
                "{}.{}",
                &digits[..point as usize],
                &digits[point as usize..]
            )
        };
        format!("{sign}{out}")
    } else {
        let rest = &digits[1..];
        if rest.is_empty() {
            format!("{sign}{}e{}", &digits[..1], point - 1)
        } else {
            format!("{sign}{}.{}e{}", &digits[..1], rest, point - 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    #[test]
    fn pi_to_fifty_digits() {
        let pi = const_pi(&ctx(50));
        assert_eq!(
            format_real(&pi, 50),
            "3.1415926535897932384626433832795028841971693993751"
        );
    }

    #[test]
    fn pi_thirty_digits() {
        assert_eq!(
            format_real(&const_pi(&ctx(30)), 30),
            "3.14159265358979323846264338328"
        );
    }

    #[test]
    fn pi_agrees_across_precisions() {
        let lo = const_pi(&ctx(100));
        let hi = const_pi(&ctx(300));
        assert!(agreement_digits(&lo, &hi, 100) >= 99);
    }

    #[test]
    fn elementary_values_at_zero() {
        let c = ctx(60);
        assert!(elem(ElemFn::Sin, &c.zero(), &c).unwrap().is_zero());
        assert_eq!(elem(ElemFn::Cosh, &c.zero(), &c).unwrap(), 1);
    }

    #[test]
    fn sinh_matches_exponential_form() {
        let c = ctx(50);
        let x = c.pi() * 3;
        let direct = elem(ElemFn::Sinh, &x, &c).unwrap();
        let ep = elem(ElemFn::Exp, &x, &c).unwrap();
        let em = elem(ElemFn::Exp, &(-x.clone()), &c).unwrap();
        let via_exp = (ep - em) / 2;
        assert!(agreement_digits(&direct, &via_exp, 50) >= 48);
    }

    #[test]
    fn sqrt_of_negative_is_domain_error() {
        let c = ctx(40);
        let r = elem(ElemFn::Sqrt, &c.int(-2), &c);
        assert!(matches!(r, Err(FdError::Domain(_))));
    }

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(20).is_err());
    }

    #[test]
    fn probe_of_deterministic_computation() {
        let f = |c: &PrecisionContext| -> Result<Real> {
            let x: Real = c.pi() / 7;
            Ok(x.clone().sin() * x.exp())
        };
        let agree = stability_probe(f, &ctx(300), &ctx(150)).unwrap();
        assert!(agree >= 140, "agreement {agree}");
    }

    #[test]
    fn probe_of_constant_is_full() {
        let one = |c: &PrecisionContext| -> Result<Real> { Ok(c.int(1)) };
        assert_eq!(stability_probe(one, &ctx(120), &ctx(60)).unwrap(), 60);
    }

    #[test]
    fn probe_flags_cancellation() {
        let f = |c: &PrecisionContext| -> Result<Real> {
            let tiny = c.pow10(-200);
            Ok((c.int(1) + tiny) - c.int(1))
        };
        let agree = stability_probe(f, &ctx(300), &ctx(100)).unwrap();
        assert!(agree < 10, "agreement {agree}");
    }

    #[test]
    fn pythagorean_identities() {
        let c = ctx(120);
        let tol = c.tolerance(5);
        for i in 0..=24 {
            let x = c.ratio(60 * i, 24);
            let (s, co) = (x.clone().sin(), x.clone().cos());
            let err = (s.clone() * &s + co.clone() * &co - 1u32).abs();
            assert!(err < tol);
            let (sh, ch) = (x.clone().sinh(), x.clone().cosh());
            let rel = ((ch.clone() * &ch - sh.clone() * &sh - 1u32) / (ch.clone() * &ch)).abs();
            assert!(rel < tol);
        }
    }

    #[test]
    fn formatting_styles() {
        let c = ctx(40);
        assert_eq!(format_real(&c.parse("2.8e-39").unwrap(), 2), "2.8e-39");
        assert_eq!(format_real(&c.parse("-0.02").unwrap(), 3), "-0.0200");
        assert_eq!(format_real(&c.int(1200), 2), "1200");
        assert_eq!(format_real(&c.parse("1.5e30").unwrap(), 3), "1.50e30");
    }

    #[test]
    fn parse_accepts_unicode_minus() {
        let c = ctx(40);
        assert_eq!(c.parse("\u{2212}0.5").unwrap(), -0.5);
        assert!(c.parse("abc").is_err());
    }
}
