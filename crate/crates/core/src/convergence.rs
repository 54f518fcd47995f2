//! A-priori convergence diagnostics: the contraction constant `M_n`, the ratio
//! `r_n = 4 M_n`, error bounds for rank `m`, and the Catalan majorant.

use rug::ops::Pow;
use rug::{Float, Integer};
use serde::Serialize;

use crate::error::{FdError, Result};
use crate::numerics::{format_real, PrecisionContext, Real};
use crate::problem::{omega, ProblemSpec};

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub n: u32,
    pub omega: Real,
    pub m_n: Real,
    pub r_n: Real,
    /// `omega * sqrt(2/X) * [(nπ/X)^2 + nπ/X + 1]`, shared by the eigenvalue bounds.
    pub lambda_scale: Real,
    ctx: PrecisionContext,
}

/// `M_n` for a given `omega`.
pub fn constant_mn(spec: &ProblemSpec, n: u32, omega: &Real) -> Result<Real> {
    if n < 1 {
        return Err(FdError::InvalidArgument("n must be at least 1".into()));
    }
    let ctx = spec.ctx();
    let x = spec.length();
    let pi = ctx.pi();
    let nr = ctx.int(n as i64);
    let x_over_pi = Float::with_val(ctx.bits(), x / &pi);
    let x2_over_pi2 = Float::with_val(ctx.bits(), x_over_pi.square_ref());
    let denom = ctx.int(2 * (n as i64) * (n as i64) - 2 * n as i64 + 1);
    let bracket = Float::with_val(ctx.bits(), &nr + &x_over_pi)
        + Float::with_val(ctx.bits(), &x2_over_pi2 / &nr);
    let sqrt_two_over_x = Float::with_val(ctx.bits(), ctx.int(2) / x).sqrt();
    let cap = if sqrt_two_over_x > 1 {
        sqrt_two_over_x
    } else {
        ctx.int(1)
    };
    Ok(x2_over_pi2 * omega / denom * bracket * cap)
}

impl ConvergenceReport {
    /// Report with `omega` computed from the potentials.
    pub fn new(spec: &ProblemSpec, n: u32) -> Result<Self> {
        Self::with_omega(spec, n, omega(spec))
    }

    /// Report with a caller-supplied `omega`.
    pub fn with_omega(spec: &ProblemSpec, n: u32, omega: Real) -> Result<Self> {
        if omega < 0 {
            return Err(FdError::InvalidArgument("omega must be nonnegative".into()));
        }
        let ctx = spec.ctx();
        let m_n = constant_mn(spec, n, &omega)?;
        let r_n = Float::with_val(ctx.bits(), &m_n * 4u32);
        let k = spec.wave(n);
        let sqrt_two_over_x = Float::with_val(ctx.bits(), ctx.int(2) / spec.length()).sqrt();
        let poly = Float::with_val(ctx.bits(), k.square_ref()) + &k + 1u32;
        let lambda_scale = Float::with_val(ctx.bits(), &omega * &sqrt_two_over_x) * poly;
        Ok(Self {
            n,
            omega,
            m_n,
            r_n,
            lambda_scale,
            ctx,
        })
    }

    /// Whether the sufficient condition `r_n < 1` holds.
    pub fn converges(&self) -> bool {
        self.r_n < 1
    }

    fn require_convergent(&self) -> Result<()> {
        if self.converges() {
            Ok(())
        } else {
            Err(FdError::BoundNotApplicable {
                rn: format_real(&self.r_n, 6),
            })
        }
    }

    /// Bound on `|λ_n − λ_n^m|`, for `m >= 1`.
    pub fn lambda_bound(&self, m: usize) -> Result<Real> {
        self.require_convergent()?;
        if m == 0 {
            return Err(FdError::InvalidArgument(
                "eigenvalue bound needs m >= 1".into(),
            ));
        }
        let bits = self.ctx.bits();
        let rm = Float::with_val(bits, (&self.r_n).pow(m as u32));
        let one_minus = Float::with_val(bits, 1u32 - &self.r_n);
        let root = Float::with_val(bits, self.ctx.pi() * m as u32).sqrt();
        Ok(Float::with_val(bits, &self.lambda_scale * rm) / one_minus / (m as u32 + 1) / root)
    }

    /// Bound on the eigenfunction error in the closed form `r^{m+1} / ((m+2) sqrt(π(m+1)))`.
    ///
    /// This drops the `1/(1 − r_n)` factor of the summed series, so it is not a
    /// guaranteed bound; see [`Self::u_bound_sound`].
    pub fn u_bound(&self, m: usize) -> Result<Real> {
        self.require_convergent()?;
        let bits = self.ctx.bits();
        let r = Float::with_val(bits, (&self.r_n).pow(m as u32 + 1));
        let root = Float::with_val(bits, self.ctx.pi() * (m as u32 + 1)).sqrt();
        Ok(r / (m as u32 + 2) / root)
    }

    /// `2 r^{m+1} / (1 − r) * (2m+1)!! / (2m+4)!!`.
    pub fn u_bound_sound(&self, m: usize) -> Result<Real> {
        self.require_convergent()?;
        let bits = self.ctx.bits();
        let r = Float::with_val(bits, (&self.r_n).pow(m as u32 + 1));
        let one_minus = Float::with_val(bits, 1u32 - &self.r_n);
        let ratio = double_factorial_ratio(2 * m as u32 + 1, 2 * m as u32 + 4, bits);
        Ok(r * 2u32 / one_minus * ratio)
    }

    /// Envelope for `|λ^{(j+1)}|`: `scale * r^j * 2 (2j−1)!! / (2j+2)!!`.
    pub fn lambda_envelope(&self, j: usize) -> Real {
        let bits = self.ctx.bits();
        let r = Float::with_val(bits, (&self.r_n).pow(j as u32));
        let top = if j == 0 { 1 } else { 2 * j as u32 - 1 };
        let ratio = double_factorial_ratio(top, 2 * j as u32 + 2, bits);
        Float::with_val(bits, &self.lambda_scale * r) * ratio * 2u32
    }

    pub fn record(&self, m: Option<usize>, digits: usize) -> ConvergenceRecord {
        let s = |v: &Real| format_real(v, digits);
        let bound = |b: Result<Real>| b.ok().map(|v| s(&v));
        ConvergenceRecord {
            n: self.n,
            omega: s(&self.omega),
            m_n: s(&self.m_n),
            r_n: s(&self.r_n),
            sufficient_condition: self.converges(),
            m,
            lambda_bound: m.and_then(|m| bound(self.lambda_bound(m))),
            u_bound: m.and_then(|m| bound(self.u_bound(m))),
            u_bound_sound: m.and_then(|m| bound(self.u_bound_sound(m))),
        }
    }
}

/// Decimal-string view of a [`ConvergenceReport`].
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRecord {
    pub n: u32,
    pub omega: String,
    pub m_n: String,
    pub r_n: String,
    pub sufficient_condition: bool,
    pub m: Option<usize>,
    pub lambda_bound: Option<String>,
    pub u_bound: Option<String>,
    pub u_bound_sound: Option<String>,
}

/// Both bounds for rank `m >= 1`: `(eigenvalue, eigenfunction)`.
pub fn error_bounds(report: &ConvergenceReport, m: usize) -> Result<(Real, Real)> {
    Ok((report.lambda_bound(m)?, report.u_bound(m)?))
}

fn double_factorial_ratio(num: u32, den: u32, bits: u32) -> Real {
    let a = Integer::from(Integer::factorial_2(num));
    let b = Integer::from(Integer::factorial_2(den));
    Float::with_val(bits, &a) / Float::with_val(bits, &b)
}

/// Majorant `Ū_{j+1} = (2j+2)! / ((j+1)! (j+2)!)`.
pub fn majorant(j: usize) -> Integer {
    let j = j as u32;
    let num = Integer::from(Integer::factorial(2 * j + 2));
    let den = Integer::from(Integer::factorial(j + 1)) * Integer::from(Integer::factorial(j + 2));
    num / den
}
