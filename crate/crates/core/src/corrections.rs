//! Corrections in the mixed polynomial–trigonometric–hyperbolic basis.
//!
//! A correction of step `j` is
//!
//! ```text
//! sum_p x^p (b_p cos kx + a_p sin kx) + sum_p x^p (d_p cosh kx + c_p sinh kx)
//! ```
//!
//! with `k = n pi / X`. Differentiation maps this form onto itself without
//! raising any polynomial degree, so all derivatives are exact coefficient
//! transforms.

use rug::Float;
use serde::Serialize;

use crate::error::{FdError, Result};
use crate::numerics::{format_real, Real};
use crate::problem::{Polynomial, ProblemSpec};

/// Polynomial coefficients of the four basis families sharing one wave number.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub cos: Vec<Real>,
    pub sin: Vec<Real>,
    pub cosh: Vec<Real>,
    pub sinh: Vec<Real>,
}

fn pad(v: &mut Vec<Real>, len: usize, prec: u32) {
    while v.len() < len {
        v.push(Float::with_val(prec, 0));
    }
}

fn poly_at(coeffs: &[Real], x: &Real, prec: u32) -> Real {
    let mut acc = Float::with_val(prec, 0);
    for c in coeffs.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

fn poly_abs_at(coeffs: &[Real], x: &Real, prec: u32) -> Real {
    let ax = Float::with_val(prec, x.abs_ref());
    let mut acc = Float::with_val(prec, 0);
    for c in coeffs.iter().rev() {
        acc *= &ax;
        acc += c.clone().abs();
    }
    acc
}

/// Values of `cos, sin, cosh, sinh` at `k x`.
struct BasisValues {
    cos: Real,
    sin: Real,
    cosh: Real,
    sinh: Real,
}

impl BasisValues {
    fn at(wave: &Real, x: &Real, prec: u32) -> Self {
        let arg = Float::with_val(prec, wave * x);
        let (sin, cos) = arg.clone().sin_cos(Float::new(prec));
        let (sinh, cosh) = arg.sinh_cosh(Float::new(prec));
        Self {
            cos,
            sin,
            cosh,
            sinh,
        }
    }
}

impl Expansion {
    /// Builds an expansion; cos/sin and cosh/sinh lists are padded to equal length.
    pub fn new(
        mut cos: Vec<Real>,
        mut sin: Vec<Real>,
        mut cosh: Vec<Real>,
        mut sinh: Vec<Real>,
        prec: u32,
    ) -> Self {
        let trig = cos.len().max(sin.len());
        pad(&mut cos, trig, prec);
        pad(&mut sin, trig, prec);
        let hyp = cosh.len().max(sinh.len());
        pad(&mut cosh, hyp, prec);
        pad(&mut sinh, hyp, prec);
        Self {
            cos,
            sin,
            cosh,
            sinh,
        }
    }

    pub fn zero() -> Self {
        Self {
            cos: Vec::new(),
            sin: Vec::new(),
            cosh: Vec::new(),
            sinh: Vec::new(),
        }
    }

    fn prec(&self) -> Option<u32> {
        self.cos
            .first()
            .or(self.sin.first())
            .or(self.cosh.first())
            .or(self.sinh.first())
            .map(|c| c.prec())
    }

    /// Exact derivative.
    pub fn derivative(&self, wave: &Real) -> Expansion {
        let Some(prec) = self.prec() else {
            return Self::zero();
        };
        let shifted = |v: &[Real], p: usize| -> Real {
            v.get(p + 1)
                .map(|c| Float::with_val(prec, c * (p as u32 + 1)))
                .unwrap_or_else(|| Float::with_val(prec, 0))
        };
        let trig = self.cos.len();
        let mut cos = Vec::with_capacity(trig);
        let mut sin = Vec::with_capacity(trig);
        for p in 0..trig {
            cos.push(shifted(&self.cos, p) + Float::with_val(prec, wave * &self.sin[p]));
            sin.push(shifted(&self.sin, p) - Float::with_val(prec, wave * &self.cos[p]));
        }
        let hyp = self.cosh.len();
        let mut cosh = Vec::with_capacity(hyp);
        let mut sinh = Vec::with_capacity(hyp);
        for p in 0..hyp {
            cosh.push(shifted(&self.cosh, p) + Float::with_val(prec, wave * &self.sinh[p]));
            sinh.push(shifted(&self.sinh, p) + Float::with_val(prec, wave * &self.cosh[p]));
        }
        Self {
            cos,
            sin,
            cosh,
            sinh,
        }
    }

    pub fn nth_derivative(&self, wave: &Real, order: usize) -> Expansion {
        (0..order).fold(self.clone(), |acc, _| acc.derivative(wave))
    }

    pub fn eval(&self, wave: &Real, x: &Real) -> Real {
        let Some(prec) = self.prec() else {
            return Float::with_val(x.prec(), 0);
        };
        let basis = BasisValues::at(wave, x, prec);
        let mut total = poly_at(&self.cos, x, prec) * &basis.cos;
        total += poly_at(&self.sin, x, prec) * &basis.sin;
        if !self.cosh.is_empty() {
            total += poly_at(&self.cosh, x, prec) * &basis.cosh;
            total += poly_at(&self.sinh, x, prec) * &basis.sinh;
        }
        total
    }

    /// Sum of the magnitudes of all terms at `x`; the natural scale against
    /// which rounding in [`Expansion::eval`] should be judged.
    pub fn magnitude(&self, wave: &Real, x: &Real) -> Real {
        let Some(prec) = self.prec() else {
            return Float::with_val(x.prec(), 0);
        };
        let basis = BasisValues::at(wave, x, prec);
        let mut total = poly_abs_at(&self.cos, x, prec) * basis.cos.abs();
        total += poly_abs_at(&self.sin, x, prec) * basis.sin.abs();
        if !self.cosh.is_empty() {
            total += poly_abs_at(&self.cosh, x, prec) * basis.cosh.abs();
            total += poly_abs_at(&self.sinh, x, prec) * basis.sinh.abs();
        }
        total
    }

    /// Product with a polynomial (family by family).
    pub fn mul_poly(&self, q: &Polynomial) -> Expansion {
        let Some(prec) = self.prec() else {
            return Self::zero();
        };
        let conv = |v: &[Real]| -> Vec<Real> {
            if v.is_empty() {
                return Vec::new();
            }
            let mut out = vec![Float::with_val(prec, 0); v.len() + q.degree()];
            for (p, c) in v.iter().enumerate() {
                for (l, ql) in q.coeffs().iter().enumerate() {
                    out[p + l] += Float::with_val(prec, c * ql);
                }
            }
            out
        };
        Self {
            cos: conv(&self.cos),
            sin: conv(&self.sin),
            cosh: conv(&self.cosh),
            sinh: conv(&self.sinh),
        }
    }

    pub fn scaled(&self, factor: &Real) -> Expansion {
        let s = |v: &[Real]| -> Vec<Real> {
            v.iter()
                .map(|c| Float::with_val(c.prec(), c * factor))
                .collect()
        };
        Self {
            cos: s(&self.cos),
            sin: s(&self.sin),
            cosh: s(&self.cosh),
            sinh: s(&self.sinh),
        }
    }

    pub fn add(&self, other: &Expansion) -> Expansion {
        let Some(prec) = self.prec().or(other.prec()) else {
            return Self::zero();
        };
        let sum = |a: &[Real], b: &[Real]| -> Vec<Real> {
            (0..a.len().max(b.len()))
                .map(|i| {
                    let mut v = Float::with_val(prec, 0);
                    if let Some(x) = a.get(i) {
                        v += x;
                    }
                    if let Some(x) = b.get(i) {
                        v += x;
                    }
                    v
                })
                .collect()
        };
        Self {
            cos: sum(&self.cos, &other.cos),
            sin: sum(&self.sin, &other.sin),
            cosh: sum(&self.cosh, &other.cosh),
            sinh: sum(&self.sinh, &other.sinh),
        }
    }

    pub fn sub(&self, other: &Expansion) -> Expansion {
        let Some(prec) = self.prec().or(other.prec()) else {
            return Self::zero();
        };
        self.add(&other.scaled(&Float::with_val(prec, -1)))
    }

    /// Applies `v -> q2 v'' + q1 v' + q0 v`.
    pub fn apply_potentials(&self, spec: &ProblemSpec, wave: &Real) -> Expansion {
        let d1 = self.derivative(wave);
        let d2 = d1.derivative(wave);
        d2.mul_poly(spec.q2())
            .add(&d1.mul_poly(spec.q1()))
            .add(&self.mul_poly(spec.q0()))
    }

    /// Largest coefficient magnitude across all families.
    pub fn max_coeff(&self) -> Option<Real> {
        self.cos
            .iter()
            .chain(&self.sin)
            .chain(&self.cosh)
            .chain(&self.sinh)
            .map(|c| c.clone().abs())
            .reduce(|a, b| if b > a { b } else { a })
    }
}

/// Coefficients `a, b` (sin, cos) and `c, d` (sinh, cosh) of one correction.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionTerm {
    pub n: u32,
    pub j: usize,
    pub length: Real,
    pub wave: Real,
    pub a: Vec<Real>,
    pub b: Vec<Real>,
    pub c: Vec<Real>,
    pub d: Vec<Real>,
}

impl CorrectionTerm {
    pub fn expansion(&self) -> Expansion {
        Expansion {
            cos: self.b.clone(),
            sin: self.a.clone(),
            cosh: self.d.clone(),
            sinh: self.c.clone(),
        }
    }

    pub fn eval(&self, x: &Real, deriv: usize) -> Result<Real> {
        eval_term(self, x, deriv)
    }
}

/// `u^(0)(x) = sqrt(2/X) sin(n pi x / X)` and `lambda^(0) = (n pi / X)^4`.
pub fn base_pair(spec: &ProblemSpec, n: u32) -> Result<(CorrectionTerm, Real)> {
    if n < 1 {
        return Err(FdError::InvalidArgument(
            "eigenpair index n must be at least 1".into(),
        ));
    }
    let ctx = spec.ctx();
    let wave = spec.wave(n);
    let amplitude = (ctx.int(2) / spec.length()).sqrt();
    let lambda0 = Float::with_val(ctx.bits(), wave.clone().square().square_ref());
    let term = CorrectionTerm {
        n,
        j: 0,
        length: spec.length().clone(),
        wave,
        a: vec![amplitude],
        b: vec![ctx.zero()],
        c: Vec::new(),
        d: Vec::new(),
    };
    Ok((term, lambda0))
}

/// Derivative of order `deriv` (0..=4) of a correction at `x` in `[0, X]`.
pub fn eval_term(term: &CorrectionTerm, x: &Real, deriv: usize) -> Result<Real> {
    if deriv > 4 {
        return Err(FdError::InvalidArgument(format!(
            "derivative order {deriv} exceeds 4"
        )));
    }
    if *x < 0 || *x > term.length {
        return Err(FdError::InvalidArgument(format!(
            "x = {} lies outside [0, X]",
            x.to_string_radix(10, Some(20))
        )));
    }
    Ok(term
        .expansion()
        .nth_derivative(&term.wave, deriv)
        .eval(&term.wave, x))
}

/// Rank-`m` approximation and the data it was assembled from.
#[derive(Clone, Debug)]
pub struct FDSolution {
    pub n: u32,
    pub m: usize,
    pub lambda0: Real,
    pub lambda_corrections: Vec<Real>,
    pub terms: Vec<CorrectionTerm>,
    pub lambda_approx: Real,
    /// Non-fatal observations made while solving.
    pub notes: Vec<String>,
}

impl FDSolution {
    pub fn wave(&self) -> &Real {
        &self.terms[0].wave
    }

    pub fn length(&self) -> &Real {
        &self.terms[0].length
    }

    /// Eigenvalue approximation of a lower rank `k <= m`.
    pub fn lambda_at_rank(&self, k: usize) -> Real {
        let mut acc = self.lambda0.clone();
        for l in self.lambda_corrections.iter().take(k) {
            acc += l;
        }
        acc
    }

    /// Sum of the correction expansions of steps `0..=k`.
    pub fn expansion_at_rank(&self, k: usize) -> Expansion {
        self.terms
            .iter()
            .take(k + 1)
            .fold(Expansion::zero(), |acc, t| acc.add(&t.expansion()))
    }

    /// Approximate eigenfunction (or a derivative) at `x`.
    pub fn eigenfunction(&self, x: &Real, deriv: usize) -> Result<Real> {
        let mut acc = Float::with_val(self.lambda0.prec(), 0);
        for t in &self.terms {
            acc += eval_term(t, x, deriv)?;
        }
        Ok(acc)
    }

    /// Rank truncated to `k <= m`.
    pub fn truncated(&self, k: usize) -> Result<FDSolution> {
        assemble(self.terms.clone(), &self.lambda_corrections, k)
    }

    pub fn record(&self, digits: usize) -> SolutionRecord {
        let s = |v: &Real| format_real(v, digits);
        SolutionRecord {
            n: self.n,
            m: self.m,
            lambda0: s(&self.lambda0),
            lambda_corrections: self.lambda_corrections.iter().map(s).collect(),
            lambda_approx: s(&self.lambda_approx),
            terms: self
                .terms
                .iter()
                .map(|t| TermRecord {
                    j: t.j,
                    a: t.a.iter().map(s).collect(),
                    b: t.b.iter().map(s).collect(),
                    c: t.c.iter().map(s).collect(),
                    d: t.d.iter().map(s).collect(),
                })
                .collect(),
            notes: self.notes.clone(),
        }
    }
}

/// Serializable view of an [`FDSolution`] with reals as decimal strings.
#[derive(Clone, Debug, Serialize)]
pub struct SolutionRecord {
    pub n: u32,
    pub m: usize,
    pub lambda0: String,
    pub lambda_corrections: Vec<String>,
    pub lambda_approx: String,
    pub terms: Vec<TermRecord>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TermRecord {
    pub j: usize,
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub c: Vec<String>,
    pub d: Vec<String>,
}

/// Partial sums of rank `m` from correction terms `0..=m` and eigenvalue
/// corrections `1..=m`.
pub fn assemble(
    terms: Vec<CorrectionTerm>,
    lambda_corrections: &[Real],
    m: usize,
) -> Result<FDSolution> {
    if terms.len() < m + 1 || lambda_corrections.len() < m {
        return Err(FdError::MissingHistory(format!(
            "rank {m} needs {} terms and {m} eigenvalue corrections, got {} and {}",
            m + 1,
            terms.len(),
            lambda_corrections.len()
        )));
    }
    let base = &terms[0];
    let prec = base.wave.prec();
    let lambda0 = Float::with_val(prec, base.wave.clone().square().square_ref());
    let mut lambda_approx = lambda0.clone();
    for l in &lambda_corrections[..m] {
        lambda_approx += l;
    }
    Ok(FDSolution {
        n: base.n,
        m,
        lambda0,
        lambda_corrections: lambda_corrections[..m].to_vec(),
        terms: terms.into_iter().take(m + 1).collect(),
        lambda_approx,
        notes: Vec::new(),
    })
}
