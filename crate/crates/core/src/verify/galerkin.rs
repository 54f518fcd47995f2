//! Sine-basis Galerkin discretization used as an independent eigenvalue oracle.
//!
//! With `phi_p = sin(p pi x / X)`, the matrix entries
//! `A[p][q] = (p pi/X)^4 delta_pq + (2/X) int (q2 phi_p'' + q1 phi_p' + q0 phi_p) phi_q`
//! reduce by product-to-sum identities to the integrals
//! `C_l(k) = int x^l cos(k pi x/X)` and `S_l(k) = int x^l sin(k pi x/X)`.

use rug::ops::Pow;
use rug::Float;

use crate::error::{FdError, Result};
use crate::numerics::{format_real, PrecisionContext, Real};
use crate::problem::ProblemSpec;

/// Default decimal precision of oracle arithmetic.
pub const ORACLE_DIGITS: u32 = 50;
const MAX_ITERATIONS: usize = 60;

#[derive(Clone, Debug)]
pub struct GalerkinOracle {
    pub size: usize,
    /// Row `p-1`, column `q-1` holds `A[p][q]`.
    pub matrix: Vec<Vec<Real>>,
    ctx: PrecisionContext,
}

/// `C_l(k)` and `S_l(k)` for `k = 0..=kmax`, `l = 0..=lmax`.
fn power_trig_integrals(
    length: &Real,
    kmax: usize,
    lmax: usize,
    ctx: &PrecisionContext,
) -> (Vec<Vec<Real>>, Vec<Vec<Real>>) {
    let prec = ctx.bits();
    let mut cos_tab = Vec::with_capacity(kmax + 1);
    let mut sin_tab = Vec::with_capacity(kmax + 1);
    let x_pows: Vec<Real> = (0..=lmax + 1)
        .map(|l| Float::with_val(prec, length.pow(l as u32)))
        .collect();
    for k in 0..=kmax {
        let mut cs = Vec::with_capacity(lmax + 1);
        let mut ss = Vec::with_capacity(lmax + 1);
        if k == 0 {
            for l in 0..=lmax {
                cs.push(Float::with_val(prec, &x_pows[l + 1] / (l as u32 + 1)));
                ss.push(ctx.zero());
            }
        } else {
            let w = ctx.pi() * k as u32 / length;
            let sign = if k % 2 == 0 { 1 } else { -1 };
            for l in 0..=lmax {
                let c = if l == 0 {
                    ctx.zero()
                } else {
                    -Float::with_val(prec, &ss[l - 1] * l as u32) / &w
                };
                let mut s = -Float::with_val(prec, &x_pows[l] * sign);
                if l == 0 {
                    s += 1u32;
                } else {
                    s += Float::with_val(prec, &cs[l - 1] * l as u32);
                }
                let s = s / &w;
                cs.push(c);
                ss.push(s);
            }
        }
        cos_tab.push(cs);
        sin_tab.push(ss);
    }
    (cos_tab, sin_tab)
}

fn signed(tab: &[Vec<Real>], k: i64, l: usize, odd: bool) -> Real {
    let v = &tab[k.unsigned_abs() as usize][l];
    if odd && k < 0 {
        -v.clone()
    } else {
        v.clone()
    }
}

impl GalerkinOracle {
    pub fn assemble(spec: &ProblemSpec, size: usize, ctx: PrecisionContext) -> Result<Self> {
        if size < 20 {
            return Err(FdError::InvalidArgument(format!(
                "oracle basis size must be at least 20, got {size}"
            )));
        }
        let spec = spec.with_ctx(ctx);
        let prec = ctx.bits();
        let length = spec.length().clone();
        let lmax = spec.budget().r;
        let (ctab, stab) = power_trig_integrals(&length, 2 * size, lmax, &ctx);
        let coef = |p: &crate::problem::Polynomial, l: usize| {
            p.coeff(l).cloned().unwrap_or_else(|| ctx.zero())
        };
        let scale = Float::with_val(prec, 2u32) / &length;
        let base_wave = ctx.pi() / &length;
        let mut matrix = vec![vec![ctx.zero(); size]; size];
        for p in 1..=size {
            let wp = Float::with_val(prec, &base_wave * p as u32);
            let wp2 = Float::with_val(prec, wp.square_ref());
            for q in 1..=size {
                let (pi, qi) = (p as i64, q as i64);
                let mut acc = ctx.zero();
                for l in 0..=lmax {
                    let sin_sin = (signed(&ctab, pi - qi, l, false)
                        - signed(&ctab, pi + qi, l, false))
                        / 2u32;
                    let cos_sin =
                        (signed(&stab, qi + pi, l, true) + signed(&stab, qi - pi, l, true)) / 2u32;
                    let even =
                        coef(spec.q0(), l) - Float::with_val(prec, &wp2 * &coef(spec.q2(), l));
                    acc += even * sin_sin;
                    acc += Float::with_val(prec, &wp * &coef(spec.q1(), l)) * cos_sin;
                }
                let mut entry = acc * &scale;
                if p == q {
                    entry += Float::with_val(prec, wp2.square_ref());
                }
                matrix[p - 1][q - 1] = entry;
            }
        }
        Ok(Self { size, matrix, ctx })
    }

    /// LU factorization of `A - shift I` with partial pivoting.
    fn factor(&self, shift: &Real) -> Result<(Vec<Vec<Real>>, Vec<usize>)> {
        let n = self.size;
        let prec = self.ctx.bits();
        let mut lu = self.matrix.clone();
        for (i, row) in lu.iter_mut().enumerate() {
            row[i] -= shift;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| {
                    lu[a][col]
                        .clone()
                        .abs()
                        .partial_cmp(&lu[b][col].clone().abs())
                        .unwrap()
                })
                .unwrap();
            if lu[pivot][col].is_zero() {
                return Err(FdError::Singular(col));
            }
            lu.swap(col, pivot);
            perm.swap(col, pivot);
            let (upper, lower) = lu.split_at_mut(col + 1);
            let prow = &upper[col];
            for row in lower.iter_mut() {
                let factor = Float::with_val(prec, &row[col] / &prow[col]);
                for k in col + 1..n {
                    row[k] -= Float::with_val(prec, &factor * &prow[k]);
                }
                row[col] = factor;
            }
        }
        Ok((lu, perm))
    }

    fn solve_factored(lu: &[Vec<Real>], perm: &[usize], rhs: &[Real]) -> Vec<Real> {
        let n = lu.len();
        let mut y: Vec<Real> = perm.iter().map(|&i| rhs[i].clone()).collect();
        for i in 0..n {
            for k in 0..i {
                let t = Float::with_val(y[i].prec(), &lu[i][k] * &y[k]);
                y[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = Float::with_val(y[i].prec(), &lu[i][k] * &y[k]);
                y[i] -= t;
            }
            y[i] /= &lu[i][i];
        }
        y
    }

    /// Eigenvalue nearest to `shift`, by shifted inverse iteration.
    pub fn nearest_eigenvalue(&self, shift: &Real) -> Result<Real> {
        let mut shift = self.ctx.round(shift);
        let prec = self.ctx.bits();
        let (lu, perm) = match self.factor(&shift) {
            Ok(f) => f,
            Err(FdError::Singular(_)) => {
                // shift is an eigenvalue to working precision; step off it
                let scale = shift.clone().abs().max(&Float::with_val(prec, 1));
                shift += self.ctx.pow10(-(self.ctx.digits() as i32) / 2) * scale;
                self.factor(&shift)?
            }
            Err(e) => return Err(e),
        };
        let n = self.size;
        let norm = |v: &[Real]| {
            v.iter()
                .fold(Float::with_val(prec, 0), |acc, x| acc + x.clone().square())
                .sqrt()
        };
        let mut v: Vec<Real> = (0..n)
            .map(|i| Float::with_val(prec, 1u32) / (i as u32 + 1))
            .collect();
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= &nv);
        let tol = self.ctx.pow10(-(self.ctx.digits() as i32) + 10);
        let mut estimate: Option<Real> = None;
        let mut change = Float::with_val(prec, 1);
        for _ in 0..MAX_ITERATIONS {
            let w = Self::solve_factored(&lu, &perm, &v);
            let dot = v
                .iter()
                .zip(&w)
                .fold(Float::with_val(prec, 0), |acc, (a, b)| {
                    acc + Float::with_val(prec, a * b)
                });
            let next = Float::with_val(prec, &shift + dot.recip());
            let nw = norm(&w);
            v = w.into_iter().map(|x| x / &nw).collect();
            if let Some(prev) = &estimate {
                change = Float::with_val(prec, &next - prev).abs();
                if change <= Float::with_val(prec, &tol * next.clone().abs()) {
                    return Ok(next);
                }
            }
            estimate = Some(next);
        }
        Err(FdError::NotConverged {
            what: "inverse iteration",
            iterations: MAX_ITERATIONS,
            residual: format_real(&change, 3),
        })
    }
}

/// Eigenvalue of the `size`-term sine-Galerkin matrix nearest to `shift`,
/// computed at [`ORACLE_DIGITS`] digits.
pub fn galerkin_nearest_eigenvalue(spec: &ProblemSpec, shift: &Real, size: usize) -> Result<Real> {
    let ctx = PrecisionContext::new(ORACLE_DIGITS)?;
    GalerkinOracle::assemble(spec, size, ctx)?.nearest_eigenvalue(shift)
}
