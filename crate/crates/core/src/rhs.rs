//! Right-hand side of the step-`(j+1)` correction problem, grouped by basis
//! family:
//!
//! ```text
//! F(x) = sum_p x^p (f_cos[p] cos kx + f_sin[p] sin kx)
//!      + sum_p x^p (f_cosh[p] cosh kx + f_sinh[p] sinh kx)
//! ```
//!
//! where `F = sum_{s=0}^{j} lambda^(j+1-s) u^(s) - (q2 u^(j)'' + q1 u^(j)' + q0 u^(j))`.

use rug::Float;

use crate::corrections::Expansion;
use crate::error::{FdError, Result};
use crate::numerics::Real;
use crate::problem::{Polynomial, ProblemSpec};
use crate::spectral::History;

/// Coefficient lists of the four families; trigonometric ones have length
/// `M(j+1)`, hyperbolic ones `M(j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RhsCoefficients {
    pub n: u32,
    pub j: usize,
    pub wave: Real,
    pub cos: Vec<Real>,
    pub sin: Vec<Real>,
    pub cosh: Vec<Real>,
    pub sinh: Vec<Real>,
}

impl RhsCoefficients {
    pub fn expansion(&self) -> Expansion {
        Expansion {
            cos: self.cos.clone(),
            sin: self.sin.clone(),
            cosh: self.cosh.clone(),
            sinh: self.sinh.clone(),
        }
    }

    pub fn eval(&self, x: &Real) -> Real {
        self.expansion().eval(&self.wave, x)
    }
}

fn coef(p: &Polynomial, l: usize, prec: u32) -> Real {
    p.coeff(l)
        .cloned()
        .unwrap_or_else(|| Float::with_val(prec, 0))
}

fn at(v: &[Real], i: i64, prec: u32) -> Real {
    if i < 0 {
        return Float::with_val(prec, 0);
    }
    v.get(i as usize)
        .cloned()
        .unwrap_or_else(|| Float::with_val(prec, 0))
}

/// Smallest integer `>= t / d`.
fn ceil_div(t: i64, d: i64) -> i64 {
    (t + d - 1).div_euclid(d)
}

/// Builds the step-`(j+1)` right-hand side from `history`, which must hold
/// correction terms `0..=j` and eigenvalue corrections `1..=j+1`.
pub fn build_rhs(
    spec: &ProblemSpec,
    n: u32,
    j: usize,
    history: &History,
) -> Result<RhsCoefficients> {
    if history.terms().len() < j + 1 || history.lambdas().len() < j + 2 {
        return Err(FdError::MissingHistory(format!(
            "step {} needs terms 0..={j} and eigenvalue corrections up to {}, history has {} terms and {} eigenvalues",
            j + 1,
            j + 1,
            history.terms().len(),
            history.lambdas().len()
        )));
    }
    let ctx = spec.ctx();
    let prec = ctx.bits();
    let budget = spec.budget();
    let r = budget.r as i64;
    let m_j = budget.top(j) as i64;
    let m_next = budget.top(j + 1) as i64;
    let wave = spec.wave(n);
    let wave2 = Float::with_val(prec, wave.square_ref());
    let two_wave = Float::with_val(prec, &wave * 2u32);
    let lambdas = history.lambdas();
    let terms = history.terms();
    let cur = &terms[j];

    let big_a = |l: i64| coef(spec.q0(), l as usize, prec);
    let big_b = |l: i64| coef(spec.q1(), l as usize, prec);
    let big_c = |l: i64| coef(spec.q2(), l as usize, prec);
    // -A_l + C_l k^2 and A_l + C_l k^2
    let trig_mix = |l: i64| Float::with_val(prec, &big_c(l) * &wave2) - big_a(l);
    let hyp_mix = |l: i64| Float::with_val(prec, &big_c(l) * &wave2) + big_a(l);

    let mut cos = vec![ctx.zero(); m_next as usize];
    let mut sin = vec![ctx.zero(); m_next as usize];
    for t in 0..m_next {
        let (fc, fs) = (&mut cos[t as usize], &mut sin[t as usize]);
        if t <= m_j {
            for s in ceil_div(t, r + 1)..=(j as i64) {
                let lam = &lambdas[j + 1 - s as usize];
                let term = &terms[s as usize];
                *fc += Float::with_val(prec, lam * &at(&term.b, t, prec));
                *fs += Float::with_val(prec, lam * &at(&term.a, t, prec));
            }
        }
        for l in (t - m_j).max(0)..=r.min(t) {
            let (b, a) = (at(&cur.b, t - l, prec), at(&cur.a, t - l, prec));
            let mix = trig_mix(l);
            let bk = Float::with_val(prec, &big_b(l) * &wave);
            *fc += Float::with_val(prec, &b * &mix) - Float::with_val(prec, &a * &bk);
            *fs += Float::with_val(prec, &a * &mix) + Float::with_val(prec, &b * &bk);
        }
        if t <= m_next - 2 {
            for l in (t - m_j + 1).max(0)..=r.min(t) {
                let (b, a) = (at(&cur.b, t - l + 1, prec), at(&cur.a, t - l + 1, prec));
                let w = (t - l + 1) as i32;
                let c2k = Float::with_val(prec, &big_c(l) * &two_wave);
                let bl = big_b(l);
                *fc -= (Float::with_val(prec, &b * &bl) + Float::with_val(prec, &a * &c2k)) * w;
                *fs -= (Float::with_val(prec, &a * &bl) - Float::with_val(prec, &b * &c2k)) * w;
            }
        }
        if t <= m_next - 3 {
            for l in (t - m_j + 2).max(0)..=r.min(t) {
                let w = ((t - l + 2) * (t - l + 1)) as i32;
                let cl = big_c(l);
                *fc -= Float::with_val(prec, &at(&cur.b, t - l + 2, prec) * &cl) * w;
                *fs -= Float::with_val(prec, &at(&cur.a, t - l + 2, prec) * &cl) * w;
            }
        }
    }

    let mut cosh = vec![ctx.zero(); m_j as usize];
    let mut sinh = vec![ctx.zero(); m_j as usize];
    if j >= 1 {
        let m_prev = budget.top(j - 1) as i64;
        for t in 0..m_j {
            let (fh, fsh) = (&mut cosh[t as usize], &mut sinh[t as usize]);
            if t <= m_prev {
                for s in (ceil_div(t, r + 1) + 1)..=(j as i64) {
                    let lam = &lambdas[j + 1 - s as usize];
                    let term = &terms[s as usize];
                    *fh += Float::with_val(prec, lam * &at(&term.d, t, prec));
                    *fsh += Float::with_val(prec, lam * &at(&term.c, t, prec));
                }
            }
            for l in (t - m_prev).max(0)..=r.min(t) {
                let (d, c) = (at(&cur.d, t - l, prec), at(&cur.c, t - l, prec));
                let mix = hyp_mix(l);
                let bk = Float::with_val(prec, &big_b(l) * &wave);
                *fh -= Float::with_val(prec, &d * &mix) + Float::with_val(prec, &c * &bk);
                *fsh -= Float::with_val(prec, &c * &mix) + Float::with_val(prec, &d * &bk);
            }
            if t <= m_j - 2 {
                for l in (t - m_prev + 1).max(0)..=r.min(t) {
                    let (d, c) = (at(&cur.d, t - l + 1, prec), at(&cur.c, t - l + 1, prec));
                    let w = (t - l + 1) as i32;
                    let c2k = Float::with_val(prec, &big_c(l) * &two_wave);
                    let bl = big_b(l);
                    *fh -= (Float::with_val(prec, &d * &bl) + Float::with_val(prec, &c * &c2k)) * w;
                    *fsh -=
                        (Float::with_val(prec, &c * &bl) + Float::with_val(prec, &d * &c2k)) * w;
                }
            }
            if t <= m_j - 3 {
                for l in (t - m_prev + 2).max(0)..=r.min(t) {
                    let w = ((t - l + 2) * (t - l + 1)) as i32;
                    let cl = big_c(l);
                    *fh -= Float::with_val(prec, &at(&cur.d, t - l + 2, prec) * &cl) * w;
                    *fsh -= Float::with_val(prec, &at(&cur.c, t - l + 2, prec) * &cl) * w;
                }
            }
        }
    }

    Ok(RhsCoefficients {
        n,
        j,
        wave,
        cos,
        sin,
        cosh,
        sinh,
    })
}

/// The same right-hand side assembled by expansion algebra instead of the
/// grouped index sums; used to cross-check [`build_rhs`].
pub fn rhs_by_expansion(spec: &ProblemSpec, j: usize, history: &History) -> Result<Expansion> {
    if history.terms().len() < j + 1 || history.lambdas().len() < j + 2 {
        return Err(FdError::MissingHistory(format!(
            "step {} is not available",
            j + 1
        )));
    }
    let terms = history.terms();
    let wave = &terms[0].wave;
    let mut acc = Expansion::zero();
    for s in 0..=j {
        acc = acc.add(&terms[s].expansion().scaled(&history.lambdas()[j + 1 - s]));
    }
    Ok(acc.sub(&terms[j].expansion().apply_potentials(spec, wave)))
}
