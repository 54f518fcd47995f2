//! Composite Gauss–Legendre quadrature at working precision.

use rug::Float;

use crate::error::{FdError, Result};
use crate::numerics::{PrecisionContext, Real};

pub const NODES_PER_PANEL: usize = 20;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes_per_panel: usize,
    pub nodes: Vec<Real>,
    pub weights: Vec<Real>,
}

/// `(P_N(x), P_N'(x))` by the three-term recurrence.
fn legendre(order: usize, x: &Real) -> (Real, Real) {
    let prec = x.prec();
    let mut p0 = Float::with_val(prec, 1);
    let mut p1 = x.clone();
    for k in 2..=order {
        let k = k as u32;
        let p2 = (Float::with_val(prec, x * &p1) * (2 * k - 1)
            - Float::with_val(prec, &p0 * (k - 1)))
            / k;
        p0 = p1;
        p1 = p2;
    }
    let one_minus = Float::with_val(prec, 1u32 - x.clone().square());
    let deriv =
        (Float::with_val(prec, &p0 - Float::with_val(prec, x * &p1)) * order as u32) / one_minus;
    (p1, deriv)
}

impl QuadratureRule {
    pub fn gauss_legendre(order: usize, ctx: &PrecisionContext) -> Self {
        let prec = ctx.bits();
        let tol = ctx.pow10(-(ctx.digits() as i32) - 5);
        let pi = ctx.pi();
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for i in 1..=order {
            let guess = Float::with_val(prec, &pi * (4 * i as i64 - 1)) / (4 * order as u32 + 2);
            let mut x = guess.cos();
            for _ in 0..200 {
                let (p, dp) = legendre(order, &x);
                let step = p / &dp;
                x -= &step;
                if step.abs() < tol {
                    break;
                }
            }
            let (_, dp) = legendre(order, &x);
            let w = Float::with_val(prec, 2u32)
                / (Float::with_val(prec, 1u32 - x.clone().square()) * dp.square());
            nodes.push(x);
            weights.push(w);
        }
        Self {
            nodes_per_panel: order,
            nodes,
            weights,
        }
    }

    /// Composite rule with `panels` equal panels on `[a, b]`.
    pub fn apply(&self, f: &dyn Fn(&Real) -> Real, a: &Real, b: &Real, panels: usize) -> Real {
        let prec = a.prec().max(self.nodes[0].prec());
        let width = Float::with_val(prec, b - a) / panels as u32;
        let half = Float::with_val(prec, &width / 2u32);
        let mut total = Float::with_val(prec, 0);
        for panel in 0..panels {
            let mid =
                Float::with_val(prec, a + Float::with_val(prec, &width * panel as u32)) + &half;
            let mut acc = Float::with_val(prec, 0);
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let point = Float::with_val(prec, &mid + Float::with_val(prec, &half * x));
                acc += f(&point) * w;
            }
            total += acc * &half;
        }
        total
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Debug)]
pub struct Integral {
    pub value: Real,
    pub panels: usize,
    /// Whether two successive panel counts agreed to the requested tolerance.
    pub converged: bool,
}

const MAX_DOUBLINGS: usize = 6;

/// Integrates with `panels`, doubling the panel count until two successive
/// results agree to `rel_tol` (relative, or absolute for tiny values).
pub fn integrate_to(
    f: &dyn Fn(&Real) -> Real,
    a: &Real,
    b: &Real,
    panels: usize,
    rel_tol: &Real,
    ctx: &PrecisionContext,
) -> Result<Integral> {
    let floor = ctx.pow10(-(ctx.digits() as i32));
    refine(f, a, b, panels, ctx, |diff, next| {
        let scale = next.clone().abs().max(&floor);
        *diff <= Float::with_val(ctx.bits(), rel_tol * &scale)
    })
}

/// Like [`integrate_to`] but stops once successive results differ by at most
/// `abs_tol`. Suited to integrals expected to vanish.
pub fn integrate_within(
    f: &dyn Fn(&Real) -> Real,
    a: &Real,
    b: &Real,
    panels: usize,
    abs_tol: &Real,
    ctx: &PrecisionContext,
) -> Result<Integral> {
    refine(f, a, b, panels, ctx, |diff, _| diff <= abs_tol)
}

fn refine(
    f: &dyn Fn(&Real) -> Real,
    a: &Real,
    b: &Real,
    panels: usize,
    ctx: &PrecisionContext,
    accept: impl Fn(&Real, &Real) -> bool,
) -> Result<Integral> {
    if panels == 0 {
        return Err(FdError::InvalidArgument(
            "quadrature needs at least one panel".into(),
        ));
    }
    let rule = QuadratureRule::gauss_legendre(NODES_PER_PANEL, ctx);
    let mut panels = panels;
    let mut prev = rule.apply(f, a, b, panels);
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let next = rule.apply(f, a, b, panels);
        let diff = Float::with_val(ctx.bits(), &next - &prev).abs();
        if accept(&diff, &next) {
            return Ok(Integral {
                value: next,
                panels,
                converged: true,
            });
        }
        prev = next;
    }
    Ok(Integral {
        value: prev,
        panels,
        converged: false,
    })
}

/// [`integrate_to`] with a tolerance of `10^-(digits/2)`.
pub fn integrate(
    f: &dyn Fn(&Real) -> Real,
    a: &Real,
    b: &Real,
    panels: usize,
    ctx: &PrecisionContext,
) -> Result<Integral> {
    integrate_to(f, a, b, panels, &ctx.pow10(-(ctx.digits() as i32) / 2), ctx)
}
