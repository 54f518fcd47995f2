//! L2 norm of the operator residual of an approximate eigenpair.

use rug::Float;

use crate::corrections::{Expansion, FDSolution};
use crate::error::Result;
use crate::numerics::Real;
use crate::problem::ProblemSpec;
use crate::verify::quadrature::integrate_to;

/// `delta = || u'''' + q2 u'' + q1 u' + (q0 - lambda) u ||_2` on `[0, X]`.
#[derive(Clone, Debug)]
pub struct ResidualNorm {
    pub value: Real,
    pub panels: usize,
    /// False when successive quadrature refinements did not agree to `1e-10`.
    pub converged: bool,
}

/// The residual function as an exact expansion in the solution's basis.
pub fn residual_expansion(sol: &FDSolution, spec: &ProblemSpec) -> Expansion {
    let wave = sol.wave();
    let u = sol.expansion_at_rank(sol.m);
    let fourth = u.nth_derivative(wave, 4);
    fourth
        .add(&u.apply_potentials(spec, wave))
        .sub(&u.scaled(&sol.lambda_approx))
}

pub fn residual_norm(sol: &FDSolution, spec: &ProblemSpec) -> Result<ResidualNorm> {
    let ctx = spec.ctx();
    let phi = residual_expansion(sol, spec);
    let wave = sol.wave().clone();
    let degree = phi.cos.len().max(phi.cosh.len());
    let panels = 8.max(2 * sol.n as usize).max(degree);
    let integrand = |x: &Real| Float::with_val(x.prec(), phi.eval(&wave, x).square_ref());
    let tol = ctx.pow10(-10);
    let integral = integrate_to(&integrand, &ctx.zero(), spec.length(), panels, &tol, &ctx)?;
    Ok(ResidualNorm {
        value: integral.value.abs().sqrt(),
        panels: integral.panels,
        converged: integral.converged,
    })
}
