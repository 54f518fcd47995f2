//! Moment integrals, eigenvalue corrections and the step-by-step driver.

use rug::Float;

use crate::corrections::{assemble, base_pair, CorrectionTerm, FDSolution};
use crate::error::{FdError, Result};
use crate::numerics::{format_real, PrecisionContext, Real};
use crate::problem::{Polynomial, ProblemSpec};
use crate::recursion::{closure_index0, run_recurrence, top_initial_coeffs, Family};
use crate::rhs::{build_rhs, RhsCoefficients};

/// Closed-form integrals over `[0, X]` with `k = n pi / X`:
/// `alpha[t] = int x^t sin^2(kx)`, `beta[t] = int x^t sin(kx) cos(kx)`,
/// `eta[t] = int x^t sin(kx) cosh(kx)`, `mu[t] = int x^t sin(kx) sinh(kx)`.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub n: u32,
    pub length: Real,
    pub alpha: Vec<Real>,
    pub beta: Vec<Real>,
    pub eta: Vec<Real>,
    pub mu: Vec<Real>,
}

impl MomentTable {
    /// Largest power covered.
    pub fn upto(&self) -> usize {
        self.alpha.len() - 1
    }
}

/// `(cos, sin)` of `pi k / 2`, exactly.
fn quarter_turn(k: usize) -> (i32, i32) {
    match k % 4 {
        0 => (1, 0),
        1 => (0, 1),
        2 => (-1, 0),
        _ => (0, -1),
    }
}

/// `(cos, sin)` of `pi m / 4` as multiples of `sqrt(2)/2` (first flag) or integers.
fn eighth_turn(m: usize, half_sqrt2: &Real) -> (Real, Real) {
    let prec = half_sqrt2.prec();
    let z = || Float::with_val(prec, 0);
    let h = |s: i32| Float::with_val(prec, half_sqrt2 * s);
    let one = |s: i32| Float::with_val(prec, s);
    match m % 8 {
        0 => (one(1), z()),
        1 => (h(1), h(1)),
        2 => (z(), one(1)),
        3 => (h(-1), h(1)),
        4 => (one(-1), z()),
        5 => (h(-1), h(-1)),
        6 => (z(), one(-1)),
        _ => (h(1), h(-1)),
    }
}

/// Moment table for powers `0..=upto`.
pub fn moments(n: u32, length: &Real, upto: usize, ctx: &PrecisionContext) -> Result<MomentTable> {
    if n < 1 {
        return Err(FdError::InvalidArgument(
            "eigenpair index n must be at least 1".into(),
        ));
    }
    let prec = ctx.bits();
    let length = ctx.round(length);
    let pi_n = ctx.pi() * n;
    let two_pi_n = Float::with_val(prec, &pi_n * 2u32);
    let sqrt2 = ctx.int(2).sqrt();
    let half_sqrt2 = Float::with_val(prec, &sqrt2 / 2u32);
    let root_pi_n = Float::with_val(prec, &sqrt2 * &pi_n);
    let (sinh_pi_n, cosh_pi_n) = pi_n.clone().sinh_cosh(Float::new(prec));
    let cos_pi_n = if n.is_multiple_of(2) { 1 } else { -1 };

    let mut alpha = Vec::with_capacity(upto + 1);
    let mut beta = Vec::with_capacity(upto + 1);
    let mut eta = Vec::with_capacity(upto + 1);
    let mut mu = Vec::with_capacity(upto + 1);
    let mut x_pow = length.clone(); // X^{t+1}
    for t in 0..=upto {
        // t!/(t-k)! / w^{k+1} for k = 0..=t, built incrementally
        let mut trig_sum_sin = ctx.zero();
        let mut trig_sum_cos = ctx.zero();
        let mut falling = ctx.int(1);
        let mut w_pow = two_pi_n.clone();
        for k in 0..t {
            let term = Float::with_val(prec, &falling / &w_pow);
            let (c, s) = quarter_turn(k);
            trig_sum_sin += Float::with_val(prec, &term * s);
            trig_sum_cos += Float::with_val(prec, &term * c);
            falling *= (t - k) as u32;
            w_pow *= &two_pi_n;
        }
        let a = Float::with_val(prec, &x_pow / (t as u32 + 1)) / 2u32
            - Float::with_val(prec, &x_pow * &trig_sum_sin) / 2u32;
        let b = -Float::with_val(prec, &x_pow * &trig_sum_cos) / 2u32;

        let mut hyp_eta = ctx.zero();
        let mut hyp_mu = ctx.zero();
        let mut falling = ctx.int(1);
        let mut r_pow = root_pi_n.clone();
        for k in 0..=t {
            let term = Float::with_val(prec, &falling / &r_pow);
            let (ck, sk) = quarter_turn(k);
            let (c4, s4) = eighth_turn(k + 1, &half_sqrt2);
            let cc = Float::with_val(prec, &c4 * ck);
            let ss = Float::with_val(prec, &s4 * sk);
            hyp_eta += Float::with_val(
                prec,
                &term
                    * (Float::with_val(prec, &cc * &cosh_pi_n)
                        - Float::with_val(prec, &ss * &sinh_pi_n)),
            );
            hyp_mu += Float::with_val(
                prec,
                &term
                    * (Float::with_val(prec, &ss * &cosh_pi_n)
                        - Float::with_val(prec, &cc * &sinh_pi_n)),
            );
            if k < t {
                falling *= (t - k) as u32;
                r_pow *= &root_pi_n;
            }
        }
        // t! / (sqrt2 pi n)^{t+1} equals the last term of the loop above
        let lead = Float::with_val(prec, &falling / &r_pow);
        let (ct, st) = quarter_turn(t);
        let (c4, s4) = eighth_turn(t + 1, &half_sqrt2);
        let e =
            Float::with_val(prec, &lead * &c4) * ct - Float::with_val(prec, &hyp_eta * cos_pi_n);
        let m =
            -Float::with_val(prec, &lead * &s4) * st + Float::with_val(prec, &hyp_mu * cos_pi_n);

        alpha.push(a);
        beta.push(b);
        eta.push(Float::with_val(prec, &e * &x_pow));
        mu.push(Float::with_val(prec, &m * &x_pow));
        x_pow *= &length;
    }
    Ok(MomentTable {
        n,
        length,
        alpha,
        beta,
        eta,
        mu,
    })
}

/// Eigenvalue corrections `lambda^(0..)` and correction terms `u^(0..)`.
///
/// Each new eigenvalue correction must be pushed before the term of the same
/// step, matching the order in which they are computed.
#[derive(Clone, Debug)]
pub struct History {
    lambdas: Vec<Real>,
    terms: Vec<CorrectionTerm>,
}

impl History {
    pub fn new(base: CorrectionTerm, lambda0: Real) -> Self {
        Self {
            lambdas: vec![lambda0],
            terms: vec![base],
        }
    }

    /// `lambda^(0)` followed by the corrections computed so far.
    pub fn lambdas(&self) -> &[Real] {
        &self.lambdas
    }

    pub fn terms(&self) -> &[CorrectionTerm] {
        &self.terms
    }

    pub fn push_lambda(&mut self, lambda: Real) -> Result<()> {
        if self.lambdas.len() != self.terms.len() {
            return Err(FdError::MissingHistory(format!(
                "eigenvalue correction {} pushed before term {}",
                self.lambdas.len(),
                self.lambdas.len() - 1
            )));
        }
        self.lambdas.push(lambda);
        Ok(())
    }

    pub fn push_term(&mut self, term: CorrectionTerm) -> Result<()> {
        if self.lambdas.len() != self.terms.len() + 1 || term.j != self.terms.len() {
            return Err(FdError::MissingHistory(format!(
                "term {} does not follow eigenvalue correction {}",
                term.j,
                self.lambdas.len() - 1
            )));
        }
        self.terms.push(term);
        Ok(())
    }
}

fn coef(p: &Polynomial, l: i64, prec: u32) -> Real {
    p.coeff(l as usize)
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

/// `lambda^(j+1) = <q2 u^(j)'' + q1 u^(j)' + q0 u^(j), u^(0)>` expanded
/// through the moment table.
pub fn lambda_correction(
    j: usize,
    n: u32,
    spec: &ProblemSpec,
    history: &History,
    moments: &MomentTable,
) -> Result<Real> {
    if history.terms().len() < j + 1 {
        return Err(FdError::MissingHistory(format!(
            "term {j} is not available"
        )));
    }
    let budget = spec.budget();
    let r = budget.r as i64;
    let m_j = budget.top(j) as i64;
    let m_next = budget.top(j + 1) as i64;
    if moments.upto() < m_next as usize {
        return Err(FdError::InvalidArgument(format!(
            "moment table covers powers up to {}, step {} needs {}",
            moments.upto(),
            j + 1,
            m_next
        )));
    }
    let ctx = spec.ctx();
    let prec = ctx.bits();
    let wave = spec.wave(n);
    let wave2 = Float::with_val(prec, wave.square_ref());
    let two_wave = Float::with_val(prec, &wave * 2u32);
    let term = &history.terms()[j];
    let (a, b, c, d) = (&term.a, &term.b, &term.c, &term.d);
    let big_a = |l: i64| coef(spec.q0(), l, prec);
    let big_b = |l: i64| coef(spec.q1(), l, prec);
    let big_c = |l: i64| coef(spec.q2(), l, prec);
    let (al, be, et, mu) = (&moments.alpha, &moments.beta, &moments.eta, &moments.mu);
    let mut sum = ctx.zero();

    for t in 0..m_next {
        let tu = t as usize;
        for l in (t - m_j).max(0)..=r.min(t) {
            let (ai, bi) = (at(a, t - l, prec), at(b, t - l, prec));
            let cross = Float::with_val(prec, &be[tu] * &ai) - Float::with_val(prec, &al[tu] * &bi);
            let direct =
                Float::with_val(prec, &be[tu] * &bi) + Float::with_val(prec, &al[tu] * &ai);
            let mix = Float::with_val(prec, &big_c(l) * &wave2) - big_a(l);
            sum += Float::with_val(prec, &wave * &big_b(l)) * cross;
            sum -= direct * mix;
        }
        if t <= m_next - 2 {
            for l in (t - m_j + 1).max(0)..=r.min(t) {
                let (ai, bi) = (at(a, t - l + 1, prec), at(b, t - l + 1, prec));
                let direct =
                    Float::with_val(prec, &be[tu] * &bi) + Float::with_val(prec, &al[tu] * &ai);
                let cross =
                    Float::with_val(prec, &be[tu] * &ai) - Float::with_val(prec, &al[tu] * &bi);
                let inner =
                    direct * big_b(l) + cross * Float::with_val(prec, &two_wave * &big_c(l));
                sum += inner * ((t - l + 1) as i32);
            }
        }
        if t <= m_next - 3 {
            for l in (t - m_j + 2).max(0)..=r.min(t) {
                let (ai, bi) = (at(a, t - l + 2, prec), at(b, t - l + 2, prec));
                let direct =
                    Float::with_val(prec, &be[tu] * &bi) + Float::with_val(prec, &al[tu] * &ai);
                sum += direct * big_c(l) * ((t - l + 1) * (t - l + 2)) as i32;
            }
        }
    }

    if j >= 1 {
        let m_prev = budget.top(j - 1) as i64;
        for t in 0..m_j {
            let tu = t as usize;
            for l in (t - m_prev).max(0)..=r.min(t) {
                let (ci, di) = (at(c, t - l, prec), at(d, t - l, prec));
                let first =
                    Float::with_val(prec, &et[tu] * &ci) + Float::with_val(prec, &mu[tu] * &di);
                let second =
                    Float::with_val(prec, &et[tu] * &di) + Float::with_val(prec, &mu[tu] * &ci);
                let mix = Float::with_val(prec, &big_c(l) * &wave2) + big_a(l);
                sum += Float::with_val(prec, &wave * &big_b(l)) * first;
                sum += second * mix;
            }
            if t <= m_j - 2 {
                for l in (t - m_prev + 1).max(0)..=r.min(t) {
                    let (ci, di) = (at(c, t - l + 1, prec), at(d, t - l + 1, prec));
                    let second =
                        Float::with_val(prec, &et[tu] * &di) + Float::with_val(prec, &mu[tu] * &ci);
                    let first =
                        Float::with_val(prec, &et[tu] * &ci) + Float::with_val(prec, &mu[tu] * &di);
                    let inner =
                        second * big_b(l) + first * Float::with_val(prec, &two_wave * &big_c(l));
                    sum += inner * ((t - l + 1) as i32);
                }
            }
            if t <= m_j - 3 {
                for l in (t - m_prev + 2).max(0)..=r.min(t) {
                    let (ci, di) = (at(c, t - l + 2, prec), at(d, t - l + 2, prec));
                    let second =
                        Float::with_val(prec, &et[tu] * &di) + Float::with_val(prec, &mu[tu] * &ci);
                    sum += second * big_c(l) * ((t - l + 1) * (t - l + 2)) as i32;
                }
            }
        }
    }

    let amplitude = (ctx.int(2) / spec.length()).sqrt();
    Ok(sum * amplitude)
}

/// Everything produced by [`solve_traced`]: the solution plus the
/// right-hand sides and moment table used along the way.
#[derive(Clone, Debug)]
pub struct SolveTrace {
    pub solution: FDSolution,
    pub rhs: Vec<RhsCoefficients>,
    pub moments: MomentTable,
}

/// Rank-`m` approximation of the `n`-th eigenpair.
pub fn solve(spec: &ProblemSpec, n: u32, m: usize) -> Result<FDSolution> {
    Ok(solve_traced(spec, n, m)?.solution)
}

/// Computes one correction step: coefficients of `u^(j+1)` from its right-hand side.
pub fn correction_step(
    spec: &ProblemSpec,
    n: u32,
    rhs: &RhsCoefficients,
    moments: &MomentTable,
    notes: &mut Vec<String>,
) -> CorrectionTerm {
    let ctx = spec.ctx();
    let budget = spec.budget();
    let j = rhs.j;
    let top_trig = budget.top(j + 1);
    let top_hyp = budget.top(j);
    let zeros = |len: usize| vec![ctx.zero(); len];

    let (mut a, mut b) = match top_initial_coeffs(Family::Trig, rhs) {
        Some(top3) => run_recurrence(Family::Trig, rhs, &top3),
        None => (zeros(top_trig + 1), zeros(top_trig + 1)),
    };
    let (mut c, mut d) = match top_initial_coeffs(Family::Hyperbolic, rhs) {
        Some(top3) => run_recurrence(Family::Hyperbolic, rhs, &top3),
        None => (zeros(top_hyp + 1), zeros(top_hyp + 1)),
    };
    let closed = closure_index0(n, &rhs.wave, spec.length(), &a, &b, &c, &d, moments);
    let mut record = |what: &str, top: usize, old: &[Real; 2], new: [&Real; 2]| {
        if top == 2 {
            let diff = Float::with_val(ctx.bits(), &old[0] - new[0])
                .abs()
                .max(&Float::with_val(ctx.bits(), &old[1] - new[1]).abs());
            notes.push(format!(
                "step {}: {what} index-0 pair from the top formulas replaced by the closure values (max difference {})",
                j + 1,
                format_real(&diff, 3)
            ));
        }
    };
    record(
        "[a,b]",
        top_trig,
        &[a[0].clone(), b[0].clone()],
        [&closed.a, &closed.b],
    );
    record(
        "[c,d]",
        top_hyp,
        &[c[0].clone(), d[0].clone()],
        [&closed.c, &closed.d],
    );
    a[0] = closed.a;
    b[0] = closed.b;
    c[0] = closed.c;
    d[0] = closed.d;
    CorrectionTerm {
        n,
        j: j + 1,
        length: spec.length().clone(),
        wave: rhs.wave.clone(),
        a,
        b,
        c,
        d,
    }
}

/// [`solve`] that also returns the intermediate right-hand sides.
pub fn solve_traced(spec: &ProblemSpec, n: u32, m: usize) -> Result<SolveTrace> {
    let (base, lambda0) = base_pair(spec, n)?;
    let budget = spec.budget();
    let table = moments(n, spec.length(), budget.top(m) + budget.r, &spec.ctx())?;
    let mut history = History::new(base, lambda0);
    let mut notes = Vec::new();
    let mut rhs_list = Vec::with_capacity(m);
    for j in 0..m {
        let lambda = lambda_correction(j, n, spec, &history, &table)?;
        history.push_lambda(lambda)?;
        let rhs = build_rhs(spec, n, j, &history)?;
        let term = correction_step(spec, n, &rhs, &table, &mut notes);
        history.push_term(term)?;
        rhs_list.push(rhs);
    }
    let History { lambdas, terms } = history;
    let mut solution = assemble(terms, &lambdas[1..], m)?;
    solution.notes = notes;
    Ok(SolveTrace {
        solution,
        rhs: rhs_list,
        moments: table,
    })
}

/// Closed form of the second eigenvalue correction for the linear potential
/// `q0 = x` on `[0, 1]`:
/// `1/(32 (n pi)^4) - 5/(32 (n pi)^6) + (cos(n pi) - cosh(n pi)) / (2 (n pi)^7 sinh(n pi))`.
pub fn lambda_second_correction_check(n: u32, ctx: &PrecisionContext) -> Real {
    let prec = ctx.bits();
    let x = ctx.pi() * n;
    let p4 = Float::with_val(prec, x.clone().square().square_ref());
    let p6 = Float::with_val(prec, &p4 * x.clone().square());
    let p7 = Float::with_val(prec, &p6 * &x);
    let (sinh, cosh) = x.sinh_cosh(Float::new(prec));
    let cos = if n.is_multiple_of(2) { 1 } else { -1 };
    let last = (cosh * -1i32 + cos) / (p7 * 2u32 * sinh);
    Float::with_val(prec, p4.recip() / 32u32) - Float::with_val(prec, p6.recip() * 5u32 / 32u32)
        + last
}
