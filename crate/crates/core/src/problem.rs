//! Problem data: interval length and the three polynomial potentials.

use rug::Float;

use crate::error::{FdError, Result};
use crate::numerics::{PrecisionContext, Real};

/// Dense polynomial, `coeffs[l]` multiplies `x^l`.
///
/// The stored length fixes the tracked degree, so trailing zeros are kept.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Real>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Real>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "polynomial needs at least one coefficient"
        );
        Self { coeffs }
    }

    pub fn zero(ctx: &PrecisionContext, degree: usize) -> Self {
        Self {
            coeffs: vec![ctx.zero(); degree + 1],
        }
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    /// Tracked degree (stored length minus one).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `x^l`; zero past the tracked degree.
    pub fn coeff(&self, l: usize) -> Option<&Real> {
        self.coeffs.get(l)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn prec(&self) -> u32 {
        self.coeffs[0].prec()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Real) -> Real {
        let mut acc = Float::with_val(self.prec(), 0);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Exact derivative of the given order; the result keeps at least one coefficient.
    pub fn derivative(&self, order: usize) -> Polynomial {
        let mut coeffs = self.coeffs.clone();
        for _ in 0..order {
            if coeffs.len() == 1 {
                coeffs[0] = Float::with_val(self.prec(), 0);
                continue;
            }
            coeffs = coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(l, c)| Float::with_val(self.prec(), c * l as u32))
                .collect();
        }
        Polynomial { coeffs }
    }

    /// Same polynomial with the tracked degree raised to at least `degree`.
    pub fn padded(&self, degree: usize) -> Polynomial {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() < degree + 1 {
            coeffs.push(Float::with_val(self.prec(), 0));
        }
        Polynomial { coeffs }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|l| {
                let mut v = Float::with_val(self.prec(), 0);
                if let Some(c) = self.coeffs.get(l) {
                    v += c;
                }
                if let Some(c) = other.coeffs.get(l) {
                    v += c;
                }
                v
            })
            .collect();
        Polynomial { coeffs }
    }

    pub fn scaled(&self, factor: &Real) -> Polynomial {
        Polynomial {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Float::with_val(self.prec(), c * factor))
                .collect(),
        }
    }

    /// `max |p(x)|` over `[0, x_max]`.
    ///
    /// A grid of `64(deg+1)+1` points locates the best bracket, which is then
    /// refined by golden-section search.
    pub fn sup_norm(&self, x_max: &Real) -> Real {
        let prec = self.prec();
        let abs_at = |x: &Real| self.eval(x).abs();
        let nodes = 64 * (self.degree() + 1);
        let step = Float::with_val(prec, x_max / nodes as u32);
        let grid: Vec<Real> = (0..=nodes)
            .map(|i| Float::with_val(prec, &step * i as u32))
            .collect();
        let values: Vec<Real> = grid.iter().map(abs_at).collect();
        let (best, _) =
            values.iter().enumerate().fold(
                (0, &values[0]),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
        let mut max = values[best].clone();

        let mut lo = grid[best.saturating_sub(1)].clone();
        let mut hi = grid[(best + 1).min(nodes)].clone();
        let ratio = Float::with_val(prec, (Float::with_val(prec, 5).sqrt() - 1u32) / 2u32);
        let tol = Float::with_val(prec, x_max * 1e-16);
        let mut x1 = Float::with_val(prec, &hi - &ratio * Float::with_val(prec, &hi - &lo));
        let mut x2 = Float::with_val(prec, &lo + &ratio * Float::with_val(prec, &hi - &lo));
        let mut f1 = abs_at(&x1);
        let mut f2 = abs_at(&x2);
        let mut guard = 0;
        while Float::with_val(prec, &hi - &lo) > tol && guard < 200 {
            guard += 1;
            if f1 > f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = Float::with_val(prec, &hi - &ratio * Float::with_val(prec, &hi - &lo));
                f1 = abs_at(&x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = Float::with_val(prec, &lo + &ratio * Float::with_val(prec, &hi - &lo));
                f2 = abs_at(&x2);
            }
        }
        for v in [f1, f2] {
            if v > max {
                max = v;
            }
        }
        max
    }
}

/// Step budget: `r` is the largest potential degree and `M(j) = j(r+1)` the
/// top power of `x` in the trigonometric part of the step-`j` correction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepBudget {
    pub r: usize,
}

impl StepBudget {
    pub fn top(&self, j: usize) -> usize {
        j * (self.r + 1)
    }

    /// `M(j-1)`, the top power of the hyperbolic part; `None` for `j = 0`.
    pub fn hyperbolic_top(&self, j: usize) -> Option<usize> {
        j.checked_sub(1).map(|i| self.top(i))
    }
}

/// Fourth-order problem on `[0, X]`:
/// `u'''' + q2 u'' + q1 u' + (q0 - lambda) u = 0`, `u = u'' = 0` at both ends.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    ctx: PrecisionContext,
    length: Real,
    q0: Polynomial,
    q1: Polynomial,
    q2: Polynomial,
}

impl ProblemSpec {
    /// Builds a problem; each potential is padded to degree at least one.
    pub fn new(
        ctx: PrecisionContext,
        length: Real,
        q0: Polynomial,
        q1: Polynomial,
        q2: Polynomial,
    ) -> Result<Self> {
        if !length.is_finite() || length <= 0 {
            return Err(FdError::InvalidArgument(format!(
                "interval length must be positive, got {}",
                length.to_string_radix(10, Some(20))
            )));
        }
        let fix = |p: Polynomial| -> Result<Polynomial> {
            if p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(FdError::InvalidArgument(
                    "non-finite potential coefficient".into(),
                ));
            }
            let coeffs = p.coeffs.iter().map(|c| ctx.round(c)).collect();
            Ok(Polynomial { coeffs }.padded(1))
        };
        Ok(Self {
            ctx,
            length: ctx.round(&length),
            q0: fix(q0)?,
            q1: fix(q1)?,
            q2: fix(q2)?,
        })
    }

    /// Convenience constructor from decimal strings (lowest degree first).
    pub fn from_decimal(
        ctx: PrecisionContext,
        length: &str,
        q0: &[&str],
        q1: &[&str],
        q2: &[&str],
    ) -> Result<Self> {
        let poly = |cs: &[&str]| -> Result<Polynomial> {
            if cs.is_empty() {
                return Ok(Polynomial::zero(&ctx, 1));
            }
            Ok(Polynomial::new(
                cs.iter().map(|c| ctx.parse(c)).collect::<Result<_>>()?,
            ))
        };
        Self::new(ctx, ctx.parse(length)?, poly(q0)?, poly(q1)?, poly(q2)?)
    }

    /// `X = 5`, `q0 = 0.0001x^4 - 0.02`, `q1 = -0.04x`, `q2 = -0.02x^2`:
    /// the square of a harmonic-oscillator operator.
    pub fn squared_harmonic(ctx: PrecisionContext) -> Self {
        Self::from_decimal(
            ctx,
            "5",
            &["-0.02", "0", "0", "0", "0.0001"],
            &["0", "-0.04"],
            &["0", "0", "-0.02"],
        )
        .expect("built-in problem is valid")
    }

    /// `X = 1`, `q0 = x`, `q1 = q2 = 0`.
    pub fn linear_potential(ctx: PrecisionContext) -> Self {
        Self::from_decimal(ctx, "1", &["0", "1"], &[], &[]).expect("built-in problem is valid")
    }

    /// Zero potentials on `[0, X]`.
    pub fn free(ctx: PrecisionContext, length: &str) -> Result<Self> {
        Self::from_decimal(ctx, length, &[], &[], &[])
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn length(&self) -> &Real {
        &self.length
    }

    pub fn q0(&self) -> &Polynomial {
        &self.q0
    }

    pub fn q1(&self) -> &Polynomial {
        &self.q1
    }

    pub fn q2(&self) -> &Polynomial {
        &self.q2
    }

    pub fn budget(&self) -> StepBudget {
        StepBudget {
            r: self.q0.degree().max(self.q1.degree()).max(self.q2.degree()),
        }
    }

    /// Wave number `n pi / X` of the n-th base eigenfunction.
    pub fn wave(&self, n: u32) -> Real {
        self.ctx.pi() * n / &self.length
    }

    /// Same problem re-rounded to another precision.
    pub fn with_ctx(&self, ctx: PrecisionContext) -> Self {
        let re = |p: &Polynomial| Polynomial {
            coeffs: p.coeffs.iter().map(|c| ctx.round(c)).collect(),
        };
        Self {
            ctx,
            length: ctx.round(&self.length),
            q0: re(&self.q0),
            q1: re(&self.q1),
            q2: re(&self.q2),
        }
    }
}

/// `omega = max{ |q2|, |2 q2' - q1|, |q2'' - q1' + q0| }` in the sup norm on `[0, X]`.
pub fn omega(spec: &ProblemSpec) -> Real {
    let two = spec.ctx.int(2);
    let minus_one = spec.ctx.int(-1);
    let first = spec.q2.sup_norm(&spec.length);
    let second = spec
        .q2
        .derivative(1)
        .scaled(&two)
        .add(&spec.q1.scaled(&minus_one))
        .sup_norm(&spec.length);
    let third = spec
        .q2
        .derivative(2)
        .add(&spec.q1.derivative(1).scaled(&minus_one))
        .add(&spec.q0)
        .sup_norm(&spec.length);
    [first, second, third]
        .into_iter()
        .reduce(|a, b| if b > a { b } else { a })
        .expect("three candidates")
}
