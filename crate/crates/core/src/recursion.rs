//! Coefficients of a new correction from its right-hand side.
//!
//! Matching powers of `x` in `u'''' - k^4 u = F` gives, per family, a
//! downward three-term recurrence in the coefficient index. The three highest
//! coefficients have closed forms; the rest follow from the 2x2 block
//! recurrence `Z(p+3) = D1(p) Z(p+2) + D2(p) Z(p+1) + D3(p) Z(p) + F(p+3)`
//! where `Z(q)` collects the pair at index `M - q`. The index-0 coefficients
//! come from the boundary conditions and orthogonality to the base function.

use rug::ops::Pow;
use rug::Float;

use crate::numerics::Real;
use crate::rhs::RhsCoefficients;
use crate::spectral::MomentTable;

/// Which pair of coefficient lists a recurrence produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `[a, b]`: the sin and cos polynomials, forced by `f_cos`, `f_sin`.
    Trig,
    /// `[c, d]`: the sinh and cosh polynomials, forced by `f_cosh`, `f_sinh`.
    Hyperbolic,
}

pub type Pair = [Real; 2];

/// 2x2 matrix, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2(pub [[Real; 2]; 2]);

impl Mat2 {
    fn scaled_pattern(factor: Real, pattern: [[i32; 2]; 2]) -> Self {
        let e = |v: i32| Float::with_val(factor.prec(), &factor * v);
        Mat2([
            [e(pattern[0][0]), e(pattern[0][1])],
            [e(pattern[1][0]), e(pattern[1][1])],
        ])
    }

    pub fn apply(&self, v: &Pair) -> Pair {
        let prec = v[0].prec();
        let row = |r: &[Real; 2]| {
            Float::with_val(prec, &r[0] * &v[0]) + Float::with_val(prec, &r[1] * &v[1])
        };
        [row(&self.0[0]), row(&self.0[1])]
    }
}

fn add_pair(a: &Pair, b: &Pair) -> Pair {
    [
        Float::with_val(a[0].prec(), &a[0] + &b[0]),
        Float::with_val(a[1].prec(), &a[1] + &b[1]),
    ]
}

fn zero_pair(prec: u32) -> Pair {
    [Float::with_val(prec, 0), Float::with_val(prec, 0)]
}

const ROTATION: [[i32; 2]; 2] = [[0, -1], [1, 0]];
const REFLECTED_ROTATION: [[i32; 2]; 2] = [[0, -1], [-1, 0]];
const IDENTITY: [[i32; 2]; 2] = [[1, 0], [0, 1]];

/// Forcing lists `(first, second)`: `(f_cos, f_sin)` or `(f_cosh, f_sinh)`.
fn forcing(family: Family, rhs: &RhsCoefficients) -> (&[Real], &[Real]) {
    match family {
        Family::Trig => (&rhs.cos, &rhs.sin),
        Family::Hyperbolic => (&rhs.cosh, &rhs.sinh),
    }
}

/// Top power `M` of the family's polynomials (the forcing lists have length `M`).
pub fn family_top(family: Family, rhs: &RhsCoefficients) -> usize {
    forcing(family, rhs).0.len()
}

/// Coupling matrices `D1, D2, D3` for recurrence index `p`.
pub fn coupling(family: Family, top: usize, p: usize, wave: &Real) -> [Mat2; 3] {
    let prec = wave.prec();
    let m = top as i64 - p as i64;
    let inv = Float::with_val(prec, wave.recip_ref());
    let inv2 = Float::with_val(prec, inv.square_ref());
    let inv3 = Float::with_val(prec, &inv2 * &inv);
    let f1 = Float::with_val(prec, &inv * (3 * (m - 2))) / 2u32;
    let f2 = Float::with_val(prec, &inv2 * ((m - 1) * (m - 2)));
    let f3 = Float::with_val(prec, &inv3 * (m * (m - 1) * (m - 2))) / 4u32;
    match family {
        Family::Trig => [
            Mat2::scaled_pattern(f1, ROTATION),
            Mat2::scaled_pattern(f2, IDENTITY),
            Mat2::scaled_pattern(-f3, ROTATION),
        ],
        Family::Hyperbolic => [
            Mat2::scaled_pattern(f1, REFLECTED_ROTATION),
            Mat2::scaled_pattern(-f2, IDENTITY),
            Mat2::scaled_pattern(f3, REFLECTED_ROTATION),
        ],
    }
}

/// Inhomogeneous term `F(q)` of the block recurrence, `q >= 3`.
pub fn forcing_vector(family: Family, rhs: &RhsCoefficients, q: usize) -> Pair {
    let (first, second) = forcing(family, rhs);
    let top = first.len();
    let idx = top - q - 1;
    let prec = rhs.wave.prec();
    let scale =
        Float::with_val(prec, rhs.wave.clone().square() * &rhs.wave) * (4 * (top - q) as u32);
    let scale = scale.recip();
    let lead = match family {
        Family::Trig => -Float::with_val(prec, &first[idx] * &scale),
        Family::Hyperbolic => Float::with_val(prec, &first[idx] * &scale),
    };
    [lead, Float::with_val(prec, &second[idx] * &scale)]
}

/// Closed-form pairs at indices `M, M-1, M-2` (returned in that order), or
/// `None` when `M < 2`.
pub fn top_initial_coeffs(family: Family, rhs: &RhsCoefficients) -> Option<[Pair; 3]> {
    let (first, second) = forcing(family, rhs);
    let top = first.len();
    if top < 2 {
        return None;
    }
    let prec = rhs.wave.prec();
    let inv = Float::with_val(prec, rhs.wave.recip_ref());
    let top = top as i64;
    // family selected by parity: even -> first list, odd -> second list
    let pick = |parity: i64| if parity % 2 == 0 { first } else { second };
    let mut out: Vec<Pair> = Vec::with_capacity(3);
    for s in 0..=2i64 {
        let mut lead = Float::with_val(prec, 0);
        let mut trail = Float::with_val(prec, 0);
        for k in 0..=s {
            let idx = top - s - 1 + k;
            if idx < 0 {
                continue;
            }
            let delta = i64::from(s == 2);
            let denom = 4i64 << k as u32;
            let denom = denom * (top - s + (k + delta) / 2);
            let weight = Float::with_val(prec, (&inv).pow((3 + k) as i32))
                * Float::with_val(prec, (2 * k + 1) * (top - 1).pow(k as u32))
                / Float::with_val(prec, denom);
            let (sign_lead, sign_trail) = match family {
                Family::Trig => {
                    let lead = if (k / 2 + 1) % 2 == 0 { 1 } else { -1 };
                    let trail = if ((k + 1) / 2) % 2 == 0 { 1 } else { -1 };
                    (lead, trail)
                }
                Family::Hyperbolic => {
                    let sign = if k % 2 == 0 { 1 } else { -1 };
                    (sign, sign)
                }
            };
            lead += Float::with_val(prec, &pick(k)[idx as usize] * &weight) * sign_lead;
            trail += Float::with_val(prec, &pick(k + 1)[idx as usize] * &weight) * sign_trail;
        }
        out.push([lead, trail]);
    }
    let [z0, z1, z2]: [Pair; 3] = out.try_into().ok()?;
    Some([z0, z1, z2])
}

/// Runs the block recurrence from the top three pairs and returns the
/// `(first, second)` coefficient lists (`(a, b)` or `(c, d)`) of length `M + 1`.
///
/// Index 0 is only filled when `M = 2`, where it comes from the top formulas;
/// the closure step overrides it.
pub fn run_recurrence(
    family: Family,
    rhs: &RhsCoefficients,
    top3: &[Pair; 3],
) -> (Vec<Real>, Vec<Real>) {
    let top = family_top(family, rhs);
    let prec = rhs.wave.prec();
    let mut z: Vec<Pair> = top3.iter().take(top + 1).cloned().collect();
    for p in 0..top.saturating_sub(3) {
        let [d1, d2, d3] = coupling(family, top, p, &rhs.wave);
        let next = add_pair(
            &add_pair(&d1.apply(&z[p + 2]), &d2.apply(&z[p + 1])),
            &add_pair(&d3.apply(&z[p]), &forcing_vector(family, rhs, p + 3)),
        );
        z.push(next);
    }
    let mut first = vec![Float::with_val(prec, 0); top + 1];
    let mut second = vec![Float::with_val(prec, 0); top + 1];
    for (q, pair) in z.into_iter().enumerate() {
        let [x, y] = pair;
        first[top - q] = x;
        second[top - q] = y;
    }
    (first, second)
}

/// Normalization of the forcing terms inside the path-sum expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForcingScale {
    /// `1 / (4 (M + s - p - 3) k^3)` for both families, matching the recurrence.
    Consistent,
    /// The hyperbolic family carries an additional factor `1/4` in the
    /// intermediate forcing terms.
    ExtraQuarter,
}

/// Block `(row, col)` of the companion matrix for index `p` (1-based blocks).
fn block(
    family: Family,
    top: usize,
    p: usize,
    row: usize,
    col: usize,
    wave: &Real,
) -> Option<Mat2> {
    match row {
        1 => Some(coupling(family, top, p, wave)[col - 1].clone()),
        2 if col == 1 => Some(Mat2::scaled_pattern(
            Float::with_val(wave.prec(), 1),
            IDENTITY,
        )),
        3 if col == 2 => Some(Mat2::scaled_pattern(
            Float::with_val(wave.prec(), 1),
            IDENTITY,
        )),
        _ => None,
    }
}

/// Sum over all block paths ending in `row` at `level`, starting from the
/// vectors returned by `leaf(col)` below `first_level`.
fn path_sum(
    family: Family,
    top: usize,
    wave: &Real,
    row: usize,
    level: usize,
    first_level: usize,
    leaf: &dyn Fn(usize) -> Option<Pair>,
) -> Pair {
    let prec = wave.prec();
    let mut total = zero_pair(prec);
    for col in 1..=3 {
        let Some(m) = block(family, top, level, row, col, wave) else {
            continue;
        };
        let inner = if level == first_level {
            match leaf(col) {
                Some(v) => v,
                None => continue,
            }
        } else {
            path_sum(family, top, wave, col, level - 1, first_level, leaf)
        };
        total = add_pair(&total, &m.apply(&inner));
    }
    total
}

/// Explicit product-expansion of the pair `Z(p+3)` (index `M - p - 3`): the
/// sum over all index paths through the companion blocks applied to the
/// initial pairs, plus the propagated forcing terms.
///
/// Exponential in `p`; intended as an independent check of
/// [`run_recurrence`] for small `p`.
pub fn product_form(
    family: Family,
    rhs: &RhsCoefficients,
    top3: &[Pair; 3],
    p: usize,
    scale: ForcingScale,
) -> Pair {
    let top = family_top(family, rhs);
    assert!(top >= p + 4, "index M - p - 3 must be at least 1");
    let wave = &rhs.wave;
    let homogeneous = path_sum(family, top, wave, 1, p, 0, &|col| {
        Some(top3[3 - col].clone())
    });
    let mut total = homogeneous;
    for s in 1..=p {
        let mut f = forcing_vector(family, rhs, p - s + 3);
        if scale == ForcingScale::ExtraQuarter && family == Family::Hyperbolic {
            f = [f[0].clone() / 4u32, f[1].clone() / 4u32];
        }
        let leaf = move |col: usize| if col == 1 { Some(f.clone()) } else { None };
        let propagated = path_sum(family, top, wave, 1, p, p - s + 1, &leaf);
        total = add_pair(&total, &propagated);
    }
    add_pair(&total, &forcing_vector(family, rhs, p + 3))
}

/// Index-0 coefficients `(a0, b0, c0, d0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexZero {
    pub a: Real,
    pub b: Real,
    pub c: Real,
    pub d: Real,
}

/// Solves for the index-0 coefficients of a correction whose coefficients at
/// indices `>= 1` are known: `u(0) = u''(0) = u(X) = 0` fix `b0, c0, d0`, and
/// orthogonality to the base function fixes `a0`.
///
/// The slices must have their final lengths; entries at index 0 are ignored.
pub fn closure_index0(
    n: u32,
    wave: &Real,
    length: &Real,
    a: &[Real],
    b: &[Real],
    c: &[Real],
    d: &[Real],
    moments: &MomentTable,
) -> IndexZero {
    let prec = wave.prec();
    let get = |v: &[Real], i: usize| {
        v.get(i)
            .cloned()
            .unwrap_or_else(|| Float::with_val(prec, 0))
    };
    let inv = Float::with_val(prec, wave.recip_ref());

    let inner = get(b, 2) + get(d, 2);
    let b0 = (get(a, 1) + get(c, 1) + Float::with_val(prec, &inner * &inv)) * &inv;
    let d0 = Float::with_val(prec, -&b0);

    let pi_n = Float::with_val(prec, wave * length);
    let cos_pi_n = if n.is_multiple_of(2) { 1 } else { -1 };
    let (sinh_pi_n, cosh_pi_n) = pi_n.sinh_cosh(Float::new(prec));
    let mut power = Float::with_val(prec, 1);
    let mut trig_sum = b0.clone();
    let mut hyp_sum = d0.clone();
    let mut sinh_sum = Float::with_val(prec, 0);
    for t in 1..b.len().max(d.len()).max(c.len()) {
        power *= length;
        trig_sum += Float::with_val(prec, &power * &get(b, t));
        hyp_sum += Float::with_val(prec, &power * &get(d, t));
        sinh_sum += Float::with_val(prec, &power * &get(c, t));
    }
    let numerator = trig_sum * cos_pi_n + hyp_sum * &cosh_pi_n;
    let c0 = -Float::with_val(prec, &numerator / &sinh_pi_n) - sinh_sum;

    let mut proj = Float::with_val(prec, 0);
    for t in 1..a.len() {
        proj += Float::with_val(prec, &moments.beta[t] * &get(b, t));
        proj += Float::with_val(prec, &moments.alpha[t] * &a[t]);
    }
    for t in 0..d.len() {
        let (dt, ct) = if t == 0 {
            (d0.clone(), c0.clone())
        } else {
            (get(d, t), get(c, t))
        };
        proj += Float::with_val(prec, &moments.eta[t] * &dt);
        proj += Float::with_val(prec, &moments.mu[t] * &ct);
    }
    let a0 = -(proj * 2u32) / length;
    IndexZero {
        a: a0,
        b: b0,
        c: c0,
        d: d0,
    }
}
