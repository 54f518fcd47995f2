//! Later-step eigenvalue corrections against their printed closed forms.

use rug::ops::Pow;
use rug::Float;

use fdsl::{solve, PrecisionContext, ProblemSpec, Real};

fn ctx() -> PrecisionContext {
    PrecisionContext::new(200).unwrap()
}

struct Powers {
    k: Real,
    c: PrecisionContext,
}

impl Powers {
    fn new(n: u32, c: PrecisionContext) -> Self {
        Self { k: c.pi() * n, c }
    }

    /// `r / k^e`
    fn term(&self, num: i64, den: i64, e: i32) -> Real {
        self.c.ratio(num, den) / Float::with_val(self.c.bits(), (&self.k).pow(e))
    }

    fn exp(&self, mult: u32) -> Real {
        Float::with_val(self.c.bits(), &self.k * mult).exp()
    }
}

fn rel(a: &Real, b: &Real) -> f64 {
    (Float::with_val(a.prec(), a - b) / b).abs().to_f64()
}

fn squared_second(n: u32, c: PrecisionContext) -> Real {
    let p = Powers::new(n, c);
    let coth = Float::with_val(c.bits(), p.k.tanh_ref()).recip();
    -c.ratio(1, 360) + p.term(1, 224, 2) - p.term(173, 384, 4) + p.term(9075, 3584, 6)
        - p.term(625, 64, 7) * coth
        + p.term(28775, 512, 8)
        - p.term(556875, 2048, 10)
        + p.term(804375, 2048, 12)
}

/// Third correction of the squared-harmonic problem; `hyperbolic` multiplies
/// the odd-power group.
fn squared_third(n: u32, c: PrecisionContext, hyperbolic: &Real) -> Real {
    let p = Powers::new(n, c);
    let e2 = p.exp(2);
    let e4 = p.exp(4);
    let first = (p.term(11748744, 1, 8) - p.term(338782925, 1, 12)) * (e4 + 1u32)
        + (-p.term(38057488, 1, 8) + p.term(814065850, 1, 12)) * &e2;
    let lead = -c.ratio(25, 4472832) / Float::with_val(c.bits(), &e2 - 1u32).square() * first;
    let odd = (p.term(96, 1, 7) + p.term(400, 1, 9) - p.term(14250, 1, 11) - p.term(5625, 1, 13)
        + p.term(1203750, 1, 15))
        * c.ratio(625, 3072)
        * hyperbolic;
    let tail = -p.term(5, 672, 2) + p.term(155, 2688, 4) - p.term(51325, 39424, 6)
        + p.term(232994375, 315392, 10)
        - p.term(24718046875, 229376, 14)
        + p.term(54692015625, 65536, 16)
        - p.term(843444140625, 131072, 18)
        + p.term(675516796875, 65536, 20);
    lead + odd + tail
}

fn linear_fourth(n: u32, c: PrecisionContext) -> Real {
    let p = Powers::new(n, c);
    let sign: i32 = if n.is_multiple_of(2) { 1 } else { -1 };
    let (e1, e2, e3) = (p.exp(1), p.exp(2), p.exp(3));
    let ce1 = e1 * sign;
    let ce3 = e3 * sign;
    let plus = e2.clone() + ce1.clone() * 2u32 + 1u32;
    let minus = e2.clone() - ce1.clone() * 2u32 + 1u32;
    let t15 = (e2.clone() * 63u32 - ce1.clone() * 26u32 + 63u32) / (e2.clone() - 1u32)
        * p.term(1, 128, 15);
    let t16 = (e2.clone() * 8269u32 + ce1.clone() * 16858u32 + 8269u32) / plus.clone()
        * p.term(1, 4096, 16);
    let t17 = (ce3.clone() * 5u32 + e2.clone() * 3u32 - ce1.clone() * 3u32 - 5u32)
        / (ce3 + e2 * 3u32 + ce1 * 3u32 + 1u32)
        * p.term(1, 16, 17);
    let t18 = minus / plus * p.term(17, 32, 18);
    p.term(11, 20480, 12) - p.term(65, 2048, 14) - t15 + t16 - t17 - t18
}

#[test]
fn squared_harmonic_second_correction() {
    let c = ctx();
    let spec = ProblemSpec::squared_harmonic(c);
    for n in 1..=8 {
        let sol = solve(&spec, n, 2).unwrap();
        let e = rel(&sol.lambda_corrections[1], &squared_second(n, c));
        assert!(e < 1e-150, "n = {n}: {e:e}");
    }
}

#[test]
fn squared_harmonic_third_correction_with_hyperbolic_cotangent() {
    let c = ctx();
    let spec = ProblemSpec::squared_harmonic(c);
    for n in 1..=8 {
        let sol = solve(&spec, n, 3).unwrap();
        let k = c.pi() * n;
        let coth = Float::with_val(c.bits(), k.tanh_ref()).recip();
        let e = rel(&sol.lambda_corrections[2], &squared_third(n, c, &coth));
        assert!(e < 1e-150, "n = {n}: {e:e}");
    }
}

#[test]
fn squared_harmonic_third_correction_as_printed_does_not_match() {
    let c = ctx();
    let spec = ProblemSpec::squared_harmonic(c);
    let sol = solve(&spec, 1, 3).unwrap();
    let cosh = (c.pi()).cosh();
    let e = rel(&sol.lambda_corrections[2], &squared_third(1, c, &cosh));
    assert!(e > 1e-3, "{e:e}");
}

#[test]
fn linear_potential_fourth_correction() {
    let c = ctx();
    let spec = ProblemSpec::linear_potential(c);
    for n in 1..=8 {
        let sol = solve(&spec, n, 4).unwrap();
        let e = rel(&sol.lambda_corrections[3], &linear_fourth(n, c));
        assert!(e < 1e-150, "n = {n}: {e:e}");
    }
}
