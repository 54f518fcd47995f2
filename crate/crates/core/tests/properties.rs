use rug::Float;

use fdsl::numerics::stability_probe;
use fdsl::verify::galerkin::GalerkinOracle;
use fdsl::verify::residual::residual_norm;
use fdsl::{solve, ConvergenceReport, PrecisionContext, ProblemSpec, Real};

fn ctx(digits: u32) -> PrecisionContext {
    PrecisionContext::new(digits).unwrap()
}

fn abs_diff(a: &Real, b: &Real) -> Real {
    Float::with_val(a.prec(), a - b).abs()
}

#[test]
fn linear_potential_corrections_have_reflection_parity() {
    let c = ctx(100);
    let spec = ProblemSpec::linear_potential(c);
    let tol = c.pow10(-80);
    for n in 1..=4u32 {
        let sol = solve(&spec, n, 6).unwrap();
        for term in &sol.terms {
            // u_n^(j)(1 - x) = s * u_n^(j)(x), s alternating in j and flipping with n
            let even_step = term.j % 2 == 0;
            let sign: i32 = if (n % 2 == 1) == even_step { 1 } else { -1 };
            for i in 0..=10 {
                let x = c.ratio(i, 10);
                let mirrored = Float::with_val(c.bits(), 1u32 - &x);
                let left = term.eval(&mirrored, 0).unwrap();
                let right = term.eval(&x, 0).unwrap() * sign;
                assert!(
                    abs_diff(&left, &right) < tol,
                    "n = {n}, j = {}, x = {i}/10",
                    term.j
                );
            }
        }
    }
}

#[test]
fn linear_potential_odd_corrections_vanish() {
    let c = ctx(100);
    let spec = ProblemSpec::linear_potential(c);
    let tol = c.pow10(-85);
    for n in 1..=5 {
        let sol = solve(&spec, n, 8).unwrap();
        for j in [3usize, 5, 7] {
            let v = &sol.lambda_corrections[j - 1];
            assert!(v.clone().abs() < tol, "n = {n}, j = {j}: {v}");
        }
    }
}

#[test]
fn lambda_corrections_sit_under_the_envelope() {
    let c = ctx(100);
    let cases = [
        (ProblemSpec::squared_harmonic(c), Some(0.2), 3..=8u32),
        (ProblemSpec::linear_potential(c), None, 1..=5u32),
    ];
    for (spec, omega, ns) in cases {
        for n in ns {
            let report = match omega {
                Some(w) => ConvergenceReport::with_omega(&spec, n, c.from_f64(w)).unwrap(),
                None => ConvergenceReport::new(&spec, n).unwrap(),
            };
            assert!(report.converges(), "n = {n}");
            let sol = solve(&spec, n, 10).unwrap();
            for j in 1..10 {
                let observed = sol.lambda_corrections[j].clone().abs();
                let envelope = report.lambda_envelope(j);
                assert!(
                    observed <= envelope,
                    "n = {n}, j = {j}: {observed} > {envelope}"
                );
            }
        }
    }
}

#[test]
fn lambda_corrections_decay_geometrically() {
    let c = ctx(100);
    let spec = ProblemSpec::linear_potential(c);
    for n in [1u32, 3, 10] {
        let r = ConvergenceReport::new(&spec, n).unwrap().r_n.to_f64();
        let sol = solve(&spec, n, 12).unwrap();
        let even: Vec<f64> = sol
            .lambda_corrections
            .iter()
            .step_by(2)
            .map(|v| v.to_f64().abs())
            .collect();
        for pair in even[1..].windows(2) {
            assert!(pair[1] < pair[0] * r, "n = {n}: {pair:?} with r = {r}");
        }
    }
}

#[test]
fn residuals_decrease_with_rank_and_index() {
    let c = ctx(120);
    let spec = ProblemSpec::linear_potential(c);
    let mut by_n: Vec<Vec<f64>> = Vec::new();
    for n in 1..=4 {
        let sol = solve(&spec, n, 6).unwrap();
        let column: Vec<f64> = (1..=6)
            .map(|m| {
                residual_norm(&sol.truncated(m).unwrap(), &spec)
                    .unwrap()
                    .value
                    .to_f64()
            })
            .collect();
        for pair in column.windows(2) {
            assert!(pair[1] < pair[0], "n = {n}: {column:?}");
        }
        by_n.push(column);
    }
    for m in 0..6 {
        for pair in by_n.windows(2) {
            assert!(
                pair[1][m] < pair[0][m],
                "m = {}: {} vs {}",
                m + 1,
                pair[0][m],
                pair[1][m]
            );
        }
    }
}

#[test]
fn galerkin_eigenvalue_is_stable_in_basis_size() {
    let c = ctx(50);
    let spec = ProblemSpec::linear_potential(c);
    let small = GalerkinOracle::assemble(&spec, 60, c).unwrap();
    let large = GalerkinOracle::assemble(&spec, 120, c).unwrap();
    for n in 1..=3 {
        let shift = solve(&spec, n, 2).unwrap().lambda_approx;
        let a = small.nearest_eigenvalue(&shift).unwrap();
        let b = large.nearest_eigenvalue(&shift).unwrap();
        let rel = (abs_diff(&a, &b) / b.clone().abs()).to_f64();
        assert!(rel < 1e-8, "n = {n}: {rel:e}");
    }
}

#[test]
fn doubling_precision_leaves_results_unchanged() {
    let lo = ctx(60);
    let hi = ctx(120);
    for n in [1u32, 4] {
        let digits = stability_probe(
            |c| Ok(solve(&ProblemSpec::squared_harmonic(*c), n, 8)?.lambda_approx),
            &hi,
            &lo,
        )
        .unwrap();
        assert!(digits >= lo.digits() - 10, "n = {n}: {digits}");
        let digits = stability_probe(
            |c| {
                let spec = ProblemSpec::linear_potential(*c);
                solve(&spec, n, 6)?.eigenfunction(&c.ratio(1, 3), 2)
            },
            &hi,
            &lo,
        )
        .unwrap();
        assert!(digits >= lo.digits() - 10, "n = {n}: {digits}");
    }
}
