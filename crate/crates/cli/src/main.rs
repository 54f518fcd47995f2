use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use fdsl::numerics::agreement_digits;
use fdsl::verify::galerkin::{galerkin_nearest_eigenvalue, ORACLE_DIGITS};
use fdsl::verify::residual::residual_norm;
use fdsl::{
    format_real, solve, ConvergenceReport, FDSolution, PrecisionContext, ProblemConfig, ProblemSpec,
};

/// Eigenvalue approximations for fourth-order Sturm-Liouville problems with
/// polynomial potentials.
#[derive(Parser, Debug)]
#[command(name = "fdsl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank-m eigenvalue approximations.
    Solve(SolveArgs),
    /// CSV of eigenvalue, residual and a-priori bound for every rank 0..=m.
    Sweep(SweepArgs),
    /// Convergence constants and error bounds.
    Check(CheckArgs),
    /// Cross-check against a sine-Galerkin discretization.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Problem file (see README for the grammar).
    #[arg(long, short = 'p')]
    problem: PathBuf,
    /// Eigenvalue indices: comma-separated, ranges like 1-5 allowed.
    #[arg(long, short = 'n', value_parser = parse_indices, default_value = "1")]
    n: IndexList,
    /// Working precision in decimal digits.
    #[arg(long, default_value_t = PrecisionContext::DEFAULT_DIGITS)]
    digits: u32,
    /// Significant digits in printed reals.
    #[arg(long, default_value_t = 50)]
    print_digits: usize,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// Rank of the approximation.
    #[arg(long, short = 'm', default_value_t = 10)]
    m: usize,
    /// Write the full solutions as JSON to this path (`-` for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Highest rank.
    #[arg(long, short = 'm', default_value_t = 10)]
    m: usize,
    /// Override the potential-size constant used for the bound column.
    #[arg(long)]
    omega: Option<String>,
    /// CSV destination; stdout when absent.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    /// Rank at which to evaluate the error bounds.
    #[arg(long, short = 'm')]
    m: Option<usize>,
    /// Override the potential-size constant.
    #[arg(long)]
    omega: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, short = 'm', default_value_t = 10)]
    m: usize,
    /// Sine-basis size.
    #[arg(long, default_value_t = 200)]
    size: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug)]
struct IndexList(Vec<u32>);

fn parse_indices(raw: &str) -> Result<IndexList, String> {
    let mut out = Vec::new();
    for part in raw.split(',').map(str::trim) {
        let num = |s: &str| -> Result<u32, String> {
            let v: u32 = s
                .trim()
                .parse()
                .map_err(|_| format!("`{s}` is not a positive integer"))?;
            if v == 0 {
                return Err("indices start at 1".into());
            }
            Ok(v)
        };
        match part.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo > hi {
                    return Err(format!("empty range `{part}`"));
                }
                out.extend(lo..=hi);
            }
            None => out.push(num(part)?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(IndexList(out))
}

impl Common {
    fn load(&self) -> Result<(ProblemSpec, PrecisionContext)> {
        let ctx = PrecisionContext::new(self.digits)?;
        let text = fs::read_to_string(&self.problem)
            .with_context(|| format!("reading {}", self.problem.display()))?;
        let spec = ProblemConfig::parse(&text)
            .and_then(|cfg| cfg.to_spec(ctx))
            .with_context(|| format!("in {}", self.problem.display()))?;
        Ok((spec, ctx))
    }

    fn fmt(&self, x: &fdsl::Real) -> String {
        format_real(x, self.print_digits)
    }
}

/// Runs `f` for every index in parallel, keeping results in index order.
fn per_index<T: Send>(indices: &[u32], f: impl Fn(u32) -> Result<T> + Sync) -> Result<Vec<T>> {
    indices
        .par_iter()
        .map(|&n| f(n).with_context(|| format!("n = {n}")))
        .collect()
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        None => Box::new(io::stdout().lock()),
        Some(p) if p == Path::new("-") => Box::new(io::stdout().lock()),
        Some(p) => {
            Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)
        }
    })
}

fn all_corrections_vanish(sol: &FDSolution) -> bool {
    sol.lambda_corrections.iter().all(|l| l.is_zero())
        && sol.terms[1..].iter().all(|t| {
            t.a.iter()
                .chain(&t.b)
                .chain(&t.c)
                .chain(&t.d)
                .all(|v| v.is_zero())
        })
}

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let (spec, _) = args.common.load()?;
    let sols = per_index(&args.common.n.0, |n| Ok(solve(&spec, n, args.m)?))?;
    let mut out = io::stdout().lock();
    writeln!(out, "{:>4}  {:>3}  lambda", "n", "m")?;
    for sol in &sols {
        write!(
            out,
            "{:>4}  {:>3}  {}",
            sol.n,
            sol.m,
            args.common.fmt(&sol.lambda_approx)
        )?;
        if sol.m > 0 && all_corrections_vanish(sol) {
            write!(out, "  (all corrections vanish)")?;
        }
        writeln!(out)?;
    }
    if let Some(path) = &args.json {
        let records: Vec<_> = sols
            .iter()
            .map(|s| s.record(args.common.print_digits))
            .collect();
        let mut w = open_output(Some(path))?;
        serde_json::to_writer_pretty(&mut w, &records)?;
        writeln!(w)?;
    }
    Ok(())
}

fn report_for(
    spec: &ProblemSpec,
    ctx: &PrecisionContext,
    n: u32,
    omega: Option<&str>,
) -> Result<ConvergenceReport> {
    Ok(match omega {
        Some(w) => ConvergenceReport::with_omega(spec, n, ctx.parse(w)?)?,
        None => ConvergenceReport::new(spec, n)?,
    })
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let (spec, ctx) = args.common.load()?;
    let rows = per_index(&args.common.n.0, |n| {
        let sol = solve(&spec, n, args.m)?;
        let report = report_for(&spec, &ctx, n, args.omega.as_deref())?;
        (0..=args.m)
            .map(|k| {
                let truncated = sol.truncated(k)?;
                let residual = residual_norm(&truncated, &spec)?;
                let bound = if k >= 1 {
                    report.lambda_bound(k).ok()
                } else {
                    None
                };
                Ok([
                    n.to_string(),
                    k.to_string(),
                    args.common.fmt(&truncated.lambda_approx),
                    format_real(&residual.value, 6),
                    residual.converged.to_string(),
                    bound.map(|b| format_real(&b, 6)).unwrap_or_default(),
                ])
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut w = csv::Writer::from_writer(open_output(args.output.as_deref())?);
    w.write_record([
        "n",
        "m",
        "lambda",
        "residual",
        "quadrature_converged",
        "lambda_bound",
    ])?;
    for row in rows.iter().flatten() {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> Result<()> {
    let (spec, ctx) = args.common.load()?;
    let reports = args
        .common
        .n
        .0
        .iter()
        .map(|&n| report_for(&spec, &ctx, n, args.omega.as_deref()))
        .collect::<Result<Vec<_>>>()?;
    let mut out = io::stdout().lock();
    match args.format {
        Format::Json => {
            let records: Vec<_> = reports.iter().map(|r| r.record(args.m, 6)).collect();
            serde_json::to_writer_pretty(&mut out, &records)?;
            writeln!(out)?;
        }
        Format::Text => {
            for r in &reports {
                writeln!(out, "n = {}", r.n)?;
                writeln!(out, "  omega = {}", format_real(&r.omega, 6))?;
                writeln!(out, "  M_n   = {}", format_real(&r.m_n, 6))?;
                writeln!(out, "  r_n   = {}", format_real(&r.r_n, 6))?;
                if r.converges() {
                    writeln!(out, "  sufficient condition met (r_n < 1)")?;
                    if let Some(m) = args.m {
                        if m >= 1 {
                            writeln!(
                                out,
                                "  |lambda - lambda^{m}| <= {}",
                                format_real(&r.lambda_bound(m)?, 6)
                            )?;
                        }
                        writeln!(
                            out,
                            "  ||u - u^{m}|| <= {} (closed form)",
                            format_real(&r.u_bound(m)?, 6)
                        )?;
                        writeln!(
                            out,
                            "  ||u - u^{m}|| <= {} (series form)",
                            format_real(&r.u_bound_sound(m)?, 6)
                        )?;
                    }
                } else {
                    writeln!(
                        out,
                        "  sufficient condition not met (r_n >= 1); the method may still converge, bounds not available"
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let (spec, _) = args.common.load()?;
    if args.size < 20 {
        bail!("--size must be at least 20");
    }
    let rows = per_index(&args.common.n.0, |n| {
        let sol = solve(&spec, n, args.m)?;
        let galerkin = galerkin_nearest_eigenvalue(&spec, &sol.lambda_approx, args.size);
        Ok((sol, galerkin))
    })?;
    let mut out = io::stdout().lock();
    writeln!(out, "{:>4}  {:>30}  {:>30}  digits", "n", "fd", "galerkin")?;
    let mut failures = 0;
    for (sol, galerkin) in &rows {
        match galerkin {
            Ok(g) => writeln!(
                out,
                "{:>4}  {:>30}  {:>30}  {}",
                sol.n,
                format_real(&sol.lambda_approx, 25),
                format_real(g, 25),
                agreement_digits(&sol.lambda_approx, g, ORACLE_DIGITS)
            )?,
            Err(e) => {
                failures += 1;
                writeln!(
                    out,
                    "{:>4}  {:>30}  {:>30}  -",
                    sol.n,
                    format_real(&sol.lambda_approx, 25),
                    "failed"
                )?;
                eprintln!("n = {}: {e}", sol.n);
            }
        }
    }
    if failures > 0 {
        bail!("oracle failed for {failures} index(es)");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Check(a) => cmd_check(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
