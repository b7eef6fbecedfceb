use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use clifford_malliavin::antisym::AntiTensor;
use clifford_malliavin::applications::{
    claim2_witness, concentration_tail, entropy_closed_form, fourth_moment, log_sobolev_check, ConcentrationOptions,
    Verdict,
};
use clifford_malliavin::error::{Error, Result};
use clifford_malliavin::grid::TimeGrid;
use clifford_malliavin::io::{read_element, read_tensor, ProcessJson};
use clifford_malliavin::ito::{adaptedness_violation, clark_ocone};
use clifford_malliavin::oracle::MatrixOracle;
use clifford_malliavin::par::Execution;
use clifford_malliavin::report::{Format, Report};
use clifford_malliavin::suite::{run_suite, Suite, SuiteConfig, DEFAULT_TOL};

/// Malliavin calculus on a discretized Clifford algebra, checked against a
/// Jordan-Wigner matrix oracle.
///
/// Exit status is 0 when every assertion holds, 1 when one fails and 2 on
/// usage or input errors. CLIFFORD_MAX_DIM raises the oracle's slot cap
/// (default 10).
#[derive(Parser)]
#[command(name = "clifford-malliavin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Keep every kernel on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct SuiteArgs {
    /// Number of grid slots d.
    #[arg(long, default_value_t = 6)]
    slots: usize,

    /// Slot width Δ.
    #[arg(long, default_value_t = 1.0)]
    width: f64,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Base residual tolerance; stricter or looser checks scale with it.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,

    /// Comma-separated suites: algebra, malliavin, ito, oracle, applications or all.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    suite: Vec<String>,

    /// Override the number of random cases per check.
    #[arg(long)]
    cases: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 6)]
    slots: usize,

    #[arg(long, default_value_t = 1.0)]
    width: f64,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,

    #[arg(long)]
    cases: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the randomized verification suites.
    Verify(SuiteArgs),

    /// Run the matrix-oracle suite alone.
    OracleCheck(OracleArgs),

    /// Martingale representation of an element read from JSON.
    ClarkOcone {
        #[arg(long)]
        input: PathBuf,

        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },

    /// Fourth-moment decomposition of J_q(f) for a tensor read from JSON.
    FourthMoment {
        #[arg(long)]
        input: PathBuf,

        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },

    /// K(F) and the contraction norms for f = e_1∧e_2∧e_3∧e_4.
    Claim2 {
        #[arg(long, default_value_t = 4)]
        dim: usize,

        #[arg(long, default_value_t = 1.0)]
        width: f64,

        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },

    /// Spectral tail of a self-adjoint element against its concentration bound.
    #[command(allow_negative_numbers = true)]
    Concentrate {
        #[arg(long)]
        input: PathBuf,

        /// Largest x (default: spectral maximum minus the mean).
        #[arg(long)]
        xmax: Option<f64>,

        #[arg(long, default_value_t = 20)]
        xsteps: usize,

        #[arg(long, default_value_t = 400)]
        ssteps: usize,

        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },

    /// Entropy against Malliavin energy for the two-point function φ(Ψ_1).
    #[command(allow_negative_numbers = true)]
    Logsobolev {
        #[arg(long)]
        phi1: f64,

        #[arg(long)]
        phim1: f64,

        #[arg(long, default_value_t = 6)]
        slots: usize,

        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let report = match run(cli.command, exec) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, format, cli.out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        for a in report.failures() {
            eprintln!("failed: {} (lhs {:e}, rhs {:e})", a.name, a.lhs, a.rhs);
        }
        ExitCode::from(1)
    }
}

fn emit(report: &Report, format: Format, out: Option<&Path>) -> Result<()> {
    let bytes = report.emit(format)?;
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn parse_suites(names: &[String]) -> Result<Vec<Suite>> {
    if names.iter().any(|n| n == "all") {
        return Ok(Suite::ALL.to_vec());
    }
    names.iter().map(|n| n.parse()).collect()
}

fn run(command: Command, exec: Execution) -> Result<Report> {
    match command {
        Command::Verify(a) => run_suite(&SuiteConfig {
            slots: a.slots,
            width: a.width,
            seed: a.seed,
            tol: a.tol,
            suites: parse_suites(&a.suite)?,
            cases: a.cases,
            execution: exec,
        }),
        Command::OracleCheck(a) => {
            let mut r = run_suite(&SuiteConfig {
                slots: a.slots,
                width: a.width,
                seed: a.seed,
                tol: a.tol,
                suites: vec![Suite::Oracle],
                cases: a.cases,
                execution: exec,
            })?;
            r.command = "oracle-check".into();
            Ok(r)
        }
        Command::ClarkOcone { input, tol } => clark_ocone_report(&input, tol),
        Command::FourthMoment { input, tol } => fourth_moment_report(&input, tol),
        Command::Claim2 { dim, width, tol } => claim2_report(dim, width, tol),
        Command::Concentrate { input, xmax, xsteps, ssteps, tol } => {
            let opts = ConcentrationOptions { x_max: xmax, x_steps: xsteps, s_steps: ssteps, s_max: None, execution: exec };
            concentrate_report(&input, &opts, tol)
        }
        Command::Logsobolev { phi1, phim1, slots, tol } => logsobolev_report(phi1, phim1, slots, tol),
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")))
    }
}

fn clark_ocone_report(input: &Path, tol: f64) -> Result<Report> {
    check_tol(tol)?;
    let f = read_element(input)?;
    let co = clark_ocone(&f);
    let error = f.distance(&co.reconstruct())?;
    let mut r = Report::new("clark-ocone").with_grid(f.grid());
    r.input("input", input.display().to_string()).input("tol", tol);
    r.quantity("mean", json!({ "re": co.mean.re, "im": co.mean.im }))
        .quantity("integrand", ProcessJson::from(co.integrand.process()))
        .quantity("reconstruction_error", error);
    r.assert_le("reconstruction_error", error, tol);
    let violations = adaptedness_violation(co.integrand.process()).map_or(0.0, |_| 1.0);
    r.assert_le("integrand_adapted", violations, 0.0);
    Ok(r)
}

fn fourth_moment_report(input: &Path, tol: f64) -> Result<Report> {
    check_tol(tol)?;
    let f = read_tensor(input)?;
    let rep = fourth_moment(&f)?;
    let mut r = Report::new("fourth-moment").with_grid(f.grid());
    r.input("input", input.display().to_string()).input("tol", tol);
    if let serde_json::Value::Object(fields) = serde_json::to_value(&rep)? {
        for (k, v) in fields {
            r.quantity(&k, v);
        }
    }
    r.quantity("formula_m4", rep.formula_m4())
        .quantity("formula_m4_typeset_c0", rep.formula_m4_typeset_c0())
        .quantity("formula_m4_typeset_t", rep.formula_m4_typeset_t());
    r.assert_le("formula_vs_chaos", (rep.formula_m4() - rep.m4).abs(), tol);
    if let Some(oracle) = rep.oracle_m4 {
        r.assert_le("formula_vs_oracle", (rep.formula_m4() - oracle).abs(), tol);
    }
    r.assert_le("odd_parity_norm", rep.max_odd_parity_norm(), 1e-12);
    Ok(r)
}

fn claim2_report(dim: usize, width: f64, tol: f64) -> Result<Report> {
    check_tol(tol)?;
    let grid = TimeGrid::new(dim, width)?;
    if dim < 4 {
        return Err(Error::InvalidInput(format!("claim2 needs --dim ≥ 4, got {dim}")));
    }
    let fs = [1, 2, 3, 4].map(|k| AntiTensor::basis(grid, &[k]));
    let [a, b, c, d] = fs;
    let w = claim2_witness(&[a?, b?, c?, d?])?;
    let mut r = Report::new("claim2").with_grid(grid);
    r.input("dim", dim).input("width", width).input("tol", tol);
    r.quantity("wedge3_integral", w.wedge3_integral)
        .quantity("wedge3_expected", w.wedge3_expected)
        .quantity("wedge2_norm", w.wedge2_norm)
        .quantity("k", w.k)
        .quantity("m4", w.fourth_moment.m4)
        .quantity("oracle_m4", w.fourth_moment.oracle_m4);
    r.assert_le("wedge2_norm", w.wedge2_norm, 1e-12);
    r.assert_le("wedge3_integral_error", (w.wedge3_integral - w.wedge3_expected).abs(), 1e-12);
    r.assert_le("k_error", (w.k + 1.0).abs(), tol);
    if let Some(m4) = w.fourth_moment.oracle_m4 {
        let k = m4 - w.fourth_moment.c0 - w.fourth_moment.w0;
        r.quantity("oracle_k", k);
        r.assert_le("oracle_k_error", (k + 1.0).abs(), tol);
    }
    Ok(r)
}

fn concentrate_report(input: &Path, opts: &ConcentrationOptions, tol: f64) -> Result<Report> {
    check_tol(tol)?;
    let f = read_element(input)?;
    let oracle = MatrixOracle::new(f.grid())?;
    let rep = concentration_tail(&f, &oracle, opts)?;
    let mut r = Report::new("concentrate").with_grid(f.grid());
    r.input("input", input.display().to_string())
        .input("xmax", opts.x_max)
        .input("xsteps", opts.x_steps)
        .input("ssteps", opts.s_steps)
        .input("tol", tol);
    if let serde_json::Value::Object(fields) = serde_json::to_value(&rep)? {
        for (k, v) in fields {
            r.quantity(&k, v);
        }
    }
    if rep.verdict == Verdict::Verified {
        for (j, p) in rep.points.iter().enumerate() {
            if let Some(bound) = p.bound {
                r.assert_le(format!("tail_le_bound.{j}"), p.exact_tail - bound, tol);
            }
        }
    }
    Ok(r)
}

fn logsobolev_report(phi1: f64, phim1: f64, slots: usize, tol: f64) -> Result<Report> {
    check_tol(tol)?;
    let rep = log_sobolev_check(phi1, phim1, slots)?;
    let closed = entropy_closed_form(phi1, phim1);
    let mut r = Report::new("logsobolev").with_grid(TimeGrid::new(slots, 1.0 / slots as f64)?);
    r.input("phi1", phi1).input("phim1", phim1).input("slots", slots).input("tol", tol);
    if let serde_json::Value::Object(fields) = serde_json::to_value(rep)? {
        for (k, v) in fields {
            r.quantity(&k, v);
        }
    }
    r.quantity("entropy_closed_form", closed);
    r.assert_le("entropy_minus_bound", rep.entropy - rep.bound, tol);
    r.assert_le("quadrature_vs_closed_form", (rep.entropy - closed).abs(), 1e-8);
    Ok(r)
}
