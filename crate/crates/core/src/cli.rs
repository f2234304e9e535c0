//! Command-line front end: each subcommand runs one pipeline and emits a JSON
//! report; `export-grid` also writes a CSV lattice.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::algebra::gaussian::{format_rational, parse_rational};
use crate::algebra::serial::{poly_to_json, ratfun_to_json};
use crate::algebra::{GaussianRational, RatFun, TriPoly, Var};
use crate::darboux::{adler_moser_potential, adler_moser_theta, check_eigenmap, darboux_transform, eigen_residual, RatFun1D};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::grid::{export_grid, export_grid_guarded, GridReport, Window};
use crate::moutard::{certify_nonvanishing, estimate_decay, kernel_residual, two_step_construct, HarmonicSeed, MoutardResult, Verdict};
use crate::nv::{blowup_time, extended_tau, flow_solve, nv_fields, nv_residual, FlowingSeed, NVSolution};
use crate::periodic::{
    fd_kernel_residual, first_step_potential, periodic_potential, periodic_potential_shifted, periodic_psi, periodic_theta,
    tau_minimum, tau_per, Lattice, PeriodicParams,
};
use crate::report::{to_json, Check, VerifyReport};
use crate::sigma::{roots_trajectory, sigma_evolve, SigmaState};

/// Decay is fitted on rays over this range of radii.
const DECAY_RANGE: (f64, f64) = (1e2, 1e5);
const DECAY_RAYS: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "moutard-lab", version, about = "Rational soliton potentials from iterated Moutard transformations")]
struct Cli {
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add exact term lists of the constructed objects to the report.
    #[arg(long, global = true)]
    dump_symbolic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-step Moutard construction from two holomorphic seeds.
    Construct(ConstructArgs),
    /// Exact reproduction checks of the worked examples.
    Verify(VerifyArgs),
    /// Time-dependent construction and the NV identities.
    Evolve(SourceArgs),
    /// First time at which the tau function acquires a real zero.
    Blowup(BlowupArgs),
    /// Coefficient flow of p_t = p_zzz and the motion of the roots.
    Sigma(SigmaArgs),
    /// One-dimensional Darboux steps and Adler-Moser potentials.
    Darboux1d(DarbouxArgs),
    /// Periodic potentials over a constant background.
    Periodic(PeriodicArgs),
    /// Sample a field on a lattice and write it as CSV.
    ExportGrid(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Example {
    Ord2,
    Ord3,
    Blowup,
    Periodic,
}

impl Example {
    fn name(self) -> &'static str {
        match self {
            Example::Ord2 => "ord2",
            Example::Ord3 => "ord3",
            Example::Blowup => "blowup",
            Example::Periodic => "periodic",
        }
    }
}

#[derive(Args, Debug, Clone)]
struct SourceArgs {
    #[arg(long, value_enum)]
    example: Option<Example>,
    /// First holomorphic seed, e.g. "i z^2".
    #[arg(long, allow_hyphen_values = true)]
    p1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p2: Option<String>,
    /// Integration constant as "p/q".
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Run kernel, positivity and decay checks.
    #[arg(long)]
    verify: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VerifyTarget {
    Ord2,
    Ord3,
    Blowup,
    Stationary,
    All,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    example: VerifyTarget,
}

#[derive(Args, Debug)]
struct BlowupArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Compare with the published potential and blow-up time.
    #[arg(long)]
    reproduce: bool,
}

#[derive(Args, Debug)]
struct SigmaArgs {
    /// Initial polynomial in z.
    #[arg(long, allow_hyphen_values = true)]
    seed: String,
    /// Number of coefficients minus one; defaults to the degree of the seed.
    #[arg(long)]
    degree: Option<usize>,
    /// Exact evolution time.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    t: String,
    /// Comma-separated sample times for the root trajectory.
    #[arg(long, allow_hyphen_values = true)]
    times: Option<String>,
}

#[derive(Args, Debug)]
struct DarbouxArgs {
    /// Potential, a polynomial in x (with --omega).
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    u: String,
    /// Zero mode to transform by, a polynomial in x.
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    /// Eigenfunction to push through the step (with --omega).
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    energy: String,
    /// Adler-Moser order, used when --omega is absent.
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    tau2: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    tau3: String,
}

#[derive(Args, Debug)]
struct PeriodicArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    k: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    c: f64,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    /// Points per axis of the tau scan over one period cell.
    #[arg(long, default_value_t = 401)]
    scan: usize,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value = "u")]
    field: String,
    /// x_min x_max y_min y_max
    #[arg(long, num_args = 4, allow_negative_numbers = true, default_values_t = [-5.0, 5.0, -5.0, 5.0])]
    window: Vec<f64>,
    /// Lattice points per axis.
    #[arg(long, default_value_t = 200)]
    res: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t: f64,
    /// Write NaN at poles instead of failing.
    #[arg(long)]
    allow_poles: bool,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Periodic parameters a, b, k, C (periodic example only).
    #[arg(long, num_args = 4, allow_negative_numbers = true)]
    params: Option<Vec<f64>>,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match execute(&cli) {
        Ok(Some(report)) => match emit(&cli, &report.to_json()) {
            Ok(()) => i32::from(!report.passed),
            Err(e) => fail(&cli, e),
        },
        Ok(None) => 0,
        Err(e) => fail(&cli, e),
    }
}

fn fail(cli: &Cli, e: Error) -> i32 {
    let body = json!({"error": e.kind(), "message": e.to_string()});
    eprintln!("error: {e}");
    let text = to_json(&body).unwrap_or_else(|_| format!("{body}\n"));
    if let Some(path) = &cli.out {
        let _ = std::fs::write(path, &text);
    } else {
        let _ = io::stdout().write_all(text.as_bytes());
    }
    match e {
        Error::Parse(_) | Error::InvalidParams(_) | Error::NotHolomorphic(_) | Error::Unsupported(_) => 2,
        _ => 1,
    }
}

fn emit(cli: &Cli, text: &Result<String>) -> Result<()> {
    let text = text.as_ref().map_err(|e| Error::InvalidParams(e.to_string()))?;
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// `None` means nothing further should be printed: the CSV went to stdout and
/// there is no report file.
fn execute(cli: &Cli) -> Result<Option<VerifyReport>> {
    let dump = cli.dump_symbolic;
    match &cli.command {
        Command::Construct(a) => construct(a, dump).map(Some),
        Command::Verify(a) => verify(a.example).map(Some),
        Command::Evolve(a) => evolve(a, dump).map(Some),
        Command::Blowup(a) => blowup(a, dump).map(Some),
        Command::Sigma(a) => sigma(a).map(Some),
        Command::Darboux1d(a) => darboux1d(a).map(Some),
        Command::Periodic(a) => periodic(a).map(Some),
        Command::ExportGrid(a) => {
            let report = export(a)?;
            Ok((cli.out.is_some() || a.csv.is_some()).then_some(report))
        }
    }
}

fn rational(s: &str) -> Result<BigRational> {
    parse_rational(s).ok_or_else(|| Error::Parse(format!("'{s}' is not a rational number p/q")))
}

fn float_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Parse(format!("'{v}' is not a number"))))
        .collect()
}

/// Published values a static construction is compared against.
struct Printed {
    u: RatFun,
    psi1: RatFun,
    psi2: RatFun,
    decay_u: f64,
    decay_psi: f64,
}

struct StaticSource {
    label: String,
    p1: HarmonicSeed,
    p2: HarmonicSeed,
    c: BigRational,
    printed: Option<Printed>,
}

impl StaticSource {
    fn example(e: Example) -> Result<Self> {
        match e {
            Example::Ord2 => Ok(Self {
                label: "ord2".into(),
                p1: fixtures::ord2_p1(),
                p2: fixtures::ord2_p2(),
                c: fixtures::ord2_c(),
                printed: Some(Printed {
                    u: fixtures::ord2_u(),
                    psi1: fixtures::ord2_psi1(),
                    psi2: fixtures::ord2_psi2(),
                    decay_u: -6.0,
                    decay_psi: -2.0,
                }),
            }),
            Example::Ord3 => Ok(Self {
                label: "ord3".into(),
                p1: fixtures::ord3_p1(),
                p2: fixtures::ord3_p2(),
                c: fixtures::ord3_c(),
                printed: Some(Printed {
                    u: fixtures::ord3_u(),
                    psi1: fixtures::ord3_psi1(),
                    psi2: fixtures::ord3_psi2(),
                    decay_u: -8.0,
                    decay_psi: -3.0,
                }),
            }),
            other => Err(Error::InvalidParams(format!("example '{}' is not a static construction", other.name()))),
        }
    }

    fn from_args(a: &SourceArgs) -> Result<Self> {
        match (a.example, &a.p1, &a.p2, &a.c) {
            (Some(e), None, None, None) => Self::example(e),
            (None, Some(p1), Some(p2), Some(c)) => Ok(Self {
                label: "custom".into(),
                p1: HarmonicSeed::parse(p1)?,
                p2: HarmonicSeed::parse(p2)?,
                c: rational(c)?,
                printed: None,
            }),
            _ => Err(Error::InvalidParams("give either --example or all of --p1, --p2, --c".into())),
        }
    }

    fn echo(&self) -> Value {
        json!({
            "source": self.label,
            "p1": self.p1.poly().to_string(),
            "p2": self.p2.poly().to_string(),
            "c": format_rational(&self.c),
        })
    }
}

struct FlowSource {
    label: String,
    p1: FlowingSeed,
    p2: FlowingSeed,
    c: BigRational,
    reproducible: bool,
}

impl FlowSource {
    fn from_args(a: &SourceArgs, default: Option<Example>) -> Result<Self> {
        let example = a.example.or(if a.p1.is_none() && a.p2.is_none() && a.c.is_none() { default } else { None });
        match (example, &a.p1, &a.p2, &a.c) {
            (Some(Example::Blowup), None, None, None) => {
                let (p1, p2) = fixtures::blowup_flowing();
                Ok(Self { label: "blowup".into(), p1, p2, c: fixtures::blowup_c(), reproducible: true })
            }
            (Some(e), None, None, None) => {
                let s = StaticSource::example(e)?;
                Ok(Self { label: s.label, p1: flow_solve(&s.p1), p2: flow_solve(&s.p2), c: s.c, reproducible: false })
            }
            (None, Some(p1), Some(p2), Some(c)) => Ok(Self {
                label: "custom".into(),
                p1: flow_solve(&HarmonicSeed::parse(p1)?),
                p2: flow_solve(&HarmonicSeed::parse(p2)?),
                c: rational(c)?,
                reproducible: false,
            }),
            _ => Err(Error::InvalidParams("give either --example or all of --p1, --p2, --c".into())),
        }
    }

    fn echo(&self) -> Value {
        json!({
            "source": self.label,
            "p1": self.p1.poly().to_string(),
            "p2": self.p2.poly().to_string(),
            "c": format_rational(&self.c),
        })
    }

    fn phi(&self) -> Result<TriPoly> {
        extended_tau(&self.p1, &self.p2, &self.c)
    }
}

fn scale_string(s: Option<GaussianRational>) -> Value {
    s.map_or(Value::Null, |c| Value::from(c.to_string()))
}

fn static_checks(r: &mut VerifyReport, prefix: &str, src: &StaticSource, res: &MoutardResult) {
    r.check(Check::exact(&format!("{prefix}kernel_psi1"), &kernel_residual(&res.u, &res.psi1)));
    r.check(Check::exact(&format!("{prefix}kernel_psi2"), &kernel_residual(&res.u, &res.psi2)));
    r.check(Check::exact_predicate(&format!("{prefix}tau_sigma_fixed"), res.tau.is_sigma_fixed(), || {
        "tau differs from its conjugate".into()
    }));
    let cert = certify_nonvanishing(&res.tau);
    r.check(Check::numeric_predicate(
        &format!("{prefix}tau_nonvanishing"),
        cert.grid_min,
        cert.verdict == Verdict::CertifiedPositive,
        || cert.verdict.label(),
    ));
    if let Some(p) = &src.printed {
        r.check(Check::exact(&format!("{prefix}u_matches_printed"), &(&res.u - &p.u)));
        let s1 = res.psi1.scalar_ratio(&p.psi1);
        let s2 = res.psi2.scalar_ratio(&p.psi2);
        r.check(Check::exact_predicate(&format!("{prefix}psi1_matches_printed_up_to_scale"), s1.is_some(), || {
            "psi_1 is not a constant multiple of the printed form".into()
        }));
        r.check(Check::exact_predicate(&format!("{prefix}psi2_matches_printed_up_to_scale"), s2.is_some(), || {
            "psi_2 is not a constant multiple of the printed form".into()
        }));
        r.set(&format!("{prefix}psi_scales"), json!({"psi1": scale_string(s1), "psi2": scale_string(s2)}));
    }
    r.set(
        &format!("{prefix}tau_certificate"),
        json!({"verdict": cert.verdict.label(), "grid_min": cert.grid_min, "radius": cert.radius, "sign": cert.sign}),
    );
}

fn construct(a: &ConstructArgs, dump: bool) -> Result<VerifyReport> {
    let src = StaticSource::from_args(&a.source)?;
    let res = two_step_construct(&src.p1, &src.p2, &src.c)?;
    let mut r = VerifyReport::new("construct");
    r.set("input", src.echo());
    r.set("tau", res.tau.to_string());
    r.set("u", res.u.to_string());
    r.set("psi1", res.psi1.to_string());
    r.set("psi2", res.psi2.to_string());
    if a.verify {
        static_checks(&mut r, "", &src, &res);
        let (lo, hi) = DECAY_RANGE;
        let du = estimate_decay(&res.u, lo, hi, DECAY_RAYS)?;
        let d1 = estimate_decay(&res.psi1, lo, hi, DECAY_RAYS)?;
        let d2 = estimate_decay(&res.psi2, lo, hi, DECAY_RAYS)?;
        r.set("decay", json!({"u": du, "psi1": d1, "psi2": d2}));
        if let Some(p) = &src.printed {
            r.check(Check::numeric("decay_u", (du - p.decay_u).abs(), 0.1));
            r.check(Check::numeric("decay_psi1", (d1 - p.decay_psi).abs(), 0.05));
            r.check(Check::numeric("decay_psi2", (d2 - p.decay_psi).abs(), 0.05));
        }
    }
    if dump {
        r.set(
            "symbolic",
            json!({
                "tau": poly_to_json(&res.tau),
                "u": ratfun_to_json(&res.u),
                "psi1": ratfun_to_json(&res.psi1),
                "psi2": ratfun_to_json(&res.psi2),
            }),
        );
    }
    Ok(r)
}

fn nv_checks(r: &mut VerifyReport, prefix: &str, sol: &NVSolution) {
    r.check(Check::exact(&format!("{prefix}nv_residual"), &nv_residual(sol)));
    r.check(Check::exact(&format!("{prefix}constraint_dbar_v_eq_d_u"), &sol.constraint_defect()));
    r.check(Check::exact_predicate(&format!("{prefix}phi_sigma_fixed"), sol.phi.is_sigma_fixed(), || {
        "Phi differs from its conjugate".into()
    }));
}

fn printed_blowup_check(r: &mut VerifyReport, prefix: &str, sol: &NVSolution) -> bool {
    let diff = &sol.u - &fixtures::blowup_u_printed();
    let matches = diff.is_zero();
    r.check(Check::exact(&format!("{prefix}u_matches_printed"), &diff));
    r.set("matches_printed_U", matches);
    if !matches {
        r.set(&format!("{prefix}printed_difference"), diff.to_string());
    }
    matches
}

fn verify(target: VerifyTarget) -> Result<VerifyReport> {
    let mut r = VerifyReport::new("verify");
    let all = target == VerifyTarget::All;
    let prefix = |name: &str| if all { format!("{name}.") } else { String::new() };
    for (t, e) in [(VerifyTarget::Ord2, Example::Ord2), (VerifyTarget::Ord3, Example::Ord3)] {
        if all || target == t {
            let src = StaticSource::example(e)?;
            let res = two_step_construct(&src.p1, &src.p2, &src.c)?;
            static_checks(&mut r, &prefix(e.name()), &src, &res);
        }
    }
    if all || target == VerifyTarget::Blowup {
        let (p1, p2) = fixtures::blowup_flowing();
        let sol = nv_fields(&extended_tau(&p1, &p2, &fixtures::blowup_c())?)?;
        let pre = prefix("blowup");
        nv_checks(&mut r, &pre, &sol);
        printed_blowup_check(&mut r, &pre, &sol);
    }
    if all || target == VerifyTarget::Stationary {
        let (a, b, c) = (fixtures::ord2_p1(), fixtures::ord2_p2(), fixtures::ord2_c());
        let phi = extended_tau(&flow_solve(&a), &flow_solve(&b), &c)?;
        let pre = prefix("stationary");
        let static_tau = crate::moutard::static_tau(&a, &b, &c);
        r.check(Check::exact_predicate(&format!("{pre}phi_equals_static_tau"), phi == static_tau, || {
            format!("extended tau {phi} differs from the static one")
        }));
        let sol = nv_fields(&phi)?;
        nv_checks(&mut r, &pre, &sol);
        r.check(Check::exact(&format!("{pre}u_t_vanishes"), &sol.u.derive(Var::T)));
    }
    Ok(r)
}

fn evolve(a: &SourceArgs, dump: bool) -> Result<VerifyReport> {
    let src = FlowSource::from_args(a, None)?;
    let phi = src.phi()?;
    let sol = nv_fields(&phi)?;
    let mut r = VerifyReport::new("evolve");
    r.set("input", src.echo());
    r.set("phi", phi.to_string());
    r.set("U", sol.u.to_string());
    r.set("stationary", !phi.contains_var(Var::T));
    nv_checks(&mut r, "", &sol);
    if dump {
        r.set("symbolic", json!({"phi": poly_to_json(&phi), "U": ratfun_to_json(&sol.u), "V": ratfun_to_json(&sol.v)}));
    }
    Ok(r)
}

fn blowup(a: &BlowupArgs, dump: bool) -> Result<VerifyReport> {
    let src = FlowSource::from_args(&a.source, Some(Example::Blowup))?;
    if a.reproduce && !src.reproducible {
        return Err(Error::InvalidParams("--reproduce applies to the blowup example only".into()));
    }
    let phi = src.phi()?;
    let sol = nv_fields(&phi)?;
    let mut r = VerifyReport::new("blowup");
    r.set("input", src.echo());
    r.set("phi", phi.to_string());
    nv_checks(&mut r, "", &sol);
    let b = blowup_time(&phi)?;
    r.set("t_star", b.t_star);
    r.set("t_star_exact", b.t_star_exact.as_ref().map_or(Value::Null, |q| format_rational(q).into()));
    r.set("witnesses", b.witnesses.iter().map(|&(x, y)| json!([x, y])).collect::<Vec<_>>());
    r.set("g", b.g.to_string());
    r.set("g_min", b.g_min);
    r.set("c_t", format_rational(&b.c));
    if a.reproduce {
        printed_blowup_check(&mut r, "", &sol);
        r.check(Check::numeric("t_star_vs_29_12", (b.t_star - 29.0 / 12.0).abs(), 1e-6));
        let u0 = sol.u.substitute(Var::T, &GaussianRational::from(0))?;
        let d = estimate_decay(&u0, DECAY_RANGE.0, DECAY_RANGE.1, DECAY_RAYS)?;
        r.set("decay_U_t0", d);
        r.check(Check::numeric("decay_U_t0", (d + 3.0).abs(), 0.05));
    }
    if dump {
        r.set("symbolic", json!({"phi": poly_to_json(&phi), "U": ratfun_to_json(&sol.u)}));
    }
    Ok(r)
}

fn complex_pairs(v: &[num_complex::Complex64]) -> Value {
    v.iter().map(|c| json!([c.re, c.im])).collect::<Vec<_>>().into()
}

fn sigma(a: &SigmaArgs) -> Result<VerifyReport> {
    let seed = HarmonicSeed::parse(&a.seed)?;
    let n = a.degree.unwrap_or(seed.poly().degree_in(Var::Z) as usize);
    let state = SigmaState::from_seed(&seed, n)?;
    let t = rational(&a.t)?;
    let evolved = sigma_evolve(&state, &t);
    let flowed = flow_solve(&seed).poly().substitute(Var::T, &GaussianRational::real(t.clone()));
    let mut r = VerifyReport::new("sigma");
    r.set("seed", seed.poly().to_string());
    r.set("t", format_rational(&t));
    r.set("coefficients", evolved.sigma.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    r.set("polynomial", evolved.to_poly().to_string());
    r.check(Check::exact_predicate("sigma_matches_flow", evolved.to_poly() == flowed, || {
        format!("coefficient flow gives {} but p_t = p_zzz gives {}", evolved.to_poly(), flowed)
    }));
    let times = match &a.times {
        Some(s) => float_list(s)?,
        None => vec![0.0, crate::algebra::gaussian::rat_to_f64(&t)],
    };
    if n > 0 {
        let traj = roots_trajectory(&state, &times)?;
        r.set(
            "trajectory",
            json!({
                "times": traj.times,
                "roots": traj.roots.iter().map(|v| complex_pairs(v)).collect::<Vec<_>>(),
                "matched": traj.matched,
                "warnings": traj.warnings,
            }),
        );
    }
    Ok(r)
}

fn darboux1d(a: &DarbouxArgs) -> Result<VerifyReport> {
    let mut r = VerifyReport::new("darboux1d");
    match &a.omega {
        Some(omega) => {
            let u = RatFun1D::parse_poly(&a.u)?;
            let omega = RatFun1D::parse_poly(omega)?;
            r.set("u", u.to_string());
            r.set("omega", omega.to_string());
            let res = eigen_residual(&u, &omega, &GaussianRational::from(0));
            r.check(Check::exact("omega_in_kernel", res.inner()));
            if !res.is_zero() {
                return Ok(r);
            }
            let ut = darboux_transform(&u, &omega)?;
            r.set("u_transformed", RatFun1D::new(ut.inner().reduce())?.to_string());
            if let Some(phi) = &a.phi {
                let e = GaussianRational::real(rational(&a.energy)?);
                let c = check_eigenmap(&u, &omega, &RatFun1D::parse_poly(phi)?, &e)?;
                r.set("phi_image", RatFun1D::new(c.image.inner().reduce())?.to_string());
                r.check(Check::exact("phi_eigenfunction", c.input_residual.inner()));
                r.check(Check::exact("image_eigenfunction", c.image_residual.inner()));
            }
        }
        None => {
            let taus = [rational(&a.tau2)?, rational(&a.tau3)?];
            let theta = adler_moser_theta(a.n, &taus)?;
            let u = adler_moser_potential(a.n, &taus)?;
            r.set("n", a.n);
            r.set("tau", taus.iter().map(format_rational).collect::<Vec<_>>());
            r.set("theta", theta.to_string());
            r.set("u", u.to_string());
            if a.n < 3 {
                let next = adler_moser_theta(a.n + 1, &taus)?;
                let mode = next.div(&theta)?;
                let res = eigen_residual(&u, &mode, &GaussianRational::from(0));
                r.check(Check::exact("next_ratio_in_kernel", res.inner()));
            }
        }
    }
    Ok(r)
}

fn periodic(a: &PeriodicArgs) -> Result<VerifyReport> {
    let p = PeriodicParams::new(a.a, a.b, a.k, a.c)?;
    if !(a.h > 0.0 && a.h < 0.1) || a.scan < 2 {
        return Err(Error::InvalidParams("need 0 < h < 0.1 and scan >= 2".into()));
    }
    let mut r = VerifyReport::new("periodic");
    r.set("params", json!({"a": p.a, "b": p.b, "k": p.k, "c": p.c}));
    let cell = Lattice { x_min: -PI, x_max: PI, y_min: -PI, y_max: PI, n: a.scan };
    let (min, at) = tau_minimum(&p, &cell);
    r.set("tau_min", json!({"value": min, "at": [at.0, at.1]}));
    r.check(Check::numeric_predicate("tau_positive", min, min > 0.0, || format!("tau_per reaches {min} at {at:?}")));
    let probe = (PI / 2.0, 0.0);
    r.set("u_at_probe", json!({"x": probe.0, "y": probe.1, "u": periodic_potential(&p, probe.0, probe.1).ok(),
        "u_shifted": periodic_potential_shifted(&p, probe.0, probe.1).ok()}));
    if min > 0.0 {
        let lattice = Lattice { x_min: -PI, x_max: PI, y_min: -PI, y_max: PI, n: 41 };
        let r1 = fd_kernel_residual(&p, &lattice, a.h)?;
        let r2 = fd_kernel_residual(&p, &lattice, a.h / 2.0)?;
        r.set("fd_residuals", json!({"h": a.h, "r_h": r1, "r_h_half": r2}));
        r.check(Check::numeric("fd_kernel_residual", r1, 1e-4));
        let ratio = r1 / r2;
        r.check(Check::numeric_predicate("fd_convergence_ratio", ratio, ratio >= 3.5, || {
            format!("halving h reduced the residual only {ratio:.3}x")
        }));
    }
    Ok(r)
}

type Field = Box<dyn Fn(f64, f64) -> Result<f64> + Sync>;
type GuardFn = Box<dyn Fn(f64, f64) -> f64 + Sync>;

fn rational_field(f: RatFun, t: f64) -> Field {
    Box::new(move |x, y| Ok(f.eval_xyt(x, y, t)?.re))
}

fn poly_field(p: TriPoly, t: f64) -> Field {
    Box::new(move |x, y| Ok(p.eval_xyt(x, y, t).re))
}

fn poly_guard(p: TriPoly, t: f64) -> GuardFn {
    Box::new(move |x, y| p.eval_xyt(x, y, t).re)
}

fn unknown_field(field: &str, choices: &str) -> Error {
    Error::InvalidParams(format!("unknown field '{field}'; choose one of {choices}"))
}

/// The field to sample, a sign guard for its poles, whether `t` is a column,
/// and the metadata echo.
fn grid_field(a: &ExportArgs) -> Result<(Field, Option<GuardFn>, bool, Value)> {
    let example = a.source.example;
    if example == Some(Example::Periodic) {
        let v = a.params.clone().unwrap_or_else(|| vec![0.0, 1.0, 1.0, 3.0]);
        let p = PeriodicParams::new(v[0], v[1], v[2], v[3])?;
        let meta = json!({"source": "periodic", "a": p.a, "b": p.b, "k": p.k, "c": p.c});
        let tau_guard: GuardFn = Box::new(move |x, y| tau_per(&p, x, y));
        let (f, g): (Field, Option<GuardFn>) = match a.field.as_str() {
            "u" => (Box::new(move |x, y| periodic_potential(&p, x, y)), Some(tau_guard)),
            "psi" => (Box::new(move |x, y| periodic_psi(&p, x, y)), Some(tau_guard)),
            "tau" => (Box::new(move |x, y| Ok(tau_per(&p, x, y))), None),
            "theta" => (
                Box::new(move |x, y| periodic_theta(&p, x, y)),
                Some(Box::new(move |x, y| tau_per(&p, x, y) * (p.k * x).sin())),
            ),
            "u1" => (Box::new(move |x, _| first_step_potential(&p, x)), Some(Box::new(move |x, _| (p.k * x).sin()))),
            f => return Err(unknown_field(f, "u, psi, tau, theta, u1")),
        };
        return Ok((f, g, false, meta));
    }
    if a.params.is_some() {
        return Err(Error::InvalidParams("--params applies to the periodic example only".into()));
    }
    if example == Some(Example::Blowup) {
        let src = FlowSource::from_args(&a.source, None)?;
        let phi = src.phi()?;
        let sol = nv_fields(&phi)?;
        let t = a.t;
        let f = match a.field.as_str() {
            "U" => rational_field(sol.u.clone(), t),
            "u" => rational_field(sol.u_laplacian(), t),
            "phi" => poly_field(phi.clone(), t),
            f => return Err(unknown_field(f, "U, u, phi")),
        };
        let guard = (a.field != "phi").then(|| poly_guard(phi, t));
        return Ok((f, guard, true, src.echo()));
    }
    let src = StaticSource::from_args(&a.source)?;
    let res = two_step_construct(&src.p1, &src.p2, &src.c)?;
    let f = match a.field.as_str() {
        "u" => rational_field(res.u, 0.0),
        "psi1" => rational_field(res.psi1, 0.0),
        "psi2" => rational_field(res.psi2, 0.0),
        "tau" => poly_field(res.tau.clone(), 0.0),
        f => return Err(unknown_field(f, "u, psi1, psi2, tau")),
    };
    let guard = (a.field != "tau").then(|| poly_guard(res.tau, 0.0));
    Ok((f, guard, false, src.echo()))
}

fn export(a: &ExportArgs) -> Result<VerifyReport> {
    let w = &a.window;
    let window = Window { x_min: w[0], x_max: w[1], y_min: w[2], y_max: w[3] };
    let (f, guard, with_t, meta) = grid_field(a)?;
    let res = (a.res, a.res);
    let g: GridReport = match guard {
        Some(g) => export_grid_guarded(&a.field, f, g, window, res, a.t, a.allow_poles, meta)?,
        None => export_grid(&a.field, f, window, res, a.t, a.allow_poles, meta)?,
    };
    match &a.csv {
        Some(path) => g.write_csv(BufWriter::new(File::create(path)?), with_t)?,
        None => g.write_csv(io::stdout().lock(), with_t)?,
    }
    let finite: Vec<f64> = g.values.iter().copied().filter(|v| v.is_finite()).collect();
    let mut r = VerifyReport::new("export-grid");
    r.set("field", g.field.clone());
    r.set("window", json!([window.x_min, window.x_max, window.y_min, window.y_max]));
    r.set("resolution", json!([g.resolution.0, g.resolution.1]));
    r.set("t", g.t);
    r.set("rows", g.values.len());
    r.set("nan_count", g.values.len() - finite.len());
    r.set("min", finite.iter().copied().fold(f64::INFINITY, f64::min));
    r.set("max", finite.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    r.set("metadata", g.metadata.clone());
    Ok(r)
}
