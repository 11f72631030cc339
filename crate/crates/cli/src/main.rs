//! `wsos`: certified lower bounds for weighted-sum-of-squares cones.
//!
//! Exit codes: 0 success, 1 certificate rejected or other failure, 2 parse
//! or usage error, 3 initial point fails the precondition, 4 iteration limit
//! reached, 5 cone digest mismatch, 6 recovered Gram block not PSD.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wsos_core::barrier::BarrierContext;
use wsos_core::bounds::{bitsize_bound, case_constants, eps_lower_interval, K1Case};
use wsos_core::certify::{gram_recover, is_dual_certificate, reconstruction_residual, shifted, Certificate};
use wsos_core::exactarith::parse_rational;
use wsos_core::io;
use wsos_core::polybasis::ConeSpec;
use wsos_core::solver::{
    algorithm2, check_init, grid_interior_point, Algorithm1, NormBound, SolverParams, StopMode,
};
use wsos_core::{Error, Rational};

const EXIT_FAIL: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_INIT: u8 = 3;
const EXIT_MAX_ITERS: u8 = 4;
const EXIT_DIGEST: u8 = 5;
const EXIT_NOT_PSD: u8 = 6;

#[derive(Parser, Debug)]
#[command(name = "wsos", version, about = "Exact WSOS lower bounds and dual certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certified lower bound c with t - c in the cone.
    Solve(SolveArgs),
    /// Check that a certificate certifies t - c.
    Verify(CheckArgs),
    /// Recover Gram matrices from a certificate.
    Gram(GramArgs),
    /// Certificate for the constant polynomial 1 (Algorithm 2).
    Init(InitArgs),
    /// Bit-size bound for integer certificates.
    Bound(BoundArgs),
}

#[derive(Args, Debug)]
struct SolverFlags {
    #[arg(long, value_parser = parse_q)]
    r: Option<Rational>,
    #[arg(long, value_parser = parse_q)]
    rn: Option<Rational>,
    #[arg(long, default_value = "1000")]
    max_iters: usize,
    /// Use the Frobenius bound on ||H^(1/2)|| for the rounding denominator.
    #[arg(long, conflicts_with = "norm_bound")]
    tight_norm: bool,
    /// trace, frobenius or spectral.
    #[arg(long)]
    norm_bound: Option<NormBound>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    cone: PathBuf,
    #[arg(long)]
    poly: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = parse_q, default_value = "1/1000000000")]
    tol: Rational,
    /// Certificate of the constant 1 to start from; computed when absent.
    #[arg(long)]
    init: Option<PathBuf>,
    /// Trace file; defaults to `<out>.trace.jsonl`.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Cone constant C: stop once delta_c <= rho C tol / 2.
    #[arg(long, value_parser = parse_q)]
    c_const: Option<Rational>,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    cone: PathBuf,
    #[arg(long)]
    cert: PathBuf,
    #[arg(long)]
    poly: PathBuf,
}

#[derive(Args, Debug)]
struct GramArgs {
    #[command(flatten)]
    check: CheckArgs,
    /// Decomposition file; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InitArgs {
    #[arg(long)]
    cone: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long)]
    case: K1Case,
    /// Half-degree: the polynomial has degree 2d (line) or 2d + 1 (interval).
    #[arg(long)]
    d: u32,
    /// Coefficient bit size, for the interval minimum bound.
    #[arg(long)]
    tau: Option<u32>,
    #[arg(long, value_parser = parse_q)]
    mu: Option<Rational>,
    #[arg(long, value_parser = parse_q)]
    eps: Option<Rational>,
    #[arg(long, value_parser = parse_q)]
    t_norm2_sq: Rational,
}

fn parse_q(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Self { code, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::Dimension(_) | Error::MissingParameter(_) | Error::InvalidParameter(_) => {
                EXIT_PARSE
            }
            Error::InitNotValid(_) => EXIT_INIT,
            Error::MaxIters(_) => EXIT_MAX_ITERS,
            Error::DigestMismatch { .. } => EXIT_DIGEST,
            _ => EXIT_FAIL,
        };
        Failure::new(code, e.to_string())
    }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_FAIL, format!("{}: {e}", path.display())))
}

fn load_cone(path: &Path) -> Result<(ConeSpec, BarrierContext), Failure> {
    let spec = io::parse_cone(&read(path)?)?;
    let ctx = BarrierContext::from_spec(&spec)?;
    Ok((spec, ctx))
}

fn load_poly(path: &Path, ctx: &BarrierContext) -> Result<Vec<Rational>, Failure> {
    let t = io::parse_poly(&read(path)?)?;
    if t.len() != ctx.u() {
        return Err(Failure::new(
            EXIT_PARSE,
            format!("polynomial has {} coefficients, cone has dimension {}", t.len(), ctx.u()),
        ));
    }
    Ok(t)
}

fn load_cert(path: &Path, spec: &ConeSpec, ctx: &BarrierContext) -> Result<Certificate, Failure> {
    let cert = io::parse_certificate(&read(path)?)?;
    let digest = io::cone_digest(spec);
    if cert.cone_digest != digest {
        return Err(Error::DigestMismatch {
            cert: cert.cone_digest,
            cone: digest,
        }
        .into());
    }
    if cert.x.len() != ctx.u() {
        return Err(Failure::new(EXIT_PARSE, "certificate has the wrong length"));
    }
    Ok(cert)
}

fn sqrt_bits() -> Result<u32, Failure> {
    match std::env::var("WSOS_SQRT_BITS") {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|&b| b > 0)
            .ok_or_else(|| Failure::new(EXIT_PARSE, format!("WSOS_SQRT_BITS={v:?} is not a positive integer"))),
        Err(_) => Ok(64),
    }
}

fn params(flags: &SolverFlags) -> Result<SolverParams, Failure> {
    let base = SolverParams::default();
    let mut p = SolverParams::new(
        flags.r.clone().unwrap_or_else(|| base.r().clone()),
        flags.rn.clone().unwrap_or_else(|| base.r_n().clone()),
    )?;
    p.max_iters = flags.max_iters;
    p.norm_bound = match (flags.tight_norm, flags.norm_bound) {
        (true, _) => NormBound::Frobenius,
        (false, Some(nb)) => nb,
        (false, None) => NormBound::Trace,
    };
    p.sqrt_bits = sqrt_bits()?;
    Ok(p)
}

fn initial_point(
    spec: &ConeSpec,
    ctx: &BarrierContext,
    init: Option<&Path>,
    params: &SolverParams,
) -> Result<Vec<Rational>, Failure> {
    match init {
        Some(path) => {
            let cert = load_cert(path, spec, ctx)?;
            Ok(cert.x)
        }
        None => {
            let x0 = grid_interior_point(spec)?;
            Ok(algorithm2(ctx, &x0, params)?.x)
        }
    }
}

fn cmd_solve(a: &SolveArgs) -> CmdResult {
    let (spec, ctx) = load_cone(&a.cone)?;
    let t = load_poly(&a.poly, &ctx)?;
    let mut p = params(&a.solver)?.with_tolerance(a.tol.clone())?;
    if let Some(c) = &a.c_const {
        p.stop_mode = StopMode::RhoC { c_const: c.clone() };
    }
    let mut init_params = p.clone();
    init_params.max_iters = init_params.max_iters.max(SolverParams::default().max_iters);
    let x_init = initial_point(&spec, &ctx, a.init.as_deref(), &init_params)?;
    let mut alg = Algorithm1::start(&ctx, &t, p, &x_init)?;
    eprintln!("c0 = {}", alg.c());
    let converged = alg.run()?;
    let sol = alg.into_solution(converged);
    let verified = is_dual_certificate(&ctx, &sol.x, &shifted(&ctx, &t, &sol.c))?;
    let cert = Certificate {
        cone_digest: io::cone_digest(&spec),
        x: sol.x,
        c: Some(sol.c.clone()),
        n: sol.n,
        verified,
    };
    write(&a.out, &io::to_pretty(&io::certificate_to_json(&cert)))?;
    let trace_path = a.trace.clone().unwrap_or_else(|| {
        let mut s = a.out.clone().into_os_string();
        s.push(".trace.jsonl");
        PathBuf::from(s)
    });
    write(&trace_path, &io::trace_to_jsonl(&sol.trace))?;
    println!("c = {}", sol.c);
    println!("iterations = {}", sol.trace.len());
    println!("verified = {verified}");
    if !verified {
        return Err(Failure::new(EXIT_FAIL, "final certificate failed re-verification"));
    }
    if !converged {
        return Err(Failure::new(EXIT_MAX_ITERS, "iteration limit reached; certificate written"));
    }
    Ok(0)
}

fn cmd_verify(a: &CheckArgs) -> CmdResult {
    let (spec, ctx) = load_cone(&a.cone)?;
    let t = load_poly(&a.poly, &ctx)?;
    let cert = load_cert(&a.cert, &spec, &ctx)?;
    let c = cert.c.clone().unwrap_or_default();
    let s = shifted(&ctx, &t, &c);
    let dec = match gram_recover(&ctx, &cert.x, &s) {
        Ok(d) => d,
        Err(Error::NotInterior) => {
            println!("x is not in the interior of the dual cone");
            return Ok(EXIT_FAIL);
        }
        Err(e) => return Err(e.into()),
    };
    // S_i and Lambda_i(H^-1 s) are congruent, so the verdicts agree
    for (i, ok) in dec.psd.iter().enumerate() {
        println!("block {i}: {}", if *ok { "PSD" } else { "not PSD" });
    }
    println!("c = {c}");
    if dec.all_psd() {
        println!("certified");
        Ok(0)
    } else {
        println!("not certified");
        Ok(EXIT_FAIL)
    }
}

fn cmd_gram(a: &GramArgs) -> CmdResult {
    let (spec, ctx) = load_cone(&a.check.cone)?;
    let t = load_poly(&a.check.poly, &ctx)?;
    let cert = load_cert(&a.check.cert, &spec, &ctx)?;
    let s = shifted(&ctx, &t, &cert.c.clone().unwrap_or_default());
    let dec = gram_recover(&ctx, &cert.x, &s)?;
    let text = io::to_pretty(&io::decomposition_to_json(&dec));
    match &a.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    let residual = reconstruction_residual(&ctx, &dec, &s)?;
    let zero = residual.iter().all(|r| r == &Rational::default());
    eprintln!("residual = {}", if zero { "0".to_string() } else { format!("{residual:?}") });
    for (i, ok) in dec.psd.iter().enumerate() {
        eprintln!("block {i}: {}", if *ok { "PSD" } else { "not PSD" });
    }
    if !zero {
        return Err(Failure::new(EXIT_FAIL, "nonzero reconstruction residual"));
    }
    Ok(if dec.all_psd() { 0 } else { EXIT_NOT_PSD })
}

fn cmd_init(a: &InitArgs) -> CmdResult {
    let (spec, ctx) = load_cone(&a.cone)?;
    let p = params(&a.solver)?;
    let x0 = grid_interior_point(&spec)?;
    let res = algorithm2(&ctx, &x0, &p)?;
    let ok = check_init(&ctx, &res.x, &p)?;
    let cert = Certificate {
        cone_digest: io::cone_digest(&spec),
        x: res.x,
        c: None,
        n: res.trace.last().map(|r| r.n.clone()),
        verified: ok,
    };
    write(&a.out, &io::to_pretty(&io::certificate_to_json(&cert)))?;
    println!("iterations = {}", res.trace.len());
    println!("precondition = {ok}");
    Ok(if ok { 0 } else { EXIT_INIT })
}

fn cmd_bound(a: &BoundArgs) -> CmdResult {
    let k = case_constants(a.case, a.d, a.mu.as_ref())?;
    let eps = match (&a.eps, a.tau, a.case) {
        (Some(e), _, _) => e.clone(),
        (None, Some(tau), K1Case::MonomialLine) => {
            return Err(Failure::new(
                EXIT_PARSE,
                format!("--tau gives a minimum bound on [-1, 1] only; pass --eps for the line (tau = {tau})"),
            ))
        }
        (None, Some(tau), _) => eps_lower_interval(2 * a.d + 1, tau),
        (None, None, _) => return Err(Failure::new(EXIT_PARSE, "one of --eps or --tau is required")),
    };
    let report = bitsize_bound(k.u, &k.cond_m, &a.t_norm2_sq, k.nu, &k.k1, &eps)?;
    println!("{report}");
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gram(a) => cmd_gram(a),
        Command::Init(a) => cmd_init(a),
        Command::Bound(a) => cmd_bound(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
