use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use matsos::certify::{default_levels, sample_soundness};
use matsos::gram::{build_certificate_sdp, SearchMode};
use matsos::io::{self, Problem};
use matsos::qmodule::half_ceil;
use matsos::sdp::write_sdpa;
use matsos::verify::verify_certificate_with;
use matsos::{
    archimedean_probe, fejer_riesz_certify, nnsd_certify, putinar_certify, refute, reznick_certify, truncate,
    Certificate, CertifyOptions, CertifyOutcome, Error, LevelReport, LevelStatus, Margin, ProbeOutcome, RefuteOutcome,
    ReznickOutcome,
};

const EXIT_FOUND: u8 = 0;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_REJECTED: u8 = 3;
const EXIT_STALLED: u8 = 4;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "matsos", version, about = "Positivity certificates for matrix polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for p − ε ∈ M_S (strict) or p ∈ M_S (closure).
    Certify(SearchArgs),
    /// Search for (Σ x_i²)^θ p ∈ M_S with homogeneous multipliers.
    Reznick(ReznickArgs),
    /// Search for Σ c_i* p c_i ∈ 1 + M_S.
    Nnsd(SearchArgs),
    /// Unweighted sum-of-squares search on the torus.
    FejerRiesz(SearchArgs),
    /// Check a certificate file against a problem.
    Verify(VerifyArgs),
    /// Look for a moment functional that is nonnegative on M_S with L(p) < 0.
    Refute(RefuteArgs),
    /// Look for K² − Σ x_i² ∈ M_S.
    Archimedean(ArchimedeanArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Closure,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    problem: PathBuf,
    /// Certificate (or search report) output file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    t_min: Option<u32>,
    #[arg(long)]
    t_max: Option<u32>,
    /// Defaults to strict for certify and closure for fejer-riesz.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Residual tolerance for accepting a decoded certificate.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Sample K_S with this seed and report the smallest eigenvalue of p.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the SDP of the last level tried in sparse SDPA format.
    #[arg(long)]
    dump_sdp: Option<PathBuf>,
}

#[derive(Args)]
struct ReznickArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    theta_max: u32,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    dump_sdp: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    cert: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RefuteArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    t_min: Option<u32>,
    #[arg(long)]
    t_max: Option<u32>,
}

#[derive(Args)]
struct ArchimedeanArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    t_max: u32,
    #[arg(long, default_value_t = 64.0)]
    k_max: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run = Result<u8, Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<Problem<f64>, Failure> {
    io::read_problem(&read_text(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    if let Some(p) = path {
        fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn level_range(p: &Problem<f64>, t_min: Option<u32>, t_max: Option<u32>) -> std::ops::RangeInclusive<u32> {
    let d = default_levels(&p.p);
    let lo = t_min.unwrap_or(*d.start());
    let hi = t_max.unwrap_or(lo.max(*d.start()) + 3);
    lo..=hi
}

fn print_levels(reports: &[LevelReport<f64>]) {
    for r in reports {
        let head = match r.theta {
            Some(theta) => format!("theta {theta} (level {})", r.level),
            None => format!("level {}", r.level),
        };
        match &r.status {
            LevelStatus::Infeasible { .. } => println!("  {head}: infeasible (Farkas ray verified)"),
            LevelStatus::NoMargin { epsilon } => println!("  {head}: best margin {epsilon:e} is not positive"),
            LevelStatus::Stalled { reason } => println!("  {head}: stalled ({reason})"),
        }
    }
}

fn print_certificate(c: &Certificate<f64>) {
    println!("certificate found at level {}", c.level);
    if let Some(e) = c.epsilon() {
        println!("  epsilon = {e}");
    }
    if let Some(theta) = c.theta() {
        println!("  theta = {theta}");
    }
    for b in &c.blocks {
        println!("  block k={} basis size {} gram {}x{}", b.k, b.basis.len(), b.gram.nrows(), b.gram.ncols());
    }
    if c.shift > 0.0 {
        println!("  gram shift applied: {:e}", c.shift);
    }
}

fn dump_sdp(path: Option<&PathBuf>, pr: &Problem<f64>, level: u32, mode: SearchMode) -> Result<(), Failure> {
    let Some(path) = path else { return Ok(()) };
    let homogeneous = matches!(mode, SearchMode::Reznick { .. });
    let plan = truncate(&pr.system, level, homogeneous)?;
    let p = if pr.p.algebra().is_torus() { pr.p.torus_reduce()? } else { pr.p.clone() };
    let sdp = build_certificate_sdp(&p, &pr.system, &plan, mode)?;
    let mut buf = Vec::new();
    write_sdpa(&sdp.problem, &mut buf).expect("writing to memory");
    fs::write(path, buf).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn finish_search(
    outcome: CertifyOutcome<f64>,
    pr: &Problem<f64>,
    args: &SearchArgs,
    mode: SearchMode,
    last_level: u32,
) -> Run {
    match outcome {
        CertifyOutcome::Found(cert) => {
            print_certificate(&cert);
            write_out(args.out.as_ref(), &io::write_certificate(&cert))?;
            dump_sdp(args.dump_sdp.as_ref(), pr, cert.level, mode)?;
            if let (Some(seed), Some(eps)) = (args.seed, cert.epsilon()) {
                let s = sample_soundness(&pr.p, &pr.system, 10.0, 1000, seed)?;
                println!(
                    "  sampled {} points of K_S ({} draws): min eigenvalue of p = {:e} (epsilon {eps:e})",
                    s.accepted, s.attempts, s.min_eigenvalue
                );
            }
            Ok(EXIT_FOUND)
        }
        CertifyOutcome::InfeasibleAt(reports) => {
            println!("no certificate at the tried levels");
            print_levels(&reports);
            write_out(args.out.as_ref(), &io::write_search_report("infeasible", &reports))?;
            dump_sdp(args.dump_sdp.as_ref(), pr, last_level, mode)?;
            Ok(EXIT_INFEASIBLE)
        }
        CertifyOutcome::Stalled(reports) => {
            println!("inconclusive: the solver stalled at some levels");
            print_levels(&reports);
            write_out(args.out.as_ref(), &io::write_search_report("stalled", &reports))?;
            dump_sdp(args.dump_sdp.as_ref(), pr, last_level, mode)?;
            Ok(EXIT_STALLED)
        }
    }
}

fn options(tol: f64) -> CertifyOptions {
    CertifyOptions { verify_tol: tol, ..CertifyOptions::default() }
}

fn run_certify(args: &SearchArgs) -> Run {
    let pr = load_problem(&args.problem)?;
    let levels = level_range(&pr, args.t_min, args.t_max);
    let last = *levels.end();
    let (margin, mode) = match args.mode.unwrap_or(ModeArg::Strict) {
        ModeArg::Strict => (Margin::Strict, SearchMode::Strict),
        ModeArg::Closure => (Margin::Closure, SearchMode::Closure),
    };
    let out = putinar_certify(&pr.p, &pr.system, levels, margin, &options(args.tol))?;
    finish_search(out, &pr, args, mode, last)
}

fn run_fejer_riesz(args: &SearchArgs) -> Run {
    let pr = load_problem(&args.problem)?;
    if !pr.system.is_empty() {
        return Err(Failure::Usage("fejer-riesz takes no constraints".into()));
    }
    let levels = level_range(&pr, args.t_min, args.t_max);
    let last = *levels.end();
    let (margin, mode) = match args.mode.unwrap_or(ModeArg::Closure) {
        ModeArg::Strict => (Margin::Strict, SearchMode::Strict),
        ModeArg::Closure => (Margin::Closure, SearchMode::Closure),
    };
    let out = fejer_riesz_certify(&pr.p, levels, margin, &options(args.tol))?;
    finish_search(out, &pr, args, mode, last)
}

fn run_nnsd(args: &SearchArgs) -> Run {
    let pr = load_problem(&args.problem)?;
    let levels = level_range(&pr, args.t_min, args.t_max);
    let last = *levels.end();
    let out = nnsd_certify(&pr.p, &pr.system, levels, &options(args.tol))?;
    finish_search(out, &pr, args, SearchMode::Nnsd, last)
}

fn run_reznick(args: &ReznickArgs) -> Run {
    let pr = load_problem(&args.problem)?;
    let half = pr.p.degree() / 2;
    match reznick_certify(&pr.p, &pr.system, args.theta_max, &options(args.tol))? {
        ReznickOutcome::Found { theta, certificate } => {
            print_certificate(&certificate);
            write_out(args.out.as_ref(), &io::write_certificate(&certificate))?;
            dump_sdp(args.dump_sdp.as_ref(), &pr, half + theta, SearchMode::Reznick { theta })?;
            Ok(EXIT_FOUND)
        }
        ReznickOutcome::Exhausted(reports) => {
            let stalled = reports.iter().any(|r| matches!(r.status, LevelStatus::Stalled { .. }));
            println!("no certificate for theta ≤ {}", args.theta_max);
            print_levels(&reports);
            let tag = if stalled { "stalled" } else { "infeasible" };
            write_out(args.out.as_ref(), &io::write_search_report(tag, &reports))?;
            let theta = args.theta_max;
            dump_sdp(args.dump_sdp.as_ref(), &pr, half + theta, SearchMode::Reznick { theta })?;
            Ok(if stalled { EXIT_STALLED } else { EXIT_INFEASIBLE })
        }
    }
}

fn run_verify(args: &VerifyArgs) -> Run {
    let pr = load_problem(&args.problem)?;
    let text = read_text(&args.cert)?;
    let cert =
        io::read_certificate::<f64>(&text).map_err(|e| Failure::Usage(format!("{}: {e}", args.cert.display())))?;
    let report = verify_certificate_with(&pr.p, &pr.system, &cert, args.tol, matsos::verify::DEFAULT_PSD_TOL);
    print!("{report}");
    write_out(args.out.as_ref(), &io::write_verify_report(&report))?;
    Ok(if report.accepted { EXIT_FOUND } else { EXIT_REJECTED })
}

fn run_refute(args: &RefuteArgs) -> Run {
    let pr = load_problem(&args.problem)?;
    let lo = args.t_min.unwrap_or(half_ceil(pr.p.degree()).max(1));
    let hi = args.t_max.unwrap_or(lo + 3);
    let opts = CertifyOptions::default();
    let mut notes = Vec::new();
    for t in lo..=hi {
        match refute(&pr.p, &pr.system, t, &opts)? {
            RefuteOutcome::Witness { functional, check } => {
                println!("refuted at level {t}: L(p) = {:e}", check.value);
                println!("  moment matrix min eigenvalue {:e}", check.moment_min_eig);
                for (k, l) in check.localizing_min_eigs.iter().enumerate() {
                    match l {
                        Some(l) => println!("  localizing matrix {} min eigenvalue {l:e}", k + 1),
                        None => println!("  localizing matrix {} skipped (degree above level)", k + 1),
                    }
                }
                write_out(args.out.as_ref(), &io::write_witness(&functional, Some(check.value)))?;
                return Ok(EXIT_INFEASIBLE);
            }
            RefuteOutcome::NoneFound { reason } => notes.push(format!("  level {t}: {reason}")),
        }
    }
    println!("no witness at levels {lo}..={hi}");
    for n in notes {
        println!("{n}");
    }
    Ok(EXIT_STALLED)
}

fn run_archimedean(args: &ArchimedeanArgs) -> Run {
    let pr = load_problem(&args.problem)?;
    match archimedean_probe(&pr.system, args.t_max, args.k_max, &CertifyOptions::default())? {
        ProbeOutcome::Found { k, level, certificate } => {
            println!("archimedean: K = {k} at level {level}");
            write_out(args.out.as_ref(), &io::write_certificate(&certificate))?;
            Ok(EXIT_FOUND)
        }
        ProbeOutcome::NotFound { tried } => {
            println!("inconclusive: no certificate for K ≤ {} and levels ≤ {}", args.k_max, args.t_max);
            let reports: Vec<_> = tried.iter().map(|(_, r)| r.clone()).collect();
            for (k, r) in &tried {
                print!("  K = {k}:");
                print_levels(std::slice::from_ref(r));
            }
            write_out(args.out.as_ref(), &io::write_search_report("not_found", &reports))?;
            Ok(EXIT_STALLED)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Certify(a) => run_certify(a),
        Command::Reznick(a) => run_reznick(a),
        Command::Nnsd(a) => run_nnsd(a),
        Command::FejerRiesz(a) => run_fejer_riesz(a),
        Command::Verify(a) => run_verify(a),
        Command::Refute(a) => run_refute(a),
        Command::Archimedean(a) => run_archimedean(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
