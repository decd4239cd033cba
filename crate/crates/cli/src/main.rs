//! `starcert` command-line front end.
//!
//! Exit codes: 0 success or certified, 1 not certified / no conclusion /
//! failing suite, 2 usage, domain or input error, 3 internal error.

mod format;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use starcert::argsup::{Ladder, DEFAULT_MAX_RUNGS, DEFAULT_SAMPLES, DEFAULT_SUP_TOL};
use starcert::certify::{
    self, fixture_csv, Certificate, CertifyError, Settings, SuiteReport, Verdict,
};
use starcert::params::{self, ParamChain, ParamError};
use starcert::series::{PowerSeries, RELAXED_CLASS_TOL};

use format::{sig, Angles};

#[derive(Parser)]
#[command(
    name = "starcert",
    version,
    about = "Numerical certificates for strongly starlike functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate phi(mu) for the admissible sector of p^2 + z p'.
    Phi {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Solve alpha -> beta -> gamma and report the cap beta0.
    Chain {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = certify::ROOT_TOL)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Certify the function in a coefficient file (`k,re,im` lines).
    Certify {
        path: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        mu: f64,
        /// Measure f' and certify the Alexander transform of f.
        #[arg(long)]
        alexander: bool,
        /// Also measure sup |arg(z F'/F)| against pi*mu/2.
        #[arg(long)]
        direct: bool,
        /// Accept gap coefficients up to this magnitude (1e-12 when given without a value).
        #[arg(long, num_args = 0..=1, default_missing_value = "1e-12")]
        tol_class: Option<f64>,
        #[command(flatten)]
        ladder: LadderArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Run the reference fixtures, the boundary inequality grid and the binomial-family sweep.
    Suite {
        /// Write `theta,arg` CSVs for every fixture into this directory.
        #[arg(long, value_name = "DIR")]
        emit_profiles: Option<PathBuf>,
        #[command(flatten)]
        ladder: LadderArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Write the coefficient file of z + c z^(n+1), c = sin(pi alpha/2)/(n+1)^2.
    Family {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: f64,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct LadderArgs {
    /// Minimum number of ladder rungs K (radii 1 - 2^-k).
    #[arg(long = "ladder-k", env = "STARCERT_LADDER_K", value_parser = clap::value_parser!(u32).range(1..=50))]
    ladder_k: Option<u32>,
    /// Samples per circle before refinement.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Convergence tolerance between consecutive rungs.
    #[arg(long, default_value_t = DEFAULT_SUP_TOL)]
    sup_tol: f64,
}

impl LadderArgs {
    fn settings(self, class_tol: f64, direct_check: bool) -> Result<Settings, Failure> {
        if self.sup_tol.is_nan() || self.sup_tol <= 0.0 {
            return Err(Failure::usage(format!(
                "--sup-tol must be positive, got {}",
                self.sup_tol
            )));
        }
        let mut ladder = Ladder {
            samples: self.samples,
            ..Ladder::default()
        };
        if let Some(k) = self.ladder_k {
            ladder.rungs = k;
            ladder.max_rungs = DEFAULT_MAX_RUNGS.max(k);
        }
        Ok(Settings {
            ladder,
            sup_tol: self.sup_tol,
            class_tol,
            direct_check,
            ..Settings::default()
        })
    }
}

#[derive(Args, Clone, Copy)]
#[group(multiple = false)]
struct FormatFlags {
    #[arg(long)]
    json: bool,
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    plain: bool,
}

#[derive(Args, Clone, Copy)]
struct Output {
    #[command(flatten)]
    format: FormatFlags,
    /// Show angles in degrees (plain and CSV output only).
    #[arg(long)]
    degrees: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
    Plain,
}

impl Output {
    fn format(self, default: Format) -> Format {
        match (self.format.json, self.format.csv, self.format.plain) {
            (true, _, _) => Format::Json,
            (_, true, _) => Format::Csv,
            (_, _, true) => Format::Plain,
            _ => default,
        }
    }

    fn angles(self) -> Angles {
        Angles {
            degrees: self.degrees,
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: String) -> Self {
        Self { code: 2, message }
    }
}

impl From<ParamError> for Failure {
    fn from(e: ParamError) -> Self {
        let code = match e {
            ParamError::Domain { .. } => 2,
            ParamError::SolverFailure { .. } => 3,
            ParamError::Inadmissible { .. } | ParamError::NoConclusion { .. } => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<CertifyError> for Failure {
    fn from(e: CertifyError) -> Self {
        match e {
            CertifyError::Param(p) => p.into(),
            CertifyError::ClassViolation { .. } => Failure::usage(e.to_string()),
            CertifyError::Arg(_) => Self {
                code: 1,
                message: format!("not certified: {e}"),
            },
            CertifyError::MeasurementAnomaly | CertifyError::TransformMismatch { .. } => Self {
                code: 3,
                message: format!("internal error: {e}"),
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Phi { mu, n, output } => cmd_phi(mu, n, output),
        Command::Chain {
            alpha,
            n,
            tol,
            output,
        } => cmd_chain(alpha, n, tol, output),
        Command::Certify {
            path,
            n,
            mu,
            alexander,
            direct,
            tol_class,
            ladder,
            output,
        } => {
            let class_tol = tol_class.unwrap_or(0.0);
            if !(0.0..=1.0).contains(&class_tol) {
                return Err(Failure::usage(format!(
                    "--tol-class must lie in [0, 1], got {class_tol}"
                )));
            }
            let settings = ladder.settings(class_tol, direct)?;
            cmd_certify(&path, n, mu, alexander, &settings, output)
        }
        Command::Suite {
            emit_profiles,
            ladder,
            output,
        } => {
            let settings = ladder.settings(RELAXED_CLASS_TOL, true)?;
            cmd_suite(emit_profiles.as_deref(), &settings, output)
        }
        Command::Family { n, alpha, out } => cmd_family(n, alpha, out.as_deref()),
    }
}

fn cmd_phi(mu: f64, n: u32, output: Output) -> Result<u8, Failure> {
    let e = params::phi(mu, n)?;
    let a = output.angles();
    match output.format(Format::Plain) {
        Format::Json => println!("{}", serde_json::to_string_pretty(&e).expect("serialise")),
        Format::Csv => {
            println!("mu,n,phi,varphi,x0");
            println!(
                "{},{},{},{},{}",
                e.mu,
                e.n,
                a.value(e.phi),
                a.value(e.varphi),
                e.x0
            );
        }
        Format::Plain => {
            println!("mu     = {}", sig(e.mu, 12));
            println!("n      = {}", e.n);
            println!("phi    = {}", a.show(e.phi));
            println!("varphi = {}", a.show(e.varphi));
            println!("x0     = {}", sig(e.x0, 12));
        }
    }
    Ok(0)
}

fn print_chain(c: &ParamChain, output: Output) {
    let a = output.angles();
    match output.format(Format::Plain) {
        Format::Json => {
            let mut v = serde_json::to_value(c).expect("serialise");
            v["lhs"] = json!(c.lhs());
            v["admissible"] = json!(c.is_admissible());
            println!("{}", serde_json::to_string_pretty(&v).expect("serialise"));
        }
        Format::Csv => {
            println!("n,lambda,alpha,beta,gamma,beta0,residual_beta,residual_gamma,lhs,admissible");
            println!(
                "{},{},{},{},{},{},{},{},{},{}",
                c.n,
                c.lambda,
                c.alpha,
                c.beta,
                c.gamma,
                c.beta0,
                c.residual_beta,
                c.residual_gamma,
                a.value(c.lhs()),
                c.is_admissible()
            );
        }
        Format::Plain => {
            println!("alpha = {}", sig(c.alpha, 12));
            println!("beta  = {}", sig(c.beta, 12));
            println!("gamma = {}", sig(c.gamma, 12));
            println!("beta0 = {}", sig(c.beta0, 12));
            println!("lhs   = {}", a.show(c.lhs()));
            println!(
                "residuals = {}, {}",
                sig(c.residual_beta, 12),
                sig(c.residual_gamma, 12)
            );
            println!("admissible = {}", c.is_admissible());
        }
    }
}

fn cmd_chain(alpha: f64, n: u32, tol: f64, output: Output) -> Result<u8, Failure> {
    match params::chain(alpha, n, tol) {
        Ok(c) => {
            print_chain(&c, output);
            Ok(0)
        }
        Err(ParamError::Inadmissible { chain }) => {
            print_chain(&chain, output);
            eprintln!(
                "no conclusion: beta = {} exceeds beta0 = {}",
                sig(chain.beta, 12),
                sig(chain.beta0, 12)
            );
            Ok(1)
        }
        Err(e) => Err(e.into()),
    }
}

fn load(path: &Path) -> Result<PowerSeries, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    PowerSeries::parse_coefficients(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn cmd_certify(
    path: &Path,
    n: u32,
    mu: f64,
    alexander: bool,
    settings: &Settings,
    output: Output,
) -> Result<u8, Failure> {
    let f = load(path)?;
    let cert = if alexander {
        certify::certify_alexander(&f, n, mu, settings)?.1
    } else {
        certify::certify_hypothesis(&f, n, mu, settings)?
    };
    print_certificate(&cert, output);
    Ok(if cert.verdict == Verdict::Certified {
        0
    } else {
        1
    })
}

fn print_certificate(c: &Certificate, output: Output) {
    let a = output.angles();
    match output.format(Format::Json) {
        Format::Json => println!("{}", c.to_json()),
        Format::Csv => {
            println!("digest,n,mu,alpha_est,alpha_used,gamma,phi_mu,lhs,margin,verdict,direct_sup,direct_bound,direct_passed");
            let (ds, db, dp) = match c.direct_check {
                Some(d) => (
                    a.value(d.sup_quotient_arg).to_string(),
                    a.value(d.bound).to_string(),
                    d.passed.to_string(),
                ),
                None => Default::default(),
            };
            println!(
                "{},{},{},{},{},{},{},{},{},{},{ds},{db},{dp}",
                c.input_descriptor.digest,
                c.input_descriptor.n,
                c.mu,
                c.alpha_est,
                c.alpha_used,
                c.chain
                    .as_ref()
                    .map_or(String::new(), |ch| ch.gamma.to_string()),
                a.value(c.phi_mu),
                a.value(c.lhs),
                a.value(c.margin),
                c.verdict.as_str()
            );
        }
        Format::Plain => {
            println!("verdict    = {}", c.verdict.as_str());
            println!("digest     = {}", c.input_descriptor.digest);
            println!("n          = {}", c.input_descriptor.n);
            println!("mu         = {}", sig(c.mu, 12));
            println!("alpha_est  = {}", sig(c.alpha_est, 12));
            println!("alpha_used = {}", sig(c.alpha_used, 12));
            if let Some(ch) = &c.chain {
                println!("beta       = {}", sig(ch.beta, 12));
                println!("gamma      = {}", sig(ch.gamma, 12));
                println!("beta0      = {}", sig(ch.beta0, 12));
            }
            println!("lhs        = {}", a.show(c.lhs));
            println!("phi(mu)    = {}", a.show(c.phi_mu));
            println!("margin     = {}", a.show(c.margin));
            if let Some(special) = &c.conventions.special_case {
                println!("special    = {special}");
            }
            if let Some(d) = c.direct_check {
                println!(
                    "direct     = {} vs bound {} ({})",
                    a.show(d.sup_quotient_arg),
                    a.show(d.bound),
                    if d.passed { "passed" } else { "failed" }
                );
            }
        }
    }
}

fn suite_plain(r: &SuiteReport, a: Angles) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "fixtures");
    for c in &r.fixtures {
        let _ = writeln!(
            out,
            "  {:<12} n={} alpha={} mu={} beta={} gamma={} lhs={} phi={} margin={} {}",
            c.label,
            c.n,
            sig(c.alpha, 6),
            sig(c.mu, 6),
            sig(c.beta, 12),
            sig(c.gamma, 12),
            a.show(c.lhs),
            a.show(c.phi),
            a.show(c.margin),
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    let _ = writeln!(
        out,
        "boundary inequality at r = {}",
        certify::BOUNDARY_RADIUS
    );
    for c in &r.boundary {
        let _ = writeln!(
            out,
            "  mu={} n={} min|arg h|={} phi={} {}",
            sig(c.mu, 6),
            c.n,
            a.show(c.min_abs_arg),
            a.show(c.phi_ref),
            if c.passed { "pass" } else { "FAIL" }
        );
    }
    let _ = writeln!(out, "binomial family sweep");
    for e in &r.family {
        let _ = writeln!(
            out,
            "  n={} alpha={} sup|arg zf'/f|={} bound={} sup|arg(f'+zf'')|={} mu_chain={} {}",
            e.n,
            sig(e.alpha, 6),
            a.show(e.quotient_sup),
            a.show(e.bound),
            a.show(e.hypothesis_sup),
            e.mu_chain.map_or("none".to_string(), |m| sig(m, 12)),
            if e.pass { "pass" } else { "FAIL" }
        );
    }
    let _ = writeln!(out, "all pass: {}", r.all_pass);
    out
}

fn cmd_suite(emit: Option<&Path>, settings: &Settings, output: Output) -> Result<u8, Failure> {
    let report = certify::run_suite(settings)?;
    if let Some(dir) = emit {
        let io =
            |e: std::io::Error| Failure::usage(format!("cannot write to {}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        for (name, profile) in certify::suite_profiles(settings)? {
            fs::write(
                dir.join(format!("{name}.csv")),
                certify::profile_csv(&profile),
            )
            .map_err(io)?;
        }
        fs::write(dir.join("fixtures.csv"), fixture_csv(&report.fixtures)).map_err(io)?;
    }
    match output.format(Format::Plain) {
        Format::Json => println!("{}", report.to_json()),
        Format::Csv => print!("{}", fixture_csv(&report.fixtures)),
        Format::Plain => print!("{}", suite_plain(&report, output.angles())),
    }
    Ok(if report.all_pass { 0 } else { 1 })
}

fn cmd_family(n: u32, alpha: f64, out: Option<&Path>) -> Result<u8, Failure> {
    let ex = certify::binomial_family(n, alpha)?;
    let text = format!(
        "# z + c z^{} with c = sin(pi*{alpha}/2)/{}; sup|arg(zf'/f)| = {}\n{}",
        n + 1,
        (n + 1) * (n + 1),
        ex.bound,
        ex.f.to_coefficient_text()
    );
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(0)
}
