//! End-to-end certification of `|arg(z·f′/f)| < πμ/2`.
//!
//! The hypothesis angle `α` is measured as `(2/π)·sup|arg(f′ + z·f″)|`,
//! inflated by a recorded safety margin, pushed through the parameter chain
//! and compared against `φ(μ)`. For the Alexander route the measured
//! expression is `f′`, which equals `F′ + z·F″` for `F = ∫₀^z f(t)/t dt`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::argsup::{
    arg_sup, boundary_profile, circle_angles, principal_profile, ArgError, ArgSupEstimate,
    Evaluable, FnEval, Ladder, StarlikeQuotient, DEFAULT_SUP_TOL,
};
use crate::params::{self, ParamChain, ParamError};
use crate::series::{max_ulp_distance, ClassTag, PowerSeries};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// A strict bound `x < b` is accepted when `x ≤ b − EPS_STRICT`.
pub const EPS_STRICT: f64 = 1e-9;
pub const ALPHA_INFLATION_REL: f64 = 1e-6;
pub const ALPHA_INFLATION_ABS: f64 = 1e-9;
pub const ROOT_TOL: f64 = 1e-12;
/// Allowed shortfall of the sampled boundary minimum below `φ(μ)`.
pub const BOUNDARY_TOL: f64 = 1e-2;
/// Half-width of the arc around `z = 1` left out of the boundary check; the
/// circle `|z| = r < 1` crosses the positive axis there, where `h` is real.
pub const BOUNDARY_EXCLUDED_ARC: f64 = 0.05;
pub const BOUNDARY_SAMPLES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifyError {
    #[error("input is not in class A_{n} (tolerance {tol:e})")]
    ClassViolation { n: u32, tol: f64 },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Arg(#[from] ArgError),
    #[error("measured sup |arg| is 0 for a function other than z")]
    MeasurementAnomaly,
    #[error("F' + zF'' differs from f' by {ulps} ulp; the Alexander transform is inconsistent")]
    TransformMismatch { ulps: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    NotCertified,
    NoConclusion,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Certified => "certified",
            Verdict::NotCertified => "not-certified",
            Verdict::NoConclusion => "no-conclusion",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Measures `f′ + z·f″` and certifies `f`.
    Hypothesis,
    /// Measures `f′` and certifies the Alexander transform of `f`.
    Alexander,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub ladder: Ladder,
    pub sup_tol: f64,
    pub root_tol: f64,
    pub class_tol: f64,
    pub direct_check: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            ladder: Ladder::default(),
            sup_tol: DEFAULT_SUP_TOL,
            root_tol: ROOT_TOL,
            class_tol: 0.0,
            direct_check: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    /// SHA-256 of the certified function's coefficients.
    pub digest: String,
    pub n: u32,
    pub truncation_order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectCheck {
    pub sup_quotient_arg: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub route: Route,
    /// Digest of the input before the Alexander transform (Alexander route only).
    pub source_digest: Option<String>,
    pub special_case: Option<String>,
    pub eps_strict: f64,
    pub alpha_inflation_rel: f64,
    pub alpha_inflation_abs: f64,
    pub root_tol: f64,
    pub sup_tol: f64,
    pub class_tol: f64,
    pub ladder: Ladder,
    pub measurement_converged: bool,
    pub measurement_radius: f64,
    pub measurement_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub tool_version: String,
    pub input_descriptor: InputDescriptor,
    pub alpha_est: f64,
    pub alpha_used: f64,
    pub chain: Option<ParamChain>,
    pub mu: f64,
    pub phi_mu: f64,
    pub lhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub direct_check: Option<DirectCheck>,
    pub conventions: Conventions,
}

/// Outcome of the inequality test, computed only from certificate fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub phi_mu: f64,
    pub lhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

/// Applies the admissibility inequality `(π/2)(α + γ) ≤ φ(μ)`.
pub fn decide(
    alpha_used: f64,
    chain: Option<&ParamChain>,
    mu: f64,
    n: u32,
    converged: bool,
    special_case: bool,
) -> Result<Decision, ParamError> {
    let phi_mu = params::phi(mu, n)?.phi;
    let gamma = chain.map_or(0.0, |c| c.gamma);
    let lhs = FRAC_PI_2 * (alpha_used + gamma);
    let margin = phi_mu - lhs;
    let verdict = if special_case {
        Verdict::Certified
    } else {
        match chain {
            None => Verdict::NotCertified,
            Some(c) if !c.is_admissible() => Verdict::NoConclusion,
            Some(_) if !converged || alpha_used <= 0.0 => Verdict::NotCertified,
            Some(_) if margin >= 0.0 => Verdict::Certified,
            Some(_) if lhs > PI => Verdict::NoConclusion,
            Some(_) => Verdict::NotCertified,
        }
    };
    Ok(Decision {
        phi_mu,
        lhs,
        margin,
        verdict,
    })
}

impl Certificate {
    /// Recomputes the verdict from the stored fields alone.
    pub fn recheck(&self) -> Result<Decision, ParamError> {
        decide(
            self.alpha_used,
            self.chain.as_ref(),
            self.mu,
            self.input_descriptor.n,
            self.conventions.measurement_converged,
            self.conventions.special_case.is_some(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn inflate(alpha_est: f64) -> f64 {
    alpha_est * (1.0 + ALPHA_INFLATION_REL) + ALPHA_INFLATION_ABS
}

fn check_mu(mu: f64) -> Result<(), ParamError> {
    params::phi(mu, 1).map(|_| ())
}

fn direct_check(
    target: &PowerSeries,
    mu: f64,
    settings: &Settings,
) -> Result<DirectCheck, CertifyError> {
    let bound = FRAC_PI_2 * mu;
    let sup = if target.is_identity() {
        0.0
    } else {
        arg_sup(
            &StarlikeQuotient(target),
            &settings.ladder,
            settings.sup_tol,
        )?
        .sup_abs_arg
    };
    Ok(DirectCheck {
        sup_quotient_arg: sup,
        bound,
        passed: sup <= bound - EPS_STRICT,
    })
}

fn build(
    target: &PowerSeries,
    n: u32,
    mu: f64,
    settings: &Settings,
    route: Route,
    source_digest: Option<String>,
    measured: Option<ArgSupEstimate>,
) -> Result<Certificate, CertifyError> {
    let special_case = measured.is_none();
    let (alpha_est, converged, radius, samples) = match &measured {
        Some(e) => (
            e.sup_abs_arg / FRAC_PI_2,
            e.converged,
            e.radius,
            e.samples_used,
        ),
        None => (0.0, true, 0.0, 0),
    };
    if !special_case && alpha_est == 0.0 {
        return Err(CertifyError::MeasurementAnomaly);
    }
    let alpha_used = if special_case {
        0.0
    } else {
        inflate(alpha_est)
    };
    let chain = if special_case {
        None
    } else {
        Some(params::solve_chain(alpha_used, n, settings.root_tol)?)
    };
    let decision = decide(alpha_used, chain.as_ref(), mu, n, converged, special_case)?;
    let direct = if settings.direct_check {
        Some(direct_check(target, mu, settings)?)
    } else {
        None
    };
    Ok(Certificate {
        schema: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        input_descriptor: InputDescriptor {
            digest: target.digest(),
            n,
            truncation_order: target.truncation_order(),
        },
        alpha_est,
        alpha_used,
        chain,
        mu,
        phi_mu: decision.phi_mu,
        lhs: decision.lhs,
        margin: decision.margin,
        verdict: decision.verdict,
        direct_check: direct,
        conventions: Conventions {
            route,
            source_digest,
            special_case: special_case.then(|| "f = z: zf'/f is identically 1".to_string()),
            eps_strict: EPS_STRICT,
            alpha_inflation_rel: ALPHA_INFLATION_REL,
            alpha_inflation_abs: ALPHA_INFLATION_ABS,
            root_tol: settings.root_tol,
            sup_tol: settings.sup_tol,
            class_tol: settings.class_tol,
            ladder: settings.ladder,
            measurement_converged: converged,
            measurement_radius: radius,
            measurement_samples: samples,
        },
    })
}

fn require_class(f: &PowerSeries, n: u32, settings: &Settings) -> Result<(), CertifyError> {
    if f.validate_class(ClassTag::a(n), settings.class_tol) {
        Ok(())
    } else {
        Err(CertifyError::ClassViolation {
            n,
            tol: settings.class_tol,
        })
    }
}

/// Certifies `f ∈ 𝒮𝒯𝒮(μ)` from the measured sector of `f′ + z·f″`.
pub fn certify_hypothesis(
    f: &PowerSeries,
    n: u32,
    mu: f64,
    settings: &Settings,
) -> Result<Certificate, CertifyError> {
    require_class(f, n, settings)?;
    check_mu(mu)?;
    let measured = if f.is_identity() {
        None
    } else {
        Some(arg_sup(
            &f.hypothesis_expression(),
            &settings.ladder,
            settings.sup_tol,
        )?)
    };
    build(f, n, mu, settings, Route::Hypothesis, None, measured)
}

/// Certifies the Alexander transform `F` of `f` from the measured sector of `f′`.
pub fn certify_alexander(
    f: &PowerSeries,
    n: u32,
    mu: f64,
    settings: &Settings,
) -> Result<(PowerSeries, Certificate), CertifyError> {
    require_class(f, n, settings)?;
    check_mu(mu)?;
    let transformed = f.alexander_transform();
    let derivative = f.differentiate();
    let ulps =
        max_ulp_distance(&transformed.hypothesis_expression(), &derivative).unwrap_or(u64::MAX);
    if ulps > 1 {
        return Err(CertifyError::TransformMismatch { ulps });
    }
    let measured = if f.is_identity() {
        None
    } else {
        Some(arg_sup(&derivative, &settings.ladder, settings.sup_tol)?)
    };
    let cert = build(
        &transformed,
        n,
        mu,
        settings,
        Route::Alexander,
        Some(f.digest()),
        measured,
    )?;
    Ok((transformed, cert))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinomialFamily {
    pub n: u32,
    pub alpha: f64,
    pub coefficient: f64,
    pub f: PowerSeries,
    pub mu_direct: f64,
    pub bound: f64,
}

/// `f = z + c·z^{n+1}` with `c = sin(πα/2)/(n+1)²`, and the direct bound
/// `arcsin(n(n+1)s / ((n+1)³ − s²))` on `|arg(z·f′/f)|`, `s = sin(πα/2)`.
///
/// The coefficient is the one for which `z·f′/f = n + 1 − n/(1 + c·zⁿ)`.
pub fn binomial_family(n: u32, alpha: f64) -> Result<BinomialFamily, ParamError> {
    if n == 0 {
        return Err(ParamError::Domain {
            name: "n",
            value: 0.0,
            expected: "positive integer",
        });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(ParamError::Domain {
            name: "alpha",
            value: alpha,
            expected: "0 < alpha <= 1",
        });
    }
    let s = (FRAC_PI_2 * alpha).sin();
    let m = f64::from(n) + 1.0;
    let coefficient = s / (m * m);
    let mut cs = vec![Complex64::new(0.0, 0.0); n as usize + 2];
    cs[1] = Complex64::new(1.0, 0.0);
    cs[n as usize + 1] = Complex64::new(coefficient, 0.0);
    let bound = (f64::from(n) * m * s / (m * m * m - s * s)).asin();
    Ok(BinomialFamily {
        n,
        alpha,
        coefficient,
        f: PowerSeries::new(cs).expect("nonempty"),
        mu_direct: bound / FRAC_PI_2,
        bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureRow {
    pub label: String,
    pub n: u32,
    pub alpha: f64,
    pub mu: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lhs: f64,
    pub phi: f64,
    pub margin: f64,
    pub pass: bool,
}

/// The four reference parameter sets `(n, α, μ)`.
pub const FIXTURES: [(&str, u32, f64, f64); 4] = [
    ("fixture-1", 2, 1.0, 0.5),
    ("fixture-2", 2, 1.5, 1.0),
    ("fixture-3", 1, 1.0, 2.0 / 3.0),
    ("fixture-4", 1, 4.0 / 3.0, 1.0),
];

pub fn fixture_table() -> Result<Vec<FixtureRow>, ParamError> {
    FIXTURES
        .iter()
        .map(|&(label, n, alpha, mu)| {
            let c = params::chain(alpha, n, ROOT_TOL)?;
            let phi = params::phi(mu, n)?.phi;
            let lhs = c.lhs();
            Ok(FixtureRow {
                label: label.to_string(),
                n,
                alpha,
                mu,
                beta: c.beta,
                gamma: c.gamma,
                lhs,
                phi,
                margin: phi - lhs,
                pass: lhs <= phi,
            })
        })
        .collect()
}

pub fn fixture_csv(rows: &[FixtureRow]) -> String {
    let mut out = String::from("label,n,alpha,mu,beta,gamma,lhs,phi,margin,pass\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.label, r.n, r.alpha, r.mu, r.beta, r.gamma, r.lhs, r.phi, r.margin, r.pass
        );
    }
    out
}

/// `h = q² + n·z·q′` for `q = ((1+z)/(1−z))^μ`, with `q′ = q·2μ/(1−z²)`.
pub fn boundary_h(mu: f64, n: u32) -> impl Evaluable {
    let n = f64::from(n);
    FnEval(move |z: Complex64| {
        let q = ((1.0 + z) / (1.0 - z)).powf(mu);
        q * q + n * z * q * (2.0 * mu) / (1.0 - z * z)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCheck {
    pub mu: f64,
    pub n: u32,
    pub radius: f64,
    pub min_abs_arg: f64,
    pub argmin_theta: f64,
    pub phi_ref: f64,
    pub excluded_arc: f64,
    pub passed: bool,
}

/// Samples `|Arg h|` on `|z| = r` (principal branch; `h` has a zero inside
/// the disk) outside `|θ| < BOUNDARY_EXCLUDED_ARC` and compares the minimum
/// with `φ(μ, n)`.
pub fn boundary_sector_check(mu: f64, n: u32, r: f64) -> Result<BoundaryCheck, CertifyError> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(ParamError::Domain {
            name: "mu",
            value: mu,
            expected: "0 < mu < 1",
        }
        .into());
    }
    if !(0.999..1.0).contains(&r) {
        return Err(ArgError::BadRadius { radius: r }.into());
    }
    let phi_ref = params::phi(mu, n)?.phi;
    let h = boundary_h(mu, n);
    let abs_arg =
        |t: f64| -> Result<f64, ArgError> { Ok(h.eval(Complex64::from_polar(r, t))?.arg().abs()) };
    let mut best = (0.0, f64::INFINITY);
    for t in circle_angles(BOUNDARY_SAMPLES) {
        if t.abs() < BOUNDARY_EXCLUDED_ARC {
            continue;
        }
        let v = abs_arg(t)?;
        if v < best.1 {
            best = (t, v);
        }
    }
    let mut step = 2.0 * PI / BOUNDARY_SAMPLES as f64;
    while step > 1e-13 {
        let mut next = best;
        for k in [-3i32, -2, -1, 1, 2, 3] {
            let t = best.0 + f64::from(k) * step / 3.0;
            if t.abs() < BOUNDARY_EXCLUDED_ARC || t.abs() > PI {
                continue;
            }
            let v = abs_arg(t)?;
            if v < next.1 {
                next = (t, v);
            }
        }
        best = next;
        step /= 3.0;
    }
    Ok(BoundaryCheck {
        mu,
        n,
        radius: r,
        min_abs_arg: best.1,
        argmin_theta: best.0,
        phi_ref,
        excluded_arc: BOUNDARY_EXCLUDED_ARC,
        passed: best.1 >= phi_ref - BOUNDARY_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRow {
    pub n: u32,
    pub alpha: f64,
    pub coefficient: f64,
    pub bound: f64,
    pub mu_direct: f64,
    pub quotient_sup: f64,
    pub hypothesis_sup: f64,
    pub hypothesis_target: f64,
    /// Smallest `μ` the chain admits for the measured `α`.
    pub mu_chain: Option<f64>,
    pub chain_verdict: Option<Verdict>,
    pub pass: bool,
}

/// Measures one binomial-family instance against its closed-form bounds.
pub fn family_row(n: u32, alpha: f64, settings: &Settings) -> Result<FamilyRow, CertifyError> {
    let ex = binomial_family(n, alpha)?;
    let quotient = arg_sup(&StarlikeQuotient(&ex.f), &settings.ladder, settings.sup_tol)?;
    let hypothesis = arg_sup(
        &ex.f.hypothesis_expression(),
        &settings.ladder,
        settings.sup_tol,
    )?;
    let target = FRAC_PI_2 * alpha;
    let alpha_used = inflate(hypothesis.sup_abs_arg / FRAC_PI_2);
    let (mu_chain, chain_verdict) = match params::chain(alpha_used, n, settings.root_tol) {
        Ok(c) => match params::best_mu_for_lhs(c.lhs(), n) {
            Ok(best) => {
                let cert = certify_hypothesis(&ex.f, n, best.mu, settings)?;
                (Some(best.mu), Some(cert.verdict))
            }
            Err(ParamError::NoConclusion { .. }) => (None, None),
            Err(e) => return Err(e.into()),
        },
        Err(ParamError::Inadmissible { .. }) => (None, None),
        Err(e) => return Err(e.into()),
    };
    let sharp =
        quotient.sup_abs_arg <= ex.bound + EPS_STRICT && ex.bound - quotient.sup_abs_arg <= 1e-3;
    let hyp_ok = (hypothesis.sup_abs_arg - target).abs() <= 1e-2;
    let sound = mu_chain.is_none_or(|mu| quotient.sup_abs_arg <= FRAC_PI_2 * mu - EPS_STRICT);
    let verdict_ok = chain_verdict.is_none_or(|v| v == Verdict::Certified);
    Ok(FamilyRow {
        n,
        alpha,
        coefficient: ex.coefficient,
        bound: ex.bound,
        mu_direct: ex.mu_direct,
        quotient_sup: quotient.sup_abs_arg,
        hypothesis_sup: hypothesis.sup_abs_arg,
        hypothesis_target: target,
        mu_chain,
        chain_verdict,
        pass: sharp && hyp_ok && sound && verdict_ok,
    })
}

pub const BOUNDARY_MUS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const BOUNDARY_NS: [u32; 3] = [1, 2, 3];
pub const BOUNDARY_RADIUS: f64 = 0.9999;
pub const FAMILY_ALPHAS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
pub const FAMILY_NS: [u32; 2] = [1, 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub tool_version: String,
    pub fixtures: Vec<FixtureRow>,
    pub boundary: Vec<BoundaryCheck>,
    pub family: Vec<FamilyRow>,
    pub all_pass: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Reference fixtures, boundary inequality grid and binomial-family sweep.
pub fn run_suite(settings: &Settings) -> Result<SuiteReport, CertifyError> {
    let fixtures = fixture_table()?;
    let mut boundary = Vec::new();
    for &mu in &BOUNDARY_MUS {
        for &n in &BOUNDARY_NS {
            boundary.push(boundary_sector_check(mu, n, BOUNDARY_RADIUS)?);
        }
    }
    let mut rows = Vec::new();
    for &n in &FAMILY_NS {
        for &alpha in &FAMILY_ALPHAS {
            rows.push(family_row(n, alpha, settings)?);
        }
    }
    let all_pass = fixtures.iter().all(|r| r.pass && r.margin > 0.0)
        && boundary.iter().all(|c| c.passed)
        && rows.iter().all(|r| r.pass);
    Ok(SuiteReport {
        schema: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        fixtures,
        boundary,
        family: rows,
        all_pass,
    })
}

/// A fixture name with its sampled `(θ, arg)` pairs.
pub type NamedProfile = (String, Vec<(f64, f64)>);

/// Named `theta,arg` profiles behind the suite fixtures.
pub fn suite_profiles(settings: &Settings) -> Result<Vec<NamedProfile>, CertifyError> {
    let mut out = Vec::new();
    let r = Ladder::radius(settings.ladder.rungs);
    for &n in &FAMILY_NS {
        for &alpha in &FAMILY_ALPHAS {
            let ex = binomial_family(n, alpha)?;
            let depth = settings.ladder.max_refine_depth;
            out.push((
                format!("family_n{n}_alpha{alpha}_quotient"),
                boundary_profile(&StarlikeQuotient(&ex.f), r, settings.ladder.samples, depth)?,
            ));
            out.push((
                format!("family_n{n}_alpha{alpha}_hypothesis"),
                boundary_profile(
                    &ex.f.hypothesis_expression(),
                    r,
                    settings.ladder.samples,
                    depth,
                )?,
            ));
        }
    }
    for &mu in &BOUNDARY_MUS {
        for &n in &BOUNDARY_NS {
            out.push((
                format!("boundary_mu{mu}_n{n}_h"),
                principal_profile(&boundary_h(mu, n), BOUNDARY_RADIUS, settings.ladder.samples)?,
            ));
        }
    }
    Ok(out)
}

pub fn profile_csv(profile: &[(f64, f64)]) -> String {
    let mut out = String::from("theta,arg\n");
    for (t, a) in profile {
        let _ = writeln!(out, "{t},{a}");
    }
    out
}
