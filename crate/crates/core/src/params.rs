//! Parameter calculus for the sector-angle chain.
//!
//! The hypothesis angle `α`, the intermediate angle `β` and the auxiliary
//! angle `γ` are linked by the increment map `x ↦ x + (2/π)·arctan(n·λ·x)`.
//! `β₀` caps the admissible `β`. The admissible half-angle `φ(μ)` for
//! `p² + z·p′` is evaluated in closed form and can be cross-checked against a
//! brute-force minimisation of `arg H(x)` on the half-line.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Bisection stops once the bracket is narrower than this (absolute above
/// scale 1, relative below).
pub const BISECTION_WIDTH: f64 = 1e-13;
/// Iteration budget for every bracketed solve.
pub const BISECTION_BUDGET: usize = 200;
/// Grid step of the coarse `φ` scan in [`best_mu`].
pub const MU_SCAN_STEP: f64 = 1e-3;
/// Final bracket width for [`best_mu`].
pub const MU_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("bisection did not reach residual {tol:e} (best residual {residual:e} after {iterations} iterations)")]
    SolverFailure {
        residual: f64,
        tol: f64,
        iterations: usize,
    },
    #[error("beta = {} exceeds beta0 = {}; the chain gives no conclusion", .chain.beta, .chain.beta0)]
    Inadmissible { chain: Box<ParamChain> },
    #[error("(pi/2)(alpha + gamma) = {lhs} exceeds phi(1) = pi; no mu in (0, 1] is admissible")]
    NoConclusion { lhs: f64 },
}

/// Solved parameter chain `α → β → γ` together with the cap `β₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamChain {
    pub n: u32,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub beta0: f64,
    pub residual_beta: f64,
    pub residual_gamma: f64,
}

impl ParamChain {
    pub fn is_admissible(&self) -> bool {
        self.beta <= self.beta0 && self.gamma <= self.beta0
    }

    /// `(π/2)(α + γ)`, the quantity compared against `φ(μ)`.
    pub fn lhs(&self) -> f64 {
        FRAC_PI_2 * (self.alpha + self.gamma)
    }
}

/// Closed-form `φ(μ)` with its companions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiEvaluation {
    pub mu: f64,
    pub n: u32,
    pub phi: f64,
    pub varphi: f64,
    pub x0: f64,
}

/// Result of [`best_mu`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestMu {
    pub mu: f64,
    pub lhs: f64,
    pub phi: f64,
    /// `false` when the coarse scan saw `φ` decrease; `mu` is then the
    /// smallest scan point satisfying the inequality.
    pub monotone: bool,
}

/// Sampling specification for [`min_arg_h_bruteforce`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HGrid {
    pub points: usize,
    /// Right end of the half-line window is `max(x_max_floor, span · x₀)`.
    pub x_max_floor: f64,
    pub span: f64,
    pub refinements: usize,
    pub refine_points: usize,
}

impl Default for HGrid {
    fn default() -> Self {
        Self {
            points: 100_000,
            x_max_floor: 10.0,
            span: 10.0,
            refinements: 3,
            refine_points: 1_000,
        }
    }
}

/// Brute-force minimum of `arg H(x)` on `x ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HMinimum {
    pub varphi: f64,
    pub argmin: f64,
    /// Spacing of the first-pass grid around the argmin.
    pub resolution: f64,
    pub x_max: f64,
}

fn check_positive(name: &'static str, value: f64) -> Result<(), ParamError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ParamError::Domain {
            name,
            value,
            expected: "positive and finite",
        })
    }
}

fn check_n(n: u32) -> Result<(), ParamError> {
    if n == 0 {
        return Err(ParamError::Domain {
            name: "n",
            value: 0.0,
            expected: "positive integer",
        });
    }
    Ok(())
}

fn check_mu(mu: f64) -> Result<(), ParamError> {
    if mu > 0.0 && mu <= 1.0 {
        Ok(())
    } else {
        Err(ParamError::Domain {
            name: "mu",
            value: mu,
            expected: "0 < mu <= 1",
        })
    }
}

/// Bracketed bisection for an increasing function `f` with `f(lo) ≤ 0 ≤ f(hi)`.
///
/// Returns the bracket end with the smaller residual, failing when that
/// residual is above `tol`.
pub fn bisect_increasing<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64, ParamError>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    let mut iterations = 0;
    while iterations < BISECTION_BUDGET {
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }
        let width = hi - lo;
        if width <= BISECTION_WIDTH * hi.abs().min(1.0) {
            break;
        }
        let mid = lo + 0.5 * width;
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid < 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        iterations += 1;
    }
    let (x, residual) = if f_lo.abs() <= f_hi.abs() {
        (lo, f_lo.abs())
    } else {
        (hi, f_hi.abs())
    };
    if residual <= tol {
        Ok(x)
    } else {
        Err(ParamError::SolverFailure {
            residual,
            tol,
            iterations,
        })
    }
}

/// `x + (2/π)·arctan(n·λ·x)`.
pub fn increment(x: f64, n: u32, lambda: f64) -> f64 {
    x + 2.0 / PI * (f64::from(n) * lambda * x).atan()
}

/// Inverse of [`increment`] on `[0, target]`.
pub fn solve_increment(target: f64, n: u32, lambda: f64, tol: f64) -> Result<f64, ParamError> {
    check_positive("target", target)?;
    check_positive("lambda", lambda)?;
    check_positive("tol", tol)?;
    check_n(n)?;
    bisect_increasing(|x| increment(x, n, lambda) - target, 0.0, target, tol)
}

/// Root of `β·π = (3/2)·π − arctan(n·λ·β)`, bracketed on `[1, 3/2]`.
pub fn beta0(n: u32, lambda: f64, tol: f64) -> Result<f64, ParamError> {
    check_positive("lambda", lambda)?;
    check_positive("tol", tol)?;
    check_n(n)?;
    let nl = f64::from(n) * lambda;
    bisect_increasing(|b| b * PI + (nl * b).atan() - 1.5 * PI, 1.0, 1.5, tol)
}

/// Solves the chain without judging admissibility.
pub fn solve_chain(alpha: f64, n: u32, tol: f64) -> Result<ParamChain, ParamError> {
    check_positive("alpha", alpha)?;
    let lambda = 1.0;
    let beta = solve_increment(alpha, n, lambda, tol)?;
    let gamma = solve_increment(beta, n, lambda, tol)?;
    let beta0 = beta0(n, lambda, tol)?;
    Ok(ParamChain {
        n,
        lambda,
        alpha,
        beta,
        gamma,
        beta0,
        residual_beta: (increment(beta, n, lambda) - alpha).abs(),
        residual_gamma: (increment(gamma, n, lambda) - beta).abs(),
    })
}

/// Solves `α = β + (2/π)arctan(nβ)`, `β = γ + (2/π)arctan(nγ)` and rejects
/// chains with `β > β₀`.
pub fn chain(alpha: f64, n: u32, tol: f64) -> Result<ParamChain, ParamError> {
    let solved = solve_chain(alpha, n, tol)?;
    if solved.is_admissible() {
        Ok(solved)
    } else {
        Err(ParamError::Inadmissible {
            chain: Box::new(solved),
        })
    }
}

/// Critical abscissa of `arg H` for `μ < 1`: the positive root of
/// `(1 − μ)x² − (1 + μ)`. At `μ = 1` every `x` is critical and 0 is returned.
pub fn critical_x0(mu: f64) -> Result<f64, ParamError> {
    check_mu(mu)?;
    if mu == 1.0 {
        return Ok(0.0);
    }
    Ok(((1.0 + mu) / (1.0 - mu)).sqrt())
}

/// `φ(μ)` in closed form, with `μ = 1` handled as the exact limit `π`.
pub fn phi(mu: f64, n: u32) -> Result<PhiEvaluation, ParamError> {
    check_mu(mu)?;
    check_n(n)?;
    if mu == 1.0 {
        return Ok(PhiEvaluation {
            mu,
            n,
            phi: PI,
            varphi: PI,
            x0: 0.0,
        });
    }
    let half = mu * FRAC_PI_2;
    // n·μ/(1−μ)·((1−μ)/(1+μ))^((1+μ)/2) with the 1/(1−μ) factor folded in.
    let weight =
        f64::from(n) * mu * (1.0 - mu).powf(-(1.0 - mu) / 2.0) * (1.0 + mu).powf(-(1.0 + mu) / 2.0);
    let correction = (half.cos() / (half.sin() + weight)).atan();
    let varphi = PI - correction;
    Ok(PhiEvaluation {
        mu,
        n,
        phi: varphi + FRAC_PI_2 * (mu - 1.0),
        varphi,
        x0: critical_x0(mu)?,
    })
}

/// Real and imaginary parts `(P(x), Q(x))` of
/// `H(x) = (ix)^(μ+1) − (n/2)·μ·(1 + x²)`.
pub fn h_parts(mu: f64, n: u32, x: f64) -> (f64, f64) {
    let half = mu * FRAC_PI_2;
    let power = x.powf(mu + 1.0);
    let p = -half.sin() * power - 0.5 * f64::from(n) * mu * (1.0 + x * x);
    let q = half.cos() * power;
    (p, q)
}

/// `arg H(x)` on the `(π/2, π]` branch, as `π − arctan(Q/|P|)`.
pub fn arg_h(mu: f64, n: u32, x: f64) -> f64 {
    let (p, q) = h_parts(mu, n, x);
    PI - (q / p.abs()).atan()
}

fn hybrid_grid(x_max: f64, points: usize) -> Vec<f64> {
    let log_points = points / 2;
    let lin_points = points - log_points;
    let mut xs = Vec::with_capacity(points + 1);
    xs.push(0.0);
    let log_lo = (x_max * 1e-8).ln();
    let log_hi = x_max.ln();
    for i in 0..log_points {
        let t = i as f64 / log_points as f64;
        xs.push((log_lo + t * (log_hi - log_lo)).exp());
    }
    for i in 1..=lin_points {
        xs.push(x_max * i as f64 / lin_points as f64);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn argmin_on(xs: &[f64], mu: f64, n: u32) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, &x) in xs.iter().enumerate() {
        let v = arg_h(mu, n, x);
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

/// Grid minimum of `arg H(x)` over `x ≥ 0`, refined locally around the running argmin.
pub fn min_arg_h_bruteforce(mu: f64, n: u32, grid: &HGrid) -> Result<HMinimum, ParamError> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(ParamError::Domain {
            name: "mu",
            value: mu,
            expected: "0 < mu < 1",
        });
    }
    check_n(n)?;
    if grid.points < 16 || grid.refine_points < 8 {
        return Err(ParamError::Domain {
            name: "grid.points",
            value: grid.points.min(grid.refine_points) as f64,
            expected: "at least 16 grid points and 8 refinement points",
        });
    }
    let x_max = grid.x_max_floor.max(grid.span * critical_x0(mu)?);
    let mut xs = hybrid_grid(x_max, grid.points);
    let (mut i, mut value) = argmin_on(&xs, mu, n);
    let resolution = neighbour_spacing(&xs, i);
    for _ in 0..grid.refinements {
        let lo = xs[i.saturating_sub(1)];
        let hi = xs[(i + 1).min(xs.len() - 1)];
        xs = (0..=grid.refine_points)
            .map(|k| lo + (hi - lo) * k as f64 / grid.refine_points as f64)
            .collect();
        let (j, v) = argmin_on(&xs, mu, n);
        i = j;
        value = v;
    }
    Ok(HMinimum {
        varphi: value,
        argmin: xs[i],
        resolution,
        x_max,
    })
}

fn neighbour_spacing(xs: &[f64], i: usize) -> f64 {
    let left = if i > 0 { xs[i] - xs[i - 1] } else { 0.0 };
    let right = if i + 1 < xs.len() {
        xs[i + 1] - xs[i]
    } else {
        0.0
    };
    left.max(right)
}

/// Smallest `μ ∈ (0, 1]` with `φ(μ, n) ≥ (π/2)(α + γ)`.
pub fn best_mu(alpha: f64, n: u32, tol: f64) -> Result<BestMu, ParamError> {
    let solved = chain(alpha, n, tol)?;
    best_mu_for_lhs(solved.lhs(), n)
}

/// [`best_mu`] for a precomputed `(π/2)(α + γ)`.
pub fn best_mu_for_lhs(lhs: f64, n: u32) -> Result<BestMu, ParamError> {
    check_n(n)?;
    if lhs > PI {
        return Err(ParamError::NoConclusion { lhs });
    }
    let steps = (1.0 / MU_SCAN_STEP).round() as usize;
    let grid: Vec<f64> = (1..=steps).map(|i| i as f64 * MU_SCAN_STEP).collect();
    let values: Vec<f64> = grid
        .iter()
        .map(|&mu| phi(mu.min(1.0), n).map(|e| e.phi))
        .collect::<Result<_, _>>()?;
    let monotone = values.windows(2).all(|w| w[1] >= w[0]);
    let first = values
        .iter()
        .position(|&v| v >= lhs)
        .unwrap_or(values.len() - 1);
    let hi = grid[first].min(1.0);
    if !monotone {
        return Ok(BestMu {
            mu: hi,
            lhs,
            phi: values[first],
            monotone,
        });
    }
    let mut lo = if first == 0 { 0.0 } else { grid[first - 1] };
    let mut hi = hi;
    while hi - lo > MU_TOL {
        let mid = 0.5 * (lo + hi);
        if phi(mid, n)?.phi >= lhs {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(BestMu {
        mu: hi,
        lhs,
        phi: phi(hi, n)?.phi,
        monotone,
    })
}
