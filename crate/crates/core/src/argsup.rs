//! Supremum of `|arg g|` over the unit disk for `g(0) = 1`.
//!
//! `g` is sampled on a ladder of circles `r_k = 1 − 2^{−k}`. On each circle
//! the phase is unwrapped by accumulating principal increments, bisecting any
//! step larger than `π/2`. The closed-loop total gives the winding number, so
//! a zero winding certifies that `g` has no zeros inside the circle and that
//! the continuous branch with `arg g(0) = 0` exists there. Because `arg g` is
//! then harmonic, the supremum over the closed disk sits on the circle, and
//! the per-rung maxima must be nondecreasing.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{PowerSeries, SeriesError};

pub const DEFAULT_RUNGS: u32 = 12;
pub const DEFAULT_MAX_RUNGS: u32 = 32;
pub const DEFAULT_SAMPLES: usize = 4096;
pub const DEFAULT_REFINE_DEPTH: u32 = 24;
pub const DEFAULT_SUP_TOL: f64 = 1e-4;
pub const MIN_WINDING_SAMPLES: usize = 256;
/// Allowed decrease between consecutive rung maxima.
pub const LADDER_SLACK: f64 = 1e-9;
const NORMALIZATION_TOL: f64 = 1e-12;
const RADIAL_STEPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArgError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("phase step above pi/2 persists near theta = {theta} on r = {radius} after {depth} bisections")]
    Resolution { theta: f64, radius: f64, depth: u32 },
    #[error("winding number {winding} on r = {radius}; the function vanishes inside")]
    NonzeroWinding { radius: f64, winding: i64 },
    #[error("{samples} samples requested; at least {MIN_WINDING_SAMPLES} are required")]
    TooFewSamples { samples: usize },
    #[error("radius {radius} is not in (0, 1)")]
    BadRadius { radius: f64 },
    #[error("g(0) = {value} is not 1")]
    NotNormalized { value: Complex64 },
    #[error("rung maximum dropped from {previous} to {current} at r = {radius}")]
    LadderViolation {
        radius: f64,
        previous: f64,
        current: f64,
    },
}

/// A function that can be evaluated inside the unit disk.
pub trait Evaluable {
    fn eval(&self, z: Complex64) -> Result<Complex64, ArgError>;
}

impl<T: Evaluable + ?Sized> Evaluable for &T {
    fn eval(&self, z: Complex64) -> Result<Complex64, ArgError> {
        (**self).eval(z)
    }
}

impl Evaluable for PowerSeries {
    fn eval(&self, z: Complex64) -> Result<Complex64, ArgError> {
        Ok(self.evaluate(z)?)
    }
}

/// Wraps an infallible closure.
pub struct FnEval<F>(pub F);

impl<F: Fn(Complex64) -> Complex64> Evaluable for FnEval<F> {
    fn eval(&self, z: Complex64) -> Result<Complex64, ArgError> {
        Ok((self.0)(z))
    }
}

/// `z·f′(z)/f(z)` evaluated pointwise.
pub struct StarlikeQuotient<'a>(pub &'a PowerSeries);

impl Evaluable for StarlikeQuotient<'_> {
    fn eval(&self, z: Complex64) -> Result<Complex64, ArgError> {
        Ok(self.0.starlike_quotient(z)?)
    }
}

/// Radius ladder and sampling parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ladder {
    /// Rungs always measured (`K`).
    pub rungs: u32,
    /// Hard cap on rungs while waiting for convergence.
    pub max_rungs: u32,
    pub samples: usize,
    pub max_refine_depth: u32,
}

impl Default for Ladder {
    fn default() -> Self {
        Self {
            rungs: DEFAULT_RUNGS,
            max_rungs: DEFAULT_MAX_RUNGS,
            samples: DEFAULT_SAMPLES,
            max_refine_depth: DEFAULT_REFINE_DEPTH,
        }
    }
}

impl Ladder {
    pub fn radius(k: u32) -> f64 {
        1.0 - 0.5f64.powi(k as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RungRecord {
    pub radius: f64,
    pub max_abs_arg: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgSupEstimate {
    pub sup_abs_arg: f64,
    pub attained_theta: f64,
    pub radius: f64,
    pub samples_used: usize,
    pub winding_number: i64,
    pub converged: bool,
    pub rungs: Vec<RungRecord>,
}

/// Sample angles `θ_j = −π + π/m + 2πj/m`; symmetric under `θ ↦ −θ`.
pub fn circle_angles(m: usize) -> Vec<f64> {
    (0..m)
        .map(|j| -PI + PI / m as f64 + TAU * j as f64 / m as f64)
        .collect()
}

struct Tracer<'g, G: Evaluable + ?Sized> {
    g: &'g G,
    radius: f64,
    depth: u32,
    evals: usize,
}

impl<'g, G: Evaluable + ?Sized> Tracer<'g, G> {
    fn new(g: &'g G, radius: f64, depth: u32) -> Self {
        Self {
            g,
            radius,
            depth,
            evals: 0,
        }
    }

    fn at(&mut self, theta: f64) -> Result<Complex64, ArgError> {
        self.evals += 1;
        self.g.eval(Complex64::from_polar(self.radius, theta))
    }

    /// Continuous phase change from `theta0` to `theta1` along the circle.
    fn increment(
        &mut self,
        theta0: f64,
        v0: Complex64,
        theta1: f64,
        v1: Complex64,
        depth: u32,
    ) -> Result<f64, ArgError> {
        let d = phase_step(v0, v1);
        if d.abs() <= FRAC_PI_2 {
            return Ok(d);
        }
        if depth == 0 {
            return Err(ArgError::Resolution {
                theta: theta0,
                radius: self.radius,
                depth: self.depth,
            });
        }
        let mid = 0.5 * (theta0 + theta1);
        let vm = self.at(mid)?;
        Ok(self.increment(theta0, v0, mid, vm, depth - 1)?
            + self.increment(mid, vm, theta1, v1, depth - 1)?)
    }

    /// Continuous arg at `r·e^{iθ}`, continued radially from `g(0)`.
    fn radial_anchor(&mut self, theta: f64) -> Result<f64, ArgError> {
        let dir = Complex64::from_polar(1.0, theta);
        let mut prev = self.g.eval(Complex64::new(0.0, 0.0))?;
        let mut acc = prev.arg();
        for s in 1..=RADIAL_STEPS {
            let t = self.radius * s as f64 / RADIAL_STEPS as f64;
            let v = self.g.eval(dir * t)?;
            self.evals += 1;
            acc += self.radial_increment(
                dir,
                t - self.radius / RADIAL_STEPS as f64,
                prev,
                t,
                v,
                self.depth,
            )?;
            prev = v;
        }
        Ok(acc)
    }

    fn radial_increment(
        &mut self,
        dir: Complex64,
        t0: f64,
        v0: Complex64,
        t1: f64,
        v1: Complex64,
        depth: u32,
    ) -> Result<f64, ArgError> {
        let d = phase_step(v0, v1);
        if d.abs() <= FRAC_PI_2 {
            return Ok(d);
        }
        if depth == 0 {
            return Err(ArgError::Resolution {
                theta: dir.arg(),
                radius: t0,
                depth: self.depth,
            });
        }
        let mid = 0.5 * (t0 + t1);
        let vm = self.g.eval(dir * mid)?;
        self.evals += 1;
        Ok(self.radial_increment(dir, t0, v0, mid, vm, depth - 1)?
            + self.radial_increment(dir, mid, vm, t1, v1, depth - 1)?)
    }

    /// Values on the sample circle plus the closed-loop phase total.
    fn trace(&mut self, thetas: &[f64]) -> Result<(Vec<Complex64>, Vec<f64>, f64), ArgError> {
        let values = thetas
            .iter()
            .map(|&t| self.at(t))
            .collect::<Result<Vec<_>, _>>()?;
        let mut increments = Vec::with_capacity(thetas.len());
        for j in 0..thetas.len() {
            let k = (j + 1) % thetas.len();
            let t1 = if k == 0 { thetas[0] + TAU } else { thetas[k] };
            increments.push(self.increment(thetas[j], values[j], t1, values[k], self.depth)?);
        }
        let total = increments.iter().sum();
        Ok((values, increments, total))
    }
}

/// Principal difference `arg v1 − arg v0` in `(−π, π]`.
fn phase_step(v0: Complex64, v1: Complex64) -> f64 {
    wrap_angle(v1.arg() - v0.arg())
}

fn check_radius(r: f64) -> Result<(), ArgError> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(ArgError::BadRadius { radius: r })
    }
}

/// Winding number of `θ ↦ g(r·e^{iθ})` about the origin.
pub fn winding_check<G: Evaluable + ?Sized>(
    g: &G,
    r: f64,
    m: usize,
    max_refine_depth: u32,
) -> Result<i64, ArgError> {
    check_radius(r)?;
    if m < MIN_WINDING_SAMPLES {
        return Err(ArgError::TooFewSamples { samples: m });
    }
    let mut tracer = Tracer::new(g, r, max_refine_depth);
    let (_, _, total) = tracer.trace(&circle_angles(m))?;
    Ok((total / TAU).round() as i64)
}

/// Unwrapped arg of `g` on `|z| = r` at the angles of [`circle_angles`].
///
/// The branch is the one continued radially from `g(0)`; it agrees with the
/// principal value at the first sample when that branch stays in `(−π, π)`.
pub fn boundary_profile<G: Evaluable + ?Sized>(
    g: &G,
    r: f64,
    m: usize,
    max_refine_depth: u32,
) -> Result<Vec<(f64, f64)>, ArgError> {
    check_radius(r)?;
    if m < MIN_WINDING_SAMPLES {
        return Err(ArgError::TooFewSamples { samples: m });
    }
    let thetas = circle_angles(m);
    let mut tracer = Tracer::new(g, r, max_refine_depth);
    let (_, increments, total) = tracer.trace(&thetas)?;
    let winding = (total / TAU).round() as i64;
    if winding != 0 {
        return Err(ArgError::NonzeroWinding { radius: r, winding });
    }
    let mut arg = tracer.radial_anchor(thetas[0])?;
    let mut out = Vec::with_capacity(m);
    for (j, &theta) in thetas.iter().enumerate() {
        out.push((theta, arg));
        arg += increments[j];
    }
    Ok(out)
}

/// Principal `Arg g` on `|z| = r`, for functions without a global branch.
pub fn principal_profile<G: Evaluable + ?Sized>(
    g: &G,
    r: f64,
    m: usize,
) -> Result<Vec<(f64, f64)>, ArgError> {
    check_radius(r)?;
    circle_angles(m)
        .into_iter()
        .map(|t| Ok((t, g.eval(Complex64::from_polar(r, t))?.arg())))
        .collect()
}

struct RungScan {
    max_abs_arg: f64,
    theta: f64,
    evals: usize,
}

fn scan_rung<G: Evaluable + ?Sized>(
    g: &G,
    r: f64,
    ladder: &Ladder,
    tol: f64,
) -> Result<RungScan, ArgError> {
    let thetas = circle_angles(ladder.samples);
    let mut tracer = Tracer::new(g, r, ladder.max_refine_depth);
    let (values, increments, total) = tracer.trace(&thetas)?;
    let winding = (total / TAU).round() as i64;
    if winding != 0 {
        return Err(ArgError::NonzeroWinding { radius: r, winding });
    }
    let mut arg = tracer.radial_anchor(thetas[0])?;
    let (mut best_j, mut best_arg) = (0, arg);
    for (j, step) in increments.iter().enumerate() {
        if arg.abs() > best_arg.abs() {
            best_j = j;
            best_arg = arg;
        }
        arg += step;
    }

    // Trisection around the running maximum.
    let mut theta = thetas[best_j];
    let mut value = values[best_j];
    let mut h = TAU / ladder.samples as f64;
    loop {
        let before = best_arg.abs();
        let (mut next_theta, mut next_value, mut next_arg) = (theta, value, best_arg);
        for k in [-3i32, -2, -1, 1, 2, 3] {
            let t = theta + f64::from(k) * h / 3.0;
            let v = tracer.at(t)?;
            let a = best_arg + tracer.increment(theta, value, t, v, ladder.max_refine_depth)?;
            if a.abs() > next_arg.abs() {
                next_theta = t;
                next_value = v;
                next_arg = a;
            }
        }
        theta = next_theta;
        value = next_value;
        best_arg = next_arg;
        h /= 3.0;
        let moved = best_arg.abs() - before;
        if (moved < tol / 10.0 && h < 1e-4 * (1.0 - r)) || h < 1e-15 {
            break;
        }
    }
    Ok(RungScan {
        max_abs_arg: best_arg.abs(),
        theta: wrap_angle(theta),
        evals: tracer.evals,
    })
}

fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Estimates `sup |arg g|` over the disk from the radius ladder.
pub fn arg_sup<G: Evaluable + ?Sized>(
    g: &G,
    ladder: &Ladder,
    tol: f64,
) -> Result<ArgSupEstimate, ArgError> {
    if ladder.samples < MIN_WINDING_SAMPLES {
        return Err(ArgError::TooFewSamples {
            samples: ladder.samples,
        });
    }
    let origin = g.eval(Complex64::new(0.0, 0.0))?;
    if (origin - 1.0).norm() > NORMALIZATION_TOL {
        return Err(ArgError::NotNormalized { value: origin });
    }
    let max_rungs = ladder.max_rungs.max(ladder.rungs).max(1);
    let mut rungs: Vec<RungRecord> = Vec::new();
    let mut samples_used = 0;
    let mut converged = false;
    for k in 1..=max_rungs {
        let radius = Ladder::radius(k);
        let scan = scan_rung(g, radius, ladder, tol)?;
        samples_used += scan.evals;
        if let Some(prev) = rungs.last() {
            if scan.max_abs_arg < prev.max_abs_arg - LADDER_SLACK {
                return Err(ArgError::LadderViolation {
                    radius,
                    previous: prev.max_abs_arg,
                    current: scan.max_abs_arg,
                });
            }
            converged = (scan.max_abs_arg - prev.max_abs_arg).abs() < tol;
        }
        rungs.push(RungRecord {
            radius,
            max_abs_arg: scan.max_abs_arg,
            theta: scan.theta,
        });
        if k >= ladder.rungs && converged {
            break;
        }
    }
    let best =
        rungs.iter().copied().fold(
            rungs[0],
            |a, b| if b.max_abs_arg > a.max_abs_arg { b } else { a },
        );
    Ok(ArgSupEstimate {
        sup_abs_arg: best.max_abs_arg,
        attained_theta: best.theta,
        radius: best.radius,
        samples_used,
        winding_number: 0,
        converged,
        rungs,
    })
}

/// Smallest slack `|arg g₁| + |arg g₂| − |arg(g₁g₂)|` over the sampled
/// circle, restricted to points where `|arg g₁| + |arg g₂| < π − margin`.
/// Returns `None` when no sample qualifies.
pub fn product_arg_slack<A, B>(
    g1: &A,
    g2: &B,
    r: f64,
    m: usize,
    margin: f64,
) -> Result<Option<f64>, ArgError>
where
    A: Evaluable + ?Sized,
    B: Evaluable + ?Sized,
{
    check_radius(r)?;
    let mut worst: Option<f64> = None;
    for t in circle_angles(m) {
        let z = Complex64::from_polar(r, t);
        let (a, b) = (g1.eval(z)?, g2.eval(z)?);
        let bound = a.arg().abs() + b.arg().abs();
        if bound < PI - margin {
            let slack = bound - (a * b).arg().abs();
            worst = Some(worst.map_or(slack, |w: f64| w.min(slack)));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> FnEval<impl Fn(Complex64) -> Complex64> {
        FnEval(|_z| Complex64::new(1.0, 0.0))
    }

    #[test]
    fn winding_examples() {
        assert_eq!(winding_check(&one(), 0.9, 256, 24).unwrap(), 0);
        let g = FnEval(|z: Complex64| 1.0 + z);
        assert_eq!(winding_check(&g, 0.9, 256, 24).unwrap(), 0);
        let planted = FnEval(|z: Complex64| (z - 0.5) / -0.5);
        assert_eq!(winding_check(&planted, 0.9, 256, 24).unwrap(), 1);
        assert_eq!(winding_check(&planted, 0.4, 256, 24).unwrap(), 0);
    }

    #[test]
    fn winding_requires_enough_samples() {
        assert!(matches!(
            winding_check(&one(), 0.5, 64, 24),
            Err(ArgError::TooFewSamples { samples: 64 })
        ));
        assert!(matches!(
            winding_check(&one(), 1.0, 256, 24),
            Err(ArgError::BadRadius { .. })
        ));
    }

    #[test]
    fn resolution_error_on_undersampled_curve() {
        let wild = FnEval(|z: Complex64| (Complex64::new(0.0, 200.0) * z).exp());
        assert!(matches!(
            winding_check(&wild, 0.9, 256, 1),
            Err(ArgError::Resolution { .. })
        ));
        assert_eq!(winding_check(&wild, 0.9, 256, 8).unwrap(), 0);
    }

    #[test]
    fn arg_sup_of_constant() {
        let e = arg_sup(&one(), &Ladder::default(), DEFAULT_SUP_TOL).unwrap();
        assert_eq!(e.sup_abs_arg, 0.0);
        assert!(e.converged);
        assert_eq!(e.rungs.len(), DEFAULT_RUNGS as usize);
    }

    #[test]
    fn arg_sup_of_one_plus_z() {
        let g = PowerSeries::from_real(&[1.0, 1.0]).unwrap();
        let e = arg_sup(&g, &Ladder::default(), DEFAULT_SUP_TOL).unwrap();
        assert!(e.converged);
        assert!((e.sup_abs_arg - FRAC_PI_2).abs() < 1e-2);
        assert!(e.sup_abs_arg < FRAC_PI_2);
        // Each rung maximum is arcsin(r).
        for rung in &e.rungs {
            assert!(
                (rung.max_abs_arg - rung.radius.asin()).abs() < 1e-9,
                "{rung:?}"
            );
        }
    }

    #[test]
    fn arg_sup_rejects_unnormalized_and_vanishing() {
        let g = FnEval(|z: Complex64| 2.0 + z);
        assert!(matches!(
            arg_sup(&g, &Ladder::default(), 1e-4),
            Err(ArgError::NotNormalized { .. })
        ));
        let planted = FnEval(|z: Complex64| (z - 0.3) / -0.3);
        assert!(matches!(
            arg_sup(&planted, &Ladder::default(), 1e-4),
            Err(ArgError::NonzeroWinding { winding: 1, .. })
        ));
    }

    #[test]
    fn profile_of_sector_map() {
        let beta = 0.5;
        let g = FnEval(move |z: Complex64| ((1.0 + z) / (1.0 - z)).powf(beta));
        let profile = boundary_profile(&g, 0.9999, 4096, 24).unwrap();
        let step = beta * FRAC_PI_2;
        // Away from z = ±1 the profile is ±βπ/2.
        for &(theta, arg) in &profile {
            if theta.abs() > 0.05 && PI - theta.abs() > 0.05 {
                assert!(
                    (arg - step * theta.signum()).abs() < 1e-2,
                    "theta={theta} arg={arg}"
                );
            }
        }
    }

    #[test]
    fn profile_of_constant_and_anchor() {
        let profile = boundary_profile(&one(), 0.5, 256, 24).unwrap();
        assert!(profile.iter().all(|&(_, a)| a == 0.0));
        assert!((profile[0].0 - (-PI + PI / 256.0)).abs() < 1e-15);
        let g = PowerSeries::from_real(&[1.0, 0.5]).unwrap();
        let profile = boundary_profile(&g, 0.9, 512, 24).unwrap();
        let principal = principal_profile(&g, 0.9, 512).unwrap();
        for (a, b) in profile.iter().zip(&principal) {
            assert!((a.1 - b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let g = PowerSeries::from_real(&[1.0, 0.3, -0.2, 0.1]).unwrap();
        let profile = boundary_profile(&g, 0.99, 2048, 24).unwrap();
        let m = profile.len();
        for j in 0..m {
            let (t, a) = profile[j];
            let (t2, b) = profile[m - 1 - j];
            assert!((t + t2).abs() < 1e-12);
            assert!((a + b).abs() < 1e-10);
        }
    }

    #[test]
    fn refinement_stability() {
        let g = PowerSeries::from_real(&[1.0, 0.0, 0.6]).unwrap();
        let base = arg_sup(&g, &Ladder::default(), DEFAULT_SUP_TOL).unwrap();
        let doubled = Ladder {
            samples: 2 * DEFAULT_SAMPLES,
            ..Ladder::default()
        };
        let fine = arg_sup(&g, &doubled, DEFAULT_SUP_TOL).unwrap();
        assert!((base.sup_abs_arg - fine.sup_abs_arg).abs() < DEFAULT_SUP_TOL);
        assert!((base.sup_abs_arg - 0.6f64.asin()).abs() < 1e-3);
    }

    #[test]
    fn subadditivity_of_products() {
        let g1 = PowerSeries::from_real(&[1.0, 0.4]).unwrap();
        let g2 = FnEval(|z: Complex64| Complex64::new(1.0, 0.0) + Complex64::new(0.0, 0.5) * z * z);
        let slack = product_arg_slack(&g1, &g2, 0.999, 4096, 0.1)
            .unwrap()
            .unwrap();
        assert!(slack >= -1e-10);
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_angle(0.25), 0.25);
    }
}
