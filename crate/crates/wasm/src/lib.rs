//! Browser bindings for the starcert demo page.
//!
//! Each export is a thin wrapper over a plain Rust function so the logic is
//! testable natively. Errors cross the boundary as `{"error": "..."}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use starcert::argsup::{boundary_profile, Ladder, StarlikeQuotient};
use starcert::certify::{self, Settings};
use starcert::params;

/// `(μ, φ(μ, n))` pairs on `μ = k/points`, `k = 1..=points`, flattened.
pub fn phi_curve_values(n: u32, points: u32) -> Result<Vec<f64>, String> {
    if points == 0 || points > 10_000 {
        return Err(format!("points must lie in 1..=10000, got {points}"));
    }
    let mut out = Vec::with_capacity(2 * points as usize);
    for k in 1..=points {
        let mu = f64::from(k) / f64::from(points);
        let e = params::phi(mu, n).map_err(|e| e.to_string())?;
        out.push(mu);
        out.push(e.phi);
    }
    Ok(out)
}

/// Parameter chain for `α`, with the smallest admissible `μ` when one exists.
pub fn chain_report(alpha: f64, n: u32) -> Value {
    let solved = match params::solve_chain(alpha, n, certify::ROOT_TOL) {
        Ok(c) => c,
        Err(e) => return json!({ "error": e.to_string() }),
    };
    let best = if solved.is_admissible() {
        params::best_mu_for_lhs(solved.lhs(), n).ok().map(|b| b.mu)
    } else {
        None
    };
    json!({
        "alpha": solved.alpha,
        "beta": solved.beta,
        "gamma": solved.gamma,
        "beta0": solved.beta0,
        "lhs": solved.lhs(),
        "admissible": solved.is_admissible(),
        "best_mu": best,
    })
}

/// Certifies the binomial-family function for `(n, α)` at `μ`, with the direct check,
/// and attaches the sampled `arg(z·f′/f)` profile on the top ladder rung.
pub fn family_report(n: u32, alpha: f64, mu: f64, samples: usize) -> Value {
    let run = || -> Result<Value, String> {
        let ex = certify::binomial_family(n, alpha).map_err(|e| e.to_string())?;
        let settings = Settings {
            direct_check: true,
            ..Settings::default()
        };
        let cert =
            certify::certify_hypothesis(&ex.f, n, mu, &settings).map_err(|e| e.to_string())?;
        let r = Ladder::radius(settings.ladder.rungs);
        let profile = boundary_profile(
            &StarlikeQuotient(&ex.f),
            r,
            samples.max(starcert::argsup::MIN_WINDING_SAMPLES),
            settings.ladder.max_refine_depth,
        )
        .map_err(|e| e.to_string())?;
        let (theta, arg): (Vec<f64>, Vec<f64>) = profile.into_iter().unzip();
        Ok(json!({
            "coefficient": ex.coefficient,
            "bound": ex.bound,
            "mu_direct": ex.mu_direct,
            "certificate": cert,
            "profile": { "radius": r, "theta": theta, "arg": arg },
        }))
    };
    run().unwrap_or_else(|e| json!({ "error": e }))
}

#[wasm_bindgen]
pub fn phi_curve(n: u32, points: u32) -> Vec<f64> {
    phi_curve_values(n, points).unwrap_or_default()
}

#[wasm_bindgen]
pub fn chain_json(alpha: f64, n: u32) -> String {
    chain_report(alpha, n).to_string()
}

#[wasm_bindgen]
pub fn family_json(n: u32, alpha: f64, mu: f64, samples: usize) -> String {
    family_report(n, alpha, mu, samples).to_string()
}
