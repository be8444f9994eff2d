//! Browser bindings: reduced spectra, regime classification and energy
//! growth curves, each returned as a JSON string.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::Serialize;
use wasm_bindgen::prelude::*;

use ricci_dynamo_core::cosmology::{classify, CosmologicalState};
use ricci_dynamo_core::dynamics::{anti_dynamo_check, energy_rate, integrate, lyapunov_exponent};
use ricci_dynamo_core::spectrum::{discrepancy_report, SpectrumSource};
use ricci_dynamo_core::{assemble_reduced, Complex64, MagneticField, Metric2};

#[derive(Serialize)]
struct Root {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct SourceRoots {
    source: &'static str,
    roots: Vec<Root>,
}

#[derive(Serialize)]
struct SpectrumView {
    sources: Vec<SourceRoots>,
    max_real_part: f64,
    /// Printed closed form agrees with the characteristic quadratic.
    printed_form_agrees: bool,
    /// Companion-matrix eigenvalues agree with the quadratic.
    numerical_agrees: bool,
    lyapunov: f64,
    constraint_value: f64,
    constraint_holds: bool,
}

#[derive(Serialize)]
struct RegimeView {
    label: &'static str,
    code: u8,
    real_part: f64,
    discriminant: f64,
}

#[derive(Serialize)]
struct RegimeMap {
    rho: Vec<f64>,
    ricci: Vec<f64>,
    /// Row-major over (R, ρ), one regime code per cell.
    codes: Vec<u8>,
}

#[derive(Serialize)]
struct GrowthCurve {
    t: Vec<f64>,
    log_energy: Vec<f64>,
    fitted_rate: f64,
    trend: &'static str,
}

#[derive(Serialize)]
struct Failure {
    error: String,
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

fn failure(e: impl std::fmt::Display) -> String {
    to_json(&Failure { error: e.to_string() })
}

fn roots(values: &[Complex64]) -> Vec<Root> {
    values.iter().map(|z| Root { re: z.re, im: z.im }).collect()
}

fn spectrum_view(ricci: f64, theta: f64, eta: f64) -> ricci_dynamo_core::Result<SpectrumView> {
    let report = discrepancy_report(ricci, theta, eta)?;
    let agrees = |a, b| report.between(a, b).map(|d| d.agrees).unwrap_or(false);
    let quadratic = SpectrumSource::CharacteristicQuadratic;
    let lyap = lyapunov_exponent(&assemble_reduced(ricci, theta, eta), 50.0, 6, 0)?;
    let verdict = anti_dynamo_check(ricci, theta, &lyap);
    Ok(SpectrumView {
        sources: report
            .spectra
            .iter()
            .map(|s| SourceRoots {
                source: s.source.name(),
                roots: roots(&s.values()),
            })
            .collect(),
        max_real_part: report.spectra[0].max_real_part,
        printed_form_agrees: agrees(quadratic, SpectrumSource::ClosedForm),
        numerical_agrees: agrees(quadratic, SpectrumSource::NumericalReduced),
        lyapunov: lyap.value,
        constraint_value: verdict.constraint_value,
        constraint_holds: verdict.constraint_holds,
    })
}

/// Reduced-operator eigenvalues at `(R, θ, η)` from the characteristic
/// quadratic, the printed closed form and the companion matrix.
#[wasm_bindgen]
pub fn reduced_spectrum(ricci: f64, theta: f64, eta: f64) -> String {
    match spectrum_view(ricci, theta, eta) {
        Ok(v) => to_json(&v),
        Err(e) => failure(e),
    }
}

/// Regime of a matter state `(ρ, θ, R)`.
#[wasm_bindgen]
pub fn classify_state(rho: f64, theta: f64, ricci: f64) -> String {
    match CosmologicalState::new(rho, None, theta, ricci) {
        Ok(state) => {
            let regime = classify(&state);
            to_json(&RegimeView {
                label: regime.label.name(),
                code: regime.label.code(),
                real_part: regime.evidence.real_part,
                discriminant: regime.evidence.discriminant,
            })
        }
        Err(e) => failure(e),
    }
}

/// Regime codes on an `n × n` grid over `ρ ∈ [0, rho_max]`, `R ∈ [r_min, r_max]`.
#[wasm_bindgen]
pub fn regime_map(rho_max: f64, r_min: f64, r_max: f64, theta: f64, n: usize) -> String {
    if n < 2 || !(rho_max > 0.0) || !(r_max > r_min) {
        return failure("need n ≥ 2, rho_max > 0 and r_max > r_min");
    }
    let axis = |lo: f64, hi: f64| -> Vec<f64> { (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect() };
    let rho = axis(0.0, rho_max);
    let ricci = axis(r_min, r_max);
    let mut codes = Vec::with_capacity(n * n);
    for &r in &ricci {
        for &p in &rho {
            match CosmologicalState::new(p, None, theta, r) {
                Ok(state) => codes.push(classify(&state).label.code()),
                Err(e) => return failure(e),
            }
        }
    }
    to_json(&RegimeMap { rho, ricci, codes })
}

/// `log ε(t)` for the reduced model from `B₀ = (1, 0)`, with the fitted rate.
#[wasm_bindgen]
pub fn energy_growth(ricci: f64, theta: f64, eta: f64, t_end: f64, samples: usize) -> String {
    if samples < 4 || !(t_end > 0.0) {
        return failure("need t_end > 0 and at least 4 samples");
    }
    let op = assemble_reduced(ricci, theta, eta);
    let dt = t_end / samples as f64;
    let result = integrate(&op, &MagneticField::Reduced([1.0, 0.0]), t_end, dt)
        .and_then(|traj| energy_rate(&traj, Metric2::identity));
    match result {
        Ok(h) => to_json(&GrowthCurve {
            log_energy: h.energy.iter().map(|e| e.ln()).collect(),
            t: h.times,
            fitted_rate: h.fitted_rate,
            trend: h.trend.name(),
        }),
        Err(e) => failure(e),
    }
}
