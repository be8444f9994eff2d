//! Cosmological reading of the reduced spectrum: curvature from matter,
//! regime labels, de Sitter backgrounds and the growth bounds.

use std::fmt;

use crate::error::{DynamoError, Result};
use crate::geometry::{evolve_einstein_flow, Metric2, RicciData};
use crate::linalg;
use crate::operator::{DynamoOperator, ReducedOperator};
use crate::spectrum::{degeneracy_discriminant, stated_real_part, FAST_DYNAMO_THRESHOLD};

/// Tolerance for "vanishing expansion" and `R = ρ` in the marginal test.
pub const MARGINAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosmologicalState {
    pub rho: f64,
    pub lambda: Option<f64>,
    pub theta: f64,
    /// Ricci scalar in the trace convention.
    pub ricci: f64,
}

impl CosmologicalState {
    pub fn new(rho: f64, lambda: Option<f64>, theta: f64, ricci: f64) -> Result<Self> {
        if rho < 0.0 || rho.is_nan() {
            return Err(DynamoError::NegativeDensity(rho));
        }
        Ok(Self {
            rho,
            lambda,
            theta,
            ricci,
        })
    }

    /// Identifies the curvature with the cosmological constant, `R := Λ`.
    pub fn with_einstein_condition(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self.ricci = lambda;
        self
    }
}

/// Pressure-free matter state with `R = ρ + θ`.
pub fn curvature_from_matter(rho: f64, theta: f64) -> Result<CosmologicalState> {
    CosmologicalState::new(rho, None, theta, rho + theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeLabel {
    FastDynamo,
    Decay,
    MarginalEinsteinStatic,
    DegenerateEigenvalues,
}

impl RegimeLabel {
    pub fn name(self) -> &'static str {
        match self {
            RegimeLabel::FastDynamo => "FastDynamo",
            RegimeLabel::Decay => "Decay",
            RegimeLabel::MarginalEinsteinStatic => "MarginalEinsteinStatic",
            RegimeLabel::DegenerateEigenvalues => "DegenerateEigenvalues",
        }
    }

    /// Small integer used in plot data.
    pub fn code(self) -> u8 {
        match self {
            RegimeLabel::FastDynamo => 1,
            RegimeLabel::Decay => 0,
            RegimeLabel::MarginalEinsteinStatic => 2,
            RegimeLabel::DegenerateEigenvalues => 3,
        }
    }
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeEvidence {
    /// `½(−3R + ρ)`.
    pub real_part: f64,
    /// `11ρ − 8R`.
    pub discriminant: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub label: RegimeLabel,
    pub evidence: RegimeEvidence,
}

fn einstein_static(state: &CosmologicalState) -> bool {
    let scale = state.ricci.abs().max(state.rho).max(1.0);
    state.theta.abs() <= MARGINAL_TOLERANCE && (state.ricci - state.rho).abs() <= MARGINAL_TOLERANCE * scale
}

/// Labels a state. Precedence on boundaries: degenerate roots, then the
/// Einstein static case, then growth, then decay.
pub fn classify(state: &CosmologicalState) -> Regime {
    let real_part = stated_real_part(state.ricci, state.rho);
    let disc = degeneracy_discriminant(state.rho, state.ricci);
    let label = if disc.degenerate {
        RegimeLabel::DegenerateEigenvalues
    } else if einstein_static(state) {
        RegimeLabel::MarginalEinsteinStatic
    } else if real_part > FAST_DYNAMO_THRESHOLD {
        RegimeLabel::FastDynamo
    } else {
        RegimeLabel::Decay
    };
    Regime {
        label,
        evidence: RegimeEvidence {
            real_part,
            discriminant: disc.value,
            theta: state.theta,
        },
    }
}

/// Components of `ds² = −dt² + e^{Λt}(dx² + dy²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeSitterMetric {
    pub components: [[f64; 3]; 3],
    pub t: f64,
}

impl DeSitterMetric {
    pub fn spatial(&self) -> Metric2 {
        let a = self.components[1][1];
        Metric2::conformal(a, self.t).expect("exponential scale factor is positive")
    }
}

pub fn desitter_metric(lambda: f64, t: f64) -> DeSitterMetric {
    let a = (lambda * t).exp();
    DeSitterMetric {
        components: [[-1.0, 0.0, 0.0], [0.0, a, 0.0], [0.0, 0.0, a]],
        t,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamoBound {
    /// `2Λ − θ`.
    pub growth: f64,
    pub supports_fast_dynamo: bool,
    pub marginal: bool,
}

pub fn dynamo_bound(lambda: f64, theta: f64) -> DynamoBound {
    let growth = 2.0 * lambda - theta;
    let marginal = growth.abs() <= MARGINAL_TOLERANCE;
    DynamoBound {
        growth,
        supports_fast_dynamo: growth > 0.0 && !marginal,
        marginal,
    }
}

/// Reduced field equation on the de Sitter background, `∂B = (2Λ − θ) B`.
pub fn desitter_operator(lambda: f64, theta: f64) -> DynamoOperator {
    let g = 2.0 * lambda - theta;
    DynamoOperator::Reduced(ReducedOperator::from_matrix(linalg::scale(&linalg::IDENTITY, g)))
}

/// True when a matter state with `R = ρ + θ` is classified as a fast dynamo.
///
/// Substituting `R = ρ + θ` into the real part gives `½(−2ρ − 3θ)`, so growth
/// needs `−3θ > 2ρ`: a contracting universe whenever matter is present. The
/// algebraic form is checked against the classification.
pub fn corollary_check(state: &CosmologicalState) -> Result<bool> {
    let scale = state.rho.abs().max(state.theta.abs()).max(1.0);
    if (state.ricci - (state.rho + state.theta)).abs() > 1e-12 * scale {
        return Err(DynamoError::InvalidInput(format!(
            "state does not satisfy R = rho + theta (R = {}, rho = {}, theta = {})",
            state.ricci, state.rho, state.theta
        )));
    }
    let fast = classify(state).label == RegimeLabel::FastDynamo;
    let algebraic = 0.5 * (-2.0 * state.rho - 3.0 * state.theta);
    debug_assert!(
        !fast || algebraic > 0.0,
        "fast label without positive substituted real part"
    );
    Ok(fast)
}

/// Curvature `½ tr(g⁻¹ Ric)` along an Euler-stepped Einstein flow with `Ric = λ g`.
pub fn curvature_along_flow(g0: &Metric2, lambda: f64, t_end: f64, steps: usize) -> Result<Vec<f64>> {
    evolve_einstein_flow(g0, lambda, t_end, steps)?
        .iter()
        .map(|g| {
            let ric = RicciData::einstein(lambda, g);
            let ginv = g.inverse()?;
            Ok(0.5 * linalg::trace(&linalg::mul(&ginv, ric.components())))
        })
        .collect()
}
