//! Two-dimensional Riemannian metrics, their Ricci flow, connection
//! coefficients and the kinematic (Ehlers–Sachs) split of a flow gradient.

use crate::error::{DynamoError, Result};
use crate::linalg::{self, Mat2, Vec2};

/// Rank-3 array indexed `[upper][lower][lower]`.
pub type Tensor3 = [[[f64; 2]; 2]; 2];

const ZERO3: Tensor3 = [[[0.0; 2]; 2]; 2];

/// A symmetric positive-definite 2×2 metric tagged with its flow time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric2 {
    components: Mat2,
    t: f64,
}

impl Metric2 {
    pub fn new(components: Mat2, t: f64) -> Result<Self> {
        if components.iter().flatten().any(|x| !x.is_finite()) {
            return Err(DynamoError::DegenerateMetric("non-finite component".into()));
        }
        if components[0][1] != components[1][0] {
            return Err(DynamoError::DegenerateMetric(format!(
                "asymmetric metric: g12 = {}, g21 = {}",
                components[0][1], components[1][0]
            )));
        }
        let d = linalg::det(&components);
        if components[0][0] <= 0.0 || d <= 0.0 {
            return Err(DynamoError::DegenerateMetric(format!(
                "g11 = {}, det g = {}",
                components[0][0], d
            )));
        }
        Ok(Self { components, t })
    }

    pub fn identity(t: f64) -> Self {
        Self {
            components: linalg::IDENTITY,
            t,
        }
    }

    /// `factor · δ_ij`; `factor` must be positive.
    pub fn conformal(factor: f64, t: f64) -> Result<Self> {
        Self::new([[factor, 0.0], [0.0, factor]], t)
    }

    pub fn components(&self) -> &Mat2 {
        &self.components
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn det(&self) -> f64 {
        linalg::det(&self.components)
    }

    /// Volume element `sqrt(det g)`.
    pub fn volume_element(&self) -> f64 {
        self.det().sqrt()
    }

    pub fn inverse(&self) -> Result<Mat2> {
        linalg::inverse(&self.components)
            .ok_or_else(|| DynamoError::DegenerateMetric("metric is not invertible".into()))
    }

    /// Lower Cholesky factor `L` with `g = L Lᵀ`.
    fn cholesky(&self) -> Mat2 {
        let g = &self.components;
        let l11 = g[0][0].sqrt();
        let l21 = g[1][0] / l11;
        let l22 = (g[1][1] - l21 * l21).max(0.0).sqrt();
        [[l11, 0.0], [l21, l22]]
    }
}

/// Ricci tensor components on the chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciData {
    components: Mat2,
}

impl RicciData {
    pub fn new(components: Mat2) -> Result<Self> {
        if components[0][1] != components[1][0] {
            return Err(DynamoError::InvalidInput(format!(
                "Ricci tensor must be symmetric: R12 = {}, R21 = {}",
                components[0][1], components[1][0]
            )));
        }
        Ok(Self { components })
    }

    pub fn zero() -> Self {
        Self {
            components: linalg::ZERO,
        }
    }

    /// Einstein condition `Ric = λ g`.
    pub fn einstein(lambda: f64, g: &Metric2) -> Self {
        Self {
            components: linalg::scale(g.components(), lambda),
        }
    }

    pub fn components(&self) -> &Mat2 {
        &self.components
    }

    /// Common diagonal component `R = R_11 = R_22` when `R_12 = 0`.
    pub fn einstein_scalar(&self) -> Option<f64> {
        let r = &self.components;
        let tol = 1e-12 * r[0][0].abs().max(r[1][1].abs()).max(1.0);
        (r[0][1] == 0.0 && (r[0][0] - r[1][1]).abs() <= tol).then_some(r[0][0])
    }
}

/// Explicit Euler step of `∂g/∂t = −2 Ric`.
pub fn ricci_flow_step(g: &Metric2, ric: &RicciData, dt: f64) -> Result<Metric2> {
    if !(dt > 0.0) {
        return Err(DynamoError::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let stepped = linalg::sub(g.components(), &linalg::scale(ric.components(), 2.0 * dt));
    Metric2::new(stepped, g.time() + dt)
}

/// Einstein flow `Ric = λ g` integrated with `steps` Euler steps up to `t_end`.
///
/// A step that loses positive-definiteness is retried as two half steps, down
/// to 2⁻³⁰ of the nominal step. Returns every nominal sample including `g0`.
pub fn evolve_einstein_flow(g0: &Metric2, lambda: f64, t_end: f64, steps: usize) -> Result<Vec<Metric2>> {
    if steps == 0 || !(t_end > 0.0) {
        return Err(DynamoError::InvalidInput(
            "Einstein flow needs t_end > 0 and at least one step".into(),
        ));
    }
    let dt = t_end / steps as f64;
    let mut history = Vec::with_capacity(steps + 1);
    history.push(*g0);
    let mut g = *g0;
    for _ in 0..steps {
        g = einstein_step_with_halving(&g, lambda, dt, 0)?;
        history.push(g);
    }
    Ok(history)
}

fn einstein_step_with_halving(g: &Metric2, lambda: f64, dt: f64, depth: u32) -> Result<Metric2> {
    match ricci_flow_step(g, &RicciData::einstein(lambda, g), dt) {
        Err(DynamoError::DegenerateMetric(_)) if depth < 30 => {
            let half = einstein_step_with_halving(g, lambda, 0.5 * dt, depth + 1)?;
            einstein_step_with_halving(&half, lambda, 0.5 * dt, depth + 1)
        }
        other => other,
    }
}

/// Closed-form Einstein flow from the flat metric: `exp(−2λt) δ_ij`.
pub fn exact_flow_metric(lambda: f64, t: f64) -> Metric2 {
    let f = (-2.0 * lambda * t).exp();
    Metric2 {
        components: [[f, 0.0], [0.0, f]],
        t,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciEigenpair {
    pub value: f64,
    /// Contravariant direction χ^j with unit g-norm.
    pub direction: Vec2,
}

/// Generalized eigenpairs `R_ij χ^j = λ g_ij χ^j`, ascending in λ.
pub fn ricci_eigen(ric: &RicciData, g: &Metric2) -> Vec<RicciEigenpair> {
    // reduce to a standard symmetric problem with g = L Lᵀ
    let l = g.cholesky();
    let l_inv = [[1.0 / l[0][0], 0.0], [-l[1][0] / (l[0][0] * l[1][1]), 1.0 / l[1][1]]];
    let reduced = linalg::mul(&linalg::mul(&l_inv, ric.components()), &linalg::transpose(&l_inv));
    let (values, vectors) = linalg::symmetric_eigen(&reduced);
    let l_inv_t = linalg::transpose(&l_inv);
    values
        .iter()
        .zip(vectors.iter())
        .map(|(&value, y)| RicciEigenpair {
            value,
            direction: linalg::mul_vec(&l_inv_t, y),
        })
        .collect()
}

/// Exponents extracted from a metric history.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteTimeExponents {
    /// Decay rates `−(1/2) d log Λ_ii / dt` of the metric eigenvalues; these
    /// recover the Ricci eigenvalues λ_i on an Einstein flow.
    pub ricci_rates: Vec<f64>,
    /// Lyapunov exponents `γ_i = −λ_i`.
    pub lyapunov: Vec<f64>,
}

/// Finite-time exponents from the log of the metric eigenvalues.
///
/// Each eigenvalue track `Λ_ii(t)` is fitted by least squares in `log Λ`;
/// with two samples this is the plain log-ratio over the window.
pub fn lyapunov_from_metric(history: &[Metric2]) -> Result<FiniteTimeExponents> {
    if history.len() < 2 {
        return Err(DynamoError::InsufficientSamples {
            needed: 2,
            got: history.len(),
        });
    }
    if history.windows(2).any(|w| w[1].time() <= w[0].time()) {
        return Err(DynamoError::InvalidInput(
            "metric history times must be strictly increasing".into(),
        ));
    }
    let times: Vec<f64> = history.iter().map(Metric2::time).collect();
    let mut ricci_rates = Vec::with_capacity(2);
    for i in 0..2 {
        let logs: Vec<f64> = history
            .iter()
            .map(|g| linalg::symmetric_eigen(g.components()).0[i].ln())
            .collect();
        ricci_rates.push(-0.5 * least_squares_slope(&times, &logs));
    }
    let lyapunov = ricci_rates.iter().map(|l| -l).collect();
    Ok(FiniteTimeExponents { ricci_rates, lyapunov })
}

pub(crate) fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
    }
    sxy / sxx
}

/// Connection coefficients at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Connection {
    /// `christoffel[i][j][k] = Γ^i_jk`.
    pub christoffel: Tensor3,
    /// `ricci_rotation[p][j][k] = γ^p_jk`, defined by `∂_j e_k = γ^p_jk e_p`.
    pub ricci_rotation: Tensor3,
}

impl Connection {
    pub fn flat() -> Self {
        Self {
            christoffel: ZERO3,
            ricci_rotation: ZERO3,
        }
    }
}

/// Metric derivatives `dg[l] = ∂_l g`.
pub type MetricDerivative = [Mat2; 2];

fn christoffel_with_factor(g: &Metric2, dg: &MetricDerivative, factor: f64) -> Result<Tensor3> {
    let g_inv = g.inverse()?;
    let mut out = ZERO3;
    for (i, plane) in out.iter_mut().enumerate() {
        for (j, row) in plane.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                *cell = factor
                    * (0..2)
                        .map(|l| g_inv[i][l] * (dg[j][k][l] + dg[k][j][l] - dg[l][j][k]))
                        .sum::<f64>();
            }
        }
    }
    Ok(out)
}

/// `Γ^i_jk = g^il (∂_j g_kl + ∂_k g_jl − ∂_l g_jk)`, without the customary ½.
///
/// The rotation coefficients are those of the coordinate frame, i.e. the
/// standard (halved) symbols.
pub fn christoffel(g: &Metric2, dg: &MetricDerivative) -> Result<Connection> {
    Ok(Connection {
        christoffel: christoffel_with_factor(g, dg, 1.0)?,
        ricci_rotation: christoffel_with_factor(g, dg, 0.5)?,
    })
}

/// Levi-Civita symbols with the ½ prefactor.
pub fn christoffel_standard(g: &Metric2, dg: &MetricDerivative) -> Result<Connection> {
    let standard = christoffel_with_factor(g, dg, 0.5)?;
    Ok(Connection {
        christoffel: standard,
        ricci_rotation: standard,
    })
}

/// Rotation coefficients of the orthonormal frame `e_k = e^{−φ} ∂_k` of the
/// conformal metric `e^{2φ} δ`, given `∂φ`.
///
/// `γ^p_jk = ∂_k φ δ_pj − δ_jk ∂_p φ`; antisymmetric in `(p, k)`.
pub fn conformal_frame_rotation(dphi: &Vec2) -> Tensor3 {
    let mut out = ZERO3;
    for (p, plane) in out.iter_mut().enumerate() {
        for (j, row) in plane.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                let delta_pj = if p == j { 1.0 } else { 0.0 };
                let delta_jk = if j == k { 1.0 } else { 0.0 };
                *cell = dphi[k] * delta_pj - delta_jk * dphi[p];
            }
        }
    }
    out
}

/// Vorticity, shear, expansion and acceleration of a flow gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EhlersSachs {
    /// Ω_pl, antisymmetric.
    pub vorticity: Mat2,
    /// σ_pl, symmetric.
    pub shear: Mat2,
    /// σ = g^{pl} σ_pl.
    pub shear_trace: f64,
    /// θ.
    pub expansion: f64,
    /// A_p.
    pub acceleration: Vec2,
}

impl EhlersSachs {
    /// `Ω_pl + σ_pl − (1/3) θ g_lp − A_p v_l`.
    pub fn reconstruct(&self, g: &Metric2, v: &Vec2) -> Mat2 {
        let gc = g.components();
        let mut out = linalg::ZERO;
        for (p, row) in out.iter_mut().enumerate() {
            for (l, cell) in row.iter_mut().enumerate() {
                *cell = self.vorticity[p][l] + self.shear[p][l]
                    - self.expansion / 3.0 * gc[l][p]
                    - self.acceleration[p] * v[l];
            }
        }
        out
    }
}

/// Splits `∇_p v_l` (row `p`, column `l`) into kinematic parts.
///
/// The acceleration is an input (zero when `None`). The isotropic part of
/// the symmetric remainder is carried entirely by θ with the 1/3 weight, so
/// the returned shear is g-traceless.
pub fn decompose_gradient(grad_v: &Mat2, g: &Metric2, v: &Vec2, acceleration: Option<Vec2>) -> Result<EhlersSachs> {
    let accel = acceleration.unwrap_or([0.0, 0.0]);
    let g_inv = g.inverse()?;
    let gc = g.components();
    let mut m = *grad_v;
    for (p, row) in m.iter_mut().enumerate() {
        for (l, cell) in row.iter_mut().enumerate() {
            *cell += accel[p] * v[l];
        }
    }
    let vorticity = [[0.0, 0.5 * (m[0][1] - m[1][0])], [0.5 * (m[1][0] - m[0][1]), 0.0]];
    let sym = [
        [m[0][0], 0.5 * (m[0][1] + m[1][0])],
        [0.5 * (m[0][1] + m[1][0]), m[1][1]],
    ];
    let trace_g: f64 = (0..2)
        .flat_map(|p| (0..2).map(move |l| (p, l)))
        .map(|(p, l)| g_inv[p][l] * sym[p][l])
        .sum();
    let expansion = -1.5 * trace_g;
    let shear = linalg::sub(&sym, &linalg::scale(gc, 0.5 * trace_g));
    let shear_trace: f64 = (0..2)
        .flat_map(|p| (0..2).map(move |l| (p, l)))
        .map(|(p, l)| g_inv[p][l] * shear[p][l])
        .sum();
    Ok(EhlersSachs {
        vorticity,
        shear,
        shear_trace,
        expansion,
        acceleration: accel,
    })
}

/// Divergence from the kinematic scalars, `σ − θ`.
pub fn flow_divergence(es: &EhlersSachs) -> f64 {
    es.shear_trace - es.expansion
}
