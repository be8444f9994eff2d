//! Time evolution under `Γ_η`: trajectories, magnetic energy, growth laws
//! and Lyapunov exponents of the propagator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DynamoError, Result};
use crate::geometry::{least_squares_slope, Metric2};
use crate::grid::VectorField;
use crate::linalg::{self, Vec2};
use crate::operator::{DynamoOperator, GridGeometry, GridOperator, MagneticField, ReducedOperator};

/// Per-step growth factor above which a step is declared unstable.
pub const MAX_STEP_GROWTH: f64 = 1e6;

/// Band around zero growth that counts as marginal.
pub const MARGINAL_RATE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<MagneticField>,
    pub norms: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Least-squares slope of `log ‖B‖` over samples with `t ≥ from`.
    pub fn log_norm_slope(&self, from: f64) -> f64 {
        let (t, l): (Vec<f64>, Vec<f64>) = self
            .times
            .iter()
            .zip(&self.norms)
            .filter(|(t, _)| **t >= from)
            .map(|(t, n)| (*t, n.ln()))
            .unzip();
        least_squares_slope(&t, &l)
    }
}

/// How the reduced system is advanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stepper {
    /// Closed-form matrix exponential (reduced operators only).
    Exact,
    /// Classical fourth-order Runge–Kutta.
    Rk4,
}

impl ReducedOperator {
    /// `exp(tA) b`, valid for negative `t` as well.
    pub fn propagate(&self, b: &Vec2, t: f64) -> Vec2 {
        linalg::mul_vec(&linalg::expm(&self.matrix, t), b)
    }
}

fn field_norm(b: &MagneticField, geometry: Option<&GridGeometry>) -> f64 {
    match (b, geometry) {
        (MagneticField::Grid(f), Some(geom)) => magnetic_energy_on(f, geom).sqrt(),
        (MagneticField::Grid(f), None) => {
            magnetic_energy(&MagneticField::Grid(f.clone()), &Metric2::identity(0.0)).sqrt()
        }
        (MagneticField::Reduced(v), _) => v[0].hypot(v[1]),
    }
}

fn sample_times(t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t_end > 0.0) || !(dt > 0.0) || dt > t_end {
        return Err(DynamoError::InvalidInput(format!(
            "need 0 < dt <= t_end, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let n = (t_end / dt - 1e-9).ceil() as usize;
    Ok((0..=n).map(|k| (k as f64 * dt).min(t_end)).collect())
}

/// Largest stable explicit step for the grid operator.
pub fn grid_stable_step(op: &GridOperator) -> f64 {
    let grid = op.grid();
    let h = grid.spacing();
    let mut dt = f64::INFINITY;
    if op.eta > 0.0 {
        let max_inv = (0..grid.len())
            .map(|node| {
                let gi = op.geometry.inverse_metric_at(node);
                linalg::symmetric_eigen(gi).0[1]
            })
            .fold(0.0_f64, f64::max);
        let spectral = 2.0 * grid.order.second_derivative_bound().abs() * max_inv / (h * h);
        dt = dt.min(2.5 / (op.eta * spectral));
    }
    let speed = op.max_speed();
    if speed > 0.0 {
        dt = dt.min(0.5 * h / speed);
    }
    dt
}

fn rk4_grid(op: &GridOperator, b: &VectorField, dt: f64) -> Result<VectorField> {
    let k1 = op.apply(b)?;
    let k2 = op.apply(&b.axpy(0.5 * dt, &k1))?;
    let k3 = op.apply(&b.axpy(0.5 * dt, &k2))?;
    let k4 = op.apply(&b.axpy(dt, &k3))?;
    let incr = k1.axpy(2.0, &k2).axpy(2.0, &k3).axpy(1.0, &k4);
    Ok(b.axpy(dt / 6.0, &incr))
}

fn rk4_reduced(op: &ReducedOperator, b: &Vec2, dt: f64) -> Vec2 {
    let f = |x: &Vec2| op.apply(x);
    let add = |x: &Vec2, s: f64, y: &Vec2| [x[0] + s * y[0], x[1] + s * y[1]];
    let k1 = f(b);
    let k2 = f(&add(b, 0.5 * dt, &k1));
    let k3 = f(&add(b, 0.5 * dt, &k2));
    let k4 = f(&add(b, dt, &k3));
    [
        b[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        b[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Integrates with the exact exponential for reduced operators and RK4 on grids.
pub fn integrate(op: &DynamoOperator, b0: &MagneticField, t_end: f64, dt: f64) -> Result<Trajectory> {
    let stepper = match op {
        DynamoOperator::Reduced(_) => Stepper::Exact,
        DynamoOperator::Grid(_) => Stepper::Rk4,
    };
    integrate_with(op, b0, t_end, dt, stepper)
}

/// Samples the trajectory every `dt` up to `t_end`. Grid runs take internal
/// substeps no larger than [`grid_stable_step`].
pub fn integrate_with(
    op: &DynamoOperator,
    b0: &MagneticField,
    t_end: f64,
    dt: f64,
    stepper: Stepper,
) -> Result<Trajectory> {
    if b0.is_zero() {
        return Err(DynamoError::InvalidInput("initial field must be nonzero".into()));
    }
    let times = sample_times(t_end, dt)?;
    let geometry = op.as_grid().map(|g| &g.geometry);
    let mut states = Vec::with_capacity(times.len());
    let mut norms = Vec::with_capacity(times.len());
    let mut current = b0.clone();
    states.push(current.clone());
    norms.push(field_norm(&current, geometry));
    for w in times.windows(2) {
        let (t_prev, t_next) = (w[0], w[1]);
        let h = t_next - t_prev;
        current = match (op, &current, stepper) {
            (DynamoOperator::Reduced(r), MagneticField::Reduced(_), Stepper::Exact) => {
                let bv = b0.as_reduced().expect("reduced initial field");
                MagneticField::Reduced(r.propagate(bv, t_next))
            }
            (DynamoOperator::Reduced(r), MagneticField::Reduced(b), Stepper::Rk4) => {
                MagneticField::Reduced(rk4_reduced(r, b, h))
            }
            (DynamoOperator::Grid(g), MagneticField::Grid(f), Stepper::Rk4) => {
                let substeps = (h / grid_stable_step(g)).ceil().max(1.0) as usize;
                let sub = h / substeps as f64;
                let mut field = f.clone();
                for _ in 0..substeps {
                    field = rk4_grid(g, &field, sub)?;
                }
                MagneticField::Grid(field)
            }
            (DynamoOperator::Grid(_), _, Stepper::Exact) => {
                return Err(DynamoError::InvalidInput(
                    "the exact exponential is only available for reduced operators".into(),
                ))
            }
            _ => {
                return Err(DynamoError::InvalidInput(
                    "operator and field realizations differ (reduced vs grid)".into(),
                ))
            }
        };
        let norm = field_norm(&current, geometry);
        let prev = *norms.last().expect("at least one sample");
        let factor = norm / prev;
        if !norm.is_finite() || (prev > 0.0 && factor > MAX_STEP_GROWTH) {
            return Err(DynamoError::StepUnstable { t: t_next, factor });
        }
        states.push(current.clone());
        norms.push(norm);
    }
    Ok(Trajectory { times, states, norms })
}

/// `∫ B^i g_ij B^j μ`: the plain quadratic form for reduced fields, a
/// Riemann sum weighted by `sqrt(det g)` over the periodic cell for grids.
pub fn magnetic_energy(b: &MagneticField, g: &Metric2) -> f64 {
    match b {
        MagneticField::Reduced(v) => linalg::bilinear(v, g.components(), v),
        MagneticField::Grid(f) => {
            let h = f.grid.spacing();
            let gc = g.components();
            let sum: f64 = (0..f.grid.len())
                .map(|i| linalg::bilinear(&[f.x[i], f.y[i]], gc, &[f.x[i], f.y[i]]))
                .sum();
            sum * g.volume_element() * h * h
        }
    }
}

/// Grid energy with a position-dependent metric.
pub fn magnetic_energy_on(f: &VectorField, geom: &GridGeometry) -> f64 {
    let h = f.grid.spacing();
    let sum: f64 = (0..f.grid.len())
        .map(|i| {
            let b = [f.x[i], f.y[i]];
            linalg::bilinear(&b, geom.metric_at(i), &b) * geom.volume_at(i)
        })
        .sum();
    sum * h * h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyTrend {
    Growing,
    Marginal,
    Decaying,
}

impl EnergyTrend {
    pub fn name(self) -> &'static str {
        match self {
            EnergyTrend::Growing => "growing",
            EnergyTrend::Marginal => "marginal",
            EnergyTrend::Decaying => "decaying",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyHistory {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    /// Least-squares slope of `log ε` over the second half of the window.
    pub fitted_rate: f64,
    pub trend: EnergyTrend,
}

impl EnergyHistory {
    /// `∂ε/∂t ≥ 0` up to the marginal band.
    pub fn dynamo_action(&self) -> bool {
        self.trend != EnergyTrend::Decaying
    }
}

/// Energy along a trajectory, with the metric taken from `metric_at(t)`.
pub fn energy_rate(traj: &Trajectory, metric_at: impl Fn(f64) -> Metric2) -> Result<EnergyHistory> {
    let energy = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, b)| magnetic_energy(b, &metric_at(*t)))
        .collect();
    energy_history(traj, energy)
}

/// Energy along a grid trajectory with a position-dependent metric.
pub fn energy_rate_on(traj: &Trajectory, geom: &GridGeometry) -> Result<EnergyHistory> {
    let energy = traj
        .states
        .iter()
        .map(|b| {
            b.as_grid()
                .map(|f| magnetic_energy_on(f, geom))
                .ok_or_else(|| DynamoError::InvalidInput("trajectory does not hold grid fields".into()))
        })
        .collect::<Result<Vec<f64>>>()?;
    energy_history(traj, energy)
}

fn energy_history(traj: &Trajectory, energy: Vec<f64>) -> Result<EnergyHistory> {
    if traj.len() < 3 {
        return Err(DynamoError::InsufficientSamples {
            needed: 3,
            got: traj.len(),
        });
    }
    if energy.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(DynamoError::InvalidInput(
            "energy must stay positive and finite to fit a log rate".into(),
        ));
    }
    let mid = 0.5 * (traj.times[0] + traj.times[traj.len() - 1]);
    let (t, l): (Vec<f64>, Vec<f64>) = traj
        .times
        .iter()
        .zip(&energy)
        .filter(|(t, _)| **t >= mid)
        .map(|(t, e)| (*t, e.ln()))
        .unzip();
    let fitted_rate = if t.len() >= 2 {
        least_squares_slope(&t, &l)
    } else {
        least_squares_slope(&traj.times, &energy.iter().map(|e| e.ln()).collect::<Vec<_>>())
    };
    let trend = if fitted_rate.abs() <= MARGINAL_RATE {
        EnergyTrend::Marginal
    } else if fitted_rate > 0.0 {
        EnergyTrend::Growing
    } else {
        EnergyTrend::Decaying
    };
    Ok(EnergyHistory {
        times: traj.times.clone(),
        energy,
        fitted_rate,
        trend,
    })
}

/// Field amplification `exp((2Λ − θ) t)` on the de Sitter background.
pub fn growth_law(lambda: f64, theta: f64, t: f64) -> f64 {
    ((2.0 * lambda - theta) * t).exp()
}

/// Field amplification `exp((2 Tr Ric − div v) t)`.
pub fn growth_law_from_trace(trace_ricci: f64, div_v: f64, t: f64) -> f64 {
    ((2.0 * trace_ricci - div_v) * t).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    /// Growth rate of the upper envelope of `log ‖e^{tΓ}‖` across `window`.
    pub value: f64,
    pub window: (f64, f64),
    pub converged: bool,
    /// `(t, (1/t) log ‖e^{tΓ}‖)` at each geometric sample time.
    pub estimates: Vec<(f64, f64)>,
}

/// Number of random restarts used for grid norm estimates (besides the first state).
pub const LYAPUNOV_RESTARTS: usize = 5;

/// Dense samples of `log ‖e^{tΓ}‖` per quarter of `t_max` used for the envelope.
pub const ENVELOPE_SAMPLES: usize = 512;

/// Estimates `lim sup (1/t) log ‖e^{tΓ}‖`.
///
/// The quotient itself is reported at `t_max / 2^j` for `j < samples`, but it
/// carries a `log C / t` bias and, for complex spectra, a bounded oscillation.
/// The reported value is instead the slope of the upper convex envelope of
/// `log ‖e^{tΓ}‖` sampled densely on `[t_max/2, t_max]`: the envelope rides on
/// the maxima of the oscillation, so its slope is the lim sup rate. Convergence
/// compares against the same slope on `[t_max/4, t_max/2]` (1%, floor 1e−6).
pub fn lyapunov_exponent(op: &DynamoOperator, t_max: f64, samples: usize, seed: u64) -> Result<LyapunovEstimate> {
    if !(t_max > 0.0) || samples < 4 {
        return Err(DynamoError::InvalidInput(format!(
            "need t_max > 0 and at least 4 samples, got t_max = {t_max}, samples = {samples}"
        )));
    }
    let geometric: Vec<f64> = (0..samples)
        .map(|i| t_max * 0.5_f64.powi((samples - 1 - i) as i32))
        .collect();
    let per_quarter = match op {
        DynamoOperator::Reduced(_) => ENVELOPE_SAMPLES,
        // no point sampling finer than the stable step
        DynamoOperator::Grid(g) => ((0.25 * t_max / grid_stable_step(g)).ceil() as usize).clamp(8, ENVELOPE_SAMPLES),
    };
    let dense_len = 3 * per_quarter + 1;
    let dense: Vec<f64> = (0..dense_len)
        .map(|i| t_max * (0.25 + 0.75 * i as f64 / (dense_len - 1) as f64))
        .collect();
    let mut times: Vec<f64> = geometric.iter().chain(&dense).copied().collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let log_norms: Vec<f64> = match op {
        DynamoOperator::Reduced(r) => times
            .iter()
            .map(|&t| linalg::expm_scaled(&r.matrix, t).log_norm())
            .collect(),
        DynamoOperator::Grid(g) => grid_log_norms(g, &times, seed)?,
    };
    let at = |t: f64| times.iter().position(|s| *s == t).map(|i| log_norms[i]);
    let estimates: Vec<(f64, f64)> = geometric
        .iter()
        .map(|&t| (t, at(t).expect("geometric time is sampled") / t))
        .collect();
    let slice = |lo: f64, hi: f64| -> (Vec<f64>, Vec<f64>) {
        times
            .iter()
            .zip(&log_norms)
            .filter(|(t, _)| **t >= lo && **t <= hi)
            .map(|(t, l)| (*t, *l))
            .unzip()
    };
    let (lt, ll) = slice(0.5 * t_max, t_max);
    let (et, el) = slice(0.25 * t_max, 0.5 * t_max);
    let late = envelope_slope(&lt, &ll);
    let early = envelope_slope(&et, &el);
    let converged = (late - early).abs() <= 0.01 * late.abs().max(early.abs()) + 1e-6;
    Ok(LyapunovEstimate {
        value: late,
        window: (0.5 * t_max, t_max),
        converged,
        estimates,
    })
}

/// Slope of the upper convex hull edge spanning the middle of the samples.
fn envelope_slope(t: &[f64], l: &[f64]) -> f64 {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(t.len());
    for p in t.iter().copied().zip(l.iter().copied()) {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            if (x2 - x1) * (p.1 - y1) - (y2 - y1) * (p.0 - x1) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mid = 0.5 * (t[0] + t[t.len() - 1]);
    hull.windows(2)
        .find(|w| w[0].0 <= mid && mid <= w[1].0)
        .or_else(|| hull.windows(2).last())
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .unwrap_or(0.0)
}

fn grid_log_norms(op: &GridOperator, times: &[f64], seed: u64) -> Result<Vec<f64>> {
    let grid = op.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = grid_stable_step(op);
    let mut best = vec![f64::NEG_INFINITY; times.len()];
    for _ in 0..=LYAPUNOV_RESTARTS {
        let mut field = VectorField::new(
            grid,
            (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect(),
            (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )?;
        let n0 = magnetic_energy_on(&field, &op.geometry).sqrt().ln();
        let mut t = 0.0;
        for (slot, &target) in best.iter_mut().zip(times) {
            let span = target - t;
            if span > 0.0 {
                let substeps = (span / step).ceil().max(1.0) as usize;
                let sub = span / substeps as f64;
                for _ in 0..substeps {
                    field = rk4_grid(op, &field, sub)?;
                }
                t = target;
            }
            let ln = magnetic_energy_on(&field, &op.geometry).sqrt().ln() - n0;
            if !ln.is_finite() {
                return Err(DynamoError::StepUnstable {
                    t,
                    factor: f64::INFINITY,
                });
            }
            *slot = slot.max(ln);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntiDynamoVerdict {
    /// `R + θ/2`.
    pub constraint_value: f64,
    pub constraint_holds: bool,
    pub marginal: bool,
    pub lyapunov_nonpositive: bool,
    /// The constraint implies a non-positive exponent.
    pub consistent: bool,
}

/// Tolerance on the Lyapunov exponent for the non-positivity check.
pub const LYAPUNOV_TOLERANCE: f64 = 1e-9;

pub fn anti_dynamo_check(ricci: f64, theta: f64, lyapunov: &LyapunovEstimate) -> AntiDynamoVerdict {
    let constraint_value = ricci + 0.5 * theta;
    let marginal = constraint_value.abs() <= 1e-12;
    let constraint_holds = constraint_value >= 0.0 || marginal;
    let lyapunov_nonpositive = lyapunov.value <= LYAPUNOV_TOLERANCE;
    AntiDynamoVerdict {
        constraint_value,
        constraint_holds,
        marginal,
        lyapunov_nonpositive,
        consistent: !constraint_holds || lyapunov_nonpositive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::operator::{assemble_grid, assemble_reduced, CompressionSign};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn zero_operator_keeps_field() {
        let op = DynamoOperator::Reduced(ReducedOperator::from_matrix(linalg::ZERO));
        let tr = integrate(&op, &MagneticField::Reduced([0.3, 0.4]), 1.0, 0.25).unwrap();
        assert_eq!(tr.len(), 5);
        assert!(tr.norms.iter().all(|n| (*n - 0.5).abs() < 1e-15));
    }

    #[test]
    fn defective_double_root_bounds() {
        let op = assemble_reduced(1.0, 0.0, 0.0);
        let tr = integrate(&op, &MagneticField::Reduced([1.0, 0.0]), 100.0, 0.5).unwrap();
        for (t, n) in tr.times.iter().zip(&tr.norms) {
            let lower = (-t).exp();
            assert!(*n >= lower * (1.0 - 1e-12));
            assert!(*n <= lower * (1.0 + t) * 2.0_f64.sqrt() * (1.0 + 1e-12));
        }
        assert!((tr.log_norm_slope(50.0) + 1.0).abs() < 0.02);
    }

    #[test]
    fn rejects_bad_arguments() {
        let op = assemble_reduced(1.0, 0.0, 0.0);
        let b = MagneticField::Reduced([1.0, 0.0]);
        assert!(integrate(&op, &b, 0.0, 0.1).is_err());
        assert!(integrate(&op, &b, 1.0, 2.0).is_err());
        assert!(integrate(&op, &MagneticField::Reduced([0.0, 0.0]), 1.0, 0.1).is_err());
    }

    #[test]
    fn unstable_step_is_reported() {
        let op = DynamoOperator::Reduced(ReducedOperator::from_matrix([[20.0, 0.0], [0.0, 0.0]]));
        let err = integrate(&op, &MagneticField::Reduced([1.0, 0.0]), 2.0, 1.0).unwrap_err();
        assert!(matches!(err, DynamoError::StepUnstable { .. }));
    }

    #[test]
    fn energy_examples() {
        let flat = Metric2::identity(0.0);
        assert_eq!(magnetic_energy(&MagneticField::Reduced([0.0, 0.0]), &flat), 0.0);
        let g = Grid::new(64).unwrap();
        let unit = MagneticField::Grid(VectorField::from_fn(g, |x, _| x.cos(), |x, _| x.sin()));
        assert_relative_eq!(magnetic_energy(&unit, &flat), 4.0 * PI * PI, max_relative = 1e-12);

        let (lambda, t) = (0.4, 1.5);
        let shrunk = crate::geometry::exact_flow_metric(lambda, t);
        let factor = (-2.0 * lambda * t).exp();
        let b = MagneticField::Reduced([0.3, -1.2]);
        assert_relative_eq!(
            magnetic_energy(&b, &shrunk),
            factor * magnetic_energy(&b, &flat),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            magnetic_energy(&unit, &shrunk),
            factor * factor * magnetic_energy(&unit, &flat),
            max_relative = 1e-12
        );
    }

    #[test]
    fn energy_rate_examples() {
        let op = DynamoOperator::Reduced(ReducedOperator::from_matrix(linalg::ZERO));
        let tr = integrate(&op, &MagneticField::Reduced([1.0, 1.0]), 2.0, 0.1).unwrap();
        let hist = energy_rate(&tr, Metric2::identity).unwrap();
        assert_eq!(hist.fitted_rate, 0.0);
        assert_eq!(hist.trend, EnergyTrend::Marginal);
        assert!(hist.dynamo_action());

        let short = integrate(&op, &MagneticField::Reduced([1.0, 1.0]), 0.1, 0.1).unwrap();
        assert!(matches!(
            energy_rate(&short, Metric2::identity),
            Err(DynamoError::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn growth_law_examples() {
        assert_eq!(growth_law(1.3, 0.2, 0.0), 1.0);
        assert_eq!(growth_law(0.5, 1.0, 7.0), 1.0);
        assert_relative_eq!(growth_law(1.0, 0.0, 1.0), 7.38905609893065, epsilon = 1e-12);
        assert_relative_eq!(
            growth_law_from_trace(1.0, 0.5, 2.0),
            3.0_f64.exp(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn lyapunov_examples() {
        let zero = DynamoOperator::Reduced(ReducedOperator::from_matrix(linalg::ZERO));
        let est = lyapunov_exponent(&zero, 50.0, 6, 1).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.converged);

        let est = lyapunov_exponent(&assemble_reduced(1.0, 1.0, 0.0), 50.0, 6, 1).unwrap();
        assert!(est.value.abs() < 1e-9, "{}", est.value);

        let rot = DynamoOperator::Reduced(ReducedOperator::from_matrix([[0.0, -2.0], [2.0, 0.0]]));
        let est = lyapunov_exponent(&rot, 50.0, 6, 1).unwrap();
        assert!(est.value.abs() < 1e-12);
        assert!(lyapunov_exponent(&rot, 50.0, 3, 1).is_err());
    }

    #[test]
    fn grid_lyapunov_of_pure_diffusion_is_zero_mode() {
        let g = Grid::new(16).unwrap();
        let op = assemble_grid(VectorField::zeros(g), GridGeometry::flat(g), 1.0, CompressionSign::Plus).unwrap();
        let est = lyapunov_exponent(&op, 8.0, 4, 3).unwrap();
        // the constant mode survives, everything else decays
        assert!(est.value.abs() < 1e-3, "{}", est.value);
    }

    #[test]
    fn anti_dynamo_examples() {
        let zero_est = LyapunovEstimate {
            value: 0.0,
            window: (1.0, 2.0),
            converged: true,
            estimates: vec![],
        };
        let v = anti_dynamo_check(1.0, 1.0, &zero_est);
        assert!(v.constraint_holds);
        assert_eq!(v.constraint_value, 1.5);
        assert!(v.consistent);
        let v = anti_dynamo_check(-1.0, 0.0, &zero_est);
        assert!(!v.constraint_holds);
        let v = anti_dynamo_check(0.0, 0.0, &zero_est);
        assert!(v.constraint_holds && v.marginal);
        let pos = LyapunovEstimate { value: 0.5, ..zero_est };
        assert!(!anti_dynamo_check(1.0, 1.0, &pos).consistent);
    }
}
