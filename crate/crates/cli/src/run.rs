//! Executes a validated scenario into result tables and writes them out.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ricci_dynamo_core::cosmology::{classify, corollary_check, dynamo_bound, CosmologicalState};
use ricci_dynamo_core::dynamics::{
    anti_dynamo_check, energy_rate, energy_rate_on, integrate_with, lyapunov_exponent, EnergyHistory, Stepper,
};
use ricci_dynamo_core::eigen::EigenOptions;
use ricci_dynamo_core::geometry::{evolve_einstein_flow, exact_flow_metric, lyapunov_from_metric};
use ricci_dynamo_core::operator::{CompressionSign, GridGeometry};
use ricci_dynamo_core::spectrum::{discrepancy_report, fast_dynamo_test, numerical_spectrum, quadratic_roots};
use ricci_dynamo_core::{
    assemble_grid, assemble_reduced, DynamoError, DynamoOperator, Grid, MagneticField, Metric2, SpectrumResult,
    VectorField,
};

use crate::expr::FieldExpr;
use crate::scenario::{Model, OutputKind, Point, Scenario, StepperSpec, Velocity};
use crate::table::{emit_plotdata, Cell, Metadata, PlotKind, ResultTable, SchemaMismatch};

#[derive(Debug)]
pub enum RunError {
    Numerical {
        context: String,
        source: DynamoError,
    },
    NonFinite {
        kind: String,
        point: String,
        column: String,
    },
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Plot(SchemaMismatch),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Numerical { .. } | RunError::NonFinite { .. } => 3,
            RunError::Io { .. } => 4,
            RunError::Plot(_) => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Numerical { context, source } => write!(f, "numerical failure at {context}: {source}"),
            RunError::NonFinite { kind, point, column } => {
                write!(f, "non-finite value in {kind} output at {point}, column {column}")
            }
            RunError::Io { path, source } => write!(f, "cannot write {}: {source}", path.display()),
            RunError::Plot(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Format {
    pub csv: bool,
    pub json: bool,
}

impl Format {
    pub const BOTH: Format = Format { csv: true, json: true };
}

/// Lyapunov horizon used by `sweep` when the scenario has no `[time]` table.
const DEFAULT_LYAPUNOV_HORIZON: f64 = 50.0;
const LYAPUNOV_SAMPLES: usize = 6;

fn numerical(p: &Point) -> impl Fn(DynamoError) -> RunError + '_ {
    move |source| RunError::Numerical {
        context: p.to_string(),
        source,
    }
}

/// Evaluates `f` on every point in parallel; the first failure in sweep order wins.
fn per_point<T: Send>(
    points: &[Point],
    f: impl Fn(&Point) -> Result<T, DynamoError> + Sync,
) -> Result<Vec<T>, RunError> {
    let results: Vec<Result<T, DynamoError>> = points.par_iter().map(&f).collect();
    results
        .into_iter()
        .zip(points)
        .map(|(r, p)| r.map_err(numerical(p)))
        .collect()
}

fn value(p: Option<f64>) -> f64 {
    p.expect("validated scenario supplies the parameter")
}

/// Grid, velocity and geometry shared by every point of a grid scenario.
struct GridSetup {
    grid: Grid,
    velocity: VectorField,
    geometry: GridGeometry,
}

impl GridSetup {
    fn new(s: &Scenario) -> Result<Self, RunError> {
        let spec = s.grid.as_ref().expect("grid model has a grid table");
        let setup_err = |source| RunError::Numerical {
            context: "grid setup".into(),
            source,
        };
        let grid = Grid::new(spec.n).map_err(setup_err)?;
        let velocity = match &spec.velocity {
            Velocity::Zero => VectorField::zeros(grid),
            Velocity::Shear(a) => {
                let a = *a;
                VectorField::from_fn(grid, move |_, y| a * y.sin(), |_, _| 0.0)
            }
            Velocity::Rotation(w) => {
                let w = *w;
                VectorField::from_fn(
                    grid,
                    move |x, y| w * x.sin() * y.cos(),
                    move |x, y| -w * x.cos() * y.sin(),
                )
            }
            Velocity::Expression { x, y } => {
                let ex = FieldExpr::parse(x).expect("validated expression");
                let ey = FieldExpr::parse(y).expect("validated expression");
                VectorField::from_fn(grid, |a, b| ex.eval(a, b), |a, b| ey.eval(a, b))
            }
        };
        if velocity.max_abs().is_nan() {
            return Err(setup_err(DynamoError::InvalidInput(
                "velocity expression evaluates to NaN on the grid".into(),
            )));
        }
        let geometry = match &spec.conformal {
            None => GridGeometry::flat(grid),
            Some(text) => {
                let phi = FieldExpr::parse(text).expect("validated expression");
                GridGeometry::conformal(grid, &grid.sample(|x, y| phi.eval(x, y))).map_err(setup_err)?
            }
        };
        Ok(Self {
            grid,
            velocity,
            geometry,
        })
    }

    fn operator(&self, eta: f64) -> Result<DynamoOperator, DynamoError> {
        assemble_grid(self.velocity.clone(), self.geometry.clone(), eta, CompressionSign::Plus)
    }

    /// Seeded divergence-free initial field built from a few low modes of a stream function.
    fn initial_field(&self, seed: u64) -> VectorField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes: Vec<(f64, f64, f64, f64)> = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0), (2.0, 1.0)]
            .iter()
            .map(|&(k, l)| (k, l, rng.random_range(-1.0..1.0), rng.random_range(0.0..TAU)))
            .collect();
        let m2 = modes.clone();
        // B = (∂_y ψ, −∂_x ψ) with ψ = Σ a sin(kx + ly + φ)
        VectorField::from_fn(
            self.grid,
            move |x, y| modes.iter().map(|(k, l, a, p)| a * l * (k * x + l * y + p).cos()).sum(),
            move |x, y| m2.iter().map(|(k, l, a, p)| -a * k * (k * x + l * y + p).cos()).sum(),
        )
    }
}

fn reduced_initial_field(seed: u64) -> MagneticField {
    let angle = ChaCha8Rng::seed_from_u64(seed).random_range(0.0..TAU);
    MagneticField::Reduced([angle.cos(), angle.sin()])
}

struct Context<'a> {
    scenario: &'a Scenario,
    points: Vec<Point>,
    grid: Option<GridSetup>,
    metadata: Metadata,
}

/// Runs every requested output and returns the tables in output order.
pub fn execute(scenario: &Scenario, timestamp: &str) -> Result<Vec<ResultTable>, RunError> {
    let grid = match scenario.model {
        Model::Grid => Some(GridSetup::new(scenario)?),
        Model::Reduced => None,
    };
    let ctx = Context {
        scenario,
        points: scenario.points(),
        grid,
        metadata: Metadata {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            scenario_digest: scenario.digest(),
            timestamp: timestamp.to_string(),
        },
    };
    let mut tables = Vec::new();
    for &kind in &scenario.outputs {
        let table = match kind {
            OutputKind::Spectrum => spectrum_table(&ctx)?,
            OutputKind::Sweep => sweep_table(&ctx)?,
            OutputKind::Evolve => evolve_table(&ctx)?,
            OutputKind::Classify => classify_table(&ctx)?,
            OutputKind::RicciFlow => ricci_flow_table(&ctx)?,
            OutputKind::Discrepancy => discrepancy_table(&ctx)?,
        };
        if let Some((row, column)) = table.first_non_finite() {
            let point = match table.column("point").map(|p| &table.rows[row][p]) {
                Some(Cell::Int(i)) => ctx.points[*i as usize].to_string(),
                _ => format!("row {row}"),
            };
            return Err(RunError::NonFinite {
                kind: table.kind.clone(),
                point,
                column: column.to_string(),
            });
        }
        tables.push(table);
    }
    Ok(tables)
}

fn point_spectrum(ctx: &Context, p: &Point) -> Result<SpectrumResult, DynamoError> {
    let eta = value(p.eta);
    match &ctx.grid {
        None => Ok(quadratic_roots(value(p.ricci), value(p.theta), eta)),
        Some(g) => {
            let k = ctx.scenario.grid.as_ref().map(|s| s.eigenvalues).unwrap_or(4);
            let opts = EigenOptions {
                seed: ctx.scenario.seed,
                ..EigenOptions::default()
            };
            numerical_spectrum(&g.operator(eta)?, k, &opts)
        }
    }
}

fn spectrum_table(ctx: &Context) -> Result<ResultTable, RunError> {
    let reduced = ctx.grid.is_none();
    let cols: &[&str] = if reduced {
        &[
            "row_kind",
            "point",
            "R",
            "theta",
            "eta",
            "source",
            "source_code",
            "re",
            "im",
            "multiplicity",
            "verdict",
        ]
    } else {
        &[
            "row_kind",
            "point",
            "eta",
            "source",
            "source_code",
            "re",
            "im",
            "multiplicity",
            "verdict",
        ]
    };
    let mut table = ResultTable::new("spectrum", cols, ctx.metadata.clone());
    let spectra = per_point(&ctx.points, |p| point_spectrum(ctx, p))?;

    let row = |kind: &str, p: &Point, eta: f64, spec: &SpectrumResult, re: f64, im: f64, mult: u8, verdict: &str| {
        let mut r: Vec<Cell> = vec![kind.into(), p.index.into()];
        if reduced {
            r.push(value(p.ricci).into());
            r.push(value(p.theta).into());
        }
        r.extend([
            eta.into(),
            spec.source.name().into(),
            spec.source.code().into(),
            re.into(),
            im.into(),
            mult.into(),
            verdict.into(),
        ]);
        r
    };
    for (p, spec) in ctx.points.iter().zip(&spectra) {
        for root in &spec.roots {
            table.push(row(
                "root",
                p,
                value(p.eta),
                spec,
                root.value.re,
                root.value.im,
                root.multiplicity,
                "",
            ));
        }
    }

    // fast-dynamo limit along each η sweep with the other parameters held fixed
    if ctx.scenario.parameters.eta.map(|e| e.is_sweep()).unwrap_or(false) {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut index: HashMap<[u64; 4], usize> = HashMap::new();
        for (i, p) in ctx.points.iter().enumerate() {
            let key = [p.ricci, p.theta, p.rho, p.lambda].map(|v| v.map(f64::to_bits).unwrap_or(u64::MAX));
            let g = *index.entry(key).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(i);
        }
        for members in groups.iter().filter(|m| m.len() >= 3) {
            let mut etas: Vec<(f64, usize)> = members.iter().map(|&i| (value(ctx.points[i].eta), i)).collect();
            etas.sort_by(|a, b| b.0.total_cmp(&a.0));
            let sequence: Vec<f64> = etas.iter().map(|e| e.0).collect();
            let lookup = |eta: f64| -> Result<SpectrumResult, DynamoError> {
                let i = etas.iter().find(|e| e.0 == eta).expect("eta from the sequence").1;
                Ok(spectra[i].clone())
            };
            let first = &ctx.points[members[0]];
            let verdict = fast_dynamo_test(lookup, &sequence).map_err(numerical(first))?;
            let spec = &spectra[members[0]];
            table.push(row(
                "fast_dynamo_verdict",
                first,
                0.0,
                spec,
                verdict.limit,
                0.0,
                0,
                if verdict.fast { "true" } else { "false" },
            ));
        }
    }
    Ok(table)
}

fn sweep_table(ctx: &Context) -> Result<ResultTable, RunError> {
    let horizon = ctx.scenario.time.map(|t| t.t_end).unwrap_or(DEFAULT_LYAPUNOV_HORIZON);
    let seed = ctx.scenario.seed;
    match &ctx.grid {
        None => {
            let mut table = ResultTable::new(
                "sweep",
                &[
                    "point",
                    "R",
                    "theta",
                    "eta",
                    "max_re",
                    "min_re",
                    "lyapunov",
                    "lyapunov_converged",
                    "constraint_value",
                    "constraint_holds",
                    "anti_dynamo_consistent",
                ],
                ctx.metadata.clone(),
            );
            let rows = per_point(&ctx.points, |p| {
                let (r, th, eta) = (value(p.ricci), value(p.theta), value(p.eta));
                let spec = quadratic_roots(r, th, eta);
                let min_re = spec.values().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
                let lyap = lyapunov_exponent(&assemble_reduced(r, th, eta), horizon, LYAPUNOV_SAMPLES, seed)?;
                let verdict = anti_dynamo_check(r, th, &lyap);
                Ok(vec![
                    p.index.into(),
                    r.into(),
                    th.into(),
                    eta.into(),
                    spec.max_real_part.into(),
                    min_re.into(),
                    lyap.value.into(),
                    lyap.converged.into(),
                    verdict.constraint_value.into(),
                    verdict.constraint_holds.into(),
                    verdict.consistent.into(),
                ])
            })?;
            rows.into_iter().for_each(|r| table.push(r));
            Ok(table)
        }
        Some(g) => {
            let mut table = ResultTable::new(
                "sweep",
                &["point", "eta", "max_re", "lyapunov", "lyapunov_converged"],
                ctx.metadata.clone(),
            );
            let rows = per_point(&ctx.points, |p| {
                let eta = value(p.eta);
                let spec = point_spectrum(ctx, p)?;
                let lyap = lyapunov_exponent(&g.operator(eta)?, horizon, LYAPUNOV_SAMPLES, seed)?;
                Ok(vec![
                    p.index.into(),
                    eta.into(),
                    spec.max_real_part.into(),
                    lyap.value.into(),
                    lyap.converged.into(),
                ])
            })?;
            rows.into_iter().for_each(|r| table.push(r));
            Ok(table)
        }
    }
}

fn evolve_table(ctx: &Context) -> Result<ResultTable, RunError> {
    let time = ctx.scenario.time.expect("validated: evolve needs time");
    let reduced = ctx.grid.is_none();
    let cols: &[&str] = if reduced {
        &[
            "point",
            "R",
            "theta",
            "eta",
            "t",
            "norm",
            "energy",
            "log_energy",
            "fitted_rate",
            "trend",
        ]
    } else {
        &[
            "point",
            "eta",
            "t",
            "norm",
            "energy",
            "log_energy",
            "fitted_rate",
            "trend",
        ]
    };
    let mut table = ResultTable::new("evolve", cols, ctx.metadata.clone());
    let stepper = match time.stepper {
        Some(StepperSpec::Rk4) => Stepper::Rk4,
        Some(StepperSpec::Exact) => Stepper::Exact,
        None if reduced => Stepper::Exact,
        None => Stepper::Rk4,
    };
    let seed = ctx.scenario.seed;
    let histories = per_point(&ctx.points, |p| -> Result<(Vec<f64>, EnergyHistory), DynamoError> {
        let eta = value(p.eta);
        match &ctx.grid {
            None => {
                let op = assemble_reduced(value(p.ricci), value(p.theta), eta);
                let traj = integrate_with(&op, &reduced_initial_field(seed), time.t_end, time.dt, stepper)?;
                Ok((traj.norms.clone(), energy_rate(&traj, Metric2::identity)?))
            }
            Some(g) => {
                let op = g.operator(eta)?;
                let b0 = MagneticField::Grid(g.initial_field(seed));
                let traj = integrate_with(&op, &b0, time.t_end, time.dt, stepper)?;
                Ok((traj.norms.clone(), energy_rate_on(&traj, &g.geometry)?))
            }
        }
    })?;
    for (p, (norms, hist)) in ctx.points.iter().zip(&histories) {
        for ((t, e), n) in hist.times.iter().zip(&hist.energy).zip(norms) {
            let mut r: Vec<Cell> = vec![p.index.into()];
            if reduced {
                r.push(value(p.ricci).into());
                r.push(value(p.theta).into());
            }
            r.extend([
                value(p.eta).into(),
                (*t).into(),
                (*n).into(),
                (*e).into(),
                e.ln().into(),
                hist.fitted_rate.into(),
                hist.trend.name().into(),
            ]);
            table.push(r);
        }
    }
    Ok(table)
}

fn classify_table(ctx: &Context) -> Result<ResultTable, RunError> {
    let given_r = ctx.scenario.parameters.ricci.is_some();
    let with_lambda = ctx.scenario.parameters.lambda.is_some();
    let mut cols = vec![
        "point",
        "rho",
        "theta",
        "R",
        "R_source",
        "regime",
        "regime_code",
        "real_part",
        "discriminant",
    ];
    if !given_r {
        cols.push("corollary");
    }
    if with_lambda {
        cols.extend(["Lambda", "growth", "supports_fast_dynamo", "bound_marginal"]);
    }
    let mut table = ResultTable::new("classify", &cols, ctx.metadata.clone());
    let rows = per_point(&ctx.points, |p| {
        let (rho, theta) = (value(p.rho), value(p.theta));
        let state = match p.ricci {
            Some(r) => CosmologicalState::new(rho, p.lambda, theta, r)?,
            None => {
                let mut s = ricci_dynamo_core::cosmology::curvature_from_matter(rho, theta)?;
                s.lambda = p.lambda;
                s
            }
        };
        let regime = classify(&state);
        let mut r: Vec<Cell> = vec![
            p.index.into(),
            rho.into(),
            theta.into(),
            state.ricci.into(),
            if given_r { "given" } else { "matter" }.into(),
            regime.label.name().into(),
            regime.label.code().into(),
            regime.evidence.real_part.into(),
            regime.evidence.discriminant.into(),
        ];
        if !given_r {
            r.push(corollary_check(&state)?.into());
        }
        if let Some(l) = p.lambda {
            let b = dynamo_bound(l, theta);
            r.extend([
                l.into(),
                b.growth.into(),
                b.supports_fast_dynamo.into(),
                b.marginal.into(),
            ]);
        }
        Ok(r)
    })?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn ricci_flow_table(ctx: &Context) -> Result<ResultTable, RunError> {
    let time = ctx.scenario.time.expect("validated: ricci_flow needs time");
    let steps = ((time.t_end / time.dt).round() as usize).max(1);
    let mut table = ResultTable::new(
        "ricci_flow",
        &[
            "point",
            "lambda",
            "step",
            "t",
            "g11",
            "g12",
            "g22",
            "exact",
            "abs_error",
            "fitted_lambda",
        ],
        ctx.metadata.clone(),
    );
    let histories = per_point(&ctx.points, |p| {
        let lambda = p.lambda.or(p.ricci).expect("validated: Lambda or R present");
        let history = evolve_einstein_flow(&Metric2::identity(0.0), lambda, time.t_end, steps)?;
        let fit = lyapunov_from_metric(&history)?;
        Ok((lambda, history, fit.ricci_rates[1]))
    })?;
    for (p, (lambda, history, fitted)) in ctx.points.iter().zip(&histories) {
        for (k, g) in history.iter().enumerate() {
            let c = g.components();
            let exact = exact_flow_metric(*lambda, g.time()).components()[0][0];
            table.push(vec![
                p.index.into(),
                (*lambda).into(),
                k.into(),
                g.time().into(),
                c[0][0].into(),
                c[0][1].into(),
                c[1][1].into(),
                exact.into(),
                (c[0][0] - exact).abs().into(),
                (*fitted).into(),
            ]);
        }
    }
    Ok(table)
}

fn discrepancy_table(ctx: &Context) -> Result<ResultTable, RunError> {
    let mut table = ResultTable::new(
        "discrepancy",
        &[
            "point",
            "R",
            "theta",
            "eta",
            "route_a",
            "route_b",
            "max_difference",
            "tolerance",
            "agrees",
        ],
        ctx.metadata.clone(),
    );
    let reports = per_point(&ctx.points, |p| {
        discrepancy_report(value(p.ricci), value(p.theta), value(p.eta))
    })?;
    for (p, report) in ctx.points.iter().zip(&reports) {
        for e in &report.entries {
            table.push(vec![
                p.index.into(),
                report.params.ricci.into(),
                report.params.theta.into(),
                report.params.eta.into(),
                e.a.name().into(),
                e.b.name().into(),
                e.max_difference().into(),
                report.tolerance.into(),
                e.agrees.into(),
            ]);
        }
    }
    Ok(table)
}

fn plot_kind(kind: &str) -> Option<PlotKind> {
    match kind {
        "spectrum" => Some(PlotKind::SpectrumScatter),
        "evolve" => Some(PlotKind::GrowthCurve),
        "classify" => Some(PlotKind::RegimeMap),
        _ => None,
    }
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf, RunError> {
    std::fs::write(&path, contents).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes `<kind>.csv`, `<kind>.json` and, for plottable kinds, `<kind>.dat`.
pub fn write_outputs(tables: &[ResultTable], out: &Path, format: Format) -> Result<Vec<PathBuf>, RunError> {
    std::fs::create_dir_all(out).map_err(|source| RunError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for table in tables {
        if format.csv {
            written.push(write(out.join(format!("{}.csv", table.kind)), &table.to_csv())?);
        }
        if format.json {
            written.push(write(out.join(format!("{}.json", table.kind)), &table.to_json())?);
        }
        if let Some(kind) = plot_kind(&table.kind) {
            let dat = emit_plotdata(table, kind).map_err(RunError::Plot)?;
            written.push(write(out.join(format!("{}.dat", table.kind)), &dat)?);
        }
    }
    Ok(written)
}
