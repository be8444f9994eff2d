//! Scenario files: TOML in, validated [`Scenario`] out.
//!
//! Every validation failure names the offending field, e.g.
//! `parameters.eta.min: sweep min (0.1) must be below max (0.01)`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::expr::FieldExpr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioError {
    pub field: String,
    pub message: String,
}

impl ScenarioError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ScenarioError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Reduced,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Spectrum,
    Sweep,
    Evolve,
    Classify,
    RicciFlow,
    Discrepancy,
}

impl OutputKind {
    pub const ALL: [OutputKind; 6] = [
        Self::Spectrum,
        Self::Sweep,
        Self::Evolve,
        Self::Classify,
        Self::RicciFlow,
        Self::Discrepancy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::Sweep => "sweep",
            Self::Evolve => "evolve",
            Self::Classify => "classify",
            Self::RicciFlow => "ricci_flow",
            Self::Discrepancy => "discrepancy",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sweep {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: Scale,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let f = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + f * (self.max - self.min),
                    Scale::Log => 10f64.powf(self.min.log10() + f * (self.max.log10() - self.min.log10())),
                }
            })
            .map(|v| v.clamp(self.min, self.max))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Param {
    Scalar(f64),
    Sweep(Sweep),
}

impl Param {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Param::Scalar(v) => vec![*v],
            Param::Sweep(s) => s.values(),
        }
    }

    pub fn is_sweep(&self) -> bool {
        matches!(self, Param::Sweep(_))
    }
}

/// The five physical parameters, each optional, scalar or swept.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Parameters {
    #[serde(rename = "R")]
    pub ricci: Option<Param>,
    pub theta: Option<Param>,
    pub eta: Option<Param>,
    pub rho: Option<Param>,
    #[serde(rename = "Lambda")]
    pub lambda: Option<Param>,
}

/// Names as written in scenario files, in sweep nesting order (last varies fastest).
pub const PARAMETER_NAMES: [&str; 5] = ["R", "theta", "eta", "rho", "Lambda"];

impl Parameters {
    fn slot(&mut self, name: &str) -> &mut Option<Param> {
        match name {
            "R" => &mut self.ricci,
            "theta" => &mut self.theta,
            "eta" => &mut self.eta,
            "rho" => &mut self.rho,
            "Lambda" => &mut self.lambda,
            _ => unreachable!("checked against PARAMETER_NAMES"),
        }
    }

    fn get(&self, name: &str) -> Option<&Param> {
        match name {
            "R" => self.ricci.as_ref(),
            "theta" => self.theta.as_ref(),
            "eta" => self.eta.as_ref(),
            "rho" => self.rho.as_ref(),
            "Lambda" => self.lambda.as_ref(),
            _ => None,
        }
    }

    /// Cartesian product of all values, `Lambda` varying fastest.
    pub fn points(&self) -> Vec<Point> {
        let axes: Vec<Vec<Option<f64>>> = PARAMETER_NAMES
            .iter()
            .map(|n| match self.get(n) {
                Some(p) => p.values().into_iter().map(Some).collect(),
                None => vec![None],
            })
            .collect();
        let total: usize = axes.iter().map(Vec::len).product();
        (0..total)
            .map(|index| {
                let mut rem = index;
                let mut picked = [None; 5];
                for k in (0..5).rev() {
                    let len = axes[k].len();
                    picked[k] = axes[k][rem % len];
                    rem /= len;
                }
                Point {
                    index,
                    ricci: picked[0],
                    theta: picked[1],
                    eta: picked[2],
                    rho: picked[3],
                    lambda: picked[4],
                }
            })
            .collect()
    }
}

/// One parameter combination of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub index: usize,
    pub ricci: Option<f64>,
    pub theta: Option<f64>,
    pub eta: Option<f64>,
    pub rho: Option<f64>,
    pub lambda: Option<f64>,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sweep point {}", self.index)?;
        let parts: Vec<String> = [
            ("R", self.ricci),
            ("theta", self.theta),
            ("eta", self.eta),
            ("rho", self.rho),
            ("Lambda", self.lambda),
        ]
        .iter()
        .filter_map(|(n, v)| v.map(|v| format!("{n} = {v}")))
        .collect();
        if !parts.is_empty() {
            write!(f, " ({})", parts.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Velocity {
    Zero,
    /// `v = (a sin y, 0)`.
    Shear(f64),
    /// Cellular flow with stream function `ω sin x sin y`.
    Rotation(f64),
    Expression {
        x: String,
        y: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    #[serde(rename = "N")]
    pub n: usize,
    pub velocity: Velocity,
    /// Expression for `φ` in the conformal metric `e^{2φ} δ`; flat when absent.
    pub conformal: Option<String>,
    /// Leading eigenvalues computed per point.
    pub eigenvalues: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepperSpec {
    Exact,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeSpec {
    pub t_end: f64,
    pub dt: f64,
    /// `None` picks the model default: exact for reduced, rk4 for grid.
    pub stepper: Option<StepperSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub model: Model,
    pub seed: u64,
    pub outputs: Vec<OutputKind>,
    pub parameters: Parameters,
    pub grid: Option<GridSpec>,
    pub time: Option<TimeSpec>,
}

impl Scenario {
    /// SHA-256 of the canonical JSON form of the validated scenario.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("scenario serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn points(&self) -> Vec<Point> {
        self.parameters.points()
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    model: String,
    seed: Option<i64>,
    outputs: Vec<String>,
    #[serde(default)]
    parameters: toml::Table,
    grid: Option<RawGrid>,
    time: Option<RawTime>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(rename = "N")]
    n: i64,
    velocity: Option<toml::Value>,
    conformal: Option<String>,
    eigenvalues: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_end: f64,
    dt: f64,
    stepper: Option<String>,
}

pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::new(path.display().to_string(), format!("cannot read scenario: {e}")))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        let location = e
            .span()
            .map(|span| {
                let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
                format!("line {line}: ")
            })
            .unwrap_or_default();
        ScenarioError::new("scenario", format!("{location}{msg}"))
    })?;
    validate(raw)
}

fn number(value: &toml::Value, field: &str) -> Result<f64, ScenarioError> {
    let v = match value {
        toml::Value::Float(f) => *f,
        toml::Value::Integer(i) => *i as f64,
        other => {
            return Err(ScenarioError::new(
                field,
                format!("expected a number, found {}", other.type_str()),
            ))
        }
    };
    if !v.is_finite() {
        return Err(ScenarioError::new(field, "must be finite"));
    }
    Ok(v)
}

fn parse_param(name: &str, value: &toml::Value) -> Result<Param, ScenarioError> {
    let field = format!("parameters.{name}");
    let table = match value {
        toml::Value::Table(t) => t,
        other => return number(other, &field).map(Param::Scalar),
    };
    for key in table.keys() {
        if !["min", "max", "count", "scale"].contains(&key.as_str()) {
            return Err(ScenarioError::new(
                format!("{field}.{key}"),
                "unknown sweep key (expected min, max, count, scale)",
            ));
        }
    }
    let req = |key: &str| {
        table
            .get(key)
            .ok_or_else(|| ScenarioError::new(format!("{field}.{key}"), "missing in sweep range"))
    };
    let min = number(req("min")?, &format!("{field}.min"))?;
    let max = number(req("max")?, &format!("{field}.max"))?;
    let count = match req("count")? {
        toml::Value::Integer(c) => *c,
        other => {
            return Err(ScenarioError::new(
                format!("{field}.count"),
                format!("expected an integer, found {}", other.type_str()),
            ))
        }
    };
    let scale = match table.get("scale") {
        None => Scale::Linear,
        Some(toml::Value::String(s)) if s == "linear" => Scale::Linear,
        Some(toml::Value::String(s)) if s == "log" => Scale::Log,
        Some(other) => {
            return Err(ScenarioError::new(
                format!("{field}.scale"),
                format!("expected \"linear\" or \"log\", found {other}"),
            ))
        }
    };
    if count < 2 {
        return Err(ScenarioError::new(
            format!("{field}.count"),
            format!("sweep needs at least 2 points, got {count}"),
        ));
    }
    if count > 100_000 {
        return Err(ScenarioError::new(
            format!("{field}.count"),
            "sweep larger than 100000 points",
        ));
    }
    if min >= max {
        return Err(ScenarioError::new(
            format!("{field}.min"),
            format!("sweep min ({min}) must be below max ({max})"),
        ));
    }
    if scale == Scale::Log && min <= 0.0 {
        return Err(ScenarioError::new(
            format!("{field}.min"),
            format!("log-scale sweep needs min > 0, got {min}"),
        ));
    }
    Ok(Param::Sweep(Sweep {
        min,
        max,
        count: count as usize,
        scale,
    }))
}

fn parse_velocity(value: Option<&toml::Value>) -> Result<Velocity, ScenarioError> {
    const FIELD: &str = "grid.velocity";
    let value = match value {
        None => return Ok(Velocity::Zero),
        Some(v) => v,
    };
    match value {
        toml::Value::String(s) => {
            let (name, arg) = match s.split_once(':') {
                Some((n, a)) => (n.trim(), Some(a.trim())),
                None => (s.trim(), None),
            };
            let amplitude = |arg: Option<&str>| -> Result<f64, ScenarioError> {
                let a = arg.ok_or_else(|| {
                    ScenarioError::new(FIELD, format!("preset `{name}` needs a value, e.g. `{name}:1.0`"))
                })?;
                a.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ScenarioError::new(FIELD, format!("`{a}` is not a finite number")))
            };
            match name {
                "zero" if arg.is_none() => Ok(Velocity::Zero),
                "shear" => amplitude(arg).map(Velocity::Shear),
                "rotation" => amplitude(arg).map(Velocity::Rotation),
                _ => Err(ScenarioError::new(
                    FIELD,
                    format!("unknown preset `{s}` (expected zero, shear:<a>, rotation:<w>, or a table {{ x = \"...\", y = \"...\" }})"),
                )),
            }
        }
        toml::Value::Table(t) => {
            for key in t.keys() {
                if key != "x" && key != "y" {
                    return Err(ScenarioError::new(
                        format!("{FIELD}.{key}"),
                        "unknown component (expected x, y)",
                    ));
                }
            }
            let comp = |key: &str| -> Result<String, ScenarioError> {
                let field = format!("{FIELD}.{key}");
                match t.get(key) {
                    Some(toml::Value::String(s)) => {
                        FieldExpr::parse(s).map_err(|e| ScenarioError::new(field.clone(), e))?;
                        Ok(s.clone())
                    }
                    Some(other) => Err(ScenarioError::new(
                        field,
                        format!("expected a string expression, found {}", other.type_str()),
                    )),
                    None => Err(ScenarioError::new(field, "missing component expression")),
                }
            };
            Ok(Velocity::Expression {
                x: comp("x")?,
                y: comp("y")?,
            })
        }
        other => Err(ScenarioError::new(
            FIELD,
            format!(
                "expected a preset string or a component table, found {}",
                other.type_str()
            ),
        )),
    }
}

fn validate(raw: RawScenario) -> Result<Scenario, ScenarioError> {
    let model = match raw.model.as_str() {
        "reduced" => Model::Reduced,
        "grid" => Model::Grid,
        other => {
            return Err(ScenarioError::new(
                "model",
                format!("unknown model `{other}` (expected reduced or grid)"),
            ))
        }
    };
    let seed = match raw.seed {
        None => 0,
        Some(s) if s >= 0 => s as u64,
        Some(s) => return Err(ScenarioError::new("seed", format!("must be non-negative, got {s}"))),
    };

    if raw.outputs.is_empty() {
        return Err(ScenarioError::new("outputs", "at least one output is required"));
    }
    let mut outputs = Vec::new();
    for (i, name) in raw.outputs.iter().enumerate() {
        let kind = OutputKind::parse(name).ok_or_else(|| {
            let known: Vec<&str> = OutputKind::ALL.iter().map(|k| k.name()).collect();
            ScenarioError::new(
                format!("outputs[{i}]"),
                format!("unknown output `{name}` (expected one of {})", known.join(", ")),
            )
        })?;
        if outputs.contains(&kind) {
            return Err(ScenarioError::new(
                format!("outputs[{i}]"),
                format!("`{name}` listed twice"),
            ));
        }
        outputs.push(kind);
    }
    outputs.sort();

    let mut parameters = Parameters::default();
    for (name, value) in &raw.parameters {
        if !PARAMETER_NAMES.contains(&name.as_str()) {
            return Err(ScenarioError::new(
                format!("parameters.{name}"),
                format!("unknown parameter (expected one of {})", PARAMETER_NAMES.join(", ")),
            ));
        }
        *parameters.slot(name) = Some(parse_param(name, value)?);
    }
    for (name, param) in [("eta", &parameters.eta), ("rho", &parameters.rho)] {
        if let Some(p) = param {
            let lowest = p.values().into_iter().fold(f64::INFINITY, f64::min);
            if lowest < 0.0 {
                return Err(ScenarioError::new(
                    format!("parameters.{name}"),
                    format!("must be non-negative, got {lowest}"),
                ));
            }
        }
    }

    let grid = match raw.grid {
        None => None,
        Some(g) => {
            if !(8..=512).contains(&g.n) {
                return Err(ScenarioError::new(
                    "grid.N",
                    format!("must lie in 8..=512, got {}", g.n),
                ));
            }
            let eigenvalues = g.eigenvalues.unwrap_or(4);
            if !(1..=10).contains(&eigenvalues) {
                return Err(ScenarioError::new(
                    "grid.eigenvalues",
                    format!("must lie in 1..=10, got {eigenvalues}"),
                ));
            }
            if let Some(c) = &g.conformal {
                FieldExpr::parse(c).map_err(|e| ScenarioError::new("grid.conformal", e))?;
            }
            Some(GridSpec {
                n: g.n as usize,
                velocity: parse_velocity(g.velocity.as_ref())?,
                conformal: g.conformal,
                eigenvalues: eigenvalues as usize,
            })
        }
    };

    let time = match raw.time {
        None => None,
        Some(t) => {
            if !(t.t_end > 0.0) || !t.t_end.is_finite() {
                return Err(ScenarioError::new(
                    "time.t_end",
                    format!("must be positive, got {}", t.t_end),
                ));
            }
            if !(t.dt > 0.0) || t.dt > t.t_end {
                return Err(ScenarioError::new(
                    "time.dt",
                    format!("must satisfy 0 < dt <= t_end, got {}", t.dt),
                ));
            }
            if t.t_end / t.dt > 1e7 {
                return Err(ScenarioError::new("time.dt", "more than 1e7 samples requested"));
            }
            let stepper = match t.stepper.as_deref() {
                None => None,
                Some("exact") => Some(StepperSpec::Exact),
                Some("rk4") => Some(StepperSpec::Rk4),
                Some(other) => {
                    return Err(ScenarioError::new(
                        "time.stepper",
                        format!("unknown stepper `{other}` (expected exact or rk4)"),
                    ))
                }
            };
            Some(TimeSpec {
                t_end: t.t_end,
                dt: t.dt,
                stepper,
            })
        }
    };

    let scenario = Scenario {
        model,
        seed,
        outputs,
        parameters,
        grid,
        time,
    };
    check_requirements(&scenario)?;
    Ok(scenario)
}

fn require(s: &Scenario, name: &str, kind: OutputKind) -> Result<(), ScenarioError> {
    if s.parameters.get(name).is_none() {
        return Err(ScenarioError::new(
            format!("parameters.{name}"),
            format!("required by output `{}`", kind.name()),
        ));
    }
    Ok(())
}

fn check_requirements(s: &Scenario) -> Result<(), ScenarioError> {
    if s.model == Model::Grid && s.grid.is_none() {
        return Err(ScenarioError::new("grid", "model `grid` needs a [grid] table"));
    }
    if s.model == Model::Grid && s.time.and_then(|t| t.stepper) == Some(StepperSpec::Exact) {
        return Err(ScenarioError::new(
            "time.stepper",
            "the exact exponential exists only for model = reduced; grids use rk4",
        ));
    }
    for &kind in &s.outputs {
        match kind {
            OutputKind::Spectrum | OutputKind::Sweep | OutputKind::Evolve => {
                if s.model == Model::Reduced {
                    require(s, "R", kind)?;
                    require(s, "theta", kind)?;
                }
                require(s, "eta", kind)?;
            }
            OutputKind::Discrepancy => {
                if s.model != Model::Reduced {
                    return Err(ScenarioError::new(
                        "outputs",
                        "`discrepancy` compares reduced spectra and needs model = reduced",
                    ));
                }
                require(s, "R", kind)?;
                require(s, "theta", kind)?;
                require(s, "eta", kind)?;
                if s.parameters.theta.map(|p| p.values().contains(&0.0)).unwrap_or(false) {
                    return Err(ScenarioError::new(
                        "parameters.theta",
                        "`discrepancy` evaluates a closed form that divides by theta; theta = 0 is not allowed",
                    ));
                }
            }
            OutputKind::Classify => {
                require(s, "rho", kind)?;
                require(s, "theta", kind)?;
            }
            OutputKind::RicciFlow => {
                if s.parameters.lambda.is_none() && s.parameters.ricci.is_none() {
                    return Err(ScenarioError::new(
                        "parameters.Lambda",
                        "output `ricci_flow` needs Lambda (or R) as the Einstein constant",
                    ));
                }
            }
        }
        if matches!(kind, OutputKind::Evolve | OutputKind::RicciFlow) && s.time.is_none() {
            return Err(ScenarioError::new(
                "time",
                format!("output `{}` needs a [time] table", kind.name()),
            ));
        }
    }
    let total: usize = s.points().len();
    if total > 1_000_000 {
        return Err(ScenarioError::new(
            "parameters",
            format!("sweep has {total} points, limit is 1000000"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
model = "reduced"
outputs = ["spectrum"]
[parameters]
R = -1.0
theta = 1
eta = { min = 1e-4, max = 1e-1, count = 4, scale = "log" }
"#;

    #[test]
    fn parses_minimal() {
        let s = parse(MINIMAL).unwrap();
        assert_eq!(s.model, Model::Reduced);
        let pts = s.points();
        assert_eq!(pts.len(), 4);
        assert!((pts[0].eta.unwrap() - 1e-4).abs() < 1e-18);
        assert!((pts[3].eta.unwrap() - 1e-1).abs() < 1e-16);
        assert_eq!(pts[2].ricci, Some(-1.0));
    }

    #[test]
    fn digest_is_stable_under_formatting() {
        let a = parse(MINIMAL).unwrap().digest();
        let reformatted = MINIMAL.replace("theta = 1", "theta   =   1.0  # comment");
        assert_eq!(a, parse(&reformatted).unwrap().digest());
        assert_ne!(a, parse(&MINIMAL.replace("R = -1.0", "R = -2.0")).unwrap().digest());
    }

    #[test]
    fn field_specific_errors() {
        let cases = [
            (MINIMAL.replace("min = 1e-4", "min = 1.0"), "parameters.eta.min"),
            (MINIMAL.replace("count = 4", "count = 1"), "parameters.eta.count"),
            (MINIMAL.replace("min = 1e-4", "min = 0.0"), "parameters.eta.min"),
            (MINIMAL.replace("\"spectrum\"", "\"spectra\""), "outputs[0]"),
            (MINIMAL.replace("R = -1.0", ""), "parameters.R"),
            (MINIMAL.replace("model = \"reduced\"", "model = \"grid\""), "grid"),
            (MINIMAL.replace("theta = 1", "theta = \"one\""), "parameters.theta"),
        ];
        for (text, field) in cases {
            let err = parse(&text).unwrap_err();
            assert_eq!(err.field, field, "{err}");
        }
        let err = parse(&format!("bogus = 1\n{MINIMAL}")).unwrap_err();
        assert!(err.message.contains("bogus"), "{err}");
    }

    #[test]
    fn sweep_nesting_order() {
        let s = parse(
            r#"
model = "reduced"
outputs = ["classify"]
[parameters]
rho = { min = 0, max = 1, count = 2 }
theta = { min = 0, max = 2, count = 3 }
"#,
        )
        .unwrap();
        let pts = s.points();
        assert_eq!(pts.len(), 6);
        assert_eq!((pts[1].theta, pts[1].rho), (Some(0.0), Some(1.0)));
        assert_eq!((pts[2].theta, pts[2].rho), (Some(1.0), Some(0.0)));
    }
}
