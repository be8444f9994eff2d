//! The kinematic dynamo operator `Γ_η` in its reduced 2×2 form and as a
//! discretized periodic-grid induction operator.

use crate::error::{DynamoError, Result};
use crate::geometry::{conformal_frame_rotation, Connection, Metric2, Tensor3};
use crate::grid::{Axis, Grid, VectorField};
use crate::linalg::{self, Mat2, Vec2};

/// Magnetic field components `B^i`, either a single frame vector or a grid field.
#[derive(Debug, Clone, PartialEq)]
pub enum MagneticField {
    Reduced(Vec2),
    Grid(VectorField),
}

/// Largest discrete divergence accepted for a field flagged solenoidal.
pub const SOLENOIDAL_TOLERANCE: f64 = 1e-10;

impl MagneticField {
    /// Grid field that must satisfy `div B = 0` to [`SOLENOIDAL_TOLERANCE`].
    pub fn solenoidal(field: VectorField) -> Result<Self> {
        let div = field.max_divergence();
        if div > SOLENOIDAL_TOLERANCE {
            return Err(DynamoError::InvalidInput(format!(
                "field flagged solenoidal has max |div B| = {div:e}"
            )));
        }
        Ok(Self::Grid(field))
    }

    pub fn as_grid(&self) -> Option<&VectorField> {
        match self {
            Self::Grid(f) => Some(f),
            Self::Reduced(_) => None,
        }
    }

    pub fn as_reduced(&self) -> Option<&Vec2> {
        match self {
            Self::Reduced(v) => Some(v),
            Self::Grid(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Reduced(v) => v[0] == 0.0 && v[1] == 0.0,
            Self::Grid(f) => f.max_abs() == 0.0,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        match self {
            Self::Reduced(v) => Self::Reduced([v[0] * s, v[1] * s]),
            Self::Grid(f) => Self::Grid(f.scaled(s)),
        }
    }
}

/// Position-dependent metric and frame data sampled on a grid.
///
/// Uniform geometries keep a single sample that every node shares.
#[derive(Debug, Clone, PartialEq)]
pub struct GridGeometry {
    grid: Grid,
    metric: Vec<Mat2>,
    inv_metric: Vec<Mat2>,
    volume: Vec<f64>,
    rotation: Vec<Tensor3>,
    // ∂_i γ^p_jk, indexed [i][node]
    rotation_grad: [Vec<Tensor3>; 2],
    has_rotation: bool,
}

impl GridGeometry {
    pub fn flat(grid: Grid) -> Self {
        Self::uniform(grid, &Metric2::identity(0.0), &Connection::flat()).expect("identity metric is invertible")
    }

    /// Constant metric and frame connection on every node.
    pub fn uniform(grid: Grid, g: &Metric2, conn: &Connection) -> Result<Self> {
        let inv = g.inverse()?;
        let has_rotation = conn.ricci_rotation.iter().flatten().flatten().any(|c| *c != 0.0);
        Ok(Self {
            grid,
            metric: vec![*g.components()],
            inv_metric: vec![inv],
            volume: vec![g.volume_element()],
            rotation: vec![conn.ricci_rotation],
            rotation_grad: [vec![[[[0.0; 2]; 2]; 2]], vec![[[[0.0; 2]; 2]; 2]]],
            has_rotation,
        })
    }

    /// Conformal metric `e^{2φ} δ` from samples of `φ`, with the rotation
    /// coefficients of its orthonormal frame. Derivatives use the grid stencil.
    pub fn conformal(grid: Grid, phi: &[f64]) -> Result<Self> {
        if phi.len() != grid.len() {
            return Err(DynamoError::GridMismatch {
                expected: grid.len(),
                got: phi.len(),
            });
        }
        let phi_x = grid.d1(phi, Axis::X);
        let phi_y = grid.d1(phi, Axis::Y);
        let rotation: Vec<Tensor3> = phi_x
            .iter()
            .zip(&phi_y)
            .map(|(&dx, &dy)| conformal_frame_rotation(&[dx, dy]))
            .collect();
        let mut rotation_grad = [
            vec![[[[0.0; 2]; 2]; 2]; grid.len()],
            vec![[[[0.0; 2]; 2]; 2]; grid.len()],
        ];
        for p in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let comp: Vec<f64> = rotation.iter().map(|r| r[p][j][k]).collect();
                    for (axis_i, axis) in [Axis::X, Axis::Y].into_iter().enumerate() {
                        for (node, d) in grid.d1(&comp, axis).into_iter().enumerate() {
                            rotation_grad[axis_i][node][p][j][k] = d;
                        }
                    }
                }
            }
        }
        let metric = phi
            .iter()
            .map(|p| {
                let f = (2.0 * p).exp();
                [[f, 0.0], [0.0, f]]
            })
            .collect::<Vec<_>>();
        let inv_metric = phi
            .iter()
            .map(|p| {
                let f = (-2.0 * p).exp();
                [[f, 0.0], [0.0, f]]
            })
            .collect();
        let volume = phi.iter().map(|p| (2.0 * p).exp()).collect();
        Ok(Self {
            grid,
            metric,
            inv_metric,
            volume,
            rotation,
            rotation_grad,
            has_rotation: true,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    fn at(&self, node: usize, len: usize) -> usize {
        if len == 1 {
            0
        } else {
            node
        }
    }

    pub fn metric_at(&self, node: usize) -> &Mat2 {
        &self.metric[self.at(node, self.metric.len())]
    }

    pub fn inverse_metric_at(&self, node: usize) -> &Mat2 {
        &self.inv_metric[self.at(node, self.inv_metric.len())]
    }

    pub fn volume_at(&self, node: usize) -> f64 {
        self.volume[self.at(node, self.volume.len())]
    }

    pub fn rotation_at(&self, node: usize) -> &Tensor3 {
        &self.rotation[self.at(node, self.rotation.len())]
    }
}

/// `{v, B} = −curl(v × B)` with `v × B` normal to the plane.
pub fn poisson_bracket(v: &VectorField, b: &VectorField) -> Result<VectorField> {
    v.same_grid(b)?;
    let grid = v.grid;
    let w: Vec<f64> = (0..grid.len()).map(|i| v.x[i] * b.y[i] - v.y[i] * b.x[i]).collect();
    let wx = grid.d1(&w, Axis::X);
    let wy = grid.d1(&w, Axis::Y);
    // curl(w ẑ) = (∂_y w, −∂_x w)
    Ok(VectorField {
        grid,
        x: wy.into_iter().map(|d| -d).collect(),
        y: wx,
    })
}

/// Frame-expanded Laplacian of `B = B^k e_k`:
/// `g^{ij}∂_i∂_j B^p + B^k[∂_i γ^p_jk g^{ij} + γ^l_jk γ^p_il g^{ij}] + γ^p_jk g^{ij} ∂_i B^k`.
pub fn curved_laplacian(b: &VectorField, geom: &GridGeometry) -> Result<VectorField> {
    let grid = geom.grid;
    if b.grid.n != grid.n {
        return Err(DynamoError::GridMismatch {
            expected: grid.len(),
            got: b.grid.len(),
        });
    }
    let comps = [&b.x, &b.y];
    let second: Vec<[Vec<f64>; 3]> = comps
        .iter()
        .map(|c| [grid.d2(c, Axis::X), grid.dxy(c), grid.d2(c, Axis::Y)])
        .collect();
    let mut out = [vec![0.0; grid.len()], vec![0.0; grid.len()]];
    for (p, dst) in out.iter_mut().enumerate() {
        for (node, cell) in dst.iter_mut().enumerate() {
            let gi = geom.inverse_metric_at(node);
            *cell = gi[0][0] * second[p][0][node]
                + (gi[0][1] + gi[1][0]) * second[p][1][node]
                + gi[1][1] * second[p][2][node];
        }
    }
    if geom.has_rotation {
        let first: Vec<[Vec<f64>; 2]> = comps
            .iter()
            .map(|c| [grid.d1(c, Axis::X), grid.d1(c, Axis::Y)])
            .collect();
        for (p, dst) in out.iter_mut().enumerate() {
            for (node, cell) in dst.iter_mut().enumerate() {
                let gi = geom.inverse_metric_at(node);
                let gam = geom.rotation_at(node);
                let mut acc = 0.0;
                for k in 0..2 {
                    let bk = comps[k][node];
                    for i in 0..2 {
                        let dgam_i = &geom.rotation_grad[i][geom.at(node, geom.rotation_grad[i].len())];
                        for j in 0..2 {
                            let gij = gi[i][j];
                            if gij == 0.0 {
                                continue;
                            }
                            let quad: f64 = (0..2).map(|l| gam[l][j][k] * gam[p][i][l]).sum();
                            acc += bk * (dgam_i[p][j][k] + quad) * gij;
                            acc += gam[p][j][k] * gij * first[k][i][node];
                        }
                    }
                }
                *cell += acc;
            }
        }
    }
    let [x, y] = out;
    Ok(VectorField { grid, x, y })
}

/// Sign of the compressibility term `± (div v) B` in the induction equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompressionSign {
    /// `∂_t B = −{v, B} + (div v) B + η ΔB`.
    #[default]
    Plus,
    /// `∂_t B = −{v, B} − (div v) B + η ΔB`, the frame-transport form.
    Minus,
}

impl CompressionSign {
    fn factor(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }
}

/// Right-hand side of the self-induction equation on the grid.
pub fn induction_rhs(
    v: &VectorField,
    b: &VectorField,
    eta: f64,
    geom: &GridGeometry,
    sign: CompressionSign,
) -> Result<VectorField> {
    if eta < 0.0 {
        return Err(DynamoError::InvalidInput(format!(
            "eta must be non-negative, got {eta}"
        )));
    }
    let div_v = v.divergence();
    induction_rhs_with(v, &div_v, b, eta, geom, sign)
}

fn induction_rhs_with(
    v: &VectorField,
    div_v: &[f64],
    b: &VectorField,
    eta: f64,
    geom: &GridGeometry,
    sign: CompressionSign,
) -> Result<VectorField> {
    let bracket = poisson_bracket(v, b)?;
    let s = sign.factor();
    let mut out = VectorField {
        grid: b.grid,
        x: bracket
            .x
            .iter()
            .zip(&b.x)
            .zip(div_v)
            .map(|((p, bx), d)| -p + s * d * bx)
            .collect(),
        y: bracket
            .y
            .iter()
            .zip(&b.y)
            .zip(div_v)
            .map(|((p, by), d)| -p + s * d * by)
            .collect(),
    };
    if eta != 0.0 {
        let lap = curved_laplacian(b, geom)?;
        out = out.axpy(eta, &lap);
    }
    Ok(out)
}

/// Parameters of the reduced operator on an Einstein 2-manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    pub ricci: f64,
    pub theta: f64,
    pub eta: f64,
}

impl ReducedParams {
    /// Linear coefficient `b = 2(R + θ/2 − η)` of the characteristic quadratic.
    pub fn linear_coefficient(&self) -> f64 {
        2.0 * (self.ricci + 0.5 * self.theta - self.eta)
    }

    /// Constant coefficient `c = R² + θ² + 2(η − θ)R`.
    pub fn constant_coefficient(&self) -> f64 {
        self.ricci * self.ricci + self.theta * self.theta + 2.0 * (self.eta - self.theta) * self.ricci
    }
}

/// Constant-coefficient 2×2 realization of `Γ_η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedOperator {
    pub matrix: Mat2,
    pub params: Option<ReducedParams>,
}

impl ReducedOperator {
    pub fn from_matrix(matrix: Mat2) -> Self {
        Self { matrix, params: None }
    }

    pub fn apply(&self, b: &Vec2) -> Vec2 {
        linalg::mul_vec(&self.matrix, b)
    }
}

/// Matrix-free grid realization of `Γ_η`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOperator {
    pub velocity: VectorField,
    pub geometry: GridGeometry,
    pub eta: f64,
    pub sign: CompressionSign,
    div_v: Vec<f64>,
    velocity_is_zero: bool,
}

impl GridOperator {
    pub fn grid(&self) -> Grid {
        self.geometry.grid
    }

    pub fn dim(&self) -> usize {
        2 * self.geometry.grid.len()
    }

    pub fn apply(&self, b: &VectorField) -> Result<VectorField> {
        if b.grid.n != self.geometry.grid.n {
            return Err(DynamoError::GridMismatch {
                expected: self.geometry.grid.len(),
                got: b.grid.len(),
            });
        }
        if self.velocity_is_zero {
            if self.eta == 0.0 {
                return Ok(VectorField::zeros(b.grid));
            }
            return Ok(curved_laplacian(b, &self.geometry)?.scaled(self.eta));
        }
        induction_rhs_with(&self.velocity, &self.div_v, b, self.eta, &self.geometry, self.sign)
    }

    /// Applies the operator to a packed `(B¹, B²)` vector.
    pub fn apply_flat(&self, x: &[f64]) -> Result<Vec<f64>> {
        let field = VectorField::from_flat(self.geometry.grid, x)?;
        Ok(self.apply(&field)?.to_flat())
    }

    pub fn max_speed(&self) -> f64 {
        self.velocity
            .x
            .iter()
            .zip(&self.velocity.y)
            .fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)))
    }
}

/// The grid variant owns its field arrays through `Vec`s, so it is not worth boxing.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum DynamoOperator {
    Reduced(ReducedOperator),
    Grid(GridOperator),
}

impl DynamoOperator {
    pub fn as_reduced(&self) -> Option<&ReducedOperator> {
        match self {
            Self::Reduced(r) => Some(r),
            Self::Grid(_) => None,
        }
    }

    pub fn as_grid(&self) -> Option<&GridOperator> {
        match self {
            Self::Grid(g) => Some(g),
            Self::Reduced(_) => None,
        }
    }

    pub fn apply(&self, b: &MagneticField) -> Result<MagneticField> {
        match (self, b) {
            (Self::Reduced(op), MagneticField::Reduced(v)) => Ok(MagneticField::Reduced(op.apply(v))),
            (Self::Grid(op), MagneticField::Grid(f)) => Ok(MagneticField::Grid(op.apply(f)?)),
            _ => Err(DynamoError::InvalidInput(
                "operator and field realizations differ (reduced vs grid)".into(),
            )),
        }
    }
}

impl From<ReducedOperator> for DynamoOperator {
    fn from(op: ReducedOperator) -> Self {
        Self::Reduced(op)
    }
}

/// Companion-form matrix `[[0, −c], [1, −b]]` whose characteristic
/// polynomial is `λ² + bλ + c` with the reduced coefficients.
pub fn assemble_reduced(ricci: f64, theta: f64, eta: f64) -> DynamoOperator {
    let params = ReducedParams { ricci, theta, eta };
    let b = params.linear_coefficient();
    let c = params.constant_coefficient();
    DynamoOperator::Reduced(ReducedOperator {
        matrix: [[0.0, -c], [1.0, -b]],
        params: Some(params),
    })
}

/// Grid operator `L` with `L B = induction_rhs(v, B, η, geometry)`.
pub fn assemble_grid(
    v: VectorField,
    geometry: GridGeometry,
    eta: f64,
    sign: CompressionSign,
) -> Result<DynamoOperator> {
    if !(eta >= 0.0) {
        return Err(DynamoError::InvalidInput(format!(
            "eta must be non-negative, got {eta}"
        )));
    }
    if v.grid.n != geometry.grid.n {
        return Err(DynamoError::GridMismatch {
            expected: geometry.grid.len(),
            got: v.grid.len(),
        });
    }
    let div_v = v.divergence();
    let velocity_is_zero = v.max_abs() == 0.0;
    Ok(DynamoOperator::Grid(GridOperator {
        velocity: v,
        geometry,
        eta,
        sign,
        div_v,
        velocity_is_zero,
    }))
}
