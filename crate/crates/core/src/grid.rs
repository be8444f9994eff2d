//! Periodic N×N grids on `[0, 2π)²` and central-difference derivatives.
//!
//! Storage is row-major with `x` fastest: node `(i, j)` sits at
//! `x = i h`, `y = j h`, `h = 2π / N`, index `j * N + i`.

use std::f64::consts::PI;

use crate::error::{DynamoError, Result};

/// Central-difference stencil order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StencilOrder {
    Fourth,
    #[default]
    Sixth,
}

impl StencilOrder {
    // one-sided halves of the antisymmetric first-derivative stencil,
    // offsets 1..=r, scaled by `denominator`
    fn first(self) -> (&'static [f64], f64) {
        match self {
            StencilOrder::Fourth => (&[8.0, -1.0], 12.0),
            StencilOrder::Sixth => (&[45.0, -9.0, 1.0], 60.0),
        }
    }

    // centre weight then offsets 1..=r of the symmetric second-derivative stencil
    fn second(self) -> (f64, &'static [f64], f64) {
        match self {
            StencilOrder::Fourth => (-30.0, &[16.0, -1.0], 12.0),
            StencilOrder::Sixth => (-490.0, &[270.0, -27.0, 2.0], 180.0),
        }
    }

    /// Most negative eigenvalue of the 1D second-derivative stencil times h².
    pub fn second_derivative_bound(self) -> f64 {
        let (c0, side, den) = self.second();
        let alt: f64 = side
            .iter()
            .enumerate()
            .map(|(m, w)| 2.0 * w * if m % 2 == 0 { -1.0 } else { 1.0 })
            .sum();
        (c0 + alt) / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Grid description shared by all fields on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub n: usize,
    pub order: StencilOrder,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(DynamoError::InvalidInput(format!(
                "grid size N = {n} must be at least 8"
            )));
        }
        Ok(Self {
            n,
            order: StencilOrder::default(),
        })
    }

    pub fn with_order(mut self, order: StencilOrder) -> Self {
        self.order = order;
        self
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let h = self.spacing();
        ((idx % self.n) as f64 * h, (idx / self.n) as f64 * h)
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|idx| {
                let (x, y) = self.coords(idx);
                f(x, y)
            })
            .collect()
    }

    fn shift(&self, idx: usize, axis: Axis, offset: isize) -> usize {
        let n = self.n as isize;
        let (i, j) = ((idx % self.n) as isize, (idx / self.n) as isize);
        match axis {
            Axis::X => (j * n + (i + offset).rem_euclid(n)) as usize,
            Axis::Y => ((j + offset).rem_euclid(n) * n + i) as usize,
        }
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(DynamoError::GridMismatch {
                expected: self.len(),
                got: len,
            });
        }
        Ok(())
    }

    /// First derivative along `axis`.
    pub fn d1(&self, f: &[f64], axis: Axis) -> Vec<f64> {
        let (w, den) = self.order.first();
        let scale = 1.0 / (den * self.spacing());
        (0..f.len())
            .map(|idx| {
                let mut acc = 0.0;
                for (m, wm) in w.iter().enumerate() {
                    let o = m as isize + 1;
                    acc += wm * (f[self.shift(idx, axis, o)] - f[self.shift(idx, axis, -o)]);
                }
                acc * scale
            })
            .collect()
    }

    /// Second derivative along `axis`.
    pub fn d2(&self, f: &[f64], axis: Axis) -> Vec<f64> {
        let (c0, w, den) = self.order.second();
        let h = self.spacing();
        let scale = 1.0 / (den * h * h);
        (0..f.len())
            .map(|idx| {
                let mut acc = c0 * f[idx];
                for (m, wm) in w.iter().enumerate() {
                    let o = m as isize + 1;
                    acc += wm * (f[self.shift(idx, axis, o)] + f[self.shift(idx, axis, -o)]);
                }
                acc * scale
            })
            .collect()
    }

    /// Mixed derivative `∂_x ∂_y` as two first-derivative passes.
    pub fn dxy(&self, f: &[f64]) -> Vec<f64> {
        self.d1(&self.d1(f, Axis::X), Axis::Y)
    }
}

/// In-plane vector field `(F¹, F²)` on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: Grid,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl VectorField {
    pub fn new(grid: Grid, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        grid.check(x.len())?;
        grid.check(y.len())?;
        Ok(Self { grid, x, y })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            x: vec![0.0; grid.len()],
            y: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, fx: impl Fn(f64, f64) -> f64, fy: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            grid,
            x: grid.sample(fx),
            y: grid.sample(fy),
        }
    }

    /// Packs `(x, y)` into a single vector of length 2N².
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.x.len());
        out.extend_from_slice(&self.x);
        out.extend_from_slice(&self.y);
        out
    }

    pub fn from_flat(grid: Grid, flat: &[f64]) -> Result<Self> {
        if flat.len() != 2 * grid.len() {
            return Err(DynamoError::GridMismatch {
                expected: 2 * grid.len(),
                got: flat.len(),
            });
        }
        let (x, y) = flat.split_at(grid.len());
        Ok(Self {
            grid,
            x: x.to_vec(),
            y: y.to_vec(),
        })
    }

    pub fn same_grid(&self, other: &VectorField) -> Result<()> {
        if self.grid.n != other.grid.n {
            return Err(DynamoError::GridMismatch {
                expected: self.grid.len(),
                got: other.grid.len(),
            });
        }
        Ok(())
    }

    pub fn divergence(&self) -> Vec<f64> {
        let dx = self.grid.d1(&self.x, Axis::X);
        let dy = self.grid.d1(&self.y, Axis::Y);
        dx.iter().zip(&dy).map(|(a, b)| a + b).collect()
    }

    pub fn max_divergence(&self) -> f64 {
        self.divergence().iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.x.iter().chain(&self.y).fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            x: self.x.iter().map(|v| v * s).collect(),
            y: self.y.iter().map(|v| v * s).collect(),
        }
    }

    /// `self + s · other`.
    pub fn axpy(&self, s: f64, other: &VectorField) -> Self {
        Self {
            grid: self.grid,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a + s * b).collect(),
            y: self.y.iter().zip(&other.y).map(|(a, b)| a + s * b).collect(),
        }
    }
}
