//! Leading (rightmost) eigenvalues of large matrix-free operators.
//!
//! Small operators are densified and handed to a dense eigensolver. Larger
//! ones go through filtered subspace iteration and eigenvalues are read off
//! the Rayleigh quotient `Qᵀ L Q`. Symmetric operators use a Chebyshev filter
//! that damps the interval `[a, b]` holding the unwanted part of the
//! spectrum, where `a` comes from a power-iteration bound and `b` is the
//! lowest current Ritz value. Anything else (advection makes the spectrum
//! complex) is filtered by the propagator `e^{τL}`, built from short Taylor
//! steps, which favours large real part whatever the imaginary part.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DynamoError, Result};
use crate::operator::GridOperator;

pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;
}

impl LinearOperator for GridOperator {
    fn dim(&self) -> usize {
        GridOperator::dim(self)
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.apply_flat(x)
    }
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok((self * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Chebyshev polynomial degree applied per outer iteration.
    pub filter_degree: usize,
    /// Operators up to this dimension are solved densely.
    pub dense_limit: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            tolerance: 1e-8,
            seed: 0x5eed,
            filter_degree: 20,
            dense_limit: 1024,
        }
    }
}

/// Sorts by descending real part, then descending imaginary part.
pub fn sort_rightmost(values: &mut [Complex64]) {
    values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

pub fn dense_matrix(op: &dyn LinearOperator) -> Result<DMatrix<f64>> {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = op.apply(&e)?;
        m.column_mut(j).copy_from_slice(&col);
        e[j] = 0.0;
    }
    Ok(m)
}

/// Eigenvalues of a dense real matrix, rightmost first.
///
/// Runs sequentially so results are bitwise reproducible.
fn dense_eigenvalues(m: DMatrix<f64>) -> Result<Vec<Complex64>> {
    use faer::diag::Diag;
    use faer::dyn_stack::{MemBuffer, MemStack};
    use faer::linalg::evd::{evd_real, evd_scratch, ComputeEigenvectors};
    use faer::{Mat, Par};

    let n = m.nrows();
    let a = Mat::from_fn(n, n, |i, j| m[(i, j)]);
    let mut re = Diag::<f64>::zeros(n);
    let mut im = Diag::<f64>::zeros(n);
    let scratch = evd_scratch::<f64>(
        n,
        ComputeEigenvectors::No,
        ComputeEigenvectors::No,
        Par::Seq,
        Default::default(),
    );
    evd_real(
        a.as_ref(),
        re.as_mut(),
        im.as_mut(),
        None,
        None,
        Par::Seq,
        MemStack::new(&mut MemBuffer::new(scratch)),
        Default::default(),
    )
    .map_err(|_| DynamoError::NoConvergence {
        iterations: 0,
        residual: f64::NAN,
    })?;
    let mut vals: Vec<Complex64> = re
        .column_vector()
        .iter()
        .zip(im.column_vector().iter())
        .map(|(r, i)| Complex64::new(*r, *i))
        .collect();
    sort_rightmost(&mut vals);
    Ok(vals)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Orthonormalizes the columns in place (two passes of modified
/// Gram–Schmidt), refilling collapsed columns with fresh random vectors.
fn orthonormalize(cols: &mut [Vec<f64>], rng: &mut ChaCha8Rng) {
    for j in 0..cols.len() {
        for attempt in 0..4 {
            let before = norm(&cols[j]);
            for _ in 0..2 {
                for i in 0..j {
                    let (head, tail) = cols.split_at_mut(j);
                    let proj = dot(&head[i], &tail[0]);
                    for (t, h) in tail[0].iter_mut().zip(&head[i]) {
                        *t -= proj * h;
                    }
                }
            }
            let after = norm(&cols[j]);
            if after > 1e-10 * before.max(f64::MIN_POSITIVE) && after > 0.0 {
                cols[j].iter_mut().for_each(|v| *v /= after);
                break;
            }
            let n = cols[j].len();
            cols[j] = random_vector(rng, n);
            debug_assert!(attempt < 3, "could not complete an orthonormal basis");
        }
    }
}

fn spectral_radius_bound(op: &dyn LinearOperator, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut x = random_vector(rng, op.dim());
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut bound: f64 = 0.0;
    for _ in 0..60 {
        let y = op.apply(&x)?;
        let ny = norm(&y);
        bound = bound.max(ny);
        if ny == 0.0 {
            break;
        }
        x = y.into_iter().map(|v| v / ny).collect();
    }
    Ok(bound)
}

/// Leading `k` eigenvalues of `op`, ordered by descending real part.
pub fn leading_eigenvalues(op: &dyn LinearOperator, k: usize, opts: &EigenOptions) -> Result<Vec<Complex64>> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(DynamoError::InvalidInput(format!(
            "requested {k} eigenvalues of a {n}-dimensional operator"
        )));
    }
    if n <= opts.dense_limit {
        let mut vals = dense_eigenvalues(dense_matrix(op)?)?;
        vals.truncate(k);
        return Ok(vals);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let radius = spectral_radius_bound(op, &mut rng)?;
    if radius == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); k]);
    }
    let lower = -1.2 * radius;
    let symmetric = looks_symmetric(op, radius, &mut rng)?;
    let block = (2 * k + 8).min(n);
    let mut q: Vec<Vec<f64>> = (0..block).map(|_| random_vector(&mut rng, n)).collect();
    orthonormalize(&mut q, &mut rng);

    let mut previous: Option<Vec<Complex64>> = None;
    let mut last_change = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        let lq: Vec<Vec<f64>> = q.iter().map(|c| op.apply(c)).collect::<Result<_>>()?;
        let h = DMatrix::from_fn(block, block, |i, j| dot(&q[i], &lq[j]));
        let ritz = dense_eigenvalues(h)?;
        let leading: Vec<Complex64> = ritz[..k].to_vec();
        if let Some(prev) = &previous {
            last_change = leading
                .iter()
                .zip(prev)
                .map(|(a, b)| (a - b).norm() / a.norm().max(1.0))
                .fold(0.0, f64::max);
            if last_change <= opts.tolerance {
                return Ok(leading);
            }
        }
        previous = Some(leading);

        if symmetric {
            let mut upper = ritz.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
            if upper <= lower {
                upper = 0.5 * lower;
            }
            let centre = 0.5 * (upper + lower);
            let half_width = 0.5 * (upper - lower);
            q = chebyshev_filter(op, q, lq, centre, half_width, opts.filter_degree)?;
        } else {
            q = propagator_filter(op, q, 1.0 / radius, opts.filter_degree)?;
        }
        orthonormalize(&mut q, &mut rng);
    }
    Err(DynamoError::NoConvergence {
        iterations: opts.max_iterations,
        residual: last_change,
    })
}

/// Probes `⟨y, Lx⟩ = ⟨Ly, x⟩` on random pairs.
fn looks_symmetric(op: &dyn LinearOperator, radius: f64, rng: &mut ChaCha8Rng) -> Result<bool> {
    let n = op.dim();
    for _ in 0..3 {
        let x = random_vector(rng, n);
        let y = random_vector(rng, n);
        let a = dot(&y, &op.apply(&x)?);
        let b = dot(&op.apply(&y)?, &x);
        if (a - b).abs() > 1e-10 * radius * norm(&x) * norm(&y) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Degree of the Taylor polynomial standing in for `e^{hL}` with `|hλ| ≲ 1`.
const TAYLOR_DEGREE: usize = 8;

/// Applies `(T₈(hL))^steps` to every column, `T₈` the truncated exponential series.
fn propagator_filter(op: &dyn LinearOperator, x: Vec<Vec<f64>>, h: f64, steps: usize) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(x.len());
    for mut col in x {
        for _ in 0..steps {
            let mut term = col.clone();
            let mut sum = col.clone();
            for j in 1..=TAYLOR_DEGREE {
                let scale = h / j as f64;
                term = op.apply(&term)?.into_iter().map(|v| v * scale).collect();
                sum.iter_mut().zip(&term).for_each(|(s, t)| *s += t);
            }
            let size = norm(&sum);
            if size > 0.0 {
                sum.iter_mut().for_each(|v| *v /= size);
            }
            col = sum;
        }
        out.push(col);
    }
    Ok(out)
}

fn chebyshev_filter(
    op: &dyn LinearOperator,
    x: Vec<Vec<f64>>,
    lx: Vec<Vec<f64>>,
    centre: f64,
    half_width: f64,
    degree: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(x.len());
    for (prev0, l0) in x.into_iter().zip(lx) {
        let mut prev = prev0;
        let mut cur: Vec<f64> = l0
            .iter()
            .zip(&prev)
            .map(|(l, p)| (l - centre * p) / half_width)
            .collect();
        for _ in 1..degree {
            let lc = op.apply(&cur)?;
            let next: Vec<f64> = lc
                .iter()
                .zip(&cur)
                .zip(&prev)
                .map(|((l, c), p)| 2.0 * (l - centre * c) / half_width - p)
                .collect();
            prev = cur;
            cur = next;
            let size = norm(&cur);
            if size > 1e100 {
                let s = 1.0 / size;
                cur.iter_mut().for_each(|v| *v *= s);
                prev.iter_mut().for_each(|v| *v *= s);
            }
        }
        out.push(cur);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_path_on_small_matrix() {
        let m = DMatrix::from_row_slice(3, 3, &[-1.0, 0.0, 0.0, 0.0, 2.0, 1.0, 0.0, -1.0, 2.0]);
        let vals = leading_eigenvalues(&m, 3, &EigenOptions::default()).unwrap();
        assert!((vals[0] - Complex64::new(2.0, 1.0)).norm() < 1e-12);
        assert!((vals[1] - Complex64::new(2.0, -1.0)).norm() < 1e-12);
        assert!((vals[2] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn propagator_path_on_non_normal_matrix() {
        // 2×2 rotation blocks with decaying real parts plus a nilpotent coupling
        let n = 300;
        let mut m = DMatrix::zeros(n, n);
        let mut want = Vec::new();
        for b in 0..n / 2 {
            let (re, im) = (-0.1 * b as f64, 3.0 + (b % 7) as f64);
            let i = 2 * b;
            m[(i, i)] = re;
            m[(i + 1, i + 1)] = re;
            m[(i, i + 1)] = im;
            m[(i + 1, i)] = -im;
            if i + 2 < n {
                m[(i, i + 2)] = 0.5;
            }
            want.push(Complex64::new(re, im));
        }
        let vals = leading_eigenvalues(
            &m,
            4,
            &EigenOptions {
                dense_limit: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((vals[0] - want[0]).norm() < 1e-6, "{vals:?}");
        assert!((vals[1] - want[0].conj()).norm() < 1e-6, "{vals:?}");
        assert!((vals[2] - want[1]).norm() < 1e-6, "{vals:?}");
    }

    #[test]
    fn filtered_path_on_diagonal_matrix() {
        let n = 400;
        let diag: Vec<f64> = (0..n).map(|i| -(i as f64) * 0.5 - 0.25 * (i % 3) as f64).collect();
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag.clone()));
        let mut want = diag;
        want.sort_by(|a, b| b.total_cmp(a));
        let vals = leading_eigenvalues(
            &m,
            5,
            &EigenOptions {
                dense_limit: 0,
                ..Default::default()
            },
        )
        .unwrap();
        for (v, w) in vals.iter().zip(&want) {
            assert!((v.re - w).abs() < 1e-7, "{v} vs {w}");
        }
    }

    #[test]
    fn rejects_bad_k() {
        let m = DMatrix::<f64>::identity(4, 4);
        assert!(leading_eigenvalues(&m, 0, &EigenOptions::default()).is_err());
        assert!(leading_eigenvalues(&m, 5, &EigenOptions::default()).is_err());
    }
}
