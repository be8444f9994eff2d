//! Small dense helpers for the 2×2 problems that dominate the reduced model.

use num_complex::Complex64;

pub type Mat2 = [[f64; 2]; 2];
pub type Vec2 = [f64; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
pub const ZERO: Mat2 = [[0.0, 0.0], [0.0, 0.0]];

pub fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn trace(m: &Mat2) -> f64 {
    m[0][0] + m[1][1]
}

pub fn scale(m: &Mat2, s: f64) -> Mat2 {
    [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
}

pub fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

pub fn sub(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = ZERO;
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mul_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn transpose(m: &Mat2) -> Mat2 {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

/// Inverse, or `None` when the determinant vanishes relative to the entries.
pub fn inverse(m: &Mat2) -> Option<Mat2> {
    let d = det(m);
    let size = m.iter().flatten().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if d == 0.0 || !d.is_finite() || d.abs() <= f64::EPSILON * size * size {
        return None;
    }
    Some([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
}

/// Quadratic form `uᵀ m v`.
pub fn bilinear(u: &Vec2, m: &Mat2, v: &Vec2) -> f64 {
    let mv = mul_vec(m, v);
    u[0] * mv[0] + u[1] * mv[1]
}

/// Eigenvalues of a general real 2×2 matrix, computed from its entries.
///
/// Uses `λ = (a+d)/2 ± sqrt(((a−d)/2)² + bc)`; in the real case the smaller
/// root is recovered from the determinant to avoid cancellation.
pub fn eigenvalues(m: &Mat2) -> [Complex64; 2] {
    let half_trace = 0.5 * (m[0][0] + m[1][1]);
    let p = 0.5 * (m[0][0] - m[1][1]);
    let q = p * p + m[0][1] * m[1][0];
    if q >= 0.0 {
        let root = q.sqrt();
        let big = if half_trace >= 0.0 {
            half_trace + root
        } else {
            half_trace - root
        };
        let small = if big != 0.0 { det(m) / big } else { 0.0 };
        let (hi, lo) = if big >= small { (big, small) } else { (small, big) };
        [Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)]
    } else {
        let im = (-q).sqrt();
        [Complex64::new(half_trace, im), Complex64::new(half_trace, -im)]
    }
}

/// Symmetric 2×2 eigen-decomposition by a single Jacobi rotation.
///
/// Returns eigenvalues ascending and the matching unit eigenvectors.
pub fn symmetric_eigen(s: &Mat2) -> ([f64; 2], [Vec2; 2]) {
    let (a, b, d) = (s[0][0], 0.5 * (s[0][1] + s[1][0]), s[1][1]);
    if b == 0.0 {
        return if a <= d {
            ([a, d], [[1.0, 0.0], [0.0, 1.0]])
        } else {
            ([d, a], [[0.0, 1.0], [1.0, 0.0]])
        };
    }
    let angle = 0.5 * (2.0 * b).atan2(a - d);
    let (sn, cs) = angle.sin_cos();
    let l1 = a * cs * cs + 2.0 * b * cs * sn + d * sn * sn;
    let l2 = a * sn * sn - 2.0 * b * cs * sn + d * cs * cs;
    let v1 = [cs, sn];
    let v2 = [-sn, cs];
    if l1 <= l2 {
        ([l1, l2], [v1, v2])
    } else {
        ([l2, l1], [v2, v1])
    }
}

/// Largest singular value of a 2×2 matrix.
pub fn spectral_norm(m: &Mat2) -> f64 {
    let frob2: f64 = m.iter().flatten().map(|x| x * x).sum();
    let d = det(m).abs();
    let sum = (frob2 + 2.0 * d).max(0.0).sqrt();
    let diff = (frob2 - 2.0 * d).max(0.0).sqrt();
    0.5 * (sum + diff)
}

/// `exp(t·A)` written as `exp(log_scale) · factor` so that large growth or
/// decay does not overflow the entries of `factor`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledExp {
    pub log_scale: f64,
    pub factor: Mat2,
}

impl ScaledExp {
    pub fn matrix(&self) -> Mat2 {
        scale(&self.factor, self.log_scale.exp())
    }

    pub fn log_norm(&self) -> f64 {
        self.log_scale + spectral_norm(&self.factor).ln()
    }
}

/// Closed-form 2×2 matrix exponential.
///
/// With `A = μI + N`, `N` traceless and `N² = qI`, the exponential is
/// `e^{μt} [C(qt²) I + t S(qt²) N]` where `C`, `S` are the cosh / sinh-over-
/// argument functions continued to `q < 0`.
pub fn expm_scaled(a: &Mat2, t: f64) -> ScaledExp {
    let mu = 0.5 * trace(a);
    let n = [[a[0][0] - mu, a[0][1]], [a[1][0], a[1][1] - mu]];
    let q = n[0][0] * n[0][0] + n[0][1] * n[1][0];
    let z = q * t * t;
    let (log_extra, c, s_over) = if z.abs() < 1e-6 {
        (0.0, 1.0 + z / 2.0 + z * z / 24.0, t * (1.0 + z / 6.0 + z * z / 120.0))
    } else if z < 0.0 {
        let w = q.abs().sqrt();
        ((0.0), (w * t).cos(), (w * t).sin() / w)
    } else {
        let s = q.sqrt();
        let x = s * t.abs();
        if x < 20.0 {
            (0.0, (s * t).cosh(), (s * t).sinh() / s)
        } else {
            // cosh(x) = e^x (1 + e^{-2x}) / 2, same for sinh with a sign
            let tail = (-2.0 * x).exp();
            let sgn = t.signum();
            (x, 0.5 * (1.0 + tail), sgn * 0.5 * (1.0 - tail) / s)
        }
    };
    let factor = [
        [c + s_over * n[0][0], s_over * n[0][1]],
        [s_over * n[1][0], c + s_over * n[1][1]],
    ];
    ScaledExp {
        log_scale: mu * t + log_extra,
        factor,
    }
}

pub fn expm(a: &Mat2, t: f64) -> Mat2 {
    expm_scaled(a, t).matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn taylor_expm(a: &Mat2, t: f64) -> Mat2 {
        // scaling and squaring on a plain Taylor series, test-only oracle
        let squarings = 10;
        let h = t / f64::from(1 << squarings);
        let step = scale(a, h);
        let mut term = IDENTITY;
        let mut sum = IDENTITY;
        for k in 1..30 {
            term = scale(&mul(&term, &step), 1.0 / k as f64);
            sum = add(&sum, &term);
        }
        for _ in 0..squarings {
            sum = mul(&sum, &sum);
        }
        sum
    }

    #[test]
    fn expm_matches_taylor_in_all_branches() {
        let cases: [Mat2; 5] = [
            [[0.0, -1.0], [1.0, -2.0]], // defective, q = 0
            [[0.3, 2.0], [-1.5, -0.4]], // complex pair
            [[1.0, 3.0], [0.5, -2.0]],  // real distinct
            [[0.0, 0.0], [0.0, 0.0]],
            [[-2.0, 0.1], [0.0, -2.0]],
        ];
        for a in &cases {
            for &t in &[0.0, 0.1, 1.0, 2.5] {
                let got = expm(a, t);
                let want = taylor_expm(a, t);
                for i in 0..2 {
                    for j in 0..2 {
                        assert_relative_eq!(got[i][j], want[i][j], epsilon = 1e-10, max_relative = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn scaled_exp_survives_large_arguments() {
        let a = [[30.0, 0.0], [0.0, -30.0]];
        let e = expm_scaled(&a, 50.0);
        assert!(e.factor.iter().flatten().all(|x| x.is_finite()));
        assert_relative_eq!(e.log_norm(), 1500.0, max_relative = 1e-12);
    }

    #[test]
    fn eigenvalues_of_companion_double_root_are_exact() {
        let m = [[0.0, -1.0], [1.0, -2.0]];
        let ev = eigenvalues(&m);
        assert_eq!(ev[0], Complex64::new(-1.0, 0.0));
        assert_eq!(ev[1], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn spectral_norm_of_rotation_is_one() {
        let (s, c) = 0.7_f64.sin_cos();
        assert_relative_eq!(spectral_norm(&[[c, -s], [s, c]]), 1.0, epsilon = 1e-15);
        assert_relative_eq!(spectral_norm(&[[3.0, 0.0], [0.0, -5.0]]), 5.0, epsilon = 1e-15);
    }

    #[test]
    fn symmetric_eigen_residual() {
        let s = [[2.0, 0.7], [0.7, -1.0]];
        let (vals, vecs) = symmetric_eigen(&s);
        for (l, v) in vals.iter().zip(vecs.iter()) {
            let sv = mul_vec(&s, v);
            assert!((sv[0] - l * v[0]).abs() < 1e-14);
            assert!((sv[1] - l * v[1]).abs() < 1e-14);
        }
        assert!(vals[0] <= vals[1]);
    }
}
