//! Eigenvalues of the dynamo operator by several independent routes, the
//! fast-dynamo limit test, and pairwise discrepancy reports between routes.

use std::fmt;

use num_complex::Complex64;

use crate::eigen::{self, EigenOptions};
use crate::error::{DynamoError, Result};
use crate::linalg;
use crate::operator::{DynamoOperator, ReducedParams};

/// Which formula or solver produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpectrumSource {
    /// Roots of `λ² + 2(R + θ/2 − η)λ + R² + θ² + 2(η − θ)R = 0`.
    CharacteristicQuadratic,
    /// The printed closed form in `(R, θ, η)`.
    ClosedForm,
    /// The printed closed form at `η = 0`.
    DiffusionFree,
    /// The printed cosmological form in `(R, ρ, η)`.
    Cosmological,
    /// Geodesic-flow eigenvalue in the surface curvature κ.
    ChiconeLatushkin,
    NumericalGrid,
    NumericalReduced,
}

impl SpectrumSource {
    pub const ALL: [SpectrumSource; 7] = [
        Self::CharacteristicQuadratic,
        Self::ClosedForm,
        Self::DiffusionFree,
        Self::Cosmological,
        Self::ChiconeLatushkin,
        Self::NumericalGrid,
        Self::NumericalReduced,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::CharacteristicQuadratic => "characteristic_quadratic",
            Self::ClosedForm => "closed_form",
            Self::DiffusionFree => "diffusion_free",
            Self::Cosmological => "cosmological",
            Self::ChiconeLatushkin => "chicone_latushkin",
            Self::NumericalGrid => "numerical_grid",
            Self::NumericalReduced => "numerical_reduced",
        }
    }

    /// Small integer used in plot files.
    pub fn code(self) -> u8 {
        Self::ALL.iter().position(|s| *s == self).unwrap_or(0) as u8
    }
}

impl fmt::Display for SpectrumSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    pub multiplicity: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub roots: Vec<EigenPair>,
    pub source: SpectrumSource,
    /// `|λ² + bλ + c|` per root, when reduced parameters are known.
    pub residuals: Vec<f64>,
    pub max_real_part: f64,
}

impl SpectrumResult {
    fn build(source: SpectrumSource, values: &[Complex64], params: Option<ReducedParams>, merge: bool) -> Self {
        let mut roots: Vec<EigenPair> = Vec::with_capacity(values.len());
        for &value in values {
            match roots.iter_mut().find(|p| merge && p.value == value) {
                Some(p) => p.multiplicity += 1,
                None => roots.push(EigenPair { value, multiplicity: 1 }),
            }
        }
        let residuals = params
            .map(|p| roots.iter().map(|r| quadratic_residual(&p, r.value)).collect())
            .unwrap_or_default();
        let max_real_part = values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
        Self {
            roots,
            source,
            residuals,
            max_real_part,
        }
    }

    /// Root values with multiplicities expanded.
    pub fn values(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|p| std::iter::repeat_n(p.value, p.multiplicity as usize))
            .collect()
    }
}

/// `|λ² + bλ + c|` for the reduced coefficients.
pub fn quadratic_residual(p: &ReducedParams, lambda: Complex64) -> f64 {
    (lambda * lambda + lambda * p.linear_coefficient() + p.constant_coefficient()).norm()
}

/// Both roots of the characteristic quadratic, evaluated without cancellation.
pub fn quadratic_roots(ricci: f64, theta: f64, eta: f64) -> SpectrumResult {
    let params = ReducedParams { ricci, theta, eta };
    let b = params.linear_coefficient();
    let c = params.constant_coefficient();
    let disc = b * b - 4.0 * c;
    let values = if disc > 0.0 {
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let (r1, r2) = if q != 0.0 { (q, c / q) } else { (0.0, 0.0) };
        let (hi, lo) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
        [Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)]
    } else if disc == 0.0 {
        [Complex64::new(-0.5 * b, 0.0); 2]
    } else {
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(-0.5 * b, im), Complex64::new(-0.5 * b, -im)]
    };
    SpectrumResult::build(SpectrumSource::CharacteristicQuadratic, &values, Some(params), true)
}

fn plus_minus(centre: Complex64, offset: Complex64) -> [Complex64; 2] {
    [centre + offset, centre - offset]
}

fn closed_form_values(ricci: f64, theta: f64, eta: f64) -> Result<[Complex64; 2]> {
    if theta == 0.0 {
        return Err(DynamoError::DivisionByZero("theta"));
    }
    let ratio = ricci / theta;
    let radicand =
        -0.75 * theta * theta + eta * theta * (1.0 - ratio) - 0.75 * theta * theta * (1.0 + ratio) - eta * eta;
    let centre = Complex64::new(-(ricci + 0.5 * theta - eta), 0.0);
    Ok(plus_minus(centre, Complex64::new(radicand, 0.0).sqrt()))
}

/// Literal closed form
/// `λ = −(R + θ/2 − η) ± sqrt(−¾θ² + ηθ(1 − R/θ) − ¾θ²(1 + R/θ) − η²)`.
pub fn closed_form_eigenvalues(ricci: f64, theta: f64, eta: f64) -> Result<SpectrumResult> {
    let values = closed_form_values(ricci, theta, eta)?;
    let params = ReducedParams { ricci, theta, eta };
    Ok(SpectrumResult::build(
        SpectrumSource::ClosedForm,
        &values,
        Some(params),
        true,
    ))
}

/// Closed form at vanishing diffusion; shares the evaluation path above.
pub fn diffusion_free_eigenvalues(ricci: f64, theta: f64) -> Result<SpectrumResult> {
    let values = closed_form_values(ricci, theta, 0.0)?;
    let params = ReducedParams { ricci, theta, eta: 0.0 };
    Ok(SpectrumResult::build(
        SpectrumSource::DiffusionFree,
        &values,
        Some(params),
        true,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CosmologicalSpectrum {
    pub spectrum: SpectrumResult,
    /// `½(−3R + ρ)`, the real part stated for the cosmological roots.
    pub stated_real_part: f64,
}

/// `λ = ½[(−3R + ρ + 2η) ± i sqrt(7ρ² + 4ρ²(1 − 2R/ρ) + 4η²)]`, with the
/// square root taken on the complex principal branch.
pub fn cosmological_eigenvalues(ricci: f64, rho: f64, eta: f64) -> Result<CosmologicalSpectrum> {
    if rho == 0.0 {
        return Err(DynamoError::DivisionByZero("rho"));
    }
    let radicand = 7.0 * rho * rho + 4.0 * rho * rho * (1.0 - 2.0 * ricci / rho) + 4.0 * eta * eta;
    let root = Complex64::i() * Complex64::new(radicand, 0.0).sqrt();
    let centre = Complex64::new(-3.0 * ricci + rho + 2.0 * eta, 0.0);
    let values = plus_minus(centre, root).map(|z| 0.5 * z);
    Ok(CosmologicalSpectrum {
        spectrum: SpectrumResult::build(SpectrumSource::Cosmological, &values, None, true),
        stated_real_part: stated_real_part(ricci, rho),
    })
}

/// `½(−3R + ρ)`.
pub fn stated_real_part(ricci: f64, rho: f64) -> f64 {
    0.5 * (-3.0 * ricci + rho)
}

/// `λ_η = ½[−η(1 + κ²) + sqrt(−4κ + η(1 − κ²))]`; only the `+` branch exists.
pub fn chicone_latushkin(kappa: f64, eta: f64) -> SpectrumResult {
    let radicand = -4.0 * kappa + eta * (1.0 - kappa * kappa);
    let value = 0.5 * (Complex64::new(-eta * (1.0 + kappa * kappa), 0.0) + Complex64::new(radicand, 0.0).sqrt());
    SpectrumResult::build(SpectrumSource::ChiconeLatushkin, &[value], None, true)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastDynamoVerdict {
    pub fast: bool,
    /// Three-point extrapolation of the leading real part to η = 0.
    pub limit: f64,
    /// Two-point extrapolants from the first and last pair of the window.
    pub extrapolants: [f64; 2],
}

/// Threshold the extrapolated growth rate must exceed.
pub const FAST_DYNAMO_THRESHOLD: f64 = 1e-9;

/// Extrapolates the leading real part to vanishing diffusion over the last
/// three entries of a strictly decreasing η sequence.
pub fn fast_dynamo_test(
    spectrum_fn: impl Fn(f64) -> Result<SpectrumResult>,
    eta_sequence: &[f64],
) -> Result<FastDynamoVerdict> {
    if eta_sequence.len() < 3 {
        return Err(DynamoError::InsufficientSamples {
            needed: 3,
            got: eta_sequence.len(),
        });
    }
    if eta_sequence.iter().any(|e| !(*e > 0.0)) || eta_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(DynamoError::InvalidInput(
            "eta sequence must be positive and strictly decreasing".into(),
        ));
    }
    let tail = &eta_sequence[eta_sequence.len() - 3..];
    let ys = tail
        .iter()
        .map(|&eta| spectrum_fn(eta).map(|s| s.max_real_part))
        .collect::<Result<Vec<_>>>()?;
    let linear = |i: usize| ys[i + 1] - tail[i + 1] * (ys[i] - ys[i + 1]) / (tail[i] - tail[i + 1]);
    let (first, second) = (linear(0), linear(1));
    if (second - first).abs() > 0.1 * first.abs().max(second.abs()) + 1e-12 {
        return Err(DynamoError::NonConvergent { first, second });
    }
    let limit: f64 = (0..3)
        .map(|i| {
            let weight: f64 = (0..3)
                .filter(|&j| j != i)
                .map(|j| -tail[j] / (tail[i] - tail[j]))
                .product();
            ys[i] * weight
        })
        .sum();
    Ok(FastDynamoVerdict {
        fast: limit > FAST_DYNAMO_THRESHOLD,
        limit,
        extrapolants: [first, second],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discriminant {
    pub value: f64,
    pub degenerate: bool,
}

/// `Δ = 11ρ − 8R`, flagged degenerate within a relative 1e−12.
pub fn degeneracy_discriminant(rho: f64, ricci: f64) -> Discriminant {
    let value = 11.0 * rho - 8.0 * ricci;
    let scale = (11.0 * rho).abs().max((8.0 * ricci).abs()).max(1.0);
    Discriminant {
        value,
        degenerate: value.abs() <= 1e-12 * scale,
    }
}

/// Eigenvalues of an assembled operator: exact for the reduced matrix,
/// filtered subspace iteration for grids (at most 10 requested).
pub fn numerical_spectrum(op: &DynamoOperator, k: usize, opts: &EigenOptions) -> Result<SpectrumResult> {
    if k == 0 {
        return Err(DynamoError::InvalidInput("k must be at least 1".into()));
    }
    match op {
        DynamoOperator::Reduced(r) => {
            let mut values = linalg::eigenvalues(&r.matrix).to_vec();
            eigen::sort_rightmost(&mut values);
            values.truncate(k.min(2));
            Ok(SpectrumResult::build(
                SpectrumSource::NumericalReduced,
                &values,
                r.params,
                true,
            ))
        }
        DynamoOperator::Grid(g) => {
            if k > 10 {
                return Err(DynamoError::InvalidInput(format!(
                    "at most 10 grid eigenvalues may be requested, got {k}"
                )));
            }
            let values = eigen::leading_eigenvalues(g, k, opts)?;
            Ok(SpectrumResult::build(
                SpectrumSource::NumericalGrid,
                &values,
                None,
                false,
            ))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    pub a: SpectrumSource,
    pub b: SpectrumSource,
    /// `a_i − b_π(i)` under the minimal-distance pairing π.
    pub differences: Vec<Complex64>,
    pub agrees: bool,
}

impl Discrepancy {
    pub fn max_difference(&self) -> f64 {
        self.differences.iter().map(|d| d.norm()).fold(0.0, f64::max)
    }

    fn reversed(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            differences: self.differences.iter().map(|d| -d).collect(),
            agrees: self.agrees,
        }
    }
}

/// Default agreement tolerance, relative to `max(1, |λ|)`.
pub const AGREEMENT_TOLERANCE: f64 = 1e-10;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for perm in permutations(n - 1) {
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

fn compare_ordered(x: &SpectrumResult, y: &SpectrumResult, tolerance: f64) -> Result<Discrepancy> {
    let (xv, yv) = (x.values(), y.values());
    if xv.len() != yv.len() || xv.len() > 6 {
        return Err(DynamoError::InvalidInput(format!(
            "cannot pair {} roots from {} with {} roots from {}",
            xv.len(),
            x.source,
            yv.len(),
            y.source
        )));
    }
    let cost = |p: &[usize]| -> f64 { p.iter().enumerate().map(|(i, &j)| (xv[i] - yv[j]).norm()).sum() };
    let mut best: Vec<usize> = (0..xv.len()).collect();
    let mut best_cost = cost(&best);
    for p in permutations(xv.len()) {
        let c = cost(&p);
        if c < best_cost {
            best_cost = c;
            best = p;
        }
    }
    let differences: Vec<Complex64> = best.iter().enumerate().map(|(i, &j)| xv[i] - yv[j]).collect();
    let agrees = differences
        .iter()
        .zip(&xv)
        .all(|(d, v)| d.norm() <= tolerance * v.norm().max(1.0));
    Ok(Discrepancy {
        a: x.source,
        b: y.source,
        differences,
        agrees,
    })
}

/// Pairwise comparison; `compare(x, y)` is the exact negation of `compare(y, x)`.
pub fn compare(x: &SpectrumResult, y: &SpectrumResult, tolerance: f64) -> Result<Discrepancy> {
    if x.source <= y.source {
        compare_ordered(x, y, tolerance)
    } else {
        Ok(compare_ordered(y, x, tolerance)?.reversed())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    pub params: ReducedParams,
    pub tolerance: f64,
    pub spectra: Vec<SpectrumResult>,
    pub entries: Vec<Discrepancy>,
}

impl DiscrepancyReport {
    pub fn between(&self, a: SpectrumSource, b: SpectrumSource) -> Option<Discrepancy> {
        self.entries.iter().find_map(|e| {
            if e.a == a && e.b == b {
                Some(e.clone())
            } else if e.a == b && e.b == a {
                Some(e.reversed())
            } else {
                None
            }
        })
    }
}

/// Quadratic, closed-form and numerical reduced spectra at the same point,
/// compared pairwise.
pub fn discrepancy_report(ricci: f64, theta: f64, eta: f64) -> Result<DiscrepancyReport> {
    let quad = quadratic_roots(ricci, theta, eta);
    let closed = closed_form_eigenvalues(ricci, theta, eta)?;
    let numeric = numerical_spectrum(
        &crate::operator::assemble_reduced(ricci, theta, eta),
        2,
        &EigenOptions::default(),
    )?;
    let spectra = vec![quad, closed, numeric];
    let mut entries = Vec::new();
    for i in 0..spectra.len() {
        for j in i + 1..spectra.len() {
            entries.push(compare(&spectra[i], &spectra[j], AGREEMENT_TOLERANCE)?);
        }
    }
    Ok(DiscrepancyReport {
        params: ReducedParams { ricci, theta, eta },
        tolerance: AGREEMENT_TOLERANCE,
        spectra,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_examples() {
        let z = quadratic_roots(0.0, 0.0, 0.0);
        assert_eq!(
            z.roots,
            vec![EigenPair {
                value: c(0.0, 0.0),
                multiplicity: 2
            }]
        );
        let r = quadratic_roots(1.0, 1.0, 0.0);
        assert_eq!(r.values(), vec![c(0.0, 0.0), c(-3.0, 0.0)]);
        assert!(r.residuals.iter().all(|x| *x <= 1e-10));
        let d = quadratic_roots(1.0, 0.0, 0.0);
        assert_eq!(
            d.roots,
            vec![EigenPair {
                value: c(-1.0, 0.0),
                multiplicity: 2
            }]
        );
        assert_eq!(d.max_real_part, -1.0);
    }

    #[test]
    fn closed_form_examples() {
        let s = closed_form_eigenvalues(0.0, 1.0, 0.0).unwrap().values();
        assert_relative_eq!(s[0].re, -0.5);
        assert_relative_eq!(s[0].im.abs(), 1.5_f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(s[0].im, -s[1].im);
        let s = closed_form_eigenvalues(-1.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(s.max_real_part, 0.5);
        assert_relative_eq!(s.values()[0].im.abs(), 0.75_f64.sqrt(), epsilon = 1e-15);
        let s = closed_form_eigenvalues(1.0, 1.0, 0.0).unwrap().values();
        assert_eq!(s[0], c(-1.5, 1.5));
        assert_eq!(s[1], c(-1.5, -1.5));
        assert_eq!(
            closed_form_eigenvalues(1.0, 0.0, 0.3),
            Err(DynamoError::DivisionByZero("theta"))
        );
    }

    #[test]
    fn diffusion_free_matches_closed_form() {
        for &(r, th) in &[(-1.0, 1.0), (1.0, 1.0), (2.5, -0.3)] {
            let a = diffusion_free_eigenvalues(r, th).unwrap();
            let b = closed_form_eigenvalues(r, th, 0.0).unwrap();
            assert_eq!(a.values(), b.values());
            assert_eq!(a.source, SpectrumSource::DiffusionFree);
        }
        assert!(diffusion_free_eigenvalues(1.0, 0.0).is_err());
    }

    #[test]
    fn cosmological_examples() {
        assert_eq!(cosmological_eigenvalues(1.0, 1.0, 0.0).unwrap().stated_real_part, -1.0);
        let neg = cosmological_eigenvalues(-1.0, 1.0, 0.0).unwrap();
        assert_eq!(neg.stated_real_part, 2.0);
        assert_eq!(neg.spectrum.max_real_part, 2.0);
        assert_eq!(
            cosmological_eigenvalues(1.0 / 3.0, 1.0, 0.0).unwrap().stated_real_part,
            0.0
        );
        assert!(cosmological_eigenvalues(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn chicone_latushkin_examples() {
        assert_eq!(chicone_latushkin(-1.0, 0.0).max_real_part, 1.0);
        assert_eq!(chicone_latushkin(-4.0, 0.0).max_real_part, 2.0);
        assert_eq!(chicone_latushkin(0.0, 0.0).max_real_part, 0.0);
        let pos = chicone_latushkin(2.0, 0.0).values()[0];
        assert_eq!(pos.re, 0.0);
        assert!(pos.im > 0.0);
    }

    #[test]
    fn fast_dynamo_examples() {
        let v = fast_dynamo_test(|eta| Ok(chicone_latushkin(-1.0, eta)), &[0.1, 0.01, 0.001]).unwrap();
        assert!(v.fast);
        assert_relative_eq!(v.limit, 1.0, epsilon = 1e-12);

        let constant = |_eta: f64| {
            Ok(SpectrumResult::build(
                SpectrumSource::ClosedForm,
                &[c(-1.0, 0.0)],
                None,
                true,
            ))
        };
        let v = fast_dynamo_test(constant, &[0.1, 0.01, 0.001]).unwrap();
        assert!(!v.fast);
        assert_relative_eq!(v.limit, -1.0, epsilon = 1e-12);

        let v = fast_dynamo_test(|eta| Ok(quadratic_roots(-1.0, 1.0, eta)), &[0.1, 0.01, 0.001]).unwrap();
        assert!(v.fast);
        assert_relative_eq!(v.limit, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn fast_dynamo_rejects_bad_sequences() {
        let f = |eta: f64| Ok(chicone_latushkin(-1.0, eta));
        assert!(matches!(
            fast_dynamo_test(f, &[0.1, 0.01]),
            Err(DynamoError::InsufficientSamples { .. })
        ));
        assert!(fast_dynamo_test(f, &[0.1, 0.2, 0.01]).is_err());
        assert!(fast_dynamo_test(f, &[0.1, 0.01, 0.0]).is_err());
    }

    #[test]
    fn fast_dynamo_flags_inconsistent_extrapolants() {
        // y = 1/η blows up, successive linear extrapolants disagree
        let f = |eta: f64| {
            Ok(SpectrumResult::build(
                SpectrumSource::ClosedForm,
                &[c(1.0 / eta, 0.0)],
                None,
                true,
            ))
        };
        assert!(matches!(
            fast_dynamo_test(f, &[0.1, 0.01, 0.001]),
            Err(DynamoError::NonConvergent { .. })
        ));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(
            degeneracy_discriminant(0.0, 0.0),
            Discriminant {
                value: 0.0,
                degenerate: true
            }
        );
        assert_eq!(
            degeneracy_discriminant(8.0, 11.0),
            Discriminant {
                value: 0.0,
                degenerate: true
            }
        );
        assert_eq!(
            degeneracy_discriminant(1.0, 1.0),
            Discriminant {
                value: 3.0,
                degenerate: false
            }
        );
    }

    #[test]
    fn numerical_reduced_examples() {
        let opts = EigenOptions::default();
        let s = numerical_spectrum(&crate::operator::assemble_reduced(1.0, 0.0, 0.0), 2, &opts).unwrap();
        assert_eq!(
            s.roots,
            vec![EigenPair {
                value: c(-1.0, 0.0),
                multiplicity: 2
            }]
        );
        let z = numerical_spectrum(&crate::operator::assemble_reduced(0.0, 0.0, 0.0), 2, &opts).unwrap();
        assert_eq!(z.values(), vec![c(0.0, 0.0); 2]);
    }

    #[test]
    fn discrepancy_examples() {
        let rep = discrepancy_report(0.0, 1.0, 0.0).unwrap();
        let qc = rep
            .between(SpectrumSource::CharacteristicQuadratic, SpectrumSource::ClosedForm)
            .unwrap();
        assert!(!qc.agrees);
        let qn = rep
            .between(
                SpectrumSource::CharacteristicQuadratic,
                SpectrumSource::NumericalReduced,
            )
            .unwrap();
        assert!(qn.agrees);
        assert!(qn.max_difference() <= 1e-10);
        let cq = rep
            .between(SpectrumSource::ClosedForm, SpectrumSource::CharacteristicQuadratic)
            .unwrap();
        for (a, b) in qc.differences.iter().zip(&cq.differences) {
            assert_eq!(*a, -*b);
        }
        assert!(discrepancy_report(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn coincident_routes_agree() {
        // identical root sets from two sources, in swapped order
        let q = quadratic_roots(0.25, 1.0, 0.0);
        let mut swapped = q.clone();
        swapped.source = SpectrumSource::ClosedForm;
        swapped.roots.reverse();
        let d = compare(&q, &swapped, AGREEMENT_TOLERANCE).unwrap();
        assert!(d.agrees);
        assert_eq!(d.max_difference(), 0.0);
    }
}
