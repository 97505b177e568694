//! Large-momentum asymptotics of effective Hamiltonians along Diophantine
//! directions.
//!
//! Along `p = λ Q` the effective Hamiltonian of `½|p|² + V` expands as
//! `½λ²|Q|² + a₁ + a₂/λ² + o(λ⁻²)`, where `a₁ = ∫V` and `a₂ = ½∫|Dv₁|²` with
//! `Q·Dv₁ = a₁ - V`. For the viscous problem `-Δv + |p + Dv|² + V` the
//! corresponding chain uses factor 2 transport solves and `a₂ = ∫|Dv₁|²`.
//! Everything here is exact arithmetic on truncated spectra.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::curve::EffectiveCurve;
use crate::error::{Error, Result};
use crate::ham1d::Hamiltonian1d;
use crate::numerics::extrapolate_to_zero;
use crate::potential::FourierPotential;

/// Smallest admissible `|Q·k|` in a transport solve.
pub const SMALL_DIVISOR_FLOOR: f64 = 1e-12;

/// A direction `Q` with `|Q·k| ≥ C / |k|^α` for all `0 < |k|_∞ ≤ k_checked`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiophantineVector {
    q: Vec<f64>,
    c: f64,
    alpha: f64,
    k_checked: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiophantinePreset {
    Golden,
    SqrtPrimes,
}

impl DiophantinePreset {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "golden" => Ok(Self::Golden),
            "sqrt-primes" => Ok(Self::SqrtPrimes),
            other => Err(Error::Descriptor(format!("unknown Q preset {other:?}; expected golden or sqrt-primes"))),
        }
    }
}

fn for_each_mode<F: FnMut(&[i64])>(n: usize, kmax: i64, mut f: F) {
    let mut k = vec![-kmax; n];
    loop {
        if k.iter().any(|&x| x != 0) {
            f(&k);
        }
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            if k[i] < kmax {
                k[i] += 1;
                break;
            }
            k[i] = -kmax;
            i += 1;
        }
    }
}

fn dot(q: &[f64], k: &[i64]) -> f64 {
    q.iter().zip(k).map(|(a, &b)| a * b as f64).sum()
}

fn norm(k: &[i64]) -> f64 {
    k.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt()
}

impl DiophantineVector {
    /// Fits `C = min |Q·k| |k|^α` over `0 < |k|_∞ ≤ k_max`; fails if some
    /// `Q·k` vanishes.
    pub fn new(q: Vec<f64>, alpha: f64, k_max: i64) -> Result<Self> {
        if q.is_empty() || q.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("invalid direction {q:?}")));
        }
        if k_max < 1 {
            return Err(Error::Domain(format!("K = {k_max} must be at least 1")));
        }
        let mut c = f64::INFINITY;
        let mut worst = Vec::new();
        for_each_mode(q.len(), k_max, |k| {
            let bound = dot(&q, k).abs() * norm(k).powf(alpha);
            if bound < c {
                c = bound;
                worst = k.to_vec();
            }
        });
        if c < SMALL_DIVISOR_FLOOR {
            return Err(Error::Degenerate(worst));
        }
        Ok(Self { q, c, alpha, k_checked: k_max })
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k_checked(&self) -> i64 {
        self.k_checked
    }

    pub fn norm(&self) -> f64 {
        self.q.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Preset directions: `(1)` in 1D; `(1, φ)` or `(1, √2)` in 2D;
/// `(1, φ, φ²)` (degenerate) or `(1, √2, √3)` in 3D. The exponent is `α = n`
/// for `n ≥ 2` and `0` in 1D.
pub fn make_diophantine(n: usize, preset: DiophantinePreset, k_max: i64) -> Result<DiophantineVector> {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    let q = match (n, preset) {
        (1, _) => return DiophantineVector::new(vec![1.0], 0.0, k_max),
        (2, DiophantinePreset::Golden) => vec![1.0, phi],
        (2, DiophantinePreset::SqrtPrimes) => vec![1.0, 2f64.sqrt()],
        (3, DiophantinePreset::Golden) => vec![1.0, phi, phi * phi],
        (3, DiophantinePreset::SqrtPrimes) => vec![1.0, 2f64.sqrt(), 3f64.sqrt()],
        _ => return Err(Error::Domain(format!("dimension {n} not in {{1, 2, 3}}"))),
    };
    DiophantineVector::new(q, n as f64, k_max)
}

fn build(dim: usize, coeffs: BTreeMap<Vec<i64>, Complex64>) -> FourierPotential {
    FourierPotential::new(dim, coeffs).expect("spectral operations preserve Hermitian symmetry")
}

/// Solves `factor · Q·Dv = rhs` for mean-zero `v`:
/// `v_k = rhs_k / (factor · 2πi · Q·k)`.
pub fn solve_transport(q: &DiophantineVector, rhs: &FourierPotential, factor: f64) -> Result<FourierPotential> {
    if rhs.dim() != q.dim() {
        return Err(Error::Shape(format!("rhs is {}-dimensional, Q is {}-dimensional", rhs.dim(), q.dim())));
    }
    let zero = vec![0; rhs.dim()];
    let mean = rhs.coeff(&zero);
    if mean.norm() > 1e-14 {
        return Err(Error::Precondition(format!("rhs has nonzero mean {mean}")));
    }
    if factor == 0.0 || !factor.is_finite() {
        return Err(Error::Domain(format!("factor = {factor}")));
    }
    let mut out = BTreeMap::new();
    for (k, c) in rhs.coeffs() {
        if *k == zero {
            continue;
        }
        let divisor = dot(q.q(), k);
        if divisor.abs() < SMALL_DIVISOR_FLOOR {
            return Err(Error::SmallDivisor { k: k.clone(), divisor });
        }
        out.insert(k.clone(), c / Complex64::new(0.0, factor * 2.0 * PI * divisor));
    }
    Ok(build(rhs.dim(), out))
}

/// `∂v/∂x_j`.
pub fn partial(v: &FourierPotential, j: usize) -> FourierPotential {
    let coeffs = v
        .coeffs()
        .iter()
        .filter(|(k, _)| k[j] != 0)
        .map(|(k, c)| (k.clone(), c * Complex64::new(0.0, 2.0 * PI * k[j] as f64)))
        .collect();
    build(v.dim(), coeffs)
}

/// `Δv`.
pub fn laplacian(v: &FourierPotential) -> FourierPotential {
    let coeffs = v
        .coeffs()
        .iter()
        .filter(|(k, _)| k.iter().any(|&x| x != 0))
        .map(|(k, c)| (k.clone(), c * (-4.0 * PI * PI * norm(k).powi(2))))
        .collect();
    build(v.dim(), coeffs)
}

/// Pointwise product, by convolution of spectra.
pub fn product(a: &FourierPotential, b: &FourierPotential) -> FourierPotential {
    let mut out: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
    for (k, x) in a.coeffs() {
        for (l, y) in b.coeffs() {
            let m: Vec<i64> = k.iter().zip(l).map(|(p, q)| p + q).collect();
            *out.entry(m).or_default() += x * y;
        }
    }
    out.retain(|_, c| c.norm() > 0.0);
    let dim = a.dim();
    // restore exact Hermitian symmetry lost to summation order
    let keys: Vec<Vec<i64>> = out.keys().cloned().collect();
    for k in keys {
        let minus: Vec<i64> = k.iter().map(|x| -x).collect();
        if k < minus {
            let c = out[&k];
            let d = out.get(&minus).copied().unwrap_or_default();
            let avg = 0.5 * (c + d.conj());
            out.insert(k, avg);
            out.insert(minus, avg.conj());
        } else if k == minus {
            let c = out[&k];
            out.insert(k, Complex64::new(c.re, 0.0));
        }
    }
    build(dim, out)
}

/// `|Dv|²`.
pub fn grad_norm_sq(v: &FourierPotential) -> FourierPotential {
    let mut total = FourierPotential::zero(v.dim());
    for j in 0..v.dim() {
        let d = partial(v, j);
        total = add(&total, &product(&d, &d), 1.0);
    }
    total
}

fn add(a: &FourierPotential, b: &FourierPotential, scale: f64) -> FourierPotential {
    let mut out = a.coeffs().clone();
    for (k, c) in b.coeffs() {
        *out.entry(k.clone()).or_default() += c * scale;
    }
    out.retain(|_, c| c.norm() > 0.0);
    build(a.dim(), out)
}

fn constant(dim: usize, c: f64) -> FourierPotential {
    FourierPotential::cosine(&vec![0; dim], c)
}

/// `∫|Dv|²` by Parseval: `Σ (2π)² |k|² |v_k|²`.
pub fn dirichlet_energy(v: &FourierPotential) -> f64 {
    v.coeffs().iter().map(|(k, c)| 4.0 * PI * PI * norm(k).powi(2) * c.norm_sqr()).sum()
}

/// Expansion coefficients with the correctors that produce them.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoeffs {
    pub a1: f64,
    pub a2: f64,
    pub v1: FourierPotential,
    pub v2: Option<FourierPotential>,
    pub v3: Option<FourierPotential>,
}

/// `a₁ = ∫V`, `Q·Dv₁ = a₁ - V`, `a₂ = ½∫|Dv₁|² = ½ Σ |k|²|λ_k|² / |Q·k|²`.
pub fn inviscid_coeffs(v: &FourierPotential, q: &DiophantineVector) -> Result<ExpansionCoeffs> {
    let a1 = v.mean();
    let rhs = add(&constant(v.dim(), a1), v, -1.0);
    let v1 = solve_transport(q, &rhs, 1.0)?;
    let a2 = 0.5 * dirichlet_energy(&v1);
    Ok(ExpansionCoeffs { a1, a2, v1, v2: None, v3: None })
}

/// Viscous chain `2Q·Dv₁ = a₁ - V`, `2Q·Dv₂ = Δv₁`,
/// `2Q·Dv₃ = a₂ - |Dv₁|² + Δv₂` with `a₂ = ∫|Dv₁|²`.
pub fn viscous_coeffs(v: &FourierPotential, q: &DiophantineVector) -> Result<ExpansionCoeffs> {
    let a1 = v.mean();
    let rhs1 = add(&constant(v.dim(), a1), v, -1.0);
    let v1 = solve_transport(q, &rhs1, 2.0)?;
    let a2 = dirichlet_energy(&v1);
    let v2 = solve_transport(q, &laplacian(&v1), 2.0)?;
    let g = grad_norm_sq(&v1);
    let mut rhs3 = add(&constant(v.dim(), a2), &g, -1.0);
    rhs3 = add(&rhs3, &laplacian(&v2), 1.0);
    // the mean cancels up to roundoff; remove it exactly
    let zero = vec![0; v.dim()];
    let residual_mean = rhs3.coeff(&zero).re;
    rhs3 = add(&rhs3, &constant(v.dim(), residual_mean), -1.0);
    let v3 = solve_transport(q, &rhs3, 2.0)?;
    Ok(ExpansionCoeffs { a1, a2, v1, v2: Some(v2), v3: Some(v3) })
}

/// Whether two potentials share `a₁` and `a₂` within `tol` for every
/// direction in `directions`.
pub fn expansion_indistinguishable(
    v1: &FourierPotential,
    v2: &FourierPotential,
    directions: &[DiophantineVector],
    tol: f64,
) -> Result<bool> {
    for q in directions {
        let (c1, c2) = (inviscid_coeffs(v1, q)?, inviscid_coeffs(v2, q)?);
        if (c1.a1 - c2.a1).abs() > tol || (c1.a2 - c2.a2).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Limit of `H̄(λQ) - H(λQ)` as `λ → ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredMean {
    pub value: f64,
    pub lambdas: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Set when the residuals do not approach the limit monotonically.
    pub warning: Option<String>,
}

fn curve_value(curve: &EffectiveCurve, p: f64) -> Result<f64> {
    curve
        .at(p, 1e-9 * p.abs().max(1.0))
        .map(|s| s.hbar)
        .ok_or_else(|| Error::Precondition(format!("curve has no sample at p = {p}")))
}

/// Richardson extrapolation in `1/λ²` of `H̄(λQ) - H(λQ)` over the samples
/// of a 1D curve at `p = λ Q`.
pub fn recover_mean(
    curve: &EffectiveCurve,
    h: &dyn Hamiltonian1d,
    direction: &DiophantineVector,
    lambdas: &[f64],
) -> Result<RecoveredMean> {
    if direction.dim() != 1 {
        return Err(Error::Shape("curves are one-dimensional".into()));
    }
    if lambdas.is_empty() {
        return Err(Error::Precondition("empty λ grid".into()));
    }
    let q = direction.q()[0];
    let mut residuals = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let p = lambda * q;
        residuals.push(curve_value(curve, p)? - h.value(p));
    }
    let hs: Vec<f64> = lambdas.iter().map(|l| 1.0 / (l * l)).collect();
    let value = extrapolate_to_zero(&hs, &residuals);
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&a, &b| lambdas[a].total_cmp(&lambdas[b]));
    let gaps: Vec<f64> = order.iter().map(|&i| (residuals[i] - value).abs()).collect();
    let warning = gaps
        .windows(2)
        .any(|w| w[1] > w[0] * (1.0 + 1e-12) + 1e-14)
        .then(|| "residuals do not decrease monotonically along the λ grid; extrapolation unreliable".to_string());
    Ok(RecoveredMean { value, lambdas: lambdas.to_vec(), residuals, warning })
}

/// `(H̄(λQ) - H(λQ) - a₁) λ²`, which tends to `a₂`.
pub fn second_order_coefficient(
    curve: &EffectiveCurve,
    h: &dyn Hamiltonian1d,
    direction: &DiophantineVector,
    lambda: f64,
    a1: f64,
) -> Result<f64> {
    if direction.dim() != 1 {
        return Err(Error::Shape("curves are one-dimensional".into()));
    }
    let p = lambda * direction.q()[0];
    Ok((curve_value(curve, p)? - h.value(p) - a1) * lambda * lambda)
}

/// Random real potential with modes `0 < |k|_∞ <= kmax` and coefficients
/// damped like `1/(1 + |k|²)`.
pub fn random_spectrum<R: Rng + ?Sized>(rng: &mut R, dim: usize, kmax: i64) -> FourierPotential {
    let mut coeffs = BTreeMap::new();
    for_each_mode(dim, kmax, |k| {
        let minus: Vec<i64> = k.iter().map(|x| -x).collect();
        if k.to_vec() < minus {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (1.0 + norm(k).powi(2));
            coeffs.insert(k.to_vec(), c);
            coeffs.insert(minus, c.conj());
        }
    });
    build(dim, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveSample, Method};
    use crate::ham1d::QuasiConvexProfile;
    use crate::inviscid1d::effective_h_quasiconvex;
    use crate::potential::{PiecewiseLinearPotential, Potential};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn golden() -> DiophantineVector {
        make_diophantine(2, DiophantinePreset::Golden, 50).unwrap()
    }

    fn grad_at(v: &FourierPotential, x: &[f64]) -> Vec<f64> {
        v.gradient(x)
    }

    #[test]
    fn diophantine_presets() {
        let one = make_diophantine(1, DiophantinePreset::Golden, 20).unwrap();
        assert_eq!(one.q(), &[1.0]);
        assert_eq!(one.c(), 1.0);
        assert_eq!(one.alpha(), 0.0);
        let g = golden();
        assert!(g.c() > 0.0);
        // exhaustive check of the fitted bound
        for_each_mode(2, 50, |k| assert!(dot(g.q(), k).abs() >= g.c() / norm(k).powi(2) * (1.0 - 1e-12)));
        assert!(matches!(DiophantineVector::new(vec![1.0, 0.5], 2.0, 10), Err(Error::Degenerate(_))));
        assert!(matches!(make_diophantine(3, DiophantinePreset::Golden, 5), Err(Error::Degenerate(_))));
        assert!(make_diophantine(3, DiophantinePreset::SqrtPrimes, 8).unwrap().c() > 0.0);
        assert!(make_diophantine(4, DiophantinePreset::SqrtPrimes, 8).is_err());
    }

    #[test]
    fn transport_examples() {
        let q = golden();
        let rhs = FourierPotential::cosine(&[1, 0], -1.0);
        let v = solve_transport(&q, &rhs, 1.0).unwrap();
        assert!((v.coeff(&[1, 0]).norm() - 1.0 / (4.0 * PI)).abs() < 1e-15);
        for i in 0..32 {
            let x = [i as f64 / 32.0, 0.3];
            assert!((v.eval(&x) + (2.0 * PI * x[0]).sin() / (2.0 * PI)).abs() < 1e-15);
        }
        assert!(solve_transport(&q, &FourierPotential::zero(2), 1.0).unwrap().coeffs().is_empty());
        let shifted = add(&rhs, &constant(2, 0.1), 1.0);
        assert!(matches!(solve_transport(&q, &shifted, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn transport_small_divisor_names_mode() {
        let q = DiophantineVector { q: vec![1.0, 1.0], c: 1.0, alpha: 2.0, k_checked: 0 };
        let rhs = FourierPotential::cosine(&[1, -1], 1.0);
        match solve_transport(&q, &rhs, 1.0) {
            Err(Error::SmallDivisor { k, .. }) => assert!(k == vec![1, -1] || k == vec![-1, 1]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn transport_residual_on_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = golden();
        for factor in [1.0, 2.0] {
            let v = random_spectrum(&mut rng, 2, 3);
            let rhs = add(&v, &constant(2, v.mean()), -1.0);
            let sol = solve_transport(&q, &rhs, factor).unwrap();
            for i in 0..128 {
                let x = [(i as f64 * 0.618_034) % 1.0, (i as f64 * 0.414_214) % 1.0];
                let g = grad_at(&sol, &x);
                let lhs = factor * (q.q()[0] * g[0] + q.q()[1] * g[1]);
                assert!((lhs - rhs.eval(&x)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn inviscid_examples() {
        let c = inviscid_coeffs(&FourierPotential::cosine(&[1, 0], 1.0), &golden()).unwrap();
        assert!(c.a1.abs() < 1e-15);
        assert!((c.a2 - 0.25).abs() < 1e-12);
        let c = inviscid_coeffs(&FourierPotential::cosine(&[0, 0], 0.7), &golden()).unwrap();
        assert_eq!((c.a1, c.a2), (0.7, 0.0));
        let one = make_diophantine(1, DiophantinePreset::Golden, 10).unwrap();
        let c = inviscid_coeffs(&FourierPotential::mathieu(), &one).unwrap();
        assert!((c.a2 - 0.25).abs() < 1e-14);
    }

    #[test]
    fn viscous_examples() {
        let one = make_diophantine(1, DiophantinePreset::Golden, 10).unwrap();
        let c = viscous_coeffs(&FourierPotential::mathieu(), &one).unwrap();
        assert!((c.a2 - 0.125).abs() < 1e-14);
        // v₁' = cos(2πx)/2
        for i in 0..16 {
            let x = i as f64 / 16.0;
            assert!((grad_at(&c.v1, &[x])[0] - 0.5 * (2.0 * PI * x).cos()).abs() < 1e-14);
        }
        let z = viscous_coeffs(&FourierPotential::zero(2), &golden()).unwrap();
        assert_eq!((z.a1, z.a2), (0.0, 0.0));
        assert!(z.v3.unwrap().coeffs().is_empty());
        let c = viscous_coeffs(&FourierPotential::cosine(&[1, 0], 1.0), &golden()).unwrap();
        assert!((c.a2 - 0.125).abs() < 1e-12);
    }

    #[test]
    fn parseval_matches_grid_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = golden();
        for _ in 0..5 {
            let v = random_spectrum(&mut rng, 2, 3);
            let c = inviscid_coeffs(&v, &q).unwrap();
            // trapezoid on a 16×16 grid is exact for degree ≤ 2·3
            let m = 16;
            let mut sum = 0.0;
            for i in 0..m {
                for j in 0..m {
                    let g = grad_at(&c.v1, &[i as f64 / m as f64, j as f64 / m as f64]);
                    sum += g[0] * g[0] + g[1] * g[1];
                }
            }
            let quad = 0.5 * sum / (m * m) as f64;
            assert!((quad - c.a2).abs() < 1e-10 * c.a2.max(1.0));
        }
    }

    #[test]
    fn viscous_third_equation_is_solvable() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_spectrum(&mut rng, 2, 2);
        let c = viscous_coeffs(&v, &golden()).unwrap();
        let v2 = c.v2.unwrap();
        assert!(laplacian(&v2).coeff(&[0, 0]).norm() < 1e-15);
        assert!(c.v3.is_some());
    }

    #[test]
    fn product_matches_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_spectrum(&mut rng, 2, 2);
        let b = random_spectrum(&mut rng, 2, 2);
        let ab = product(&a, &b);
        for i in 0..20 {
            let x = [i as f64 * 0.137, i as f64 * 0.291];
            assert!((ab.eval(&x) - a.eval(&x) * b.eval(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn expansion_shadow_detects_equal_moments() {
        let dirs = [make_diophantine(1, DiophantinePreset::Golden, 10).unwrap()];
        let v = FourierPotential::mathieu();
        assert!(expansion_indistinguishable(&v, &v.shifted(&[0.3]), &dirs, 1e-12).unwrap());
        assert!(!expansion_indistinguishable(&v, &v.scaled(2.0), &dirs, 1e-12).unwrap());
    }

    fn exact_curve(v: &Potential, lambdas: &[f64]) -> EffectiveCurve {
        let h = QuasiConvexProfile::quadratic();
        let samples = lambdas
            .iter()
            .map(|&p| CurveSample { p, hbar: effective_h_quasiconvex(&h, v, p).unwrap(), err: 0.0 })
            .collect();
        EffectiveCurve::new(Method::ExactQuadrature, samples).unwrap()
    }

    #[test]
    fn recover_mean_of_sawtooth() {
        let v: Potential = PiecewiseLinearPotential::sawtooth(0.5).unwrap().into();
        let lambdas = [10.0, 20.0, 40.0];
        let curve = exact_curve(&v, &lambdas);
        let dir = make_diophantine(1, DiophantinePreset::Golden, 10).unwrap();
        let r = recover_mean(&curve, &QuasiConvexProfile::quadratic(), &dir, &lambdas).unwrap();
        assert!((r.value + 0.5).abs() < 1e-3);
        assert!(r.warning.is_none());
        let z = exact_curve(&Potential::zero(), &lambdas);
        let r = recover_mean(&z, &QuasiConvexProfile::quadratic(), &dir, &lambdas).unwrap();
        assert!(r.value.abs() < 1e-12);
        assert!(recover_mean(&z, &QuasiConvexProfile::quadratic(), &dir, &[15.0]).is_err());
    }

    #[test]
    fn second_order_coefficient_of_mathieu() {
        let v: Potential = FourierPotential::mathieu().into();
        let curve = exact_curve(&v, &[50.0]);
        let dir = make_diophantine(1, DiophantinePreset::Golden, 10).unwrap();
        let a2 = second_order_coefficient(&curve, &QuasiConvexProfile::quadratic(), &dir, 50.0, 0.0).unwrap();
        assert!((a2 - 0.25).abs() < 1e-3, "{a2}");
    }
}
