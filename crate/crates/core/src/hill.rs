//! The viscous one-dimensional pipeline through Hill's equation.
//!
//! With `φ = exp(-(px + v))` the viscous cell problem
//! `-v'' + |p + v'|² + V = H̄` becomes `-φ'' = (λ + V) φ` with `λ = -H̄` and
//! Floquet multiplier `e^{-p}`. Hence `H̄(p) = -λ` where the discriminant
//! `Δ(λ) = w₁(1) + w₂'(1)` equals `2 cosh p`.

use crate::curve::{CurveSample, EffectiveCurve, Method};
use crate::error::{Error, Result};
use crate::numerics::bisect;
use crate::potential::Potential;

const ENTRY_TOL: f64 = 1e-10;
const MAX_STEPS: usize = 1 << 22;
const SCAN_POINTS: usize = 32;

/// Transfer matrix of `-w'' = (λ + V) w` over one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy {
    pub lambda: f64,
    pub w1: f64,
    pub w2: f64,
    pub dw1: f64,
    pub dw2: f64,
    /// Step count at which the entries stabilised.
    pub steps: usize,
}

impl Monodromy {
    pub fn det(&self) -> f64 {
        self.w1 * self.dw2 - self.w2 * self.dw1
    }

    pub fn trace(&self) -> f64 {
        self.w1 + self.dw2
    }

    fn max_entry(&self) -> f64 {
        self.w1.abs().max(self.w2.abs()).max(self.dw1.abs()).max(self.dw2.abs())
    }

    fn distance(&self, other: &Self) -> f64 {
        (self.w1 - other.w1)
            .abs()
            .max((self.w2 - other.w2).abs())
            .max((self.dw1 - other.dw1).abs())
            .max((self.dw2 - other.dw2).abs())
    }
}

type Mat = [[f64; 2]; 2];

fn matmul(a: &Mat, b: &Mat) -> Mat {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// `exp` of the fourth-order Magnus generator for `y' = [[0, 1], [-q, 0]] y`
/// over a step of length `h`, with `q` sampled at the two Gauss points.
fn magnus_step(q1: f64, q2: f64, h: f64) -> Mat {
    let a = 3f64.sqrt() / 12.0 * h * h * (q2 - q1);
    let b = h;
    let c = -0.5 * h * (q1 + q2);
    let mu2 = a * a + b * c;
    let (ch, sh) = if mu2.abs() < 1e-8 {
        // series to O(μ⁶)
        (1.0 + mu2 / 2.0 + mu2 * mu2 / 24.0, 1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0)
    } else if mu2 > 0.0 {
        let mu = mu2.sqrt();
        (mu.cosh(), mu.sinh() / mu)
    } else {
        let nu = (-mu2).sqrt();
        (nu.cos(), nu.sin() / nu)
    };
    [[ch + sh * a, sh * b], [sh * c, ch - sh * a]]
}

fn integrate_period(v: &Potential, lambda: f64, steps: usize) -> Mat {
    let c1 = 0.5 - 3f64.sqrt() / 6.0;
    let c2 = 0.5 + 3f64.sqrt() / 6.0;
    let kinks = v.kinks();
    let mut y: Mat = [[1.0, 0.0], [0.0, 1.0]];
    for w in kinks.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let n = ((steps as f64 * (x1 - x0)).ceil() as usize).max(1);
        let h = (x1 - x0) / n as f64;
        for i in 0..n {
            let x = x0 + i as f64 * h;
            let q1 = lambda + v.eval(x + c1 * h);
            let q2 = lambda + v.eval(x + c2 * h);
            y = matmul(&magnus_step(q1, q2, h), &y);
        }
    }
    y
}

fn monodromy_at(v: &Potential, lambda: f64, steps: usize) -> Result<Monodromy> {
    let y = integrate_period(v, lambda, steps);
    let m = Monodromy { lambda, w1: y[0][0], w2: y[0][1], dw1: y[1][0], dw2: y[1][1], steps };
    if !m.max_entry().is_finite() {
        return Err(Error::Overflow { lambda });
    }
    Ok(m)
}

/// Monodromy matrix, doubling the step count from `steps` until the entries
/// agree to `1e-10` relative to the largest entry.
pub fn monodromy(v: &Potential, lambda: f64, steps: usize) -> Result<Monodromy> {
    if steps < 64 {
        return Err(Error::Precondition(format!("steps = {steps} < 64")));
    }
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("λ = {lambda}")));
    }
    let mut n = steps;
    let mut prev = monodromy_at(v, lambda, n)?;
    loop {
        n *= 2;
        let cur = monodromy_at(v, lambda, n)?;
        if cur.distance(&prev) <= ENTRY_TOL * cur.max_entry().max(1.0) || n >= MAX_STEPS {
            return Ok(cur);
        }
        prev = cur;
    }
}

/// `Δ(λ) = w₁(1) + w₂'(1)`.
pub fn discriminant(v: &Potential, lambda: f64) -> Result<f64> {
    Ok(monodromy(v, lambda, 64)?.trace())
}

/// The momentum `p ≥ 0` with `2 cosh p = Δ(λ)`, if `Δ(λ) ≥ 2`. The level set
/// of `H̄` at `-λ` is `{-p, p}`.
pub fn level_p(v: &Potential, lambda: f64) -> Result<Option<f64>> {
    let delta = discriminant(v, lambda)?;
    Ok((delta >= 2.0).then(|| (0.5 * delta).acosh()))
}

/// Viscous effective Hamiltonian of `-d v'' + |p + v'|² + V = H̄`.
///
/// Other diffusions reduce to `d = 1` through `v = d w`:
/// `H̄_d(p; V) = d² H̄₁(p / d; V / d²)`.
pub fn viscous_effective_h(v: &Potential, p: f64, d: f64) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Domain(format!("diffusion d = {d} must be positive")));
    }
    if d != 1.0 {
        return Ok(d * d * viscous_effective_h(&v.divided(d * d), p / d, 1.0)?);
    }
    let p = p.abs();
    let lo = -(p * p + v.max()) - 1.0;
    let hi = -(p * p + v.mean()) + 1.0;
    // signed distance of the Floquet exponent from p; decreasing in λ below
    // the bottom of the spectrum
    let g = |lambda: f64| -> Result<f64> {
        let delta = discriminant(v, lambda)?;
        Ok(if delta >= 2.0 { (0.5 * delta).acosh() - p } else { 0.5 * delta - 1.0 - p })
    };
    let mut a = lo;
    let mut ga = g(a)?;
    if ga < 0.0 {
        return Err(Error::SpectralRange(format!("Δ({lo}) below 2 cosh({p})")));
    }
    for i in 1..=SCAN_POINTS {
        let b = lo + (hi - lo) * i as f64 / SCAN_POINTS as f64;
        let gb = g(b)?;
        if ga >= 0.0 && gb < 0.0 {
            let mut failure = None;
            let root = bisect(
                |lambda| match g(lambda) {
                    Ok(x) => x,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                },
                a,
                b,
                0.0,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            return Ok(-root.map_err(|e| Error::SpectralRange(e.to_string()))?);
        }
        a = b;
        ga = gb;
    }
    Err(Error::SpectralRange(format!("Δ = 2 cosh({p}) not bracketed on [{lo}, {hi}]")))
}

/// Viscous curve over a momentum grid.
pub fn viscous_curve(v: &Potential, ps: &[f64], d: f64) -> Result<EffectiveCurve> {
    let samples = ps
        .iter()
        .map(|&p| {
            let hbar = viscous_effective_h(v, p, d)?;
            Ok(CurveSample { p, hbar, err: 1e-9 * (1.0 + hbar.abs()) })
        })
        .collect::<Result<Vec<_>>>()?;
    EffectiveCurve::new(Method::HillSpectral, samples)
}

/// `max_λ |Δ₁(λ) - Δ₂(λ)|` over a grid.
pub fn isospectral_distance(v1: &Potential, v2: &Potential, lambdas: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &lambda in lambdas {
        worst = worst.max((discriminant(v1, lambda)? - discriminant(v2, lambda)?).abs());
    }
    Ok(worst)
}

/// Discriminant sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminantScan {
    pub lambdas: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Indices `i` such that `|Δ| - 2` changes sign on `[λ_i, λ_{i+1}]`,
    /// i.e. band edges.
    pub band_edges: Vec<usize>,
}

impl DiscriminantScan {
    pub fn new(v: &Potential, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::Domain(format!("scan needs n ≥ 2 and lo < hi, got {n} on [{lo}, {hi}]")));
        }
        let lambdas: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let deltas = lambdas.iter().map(|&l| discriminant(v, l)).collect::<Result<Vec<_>>>()?;
        let band_edges = (0..n - 1)
            .filter(|&i| (deltas[i].abs() - 2.0).signum() != (deltas[i + 1].abs() - 2.0).signum())
            .collect();
        Ok(Self { lambdas, deltas, band_edges })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{FourierPotential, PiecewiseLinearPotential};
    use std::f64::consts::PI;

    fn mathieu() -> Potential {
        FourierPotential::mathieu().into()
    }

    // classical RK4 on the first-order system at a fixed fine step
    fn rk4_monodromy(v: &Potential, lambda: f64, n: usize) -> [f64; 4] {
        let f = |x: f64, y: [f64; 2]| [y[1], -(lambda + v.eval(x)) * y[0]];
        let solve = |y0: [f64; 2]| {
            let h = 1.0 / n as f64;
            let mut y = y0;
            for i in 0..n {
                let x = i as f64 * h;
                let k1 = f(x, y);
                let k2 = f(x + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
                let k3 = f(x + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
                let k4 = f(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
                for j in 0..2 {
                    y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
                }
            }
            y
        };
        let a = solve([1.0, 0.0]);
        let b = solve([0.0, 1.0]);
        [a[0], b[0], a[1], b[1]]
    }

    #[test]
    fn free_discriminant() {
        let z = Potential::zero();
        let m = monodromy(&z, PI * PI, 64).unwrap();
        assert!((m.w1 + 1.0).abs() < 1e-12 && (m.dw2 + 1.0).abs() < 1e-12);
        assert!((discriminant(&z, PI * PI).unwrap() + 2.0).abs() < 1e-12);
        assert!((discriminant(&z, -1.0).unwrap() - 2.0 * 1f64.cosh()).abs() < 1e-12);
        assert!((discriminant(&z, -1.0).unwrap() - 3.0861613).abs() < 1e-7);
        for l in [-30.0f64, -2.5, 0.3, 7.0, 55.0] {
            let exact = if l < 0.0 { 2.0 * (-l).sqrt().cosh() } else { 2.0 * l.sqrt().cos() };
            assert!((discriminant(&z, l).unwrap() - exact).abs() < 1e-10 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn mathieu_monodromy_matches_rk4() {
        let v = mathieu();
        let m = monodromy(&v, 0.0, 64).unwrap();
        assert!((m.det() - 1.0).abs() < 1e-9);
        let r = rk4_monodromy(&v, 0.0, 20_000);
        for (a, b) in [m.w1, m.w2, m.dw1, m.dw2].iter().zip(r) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn piecewise_monodromy_matches_rk4() {
        let v: Potential = PiecewiseLinearPotential::vhat2().into();
        for l in [-3.0, 0.5, 12.0] {
            let m = monodromy(&v, l, 64).unwrap();
            let r = rk4_monodromy(&v, l, 60_000);
            for (a, b) in [m.w1, m.w2, m.dw1, m.dw2].iter().zip(r) {
                assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn monodromy_rejects_few_steps() {
        assert!(matches!(monodromy(&mathieu(), 0.0, 10), Err(Error::Precondition(_))));
    }

    #[test]
    fn level_p_examples() {
        let z = Potential::zero();
        let p = level_p(&z, -4.0).unwrap().unwrap();
        assert!((p - 2.0).abs() < 1e-12);
        assert_eq!(level_p(&z, 0.0).unwrap(), Some(0.0));
        assert_eq!(level_p(&z, 1.0).unwrap(), None);
        let v = mathieu();
        let p = level_p(&v, -5.0).unwrap().unwrap();
        assert!(p > 2.0);
        let back = viscous_effective_h(&v, p, 1.0).unwrap();
        assert!((back - 5.0).abs() < 1e-8);
    }

    #[test]
    fn viscous_free_and_even() {
        let z = Potential::zero();
        assert!((viscous_effective_h(&z, 1.5, 1.0).unwrap() - 2.25).abs() < 1e-8);
        let v = mathieu();
        for p in [0.3, 1.7] {
            assert_eq!(viscous_effective_h(&v, p, 1.0).unwrap(), viscous_effective_h(&v, -p, 1.0).unwrap());
        }
    }

    #[test]
    fn viscous_sandwich_and_strict_gap() {
        let v = mathieu();
        for i in 0..=12 {
            let p = 0.25 * i as f64;
            let h = viscous_effective_h(&v, p, 1.0).unwrap();
            assert!(h >= p * p + v.mean() - 1e-9 && h <= p * p + v.max() + 1e-9);
        }
        // max V = 0 and V not identically 0: strictly below p²
        let s: Potential = PiecewiseLinearPotential::sawtooth(0.4).unwrap().into();
        for p in [0.0, 0.8, 2.0] {
            assert!(viscous_effective_h(&s, p, 1.0).unwrap() < p * p);
        }
        assert!(viscous_effective_h(&v, 0.0, 1.0).unwrap() < v.max() - 1e-3);
    }

    #[test]
    fn viscous_high_momentum_expansion() {
        let v = mathieu();
        let p = 20.0;
        let h = viscous_effective_h(&v, p, 1.0).unwrap();
        let scaled = (h - p * p) * p * p;
        assert!((0.115..=0.135).contains(&scaled), "{scaled}");
    }

    #[test]
    fn viscous_repetition_changes_curve() {
        let v = mathieu();
        let a = viscous_effective_h(&v, 2.0, 1.0).unwrap();
        let b = viscous_effective_h(&v.repeated(2), 2.0, 1.0).unwrap();
        assert!((a - b).abs() > 1e-3);
    }

    #[test]
    fn diffusion_rescaling() {
        let z = Potential::zero();
        assert!((viscous_effective_h(&z, 1.2, 0.5).unwrap() - 1.44).abs() < 1e-9);
        let v = mathieu();
        let h = viscous_effective_h(&v, 0.7, 0.5).unwrap();
        assert!(h >= 0.49 + v.mean() - 1e-9 && h <= 0.49 + v.max() + 1e-9);
        assert!(viscous_effective_h(&v, 0.7, 0.0).is_err());
    }

    #[test]
    fn round_trip() {
        let v: Potential = PiecewiseLinearPotential::sawtooth(0.3).unwrap().into();
        for lambda in [-0.9, -2.0, -6.0, -15.0] {
            let delta = discriminant(&v, lambda).unwrap();
            if delta >= 2.0 + 1e-6 {
                let p = level_p(&v, lambda).unwrap().unwrap();
                assert!((viscous_effective_h(&v, p, 1.0).unwrap() + lambda).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn isospectral_examples() {
        let v = mathieu();
        let grid: Vec<f64> = (0..25).map(|i| -6.0 + i as f64).collect();
        assert!(isospectral_distance(&v, &v.shifted(0.37), &grid).unwrap() < 1e-8);
        let s: Potential = PiecewiseLinearPotential::sawtooth(0.2).unwrap().into();
        let r: Potential = PiecewiseLinearPotential::sawtooth(0.8).unwrap().into();
        assert!(isospectral_distance(&s, &r, &grid).unwrap() < 1e-8);
        assert!(isospectral_distance(&v, &v.repeated(2), &grid).unwrap() > 1e-2);
    }

    #[test]
    fn scan_finds_band_edges() {
        let scan = DiscriminantScan::new(&Potential::zero(), -1.0, 50.0, 200).unwrap();
        assert_eq!(scan.lambdas.len(), 200);
        // free bands end at λ = (kπ)², touching |Δ| = 2 at 0, π², 4π²
        assert!(!scan.band_edges.is_empty());
        assert!(DiscriminantScan::new(&Potential::zero(), 1.0, 0.0, 10).is_err());
    }
}
