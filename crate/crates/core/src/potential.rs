//! Periodic potentials on the unit torus.
//!
//! Two representations are supported: continuous piecewise-linear profiles
//! given by breakpoints on `[0, 1]`, and truncated Fourier series in `n`
//! dimensions. Distribution functions of piecewise-linear potentials are
//! computed exactly from the segment geometry; for Fourier potentials they are
//! sampled.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const VALUE_TOL: f64 = 1e-12;

/// A continuous, 1-periodic, piecewise-linear potential.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearPotential {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

/// One linear piece `(x0, x1, v0, v1)` of a piecewise-linear potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub x0: f64,
    pub x1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Segment {
    pub fn len(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn slope(&self) -> f64 {
        (self.v1 - self.v0) / (self.x1 - self.x0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let w = (x - self.x0) / (self.x1 - self.x0);
        self.v0 + w * (self.v1 - self.v0)
    }

    /// The point inside the segment where the potential takes value `v`,
    /// if any.
    pub fn crossing(&self, v: f64) -> Option<f64> {
        let (lo, hi) = (self.v0.min(self.v1), self.v0.max(self.v1));
        if self.v0 == self.v1 || v < lo || v > hi {
            return None;
        }
        Some(self.x0 + (v - self.v0) / (self.v1 - self.v0) * (self.x1 - self.x0))
    }

    /// Lebesgue measure of `{x in segment : V(x) <= t}`.
    fn sublevel_measure(&self, t: f64) -> f64 {
        let (lo, hi) = (self.v0.min(self.v1), self.v0.max(self.v1));
        if t >= hi {
            self.len()
        } else if t < lo {
            0.0
        } else if hi == lo {
            self.len()
        } else {
            self.len() * (t - lo) / (hi - lo)
        }
    }
}

impl PiecewiseLinearPotential {
    /// Builds a potential from breakpoints `0 = x_0 < ... < x_M = 1` and
    /// values with `v_0 = v_M`.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.len() != values.len() {
            return Err(Error::Domain(
                "need at least two breakpoints and one value per breakpoint".into(),
            ));
        }
        if breakpoints[0] != 0.0 || breakpoints[breakpoints.len() - 1] != 1.0 {
            return Err(Error::Domain("breakpoints must start at 0 and end at 1".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("breakpoints must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("values must be finite".into()));
        }
        if (values[0] - values[values.len() - 1]).abs() > VALUE_TOL {
            return Err(Error::Domain(format!(
                "periodic closure violated: V(0) = {} but V(1) = {}",
                values[0],
                values[values.len() - 1]
            )));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            points.iter().map(|p| p.0).collect(),
            points.iter().map(|p| p.1).collect(),
        )
    }

    pub fn constant(c: f64) -> Self {
        Self { breakpoints: vec![0.0, 1.0], values: vec![c, c] }
    }

    /// The sawtooth well `V_s`: linear descent from 0 to -1 on `[0, s]`,
    /// linear ascent back to 0 on `[s, 1]`.
    pub fn sawtooth(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Domain(format!("sawtooth parameter s = {s} not in (0, 1)")));
        }
        Self::new(vec![0.0, s, 1.0], vec![0.0, -1.0, 0.0])
    }

    /// A 0/-1 multiwell: `V(a_i) = 0`, `V(c_i) = -1`, linear in between, with
    /// `a_1 = 0 < c_1 < a_2 < ... < c_{m-1} < a_m = 1`.
    pub fn multiwell(tops: &[f64], bottoms: &[f64]) -> Result<Self> {
        if tops.len() < 2 || bottoms.len() + 1 != tops.len() {
            return Err(Error::Domain("multiwell needs m tops and m-1 bottoms, m >= 2".into()));
        }
        let mut xs = Vec::with_capacity(tops.len() + bottoms.len());
        let mut vs = Vec::with_capacity(xs.capacity());
        for (i, &a) in tops.iter().enumerate() {
            xs.push(a);
            vs.push(0.0);
            if let Some(&c) = bottoms.get(i) {
                xs.push(c);
                vs.push(-1.0);
            }
        }
        Self::new(xs, vs)
    }

    /// The two-well potential with one shallow well of depth 2/5 and one deep
    /// well that has the same monotone-piece distributions as `V_{1/2}`.
    pub fn vhat2() -> Self {
        Self::from_points(&[
            (0.0, 0.0),
            (1.0 / 6.0, -0.4),
            (1.0 / 3.0, 0.0),
            (11.0 / 30.0, -0.4),
            (2.0 / 3.0, -1.0),
            (29.0 / 30.0, -0.4),
            (1.0, 0.0),
        ])
        .expect("valid preset")
    }

    /// A three-top multiwell whose decreasing pieces have total length 0.4.
    pub fn vhat3() -> Self {
        Self::multiwell(&[0.0, 0.3, 1.0], &[0.1, 0.6]).expect("valid preset")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.breakpoints.windows(2).zip(self.values.windows(2)).map(|(x, v)| Segment {
            x0: x[0],
            x1: x[1],
            v0: v[0],
            v1: v[1],
        })
    }

    /// Value of the 1-periodic extension at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let y = x - x.floor();
        let j = match self.breakpoints.binary_search_by(|b| b.total_cmp(&y)) {
            Ok(j) => return self.values[j],
            Err(j) => j,
        };
        let (x0, x1) = (self.breakpoints[j - 1], self.breakpoints[j]);
        let (v0, v1) = (self.values[j - 1], self.values[j]);
        v0 + (y - x0) / (x1 - x0) * (v1 - v0)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.segments().map(|s| 0.5 * s.len() * (s.v0 + s.v1)).sum()
    }

    pub fn mean_square(&self) -> f64 {
        self.segments()
            .map(|s| s.len() * (s.v0 * s.v0 + s.v0 * s.v1 + s.v1 * s.v1) / 3.0)
            .sum()
    }

    /// `x -> V(m x)`, i.e. `m` compressed copies on the unit interval.
    pub fn repeated(&self, m: usize) -> Self {
        assert!(m >= 1);
        let mut xs = vec![0.0];
        let mut vs = vec![self.values[0]];
        for copy in 0..m {
            for j in 1..self.breakpoints.len() {
                xs.push((copy as f64 + self.breakpoints[j]) / m as f64);
                vs.push(self.values[j]);
            }
        }
        let last = xs.len() - 1;
        xs[last] = 1.0;
        Self { breakpoints: xs, values: vs }
    }

    /// `x -> V(x + delta)`.
    pub fn shifted(&self, delta: f64) -> Self {
        let d = delta - delta.floor();
        let mut pts: Vec<(f64, f64)> = self.breakpoints[..self.breakpoints.len() - 1]
            .iter()
            .zip(&self.values)
            .map(|(&b, &v)| {
                let y = b - d;
                (if y < 0.0 { y + 1.0 } else { y }, v)
            })
            .filter(|p| p.0 > 1e-14 && p.0 < 1.0 - 1e-14)
            .collect();
        let v0 = self.eval(d);
        pts.push((0.0, v0));
        pts.push((1.0, v0));
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            breakpoints: pts.iter().map(|p| p.0).collect(),
            values: pts.iter().map(|p| p.1).collect(),
        }
    }

    /// `x -> V(-x)`.
    pub fn reflected(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.iter().rev().map(|b| 1.0 - b).collect(),
            values: self.values.iter().rev().copied().collect(),
        }
    }

    /// Exact distribution function `t -> |{x : V(x) <= t}|`.
    pub fn cdf(&self) -> DistributionFunction {
        DistributionFunction::from_segments(&self.segments().collect::<Vec<_>>())
    }

    fn check_oscillating(&self) -> Result<()> {
        if (self.max()).abs() > VALUE_TOL || (self.min() + 1.0).abs() > VALUE_TOL {
            return Err(Error::Shape(format!(
                "potential must oscillate between 0 and -1 (max {}, min {})",
                self.max(),
                self.min()
            )));
        }
        if self.segments().any(|s| s.v0 == s.v1) {
            return Err(Error::Shape("flat segment: pieces must be strictly monotone".into()));
        }
        Ok(())
    }

    /// Distribution functions restricted to the decreasing and to the
    /// increasing pieces of `V`.
    pub fn monotone_piece_cdfs(&self) -> Result<(DistributionFunction, DistributionFunction)> {
        self.check_oscillating()?;
        let dec = DistributionFunction::from_segments(&self.segments().filter(|s| s.v1 < s.v0).collect::<Vec<_>>());
        let inc = DistributionFunction::from_segments(&self.segments().filter(|s| s.v1 > s.v0).collect::<Vec<_>>());
        Ok((dec, inc))
    }

    /// Total lengths of the decreasing and of the increasing pieces.
    pub fn balance_totals(&self) -> Result<(f64, f64)> {
        self.check_oscillating()?;
        let dec = self.segments().filter(|s| s.v1 < s.v0).map(|s| s.len()).sum();
        let inc = self.segments().filter(|s| s.v1 > s.v0).map(|s| s.len()).sum();
        Ok((dec, inc))
    }

    /// Exact Fourier coefficients `λ_k = ∫ V(x) e^{-2πikx} dx` for
    /// `|k| <= max_mode`, from closed-form segment integrals.
    pub fn fourier_coefficients(&self, max_mode: usize) -> Result<FourierPotential> {
        if max_mode < 1 {
            return Err(Error::Domain("need at least one Fourier mode".into()));
        }
        let mut coeffs = BTreeMap::new();
        coeffs.insert(vec![0], Complex64::new(self.mean(), 0.0));
        for k in 1..=max_mode as i64 {
            let omega = 2.0 * PI * k as f64;
            let mut c = Complex64::new(0.0, 0.0);
            for s in self.segments() {
                // ∫ (α + βx) e^{-iωx} dx = [(α+βx) e^{-iωx} i/ω + β e^{-iωx}/ω²]
                let beta = s.slope();
                let term = |x: f64, v: f64| {
                    let e = Complex64::from_polar(1.0, -omega * x);
                    e * Complex64::new(0.0, v / omega) + e * (beta / (omega * omega))
                };
                c += term(s.x1, s.v1) - term(s.x0, s.v0);
            }
            coeffs.insert(vec![k], c);
            coeffs.insert(vec![-k], c.conj());
        }
        FourierPotential::new(1, coeffs)
    }
}

/// A real-valued potential on the `n`-torus given by finitely many Fourier
/// modes, `V(x) = Σ λ_k e^{2πi k·x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierPotential {
    dim: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

impl FourierPotential {
    /// Validates dimensions and Hermitian symmetry `λ_{-k} = conj(λ_k)`.
    pub fn new(dim: usize, coeffs: BTreeMap<Vec<i64>, Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        for (k, c) in &coeffs {
            if k.len() != dim {
                return Err(Error::Domain(format!("mode {k:?} has wrong dimension")));
            }
            let minus: Vec<i64> = k.iter().map(|x| -x).collect();
            let partner = coeffs.get(&minus).copied().unwrap_or_default();
            if (partner - c.conj()).norm() > 1e-12 * (1.0 + c.norm()) {
                return Err(Error::Domain(format!(
                    "coefficients not Hermitian at k = {k:?}: real potentials need λ(-k) = conj(λ(k))"
                )));
            }
        }
        Ok(Self { dim, coeffs })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, coeffs: BTreeMap::new() }
    }

    /// `amplitude * cos(2π k·x)`.
    pub fn cosine(k: &[i64], amplitude: f64) -> Self {
        let mut coeffs = BTreeMap::new();
        let minus: Vec<i64> = k.iter().map(|x| -x).collect();
        if k.iter().all(|&x| x == 0) {
            coeffs.insert(k.to_vec(), Complex64::new(amplitude, 0.0));
        } else {
            coeffs.insert(k.to_vec(), Complex64::new(0.5 * amplitude, 0.0));
            coeffs.insert(minus, Complex64::new(0.5 * amplitude, 0.0));
        }
        Self { dim: k.len(), coeffs }
    }

    /// `amplitude * sin(2π k·x)`.
    pub fn sine(k: &[i64], amplitude: f64) -> Self {
        let mut coeffs = BTreeMap::new();
        let minus: Vec<i64> = k.iter().map(|x| -x).collect();
        if k.iter().any(|&x| x != 0) {
            coeffs.insert(k.to_vec(), Complex64::new(0.0, -0.5 * amplitude));
            coeffs.insert(minus, Complex64::new(0.0, 0.5 * amplitude));
        }
        Self { dim: k.len(), coeffs }
    }

    /// The 1D Mathieu-type potential `-cos(2πx)`.
    pub fn mathieu() -> Self {
        Self::cosine(&[1], -1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<i64>, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Largest `|k|_∞` carried by the spectrum.
    pub fn max_mode(&self) -> i64 {
        self.coeffs.keys().flat_map(|k| k.iter().map(|x| x.abs())).max().unwrap_or(0)
    }

    pub fn mean(&self) -> f64 {
        self.coeff(&vec![0; self.dim]).re
    }

    /// `∫ |V|²` via Parseval.
    pub fn mean_square(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let phase: f64 = k.iter().zip(x).map(|(&ki, &xi)| ki as f64 * xi).sum();
                (c * Complex64::from_polar(1.0, 2.0 * PI * phase)).re
            })
            .sum()
    }

    pub fn eval1(&self, x: f64) -> f64 {
        self.eval(&[x])
    }

    /// `DV(x)` summed term by term.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        let mut g = vec![0.0; self.dim];
        for (k, c) in &self.coeffs {
            let phase: f64 = k.iter().zip(x).map(|(&ki, &xi)| ki as f64 * xi).sum();
            let term = c * Complex64::new(0.0, 2.0 * PI) * Complex64::from_polar(1.0, 2.0 * PI * phase);
            for (gj, &kj) in g.iter_mut().zip(k) {
                *gj += kj as f64 * term.re;
            }
        }
        g
    }

    /// Drops all modes with `|k|_∞ > max_mode`.
    pub fn truncated(&self, max_mode: i64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| k.iter().all(|x| x.abs() <= max_mode))
                .map(|(k, c)| (k.clone(), *c))
                .collect(),
        }
    }

    /// `x -> V(x + delta)`.
    pub fn shifted(&self, delta: &[f64]) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, c)| {
                let phase: f64 = k.iter().zip(delta).map(|(&ki, &d)| ki as f64 * d).sum();
                (k.clone(), c * Complex64::from_polar(1.0, 2.0 * PI * phase))
            })
            .collect();
        Self { dim: self.dim, coeffs }
    }

    /// `x -> V(-x)`.
    pub fn reflected(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, c)| (k.iter().map(|x| -x).collect(), *c)).collect();
        Self { dim: self.dim, coeffs }
    }

    /// `x -> V(m x)`.
    pub fn repeated(&self, m: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, c)| (k.iter().map(|x| m * x).collect(), *c)).collect();
        Self { dim: self.dim, coeffs }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, c)| (k.clone(), c * factor)).collect();
        Self { dim: self.dim, coeffs }
    }

    /// Distribution function sampled at `resolution` midpoints of a uniform
    /// grid (1D only). The sup-norm error against the exact distribution is
    /// `O(1/resolution)` for smooth potentials.
    pub fn sampled_cdf(&self, resolution: usize) -> DistributionFunction {
        assert_eq!(self.dim, 1, "sampled CDF is defined for 1D potentials");
        let n = resolution.max(2);
        let mut samples: Vec<f64> = (0..n).map(|i| self.eval1((i as f64 + 0.5) / n as f64)).collect();
        samples.sort_by(|a, b| a.total_cmp(b));
        DistributionFunction::from_sorted_samples(&samples)
    }

    /// Location and value of the maximum of a 1D potential.
    pub fn argmax1(&self) -> (f64, f64) {
        assert_eq!(self.dim, 1);
        let n = 4096;
        let (mut best_x, mut best) = (0.0, f64::NEG_INFINITY);
        for i in 0..n {
            let x = i as f64 / n as f64;
            let v = self.eval1(x);
            if v > best {
                best = v;
                best_x = x;
            }
        }
        // golden-section refinement on the bracketing cell
        let h = 1.0 / n as f64;
        let (mut a, mut b) = (best_x - h, best_x + h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if self.eval1(c) > self.eval1(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let x = 0.5 * (a + b);
        let v = self.eval1(x);
        if v >= best {
            (x - x.floor(), v)
        } else {
            (best_x, best)
        }
    }

    /// Minimum and maximum over a uniform grid with `resolution` nodes per
    /// axis, for any dimension.
    pub fn sampled_range(&self, resolution: usize) -> (f64, f64) {
        let total = resolution.pow(self.dim as u32);
        let mut x = vec![0.0; self.dim];
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for idx in 0..total {
            let mut rest = idx;
            for xi in x.iter_mut() {
                *xi = (rest % resolution) as f64 / resolution as f64;
                rest /= resolution;
            }
            let v = self.eval(&x);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    pub fn max1(&self) -> f64 {
        self.argmax1().1
    }

    pub fn min1(&self) -> f64 {
        -self.scaled(-1.0).max1()
    }
}

/// A 1-periodic potential in one dimension, in either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Piecewise(PiecewiseLinearPotential),
    Fourier(FourierPotential),
}

impl From<PiecewiseLinearPotential> for Potential {
    fn from(v: PiecewiseLinearPotential) -> Self {
        Potential::Piecewise(v)
    }
}

impl From<FourierPotential> for Potential {
    fn from(v: FourierPotential) -> Self {
        Potential::Fourier(v)
    }
}

impl Potential {
    pub fn as_piecewise(&self) -> Option<&PiecewiseLinearPotential> {
        match self {
            Potential::Piecewise(v) => Some(v),
            Potential::Fourier(_) => None,
        }
    }

    pub fn zero() -> Self {
        PiecewiseLinearPotential::constant(0.0).into()
    }

    /// Value of the periodic extension at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::Piecewise(v) => v.eval(x),
            Potential::Fourier(v) => v.eval1(x),
        }
    }

    pub fn max(&self) -> f64 {
        match self {
            Potential::Piecewise(v) => v.max(),
            Potential::Fourier(v) => v.max1(),
        }
    }

    pub fn min(&self) -> f64 {
        match self {
            Potential::Piecewise(v) => v.min(),
            Potential::Fourier(v) => v.min1(),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Potential::Piecewise(v) => v.mean(),
            Potential::Fourier(v) => v.mean(),
        }
    }

    pub fn mean_square(&self) -> f64 {
        match self {
            Potential::Piecewise(v) => v.mean_square(),
            Potential::Fourier(v) => v.mean_square(),
        }
    }

    /// A point where the maximum is attained.
    pub fn argmax(&self) -> f64 {
        match self {
            Potential::Piecewise(v) => {
                let m = v.max();
                v.breakpoints()[v.values().iter().position(|&x| x == m).unwrap_or(0)]
            }
            Potential::Fourier(v) => v.argmax1().0,
        }
    }

    /// Distribution function: exact for piecewise-linear potentials, sampled
    /// at `resolution` points for Fourier potentials.
    pub fn cdf(&self, resolution: usize) -> DistributionFunction {
        match self {
            Potential::Piecewise(v) => v.cdf(),
            Potential::Fourier(v) => v.sampled_cdf(resolution),
        }
    }

    pub fn shifted(&self, delta: f64) -> Self {
        match self {
            Potential::Piecewise(v) => v.shifted(delta).into(),
            Potential::Fourier(v) => v.shifted(&[delta]).into(),
        }
    }

    pub fn reflected(&self) -> Self {
        match self {
            Potential::Piecewise(v) => v.reflected().into(),
            Potential::Fourier(v) => v.reflected().into(),
        }
    }

    pub fn repeated(&self, m: usize) -> Self {
        match self {
            Potential::Piecewise(v) => v.repeated(m).into(),
            Potential::Fourier(v) => v.repeated(m as i64).into(),
        }
    }

    /// `V / factor`, used by the diffusion rescaling.
    pub fn divided(&self, factor: f64) -> Self {
        match self {
            Potential::Piecewise(v) => Potential::Piecewise(PiecewiseLinearPotential {
                breakpoints: v.breakpoints.clone(),
                values: v.values.iter().map(|x| x / factor).collect(),
            }),
            Potential::Fourier(v) => v.scaled(1.0 / factor).into(),
        }
    }

    /// Interior points where the potential is not smooth; quadrature splits
    /// there.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Potential::Piecewise(v) => v.breakpoints().to_vec(),
            Potential::Fourier(_) => vec![0.0, 1.0],
        }
    }
}

/// Value of the periodic extension of `v` at `x`.
pub fn eval_periodic(v: &Potential, x: f64) -> f64 {
    v.eval(x)
}

/// A (possibly partial) distribution function stored as knots with linear
/// interpolation in between. Repeated abscissae encode jumps; the function is
/// right-continuous. Below the first knot it is 0, above the last knot it
/// equals the last knot's mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFunction {
    knots: Vec<(f64, f64)>,
}

impl DistributionFunction {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Domain("distribution needs at least one knot".into()));
        }
        for w in knots.windows(2) {
            if w[1].0 < w[0].0 || w[1].1 < w[0].1 - 1e-15 {
                return Err(Error::Domain("knots must be nondecreasing in t and F".into()));
            }
        }
        Ok(Self { knots })
    }

    fn from_segments(segments: &[Segment]) -> Self {
        let mut levels: Vec<f64> = segments.iter().flat_map(|s| [s.v0, s.v1]).collect();
        levels.sort_by(|a, b| a.total_cmp(b));
        levels.dedup();
        if levels.is_empty() {
            return Self { knots: vec![(0.0, 0.0)] };
        }
        let mut knots = Vec::with_capacity(levels.len() + 2);
        for &t in &levels {
            let mut right = 0.0;
            let mut jump = 0.0;
            for s in segments {
                right += s.sublevel_measure(t);
                if s.v0 == s.v1 && s.v0 == t {
                    jump += s.len();
                }
            }
            let left = right - jump;
            if jump > 0.0 || knots.is_empty() {
                knots.push((t, left));
            }
            knots.push((t, right));
        }
        Self { knots }
    }

    fn from_sorted_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mut knots = Vec::with_capacity(2 * samples.len());
        let mut i = 0;
        while i < samples.len() {
            let t = samples[i];
            let mut j = i;
            while j < samples.len() && samples[j] == t {
                j += 1;
            }
            knots.push((t, i as f64 / n));
            knots.push((t, j as f64 / n));
            i = j;
        }
        Self { knots }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Total mass (value above the last knot).
    pub fn total_mass(&self) -> f64 {
        self.knots[self.knots.len() - 1].1
    }

    /// `F(t)` (right-continuous).
    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t < k[0].0 {
            return 0.0;
        }
        // last index with t_j <= t
        let j = k.partition_point(|p| p.0 <= t) - 1;
        if j + 1 >= k.len() {
            return k[j].1;
        }
        let (t0, f0) = k[j];
        let (t1, f1) = k[j + 1];
        f0 + (t - t0) / (t1 - t0) * (f1 - f0)
    }

    /// Left limit `F(t-)`.
    pub fn eval_left(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t <= k[0].0 {
            return 0.0;
        }
        // last index with t_j < t
        let j = k.partition_point(|p| p.0 < t) - 1;
        if j + 1 >= k.len() {
            return k[j].1;
        }
        let (t0, f0) = k[j];
        let (t1, f1) = k[j + 1];
        f0 + (t - t0) / (t1 - t0) * (f1 - f0)
    }

    /// Pointwise sum of two (partial) distribution functions.
    pub fn sum(&self, other: &Self) -> Self {
        let mut ts: Vec<f64> = self.knots.iter().chain(&other.knots).map(|p| p.0).collect();
        ts.sort_by(|a, b| a.total_cmp(b));
        ts.dedup();
        let mut knots = Vec::new();
        for t in ts {
            let left = self.eval_left(t) + other.eval_left(t);
            let right = self.eval(t) + other.eval(t);
            if left != right || knots.is_empty() {
                knots.push((t, left));
            }
            knots.push((t, right));
        }
        Self { knots }
    }
}

/// Sup-norm distance between two distribution functions, evaluated over the
/// merged knot set (including left limits at jumps).
pub fn cdf_distance(f1: &DistributionFunction, f2: &DistributionFunction) -> f64 {
    f1.knots
        .iter()
        .chain(&f2.knots)
        .map(|&(t, _)| {
            let right = (f1.eval(t) - f2.eval(t)).abs();
            let left = (f1.eval_left(t) - f2.eval_left(t)).abs();
            right.max(left)
        })
        .fold(0.0, f64::max)
}

/// JSON potential descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PotentialDescriptor {
    Sawtooth { s: f64 },
    Piecewise { points: Vec<[f64; 2]> },
    /// Each entry is `[k_1, ..., k_n, re, im]`.
    Fourier { coeffs: Vec<Vec<f64>> },
    Preset { name: String },
}

impl PotentialDescriptor {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Descriptor(e.to_string()))
    }

    /// Builds a 1D potential.
    pub fn build(&self) -> Result<Potential> {
        match self {
            PotentialDescriptor::Sawtooth { s } => Ok(PiecewiseLinearPotential::sawtooth(*s)?.into()),
            PotentialDescriptor::Piecewise { points } => {
                let pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
                Ok(PiecewiseLinearPotential::from_points(&pts)?.into())
            }
            PotentialDescriptor::Fourier { .. } => {
                let f = self.build_fourier()?;
                if f.dim() != 1 {
                    return Err(Error::Descriptor(format!(
                        "expected a 1D potential, got dimension {}",
                        f.dim()
                    )));
                }
                Ok(f.into())
            }
            PotentialDescriptor::Preset { name } => match name.as_str() {
                "vhat2" => Ok(PiecewiseLinearPotential::vhat2().into()),
                "vhat3" => Ok(PiecewiseLinearPotential::vhat3().into()),
                "mathieu" => Ok(FourierPotential::mathieu().into()),
                "zero" => Ok(Potential::zero()),
                other => Err(Error::Descriptor(format!("unknown preset '{other}'"))),
            },
        }
    }

    /// Builds an `n`-dimensional Fourier potential (Fourier descriptors only,
    /// plus the `mathieu` preset).
    pub fn build_fourier(&self) -> Result<FourierPotential> {
        match self {
            PotentialDescriptor::Fourier { coeffs } => {
                let dim = coeffs
                    .first()
                    .map(|c| c.len().saturating_sub(2))
                    .ok_or_else(|| Error::Descriptor("empty coefficient list".into()))?;
                if dim == 0 {
                    return Err(Error::Descriptor("coefficient entries need [k.., re, im]".into()));
                }
                let mut map = BTreeMap::new();
                for c in coeffs {
                    if c.len() != dim + 2 {
                        return Err(Error::Descriptor("inconsistent coefficient arity".into()));
                    }
                    let k: Vec<i64> = c[..dim].iter().map(|x| x.round() as i64).collect();
                    *map.entry(k).or_insert(Complex64::default()) += Complex64::new(c[dim], c[dim + 1]);
                }
                FourierPotential::new(dim, map)
            }
            PotentialDescriptor::Preset { name } if name == "mathieu" => Ok(FourierPotential::mathieu()),
            _ => Err(Error::Descriptor("not a Fourier descriptor".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let v = PiecewiseLinearPotential::sawtooth(0.5).unwrap();
        assert_eq!(v.eval(0.25), -0.5);
        assert_eq!(v.eval(1.25), -0.5);
        let f = FourierPotential::mathieu();
        assert!((f.eval1(0.0) + 1.0).abs() < 1e-15);
        assert_eq!(eval_periodic(&Potential::Fourier(f), 0.0), -1.0);
    }

    #[test]
    fn sawtooth_examples() {
        let v = PiecewiseLinearPotential::sawtooth(0.5).unwrap();
        assert_eq!(v.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(v.values(), &[0.0, -1.0, 0.0]);
        let v = PiecewiseLinearPotential::sawtooth(0.2).unwrap();
        assert_eq!(v.eval(0.2), -1.0);
        assert!((v.eval(0.1) + 0.5).abs() < 1e-15);
        let v = PiecewiseLinearPotential::sawtooth(0.7).unwrap();
        assert!((v.eval(0.85) + 0.5).abs() < 1e-15);
        for s in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(PiecewiseLinearPotential::sawtooth(s), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn invalid_breakpoints_rejected() {
        assert!(PiecewiseLinearPotential::new(vec![0.0, 0.5, 0.5, 1.0], vec![0.0; 4]).is_err());
        assert!(PiecewiseLinearPotential::new(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(PiecewiseLinearPotential::new(vec![0.1, 1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn constant_cdf_is_a_step() {
        let f = PiecewiseLinearPotential::constant(0.0).cdf();
        assert_eq!(f.eval(-1e-9), 0.0);
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(3.0), 1.0);
        assert_eq!(cdf_distance(&f, &f), 0.0);
    }

    #[test]
    fn sawtooth_cdf_is_uniform() {
        for s in [0.1, 0.3, 0.5, 0.77] {
            let f = PiecewiseLinearPotential::sawtooth(s).unwrap().cdf();
            for i in 0..=20 {
                let t = -1.0 + i as f64 / 20.0;
                assert!((f.eval(t) - (1.0 + t)).abs() < 1e-15, "s={s} t={t}");
            }
        }
    }

    #[test]
    fn cdf_distance_examples() {
        let f2 = PiecewiseLinearPotential::sawtooth(0.2).unwrap().cdf();
        let f8 = PiecewiseLinearPotential::sawtooth(0.8).unwrap().cdf();
        assert_eq!(cdf_distance(&f2, &f8), 0.0);
        let f5 = PiecewiseLinearPotential::sawtooth(0.5).unwrap().cdf();
        let f0 = PiecewiseLinearPotential::constant(0.0).cdf();
        assert!((cdf_distance(&f5, &f0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn multiwell_with_one_well_matches_sawtooth_cdf() {
        let v = PiecewiseLinearPotential::multiwell(&[0.0, 1.0], &[0.3]).unwrap();
        let w = PiecewiseLinearPotential::sawtooth(0.3).unwrap();
        assert_eq!(cdf_distance(&v.cdf(), &w.cdf()), 0.0);
        assert_eq!(v.balance_totals().unwrap(), (0.3, 0.7));
    }

    #[test]
    fn balance_totals_examples() {
        let (d, i) = PiecewiseLinearPotential::sawtooth(0.35).unwrap().balance_totals().unwrap();
        assert!((d - 0.35).abs() < 1e-15 && (i - 0.65).abs() < 1e-15);
        let (d, i) = PiecewiseLinearPotential::vhat2().balance_totals().unwrap();
        // 1/6 + 1/30 + 3/10 on each side
        assert!((d - 0.5).abs() < 1e-15 && (i - 0.5).abs() < 1e-15);
    }

    #[test]
    fn shape_errors() {
        let flat = PiecewiseLinearPotential::from_points(&[(0.0, 0.0), (0.2, -1.0), (0.4, -1.0), (1.0, 0.0)])
            .unwrap();
        assert!(matches!(flat.monotone_piece_cdfs(), Err(Error::Shape(_))));
        let shallow = PiecewiseLinearPotential::from_points(&[(0.0, 0.0), (0.5, -0.5), (1.0, 0.0)]).unwrap();
        assert!(matches!(shallow.balance_totals(), Err(Error::Shape(_))));
    }

    #[test]
    fn vhat2_monotone_pieces_match_half_sawtooth() {
        let (d2, i2) = PiecewiseLinearPotential::vhat2().monotone_piece_cdfs().unwrap();
        let (dh, ih) = PiecewiseLinearPotential::sawtooth(0.5).unwrap().monotone_piece_cdfs().unwrap();
        assert!(cdf_distance(&d2, &dh) < 1e-15);
        assert!(cdf_distance(&i2, &ih) < 1e-15);
        assert!((d2.total_mass() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn transforms_preserve_distribution() {
        let v = PiecewiseLinearPotential::vhat2();
        for w in [v.repeated(3), v.shifted(0.37), v.reflected()] {
            assert!(cdf_distance(&v.cdf(), &w.cdf()) < 1e-14);
            for i in 0..50 {
                let x = i as f64 / 50.0 + 0.003;
                let _ = w.eval(x);
            }
        }
        let s = v.shifted(0.37);
        for i in 0..100 {
            let x = i as f64 / 100.0;
            assert!((s.eval(x) - v.eval(x + 0.37)).abs() < 1e-14);
            assert!((v.reflected().eval(x) - v.eval(-x)).abs() < 1e-14);
            assert!((v.repeated(2).eval(x) - v.eval(2.0 * x)).abs() < 1e-14);
        }
    }

    #[test]
    fn fourier_hermitian_check() {
        let mut m = BTreeMap::new();
        m.insert(vec![1], Complex64::new(0.5, 0.1));
        m.insert(vec![-1], Complex64::new(0.5, 0.1));
        assert!(FourierPotential::new(1, m).is_err());
    }

    #[test]
    fn zero_potential_has_zero_coefficients() {
        let f = PiecewiseLinearPotential::constant(0.0).fourier_coefficients(8).unwrap();
        assert!(f.coeffs().values().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn sine_and_cosine_modes() {
        let s = FourierPotential::sine(&[0, 1], -1.0);
        let x = [0.1, 0.3];
        assert!((s.eval(&x) + (2.0 * PI * 0.3).sin()).abs() < 1e-15);
        let c = FourierPotential::cosine(&[1, 0], 1.0);
        assert!((c.eval(&x) - (2.0 * PI * 0.1).cos()).abs() < 1e-15);
        assert_eq!(c.mean(), 0.0);
        assert!((c.mean_square() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fourier_argmax_and_min() {
        let v = FourierPotential::mathieu();
        let (x, m) = v.argmax1();
        assert!((m - 1.0).abs() < 1e-14);
        assert!((x - 0.5).abs() < 1e-7);
        assert!((v.min1() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn descriptors_parse() {
        let d = PotentialDescriptor::parse(r#"{"type":"sawtooth","s":0.5}"#).unwrap();
        assert_eq!(d.build().unwrap(), PiecewiseLinearPotential::sawtooth(0.5).unwrap().into());
        let d = PotentialDescriptor::parse(r#"{"type":"piecewise","points":[[0,0],[0.3,-1],[1,0]]}"#).unwrap();
        assert_eq!(d.build().unwrap(), PiecewiseLinearPotential::sawtooth(0.3).unwrap().into());
        let d = PotentialDescriptor::parse(r#"{"type":"fourier","coeffs":[[1,-0.5,0],[-1,-0.5,0]]}"#).unwrap();
        assert_eq!(d.build().unwrap(), FourierPotential::mathieu().into());
        let d = PotentialDescriptor::parse(r#"{"type":"preset","name":"vhat2"}"#).unwrap();
        let v = d.build().unwrap();
        assert_eq!(v.eval(1.0 / 6.0), -0.4);
        assert!(PotentialDescriptor::parse(r#"{"type":"preset","name":"nope"}"#).unwrap().build().is_err());
        assert!(PotentialDescriptor::parse(r#"{"type":"blob"}"#).is_err());
        let d = PotentialDescriptor::parse(r#"{"type":"fourier","coeffs":[[0,1,0,0.5],[0,-1,0,-0.5]]}"#).unwrap();
        assert_eq!(d.build_fourier().unwrap().dim(), 2);
        assert!(d.build().is_err());
    }
}
