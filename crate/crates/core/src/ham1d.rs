//! One-dimensional Hamiltonian profiles with invertible monotone branches.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::bisect;

const INVERSE_TOL: f64 = 1e-12;

/// A Hamiltonian `p -> H(p)` in one dimension, as consumed by the
/// time-marching solver.
pub trait Hamiltonian1d: Send + Sync {
    fn value(&self, p: f64) -> f64;

    /// `H'(p)`; central difference unless overridden.
    fn derivative(&self, p: f64) -> f64 {
        let h = 1e-6 * (1.0 + p.abs());
        (self.value(p + h) - self.value(p - h)) / (2.0 * h)
    }

    /// Upper bound of `|H'|` on `[lo, hi]`, by sampling.
    fn slope_bound(&self, lo: f64, hi: f64) -> f64 {
        let n = 2000;
        (0..=n)
            .map(|i| {
                let p = lo + (hi - lo) * i as f64 / n as f64;
                self.derivative(p).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `sup |H'|` over `[lo, hi]`, nondecreasing as the interval grows.
    /// Sampled unless overridden.
    fn slope_sup(&self, lo: f64, hi: f64) -> f64 {
        let n = 16;
        (0..=n)
            .map(|i| self.derivative(lo + (hi - lo) * i as f64 / n as f64).abs())
            .fold(0.0, f64::max)
    }
}

/// Range `[m, M]` of `|p|` over `p ∈ [lo, hi]`.
fn magnitude_range(lo: f64, hi: f64) -> (f64, f64) {
    let m = if lo <= 0.0 && hi >= 0.0 { 0.0 } else { lo.abs().min(hi.abs()) };
    (m, lo.abs().max(hi.abs()))
}

/// Which monotone branch of a quasi-convex profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Clone)]
enum Kind {
    Quadratic,
    Abs,
    Power { gamma: f64, offset: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Quadratic => write!(f, "Quadratic"),
            Kind::Abs => write!(f, "Abs"),
            Kind::Power { gamma, offset } => write!(f, "Power(gamma={gamma}, c={offset})"),
            Kind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A quasi-convex profile: nonincreasing left of `argmin`, nondecreasing
/// right of it, coercive.
#[derive(Debug, Clone)]
pub struct QuasiConvexProfile {
    kind: Kind,
    argmin: f64,
    minval: f64,
}

impl QuasiConvexProfile {
    /// `H(p) = p²/2`.
    pub fn quadratic() -> Self {
        Self { kind: Kind::Quadratic, argmin: 0.0, minval: 0.0 }
    }

    /// `H(p) = |p|`.
    pub fn abs() -> Self {
        Self { kind: Kind::Abs, argmin: 0.0, minval: 0.0 }
    }

    /// `H(p) = (c + |p|)^γ`.
    pub fn power(gamma: f64, c: f64) -> Result<Self> {
        if !(gamma > 0.0) || !(c >= 0.0) {
            return Err(Error::Domain(format!("power profile needs gamma > 0, c >= 0 (got {gamma}, {c})")));
        }
        Ok(Self { kind: Kind::Power { gamma, offset: c }, argmin: 0.0, minval: c.powf(gamma) })
    }

    /// An arbitrary profile given as a closure, with its minimiser. Branch
    /// inverses fall back to bisection with bracket growth.
    pub fn custom<F>(f: F, argmin: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let minval = f(argmin);
        Self { kind: Kind::Custom(Arc::new(f)), argmin, minval }
    }

    pub fn argmin(&self) -> f64 {
        self.argmin
    }

    pub fn minval(&self) -> f64 {
        self.minval
    }

    pub fn eval(&self, p: f64) -> f64 {
        match &self.kind {
            Kind::Quadratic => 0.5 * p * p,
            Kind::Abs => p.abs(),
            Kind::Power { gamma, offset } => (offset + p.abs()).powf(*gamma),
            Kind::Custom(f) => f(p),
        }
    }

    /// `H_±^{-1}(c)`: the point on the chosen branch where `H = c`.
    pub fn branch_inverse(&self, side: Side, c: f64) -> Result<f64> {
        if !(c >= self.minval) {
            return Err(Error::Domain(format!("level {c} below min H = {}", self.minval)));
        }
        let sign = match side {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        };
        match &self.kind {
            Kind::Quadratic => Ok(sign * (2.0 * c).sqrt()),
            Kind::Abs => Ok(sign * c),
            Kind::Power { gamma, offset } => Ok(sign * (c.powf(1.0 / gamma) - offset).max(0.0)),
            Kind::Custom(f) => {
                let a = self.argmin;
                if c == self.minval {
                    return Ok(a);
                }
                let mut step = 1.0;
                let mut far = a + sign * step;
                let mut grown = 0;
                while f(far) < c {
                    step *= 2.0;
                    far = a + sign * step;
                    grown += 1;
                    if grown > 200 || !far.is_finite() {
                        return Err(Error::Bracket(format!("profile never reaches level {c}")));
                    }
                }
                let (lo, hi) = if sign > 0.0 { (a, far) } else { (far, a) };
                bisect(|p| f(p) - c, lo, hi, INVERSE_TOL)
            }
        }
    }
}

impl Hamiltonian1d for QuasiConvexProfile {
    fn value(&self, p: f64) -> f64 {
        self.eval(p)
    }

    fn derivative(&self, p: f64) -> f64 {
        match &self.kind {
            Kind::Quadratic => p,
            Kind::Abs => p.signum(),
            Kind::Power { gamma, offset } => gamma * (offset + p.abs()).powf(gamma - 1.0) * p.signum(),
            Kind::Custom(f) => {
                let h = 1e-6 * (1.0 + p.abs());
                (f(p + h) - f(p - h)) / (2.0 * h)
            }
        }
    }

    fn slope_sup(&self, lo: f64, hi: f64) -> f64 {
        let (m, big) = magnitude_range(lo, hi);
        match &self.kind {
            Kind::Quadratic => big,
            Kind::Abs => 1.0,
            Kind::Power { gamma, offset } => {
                let f = |r: f64| gamma * (offset + r).powf(gamma - 1.0);
                f(m).max(f(big))
            }
            Kind::Custom(_) => {
                let n = 16;
                (0..=n)
                    .map(|i| self.derivative(lo + (hi - lo) * i as f64 / n as f64).abs())
                    .fold(0.0, f64::max)
            }
        }
    }
}

/// The nonconvex radial profile `p -> F(|p|)` where `F` is piecewise linear
/// through `(0, 0)`, `(θ₂, 1/2)`, `(θ₁, 1/3)` and has slope 1 beyond `θ₁`.
/// Its value at `θ₃ = 2θ₂/3` is again `1/3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonconvexProfile {
    theta1: f64,
    theta2: f64,
    theta3: f64,
}

impl NonconvexProfile {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        if !(theta2 > 0.0 && theta1 > theta2) {
            return Err(Error::Domain(format!(
                "need theta1 > theta2 > 0 (got theta1 = {theta1}, theta2 = {theta2})"
            )));
        }
        Ok(Self { theta1, theta2, theta3: 2.0 * theta2 / 3.0 })
    }

    /// θ₁ = 2, θ₂ = 3/2.
    pub fn standard() -> Self {
        Self::new(2.0, 1.5).expect("valid")
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn theta3(&self) -> f64 {
        self.theta3
    }

    /// `F(r)` for `r >= 0`.
    pub fn radial(&self, r: f64) -> f64 {
        let (t1, t2) = (self.theta1, self.theta2);
        if r <= t2 {
            r / (2.0 * t2)
        } else if r <= t1 {
            0.5 - (r - t2) / (6.0 * (t1 - t2))
        } else {
            1.0 / 3.0 + (r - t1)
        }
    }

    /// Domain of the branch inverse `ψ_j`.
    pub fn branch_domain(&self, branch: usize) -> Result<(f64, f64)> {
        match branch {
            1 => Ok((1.0 / 3.0, f64::INFINITY)),
            2 => Ok((1.0 / 3.0, 0.5)),
            3 => Ok((0.0, 0.5)),
            j => Err(Error::Domain(format!("branch index {j} not in 1..=3"))),
        }
    }

    /// `ψ_j(y)`: the unique `r` on branch `j` with `F(r) = y`. Branch 1 is
    /// the outer increasing piece, 2 the decreasing piece, 3 the inner
    /// increasing piece.
    pub fn psi(&self, branch: usize, y: f64) -> Result<f64> {
        let (lo, hi) = self.branch_domain(branch)?;
        if !(y >= lo - 1e-15 && y <= hi + 1e-15) {
            return Err(Error::Domain(format!("y = {y} outside domain of psi_{branch}")));
        }
        Ok(self.psi_unchecked(branch, y))
    }

    pub(crate) fn psi_unchecked(&self, branch: usize, y: f64) -> f64 {
        let (t1, t2) = (self.theta1, self.theta2);
        match branch {
            1 => t1 + (y - 1.0 / 3.0),
            2 => t2 + (0.5 - y) * 6.0 * (t1 - t2),
            _ => 2.0 * t2 * y,
        }
    }

    /// `∫_a^b ψ_j(y) dy`, exact (every branch inverse is affine).
    pub fn psi_integral(&self, branch: usize, a: f64, b: f64) -> Result<f64> {
        self.psi(branch, a)?;
        self.psi(branch, b)?;
        Ok((b - a) * self.psi_unchecked(branch, 0.5 * (a + b)))
    }
}

impl Hamiltonian1d for NonconvexProfile {
    fn value(&self, p: f64) -> f64 {
        self.radial(p.abs())
    }

    fn derivative(&self, p: f64) -> f64 {
        let r = p.abs();
        let slope = if r < self.theta2 {
            0.5 / self.theta2
        } else if r < self.theta1 {
            -1.0 / (6.0 * (self.theta1 - self.theta2))
        } else {
            1.0
        };
        slope * p.signum()
    }

    fn slope_sup(&self, lo: f64, hi: f64) -> f64 {
        let (m, big) = magnitude_range(lo, hi);
        let mut sup: f64 = 0.0;
        if m <= self.theta2 {
            sup = sup.max(0.5 / self.theta2);
        }
        if m <= self.theta1 && big >= self.theta2 {
            sup = sup.max(1.0 / (6.0 * (self.theta1 - self.theta2)));
        }
        if big >= self.theta1 {
            sup = sup.max(1.0);
        }
        sup
    }
}

/// Builds the default nonconvex profile from θ₁ > θ₂ > 0.
pub fn make_default_f(theta1: f64, theta2: f64) -> Result<NonconvexProfile> {
    NonconvexProfile::new(theta1, theta2)
}

/// A Hamiltonian usable by every solver: either quasi-convex or the
/// nonconvex radial profile.
#[derive(Debug, Clone)]
pub enum Hamiltonian {
    QuasiConvex(QuasiConvexProfile),
    Nonconvex(NonconvexProfile),
}

impl Hamiltonian1d for Hamiltonian {
    fn value(&self, p: f64) -> f64 {
        match self {
            Hamiltonian::QuasiConvex(h) => h.eval(p),
            Hamiltonian::Nonconvex(h) => h.value(p),
        }
    }

    fn derivative(&self, p: f64) -> f64 {
        match self {
            Hamiltonian::QuasiConvex(h) => h.derivative(p),
            Hamiltonian::Nonconvex(h) => h.derivative(p),
        }
    }

    fn slope_sup(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Hamiltonian::QuasiConvex(h) => h.slope_sup(lo, hi),
            Hamiltonian::Nonconvex(h) => h.slope_sup(lo, hi),
        }
    }
}

impl Hamiltonian {
    pub fn min_value(&self) -> f64 {
        match self {
            Hamiltonian::QuasiConvex(h) => h.minval(),
            Hamiltonian::Nonconvex(_) => 0.0,
        }
    }
}

/// JSON Hamiltonian descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum HamiltonianDescriptor {
    #[serde(rename = "quadratic")]
    Quadratic,
    #[serde(rename = "abs")]
    Abs,
    #[serde(rename = "power")]
    Power { gamma: f64, c: f64 },
    #[serde(rename = "nonconvexF")]
    NonconvexF { theta1: f64, theta2: f64 },
}

impl HamiltonianDescriptor {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Descriptor(e.to_string()))
    }

    pub fn build(&self) -> Result<Hamiltonian> {
        Ok(match *self {
            HamiltonianDescriptor::Quadratic => Hamiltonian::QuasiConvex(QuasiConvexProfile::quadratic()),
            HamiltonianDescriptor::Abs => Hamiltonian::QuasiConvex(QuasiConvexProfile::abs()),
            HamiltonianDescriptor::Power { gamma, c } => {
                Hamiltonian::QuasiConvex(QuasiConvexProfile::power(gamma, c)?)
            }
            HamiltonianDescriptor::NonconvexF { theta1, theta2 } => {
                Hamiltonian::Nonconvex(NonconvexProfile::new(theta1, theta2)?)
            }
        })
    }
}
