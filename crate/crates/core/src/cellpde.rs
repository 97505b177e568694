//! Effective Hamiltonians by large-time marching of the cell dynamics
//! `u_t + H(p + Du) + V - d Δu = 0` on a periodic grid, starting from
//! `u ≡ 0`. The decay rate `-(u(T) - u(T-1))` tends to `H̄(p)`.
//!
//! Space is discretised with the local Lax–Friedrichs flux, whose viscosity
//! at each node is the supremum of `|∂H/∂q|` between the one-sided
//! differences; time with explicit Euler under the CFL restriction for the
//! largest admissible viscosity.

use crate::error::{Error, Result};
use crate::ham1d::Hamiltonian1d;
use crate::potential::{FourierPotential, Potential};

/// Gradient margin around `|p|` for the CFL bound.
const GRADIENT_MARGIN: f64 = 3.0;
const DRIFT_TOL: f64 = 1e-3;
const MAX_DOUBLINGS: u32 = 4;
const MAX_RESTARTS: u32 = 8;
const SPEED_BUFFER: f64 = 1.25;

/// Final state of one time-marching run.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub dim: usize,
    pub n: usize,
    pub dt: f64,
    /// Nodal corrector at the final time, with its mean removed.
    pub field: Vec<f64>,
    /// `-(u(T) - u(T-1))` averaged over nodes.
    pub estimate: f64,
    pub t_final: f64,
    /// Whether the window average settled to `1e-3` between `T/2` and `T`.
    pub converged: bool,
}

/// Estimate at `N` with the discrepancy to `2N` as error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericEstimate {
    pub estimate: f64,
    pub error_estimate: f64,
    pub n: usize,
    pub t_final: f64,
}

fn check_grid(n: usize, t: f64) -> Result<()> {
    if n < 16 {
        return Err(Error::Precondition(format!("N = {n} < 16")));
    }
    if !(t >= 10.0) {
        return Err(Error::Precondition(format!("T = {t} < 10")));
    }
    Ok(())
}

/// Drives the unit-time windows. `advance` marches one time unit and returns
/// the mean increment of `u` (removing it from the field), or `None` if the
/// gradients left the range the time step was sized for. The drift
/// tolerance shrinks with `dx²` so time error stays below the grid error.
fn run_windows<F: FnMut() -> Result<Option<f64>>>(t: f64, dx: f64, mut advance: F) -> Result<Option<(f64, f64, bool)>> {
    let mut history = Vec::new();
    let mut target = t.ceil() as usize;
    let cap = target << MAX_DOUBLINGS;
    loop {
        while history.len() < target {
            match advance()? {
                Some(m) => history.push(-m),
                None => return Ok(None),
            }
        }
        let k = history.len();
        let now = history[k - 1];
        let half = history[k / 2 - 1];
        if (now - half).abs() < DRIFT_TOL.min(dx * dx) {
            return Ok(Some((now, k as f64, true)));
        }
        if target >= cap {
            return Ok(Some((now, k as f64, false)));
        }
        target *= 2;
    }
}

fn remove_mean(u: &mut [f64]) -> Result<f64> {
    let m = u.iter().sum::<f64>() / u.len() as f64;
    if !m.is_finite() {
        return Err(Error::Blowup(format!("nonfinite field (mean {m})")));
    }
    u.iter_mut().for_each(|x| *x -= m);
    Ok(m)
}

/// Weights conserved by the scheme linearised about `u`.
///
/// Near a steady state the update is `δ ↦ Lδ` with `L` row-stochastic
/// (monotone and translation invariant), so `Σ m_i δ_i` is invariant when
/// `m L = m`. Averaging window increments with `m` removes the slowly
/// transported transient that dominates the plain mean on fine grids; in
/// the limit every positive weighting gives the same value.
fn stationary_weights<H: Hamiltonian1d + ?Sized>(h: &H, p: f64, d: f64, u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    // transfer rates i -> i+1 and i -> i-1, up to the common factor dt/(2dx)
    let mut right = vec![0.0; n];
    let mut left = vec![0.0; n];
    for i in 0..n {
        let a = (u[i] - u[(i + n - 1) % n]) / dx;
        let b = (u[(i + 1) % n] - u[i]) / dx;
        let alpha = h.slope_sup(p + a.min(b), p + a.max(b));
        let slope = h.derivative(p + 0.5 * (a + b)).clamp(-alpha, alpha);
        let diffusion = 2.0 * d / dx;
        right[i] = alpha - slope + diffusion + 1e-300;
        left[i] = alpha + slope + diffusion + 1e-300;
    }
    // m_0 = 1; rows 1..n-1 of (I - L)ᵀ m = 0 form a tridiagonal system
    let k = n - 1;
    let mut diag = vec![0.0; k];
    let mut lower = vec![0.0; k];
    let mut upper = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    for r in 0..k {
        let i = r + 1;
        diag[r] = right[i] + left[i];
        lower[r] = -right[i - 1];
        upper[r] = -left[(i + 1) % n];
    }
    rhs[0] = right[0];
    rhs[k - 1] += left[0];
    for r in 1..k {
        let f = lower[r] / diag[r - 1];
        diag[r] -= f * upper[r - 1];
        rhs[r] -= f * rhs[r - 1];
    }
    let mut m = vec![1.0; n];
    let mut next = 0.0;
    for r in (0..k).rev() {
        let val = (rhs[r] - if r + 1 < k { upper[r] * next } else { 0.0 }) / diag[r];
        m[r + 1] = val.max(0.0);
        next = val;
    }
    m
}

fn weighted_increment(m: &[f64], start: &[f64], end: &[f64]) -> f64 {
    let total: f64 = m.iter().sum();
    let inc: f64 = m.iter().zip(start.iter().zip(end)).map(|(w, (a, b))| w * (b - a)).sum::<f64>() / total;
    if inc.is_finite() {
        inc
    } else {
        end.iter().zip(start).map(|(b, a)| b - a).sum::<f64>() / end.len() as f64
    }
}

/// One run of the 1D scheme at `n` nodes.
pub fn march_1d<H: Hamiltonian1d + ?Sized>(
    h: &H,
    v: &Potential,
    p: f64,
    d: f64,
    n: usize,
    t: f64,
) -> Result<GridSolution> {
    check_grid(n, t)?;
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::Domain(format!("diffusion d = {d} must be nonnegative")));
    }
    let dx = 1.0 / n as f64;
    let vs: Vec<f64> = (0..n).map(|i| v.eval(i as f64 * dx)).collect();
    let mut margin = GRADIENT_MARGIN;
    for _ in 0..MAX_RESTARTS {
        let r = p.abs() + margin;
        let alpha = h.slope_sup(-r, r).max(1e-12);
        if !alpha.is_finite() {
            return Err(Error::Domain(format!("|H'| unbounded on [{}, {r}]", -r)));
        }
        let steps = |speed: f64| {
            let mut dt_max = dx / (2.0 * speed);
            if d > 0.0 {
                dt_max = dt_max.min(dx * dx / (4.0 * d));
            }
            let sub = (1.0 / dt_max).ceil() as usize;
            (sub, 1.0 / sub as f64)
        };
        let mut u = vec![0.0; n];
        let mut next = vec![0.0; n];
        let mut start = vec![0.0; n];
        let mut observed = alpha;
        let mut last_dt = steps(alpha).1;
        let advance = || -> Result<Option<f64>> {
            start.copy_from_slice(&u);
            // step size from the speeds seen in the previous window, falling
            // back to the global bound if the window exceeds them
            let mut speed = (SPEED_BUFFER * observed).min(alpha);
            'window: loop {
                let (sub, dt) = steps(speed);
                let mut seen: f64 = 0.0;
                for _ in 0..sub {
                    let mut widest: f64 = 0.0;
                    for i in 0..n {
                        let left = u[(i + n - 1) % n];
                        let right = u[(i + 1) % n];
                        let a = (u[i] - left) / dx;
                        let b = (right - u[i]) / dx;
                        let local = h.slope_sup(p + a.min(b), p + a.max(b));
                        widest = widest.max(local);
                        let flux = h.value(p + 0.5 * (a + b)) - 0.5 * local * (b - a);
                        next[i] = u[i] - dt * (flux + vs[i] - d * (b - a) / dx);
                    }
                    if widest > speed {
                        if speed >= alpha {
                            return Ok(None);
                        }
                        u.copy_from_slice(&start);
                        speed = alpha;
                        continue 'window;
                    }
                    seen = seen.max(widest);
                    std::mem::swap(&mut u, &mut next);
                }
                observed = seen.max(1e-12);
                last_dt = dt;
                break;
            }
            let m = stationary_weights(h, p, d, &u, dx);
            let increment = weighted_increment(&m, &start, &u);
            remove_mean(&mut u)?;
            Ok(Some(increment))
        };
        if let Some((estimate, t_final, converged)) = run_windows(t, dx, advance)? {
            return Ok(GridSolution { dim: 1, n, dt: last_dt, field: u, estimate, t_final, converged });
        }
        margin *= 2.0;
    }
    Err(Error::Blowup("gradients keep growing past the CFL range".into()))
}

/// `H̄(p)` for `H(p + u_x) + V - d u_xx`, estimated at `n` nodes with error
/// bar `|est(n) - est(2n)|`.
pub fn effective_h_numeric<H: Hamiltonian1d + ?Sized>(
    h: &H,
    v: &Potential,
    p: f64,
    d: f64,
    n: usize,
    t: f64,
) -> Result<NumericEstimate> {
    let coarse = march_1d(h, v, p, d, n, t)?;
    let fine = march_1d(h, v, p, d, 2 * n, t)?;
    Ok(NumericEstimate {
        estimate: coarse.estimate,
        error_estimate: (coarse.estimate - fine.estimate).abs(),
        n,
        t_final: coarse.t_final,
    })
}

/// A Hamiltonian on the plane.
pub trait Hamiltonian2d: Send + Sync {
    fn value(&self, q: [f64; 2]) -> f64;

    /// Upper bounds of `|∂H/∂q₁|` and `|∂H/∂q₂|` on the box `[lo, hi]`,
    /// nondecreasing as the box grows.
    fn axis_slope_sup(&self, lo: [f64; 2], hi: [f64; 2]) -> [f64; 2];
}

/// `H(q) = f(|q|)` for an even one-dimensional profile `f`.
#[derive(Debug, Clone)]
pub struct RadialHamiltonian<F> {
    pub profile: F,
}

impl<F: Hamiltonian1d> Hamiltonian2d for RadialHamiltonian<F> {
    fn value(&self, q: [f64; 2]) -> f64 {
        self.profile.value(q[0].hypot(q[1]))
    }

    fn axis_slope_sup(&self, lo: [f64; 2], hi: [f64; 2]) -> [f64; 2] {
        // |∂_j H| = |f'(r)| |q_j| / r
        let near = |a: f64, b: f64| if a <= 0.0 && b >= 0.0 { 0.0 } else { a.abs().min(b.abs()) };
        let far = |a: f64, b: f64| a.abs().max(b.abs());
        let rmin = near(lo[0], hi[0]).hypot(near(lo[1], hi[1]));
        let q = [far(lo[0], hi[0]), far(lo[1], hi[1])];
        let rmax = q[0].hypot(q[1]);
        let s = self.profile.slope_sup(rmin, rmax);
        let axis = |qj: f64| if rmin > 0.0 { s * (qj / rmin).min(1.0) } else { s };
        [axis(q[0]), axis(q[1])]
    }
}

/// One run of the inviscid 2D scheme on an `n × n` grid.
pub fn march_2d<H: Hamiltonian2d + ?Sized>(
    h: &H,
    v: &FourierPotential,
    p: [f64; 2],
    n: usize,
    t: f64,
) -> Result<GridSolution> {
    check_grid(n, t)?;
    if v.dim() != 2 {
        return Err(Error::Shape(format!("potential is {}-dimensional", v.dim())));
    }
    let dx = 1.0 / n as f64;
    let idx = |i: usize, j: usize| i * n + j;
    let mut vs = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            vs[idx(i, j)] = v.eval(&[i as f64 * dx, j as f64 * dx]);
        }
    }
    let mut margin = GRADIENT_MARGIN;
    for _ in 0..MAX_RESTARTS {
        let r = p[0].abs().max(p[1].abs()) + margin;
        let [ax, ay] = h.axis_slope_sup([-r, -r], [r, r]);
        if !(ax + ay).is_finite() {
            return Err(Error::Domain(format!("|DH| unbounded on [-{r}, {r}]²")));
        }
        let steps = |speed: [f64; 2]| {
            let sub = (2.0 * (speed[0] + speed[1]).max(1e-12) / dx).ceil() as usize;
            (sub, 1.0 / sub as f64)
        };
        let mut u = vec![0.0; n * n];
        let mut next = vec![0.0; n * n];
        let mut start = vec![0.0; n * n];
        let mut observed = [ax, ay];
        let mut last_dt = steps([ax, ay]).1;
        let advance = || -> Result<Option<f64>> {
            start.copy_from_slice(&u);
            let mut speed = [(SPEED_BUFFER * observed[0]).min(ax), (SPEED_BUFFER * observed[1]).min(ay)];
            'window: loop {
                let (sub, dt) = steps(speed);
                let mut seen = [0.0f64; 2];
                for _ in 0..sub {
                    let mut widest = [0.0f64; 2];
                    for i in 0..n {
                        let (im, ip) = ((i + n - 1) % n, (i + 1) % n);
                        for j in 0..n {
                            let (jm, jp) = ((j + n - 1) % n, (j + 1) % n);
                            let c = u[idx(i, j)];
                            let (a1, b1) = ((c - u[idx(im, j)]) / dx, (u[idx(ip, j)] - c) / dx);
                            let (a2, b2) = ((c - u[idx(i, jm)]) / dx, (u[idx(i, jp)] - c) / dx);
                            let lo = [p[0] + a1.min(b1), p[1] + a2.min(b2)];
                            let hi = [p[0] + a1.max(b1), p[1] + a2.max(b2)];
                            let [lx, ly] = h.axis_slope_sup(lo, hi);
                            widest = [widest[0].max(lx), widest[1].max(ly)];
                            let flux = h.value([p[0] + 0.5 * (a1 + b1), p[1] + 0.5 * (a2 + b2)])
                                - 0.5 * lx * (b1 - a1)
                                - 0.5 * ly * (b2 - a2);
                            next[idx(i, j)] = c - dt * (flux + vs[idx(i, j)]);
                        }
                    }
                    if widest[0] > speed[0] || widest[1] > speed[1] {
                        if speed[0] >= ax && speed[1] >= ay {
                            return Ok(None);
                        }
                        u.copy_from_slice(&start);
                        speed = [ax, ay];
                        continue 'window;
                    }
                    seen = [seen[0].max(widest[0]), seen[1].max(widest[1])];
                    std::mem::swap(&mut u, &mut next);
                }
                observed = [seen[0].max(1e-12), seen[1].max(1e-12)];
                last_dt = dt;
                break;
            }
            remove_mean(&mut u).map(Some)
        };
        if let Some((estimate, t_final, converged)) = run_windows(t, dx, advance)? {
            return Ok(GridSolution { dim: 2, n, dt: last_dt, field: u, estimate, t_final, converged });
        }
        margin *= 2.0;
    }
    Err(Error::Blowup("gradients keep growing past the CFL range".into()))
}

/// 2D analogue of [`effective_h_numeric`].
pub fn effective_h_numeric_2d<H: Hamiltonian2d + ?Sized>(
    h: &H,
    v: &FourierPotential,
    p: [f64; 2],
    n: usize,
    t: f64,
) -> Result<NumericEstimate> {
    let coarse = march_2d(h, v, p, n, t)?;
    let fine = march_2d(h, v, p, 2 * n, t)?;
    Ok(NumericEstimate {
        estimate: coarse.estimate,
        error_estimate: (coarse.estimate - fine.estimate).abs(),
        n,
        t_final: coarse.t_final,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ham1d::{NonconvexProfile, QuasiConvexProfile};
    use crate::inviscid1d::{effective_h_quasiconvex, pplus_sawtooth};
    use crate::potential::PiecewiseLinearPotential;

    fn sawtooth(s: f64) -> Potential {
        PiecewiseLinearPotential::sawtooth(s).unwrap().into()
    }

    #[test]
    fn free_quadratic_is_exact() {
        let q = QuasiConvexProfile::quadratic();
        let r = effective_h_numeric(&q, &Potential::zero(), 1.0, 0.0, 16, 10.0).unwrap();
        assert!((r.estimate - 0.5).abs() < 1e-12);
        assert!(r.error_estimate < 1e-12);
    }

    #[test]
    fn quadratic_sawtooth_matches_exact() {
        let q = QuasiConvexProfile::quadratic();
        let v = sawtooth(0.5);
        let exact = effective_h_quasiconvex(&q, &v, 2.0).unwrap();
        let g = march_1d(&q, &v, 2.0, 0.0, 400, 60.0).unwrap();
        assert!((g.estimate - exact).abs() < 2e-2, "{} vs {exact}", g.estimate);
        assert!(g.converged);
    }

    #[test]
    fn nonconvex_flat_edge() {
        let f = NonconvexProfile::standard();
        let v = sawtooth(0.5);
        let edge = pplus_sawtooth(&f, 0.5).unwrap();
        let above = march_1d(&f, &v, edge + 0.05, 0.0, 400, 60.0).unwrap().estimate;
        let below = march_1d(&f, &v, edge - 0.05, 0.0, 400, 60.0).unwrap().estimate;
        assert!(above > 0.0);
        assert!(below.abs() < 2e-2);
    }

    #[test]
    fn sandwich_bounds() {
        let f = NonconvexProfile::standard();
        let v = sawtooth(0.3);
        for p in [0.0, 0.7, 1.9, 2.6] {
            let e = march_1d(&f, &v, p, 0.0, 100, 20.0).unwrap().estimate;
            let hp = f.value(p);
            assert!(e >= hp + v.min() - 1e-2 && e <= hp + v.max() + 1e-2, "p={p}: {e}");
        }
    }

    #[test]
    fn viscous_limit_is_continuous() {
        let q = QuasiConvexProfile::quadratic();
        let v = sawtooth(0.5);
        let inviscid = march_1d(&q, &v, 1.5, 0.0, 100, 20.0).unwrap().estimate;
        let viscous = march_1d(&q, &v, 1.5, 1e-3, 100, 20.0).unwrap().estimate;
        assert!((inviscid - viscous).abs() < 5e-3);
    }

    #[test]
    fn preconditions() {
        let q = QuasiConvexProfile::quadratic();
        assert!(matches!(march_1d(&q, &Potential::zero(), 0.0, 0.0, 8, 20.0), Err(Error::Precondition(_))));
        assert!(matches!(march_1d(&q, &Potential::zero(), 0.0, 0.0, 32, 5.0), Err(Error::Precondition(_))));
        assert!(march_1d(&q, &Potential::zero(), 0.0, -1.0, 32, 20.0).is_err());
    }

    #[test]
    fn free_2d() {
        let h = RadialHamiltonian { profile: QuasiConvexProfile::quadratic() };
        let r = march_2d(&h, &FourierPotential::zero(2), [1.0, 1.0], 16, 10.0).unwrap();
        assert!((r.estimate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stationary_weights_are_left_invariant() {
        // dense linearisation of one LF step about a rough field
        let q = QuasiConvexProfile::quadratic();
        let n = 24;
        let dx = 1.0 / n as f64;
        let u: Vec<f64> = (0..n).map(|i| (0.3 * (i as f64 * dx * std::f64::consts::TAU).sin()).abs()).collect();
        let (p, d) = (0.4, 0.05);
        let m = stationary_weights(&q, p, d, &u, dx);
        let mut rows = vec![vec![0.0; n]; n];
        let mut widest: f64 = 0.0;
        let mut rates = Vec::new();
        for i in 0..n {
            let a = (u[i] - u[(i + n - 1) % n]) / dx;
            let b = (u[(i + 1) % n] - u[i]) / dx;
            let alpha = q.slope_sup(p + a.min(b), p + a.max(b));
            let slope = q.derivative(p + 0.5 * (a + b));
            widest = widest.max(alpha + 2.0 * d / dx);
            rates.push((alpha - slope + 2.0 * d / dx, alpha + slope + 2.0 * d / dx));
        }
        let c = 0.5 / widest;
        for i in 0..n {
            let (r, l) = rates[i];
            rows[i][(i + 1) % n] = c * r;
            rows[i][(i + n - 1) % n] = c * l;
            rows[i][i] = 1.0 - c * (r + l);
        }
        for j in 0..n {
            let image: f64 = (0..n).map(|i| m[i] * rows[i][j]).sum();
            assert!((image - m[j]).abs() < 1e-12 * m[j].max(1.0), "column {j}");
        }
        assert!(m.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn weighted_increment_of_uniform_shift() {
        let m = [0.5, 2.0, 1.0, 3.0];
        let start = [0.1, -0.2, 0.3, 0.0];
        let end: Vec<f64> = start.iter().map(|x| x - 0.75).collect();
        assert!((weighted_increment(&m, &start, &end) + 0.75).abs() < 1e-15);
    }
}
