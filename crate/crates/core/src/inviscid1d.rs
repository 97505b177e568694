//! Exact one-dimensional effective Hamiltonians.
//!
//! For a quasi-convex `H` the effective Hamiltonian of `H(p) + V(x)` is
//! determined by level integrals: outside the flat piece `[p₋, p₊]`, `H̄(p) = c`
//! where `p = ∫₀¹ H_±^{-1}(c - V(x)) dx`. On the flat piece
//! `H̄ = min H + max V`.
//!
//! For the nonconvex profile `F(|p|)` only the right edge of the flat piece
//! is available in closed form; it is computed by selecting a branch inverse
//! of `F` pointwise along the potential.

use crate::curve::{CurveSample, EffectiveCurve, Method};
use crate::error::{Error, Result};
use crate::ham1d::{NonconvexProfile, QuasiConvexProfile, Side};
use crate::numerics::{bisect, gauss_legendre5, integrate, integrate_sqrt_endpoint};
use crate::potential::{PiecewiseLinearPotential, Potential, Segment};

const LEVEL_TOL: f64 = 1e-13;

/// `∫₀¹ H_side^{-1}(c - V(x)) dx`.
pub fn level_integral(h: &QuasiConvexProfile, v: &Potential, side: Side, c: f64) -> Result<f64> {
    let hmin = h.minval();
    let vmax = v.max();
    if !(c >= hmin + vmax) {
        return Err(Error::Domain(format!("level {c} below min H + max V = {}", hmin + vmax)));
    }
    let g = |y: f64| {
        h.branch_inverse(side, y.max(hmin))
            .expect("level checked against min H")
    };
    match v {
        Potential::Piecewise(pw) => {
            let mut total = 0.0;
            for s in pw.segments() {
                total += segment_level_integral(&g, &s, c, hmin);
            }
            Ok(total)
        }
        Potential::Fourier(_) => {
            // integrate over one period starting at the maximiser so that the
            // kink of the integrand at the flat level sits at the endpoints
            let x0 = v.argmax();
            let scale = g(c - v.min()).abs().max(1.0);
            let (val, _) = integrate(|x| g(c - v.eval(x)), x0, x0 + 1.0, LEVEL_TOL * scale);
            Ok(val)
        }
    }
}

fn segment_level_integral<G: Fn(f64) -> f64>(g: &G, s: &Segment, c: f64, hmin: f64) -> f64 {
    if s.v0 == s.v1 {
        return s.len() * g(c - s.v0);
    }
    let ylo = (c - s.v0.max(s.v1)).max(hmin);
    let yhi = c - s.v0.min(s.v1);
    let scale = g(yhi).abs().max(1.0) * (yhi - ylo);
    let (val, _) = integrate_sqrt_endpoint(g, ylo, yhi, LEVEL_TOL * scale);
    s.len() * val / (yhi - ylo)
}

/// `∫₀¹ H₊^{-1}(c - V(x)) dx`, the largest momentum at which `H̄ = c`.
pub fn pplus_level(h: &QuasiConvexProfile, v: &Potential, c: f64) -> Result<f64> {
    level_integral(h, v, Side::Plus, c)
}

/// Edges `(p₋, p₊)` of the flat piece of `H̄`.
pub fn flat_piece(h: &QuasiConvexProfile, v: &Potential) -> Result<(f64, f64)> {
    let c0 = h.minval() + v.max();
    Ok((level_integral(h, v, Side::Minus, c0)?, level_integral(h, v, Side::Plus, c0)?))
}

/// Exact `H̄(p)` for quasi-convex `H`.
pub fn effective_h_quasiconvex(h: &QuasiConvexProfile, v: &Potential, p: f64) -> Result<f64> {
    let c0 = h.minval() + v.max();
    let (pminus, pplus) = flat_piece(h, v)?;
    if p >= pminus && p <= pplus {
        return Ok(c0);
    }
    let side = if p > pplus { Side::Plus } else { Side::Minus };
    let target = p.abs();
    let level = |c: f64| level_integral(h, v, side, c).expect("level above flat value").abs();
    // grow the bracket until the level integral passes |p|
    let step = match side {
        Side::Plus => h.eval(h.argmin() + target + 1.0),
        Side::Minus => h.eval(h.argmin() - target - 1.0),
    };
    let mut width = (step - h.minval()).max(0.0) + 1.0;
    let mut hi = c0 + width;
    let mut guard = 0;
    while level(hi) < target {
        width *= 2.0;
        hi = c0 + width;
        guard += 1;
        if guard > 200 {
            return Err(Error::Bracket(format!("no level reaches momentum {p}")));
        }
    }
    bisect(|c| level(c) - target, c0, hi, 0.0)
}

/// `H̄` for `H(p) = |p|`: `max(max V, |p| + ∫V)`.
pub fn closed_form_abs(v: &Potential, p: f64) -> f64 {
    let vmax = v.max();
    vmax + (p.abs() + v.mean() - vmax).max(0.0)
}

/// Exact curve over a momentum grid.
pub fn effective_curve_quasiconvex(h: &QuasiConvexProfile, v: &Potential, ps: &[f64]) -> Result<EffectiveCurve> {
    let samples = ps
        .iter()
        .map(|&p| {
            let hbar = effective_h_quasiconvex(h, v, p)?;
            Ok(CurveSample { p, hbar, err: 1e-10 * (1.0 + hbar.abs()) })
        })
        .collect::<Result<Vec<_>>>()?;
    EffectiveCurve::new(Method::ExactQuadrature, samples)
}

/// Right edge `p₊,s` of the flat piece of `F(|p|) + V_s`:
/// `∫_{1/3}^1 ψ₁ + ∫_0^{1/3} ψ₃ + (1-s) ∫_{1/3}^{1/2} (ψ₃ - ψ₁)`.
pub fn pplus_sawtooth(f: &NonconvexProfile, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("s = {s} not in (0, 1)")));
    }
    let third = 1.0 / 3.0;
    let outer = f.psi_integral(1, third, 1.0)?;
    let inner = f.psi_integral(3, 0.0, third)?;
    let gap = f.psi_integral(3, third, 0.5)? - f.psi_integral(1, third, 0.5)?;
    Ok(outer + inner + (1.0 - s) * gap)
}

/// Right edge of the flat piece of `F(|p|) + V` for a multiwell `V` with
/// maxima 0 and strictly monotone pieces.
///
/// Inside every well deep enough to reach `-V = 1/2`, the outer branch `ψ₁`
/// is used from the descending crossing of `-V = 1/3` to the ascending
/// crossing of `-V = 1/2`; everywhere else the inner branch `ψ₃`.
pub fn pplus_multiwell(f: &NonconvexProfile, v: &PiecewiseLinearPotential) -> Result<f64> {
    let wells = split_wells(v)?;
    let third = 1.0 / 3.0;
    let mut total = 0.0;
    for well in &wells {
        let depth = -well.iter().map(|s| s.v0.min(s.v1)).fold(f64::INFINITY, f64::min);
        let (start, end) = if depth >= 0.5 {
            let xd = well
                .iter()
                .filter(|s| s.v1 < s.v0)
                .find_map(|s| s.crossing(-third))
                .ok_or_else(|| Error::Shape("well has no descending crossing of -1/3".into()))?;
            let xa = well
                .iter()
                .filter(|s| s.v1 > s.v0)
                .find_map(|s| s.crossing(-0.5))
                .ok_or_else(|| Error::Shape("well has no ascending crossing of -1/2".into()))?;
            (xd, xa)
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        for s in well {
            let mut cuts = vec![s.x0];
            for x in [start, end] {
                if x > s.x0 && x < s.x1 {
                    cuts.push(x);
                }
            }
            cuts.push(s.x1);
            for w in cuts.windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                let branch = if mid > start && mid < end { 1 } else { 3 };
                let (lo, hi) = f.branch_domain(branch)?;
                let y_range = [-s.eval(w[0]), -s.eval(w[1])];
                if y_range.iter().any(|&y| y < lo - 1e-12 || y > hi + 1e-12) {
                    return Err(Error::Shape(format!(
                        "-V leaves the domain of psi_{branch} on [{}, {}]",
                        w[0], w[1]
                    )));
                }
                total += gauss_legendre5(|x| f.psi_unchecked(branch, -s.eval(x)), w[0], w[1]);
            }
        }
    }
    Ok(total)
}

/// Left edge `p₋` of the flat piece of `F(|p|) + V`, by reflection.
pub fn pminus_multiwell(f: &NonconvexProfile, v: &PiecewiseLinearPotential) -> Result<f64> {
    Ok(-pplus_multiwell(f, &v.reflected())?)
}

/// Splits one period, rotated to start at a maximum, into wells between
/// consecutive local maxima.
fn split_wells(v: &PiecewiseLinearPotential) -> Result<Vec<Vec<Segment>>> {
    if v.max().abs() > 1e-12 {
        return Err(Error::Shape(format!("max V must be 0, got {}", v.max())));
    }
    if v.segments().any(|s| s.v0 == s.v1) {
        return Err(Error::Shape("flat segment: pieces must be strictly monotone".into()));
    }
    let segs: Vec<Segment> = v.segments().collect();
    let n = segs.len();
    // a local max sits at the start of segment i if segment i descends and
    // its predecessor ascends
    let start = (0..n)
        .find(|&i| segs[i].v1 < segs[i].v0 && segs[(i + n - 1) % n].v1 > segs[(i + n - 1) % n].v0)
        .ok_or_else(|| Error::Shape("potential has no local maximum".into()))?;
    let rotated = v.shifted(segs[start].x0);
    let segs: Vec<Segment> = rotated.segments().collect();
    let mut wells: Vec<Vec<Segment>> = Vec::new();
    let mut current = Vec::new();
    for (i, s) in segs.iter().enumerate() {
        if i > 0 && s.v1 < s.v0 && segs[i - 1].v1 > segs[i - 1].v0 {
            wells.push(std::mem::take(&mut current));
        }
        current.push(*s);
    }
    wells.push(current);
    for w in &wells {
        let top = if w[0].v0.abs() > w[w.len() - 1].v1.abs() { w[0].v0 } else { w[w.len() - 1].v1 };
        if top.abs() > 1e-12 {
            return Err(Error::Shape(format!("every local maximum must be 0, found {top}")));
        }
    }
    Ok(wells)
}

/// A piecewise-linear map of the line commuting with integer shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearMap {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinearMap {
    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = x.floor();
        let y = x - n;
        let j = self.knots.partition_point(|k| k.0 <= y).clamp(1, self.knots.len() - 1);
        let (x0, t0) = self.knots[j - 1];
        let (x1, t1) = self.knots[j];
        n + t0 + (y - x0) / (x1 - x0) * (t1 - t0)
    }

    /// Smallest slope over all pieces.
    pub fn min_slope(&self) -> f64 {
        self.knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .fold(f64::INFINITY, f64::min)
    }
}

/// The change of variables carrying a 0/-1 multiwell onto the piecewise
/// rescaled sawtooth with the same wells.
#[derive(Debug, Clone, PartialEq)]
pub struct Reparametrization {
    /// `τ` with `τ(a_i) = a_i` and `τ(c_i) = (1-s) a_i + s a_{i+1}`.
    pub tau: PiecewiseLinearMap,
    /// `Ṽ`, equal to `V_s((x - a_i)/(a_{i+1} - a_i))` on each `[a_i, a_{i+1}]`.
    pub target: PiecewiseLinearPotential,
}

/// Builds `τ` such that `V̂(x) = Ṽ(τ(x))`.
pub fn indistinguishability_tau(vhat: &PiecewiseLinearPotential, s: f64) -> Result<Reparametrization> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("s = {s} not in (0, 1)")));
    }
    let (tops, bottoms) = multiwell_nodes(vhat)?;
    let mut knots = Vec::with_capacity(tops.len() + bottoms.len());
    let mut targets = Vec::with_capacity(bottoms.len());
    for (i, &c) in bottoms.iter().enumerate() {
        let (a, b) = (tops[i], tops[i + 1]);
        let a_s = (1.0 - s) * a + s * b;
        knots.push((a, a));
        knots.push((c, a_s));
        targets.push(a_s);
    }
    knots.push((1.0, 1.0));
    Ok(Reparametrization {
        tau: PiecewiseLinearMap { knots },
        target: PiecewiseLinearPotential::multiwell(&tops, &targets)?,
    })
}

/// Tops `a_i` and bottoms `c_i` of a 0/-1 multiwell.
pub fn multiwell_nodes(v: &PiecewiseLinearPotential) -> Result<(Vec<f64>, Vec<f64>)> {
    let (xs, vs) = (v.breakpoints(), v.values());
    if xs.len() < 3 || xs.len() % 2 == 0 {
        return Err(Error::Shape("a 0/-1 multiwell alternates tops and bottoms".into()));
    }
    let mut tops = Vec::new();
    let mut bottoms = Vec::new();
    for (i, (&x, &val)) in xs.iter().zip(vs).enumerate() {
        let expected = if i % 2 == 0 { 0.0 } else { -1.0 };
        if (val - expected).abs() > 1e-12 {
            return Err(Error::Shape(format!("breakpoint {i} at x = {x} has value {val}, expected {expected}")));
        }
        if i % 2 == 0 {
            tops.push(x);
        } else {
            bottoms.push(x);
        }
    }
    Ok((tops, bottoms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::FourierPotential;

    fn sawtooth(s: f64) -> Potential {
        PiecewiseLinearPotential::sawtooth(s).unwrap().into()
    }

    // brute-force midpoint sum, independent of the segment quadrature
    fn riemann_level(g: impl Fn(f64) -> f64, v: &Potential, c: f64, n: usize) -> f64 {
        (0..n).map(|i| g(c - v.eval((i as f64 + 0.5) / n as f64))).sum::<f64>() / n as f64
    }

    #[test]
    fn pplus_level_examples() {
        let q = QuasiConvexProfile::quadratic();
        let v = sawtooth(0.3);
        let got = pplus_level(&q, &v, 0.0).unwrap();
        assert!((got - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-12);
        let oracle = riemann_level(|y| (2.0 * y.max(0.0)).sqrt(), &v, 0.0, 1_000_000);
        assert!((got - oracle).abs() < 1e-6);
        assert!((pplus_level(&q, &Potential::zero(), 2.0).unwrap() - 2.0).abs() < 1e-14);
        let a = QuasiConvexProfile::abs();
        assert!((pplus_level(&a, &sawtooth(0.5), 0.0).unwrap() - 0.5).abs() < 1e-14);
        assert!(matches!(pplus_level(&q, &v, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn pplus_level_closed_form_above_flat_level() {
        let q = QuasiConvexProfile::quadratic();
        let v = sawtooth(0.6);
        for c in [0.1, 0.5, 3.0, 100.0] {
            let exact = 2.0 * 2f64.sqrt() / 3.0 * ((c + 1.0f64).powf(1.5) - c.powf(1.5));
            assert!((pplus_level(&q, &v, c).unwrap() - exact).abs() < 1e-12 * exact.max(1.0));
        }
    }

    #[test]
    fn pplus_level_fourier_matches_riemann() {
        let q = QuasiConvexProfile::quadratic();
        let v: Potential = FourierPotential::mathieu().into();
        for c in [1.0, 1.5, 4.0] {
            let got = pplus_level(&q, &v, c).unwrap();
            let oracle = riemann_level(|y| (2.0 * y.max(0.0)).sqrt(), &v, c, 200_000);
            assert!((got - oracle).abs() < 1e-8, "c={c}: {got} vs {oracle}");
        }
        // flat edge for -cos: ∫ 2|cos πx| = 4/π
        assert!((pplus_level(&q, &v, 1.0).unwrap() - 4.0 / std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn pplus_level_increasing_in_c() {
        let q = QuasiConvexProfile::power(1.7, 0.2).unwrap();
        let v: Potential = PiecewiseLinearPotential::vhat2().into();
        let c0 = q.minval() + v.max();
        let mut prev = pplus_level(&q, &v, c0).unwrap();
        for i in 1..=60 {
            let c = c0 + 0.05 * i as f64;
            let cur = pplus_level(&q, &v, c).unwrap();
            assert!(cur > prev);
            prev = cur;
        }
    }

    #[test]
    fn effective_h_examples() {
        let a = QuasiConvexProfile::abs();
        for s in [0.2, 0.5, 0.9] {
            assert!((effective_h_quasiconvex(&a, &sawtooth(s), 2.0).unwrap() - 1.5).abs() < 1e-12);
        }
        let q = QuasiConvexProfile::quadratic();
        assert!((effective_h_quasiconvex(&q, &Potential::zero(), 3.0).unwrap() - 4.5).abs() < 1e-12);
        let h2 = effective_h_quasiconvex(&q, &sawtooth(0.2), 1.7).unwrap();
        let h8 = effective_h_quasiconvex(&q, &sawtooth(0.8), 1.7).unwrap();
        assert!((h2 - h8).abs() <= 1e-9);
        assert!(h2 > 0.0);
    }

    #[test]
    fn effective_h_inverts_level_integral() {
        let q = QuasiConvexProfile::quadratic();
        let v = sawtooth(0.4);
        for p in [1.0, 2.0, -1.5, -3.0] {
            let c = effective_h_quasiconvex(&q, &v, p).unwrap();
            let side = if p > 0.0 { Side::Plus } else { Side::Minus };
            assert!((level_integral(&q, &v, side, c).unwrap() - p).abs() < 1e-11);
        }
    }

    #[test]
    fn abs_closed_form_examples() {
        let v = sawtooth(0.5);
        assert_eq!(closed_form_abs(&v, 0.3), 0.0);
        assert_eq!(closed_form_abs(&Potential::zero(), -2.0), 2.0);
        assert!((closed_form_abs(&v, 2.0) - 1.5).abs() < 1e-15);
        let exact = effective_h_quasiconvex(&QuasiConvexProfile::abs(), &v, 2.0).unwrap();
        assert!((exact - 1.5).abs() < 1e-12);
    }

    #[test]
    fn curve_shape_on_grid() {
        let q = QuasiConvexProfile::power(2.5, 0.0).unwrap();
        let v: Potential = PiecewiseLinearPotential::vhat2().into();
        let (pm, pp) = flat_piece(&q, &v).unwrap();
        let ps: Vec<f64> = (0..81).map(|i| -3.0 + 0.075 * i as f64).collect();
        let curve = effective_curve_quasiconvex(&q, &v, &ps).unwrap();
        let floor = q.minval() + v.max();
        for w in curve.samples().windows(2) {
            if w[0].p >= pp {
                assert!(w[1].hbar >= w[0].hbar - 1e-9);
            }
            if w[1].p <= pm {
                assert!(w[1].hbar <= w[0].hbar + 1e-9);
            }
        }
        for s in curve.samples() {
            assert!(s.hbar >= floor - 1e-12);
            if s.p >= pm && s.p <= pp {
                assert_eq!(s.hbar, floor);
            } else {
                assert!(s.hbar > floor);
            }
            assert!(s.hbar <= q.eval(s.p) + v.max() + 1e-9);
            assert!(s.hbar >= q.eval(s.p) + v.min() - 1e-9);
        }
    }

    #[test]
    fn pplus_sawtooth_examples() {
        let f = NonconvexProfile::standard();
        for s in [0.1, 0.25, 0.5, 0.9] {
            assert!((pplus_sawtooth(&f, s).unwrap() - (57.0 + 5.0 * s) / 36.0).abs() < 1e-14);
        }
        assert!((pplus_sawtooth(&f, 0.5).unwrap() - 119.0 / 72.0).abs() < 1e-14);
        let d = pplus_sawtooth(&f, 0.8).unwrap() - pplus_sawtooth(&f, 0.2).unwrap();
        assert!((d - 1.0 / 12.0).abs() < 1e-14);
        assert!(pplus_sawtooth(&f, 1.0).is_err());
    }

    #[test]
    fn pplus_sawtooth_matches_quadrature_of_branch_selection() {
        // integrate f_s directly on [0, 1] with the switch points s/3 and 1/2 + s/2
        let f = NonconvexProfile::standard();
        for s in [0.15, 0.5, 0.85] {
            let v = PiecewiseLinearPotential::sawtooth(s).unwrap();
            let fs = |x: f64| {
                let y = -v.eval(x);
                if x > s / 3.0 && x < 0.5 + 0.5 * s {
                    f.psi(1, y).unwrap()
                } else {
                    f.psi(3, y).unwrap()
                }
            };
            let mut q = 0.0;
            for (a, b) in [(0.0, s / 3.0), (s / 3.0, s), (s, 0.5 + 0.5 * s), (0.5 + 0.5 * s, 1.0)] {
                q += integrate(fs, a, b, 1e-14).0;
            }
            assert!((q - pplus_sawtooth(&f, s).unwrap()).abs() < 1e-12);
            assert!((pplus_multiwell(&f, &v).unwrap() - pplus_sawtooth(&f, s).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn pplus_multiwell_vhat2() {
        let f = NonconvexProfile::standard();
        let p2 = pplus_multiwell(&f, &PiecewiseLinearPotential::vhat2()).unwrap();
        let phalf = pplus_sawtooth(&f, 0.5).unwrap();
        // change of variables: (5/12) ∫_{1/3}^{2/5} (ψ₁ - ψ₃) dy = 7/270
        assert!((phalf - p2 - 7.0 / 270.0).abs() < 1e-12);
        // switch points 13/36 and 11/12, branch integrals by quadrature
        let v = PiecewiseLinearPotential::vhat2();
        let g = |x: f64| {
            let y = -v.eval(x);
            if x > 13.0 / 36.0 && x < 11.0 / 12.0 {
                f.psi(1, y).unwrap()
            } else {
                f.psi(3, y).unwrap()
            }
        };
        let knots = [0.0, 1.0 / 6.0, 1.0 / 3.0, 13.0 / 36.0, 11.0 / 30.0, 2.0 / 3.0, 11.0 / 12.0, 29.0 / 30.0, 1.0];
        let q: f64 = knots.windows(2).map(|w| integrate(g, w[0], w[1], 1e-14).0).sum();
        assert!((q - p2).abs() < 1e-12);
    }

    #[test]
    fn pplus_multiwell_balanced_equals_sawtooth() {
        let f = NonconvexProfile::standard();
        let v = PiecewiseLinearPotential::vhat3();
        let got = pplus_multiwell(&f, &v).unwrap();
        assert!((got - pplus_sawtooth(&f, 0.4).unwrap()).abs() < 1e-9);
        // rotation does not change the edge
        let rotated = pplus_multiwell(&f, &v.shifted(0.21)).unwrap();
        assert!((rotated - got).abs() < 1e-12);
    }

    #[test]
    fn pplus_multiwell_shape_errors() {
        let f = NonconvexProfile::standard();
        let lifted = PiecewiseLinearPotential::from_points(&[(0.0, 0.5), (0.5, -0.5), (1.0, 0.5)]).unwrap();
        assert!(matches!(pplus_multiwell(&f, &lifted), Err(Error::Shape(_))));
        let low_top = PiecewiseLinearPotential::from_points(&[
            (0.0, 0.0),
            (0.2, -1.0),
            (0.4, -0.2),
            (0.6, -1.0),
            (1.0, 0.0),
        ])
        .unwrap();
        assert!(matches!(pplus_multiwell(&f, &low_top), Err(Error::Shape(_))));
    }

    #[test]
    fn asymmetry_of_flat_edges() {
        let f = NonconvexProfile::standard();
        for s in [0.1, 0.3, 0.7] {
            let vs = PiecewiseLinearPotential::sawtooth(s).unwrap();
            let vr = PiecewiseLinearPotential::sawtooth(1.0 - s).unwrap();
            let pplus = pplus_multiwell(&f, &vs).unwrap();
            let pminus_reflected = pminus_multiwell(&f, &vr).unwrap();
            assert!((pplus + pminus_reflected).abs() < 1e-12);
            assert!((pplus - pplus_multiwell(&f, &vr).unwrap()).abs() > 1e-3);
        }
    }

    #[test]
    fn tau_examples() {
        let v = PiecewiseLinearPotential::sawtooth(0.35).unwrap();
        let r = indistinguishability_tau(&v, 0.35).unwrap();
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            assert!((r.tau.eval(x) - x).abs() < 1e-15);
        }
        let v = PiecewiseLinearPotential::multiwell(&[0.0, 0.5, 1.0], &[0.2, 0.7]).unwrap();
        let r = indistinguishability_tau(&v, 0.4).unwrap();
        assert!((r.tau.eval(0.2) - 0.2).abs() < 1e-15);
        assert!((r.tau.eval(0.7) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn tau_composition() {
        let v = PiecewiseLinearPotential::vhat3();
        for s in [0.2, 0.4, 0.75] {
            let r = indistinguishability_tau(&v, s).unwrap();
            assert!(r.tau.min_slope() > 0.0);
            for i in 0..1000 {
                let x = i as f64 / 997.0 - 0.3;
                assert!((v.eval(x) - r.target.eval(r.tau.eval(x))).abs() < 1e-12);
            }
        }
        assert!(indistinguishability_tau(&PiecewiseLinearPotential::vhat2(), 0.5).is_err());
    }
}
