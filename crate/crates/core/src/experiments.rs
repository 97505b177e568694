//! Registered experiments. Each one reproduces a single structural property
//! of effective Hamiltonians numerically and reports pass/fail checks at
//! fixed tolerances.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::asympt::{inviscid_coeffs, make_diophantine, random_spectrum, recover_mean, second_order_coefficient};
use crate::asympt::{solve_transport, viscous_coeffs, DiophantinePreset};
use crate::cellpde::{effective_h_numeric, march_1d};
use crate::curve::{CurveSample, EffectiveCurve, Method};
use crate::error::{Error, Result};
use crate::ham1d::{Hamiltonian1d, NonconvexProfile, QuasiConvexProfile};
use crate::hill::{isospectral_distance, monodromy, viscous_effective_h};
use crate::inviscid1d::{closed_form_abs, effective_h_quasiconvex, pplus_multiwell, pplus_sawtooth};
use crate::numerics::extrapolate_to_zero;
use crate::plot::{PlotLabels, Series};
use crate::potential::{cdf_distance, FourierPotential, PiecewiseLinearPotential, Potential};
use crate::report::{Cell, Check, Report, Table};

/// A registered experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentInfo {
    pub name: &'static str,
    /// Index of the acceptance criterion it reproduces.
    pub criterion: u32,
    pub title: &'static str,
}

pub const EXPERIMENTS: [ExperimentInfo; 13] = [
    ExperimentInfo { name: "hill-baseline", criterion: 1, title: "Hill pipeline with V = 0 gives p²" },
    ExperimentInfo { name: "distribution-invariance", criterion: 2, title: "Equidistributed potentials share H̄" },
    ExperimentInfo { name: "abs-closed-form", criterion: 3, title: "H = |p| closed form" },
    ExperimentInfo { name: "pplus-separation", criterion: 4, title: "Nonconvex flat edge p₊,s = (57 + 5s)/36" },
    ExperimentInfo { name: "counterexample-vhat2", criterion: 5, title: "Flat-edge gap between V̂₂ and V₁/₂" },
    ExperimentInfo {
        name: "macroscopic-indistinguishability",
        criterion: 6,
        title: "Balanced multiwell vs sawtooth by cell PDE",
    },
    ExperimentInfo { name: "mean-recovery", criterion: 7, title: "Mean and second coefficient from large |p|" },
    ExperimentInfo { name: "viscous-expansion", criterion: 8, title: "Viscous second coefficient from Hill curve" },
    ExperimentInfo { name: "spectral-identities", criterion: 9, title: "Monodromy determinant and isospectrality" },
    ExperimentInfo { name: "sandwich-bounds", criterion: 10, title: "H + min V ≤ H̄ ≤ H + max V for every method" },
    ExperimentInfo { name: "transport-parseval", criterion: 11, title: "Transport solves and Parseval identities" },
    ExperimentInfo { name: "small-error", criterion: 12, title: "λ² - λ H̄'(λ) decays" },
    ExperimentInfo { name: "cellpde-crossvalidation", criterion: 13, title: "Cell PDE against exact quadrature" },
];

pub fn lookup(name: &str) -> Option<&'static ExperimentInfo> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

/// Optional overrides of an experiment's default parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    /// Grid size for the cell-problem solver.
    pub n: Option<usize>,
    /// Time horizon for the cell-problem solver.
    pub t: Option<f64>,
    /// Sawtooth parameters.
    pub s: Option<Vec<f64>>,
    /// Spectral truncation.
    pub k: Option<i64>,
    pub lambdas: Option<Vec<f64>>,
    pub p_grid: Option<Vec<f64>>,
}

/// Runs a registered experiment.
pub fn run_experiment(name: &str, params: &Params) -> Result<Report> {
    let info = lookup(name).ok_or_else(|| Error::Precondition(format!("unknown experiment '{name}'")))?;
    let mut report = match info.criterion {
        1 => hill_baseline(params),
        2 => distribution_invariance(params),
        3 => abs_closed_form(params),
        4 => pplus_separation(params),
        5 => counterexample_vhat2(params),
        6 => macroscopic_indistinguishability(params),
        7 => mean_recovery(params),
        8 => viscous_expansion(params),
        9 => spectral_identities(params),
        10 => sandwich_bounds(params),
        11 => transport_parseval(params),
        12 => small_error(params),
        13 => cellpde_crossvalidation(params),
        _ => unreachable!("registry criteria are 1..=13"),
    }?;
    report.name = info.name.to_string();
    report.labels.title = info.title.to_string();
    report.info("criterion", info.criterion);
    Ok(report)
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn labels(x: &str, y: &str) -> PlotLabels {
    PlotLabels { title: String::new(), x: x.into(), y: y.into() }
}

fn sawtooth(s: f64) -> Result<Potential> {
    Ok(PiecewiseLinearPotential::sawtooth(s)?.into())
}

fn exact_quadratic(v: &Potential, p: f64) -> Result<f64> {
    effective_h_quasiconvex(&QuasiConvexProfile::quadratic(), v, p)
}

fn potential_series(label: &str, v: &Potential) -> Series {
    let kinks = v.kinks();
    let xs: Vec<f64> = if kinks.len() > 2 { kinks } else { linspace(0.0, 1.0, 201) };
    Series::new(label, xs.iter().map(|&x| (x, v.eval(x))).collect())
}

fn hill_baseline(params: &Params) -> Result<Report> {
    let ps = params.p_grid.clone().unwrap_or_else(|| (0..=6).map(|i| 0.5 * i as f64).collect());
    let zero = Potential::zero();
    let mut table = Table::new(["p", "hbar", "exact", "abs_err"]);
    let mut worst: f64 = 0.0;
    let (mut hill, mut exact) = (Vec::new(), Vec::new());
    for &p in &ps {
        let h = viscous_effective_h(&zero, p, 1.0)?;
        let err = (h - p * p).abs();
        worst = worst.max(err);
        table.push(vec![p.into(), h.into(), (p * p).into(), err.into()])?;
        hill.push((p, h));
        exact.push((p, p * p));
    }
    let mut r = Report::new("", table, labels("p", "H̄(p)"));
    r.series = vec![Series::new("Hill, V = 0", hill), Series::new("p²", exact)];
    r.checks.push(Check::at_most("max |H̄(p) - p²|", worst, 1e-6));
    Ok(r)
}

fn distribution_invariance(params: &Params) -> Result<Report> {
    let ss = params.s.clone().unwrap_or_else(|| vec![0.2, 0.5, 0.8]);
    if ss.is_empty() {
        return Err(Error::Precondition("need at least one s".into()));
    }
    let ps = params.p_grid.clone().unwrap_or_else(|| linspace(-3.0, 3.0, 60));
    let mut header = vec!["p".to_string()];
    for s in &ss {
        header.push(format!("hbar_s{s}"));
        header.push(format!("hbar_s{s}_doubled"));
    }
    let mut table = Table::new(header);
    let mut curves: Vec<Vec<f64>> = Vec::new();
    let mut doubled: Vec<Vec<f64>> = Vec::new();
    for &s in &ss {
        let v = sawtooth(s)?;
        let v2 = v.repeated(2);
        curves.push(ps.iter().map(|&p| exact_quadratic(&v, p)).collect::<Result<_>>()?);
        doubled.push(ps.iter().map(|&p| exact_quadratic(&v2, p)).collect::<Result<_>>()?);
    }
    for (i, &p) in ps.iter().enumerate() {
        let mut row = vec![Cell::Num(p)];
        for (c, d) in curves.iter().zip(&doubled) {
            row.push(c[i].into());
            row.push(d[i].into());
        }
        table.push(row)?;
    }
    let across = curves
        .iter()
        .flat_map(|c| c.iter().zip(&curves[0]).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    let scaled = curves
        .iter()
        .zip(&doubled)
        .flat_map(|(c, d)| c.iter().zip(d).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    let mut r = Report::new("", table, labels("p", "H̄(p)"));
    for (s, c) in ss.iter().zip(&curves) {
        r.series.push(Series::new(format!("V_{s}"), ps.iter().copied().zip(c.iter().copied()).collect()));
    }
    r.series.push(Series::new(
        format!("V_{}(2x)", ss[0]),
        ps.iter().copied().zip(doubled[0].iter().copied()).collect(),
    ));
    r.checks.push(Check::at_most("max curve deviation across s", across, 1e-8));
    r.checks.push(Check::at_most("max curve deviation V(2x) vs V(x)", scaled, 1e-8));
    Ok(r)
}

fn abs_closed_form(params: &Params) -> Result<Report> {
    let ps = params.p_grid.clone().unwrap_or_else(|| linspace(-2.0, 2.0, 40));
    let v = sawtooth(0.5)?;
    let h = QuasiConvexProfile::abs();
    let mut table = Table::new(["p", "hbar", "closed_form", "abs_err"]);
    let mut worst: f64 = 0.0;
    let (mut num, mut closed) = (Vec::new(), Vec::new());
    for &p in &ps {
        let a = effective_h_quasiconvex(&h, &v, p)?;
        let b = closed_form_abs(&v, p);
        worst = worst.max((a - b).abs());
        table.push(vec![p.into(), a.into(), b.into(), (a - b).abs().into()])?;
        num.push((p, a));
        closed.push((p, b));
    }
    let mut r = Report::new("", table, labels("p", "H̄(p)"));
    r.series = vec![Series::new("quadrature", num), Series::new("max(max V, |p| + ∫V)", closed)];
    r.checks.push(Check::at_most("max |H̄ - closed form|", worst, 1e-10));
    Ok(r)
}

fn pplus_separation(params: &Params) -> Result<Report> {
    let ss = params.s.clone().unwrap_or_else(|| (1..=9).map(|i| i as f64 / 10.0).collect());
    let f = NonconvexProfile::standard();
    let mut table = Table::new(["s", "pplus", "closed_form", "abs_err"]);
    let mut worst: f64 = 0.0;
    let mut pts = Vec::new();
    for &s in &ss {
        let p = pplus_sawtooth(&f, s)?;
        let c = (57.0 + 5.0 * s) / 36.0;
        worst = worst.max((p - c).abs());
        table.push(vec![s.into(), p.into(), c.into(), (p - c).abs().into()])?;
        pts.push((s, p));
    }
    let mut sorted = pts.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let min_gap = sorted.windows(2).map(|w| w[1].1 - w[0].1).fold(f64::INFINITY, f64::min);
    let mut r = Report::new("", table, labels("s", "p₊,s"));
    r.series = vec![Series::new("p₊,s", sorted)];
    r.checks.push(Check::at_most("max |p₊,s - (57+5s)/36|", worst, 1e-9));
    if ss.len() > 1 {
        r.checks.push(Check::above("min successive gap in p₊,s", min_gap, 0.0));
    }
    Ok(r)
}

/// The value `(5/12)[y² - 5y/3]` between `1/3` and `2/5`.
pub const VHAT2_STATED_GAP: f64 = -7.0 / 270.0;

fn counterexample_vhat2(params: &Params) -> Result<Report> {
    let f = NonconvexProfile::standard();
    let vhat2 = PiecewiseLinearPotential::vhat2();
    let half = pplus_sawtooth(&f, 0.5)?;
    let p2 = pplus_multiwell(&f, &vhat2)?;
    let gap = half - p2;
    let mut table = Table::new(["quantity", "value"]);
    table.push(vec!["pplus_half".into(), half.into()])?;
    table.push(vec!["pplus_vhat2".into(), p2.into()])?;
    table.push(vec!["difference".into(), gap.into()])?;
    table.push(vec!["stated".into(), VHAT2_STATED_GAP.into()])?;
    // independent look at the edges with the cell solver, between the two
    // computed edges: H̄ > 0 there iff that edge lies to the left
    let n = params.n.unwrap_or(400);
    let t = params.t.unwrap_or(60.0);
    let mid = 0.5 * (half + p2);
    let vh2: Potential = vhat2.clone().into();
    let vhalf = sawtooth(0.5)?;
    let h_vhat2 = march_1d(&f, &vh2, mid, 0.0, n, t)?.estimate;
    let h_half = march_1d(&f, &vhalf, mid, 0.0, n, t)?.estimate;
    table.push(vec![format!("cellpde_vhat2_at_{mid:.6}").into(), h_vhat2.into()])?;
    table.push(vec![format!("cellpde_half_at_{mid:.6}").into(), h_half.into()])?;
    let mut r = Report::new("", table, labels("x", "V(x)"));
    r.series = vec![potential_series("V̂₂", &vh2), potential_series("V_1/2", &vhalf)];
    r.info("pplus_half", half);
    r.info("pplus_vhat2", p2);
    r.info("difference", gap);
    r.info("cellpde_probe_p", mid);
    r.info("cellpde_hbar_vhat2", h_vhat2);
    r.info("cellpde_hbar_half", h_half);
    r.checks.push(Check::at_most("|p₊,1/2 - p₊(V̂₂) - (-7/270)|", (gap - VHAT2_STATED_GAP).abs(), 1e-8));
    Ok(r)
}

fn macroscopic_indistinguishability(params: &Params) -> Result<Report> {
    let n = params.n.unwrap_or(400);
    let t = params.t.unwrap_or(60.0);
    let ps = params.p_grid.clone().unwrap_or_else(|| vec![0.0, 0.8, 1.6, 2.4]);
    let vhat = PiecewiseLinearPotential::vhat3();
    let saw = PiecewiseLinearPotential::sawtooth(0.4)?;
    let (dec, inc) = vhat.balance_totals()?;
    let (hd, hi) = vhat.monotone_piece_cdfs()?;
    let (sd, si) = saw.monotone_piece_cdfs()?;
    let cdf_gap = cdf_distance(&hd, &sd).max(cdf_distance(&hi, &si));
    let (vh, vs): (Potential, Potential) = (vhat.into(), saw.into());
    let q = QuasiConvexProfile::quadratic();
    let f = NonconvexProfile::standard();
    let mut table = Table::new(["p", "quadratic_vhat", "quadratic_sawtooth", "F_vhat", "F_sawtooth"]);
    let (mut dq, mut df) = (0.0f64, 0.0f64);
    let mut series = vec![Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for &p in &ps {
        let vals = [
            march_1d(&q, &vh, p, 0.0, n, t)?.estimate,
            march_1d(&q, &vs, p, 0.0, n, t)?.estimate,
            march_1d(&f, &vh, p, 0.0, n, t)?.estimate,
            march_1d(&f, &vs, p, 0.0, n, t)?.estimate,
        ];
        dq = dq.max((vals[0] - vals[1]).abs());
        df = df.max((vals[2] - vals[3]).abs());
        table.push(std::iter::once(p).chain(vals).map(Cell::Num).collect())?;
        for (s, v) in series.iter_mut().zip(vals) {
            s.push((p, v));
        }
    }
    let names = ["½p², V̂", "½p², V_0.4", "F, V̂", "F, V_0.4"];
    let mut r = Report::new("", table, labels("p", "H̄(p)"));
    r.series = names.iter().zip(series).map(|(n, s)| Series::new(*n, s)).collect();
    r.info("decreasing_length", dec);
    r.info("increasing_length", inc);
    r.checks.push(Check::at_most("|decreasing length - 0.4|", (dec - 0.4).abs(), 1e-12));
    r.checks.push(Check::at_most("max |H̄_V̂ - H̄_0.4| for ½p²", dq, 2e-2));
    r.checks.push(Check::at_most("max |H̄_V̂ - H̄_0.4| for F", df, 2e-2));
    r.checks.push(Check::at_most("monotone-piece CDF distance", cdf_gap, 0.0));
    Ok(r)
}

fn exact_curve(v: &Potential, ps: &[f64]) -> Result<EffectiveCurve> {
    let samples = ps
        .iter()
        .map(|&p| Ok(CurveSample { p, hbar: exact_quadratic(v, p)?, err: 0.0 }))
        .collect::<Result<Vec<_>>>()?;
    EffectiveCurve::new(Method::ExactQuadrature, samples)
}

fn mean_recovery(params: &Params) -> Result<Report> {
    let lambdas = params.lambdas.clone().unwrap_or_else(|| vec![10.0, 20.0, 40.0]);
    let q = QuasiConvexProfile::quadratic();
    let dir = make_diophantine(1, DiophantinePreset::Golden, params.k.unwrap_or(32))?;
    let saw = sawtooth(0.5)?;
    let curve = exact_curve(&saw, &lambdas)?;
    let rec = recover_mean(&curve, &q, &dir, &lambdas)?;
    let mathieu = FourierPotential::mathieu();
    let coeffs = inviscid_coeffs(&mathieu, &dir)?;
    let lam2 = 50.0;
    let mcurve = exact_curve(&mathieu.clone().into(), &[lam2])?;
    let a2 = second_order_coefficient(&mcurve, &q, &dir, lam2, coeffs.a1)?;
    let mut table = Table::new(["potential", "lambda", "hbar", "value"]);
    for (s, res) in curve.samples().iter().zip(&rec.residuals) {
        table.push(vec!["sawtooth_0.5".into(), s.p.into(), s.hbar.into(), (*res).into()])?;
    }
    table.push(vec!["sawtooth_0.5_extrapolated".into(), 0.0.into(), f64::NAN.into(), rec.value.into()])?;
    table.push(vec!["mathieu_second_order".into(), lam2.into(), mcurve.samples()[0].hbar.into(), a2.into()])?;
    let mut r = Report::new("", table, labels("1/λ²", "H̄(λ) - ½λ²"));
    let mut pts: Vec<(f64, f64)> = lambdas.iter().zip(&rec.residuals).map(|(l, res)| (1.0 / (l * l), *res)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    r.series = vec![Series::new("V_1/2 residual", pts), Series::new("limit", vec![(0.0, rec.value)])];
    r.info("recovered_mean", rec.value);
    r.info("exact_mean", saw.mean());
    r.info("a2_inviscid_mathieu", coeffs.a2);
    r.info("a2_from_curve", a2);
    if let Some(w) = &rec.warning {
        r.info("warning", w);
    }
    r.checks.push(Check::at_most("|recovered mean - (-0.5)|", (rec.value + 0.5).abs(), 1e-3));
    r.checks.push(Check::at_most("|(H̄ - ½λ² - a₁)λ² - a₂| at λ = 50", (a2 - coeffs.a2).abs(), 1e-3));
    Ok(r)
}

fn viscous_expansion(params: &Params) -> Result<Report> {
    let ps = params.p_grid.clone().unwrap_or_else(|| vec![20.0, 30.0, 40.0]);
    let mathieu = FourierPotential::mathieu();
    let dir = make_diophantine(1, DiophantinePreset::Golden, params.k.unwrap_or(32))?;
    let coeffs = viscous_coeffs(&mathieu, &dir)?;
    let v: Potential = mathieu.into();
    let mut table = Table::new(["p", "hbar", "scaled_remainder"]);
    let (mut hs, mut gs) = (Vec::new(), Vec::new());
    for &p in &ps {
        let h = viscous_effective_h(&v, p, 1.0)?;
        let g = (h - p * p - coeffs.a1) * p * p;
        table.push(vec![p.into(), h.into(), g.into()])?;
        hs.push(1.0 / (p * p));
        gs.push(g);
    }
    let limit = extrapolate_to_zero(&hs, &gs);
    table.push(vec![f64::INFINITY.into(), f64::NAN.into(), limit.into()])?;
    let mut r = Report::new("", table, labels("1/p²", "(H̄ - p² - a₁)p²"));
    let mut pts: Vec<(f64, f64)> = hs.iter().copied().zip(gs.iter().copied()).collect();
    pts.push((0.0, limit));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    r.series = vec![Series::new("Hill, V = -cos 2πx", pts)];
    r.info("a2_viscous", coeffs.a2);
    r.info("extrapolated", limit);
    r.checks.push(Check::at_most("|extrapolated a₂ - 1/8|", (limit - 0.125).abs(), 1e-2));
    r.checks.push(Check::at_most("|spectral a₂ - 1/8|", (coeffs.a2 - 0.125).abs(), 1e-12));
    Ok(r)
}

fn spectral_identities(params: &Params) -> Result<Report> {
    let lambdas = params.lambdas.clone().unwrap_or_else(|| linspace(-20.0, 80.0, 25));
    let pots: Vec<(&str, Potential)> = vec![
        ("zero", Potential::zero()),
        ("mathieu", FourierPotential::mathieu().into()),
        ("sawtooth_0.3", sawtooth(0.3)?),
        ("vhat2", PiecewiseLinearPotential::vhat2().into()),
    ];
    let mut table = Table::new(["potential", "lambda", "det", "trace"]);
    let mut worst: f64 = 0.0;
    let mut series = Vec::new();
    for (name, v) in &pots {
        let mut pts = Vec::new();
        for &l in &lambdas {
            let m = monodromy(v, l, 64)?;
            worst = worst.max((m.det() - 1.0).abs());
            table.push(vec![(*name).into(), l.into(), m.det().into(), m.trace().into()])?;
            pts.push((l, m.trace().clamp(-10.0, 10.0)));
        }
        series.push(Series::new(format!("Δ, {name} (clipped)"), pts));
    }
    let grid = linspace(-2.0, 40.0, 22);
    let mathieu: Potential = FourierPotential::mathieu().into();
    let saw = sawtooth(0.3)?;
    let translated = isospectral_distance(&mathieu, &mathieu.shifted(0.3), &grid)?
        .max(isospectral_distance(&saw, &saw.shifted(0.45), &grid)?);
    let reflected = [0.2, 0.3, 0.4]
        .iter()
        .map(|&s| isospectral_distance(&sawtooth(s)?, &sawtooth(1.0 - s)?, &grid))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let double: Potential = FourierPotential::cosine(&[2], -1.0).into();
    // distinct spectra only need to separate somewhere; use the full range
    let distinct = isospectral_distance(&mathieu, &double, &lambdas)?;
    let mut r = Report::new("", table, labels("λ", "Δ(λ)"));
    r.series = series;
    r.checks.push(Check::at_most("max |det M - 1|", worst, 1e-9));
    r.checks.push(Check::at_most("isospectral distance, translates", translated, 1e-8));
    r.checks.push(Check::at_most("isospectral distance, V_s vs V_1-s", reflected, 1e-8));
    r.checks.push(Check::at_least("isospectral distance, cos 2πx vs cos 4πx", distinct, 1e-2));
    Ok(r)
}

struct Bounded {
    label: String,
    samples: Vec<(f64, f64, f64, f64, f64)>,
}

fn bounded_curve(
    label: &str,
    h: &dyn Hamiltonian1d,
    v: &Potential,
    ps: &[f64],
    hbar: impl Fn(f64) -> Result<(f64, f64)>,
) -> Result<Bounded> {
    let samples = ps
        .iter()
        .map(|&p| {
            let (value, tol) = hbar(p)?;
            Ok((p, value, h.value(p) + v.min(), h.value(p) + v.max(), tol))
        })
        .collect::<Result<_>>()?;
    Ok(Bounded { label: label.into(), samples })
}

fn sandwich_bounds(params: &Params) -> Result<Report> {
    let ps = params.p_grid.clone().unwrap_or_else(|| linspace(-3.0, 3.0, 25));
    let n = params.n.unwrap_or(200);
    let t = params.t.unwrap_or(30.0);
    let q = QuasiConvexProfile::quadratic();
    let abs = QuasiConvexProfile::abs();
    let f = NonconvexProfile::standard();
    let saw = sawtooth(0.5)?;
    let mathieu: Potential = FourierPotential::mathieu().into();
    let quad_tol = 1e-9;
    let mut curves = vec![
        bounded_curve("exact, ½p², V_1/2", &q, &saw, &ps, |p| Ok((effective_h_quasiconvex(&q, &saw, p)?, quad_tol)))?,
        bounded_curve("exact, |p|, V_1/2", &abs, &saw, &ps, |p| Ok((effective_h_quasiconvex(&abs, &saw, p)?, quad_tol)))?,
        bounded_curve("exact, ½p², -cos", &q, &mathieu, &ps, |p| {
            Ok((effective_h_quasiconvex(&q, &mathieu, p)?, quad_tol))
        })?,
    ];
    let edges: Vec<f64> = [0.2, 0.5, 0.8].iter().map(|&s| pplus_sawtooth(&f, s)).collect::<Result<_>>()?;
    curves.push(bounded_curve("nonconvex edge, F, V_s", &f, &saw, &edges, |_| Ok((0.0, quad_tol)))?);
    let coarse = [0.0, 1.0, 2.0];
    for (label, h) in [("cell PDE, ½p², V_1/2", &q as &dyn Hamiltonian1d), ("cell PDE, F, V_1/2", &f)] {
        curves.push(bounded_curve(label, h, &saw, &coarse, |p| {
            let e = effective_h_numeric(h, &saw, p, 0.0, n, t)?;
            Ok((e.estimate, e.error_estimate))
        })?);
    }
    let sq = QuasiConvexProfile::power(2.0, 0.0)?;
    let mut hill = bounded_curve("Hill, p², -cos", &sq, &mathieu, &ps, |p| Ok((viscous_effective_h(&mathieu, p, 1.0)?, 1e-8)))?;
    // the viscous lower bound uses the mean of V
    for s in &mut hill.samples {
        s.2 = s.0 * s.0 + mathieu.mean();
    }
    curves.push(hill);

    let mut table = Table::new(["curve", "p", "hbar", "lower", "upper", "tol"]);
    let mut worst = f64::NEG_INFINITY;
    let mut r = Report::new("", Table::default(), labels("p", "H̄(p)"));
    for c in &curves {
        for &(p, h, lo, hi, tol) in &c.samples {
            worst = worst.max(lo - tol - h).max(h - hi - tol);
            table.push(vec![c.label.clone().into(), p.into(), h.into(), lo.into(), hi.into(), tol.into()])?;
        }
        if c.samples.len() > 1 {
            r.series.push(Series::new(c.label.clone(), c.samples.iter().map(|s| (s.0, s.1)).collect()));
        }
    }
    r.table = table;
    r.checks.push(Check::at_most("max bound violation beyond method error", worst, 0.0));
    Ok(r)
}

fn transport_parseval(params: &Params) -> Result<Report> {
    let k = params.k.unwrap_or(32);
    let q = make_diophantine(2, DiophantinePreset::Golden, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut table = Table::new(["spectrum", "transport_residual", "a2_spectral", "a2_quadrature"]);
    let (mut residual, mut parseval) = (0.0f64, 0.0f64);
    let mut pts = Vec::new();
    for trial in 0..5 {
        let v = random_spectrum(&mut rng, 2, 3);
        // random spectra have no k = 0 mode, so V is a valid right-hand side
        let rhs = v.clone();
        let mut res: f64 = 0.0;
        for factor in [1.0, 2.0] {
            let sol = solve_transport(&q, &rhs, factor)?;
            for i in 0..128 {
                let x = [(i as f64 * 0.618_034) % 1.0, (i as f64 * 0.414_214) % 1.0];
                let g = sol.gradient(&x);
                let lhs = factor * (q.q()[0] * g[0] + q.q()[1] * g[1]);
                res = res.max((lhs - rhs.eval(&x)).abs());
            }
        }
        let c = inviscid_coeffs(&v, &q)?;
        // the trapezoid rule on 16² nodes integrates degree ≤ 6 exactly
        let m = 16;
        let mut sum = 0.0;
        for i in 0..m {
            for j in 0..m {
                let g = c.v1.gradient(&[i as f64 / m as f64, j as f64 / m as f64]);
                sum += g[0] * g[0] + g[1] * g[1];
            }
        }
        let quad = 0.5 * sum / (m * m) as f64;
        residual = residual.max(res);
        parseval = parseval.max((quad - c.a2).abs());
        table.push(vec![format!("random_{trial}").into(), res.into(), c.a2.into(), quad.into()])?;
        pts.push((trial as f64, c.a2));
    }
    let single = FourierPotential::cosine(&[1, 0], 1.0);
    let inv = inviscid_coeffs(&single, &q)?.a2;
    let visc = viscous_coeffs(&single, &q)?.a2;
    table.push(vec!["single_mode_inviscid".into(), 0.0.into(), inv.into(), f64::NAN.into()])?;
    table.push(vec!["single_mode_viscous".into(), 0.0.into(), visc.into(), f64::NAN.into()])?;
    let mut r = Report::new("", table, labels("trial", "a₂"));
    r.series = vec![Series::new("a₂ of random spectra", pts)];
    r.info("golden_q", q.q());
    r.checks.push(Check::at_most("max transport residual", residual, 1e-10));
    r.checks.push(Check::at_most("max |a₂ spectral - a₂ quadrature|", parseval, 1e-10));
    r.checks.push(Check::at_most("|a₂ inviscid single mode - 1/4|", (inv - 0.25).abs(), 1e-12));
    r.checks.push(Check::at_most("|a₂ viscous single mode - 1/8|", (visc - 0.125).abs(), 1e-12));
    Ok(r)
}

fn small_error(params: &Params) -> Result<Report> {
    let lambdas = params.lambdas.clone().unwrap_or_else(|| vec![10.0, 20.0, 50.0]);
    let h = 1e-4;
    let v = sawtooth(0.5)?;
    let mut table = Table::new(["lambda", "hbar", "derivative", "defect"]);
    let mut pts = Vec::new();
    for &l in &lambdas {
        let d = (exact_quadratic(&v, l + h)? - exact_quadratic(&v, l - h)?) / (2.0 * h);
        let g = l * l - l * d;
        table.push(vec![l.into(), exact_quadratic(&v, l)?.into(), d.into(), g.into()])?;
        pts.push((l, g));
    }
    let mut r = Report::new("", table, labels("λ", "λ² - λH̄'(λ)"));
    r.series = vec![Series::new("V_1/2", pts.clone())];
    if let Some(&(_, g)) = pts.iter().find(|(l, _)| *l == 50.0) {
        r.checks.push(Check::at_most("|λ² - λH̄'(λ)| at λ = 50", g.abs(), 5e-3));
    }
    let mut sorted = pts;
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let growth = sorted.windows(2).map(|w| w[1].1.abs() - w[0].1.abs()).fold(f64::NEG_INFINITY, f64::max);
    if sorted.len() > 1 {
        r.checks.push(Check::below("max increase of |λ² - λH̄'| along λ", growth, 0.0));
    }
    Ok(r)
}

fn cellpde_crossvalidation(params: &Params) -> Result<Report> {
    let start = Instant::now();
    let n = params.n.unwrap_or(400);
    if n < 32 || !n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("N = {n} must be even and at least 32")));
    }
    let t = params.t.unwrap_or(60.0);
    let ps = params.p_grid.clone().unwrap_or_else(|| vec![0.0, 0.5, 1.0, 2.0]);
    let q = QuasiConvexProfile::quadratic();
    let v = sawtooth(0.5)?;
    let grids = [n / 2, n, 2 * n];
    let mut table = Table::new(["p", "exact", "coarse", "medium", "fine"]);
    let (mut worst, mut trend) = (0.0f64, f64::NEG_INFINITY);
    let (mut exact_pts, mut num_pts) = (Vec::new(), Vec::new());
    for &p in &ps {
        let exact = exact_quadratic(&v, p)?;
        let est: Vec<f64> = grids.iter().map(|&m| Ok(march_1d(&q, &v, p, 0.0, m, t)?.estimate)).collect::<Result<_>>()?;
        worst = worst.max((est[1] - exact).abs());
        trend = trend.max((est[1] - est[2]).abs() - (est[0] - est[1]).abs());
        table.push(vec![p.into(), exact.into(), est[0].into(), est[1].into(), est[2].into()])?;
        exact_pts.push((p, exact));
        num_pts.push((p, est[1]));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let mut r = Report::new("", table, labels("p", "H̄(p)"));
    r.series = vec![Series::new("exact", exact_pts), Series::new(format!("cell PDE, N = {n}"), num_pts)];
    r.info("grids", grids);
    r.checks.push(Check::at_most(format!("max |estimate(N={n}) - exact|"), worst, 2e-2));
    r.checks.push(Check::below("max of |e(N) - e(2N)| - |e(N/2) - e(N)|", trend, 0.0));
    r.checks.push(Check::at_most("runtime in seconds", elapsed, 30.0));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_one_to_one() {
        let mut crit: Vec<u32> = EXPERIMENTS.iter().map(|e| e.criterion).collect();
        crit.sort();
        assert_eq!(crit, (1..=13).collect::<Vec<_>>());
        let mut names: Vec<&str> = EXPERIMENTS.iter().map(|e| e.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 13);
        assert!(lookup("nope").is_none());
        assert!(run_experiment("nope", &Params::default()).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn fast_experiments_are_deterministic() {
        for name in ["hill-baseline", "abs-closed-form", "pplus-separation"] {
            let a = run_experiment(name, &Params::default()).unwrap();
            let b = run_experiment(name, &Params::default()).unwrap();
            assert_eq!(a.table.to_csv(), b.table.to_csv());
            assert!(a.passed(), "{name}: {:?}", a.failures());
        }
    }

    #[test]
    fn overrides_apply() {
        let p = Params { s: Some(vec![0.3]), ..Default::default() };
        let r = run_experiment("pplus-separation", &p).unwrap();
        assert_eq!(r.table.rows.len(), 1);
        assert_eq!(r.checks.len(), 1);
    }
}
