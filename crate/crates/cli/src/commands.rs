//! Report builders for the single-computation subcommands.

use effham_core::asympt::{inviscid_coeffs, make_diophantine, viscous_coeffs, DiophantinePreset};
use effham_core::cellpde::{effective_h_numeric, effective_h_numeric_2d, RadialHamiltonian};
use effham_core::ham1d::{Hamiltonian, Hamiltonian1d, HamiltonianDescriptor, NonconvexProfile, QuasiConvexProfile};
use effham_core::hill::{viscous_effective_h, DiscriminantScan};
use effham_core::inviscid1d::{
    closed_form_abs, effective_curve_quasiconvex, effective_h_quasiconvex, flat_piece, pminus_multiwell,
    pplus_multiwell, pplus_sawtooth,
};
use effham_core::plot::{PlotLabels, Series};
use effham_core::potential::{cdf_distance, DistributionFunction, Potential, PotentialDescriptor};
use effham_core::report::{Cell, Check, Report, Table};
use effham_core::Error;

/// Why a command did not produce a passing report.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or descriptors: exit code 2.
    Usage(String),
    /// The computation failed: exit code 1.
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Descriptor(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

pub type Outcome = Result<Report, Failure>;

fn labels(title: &str, x: &str, y: &str) -> PlotLabels {
    PlotLabels { title: title.into(), x: x.into(), y: y.into() }
}

pub fn hamiltonian(json: &str) -> Result<Hamiltonian, Failure> {
    Ok(HamiltonianDescriptor::parse(json)?.build()?)
}

pub fn potential_1d(json: &str) -> Result<Potential, Failure> {
    Ok(PotentialDescriptor::parse(json)?.build()?)
}

/// Largest amount by which `(p, hbar, lower, upper, tol)` rows leave their bounds.
fn sandwich_violation(rows: &[(f64, f64, f64, f64, f64)]) -> f64 {
    rows.iter().map(|&(_, h, lo, hi, tol)| (lo - tol - h).max(h - hi - tol)).fold(f64::NEG_INFINITY, f64::max)
}

fn bounded_table(rows: &[(f64, f64, f64, f64, f64)], method: &str) -> Result<Table, Failure> {
    let mut t = Table::new(["p", "hbar", "method", "err", "lower", "upper"]);
    for &(p, h, lo, hi, tol) in rows {
        t.push(vec![p.into(), h.into(), method.into(), tol.into(), lo.into(), hi.into()])?;
    }
    Ok(t)
}

pub fn effective1d(h_json: &str, v_json: &str, ps: &[f64]) -> Outcome {
    let desc = HamiltonianDescriptor::parse(h_json)?;
    let h = match desc.build()? {
        Hamiltonian::QuasiConvex(h) => h,
        Hamiltonian::Nonconvex(_) => {
            return Err(Failure::Usage("effective1d needs a quasi-convex H; use pplus or cellpde for F".into()))
        }
    };
    let v = potential_1d(v_json)?;
    let curve = effective_curve_quasiconvex(&h, &v, ps)?;
    let rows: Vec<_> = curve
        .samples()
        .iter()
        .map(|s| (s.p, s.hbar, h.eval(s.p) + v.min(), h.eval(s.p) + v.max(), s.err.max(1e-9)))
        .collect();
    let mut r = Report::new("effective1d", bounded_table(&rows, curve.method().tag())?, labels("Exact effective Hamiltonian", "p", "H̄(p)"));
    r.series = vec![
        Series::from_curve("H̄", &curve),
        Series::new("H + min V", rows.iter().map(|x| (x.0, x.2)).collect()),
        Series::new("H + max V", rows.iter().map(|x| (x.0, x.3)).collect()),
    ];
    let (pm, pp) = flat_piece(&h, &v)?;
    r.info("flat_piece", [pm, pp]);
    r.checks.push(Check::at_most("sandwich violation", sandwich_violation(&rows), 0.0));
    if desc == HamiltonianDescriptor::Abs {
        let worst = curve.samples().iter().map(|s| (s.hbar - closed_form_abs(&v, s.p)).abs()).fold(0.0, f64::max);
        r.checks.push(Check::at_most("max |H̄ - max(max V, |p| + ∫V)|", worst, 1e-10));
    }
    Ok(r)
}

pub fn pplus(theta1: f64, theta2: f64, v_json: Option<&str>, ss: Option<&[f64]>) -> Outcome {
    let f = NonconvexProfile::new(theta1, theta2)?;
    let mut table = Table::new(["potential", "pminus", "pplus"]);
    let mut r = Report::new("pplus", Table::default(), labels("Flat-piece edges of F(|p|) + V", "s", "p₊"));
    let mut edge_rows = Vec::new();
    if let Some(ss) = ss {
        let mut pts = Vec::new();
        for &s in ss {
            let p = pplus_sawtooth(&f, s)?;
            let v: Potential = effham_core::potential::PiecewiseLinearPotential::sawtooth(s)?.into();
            let m = pminus_multiwell(&f, &v.as_piecewise().expect("sawtooth is piecewise linear").clone())?;
            table.push(vec![format!("sawtooth_{s}").into(), m.into(), p.into()])?;
            pts.push((s, p));
            edge_rows.push((p, v.min(), v.max()));
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        r.series.push(Series::new("p₊,s", pts));
    }
    if let Some(json) = v_json {
        let v = potential_1d(json)?;
        let pw = v
            .as_piecewise()
            .ok_or_else(|| Failure::Usage("pplus needs a piecewise-linear potential".into()))?
            .clone();
        let p = pplus_multiwell(&f, &pw)?;
        let m = pminus_multiwell(&f, &pw)?;
        table.push(vec!["given".into(), m.into(), p.into()])?;
        edge_rows.push((p, v.min(), v.max()));
        if r.series.is_empty() {
            r.labels = labels("Potential", "x", "V(x)");
            r.series.push(Series::new("V", pw.breakpoints().iter().copied().zip(pw.values().iter().copied()).collect()));
        }
        r.info("pplus", p);
        r.info("pminus", m);
    }
    if edge_rows.is_empty() {
        return Err(Failure::Usage("give --potential or --s".into()));
    }
    // at the edge H̄ = min F + max V = max V, which must lie in the sandwich
    let worst = edge_rows
        .iter()
        .map(|&(p, lo, hi)| {
            let hbar = hi;
            (f.value(p) + lo - hbar).max(hbar - f.value(p) - hi)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    r.checks.push(Check::at_most("edge sandwich violation", worst, 1e-12));
    r.table = table;
    Ok(r)
}

pub fn hill_curve(v_json: &str, ps: &[f64], d: f64) -> Outcome {
    let v = potential_1d(v_json)?;
    let mut rows = Vec::new();
    for &p in ps {
        let h = viscous_effective_h(&v, p, d)?;
        rows.push((p, h, p * p + v.mean(), p * p + v.max(), 1e-8 * (1.0 + h.abs())));
    }
    let mut r = Report::new("hill", bounded_table(&rows, "hill-spectral")?, labels("Viscous effective Hamiltonian", "p", "H̄(p)"));
    r.series = vec![
        Series::new("H̄", rows.iter().map(|x| (x.0, x.1)).collect()),
        Series::new("p² + ∫V", rows.iter().map(|x| (x.0, x.2)).collect()),
        Series::new("p² + max V", rows.iter().map(|x| (x.0, x.3)).collect()),
    ];
    r.info("d", d);
    r.checks.push(Check::at_most("sandwich violation", sandwich_violation(&rows), 0.0));
    Ok(r)
}

pub fn hill_scan(v_json: &str, lo: f64, hi: f64, steps: usize) -> Outcome {
    let v = potential_1d(v_json)?;
    let scan = DiscriminantScan::new(&v, lo, hi, steps)?;
    let mut table = Table::new(["lambda", "delta"]);
    for (&l, &d) in scan.lambdas.iter().zip(&scan.deltas) {
        table.push(vec![l.into(), d.into()])?;
    }
    let mut r = Report::new("hill", table, labels("Hill discriminant (clipped to ±10)", "λ", "Δ(λ)"));
    let clip = |d: f64| d.clamp(-10.0, 10.0);
    r.series = vec![
        Series::new("Δ", scan.lambdas.iter().zip(&scan.deltas).map(|(&l, &d)| (l, clip(d))).collect()),
        Series::new("+2", vec![(lo, 2.0), (hi, 2.0)]),
        Series::new("-2", vec![(lo, -2.0), (hi, -2.0)]),
    ];
    let edges: Vec<f64> = scan.band_edges.iter().map(|&i| scan.lambdas[i]).collect();
    r.info("band_edge_brackets", edges);
    let nonfinite = scan.deltas.iter().filter(|d| !d.is_finite()).count();
    r.checks.push(Check::at_most("nonfinite discriminant values", nonfinite as f64, 0.0));
    Ok(r)
}

pub fn asympt(v_json: &str, preset: &str, k: i64, lambdas: &[f64]) -> Outcome {
    let v = PotentialDescriptor::parse(v_json)?.build_fourier()?;
    let preset = DiophantinePreset::parse(preset)?;
    // a degenerate direction is a bad choice of preset, not a numeric failure
    let q = make_diophantine(v.dim(), preset, k).map_err(|e| Failure::Usage(e.to_string()))?;
    let v = v.truncated(k);
    let inv = inviscid_coeffs(&v, &q)?;
    let visc = viscous_coeffs(&v, &q)?;
    let q2 = q.norm() * q.norm();
    let one_d = v.dim() == 1;
    let mut header = vec!["lambda", "inviscid_expansion", "viscous_expansion"];
    if one_d {
        header.extend(["inviscid_exact", "viscous_hill"]);
    }
    let mut table = Table::new(header);
    let (mut s_inv, mut s_visc, mut s_exact, mut s_hill) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let pot: Potential = if one_d { v.clone().into() } else { Potential::zero() };
    for &l in lambdas {
        let e_inv = 0.5 * l * l * q2 + inv.a1 + inv.a2 / (l * l);
        let e_visc = l * l * q2 + visc.a1 + visc.a2 / (l * l);
        let mut row = vec![Cell::Num(l), e_inv.into(), e_visc.into()];
        s_inv.push((l, e_inv - 0.5 * l * l * q2));
        s_visc.push((l, e_visc - l * l * q2));
        if one_d {
            let p = l * q.q()[0];
            let exact = effective_h_quasiconvex(&QuasiConvexProfile::quadratic(), &pot, p)?;
            let hill = viscous_effective_h(&pot, p, 1.0)?;
            row.push(exact.into());
            row.push(hill.into());
            s_exact.push((l, exact - 0.5 * l * l * q2));
            s_hill.push((l, hill - l * l * q2));
        }
        table.push(row)?;
    }
    let mut r = Report::new("asympt", table, labels("Large-momentum expansion", "λ", "H̄(λQ) - H(λQ)"));
    r.series = vec![Series::new("inviscid a₁ + a₂/λ²", s_inv), Series::new("viscous a₁ + a₂/λ²", s_visc)];
    if one_d {
        r.series.push(Series::new("exact, ½p²", s_exact));
        r.series.push(Series::new("Hill, p²", s_hill));
    }
    r.info("q", q.q());
    r.info("a1", inv.a1);
    r.info("a2_inviscid", inv.a2);
    r.info("a2_viscous", visc.a2);
    r.checks.push(Check::at_least("a₂ inviscid", inv.a2, 0.0));
    // the viscous corrector is half the inviscid one
    r.checks.push(Check::at_most("|a₂ viscous - a₂ inviscid / 2|", (visc.a2 - 0.5 * inv.a2).abs(), 1e-12 * (1.0 + inv.a2)));
    Ok(r)
}

fn cdf_series(name: &str, v: &Potential, resolution: usize) -> Vec<(String, DistributionFunction)> {
    let mut out = vec![(name.to_string(), v.cdf(resolution))];
    if let Some(pw) = v.as_piecewise() {
        if let Ok((dec, inc)) = pw.monotone_piece_cdfs() {
            out.push((format!("{name} decreasing"), dec));
            out.push((format!("{name} increasing"), inc));
        }
    }
    out
}

pub fn cdf(v_json: &str, compare: Option<&str>, resolution: usize) -> Outcome {
    let v = potential_1d(v_json)?;
    let mut all = cdf_series("V", &v, resolution);
    let mut r = Report::new("cdf", Table::default(), labels("Distribution of V", "t", "|{V ≤ t}|"));
    if let Some(json) = compare {
        let w = potential_1d(json)?;
        let other = cdf_series("W", &w, resolution);
        let full = cdf_distance(&all[0].1, &other[0].1);
        r.info("distance", full);
        if all.len() == 3 && other.len() == 3 {
            r.info("distance_decreasing", cdf_distance(&all[1].1, &other[1].1));
            r.info("distance_increasing", cdf_distance(&all[2].1, &other[2].1));
        }
        all.extend(other);
    }
    let mut table = Table::new(["series", "t", "mass"]);
    for (name, f) in &all {
        for &(t, m) in f.knots() {
            table.push(vec![name.clone().into(), t.into(), m.into()])?;
        }
        r.series.push(Series::from_cdf(name.clone(), f));
    }
    let total = all[0].1.total_mass();
    r.table = table;
    r.checks.push(Check::at_most("|total mass - 1|", (total - 1.0).abs(), 1e-12));
    Ok(r)
}

pub struct CellArgs<'a> {
    pub h_json: &'a str,
    pub v_json: &'a str,
    pub ps: &'a [f64],
    pub p2: f64,
    pub n: usize,
    pub t: f64,
    pub d: f64,
}

pub fn cellpde(a: &CellArgs) -> Outcome {
    let h = hamiltonian(a.h_json)?;
    let desc = PotentialDescriptor::parse(a.v_json)?;
    let two_d = matches!(desc.build_fourier(), Ok(ref f) if f.dim() == 2);
    let mut rows = Vec::new();
    if two_d {
        if a.d != 0.0 {
            return Err(Failure::Usage("the 2D solver is inviscid; drop --d".into()));
        }
        let v = desc.build_fourier()?;
        let profile = match h {
            Hamiltonian::QuasiConvex(q) => q,
            Hamiltonian::Nonconvex(_) => return Err(Failure::Usage("2D runs take a quasi-convex radial profile".into())),
        };
        let (lo, hi) = v.sampled_range(256);
        let hr = RadialHamiltonian { profile: profile.clone() };
        for &p in a.ps {
            let e = effective_h_numeric_2d(&hr, &v, [p, a.p2], a.n, a.t)?;
            let hp = profile.eval(p.hypot(a.p2));
            rows.push((p, e.estimate, hp + lo, hp + hi, e.error_estimate));
        }
    } else {
        let v = desc.build()?;
        for &p in a.ps {
            let e = effective_h_numeric(&h, &v, p, a.d, a.n, a.t)?;
            rows.push((p, e.estimate, h.value(p) + v.min(), h.value(p) + v.max(), e.error_estimate));
        }
    }
    let mut r = Report::new("cellpde", bounded_table(&rows, "numeric-pde")?, labels("Cell-problem estimate", "p", "H̄(p)"));
    r.series = vec![
        Series::new("H̄ (numeric)", rows.iter().map(|x| (x.0, x.1)).collect()),
        Series::new("H + min V", rows.iter().map(|x| (x.0, x.2)).collect()),
        Series::new("H + max V", rows.iter().map(|x| (x.0, x.3)).collect()),
    ];
    r.info("N", a.n);
    r.info("T", a.t);
    r.info("d", a.d);
    if two_d {
        r.info("p2", a.p2);
    }
    r.checks.push(Check::at_most("sandwich violation beyond error estimate", sandwich_violation(&rows), 0.0));
    Ok(r)
}
