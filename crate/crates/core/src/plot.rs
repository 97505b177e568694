//! Minimal deterministic SVG line plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::curve::EffectiveCurve;
use crate::error::{Error, Result};
use crate::potential::DistributionFunction;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

/// One labelled polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points }
    }

    pub fn from_curve(label: impl Into<String>, curve: &EffectiveCurve) -> Self {
        Self::new(label, curve.samples().iter().map(|s| (s.p, s.hbar)).collect())
    }

    pub fn from_cdf(label: impl Into<String>, cdf: &DistributionFunction) -> Self {
        Self::new(label, cdf.knots().to_vec())
    }
}

/// Axis titles and plot heading.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlotLabels {
    pub title: String,
    pub x: String,
    pub y: String,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi - lo > 1e-12 * hi.abs().max(lo.abs()).max(1.0) {
        (lo, hi)
    } else {
        let pad = 0.5 * lo.abs().max(1.0);
        (lo - pad, hi + pad)
    }
}

/// Renders the series as a self-contained SVG document.
pub fn render_svg(series: &[Series], labels: &PlotLabels) -> Result<String> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::Precondition("nothing to plot".into()));
    }
    if series.iter().flat_map(|s| &s.points).any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Precondition("plot data must be finite".into()));
    }
    let (x0, x1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(&labels.title));
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (x, y) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(x), sy(y));
        let _ = writeln!(out, r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, TOP + ph, TOP + ph + 5.0);
        let _ = writeln!(out, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, tick(x));
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, py + 4.0, tick(y));
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 10.0, escape(&labels.x));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&labels.y)
    );
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut pts = String::new();
        for (i, &(x, y)) in s.points.iter().enumerate() {
            if i > 0 {
                pts.push(' ');
            }
            let _ = write!(pts, "{:.3},{:.3}", sx(x), sy(y));
        }
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>"#);
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(out, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&s.label));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes [`render_svg`] output to `path`.
pub fn emit_plot(series: &[Series], labels: &PlotLabels, path: &Path) -> Result<()> {
    let svg = render_svg(series, labels)?;
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PiecewiseLinearPotential;

    fn labels() -> PlotLabels {
        PlotLabels { title: "t".into(), x: "p".into(), y: "H".into() }
    }

    #[test]
    fn three_points_one_polyline() {
        let svg = render_svg(&[Series::new("a", vec![(0.0, 0.0), (1.0, 1.0), (2.0, 4.0)])], &labels()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts.split(' ').count(), 3);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(render_svg(&[], &labels()), Err(Error::Precondition(_))));
        assert!(matches!(render_svg(&[Series::new("a", vec![])], &labels()), Err(Error::Precondition(_))));
        assert!(render_svg(&[Series::new("a", vec![(0.0, f64::NAN)])], &labels()).is_err());
    }

    #[test]
    fn deterministic_and_escaped() {
        let s = [Series::new("V<s>", vec![(0.0, 1.0), (0.5, -1.0)]), Series::new("b", vec![(0.2, 0.3)])];
        let a = render_svg(&s, &labels()).unwrap();
        assert_eq!(a, render_svg(&s, &labels()).unwrap());
        assert!(a.contains("V&lt;s&gt;"));
    }

    #[test]
    fn equal_cdfs_give_identical_vertices() {
        let c1 = PiecewiseLinearPotential::sawtooth(0.2).unwrap().cdf();
        let c2 = PiecewiseLinearPotential::sawtooth(0.8).unwrap().cdf();
        let svg = render_svg(&[Series::from_cdf("0.2", &c1), Series::from_cdf("0.8", &c2)], &labels()).unwrap();
        let polys: Vec<&str> = svg.split("points=\"").skip(1).map(|s| s.split('"').next().unwrap()).collect();
        assert_eq!(polys.len(), 2);
        assert_eq!(polys[0], polys[1]);
    }

    #[test]
    fn flat_data_gets_a_range() {
        let svg = render_svg(&[Series::new("c", vec![(1.0, 2.0)])], &labels()).unwrap();
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let r = emit_plot(&[Series::new("a", vec![(0.0, 0.0)])], &labels(), Path::new("/nonexistent-dir/x/plot.svg"));
        assert!(matches!(r, Err(Error::Io(_))));
    }
}
