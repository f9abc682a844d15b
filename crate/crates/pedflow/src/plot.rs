//! Self-contained SVG charts: scatter with fitted curves, profiles and
//! histograms.

use std::fmt::Write as _;
use std::path::Path;

use pedflow_core::metrics::{histogram, FundamentalFit};

use crate::HarnessError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const TICKS: usize = 5;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
        }
    }
}

#[derive(Debug, Clone)]
pub enum PlotKind {
    /// Points with each fit drawn as a curve over the data's x range.
    ScatterFit(Vec<FundamentalFit>),
    /// Points joined in x order.
    Profile,
    /// Bars of the x values of the first series.
    Histogram { bin_width: f64 },
}

#[derive(Debug, Clone, Default)]
pub struct Labels {
    pub title: String,
    pub x: String,
    pub y: String,
}

struct Axes {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Axes {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let span = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if lo == hi {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        let (x0, x1) = span(&mut xs.clone().filter(|v| v.is_finite()));
        let (y0, y1) = span(&mut ys.clone().filter(|v| v.is_finite()));
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn frame(svg: &mut String, axes: &Axes, labels: &Labels) {
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<path d="M{l} {t} L{l} {b} L{r} {b}" stroke="black" fill="none"/>"#
    )
    .unwrap();
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let xv = axes.x0 + f * (axes.x1 - axes.x0);
        let yv = axes.y0 + f * (axes.y1 - axes.y0);
        let (x, y) = (axes.px(xv), axes.py(yv));
        writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            b + 5.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text class="xtick" x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"#,
            b + 18.0,
            tick_label(xv)
        )
        .unwrap();
        writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{l}" y2="{y:.2}" stroke="black"/>"#,
            l - 5.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text class="ytick" x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"#,
            l - 8.0,
            y + 4.0,
            tick_label(yv)
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        MARGIN / 2.0,
        escape(&labels.title)
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(&labels.x)
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="15" y="{:.1}" text-anchor="middle" font-size="12" transform="rotate(-90 15 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(&labels.y)
    )
    .unwrap();
}

fn legend(svg: &mut String, entries: &[(String, &str)]) {
    for (i, (label, color)) in entries.iter().enumerate() {
        let y = MARGIN + 14.0 * i as f64;
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{y:.1}" text-anchor="end" font-size="11" fill="{color}">{}</text>"#,
            WIDTH - MARGIN,
            escape(label)
        )
        .unwrap();
    }
}

/// Renders the chart as SVG text. `None` for an empty series list.
pub fn render(series: &[Series], kind: &PlotKind, labels: &Labels) -> Option<String> {
    if series.iter().all(|s| s.points.is_empty()) {
        return None;
    }
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    match kind {
        PlotKind::Histogram { bin_width } => {
            let values: Vec<f64> = series[0].points.iter().map(|p| p.0).collect();
            let bins = histogram(&values, *bin_width);
            let axes = Axes::new(
                bins.iter().flat_map(|b| [b.0, b.1]),
                bins.iter().map(|b| b.2 as f64).chain([0.0]),
            );
            frame(&mut svg, &axes, labels);
            for &(lo, hi, count) in &bins {
                let (x, w) = (axes.px(lo), axes.px(hi) - axes.px(lo));
                let y = axes.py(count as f64);
                writeln!(
                    svg,
                    r#"<rect class="bar" data-count="{count}" x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{:.2}" fill="{}" stroke="white"/>"#,
                    axes.py(0.0) - y,
                    COLORS[0]
                )
                .unwrap();
            }
        }
        PlotKind::Profile | PlotKind::ScatterFit(_) => {
            let all = series.iter().flat_map(|s| s.points.iter());
            let axes = Axes::new(all.clone().map(|p| p.0), all.map(|p| p.1));
            frame(&mut svg, &axes, labels);
            let mut entries = Vec::new();
            for (i, s) in series.iter().enumerate() {
                let color = COLORS[i % COLORS.len()];
                entries.push((s.label.clone(), color));
                let mut pts = s.points.clone();
                if matches!(kind, PlotKind::Profile) {
                    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                    let path: Vec<String> = pts
                        .iter()
                        .enumerate()
                        .map(|(j, p)| {
                            format!(
                                "{}{:.2} {:.2}",
                                if j == 0 { "M" } else { "L" },
                                axes.px(p.0),
                                axes.py(p.1)
                            )
                        })
                        .collect();
                    writeln!(svg, r#"<path d="{}" stroke="{color}" fill="none"/>"#, path.join(" ")).unwrap();
                } else {
                    for p in &pts {
                        writeln!(
                            svg,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                            axes.px(p.0),
                            axes.py(p.1)
                        )
                        .unwrap();
                    }
                }
            }
            if let PlotKind::ScatterFit(fits) = kind {
                for (i, fit) in fits.iter().enumerate() {
                    let color = COLORS[(series.len() + i) % COLORS.len()];
                    let steps = 50;
                    let path: Vec<String> = (0..=steps)
                        .map(|j| axes.x0 + (axes.x1 - axes.x0) * j as f64 / steps as f64)
                        .map(|x| (x, fit.predict(x)))
                        .filter(|(_, y)| y.is_finite() && *y >= axes.y0 && *y <= axes.y1)
                        .enumerate()
                        .map(|(j, (x, y))| {
                            format!("{}{:.2} {:.2}", if j == 0 { "M" } else { "L" }, axes.px(x), axes.py(y))
                        })
                        .collect();
                    writeln!(
                        svg,
                        r#"<path class="fit" data-model="{}" data-c0="{}" data-c1="{}" d="{}" stroke="{color}" stroke-dasharray="5 3" fill="none"/>"#,
                        fit.model.name(),
                        fit.coefficients[0],
                        fit.coefficients[1],
                        path.join(" ")
                    )
                    .unwrap();
                    entries.push((format!("{} fit (r2 {:.3})", fit.model.name(), fit.r2), color));
                }
            }
            legend(&mut svg, &entries);
        }
    }
    svg.push_str("</svg>\n");
    Some(svg)
}

/// Writes the chart to `path`. Returns false, writing nothing, when there
/// is no data.
pub fn emit_plot(series: &[Series], kind: &PlotKind, labels: &Labels, path: &Path) -> Result<bool, HarnessError> {
    match render(series, kind, labels) {
        Some(svg) => {
            std::fs::write(path, svg)?;
            Ok(true)
        }
        None => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pedflow_core::metrics::{fit_fundamental, FitModel};

    #[test]
    fn one_point_renders() {
        let svg = render(
            &[Series::new("a", vec![(1.0, 2.0)])],
            &PlotKind::Profile,
            &Labels::default(),
        )
        .unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("class=\"xtick\""));
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn empty_is_skipped() {
        assert!(render(&[], &PlotKind::Profile, &Labels::default()).is_none());
        assert!(render(&[Series::new("a", vec![])], &PlotKind::Profile, &Labels::default()).is_none());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.svg");
        assert!(!emit_plot(&[], &PlotKind::Profile, &Labels::default(), &path).unwrap());
        assert!(!path.exists());
    }

    #[test]
    fn fit_overlay_carries_coefficients() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| (i as f64 * 0.1, 1.5 - 2.0 * i as f64 * 0.1)).collect();
        let fit = fit_fundamental(&pts, FitModel::Linear).unwrap();
        let svg = render(
            &[Series::new("runs", pts)],
            &PlotKind::ScatterFit(vec![fit.clone()]),
            &Labels::default(),
        )
        .unwrap();
        assert!(svg.contains(&format!("data-c0=\"{}\"", fit.coefficients[0])));
        assert!(svg.contains(&format!("data-c1=\"{}\"", fit.coefficients[1])));
    }

    #[test]
    fn histogram_counts_sum_to_n() {
        let pts: Vec<(f64, f64)> = (0..37).map(|i| ((i as f64 * 0.137) % 2.0, 0.0)).collect();
        let svg = render(
            &[Series::new("v", pts)],
            &PlotKind::Histogram { bin_width: 0.1 },
            &Labels::default(),
        )
        .unwrap();
        let total: usize = svg
            .split("data-count=\"")
            .skip(1)
            .map(|s| s[..s.find('"').unwrap()].parse::<usize>().unwrap())
            .sum();
        assert_eq!(total, 37);
    }
}
