//! Minimal SVG line charts.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::experiment::{mean, ExperimentKind, ExperimentOutput, ExperimentSpec};
use crate::output::Label;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

/// A titled chart of named polylines.
#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick(x: f64) -> String {
    if x != 0.0 && (x.abs() >= 1e4 || x.abs() < 1e-2) {
        format!("{x:.2e}")
    } else {
        format!("{x:.3}").trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

impl LineChart {
    pub fn to_svg(&self) -> String {
        let (w, h) = (760.0, 460.0);
        let (left, right, top, bottom) = (80.0, 170.0, 40.0, 60.0);
        let points = self.series.iter().flat_map(|(_, p)| p.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 == x0 {
            x1 = x0 + 1.0;
        }
        if y1 == y0 {
            y1 = y0 + 1.0;
        }
        let pw = w - left - right;
        let ph = h - top - bottom;
        let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| top + ph - (y - y0) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, left + pw / 2.0, escape(&self.title));
        let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, sx(xv), top + ph + 18.0, tick(xv));
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, left - 6.0, sy(yv) + 4.0, tick(yv));
            let _ = writeln!(s, r##"<line x1="{left}" x2="{:.1}" y1="{:.1}" y2="{:.1}" stroke="#ddd"/>"##, left + pw, sy(yv), sy(yv));
        }
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, left + pw / 2.0, h - 16.0, escape(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
            top + ph / 2.0,
            top + ph / 2.0,
            escape(&self.y_label)
        );
        for (i, (name, pts)) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let path: Vec<String> = pts
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"#, path.join(" "));
            let ly = top + 14.0 + 18.0 * i as f64;
            let lx = left + pw + 12.0;
            let _ = writeln!(s, r#"<line x1="{lx}" x2="{}" y1="{ly}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 22.0);
            let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 28.0, ly + 4.0, escape(name));
        }
        s.push_str("</svg>\n");
        s
    }
}

/// The natural chart of an experiment: mean metric per iteration for
/// convergence runs, mean metric against `M` for sweeps, median wall time
/// against `M` for timing runs.
pub fn chart_for(spec: &ExperimentSpec, output: &ExperimentOutput) -> LineChart {
    let app = spec.application.name();
    match spec.kind {
        ExperimentKind::Convergence => {
            let mut series = Vec::new();
            for &method in &spec.methods {
                for &m in &spec.m_list {
                    // Per realization metric trace, extended by its last value.
                    let mut traces: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
                    for row in output.rows.iter().filter(|r| r.method == method && r.m == m) {
                        if let (Label::Index(r), Some(_)) = (row.realization, row.iteration) {
                            traces.entry(r).or_default().push(row.metric_bits);
                        }
                    }
                    let len = traces.values().map(Vec::len).max().unwrap_or(0);
                    let points = (0..len)
                        .filter_map(|t| {
                            let vals: Vec<f64> = traces.values().filter_map(|tr| tr.get(t).or(tr.last()).copied()).collect();
                            mean(&vals).map(|y| ((t + 1) as f64, y))
                        })
                        .collect();
                    series.push((format!("{method} M={m}"), points));
                }
            }
            LineChart {
                title: format!("Convergence ({app})"),
                x_label: "iteration".into(),
                y_label: "mean metric [bits]".into(),
                series,
            }
        }
        ExperimentKind::MSweepSecrecy | ExperimentKind::MSweepWsr | ExperimentKind::Timing => {
            let timing = spec.kind == ExperimentKind::Timing;
            let label = if timing { Label::Median } else { Label::Mean };
            let series = spec
                .methods
                .iter()
                .map(|&method| {
                    let points = output
                        .rows
                        .iter()
                        .filter(|r| r.method == method && r.realization == label)
                        .map(|r| (r.m as f64, if timing { r.elapsed_ms.unwrap_or(f64::NAN) } else { r.metric_bits }))
                        .collect();
                    (method.to_string(), points)
                })
                .collect();
            LineChart {
                title: if timing { format!("Running time ({app})") } else { format!("Average metric versus M ({app})") },
                x_label: "M".into(),
                y_label: if timing { "median wall time [ms]".into() } else { "mean metric [bits]".into() },
                series,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_series_and_escapes_text() {
        let chart = LineChart {
            title: "a < b & c".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![("one".into(), vec![(0.0, 1.0), (1.0, 2.0)]), ("two".into(), vec![(0.5, f64::NAN)])],
        };
        let svg = chart.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a &lt; b &amp; c"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn empty_chart_is_well_formed() {
        let svg = LineChart {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            series: vec![],
        }
        .to_svg();
        assert!(svg.contains("</svg>"));
        assert!(!svg.contains("NaN"));
    }
}
