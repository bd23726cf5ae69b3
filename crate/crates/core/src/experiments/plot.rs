//! Self-contained SVG line plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::ExperimentRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Record metric plotted against `p`.
    pub metric: String,
    pub log_x: bool,
    pub log_y: bool,
}

impl PlotSpec {
    /// Log-log plot of `metric` against `p`.
    pub fn decay(metric: &str) -> Self {
        Self {
            title: format!("{metric} vs p"),
            x_label: "p".into(),
            y_label: metric.into(),
            metric: metric.into(),
            log_x: true,
            log_y: true,
        }
    }

    /// Linear plot of `metric` against `p`.
    pub fn linear(metric: &str) -> Self {
        Self {
            log_x: false,
            log_y: false,
            ..Self::decay(metric)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// One series per `(experiment, n)`, split further by `Δ` for the `delta` experiment.
/// Points are `(p, value)` sorted by `p`; fit rows (`p = 0`) are skipped.
pub fn series_from_records(records: &[ExperimentRecord], metric: &str) -> Vec<Series> {
    let mut groups: BTreeMap<(String, usize, u64), (String, Vec<(f64, f64)>)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.metric == metric && r.p > 0) {
        let by_delta = r.experiment == "delta";
        let key = (r.experiment.clone(), r.n, if by_delta { r.delta.to_bits() } else { 0 });
        let label = if by_delta {
            format!("{} n={} delta={}", r.experiment, r.n, r.delta)
        } else {
            format!("{} n={}", r.experiment, r.n)
        };
        groups
            .entry(key)
            .or_insert_with(|| (label, Vec::new()))
            .1
            .push((r.p as f64, r.value));
    }
    groups
        .into_values()
        .map(|(label, mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series { label, points }
        })
        .collect()
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let tf = |v: f64| if log { v.log10() } else { v };
        let (mut lo, mut hi) = values
            .filter(|v| v.is_finite() && (!log || *v > 0.0))
            .map(tf)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        if log {
            (lo, hi) = (lo.floor(), hi.ceil());
        }
        Self { log, lo, hi }
    }

    fn unit(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let t = if self.log { v.log10() } else { v };
        Some((t - self.lo) / (self.hi - self.lo))
    }

    /// Tick positions in data units.
    fn ticks(&self) -> Vec<f64> {
        if self.log {
            (self.lo as i32..=self.hi as i32).map(|e| 10f64.powi(e)).collect()
        } else {
            (0..=4)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / 4.0)
                .collect()
        }
    }
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        format!("1e{}", v.log10().round() as i32)
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the series; output depends only on the inputs.
pub fn render_svg(spec: &PlotSpec, series: &[Series]) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let xa = Axis::new(all().map(|p| p.0), spec.log_x);
    let ya = Axis::new(all().map(|p| p.1), spec.log_y);
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |u: f64| LEFT + u * pw;
    let sy = |u: f64| TOP + (1.0 - u) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&spec.title)
    );
    let _ = writeln!(
        s,
        r#"<rect class="axes" x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    for t in xa.ticks() {
        if let Some(u) = xa.unit(t) {
            let x = sx(u);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + ph,
                TOP + ph + 5.0,
                TOP + ph + 18.0,
                tick_label(t, xa.log)
            );
        }
    }
    for t in ya.ticks() {
        if let Some(u) = ya.unit(t) {
            let y = sy(u);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                y + 4.0,
                tick_label(t, ya.log)
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&spec.y_label)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> = ser
            .points
            .iter()
            .filter_map(|&(x, y)| Some((sx(xa.unit(x)?), sy(ya.unit(y)?))))
            .collect();
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        for (x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#);
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<g class="legend-entry"><line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}
