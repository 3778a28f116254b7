//! Minimal self-contained SVG line plots. Output depends only on the input
//! table and style.

use std::fmt::Write as _;
use std::path::Path;

use crate::table::{read_table, Table};
use crate::{CliError, Result};

#[derive(Debug, Clone)]
pub struct Series {
    pub column: String,
    pub label: String,
    pub color: String,
    pub dashed: bool,
    pub markers: bool,
    /// Rescale so the series maximum matches the largest unscaled value.
    pub scaled: bool,
}

impl Series {
    pub fn line(column: &str, label: &str, color: &str) -> Self {
        Series {
            column: column.into(),
            label: label.into(),
            color: color.into(),
            dashed: false,
            markers: false,
            scaled: false,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }

    pub fn markers(mut self) -> Self {
        self.markers = true;
        self
    }

    pub fn scaled(mut self) -> Self {
        self.scaled = true;
        self
    }
}

#[derive(Debug, Clone)]
pub struct PlotStyle {
    pub title: String,
    pub x_column: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const W: f64 = 760.0;
const H: f64 = 480.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 210.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let m = if r < 1.5 {
        1.0
    } else if r < 3.0 {
        2.0
    } else if r < 7.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn tick_label(v: f64, step: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 1e4 || a < 1e-2 {
        let digits = ((a.log10() - step.log10()).round().max(0.0) as usize).min(4);
        return format!("{v:.digits$e}");
    }
    let decimals = if step >= 1.0 { 0 } else { (-step.log10()).ceil() as usize };
    format!("{v:.decimals$}")
}

fn ticks(lo: f64, hi: f64) -> (f64, f64, Vec<f64>) {
    let step = nice_step(hi - lo, 6);
    let start = (lo / step).floor() * step;
    let end = (hi / step).ceil() * step;
    let n = ((end - start) / step).round() as usize;
    (start, end, (0..=n).map(|k| start + k as f64 * step).collect())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the plot as an SVG document.
pub fn render_svg(table: &Table, style: &PlotStyle) -> std::result::Result<String, String> {
    let x = table.column(&style.x_column).ok_or_else(|| format!("missing column `{}`", style.x_column))?;
    let mut ys = Vec::with_capacity(style.series.len());
    for s in &style.series {
        ys.push(table.column(&s.column).ok_or_else(|| format!("missing column `{}`", s.column))?);
    }
    let finite_max = |v: &[f64]| v.iter().cloned().filter(|a| a.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    let reference = style
        .series
        .iter()
        .zip(&ys)
        .filter(|(s, _)| !s.scaled)
        .map(|(_, y)| finite_max(y))
        .fold(f64::NEG_INFINITY, f64::max);
    for (s, y) in style.series.iter().zip(ys.iter_mut()) {
        let m = finite_max(y);
        if s.scaled && m > 0.0 && reference.is_finite() {
            let f = reference / m;
            y.iter_mut().for_each(|v| *v *= f);
        }
    }
    let all_y: Vec<f64> = ys.iter().flatten().cloned().filter(|v| v.is_finite()).collect();
    if all_y.is_empty() || x.iter().any(|v| !v.is_finite()) {
        return Err("no finite data to plot".into());
    }
    let (mut x0, mut x1) = (x.iter().cloned().fold(f64::INFINITY, f64::min), x.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let (mut y0, mut y1) =
        (all_y.iter().cloned().fold(f64::INFINITY, f64::min), all_y.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 <= y0 {
        let pad = if y0 == 0.0 { 1.0 } else { 0.1 * y0.abs() };
        y0 -= pad;
        y1 += pad;
    }
    let (xs, xe, xt) = ticks(x0, x1);
    let (ys0, ye, yt) = ticks(y0, y1);
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |v: f64| LEFT + (v - xs) / (xe - xs) * pw;
    let py = |v: f64| TOP + ph - (v - ys0) / (ye - ys0) * ph;

    let mut o = String::new();
    let _ = writeln!(
        o,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(o, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(o, r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#, LEFT + pw / 2.0, escape(&style.title));
    for &t in &xt {
        let p = px(t);
        let _ = writeln!(o, r##"<line x1="{p:.2}" y1="{TOP}" x2="{p:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##, TOP + ph);
        let _ = writeln!(o, r#"<text x="{p:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, tick_label(t, xt[1] - xt[0]));
    }
    for &t in &yt {
        let p = py(t);
        let _ = writeln!(o, r##"<line x1="{LEFT}" y1="{p:.2}" x2="{:.2}" y2="{p:.2}" stroke="#e0e0e0"/>"##, LEFT + pw);
        let _ = writeln!(o, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, p + 4.0, tick_label(t, yt[1] - yt[0]));
    }
    let _ = writeln!(o, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    let _ = writeln!(o, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 18.0, escape(&style.x_label));
    let _ = writeln!(
        o,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&style.y_label)
    );
    for (k, (s, y)) in style.series.iter().zip(&ys).enumerate() {
        let mut pts = String::new();
        for (a, b) in x.iter().zip(y) {
            if b.is_finite() {
                let _ = write!(pts, "{:.2},{:.2} ", px(*a), py(*b));
            }
        }
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            o,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.6"{dash} points="{}"/>"#,
            s.color,
            pts.trim_end()
        );
        if s.markers {
            for (a, b) in x.iter().zip(y) {
                if b.is_finite() {
                    let _ = writeln!(o, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{}"/>"#, px(*a), py(*b), s.color);
                }
            }
        }
        let ly = TOP + 14.0 + 20.0 * k as f64;
        let lx = LEFT + pw + 14.0;
        let _ = writeln!(o, r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="2"{dash}/>"#, lx + 26.0, s.color);
        let _ = writeln!(o, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, lx + 32.0, ly + 4.0, escape(&s.label));
    }
    o.push_str("</svg>\n");
    Ok(o)
}

/// Reads a CSV written by this tool and writes its SVG plot. Nothing is
/// written when the CSV is malformed.
pub fn emit_plot(csv_path: &Path, svg_path: &Path, style: &PlotStyle) -> Result<()> {
    let table = read_table(csv_path)?;
    let svg = render_svg(&table, style).map_err(|reason| CliError::Csv { path: csv_path.display().to_string(), reason })?;
    std::fs::write(svg_path, svg).map_err(|e| CliError::io(svg_path, e))
}

pub fn pli_style() -> PlotStyle {
    PlotStyle {
        title: "Photoluminescence intensity".into(),
        x_column: "delta_xL_meV".into(),
        x_label: "Δ_xL = ω_x − ω_L (meV)".into(),
        y_label: "n_x".into(),
        series: vec![
            Series::line("n_x_no_reservoir", "no reservoir", "#7f7f7f").dashed(),
            Series::line("n_x_bare_gamma", "bare γ", "#1f77b4"),
            Series::line("n_x_phonon_gamma", "phonon γ̃", "#d62728"),
            Series::line("J_ph_lineshape", "J_ph(ω_L) (scaled)", "#2ca02c").dashed().scaled(),
        ],
    }
}

pub fn purcell_style() -> PlotStyle {
    PlotStyle {
        title: "Purcell factor".into(),
        x_column: "detuning_meV".into(),
        x_label: "detuning (meV)".into(),
        y_label: "PF = γ/γ_b".into(),
        series: vec![
            Series::line("pf_bare", "without phonons", "#1f77b4").dashed(),
            Series::line("pf_phonon", "with phonons", "#d62728"),
        ],
    }
}

pub fn dip_style() -> PlotStyle {
    PlotStyle {
        title: "PLI dip versus temperature".into(),
        x_column: "temperature_K".into(),
        x_label: "T (K)".into(),
        y_label: "dip depth in n_x".into(),
        series: vec![
            Series::line("dip_bare", "without phonon modification", "#1f77b4").dashed().markers(),
            Series::line("dip_phonon", "with phonon modification", "#d62728").markers(),
        ],
    }
}
