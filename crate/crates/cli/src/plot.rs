//! Minimal self-contained SVG line plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::config_error;

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 56.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Round tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil();
    let last = (hi / step).floor();
    (first as i64..=last as i64).map(|i| i as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-3 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn bounds(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi > lo {
        let pad = 0.04 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let d = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - d, hi + d)
    }
}

fn draw_panel(svg: &mut String, panel: &Panel, y0: f64) {
    let pts = || panel.series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (xl, xh) = bounds(pts().map(|p| p.0));
    let (yl, yh) = bounds(pts().map(|p| p.1));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - xl) / (xh - xl) * pw;
    let sy = |y: f64| y0 + TOP + ph - (y - yl) / (yh - yl) * ph;

    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        y0 + 22.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="black"/>"#,
        y0 + TOP
    );
    for t in ticks(xl, xh) {
        let x = sx(t);
        let yb = y0 + TOP + ph;
        let _ = writeln!(svg, r#"<line x1="{x:.1}" y1="{yb:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#, yb + 5.0);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle" font-size="11">{}</text>"#,
            yb + 18.0,
            fmt_tick(t)
        );
    }
    for t in ticks(yl, yh) {
        let y = sy(t);
        let _ = writeln!(svg, r#"<line x1="{:.1}" y1="{y:.1}" x2="{LEFT}" y2="{y:.1}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="11">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">{}</text>"#,
        LEFT + pw / 2.0,
        y0 + HEIGHT - 14.0,
        escape(&panel.x_label)
    );
    let (cx, cy) = (18.0, y0 + TOP + ph / 2.0);
    let _ = writeln!(
        svg,
        r#"<text x="{cx}" y="{cy:.1}" text-anchor="middle" font-size="13" transform="rotate(-90 {cx} {cy:.1})">{}</text>"#,
        escape(&panel.y_label)
    );
    for (i, s) in panel.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let finite: Vec<(f64, f64)> = s.points.iter().copied().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
        if let [(x, y)] = finite[..] {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y));
        } else {
            let path: Vec<String> = finite.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.6" points="{}"/>"#, path.join(" "));
        }
        let ly = y0 + TOP + 14.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(svg, r#"<line x1="{lx}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="12">{}</text>"#, lx + 26.0, ly + 4.0, escape(&s.label));
    }
}

/// Stacked panels in one SVG document.
pub fn render_svg(panels: &[Panel]) -> anyhow::Result<String> {
    if panels.is_empty() {
        return Err(config_error("nothing to plot"));
    }
    for p in panels {
        let finite = p.series.iter().flat_map(|s| &s.points).any(|q| q.0.is_finite() && q.1.is_finite());
        if p.series.is_empty() || !finite {
            return Err(config_error(format!("plot '{}' has an empty series", p.title)));
        }
    }
    let total = HEIGHT * panels.len() as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{total}" viewBox="0 0 {WIDTH} {total}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        draw_panel(&mut svg, p, HEIGHT * i as f64);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(panels: &[Panel], path: &Path) -> anyhow::Result<()> {
    let svg = render_svg(panels)?;
    std::fs::write(path, svg).map_err(|e| config_error(format!("cannot write plot {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel(points: Vec<(f64, f64)>) -> Panel {
        Panel {
            title: "t".into(),
            x_label: "α".into(),
            y_label: "μ".into(),
            series: vec![Series { label: "k = 1".into(), points }],
        }
    }

    #[test]
    fn empty_series_rejected() {
        assert!(render_svg(&[panel(vec![])]).is_err());
        assert!(render_svg(&[]).is_err());
    }

    #[test]
    fn labels_present() {
        let svg = render_svg(&[panel(vec![(0.0, 1.0), (1.0, 3.0)])]).unwrap();
        assert!(svg.contains(">α</text>") && svg.contains(">μ</text>") && svg.contains("polyline"));
    }

    #[test]
    fn tick_spacing() {
        assert_eq!(ticks(0.0, 10.0), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
    }
}
