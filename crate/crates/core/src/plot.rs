//! Minimal SVG scatter plots of supports in the unit square.
//!
//! Output depends only on the input points and options: points are sorted
//! and every coordinate is printed with a fixed number of decimals.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    /// Canvas edge length in pixels.
    pub size: u32,
    pub margin: u32,
    /// Marker radius; `None` picks one from the point count.
    pub radius: Option<f64>,
    pub title: Option<String>,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            size: 480,
            margin: 40,
            radius: None,
            title: None,
        }
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders `points` (in `[0,1]²`, y pointing up) as an SVG document.
pub fn svg_scatter(points: &[(f64, f64)], opts: &PlotOptions) -> String {
    let size = opts.size as f64;
    let margin = opts.margin as f64;
    let inner = size - 2.0 * margin;
    let px = |x: f64| margin + x.clamp(0.0, 1.0) * inner;
    let py = |y: f64| margin + (1.0 - y.clamp(0.0, 1.0)) * inner;
    let radius = opts
        .radius
        .unwrap_or_else(|| (inner / (points.len().max(1) as f64).sqrt() / 4.0).clamp(0.6, 4.0));

    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        opts.size
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{0}" height="{0}" fill="white"/>"#, opts.size);
    if let Some(title) = &opts.title {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            size / 2.0,
            margin / 2.0,
            escape(title)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{m:.2}" y="{m:.2}" width="{w:.2}" height="{w:.2}" fill="none" stroke="black" stroke-width="1"/>"#,
        m = margin,
        w = inner
    );
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let (x, y) = (px(t), py(t));
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{b:.2}" x2="{x:.2}" y2="{b2:.2}" stroke="black" stroke-width="1"/>"#,
            b = margin + inner,
            b2 = margin + inner + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{t}</text>"#,
            margin + inner + 18.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{a:.2}" y1="{y:.2}" x2="{m:.2}" y2="{y:.2}" stroke="black" stroke-width="1"/>"#,
            a = margin - 5.0,
            m = margin
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{t}</text>"#,
            margin - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(s, r#"<g fill="black">"#);
    for (x, y) in pts {
        let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="{:.3}"/>"#, px(x), py(y), radius);
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_order_free() {
        let a = svg_scatter(&[(0.25, 0.75), (0.75, 0.25)], &PlotOptions::default());
        let b = svg_scatter(&[(0.75, 0.25), (0.25, 0.75)], &PlotOptions::default());
        assert_eq!(a, b);
        assert_eq!(a.matches("<circle").count(), 2);
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
    }

    #[test]
    fn coordinates_map_into_frame() {
        let opts = PlotOptions {
            size: 100,
            margin: 10,
            radius: Some(1.0),
            title: Some("a<b".into()),
        };
        let s = svg_scatter(&[(0.0, 0.0), (1.0, 1.0)], &opts);
        assert!(s.contains(r#"<circle cx="10.000" cy="90.000" r="1.000"/>"#));
        assert!(s.contains(r#"<circle cx="90.000" cy="10.000" r="1.000"/>"#));
        assert!(s.contains("a&lt;b"));
    }
}
