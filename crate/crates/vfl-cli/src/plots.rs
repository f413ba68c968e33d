//! Minimal self-contained SVG plotting: scatter + fitted line on log-log
//! axes, with annotations. No display server, no external assets.

use std::fmt::Write;

pub struct LogLogPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
    /// (slope, intercept) of a fitted line in log10-log10 coordinates.
    pub fit: Option<(f64, f64)>,
    pub annotation: String,
}

impl LogLogPlot {
    pub fn render(&self) -> String {
        let (w, h) = (640.0, 480.0);
        let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);
        let logs: Vec<(f64, f64)> = self
            .points
            .iter()
            .map(|&(x, y)| (x.log10(), y.log10()))
            .collect();
        let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &logs {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() || x1 - x0 < 1e-12 {
            x0 -= 0.5;
            x1 = x0 + 1.0;
        }
        if !y0.is_finite() || y1 - y0 < 1e-12 {
            y0 -= 0.5;
            y1 = y0 + 1.0;
        }
        let padx = 0.08 * (x1 - x0);
        let pady = 0.12 * (y1 - y0);
        x0 -= padx;
        x1 += padx;
        y0 -= pady;
        y1 += pady;
        let px = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
        let py = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);

        let mut s = String::new();
        let _ = write!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = write!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = write!(
            s,
            r#"<text x="{}" y="24" font-family="monospace" font-size="16" text-anchor="middle">{}</text>"#,
            w / 2.0,
            xml_escape(&self.title)
        );
        // axes
        let _ = write!(
            s,
            r#"<line x1="{ml}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            h - mb,
            w - mr,
            h - mb
        );
        let _ = write!(
            s,
            r#"<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{}" stroke="black"/>"#,
            h - mb
        );
        // decade ticks
        for d in (x0.ceil() as i64)..=(x1.floor() as i64) {
            let x = px(d as f64);
            let _ = write!(
                s,
                r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="gray" stroke-dasharray="3"/>"#,
                mt,
                h - mb
            );
            let _ = write!(
                s,
                r#"<text x="{x}" y="{}" font-family="monospace" font-size="12" text-anchor="middle">1e{d}</text>"#,
                h - mb + 18.0
            );
        }
        for d in (y0.ceil() as i64)..=(y1.floor() as i64) {
            let y = py(d as f64);
            let _ = write!(
                s,
                r#"<line x1="{ml}" y1="{y}" x2="{}" y2="{y}" stroke="gray" stroke-dasharray="3"/>"#,
                w - mr
            );
            let _ = write!(
                s,
                r#"<text x="{}" y="{}" font-family="monospace" font-size="12" text-anchor="end">1e{d}</text>"#,
                ml - 6.0,
                y + 4.0
            );
        }
        // fitted line
        if let Some((slope, intercept)) = self.fit {
            let ya = slope * x0 + intercept;
            let yb = slope * x1 + intercept;
            let _ = write!(
                s,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="steelblue" stroke-width="1.5"/>"#,
                px(x0),
                py(ya),
                px(x1),
                py(yb)
            );
        }
        // points
        for &(x, y) in &logs {
            let _ = write!(
                s,
                r#"<circle cx="{}" cy="{}" r="4" fill="crimson"/>"#,
                px(x),
                py(y)
            );
        }
        let _ = write!(
            s,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="13">{}</text>"#,
            ml + 10.0,
            mt + 16.0,
            xml_escape(&self.annotation)
        );
        let _ = write!(
            s,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="13" text-anchor="middle">{}</text>"#,
            w / 2.0,
            h - 12.0,
            xml_escape(&self.x_label)
        );
        let _ = write!(
            s,
            r#"<text x="16" y="{}" font-family="monospace" font-size="13" transform="rotate(-90 16 {})" text-anchor="middle">{}</text>"#,
            h / 2.0,
            h / 2.0,
            xml_escape(&self.y_label)
        );
        s.push_str("</svg>");
        s
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
