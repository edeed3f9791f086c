use std::fmt::Write as _;

use integra_core::stats::ComparisonReport;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 56.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Per-word rate in corpus A (x) against corpus B (y), with the diagonal.
pub fn rate_scatter(report: &ComparisonReport, label_a: &str, label_b: &str) -> String {
    let span = SIZE - 2.0 * MARGIN;
    let x = |r: f64| MARGIN + r * span;
    let y = |r: f64| SIZE - MARGIN - r * span;
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#999" stroke-dasharray="4 3"/>"##, x(0.0), y(0.0), x(1.0), y(1.0));
    let _ = writeln!(out, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{span}" height="{span}" fill="none" stroke="black"/>"#);
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{t}</text>"#, x(t), SIZE - MARGIN + 16.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{t}</text>"#, MARGIN - 6.0, y(t) + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, SIZE / 2.0, SIZE - 12.0, escape(label_a));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        SIZE / 2.0,
        SIZE / 2.0,
        escape(label_b)
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#2a6fb0" fill-opacity="0.7"><title>{}: {:.3} / {:.3}</title></circle>"##,
            x(r.rate_a),
            y(r.rate_b),
            escape(&r.base),
            r.rate_a,
            r.rate_b
        );
    }
    out.push_str("</svg>\n");
    out
}
