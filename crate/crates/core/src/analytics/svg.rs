//! Minimal static SVG charts for the report directory.

use std::fmt::Write as _;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Vertical bars, one per `(label, value)`, scaled to the largest value.
pub fn bar_chart(title: &str, bars: &[(String, f64)]) -> String {
    let (bar_w, gap, height, top, bottom) = (48.0, 16.0, 240.0, 40.0, 90.0);
    let width = 60.0 + bars.len() as f64 * (bar_w + gap);
    let max = bars.iter().map(|b| b.1).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{}" font-family="sans-serif" font-size="11">"#,
        top + height + bottom
    );
    let _ = writeln!(s, r#"<text x="10" y="20" font-size="14">{}</text>"#, escape(title));
    let base = top + height;
    let _ = writeln!(s, r#"<line x1="40" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#, width - 10.0);
    for (i, (label, v)) in bars.iter().enumerate() {
        let h = height * v / max;
        let x = 50.0 + i as f64 * (bar_w + gap);
        let _ = writeln!(s, r##"<rect x="{x}" y="{:.2}" width="{bar_w}" height="{h:.2}" fill="#4a78b0"/>"##, base - h);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{v:.2}</text>"#, x + bar_w / 2.0, base - h - 4.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" transform="rotate(45 {:.2} {:.2})">{}</text>"#,
            x + 4.0,
            base + 14.0,
            x + 4.0,
            base + 14.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn heat_color(v: f64) -> String {
    // blue for negative, red for positive, white at zero
    let v = v.clamp(-1.0, 1.0);
    let fade = |t: f64| (255.0 * (1.0 - t.abs())).round() as u8;
    if v >= 0.0 {
        format!("#ff{0:02x}{0:02x}", fade(v))
    } else {
        format!("#{0:02x}{0:02x}ff", fade(v))
    }
}

/// Square heatmap of values in [-1, 1] with the same labels on both axes.
pub fn heatmap(title: &str, labels: &[String], values: &[Vec<f64>]) -> String {
    let cell = 28.0;
    let margin = 190.0;
    let size = margin + labels.len() as f64 * cell + 10.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<text x="10" y="20" font-size="14">{}</text>"#, escape(title));
    for (i, l) in labels.iter().enumerate() {
        let pos = margin + i as f64 * cell;
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, margin - 6.0, pos + cell * 0.65, escape(l));
        let _ = writeln!(
            s,
            r#"<text x="{0:.1}" y="{1}" transform="rotate(-60 {0:.1} {1})">{2}</text>"#,
            pos + cell * 0.6,
            margin - 6.0,
            escape(l)
        );
    }
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{cell}" height="{cell}" fill="{}" stroke="white"><title>{v:.2}</title></rect>"#,
                margin + j as f64 * cell,
                margin + i as f64 * cell,
                heat_color(v)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
