//! SVG heatmaps of Pauli transfer matrices.
//!
//! Values are clamped to [-1, 1] on a diverging scale: white at 0, red for
//! positive entries and blue for negative ones.

use std::fmt::Write;

use qikit::{pauli_labels, Ptm};

const CELL: usize = 36;
const SMALL_CELL: usize = 12;
const MARGIN_LEFT: usize = 48;
const MARGIN_TOP: usize = 56;
const GAP: usize = 40;

const WHITE: [f64; 3] = [255.0, 255.0, 255.0];
const RED: [f64; 3] = [178.0, 24.0, 43.0];
const BLUE: [f64; 3] = [33.0, 102.0, 172.0];

/// Fill colour for a matrix entry.
pub fn color(value: f64) -> String {
    let v = if value.is_nan() { 0.0 } else { value.clamp(-1.0, 1.0) };
    let end = if v >= 0.0 { RED } else { BLUE };
    let t = v.abs();
    let mix = |k: usize| (WHITE[k] + (end[k] - WHITE[k]) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
}

/// Two-decimal annotation; never prints `-0.00`.
pub fn annotation(value: f64) -> String {
    let text = format!("{value:.2}");
    if text == "-0.00" {
        "0.00".into()
    } else {
        text
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders one heatmap per `(title, ptm)` pair, left to right.
pub fn render_svg(panels: &[(String, Ptm)]) -> String {
    let side = panels.first().map_or(0, |(_, p)| p.side());
    let annotate = side <= 16;
    let cell = if annotate { CELL } else { SMALL_CELL };
    let panel = side * cell;
    let width = MARGIN_LEFT + panels.len() * (panel + GAP);
    let height = MARGIN_TOP + panel + 16;
    let labels: Vec<String> = panels
        .first()
        .map(|(_, p)| pauli_labels(p.num_qubits()).map(|l| l.to_string()).collect())
        .unwrap_or_default();

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="{width}" height="{height}" fill="{}"/>"#, color(0.0));
    for (k, (title, ptm)) in panels.iter().enumerate() {
        let x0 = MARGIN_LEFT + k * (panel + GAP);
        let y0 = MARGIN_TOP;
        let _ = writeln!(svg, r#"<g id="panel-{k}">"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="20" font-size="14" text-anchor="middle">{}</text>"#,
            x0 + panel / 2,
            escape(title)
        );
        if annotate {
            for (j, label) in labels.iter().enumerate() {
                let _ = writeln!(
                    svg,
                    r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{label}</text>"#,
                    x0 + j * cell + cell / 2,
                    y0 - 6
                );
                let _ = writeln!(
                    svg,
                    r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{label}</text>"#,
                    x0 - 4,
                    y0 + j * cell + cell / 2 + 4
                );
            }
        }
        for i in 0..side {
            for j in 0..side {
                let value = ptm.get(i, j);
                let (x, y) = (x0 + j * cell, y0 + i * cell);
                let _ = writeln!(
                    svg,
                    r##"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{}" stroke="#cccccc" stroke-width="0.5"/>"##,
                    color(value)
                );
                if annotate {
                    let ink = if value.abs() > 0.6 { "#ffffff" } else { "#000000" };
                    let _ = writeln!(
                        svg,
                        r#"<text x="{}" y="{}" font-size="10" text-anchor="middle" fill="{ink}">{}</text>"#,
                        x + cell / 2,
                        y + cell / 2 + 3,
                        annotation(value)
                    );
                }
            }
        }
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    svg
}
