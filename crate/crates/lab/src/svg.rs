//! Self-contained SVG heatmaps of density surfaces.

use std::fmt::Write as _;

use crate::io::Surface;

pub const CELL: usize = 3;

/// Grey level of a cell, with lightness `(ρ/ρ_max)^½`.
pub fn grey_level(rho: f64, rho_max: f64) -> u8 {
    if rho_max <= 0.0 || rho <= 0.0 {
        return 0;
    }
    let lightness = (rho / rho_max).min(1.0).sqrt();
    (255.0 * lightness).round() as u8
}

/// One `rect` per `(n, t)` cell; position runs left to right, time bottom to top.
pub fn heatmap(surface: &Surface, title: &str) -> String {
    let cols = surface.positions.len();
    let rows = surface.times.len();
    let (width, height) = (cols * CELL, rows * CELL);
    let rho_max = surface.max();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" shape-rendering="crispEdges">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="rgb(0,0,0)"/>"#);
    for (r, row) in surface.rho.iter().enumerate() {
        let y = (rows - 1 - r) * CELL;
        for (c, rho) in row.iter().enumerate() {
            let g = grey_level(*rho, rho_max);
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{y}" width="{CELL}" height="{CELL}" fill="rgb({g},{g},{g})"/>"#,
                c * CELL
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_grey_scale() {
        assert_eq!(grey_level(1.0, 1.0), 255);
        assert_eq!(grey_level(0.25, 1.0), 128);
        assert_eq!(grey_level(0.0, 1.0), 0);
        assert_eq!(grey_level(0.3, 0.0), 0);
    }

    #[test]
    fn one_rect_per_cell() {
        let s = Surface { times: vec![0, 1], positions: vec![-1, 0, 1], rho: vec![vec![0.0, 1.0, 0.0], vec![0.5, 0.0, 0.5]] };
        let svg = heatmap(&s, "a < b");
        // background plus six cells
        assert_eq!(svg.matches("<rect").count(), 7);
        assert!(svg.contains("a &lt; b"));
        assert!(svg.contains(r#"<rect x="3" y="3" width="3" height="3" fill="rgb(255,255,255)"/>"#));
    }
}
