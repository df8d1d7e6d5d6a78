//! Static SVG renderings of phase grids and rate series.

use std::fmt::Write as _;

use demat_core::{Classification, Grid};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;

fn color(class: Classification) -> &'static str {
    match class {
        Classification::Dematerializing => "#b7dfb9",
        Classification::Boundary => "#9e9e9e",
        Classification::Materializing => "#f3c1bd",
    }
}

/// A labelled point drawn over a phase grid.
#[derive(Debug, Clone)]
pub struct Marker {
    pub label: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

/// Round tick positions (1, 2 or 5 times a power of ten) inside `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let exponent = raw.log10().floor() as i32;
    let magnitude = 10f64.powi(exponent);
    let mantissa = [1i64, 2, 5, 10]
        .into_iter()
        .find(|&m| m as f64 * magnitude >= raw)
        .unwrap_or(10);
    let step = mantissa as f64 * magnitude;
    // integer multiples over an exact power of ten keep labels like 0.15 exact
    let at = |i: i64| {
        let units = (i * mantissa) as f64;
        if exponent >= 0 {
            units * magnitude
        } else {
            units / 10f64.powi(-exponent)
        }
    };
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(at).collect()
}

fn header(svg: &mut String, title: &str) {
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )
    .unwrap();
}

fn axes(svg: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    writeln!(
        svg,
        r#"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    )
    .unwrap();
    for x in ticks(f.x0, f.x1) {
        let px = f.px(x);
        writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{b:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            b + 5.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            b + 20.0,
            tick_label(x)
        )
        .unwrap();
    }
    for y in ticks(f.y0, f.y1) {
        let py = f.py(y);
        writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{l:.2}" y2="{py:.2}" stroke="black"/>"#,
            l - 5.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            l - 8.0,
            py + 4.0,
            tick_label(y)
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        HEIGHT - 25.0,
        escape(x_label)
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(y_label)
    )
    .unwrap();
}

/// Region map with the analytic boundary and optional case markers.
pub fn phase_svg(grid: &Grid, boundary: &[(f64, f64)], markers: &[Marker], title: &str) -> String {
    let spec = grid.spec;
    let (nx, ny) = (grid.nx() as usize, grid.ny() as usize);
    let (x_last, y_last) = (spec.x.value(nx as u64 - 1), spec.y.value(ny as u64 - 1));
    // each lattice point owns a cell centred on it
    let (hx, hy) = (spec.x.step / 2.0, spec.y.step / 2.0);
    let f = Frame {
        x0: spec.x.min - hx,
        x1: x_last + hx,
        y0: spec.y.min - hy,
        y1: y_last + hy,
    };

    let mut svg = String::new();
    header(&mut svg, title);
    writeln!(svg, r#"<g shape-rendering="crispEdges">"#).unwrap();
    for column in grid.cells.chunks(ny) {
        let x = column[0].x;
        let (left, right) = (f.px(x - hx), f.px(x + hx));
        // merge vertical runs of equal class into one rect
        let mut start = 0;
        for j in 1..=column.len() {
            if j == column.len() || column[j].classification != column[start].classification {
                let top = f.py(column[j - 1].y + hy);
                let bottom = f.py(column[start].y - hy);
                writeln!(
                    svg,
                    r#"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                    right - left,
                    bottom - top,
                    color(column[start].classification)
                )
                .unwrap();
                start = j;
            }
        }
    }
    writeln!(svg, "</g>").unwrap();

    if boundary.len() >= 2 {
        let mut d = String::new();
        for (i, &(x, y)) in boundary.iter().enumerate() {
            write!(
                d,
                "{}{:.2},{:.2}",
                if i == 0 { "M" } else { " L" },
                f.px(x),
                f.py(y)
            )
            .unwrap();
        }
        writeln!(
            svg,
            r#"<path d="{d}" fill="none" stroke="black" stroke-width="2"/>"#
        )
        .unwrap();
    }

    for m in markers {
        if m.x < f.x0 || m.x > f.x1 || m.y < f.y0 || m.y > f.y1 {
            continue;
        }
        writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="#1f4e9c"><title>{}</title></circle>"##,
            f.px(m.x),
            f.py(m.y),
            escape(&m.label)
        )
        .unwrap();
    }

    axes(&mut svg, &f, spec.x.param.as_str(), spec.y.param.as_str());
    legend(&mut svg);
    svg.push_str("</svg>\n");
    svg
}

fn legend(svg: &mut String) {
    let entries = [
        (Classification::Dematerializing, "dematerialization"),
        (Classification::Materializing, "materialization"),
    ];
    for (i, (class, label)) in entries.iter().enumerate() {
        let x = LEFT + 10.0 + 170.0 * i as f64;
        let y = HEIGHT - 12.0;
        writeln!(
            svg,
            r#"<rect x="{x:.2}" y="{:.2}" width="12" height="12" fill="{}" stroke="black"/>"#,
            y - 10.0,
            color(*class)
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{y:.2}">{label}</text>"#,
            x + 18.0
        )
        .unwrap();
    }
}

/// Line chart of a yearly series.
pub fn line_svg(points: &[(f64, f64)], title: &str, x_label: &str, y_label: &str) -> String {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if points.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let pad = if y1 > y0 {
        (y1 - y0) * 0.05
    } else {
        0.5 * y0.abs().max(1e-3)
    };
    let f = Frame {
        x0,
        x1,
        y0: y0 - pad,
        y1: y1 + pad,
    };

    let mut svg = String::new();
    header(&mut svg, title);
    let mut d = String::new();
    for (i, &(x, y)) in points.iter().enumerate() {
        write!(
            d,
            "{}{:.2},{:.2}",
            if i == 0 { "M" } else { " L" },
            f.px(x),
            f.py(y)
        )
        .unwrap();
    }
    if !d.is_empty() {
        writeln!(
            svg,
            r##"<path d="{d}" fill="none" stroke="#1f4e9c" stroke-width="2"/>"##
        )
        .unwrap();
    }
    axes(&mut svg, &f, x_label, y_label);
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use demat_core::phase::{boundary_polyline, classify_grid};
    use demat_core::Preset;

    #[test]
    fn phase_svg_is_wellformed_and_deterministic() {
        let spec = Preset::Fig2.spec::<f64>();
        let grid = classify_grid(&spec).unwrap();
        let line = boundary_polyline(&spec).unwrap();
        let markers = [Marker {
            label: "a<b".into(),
            x: 0.02,
            y: 0.01,
        }];
        let a = phase_svg(&grid, &line, &markers, "fig2");
        let b = phase_svg(&grid, &line, &markers, "fig2");
        assert_eq!(a, b);
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
        assert!(a.contains("a&lt;b"));
        assert!(a.contains("<path d=\"M"));
        assert!(a.contains("#b7dfb9") && a.contains("#f3c1bd"));
    }

    #[test]
    fn line_svg_handles_flat_series() {
        let svg = line_svg(&[(2000.0, 0.025), (2001.0, 0.025)], "flat", "year", "rate");
        assert!(svg.contains("<path"));
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(ticks(-0.001, 0.201), vec![0.0, 0.05, 0.1, 0.15, 0.2]);
        assert_eq!(ticks(-0.00625, 2.50625).len(), 6);
        assert_eq!(
            ticks(1961.0, 2010.0),
            vec![1970.0, 1980.0, 1990.0, 2000.0, 2010.0]
        );
    }

    #[test]
    fn tick_labels_trim() {
        assert_eq!(tick_label(0.05), "0.05");
        assert_eq!(tick_label(2.0), "2");
        assert_eq!(tick_label(-0.0), "0");
    }
}
