//! SVG 1.1 rendering of a packing.
//!
//! The drawing uses container units throughout: the `viewBox` is the
//! container and a flip transform makes y grow upwards, so every `<rect>`
//! carries exactly the coordinates found in the log.

use std::fmt::Write;

use crate::packer::PackingReport;

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    /// Squares beyond this many (in index order) are not drawn. Residual
    /// boxes are capped at the same count, largest first.
    pub max_squares_drawn: usize,
    /// Outline width in container units.
    pub stroke: f64,
    /// Colour squares by scale level `floor(log2 n)` instead of one fill.
    pub color_by_depth: bool,
    /// Width of the rendered image in pixels.
    pub pixel_width: u32,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            max_squares_drawn: 20_000,
            stroke: 0.002,
            color_by_depth: true,
            pixel_width: 1200,
        }
    }
}

fn level_color(n: u64) -> String {
    let level = 63 - n.max(1).leading_zeros();
    let hue = (level as f64 * 47.0) % 360.0;
    let (r, g, b) = hsv_to_rgb(hue, 0.45, 0.95);
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> (u8, u8, u8) {
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let q = |u: f64| ((u + m) * 255.0).round() as u8;
    (q(r), q(g), q(b))
}

pub fn render_svg(report: &PackingReport, opts: &SvgOptions) -> String {
    let c = report.container;
    let height_px = (opts.pixel_width as f64 * c.dy / c.dx).ceil().max(1.0) as u64;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{height_px}" viewBox="{} {} {} {}">"#,
        opts.pixel_width, c.x0, c.y0, c.dx, c.dy
    );
    let _ = writeln!(
        s,
        r##"<defs><pattern id="hatch" patternUnits="userSpaceOnUse" width="{w}" height="{w}" patternTransform="rotate(45)"><line x1="0" y1="0" x2="0" y2="{w}" stroke="#999999" stroke-width="{sw}"/></pattern></defs>"##,
        w = 4.0 * opts.stroke,
        sw = opts.stroke
    );
    let _ = writeln!(
        s,
        r#"<g transform="matrix(1 0 0 -1 0 {})" stroke="black" stroke-width="{}">"#,
        c.y0 + c.y1(),
        opts.stroke
    );
    let _ = writeln!(
        s,
        r#"<rect class="container" x="{}" y="{}" width="{}" height="{}" fill="none"/>"#,
        c.x0, c.y0, c.dx, c.dy
    );

    let mut residuals: Vec<_> = report.residuals.iter().collect();
    if residuals.len() > opts.max_squares_drawn {
        residuals.sort_by(|a, b| b.area().total_cmp(&a.area()).then(a.id.cmp(&b.id)));
        residuals.truncate(opts.max_squares_drawn);
        residuals.sort_by_key(|b| b.id);
    }
    for b in residuals {
        let r = b.rect;
        let _ = writeln!(
            s,
            r#"<rect class="residual" x="{}" y="{}" width="{}" height="{}" fill="url(#hatch)"/>"#,
            r.x0, r.y0, r.dx, r.dy
        );
    }

    for p in report.placements.iter().take(opts.max_squares_drawn) {
        let fill = if opts.color_by_depth {
            level_color(p.n)
        } else {
            "#9ec5e8".to_string()
        };
        let r = p.rect;
        let _ = writeln!(
            s,
            r#"<rect class="square" data-n="{}" x="{}" y="{}" width="{}" height="{}" fill="{fill}"/>"#,
            p.n, r.x0, r.y0, r.dx, r.dy
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
