use std::fmt::Write;

use super::config::RenderSection;
use crate::error::{Error, Result};
use crate::foliation::{Leaf, TurningCurve};
use crate::hyperbolic::{to_disk, HPoint};

/// Upper bound on the vertices of the curve polyline.
pub const MAX_CURVE_VERTICES: usize = 4000;

pub const LEAF_VERTICES: usize = 241;

fn polyline(out: &mut String, pts: impl Iterator<Item = HPoint>, style: &str) {
    out.push_str("<polyline ");
    out.push_str(style);
    out.push_str(" points=\"");
    for (i, p) in pts.enumerate() {
        let (x, y) = to_disk(p);
        if i > 0 {
            out.push(' ');
        }
        // SVG's y axis points down
        let _ = write!(out, "{:.9},{:.9}", x, -y);
    }
    out.push_str("\"/>\n");
}

/// Disk-model picture of the curve and its orthogonal leaves.
pub fn render_svg(curve: &TurningCurve, leaves: &[Leaf], render: &RenderSection) -> Result<String> {
    if curve.samples.is_empty() {
        return Err(Error::EmptyInput("curve has no samples".into()));
    }
    let mut out = String::new();
    let _ = write!(
        out,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{0}\" viewBox=\"-1.05 -1.05 2.1 2.1\">\n",
        render.size_px
    );
    out.push_str("<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.004\"/>\n");
    let leaf_style = "fill=\"none\" stroke=\"#3b6ea8\" stroke-width=\"0.002\"";
    for lf in leaves {
        polyline(&mut out, lf.points(render.leaf_span, LEAF_VERTICES).into_iter(), leaf_style);
    }
    let n = curve.samples.len();
    let stride = n.div_ceil(MAX_CURVE_VERTICES).max(1);
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    if idx.last() != Some(&(n - 1)) {
        idx.push(n - 1);
    }
    let curve_style = "fill=\"none\" stroke=\"#c0392b\" stroke-width=\"0.006\"";
    polyline(&mut out, idx.into_iter().map(|i| curve.samples[i].point), curve_style);
    out.push_str("</svg>\n");
    Ok(out)
}

/// Coordinates of every polyline in document order.
pub fn polyline_coordinates(svg: &str) -> Vec<Vec<(f64, f64)>> {
    svg.split("points=\"")
        .skip(1)
        .map(|chunk| {
            let body = &chunk[..chunk.find('"').unwrap_or(chunk.len())];
            body.split_whitespace()
                .filter_map(|pair| {
                    let (x, y) = pair.split_once(',')?;
                    Some((x.parse().ok()?, y.parse().ok()?))
                })
                .collect()
        })
        .collect()
}
