//! SVG figures of the gnomonic plane: concentric latitude circles, descent
//! chains as straight polylines, and labeled points. A descent circle
//! projects to the straight line tangent to its summit's latitude circle, so
//! the polylines make the geometry visible.

use std::fmt;

use crate::config::Tolerances;
use crate::geom::{gnomonic, Frame, GeomError, PlanePoint, ProjPoint, UnitVec};

const CANVAS: f64 = 640.0;
const SCALE: f64 = 160.0;
const CENTER: f64 = CANVAS / 2.0;

/// What to draw.
#[derive(Debug, Clone, Default)]
pub struct SvgLayers {
    /// Labeled projective points.
    pub points: Vec<(String, ProjPoint)>,
    /// Descent chains (or any polylines on the sphere).
    pub chains: Vec<Vec<UnitVec>>,
    /// Latitudes (degrees) to draw as concentric circles.
    pub latitude_circles_deg: Vec<f64>,
}

/// A rendered figure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvgFigure {
    svg: String,
}

impl SvgFigure {
    pub fn as_str(&self) -> &str {
        &self.svg
    }

    pub fn into_string(self) -> String {
        self.svg
    }
}

impl fmt::Display for SvgFigure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.svg)
    }
}

fn to_canvas(p: &PlanePoint) -> (f64, f64) {
    (CENTER + SCALE * p.u, CENTER - SCALE * p.v)
}

/// Map plotted canvas coordinates back to the gnomonic plane; tests use this
/// to confirm every plotted point equals the projection of its vector.
pub fn from_canvas(x: f64, y: f64) -> PlanePoint {
    PlanePoint {
        u: (x - CENTER) / SCALE,
        v: (CENTER - y) / SCALE,
    }
}

fn project(frame: &Frame, v: &UnitVec, tol: &Tolerances) -> Result<PlanePoint, GeomError> {
    // Projective points may be handed in with either sign; lift the
    // representative into the viewing hemisphere first.
    let oriented = if v.dot(&frame.e3()) < 0.0 { v.flipped() } else { *v };
    gnomonic(frame, &oriented, tol)
}

/// Render the layers in the given viewing frame. Every plotted vector must
/// lie strictly inside the frame's open northern hemisphere (up to sign).
pub fn render_svg(
    frame: &Frame,
    layers: &SvgLayers,
    tol: &Tolerances,
) -> Result<SvgFigure, GeomError> {
    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{CANVAS}\" height=\"{CANVAS}\" viewBox=\"0 0 {CANVAS} {CANVAS}\">\n"
    ));
    svg.push_str(&format!(
        "  <g id=\"axes\" stroke=\"#cccccc\" stroke-width=\"1\">\n    <line x1=\"0\" y1=\"{CENTER}\" x2=\"{CANVAS}\" y2=\"{CENTER}\"/>\n    <line x1=\"{CENTER}\" y1=\"0\" x2=\"{CENTER}\" y2=\"{CANVAS}\"/>\n  </g>\n"
    ));

    svg.push_str("  <g id=\"latitude-circles\" fill=\"none\" stroke=\"#88aadd\" stroke-width=\"1\" stroke-dasharray=\"4 3\">\n");
    for lat in &layers.latitude_circles_deg {
        let r = (90.0 - lat).to_radians().tan() * SCALE;
        svg.push_str(&format!(
            "    <circle cx=\"{CENTER}\" cy=\"{CENTER}\" r=\"{r}\" data-lat=\"{lat}\"/>\n"
        ));
    }
    svg.push_str("  </g>\n");

    svg.push_str("  <g id=\"chains\" fill=\"none\" stroke=\"#cc3333\" stroke-width=\"1.5\">\n");
    for chain in &layers.chains {
        let mut coords = Vec::with_capacity(chain.len());
        for v in chain {
            let p = project(frame, v, tol)?;
            let (x, y) = to_canvas(&p);
            coords.push(format!("{x},{y}"));
        }
        svg.push_str(&format!("    <polyline points=\"{}\"/>\n", coords.join(" ")));
    }
    svg.push_str("  </g>\n");

    svg.push_str("  <g id=\"points\">\n");
    for (label, point) in &layers.points {
        let rep = point.rep();
        let p = project(frame, &rep, tol)?;
        let (x, y) = to_canvas(&p);
        svg.push_str(&format!(
            "    <circle class=\"pt\" cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"#222222\"/>\n"
        ));
        svg.push_str(&format!(
            "    <text x=\"{}\" y=\"{}\" font-size=\"12\" font-family=\"sans-serif\">{}</text>\n",
            x + 5.0,
            y - 5.0,
            label
        ));
    }
    svg.push_str("  </g>\n");
    svg.push_str("</svg>\n");
    Ok(SvgFigure { svg })
}
