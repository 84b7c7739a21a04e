//! SVG drawings of configurations and their contact graphs.

use std::fmt::Write as _;

use nalgebra::Vector3;
use sphere12::config::Configuration;
use sphere12::geom::{angular_distance, slerp, UnitVector};
use thiserror::Error;

type Vec3 = Vector3<f64>;

/// Polyline segments per geodesic arc.
pub const ARC_SEGMENTS: usize = 32;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("stereographic pole lies within 1e-6 rad of point {0}")]
    PoleCollision(usize),
    #[error("projection direction has zero length")]
    ZeroAxis,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Projection {
    /// View from far along `axis`, looking at the origin.
    Orthographic(Vec3),
    /// Projection from `pole` onto the plane through the origin normal to it.
    Stereographic(Vec3),
}

#[derive(Clone, Debug)]
pub struct RenderSpec {
    pub projection: Projection,
    pub size: u32,
    pub show_labels: bool,
    pub show_weights: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            projection: Projection::Orthographic(Vec3::z()),
            size: 512,
            show_labels: true,
            show_weights: false,
        }
    }
}

/// An edge `(i, j)` with an optional stress weight.
pub type WeightedEdge = (usize, usize, Option<f64>);

struct Frame {
    view: Vec3,
    e1: Vec3,
    e2: Vec3,
    stereographic: bool,
}

impl Frame {
    fn new(projection: Projection) -> Result<Self, RenderError> {
        let (axis, stereographic) = match projection {
            Projection::Orthographic(a) => (a, false),
            Projection::Stereographic(p) => (p, true),
        };
        let view = UnitVector::from_vec(axis).map_err(|_| RenderError::ZeroAxis)?;
        let (e1, e2) = view.tangent_basis();
        Ok(Frame {
            view: view.vec(),
            e1,
            e2,
            stereographic,
        })
    }

    /// Plane coordinates, and whether the point faces the viewer.
    fn project(&self, v: Vec3) -> (f64, f64, bool) {
        let h = v.dot(&self.view);
        if self.stereographic {
            let s = 1.0 / (1.0 - h).max(1e-12);
            (v.dot(&self.e1) * s, v.dot(&self.e2) * s, true)
        } else {
            (v.dot(&self.e1), v.dot(&self.e2), h >= 0.0)
        }
    }
}

/// Draws the points of `u` and each edge as a projected great-circle arc.
/// Output bytes depend only on the inputs.
pub fn render_svg(
    u: &Configuration,
    edges: &[WeightedEdge],
    spec: &RenderSpec,
) -> Result<String, RenderError> {
    let frame = Frame::new(spec.projection)?;
    if frame.stereographic {
        let pole = UnitVector::from_vec(frame.view).map_err(|_| RenderError::ZeroAxis)?;
        if let Some(k) = u
            .points()
            .iter()
            .position(|p| angular_distance(p, &pole) < 1e-6)
        {
            return Err(RenderError::PoleCollision(k));
        }
    }
    let size = spec.size as f64;
    let extent = if frame.stereographic {
        u.points()
            .iter()
            .map(|p| {
                let (x, y, _) = frame.project(p.vec());
                x.abs().max(y.abs())
            })
            .fold(1.0, f64::max)
    } else {
        1.0
    };
    let scale = 0.45 * size / extent;
    let to_px = |x: f64, y: f64| (size / 2.0 + scale * x, size / 2.0 - scale * y);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        spec.size
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if !frame.stereographic {
        let (cx, cy) = to_px(0.0, 0.0);
        let _ = writeln!(
            svg,
            r##"<circle class="sphere" cx="{cx:.3}" cy="{cy:.3}" r="{scale:.3}" fill="none" stroke="#999999" stroke-width="1"/>"##
        );
    }

    for &(i, j, w) in edges {
        let (a, b) = (u.point(i), u.point(j));
        let mut pts = String::new();
        let mut front = 0;
        for s in 0..=ARC_SEGMENTS {
            let p = slerp(&a, &b, s as f64 / ARC_SEGMENTS as f64);
            let (x, y, vis) = frame.project(p.vec());
            front += vis as usize;
            let (px, py) = to_px(x, y);
            if s > 0 {
                pts.push(' ');
            }
            let _ = write!(pts, "{px:.3},{py:.3}");
        }
        let hidden = 2 * front < ARC_SEGMENTS + 1;
        let dash = if hidden {
            r#" stroke-dasharray="4 3""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r##"<polyline class="edge" points="{pts}" fill="none" stroke="#1f4e9c" stroke-width="2"{dash}/>"##
        );
        if let (true, Some(w)) = (spec.show_weights, w) {
            let (x, y, _) = frame.project(slerp(&a, &b, 0.5).vec());
            let (px, py) = to_px(x, y);
            let _ = writeln!(
                svg,
                r##"<text class="weight" x="{px:.3}" y="{py:.3}" font-size="10" fill="#b03a2e">{w:.6}</text>"##
            );
        }
    }

    for (k, p) in u.points().iter().enumerate() {
        let (x, y, vis) = frame.project(p.vec());
        let (px, py) = to_px(x, y);
        let fill = if vis { "#222222" } else { "#bbbbbb" };
        let _ = writeln!(
            svg,
            r#"<circle class="point" cx="{px:.3}" cy="{py:.3}" r="5" fill="{fill}"/>"#
        );
        if spec.show_labels {
            let _ = writeln!(
                svg,
                r#"<text class="label" x="{:.3}" y="{:.3}" font-size="12">{k}</text>"#,
                px + 6.0,
                py - 6.0
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
