//! Planar test shapes, scaled to a prescribed area and centred at the origin.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{PlateError, Result};

pub const DEFAULT_RECTANGLE_ASPECT: f64 = 3.0;
pub const DEFAULT_ELLIPSE_ASPECT: f64 = 2.0;
pub const DEFAULT_INNER_RATIO: f64 = 0.5;
/// Gap between the two disks, as a fraction of their common radius.
pub const DEFAULT_GAP_RATIO: f64 = 0.5;
pub const DEFAULT_H: f64 = 1.0 / 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Disk,
    Square,
    Rectangle,
    Ellipse,
    Annulus,
    TwoDisks,
    Polygon,
}

impl ShapeKind {
    pub fn name(&self) -> &'static str {
        match self {
            ShapeKind::Disk => "disk",
            ShapeKind::Square => "square",
            ShapeKind::Rectangle => "rectangle",
            ShapeKind::Ellipse => "ellipse",
            ShapeKind::Annulus => "annulus",
            ShapeKind::TwoDisks => "two_disks",
            ShapeKind::Polygon => "polygon",
        }
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Kind-specific parameters; unused fields must be absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeParams {
    /// Width over height (rectangle, ellipse).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aspect: Option<f64>,
    /// Inner over outer radius (annulus).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_ratio: Option<f64>,
    /// Gap over radius (two disks).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    /// Vertex list (polygon), rescaled about its centroid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
}

/// One record of a shape corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    #[serde(default)]
    pub params: ShapeParams,
    pub target_area: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

impl ShapeSpec {
    pub fn new(kind: ShapeKind, target_area: f64) -> Self {
        Self {
            kind,
            params: ShapeParams::default(),
            target_area,
            h: None,
        }
    }

    pub fn with_params(mut self, params: ShapeParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = Some(h);
        self
    }

    /// Grid spacing requested by the record, or [`DEFAULT_H`].
    pub fn spacing(&self) -> f64 {
        self.h.unwrap_or(DEFAULT_H)
    }

    /// Builds the scaled geometric shape.
    pub fn build(&self) -> Result<Shape> {
        let area = self.target_area;
        if !(area > 0.0) || !area.is_finite() {
            return Err(PlateError::Config(format!(
                "target_area {area} must be positive"
            )));
        }
        let p = &self.params;
        let allowed = match self.kind {
            ShapeKind::Disk | ShapeKind::Square => [false; 4],
            ShapeKind::Rectangle | ShapeKind::Ellipse => [true, false, false, false],
            ShapeKind::Annulus => [false, true, false, false],
            ShapeKind::TwoDisks => [false, false, true, false],
            ShapeKind::Polygon => [false, false, false, true],
        };
        let present = [
            p.aspect.is_some(),
            p.inner_ratio.is_some(),
            p.gap.is_some(),
            p.vertices.is_some(),
        ];
        let names = ["aspect", "inner_ratio", "gap", "vertices"];
        for ((ok, is), name) in allowed.iter().zip(present).zip(names) {
            if is && !ok {
                return Err(PlateError::Config(format!(
                    "parameter '{name}' does not apply to shape '{}'",
                    self.kind
                )));
            }
        }
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(PlateError::Config(format!("{what} = {v} must be positive")))
            }
        };
        let shape = match self.kind {
            ShapeKind::Disk => Shape::Disk {
                radius: (area / PI).sqrt(),
            },
            ShapeKind::Square => {
                let s = 0.5 * area.sqrt();
                Shape::Rectangle {
                    half_width: s,
                    half_height: s,
                }
            }
            ShapeKind::Rectangle => {
                let aspect = positive(p.aspect.unwrap_or(DEFAULT_RECTANGLE_ASPECT), "aspect")?;
                let height = (area / aspect).sqrt();
                Shape::Rectangle {
                    half_width: 0.5 * aspect * height,
                    half_height: 0.5 * height,
                }
            }
            ShapeKind::Ellipse => {
                let aspect = positive(p.aspect.unwrap_or(DEFAULT_ELLIPSE_ASPECT), "aspect")?;
                let semi_y = (area / (PI * aspect)).sqrt();
                Shape::Ellipse {
                    semi_x: aspect * semi_y,
                    semi_y,
                }
            }
            ShapeKind::Annulus => {
                let ratio = p.inner_ratio.unwrap_or(DEFAULT_INNER_RATIO);
                if !(ratio > 0.0 && ratio < 1.0) {
                    return Err(PlateError::Config(format!(
                        "inner_ratio {ratio} not in (0, 1)"
                    )));
                }
                let outer = (area / (PI * (1.0 - ratio * ratio))).sqrt();
                Shape::Annulus {
                    outer,
                    inner: ratio * outer,
                }
            }
            ShapeKind::TwoDisks => {
                let gap = positive(p.gap.unwrap_or(DEFAULT_GAP_RATIO), "gap")?;
                let radius = (0.5 * area / PI).sqrt();
                Shape::TwoDisks {
                    radius,
                    offset: radius * (1.0 + 0.5 * gap),
                }
            }
            ShapeKind::Polygon => {
                let vertices = p
                    .vertices
                    .as_ref()
                    .ok_or_else(|| PlateError::Config("polygon needs 'vertices'".into()))?;
                Shape::polygon(vertices, area)?
            }
        };
        Ok(shape)
    }
}

/// A scaled shape in the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    Disk {
        radius: f64,
    },
    Rectangle {
        half_width: f64,
        half_height: f64,
    },
    Ellipse {
        semi_x: f64,
        semi_y: f64,
    },
    Annulus {
        outer: f64,
        inner: f64,
    },
    /// Equal disks centred at (±offset, 0).
    TwoDisks {
        radius: f64,
        offset: f64,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1])
        .sum::<f64>()
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return true;
    }
    let on = |a: [f64; 2], b: [f64; 2], c: [f64; 2], d: f64| {
        d == 0.0
            && c[0] >= a[0].min(b[0])
            && c[0] <= a[0].max(b[0])
            && c[1] >= a[1].min(b[1])
            && c[1] <= a[1].max(b[1])
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

impl Shape {
    /// Simple polygon rescaled about its centroid to the given area.
    pub fn polygon(vertices: &[[f64; 2]], area: f64) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(PlateError::Config(format!(
                "polygon needs at least 3 vertices, got {n}"
            )));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(PlateError::Config("polygon vertices must be finite".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let (p1, p2) = (vertices[i], vertices[(i + 1) % n]);
                let (q1, q2) = (vertices[j], vertices[(j + 1) % n]);
                if segments_intersect(p1, p2, q1, q2) {
                    return Err(PlateError::Config("polygon is not simple".into()));
                }
            }
        }
        let a = signed_area(vertices);
        if a.abs() < 1e-14 {
            return Err(PlateError::Config("polygon is degenerate".into()));
        }
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in 0..n {
            let (p, q) = (vertices[i], vertices[(i + 1) % n]);
            let cross = p[0] * q[1] - q[0] * p[1];
            cx += (p[0] + q[0]) * cross;
            cy += (p[1] + q[1]) * cross;
        }
        cx /= 6.0 * a;
        cy /= 6.0 * a;
        let scale = (area / a.abs()).sqrt();
        let vertices = vertices
            .iter()
            .map(|v| [(v[0] - cx) * scale, (v[1] - cy) * scale])
            .collect();
        Ok(Shape::Polygon { vertices })
    }

    /// Strict interior membership.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Shape::Disk { radius } => x * x + y * y < radius * radius,
            Shape::Rectangle {
                half_width,
                half_height,
            } => x.abs() < *half_width && y.abs() < *half_height,
            Shape::Ellipse { semi_x, semi_y } => (x / semi_x).powi(2) + (y / semi_y).powi(2) < 1.0,
            Shape::Annulus { outer, inner } => {
                let r2 = x * x + y * y;
                r2 < outer * outer && r2 > inner * inner
            }
            Shape::TwoDisks { radius, offset } => {
                let dx = x.abs() - offset;
                dx * dx + y * y < radius * radius
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let mut inside = false;
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    if orient(a, b, [x, y]) == 0.0
                        && x >= a[0].min(b[0])
                        && x <= a[0].max(b[0])
                        && y >= a[1].min(b[1])
                        && y <= a[1].max(b[1])
                    {
                        return false;
                    }
                    if (a[1] > y) != (b[1] > y) {
                        let xc = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                        if x < xc {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }

    /// [xmin, xmax, ymin, ymax].
    pub fn bounding_box(&self) -> [f64; 4] {
        match self {
            Shape::Disk { radius } | Shape::Annulus { outer: radius, .. } => {
                [-radius, *radius, -radius, *radius]
            }
            Shape::Rectangle {
                half_width,
                half_height,
            } => [-half_width, *half_width, -half_height, *half_height],
            Shape::Ellipse { semi_x, semi_y } => [-semi_x, *semi_x, -semi_y, *semi_y],
            Shape::TwoDisks { radius, offset } => {
                [-(offset + radius), offset + radius, -radius, *radius]
            }
            Shape::Polygon { vertices } => {
                let mut b = [
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                ];
                for v in vertices {
                    b[0] = b[0].min(v[0]);
                    b[1] = b[1].max(v[0]);
                    b[2] = b[2].min(v[1]);
                    b[3] = b[3].max(v[1]);
                }
                b
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Shape::Disk { radius } => PI * radius * radius,
            Shape::Rectangle {
                half_width,
                half_height,
            } => 4.0 * half_width * half_height,
            Shape::Ellipse { semi_x, semi_y } => PI * semi_x * semi_y,
            Shape::Annulus { outer, inner } => PI * (outer * outer - inner * inner),
            Shape::TwoDisks { radius, .. } => 2.0 * PI * radius * radius,
            Shape::Polygon { vertices } => signed_area(vertices).abs(),
        }
    }

    /// Boundary length (Ramanujan's approximation for the ellipse).
    pub fn perimeter(&self) -> f64 {
        match self {
            Shape::Disk { radius } => 2.0 * PI * radius,
            Shape::Rectangle {
                half_width,
                half_height,
            } => 4.0 * (half_width + half_height),
            Shape::Ellipse {
                semi_x: a,
                semi_y: b,
            } => PI * (3.0 * (a + b) - ((3.0 * a + b) * (a + 3.0 * b)).sqrt()),
            Shape::Annulus { outer, inner } => 2.0 * PI * (outer + inner),
            Shape::TwoDisks { radius, .. } => 4.0 * PI * radius,
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| {
                        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                        (b[0] - a[0]).hypot(b[1] - a[1])
                    })
                    .sum()
            }
        }
    }
}
