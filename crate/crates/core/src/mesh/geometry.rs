use super::MeshError;
use std::f64::consts::PI;

pub type Point = [f64; 2];

/// A solid inclusion inside the unit cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Inclusion {
    /// Semi-axes `a`, `b`; `rotation` in radians, counterclockwise.
    Ellipse {
        center: Point,
        a: f64,
        b: f64,
        rotation: f64,
    },
    /// Axis-aligned rectangle with half-widths `hx`, `hy`.
    Rectangle { center: Point, hx: f64, hy: f64 },
}

/// A point on an inclusion boundary with its outward (into the fluid) normals.
/// Smooth points carry one normal, corners carry the normals of both sides.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct WallPoint {
    pub p: Point,
    pub normals: Vec<Point>,
}

impl Inclusion {
    pub fn area(&self) -> f64 {
        match *self {
            Inclusion::Ellipse { a, b, .. } => PI * a * b,
            Inclusion::Rectangle { hx, hy, .. } => 4.0 * hx * hy,
        }
    }

    pub fn center(&self) -> Point {
        match *self {
            Inclusion::Ellipse { center, .. } | Inclusion::Rectangle { center, .. } => center,
        }
    }

    /// Axis-aligned bounding box `[xmin, ymin, xmax, ymax]`.
    pub fn bbox(&self) -> [f64; 4] {
        match *self {
            Inclusion::Ellipse {
                center,
                a,
                b,
                rotation,
            } => {
                let (s, c) = rotation.sin_cos();
                let ex = (a * a * c * c + b * b * s * s).sqrt();
                let ey = (a * a * s * s + b * b * c * c).sqrt();
                [
                    center[0] - ex,
                    center[1] - ey,
                    center[0] + ex,
                    center[1] + ey,
                ]
            }
            Inclusion::Rectangle { center, hx, hy } => [
                center[0] - hx,
                center[1] - hy,
                center[0] + hx,
                center[1] + hy,
            ],
        }
    }

    /// Signed level set: negative inside, zero on the boundary. Not a distance.
    pub fn level(&self, p: Point) -> f64 {
        match *self {
            Inclusion::Ellipse {
                center,
                a,
                b,
                rotation,
            } => {
                let (u, v) = to_local(p, center, rotation);
                (u / a).powi(2) + (v / b).powi(2) - 1.0
            }
            Inclusion::Rectangle { center, hx, hy } => {
                let dx = (p[0] - center[0]).abs() / hx;
                let dy = (p[1] - center[1]).abs() / hy;
                dx.max(dy) - 1.0
            }
        }
    }

    /// Distance from `p` to the inclusion boundary curve.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        match *self {
            Inclusion::Ellipse {
                center,
                a,
                b,
                rotation,
            } => {
                let (u, v) = to_local(p, center, rotation);
                ellipse_distance(u, v, a, b)
            }
            Inclusion::Rectangle { center, hx, hy } => {
                let dx = (p[0] - center[0]).abs() - hx;
                let dy = (p[1] - center[1]).abs() - hy;
                if dx > 0.0 || dy > 0.0 {
                    (dx.max(0.0).powi(2) + dy.max(0.0).powi(2)).sqrt()
                } else {
                    -dx.max(dy)
                }
            }
        }
    }

    /// Boundary sample, counterclockwise, with tangential spacing close to `h`.
    pub(crate) fn wall_points(&self, h: f64) -> Vec<WallPoint> {
        match *self {
            Inclusion::Ellipse {
                center,
                a,
                b,
                rotation,
            } => {
                // Arc-length table over the parameter t.
                let m = 4096;
                let speed = |t: f64| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt();
                let mut cum = vec![0.0; m + 1];
                for k in 0..m {
                    let t0 = 2.0 * PI * k as f64 / m as f64;
                    let t1 = 2.0 * PI * (k + 1) as f64 / m as f64;
                    let tm = 0.5 * (t0 + t1);
                    cum[k + 1] =
                        cum[k] + (t1 - t0) / 6.0 * (speed(t0) + 4.0 * speed(tm) + speed(t1));
                }
                let perimeter = cum[m];
                let count = ((perimeter / h).ceil() as usize).max(12);
                let (s, c) = rotation.sin_cos();
                (0..count)
                    .map(|k| {
                        let target = perimeter * k as f64 / count as f64;
                        let idx = cum.partition_point(|&v| v <= target).clamp(1, m);
                        let frac = (target - cum[idx - 1]) / (cum[idx] - cum[idx - 1]);
                        let t = 2.0 * PI * (idx as f64 - 1.0 + frac) / m as f64;
                        let (u, v) = (a * t.cos(), b * t.sin());
                        let (nu, nv) = (b * t.cos(), a * t.sin());
                        let nl = (nu * nu + nv * nv).sqrt();
                        WallPoint {
                            p: [center[0] + c * u - s * v, center[1] + s * u + c * v],
                            normals: vec![[(c * nu - s * nv) / nl, (s * nu + c * nv) / nl]],
                        }
                    })
                    .collect()
            }
            Inclusion::Rectangle { center, hx, hy } => {
                let corners = [
                    [center[0] - hx, center[1] - hy],
                    [center[0] + hx, center[1] - hy],
                    [center[0] + hx, center[1] + hy],
                    [center[0] - hx, center[1] + hy],
                ];
                let side_normals = [[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]];
                let mut out = Vec::new();
                for k in 0..4 {
                    let p0 = corners[k];
                    let p1 = corners[(k + 1) % 4];
                    let len = ((p1[0] - p0[0]).powi(2) + (p1[1] - p0[1]).powi(2)).sqrt();
                    let segs = ((len / h).ceil() as usize).max(2);
                    out.push(WallPoint {
                        p: p0,
                        normals: vec![side_normals[(k + 3) % 4], side_normals[k]],
                    });
                    for i in 1..segs {
                        let f = i as f64 / segs as f64;
                        out.push(WallPoint {
                            p: [p0[0] + f * (p1[0] - p0[0]), p0[1] + f * (p1[1] - p0[1])],
                            normals: vec![side_normals[k]],
                        });
                    }
                }
                out
            }
        }
    }
}

fn to_local(p: Point, center: Point, rotation: f64) -> (f64, f64) {
    let (s, c) = rotation.sin_cos();
    let dx = p[0] - center[0];
    let dy = p[1] - center[1];
    (c * dx + s * dy, -s * dx + c * dy)
}

/// Distance from (u, v) to the ellipse (u/a)² + (v/b)² = 1 by Newton on the
/// foot-point parameter, started from several angles.
fn ellipse_distance(u: f64, v: f64, a: f64, b: f64) -> f64 {
    let d2 = |t: f64| (a * t.cos() - u).powi(2) + (b * t.sin() - v).powi(2);
    let mut best = f64::INFINITY;
    for k in 0..8 {
        let mut t = PI / 4.0 * k as f64;
        for _ in 0..30 {
            let (s, c) = t.sin_cos();
            let g = (a * c - u) * (-a * s) + (b * s - v) * (b * c);
            let dg =
                (a * s).powi(2) + (b * c).powi(2) - (a * c - u) * (a * c) - (b * s - v) * (b * s);
            if dg <= 0.0 {
                break;
            }
            t -= g / dg;
        }
        best = best.min(d2(t));
    }
    best.sqrt()
}

/// Fluid cell: the unit square minus the inclusions.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCellGeometry {
    pub inclusions: Vec<Inclusion>,
}

impl UnitCellGeometry {
    /// Single centered ellipse with the given aspect ratio a/b and rotation,
    /// sized so that its area is 1 − porosity.
    pub fn ellipse(porosity: f64, aspect: f64, rotation: f64) -> Result<Self, MeshError> {
        check_porosity(porosity)?;
        if !(aspect >= 1.0) {
            return Err(MeshError::Geometry(format!(
                "aspect ratio must be >= 1, got {aspect}"
            )));
        }
        let b = ((1.0 - porosity) / (PI * aspect)).sqrt();
        let g = Self {
            inclusions: vec![Inclusion::Ellipse {
                center: [0.5, 0.5],
                a: aspect * b,
                b,
                rotation,
            }],
        };
        g.validate()?;
        Ok(g)
    }

    /// Single centered square of side sqrt(1 − porosity).
    pub fn square(porosity: f64) -> Result<Self, MeshError> {
        check_porosity(porosity)?;
        let h = 0.5 * (1.0 - porosity).sqrt();
        let g = Self {
            inclusions: vec![Inclusion::Rectangle {
                center: [0.5, 0.5],
                hx: h,
                hy: h,
            }],
        };
        g.validate()?;
        Ok(g)
    }

    pub fn porosity(&self) -> f64 {
        1.0 - self.inclusions.iter().map(Inclusion::area).sum::<f64>()
    }

    /// Inclusions strictly inside the open unit square and pairwise disjoint
    /// (checked on bounding boxes).
    pub fn validate(&self) -> Result<(), MeshError> {
        if self.inclusions.is_empty() {
            return Err(MeshError::Geometry("no inclusion".into()));
        }
        for (i, inc) in self.inclusions.iter().enumerate() {
            let bb = inc.bbox();
            if !(bb[0] > 0.0 && bb[1] > 0.0 && bb[2] < 1.0 && bb[3] < 1.0) {
                return Err(MeshError::Geometry(format!(
                    "inclusion {i} is not strictly inside the unit cell (bbox {bb:?})"
                )));
            }
            for (j, other) in self.inclusions.iter().enumerate().skip(i + 1) {
                let ob = other.bbox();
                if bb[0] < ob[2] && ob[0] < bb[2] && bb[1] < ob[3] && ob[1] < bb[3] {
                    return Err(MeshError::Geometry(format!(
                        "inclusions {i} and {j} overlap"
                    )));
                }
            }
        }
        let phi = self.porosity();
        if !(phi > 0.0 && phi < 1.0) {
            return Err(MeshError::Geometry(format!("porosity {phi} out of (0, 1)")));
        }
        Ok(())
    }

    /// Smallest gap between an inclusion and the cell faces.
    pub(crate) fn face_gap(&self) -> f64 {
        self.inclusions
            .iter()
            .map(|inc| {
                let bb = inc.bbox();
                bb[0].min(bb[1]).min(1.0 - bb[2]).min(1.0 - bb[3])
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn wall_distance(&self, p: Point) -> f64 {
        self.inclusions
            .iter()
            .map(|i| i.boundary_distance(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn in_solid(&self, p: Point) -> bool {
        self.inclusions.iter().any(|i| i.level(p) < 0.0)
    }
}

fn check_porosity(porosity: f64) -> Result<(), MeshError> {
    if !(porosity > 0.1 && porosity < 0.95) {
        return Err(MeshError::Geometry(format!(
            "porosity {porosity} outside (0.1, 0.95)"
        )));
    }
    Ok(())
}
