use super::geometry::{Point, UnitCellGeometry, WallPoint};
use super::{Axis, BoundaryEdge, Marker, Mesh, MeshError, PeriodicPair};
use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};
use std::collections::HashMap;

/// Sizing controls. All lengths are in units of the cell side and are
/// multiplied by 2^-refine.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshOptions {
    /// Far-field element size.
    pub h_far: f64,
    /// First boundary-layer thickness relative to `h_far`.
    pub wall_ratio: f64,
    /// Optional upper bound on the first layer thickness (e.g. from the Debye length).
    pub wall_cap: Option<f64>,
    /// Geometric growth factor of the boundary layers.
    pub growth: f64,
    pub refine: u32,
}

impl Default for MeshOptions {
    fn default() -> Self {
        Self {
            h_far: 0.05,
            wall_ratio: 0.15,
            wall_cap: None,
            growth: 1.3,
            refine: 0,
        }
    }
}

impl MeshOptions {
    fn scale(&self) -> f64 {
        0.5f64.powi(self.refine as i32)
    }

    pub fn far_size(&self) -> f64 {
        self.h_far * self.scale()
    }

    pub fn first_layer(&self) -> f64 {
        let h = self.wall_ratio * self.h_far;
        self.wall_cap.map_or(h, |c| h.min(c)) * self.scale()
    }
}

/// Triangulates the fluid part of `geom` with graded layers along the walls.
pub fn build_cell(geom: &UnitCellGeometry, opts: &MeshOptions) -> Result<Mesh, MeshError> {
    geom.validate()?;
    if !(opts.h_far > 0.0 && opts.wall_ratio > 0.0 && opts.growth > 1.0) {
        return Err(MeshError::Geometry(
            "mesh options must be positive with growth > 1".into(),
        ));
    }
    let h_far = opts.far_size();
    let h_t = 0.5 * h_far;
    let h0 = opts.first_layer();
    let max_depth = 0.45 * geom.face_gap().min(inclusion_gap(geom));

    // Layer offsets.
    let mut offsets = Vec::new();
    let (mut d, mut step) = (0.0, h0);
    while d + step <= max_depth {
        d += step;
        offsets.push(d);
        if step >= 0.8 * h_t {
            break;
        }
        step *= opts.growth;
    }
    let depth = d;

    let mut points: Vec<Point> = Vec::new();
    let mut walls: Vec<Vec<usize>> = Vec::new();
    for inc in &geom.inclusions {
        let wall: Vec<WallPoint> = inc.wall_points(h_t);
        let mut ids = Vec::with_capacity(wall.len());
        for w in &wall {
            ids.push(points.len());
            points.push(w.p);
        }
        walls.push(ids);
        for &off in &offsets {
            for w in &wall {
                layer_points(w, off, h_t, &mut points);
            }
        }
    }

    let size = |p: Point| {
        let t = ((geom.wall_distance(p) - depth) / (2.0 * h_far)).clamp(0.0, 1.0);
        h_t + t * (h_far - h_t)
    };

    // Matched face points: left copied to right, bottom copied to top.
    let ys = face_positions(|t| size([0.0, t]));
    let xs = face_positions(|t| size([t, 0.0]));
    for &y in &ys {
        points.push([0.0, y]);
        points.push([1.0, y]);
    }
    for &x in &xs[1..xs.len() - 1] {
        points.push([x, 0.0]);
        points.push([x, 1.0]);
    }

    // Far-field hexagonal lattice.
    let dy = h_far * 3f64.sqrt() / 2.0;
    let rows = (1.0 / dy).ceil() as usize;
    for r in 0..=rows {
        let y = (r as f64 + 0.5) * dy;
        let shift = if r % 2 == 0 { 0.0 } else { 0.5 * h_far };
        let mut x = 0.5 * h_far + shift;
        while x < 1.0 {
            let p = [x, y];
            let face = x.min(y).min(1.0 - x).min(1.0 - y);
            if face >= 0.5 * size(p)
                && !geom.in_solid(p)
                && geom.wall_distance(p) >= depth + 0.6 * h_far
            {
                points.push(p);
            }
            x += h_far;
        }
    }

    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> =
        ConstrainedDelaunayTriangulation::new();
    let mut handle_of = Vec::with_capacity(points.len());
    for p in &points {
        let h = cdt
            .insert(Point2::new(p[0], p[1]))
            .map_err(|e| MeshError::Triangulation(format!("{e:?}")))?;
        handle_of.push(h);
    }
    for ids in &walls {
        for k in 0..ids.len() {
            let (a, b) = (handle_of[ids[k]], handle_of[ids[(k + 1) % ids.len()]]);
            if !cdt.can_add_constraint(a, b) {
                return Err(MeshError::Triangulation(
                    "wall constraint crosses another constraint".into(),
                ));
            }
            cdt.add_constraint(a, b);
        }
    }

    // Renumber vertices in spade's order.
    let vertices: Vec<Point> = cdt
        .vertices()
        .map(|v| [v.position().x, v.position().y])
        .collect();
    let wall_polys: Vec<Vec<Point>> = walls
        .iter()
        .map(|ids| ids.iter().map(|&i| points[i]).collect())
        .collect();
    let mut solid_of: HashMap<usize, usize> = HashMap::new();
    for (k, ids) in walls.iter().enumerate() {
        for &i in ids {
            solid_of.insert(handle_of[i].index(), k);
        }
    }

    let mut triangles = Vec::new();
    for f in cdt.inner_faces() {
        let vs = f.vertices();
        let mut t = [
            vs[0].fix().index(),
            vs[1].fix().index(),
            vs[2].fix().index(),
        ];
        let c = centroid(&vertices, &t);
        if wall_polys.iter().any(|poly| point_in_polygon(c, poly)) {
            continue;
        }
        if signed_area(&vertices, &t) < 0.0 {
            t.swap(1, 2);
        }
        triangles.push(t);
    }

    let mut mesh = Mesh {
        vertices,
        triangles,
        boundary_edges: Vec::new(),
        periodic_pairs: Vec::new(),
        geometry: Some(geom.clone()),
    };
    mesh.boundary_edges = classify_boundary(&mesh, &solid_of);
    mesh.periodic_pairs = match_periodic(&mesh.vertices);
    Ok(mesh)
}

/// Points of one offset layer generated by a wall point: the normal offset,
/// or an arc of offsets at a corner.
fn layer_points(w: &WallPoint, off: f64, h_t: f64, out: &mut Vec<Point>) {
    match w.normals.as_slice() {
        [n] => out.push([w.p[0] + off * n[0], w.p[1] + off * n[1]]),
        [n1, n2] => {
            let a1 = n1[1].atan2(n1[0]);
            let mut a2 = n2[1].atan2(n2[0]);
            if a2 < a1 {
                a2 += 2.0 * std::f64::consts::PI;
            }
            let m = ((off * (a2 - a1) / h_t).ceil() as usize).max(1);
            for k in 0..=m {
                let a = a1 + (a2 - a1) * k as f64 / m as f64;
                out.push([w.p[0] + off * a.cos(), w.p[1] + off * a.sin()]);
            }
        }
        _ => {}
    }
}

/// Positions 0 = t_0 < … < t_n = 1 marched with the local size, rescaled to end at 1.
fn face_positions(size: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut ts = vec![0.0];
    let mut t = 0.0;
    while t < 1.0 {
        t += size(t);
        ts.push(t);
    }
    let n = ts.len() - 1;
    // Drop a short last step before rescaling.
    if n > 1 && 1.0 - ts[n - 1] < 0.5 * (ts[n] - ts[n - 1]) {
        ts.remove(n - 1);
    }
    let last = *ts.last().unwrap();
    ts.iter_mut().for_each(|v| *v /= last);
    *ts.last_mut().unwrap() = 1.0;
    ts
}

fn inclusion_gap(geom: &UnitCellGeometry) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, a) in geom.inclusions.iter().enumerate() {
        for b in geom.inclusions.iter().skip(i + 1) {
            let (ba, bb) = (a.bbox(), b.bbox());
            let dx = (bb[0] - ba[2]).max(ba[0] - bb[2]).max(0.0);
            let dy = (bb[1] - ba[3]).max(ba[1] - bb[3]).max(0.0);
            gap = gap.min(0.5 * (dx * dx + dy * dy).sqrt());
        }
    }
    gap
}

pub(crate) fn centroid(v: &[Point], t: &[usize; 3]) -> Point {
    [
        (v[t[0]][0] + v[t[1]][0] + v[t[2]][0]) / 3.0,
        (v[t[0]][1] + v[t[1]][1] + v[t[2]][1]) / 3.0,
    ]
}

pub(crate) fn signed_area(v: &[Point], t: &[usize; 3]) -> f64 {
    let (a, b, c) = (v[t[0]], v[t[1]], v[t[2]]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1])
            && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0]
        {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Edges used by exactly one triangle, tagged by location.
pub(crate) fn classify_boundary(
    mesh: &Mesh,
    solid_of: &HashMap<usize, usize>,
) -> Vec<BoundaryEdge> {
    let mut count: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
    for t in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            count.entry(key).or_insert((0, [a, b])).0 += 1;
        }
    }
    let mut edges: Vec<BoundaryEdge> = count
        .into_values()
        .filter(|(c, _)| *c == 1)
        .filter_map(|(_, v)| {
            let (p, q) = (mesh.vertices[v[0]], mesh.vertices[v[1]]);
            let marker = if p[0] == 0.0 && q[0] == 0.0 {
                Marker::Left
            } else if p[0] == 1.0 && q[0] == 1.0 {
                Marker::Right
            } else if p[1] == 0.0 && q[1] == 0.0 {
                Marker::Bottom
            } else if p[1] == 1.0 && q[1] == 1.0 {
                Marker::Top
            } else {
                match (solid_of.get(&v[0]), solid_of.get(&v[1])) {
                    (Some(&a), Some(&b)) if a == b => Marker::Solid(a),
                    _ => return None,
                }
            };
            Some(BoundaryEdge { v, marker })
        })
        .collect();
    edges.sort_by_key(|e| (e.v[0].min(e.v[1]), e.v[0].max(e.v[1])));
    edges
}

/// Pairs face vertices whose coordinates differ by exactly one cell length.
pub(crate) fn match_periodic(vertices: &[Point]) -> Vec<PeriodicPair> {
    let mut pairs = Vec::new();
    for (axis, k) in [(Axis::X, 0usize), (Axis::Y, 1usize)] {
        let other = 1 - k;
        let mut hi: HashMap<u64, usize> = HashMap::new();
        for (i, p) in vertices.iter().enumerate() {
            if p[k] == 1.0 {
                hi.insert(p[other].to_bits(), i);
            }
        }
        for (i, p) in vertices.iter().enumerate() {
            if p[k] == 0.0 {
                if let Some(&j) = hi.get(&p[other].to_bits()) {
                    pairs.push(PeriodicPair {
                        low: i,
                        high: j,
                        axis,
                    });
                }
            }
        }
    }
    pairs
}
