use super::{dist, Axis, Marker, Mesh};
use std::collections::HashSet;

/// Quality metrics and the list of violated mesh invariants (empty when valid).
#[derive(Debug, Clone, PartialEq)]
pub struct MeshReport {
    pub vertices: usize,
    pub triangles: usize,
    /// Degrees.
    pub min_angle: f64,
    pub min_edge: f64,
    pub max_edge: f64,
    pub max_pair_residual: f64,
    pub fluid_area: f64,
    pub violations: Vec<String>,
}

impl MeshReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_mesh(mesh: &Mesh) -> MeshReport {
    let mut violations = Vec::new();
    let v = &mesh.vertices;
    let (mut min_angle, mut min_edge, mut max_edge) = (180.0f64, f64::INFINITY, 0.0f64);
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let area = mesh.triangle_area(t);
        if !(area > 0.0) {
            violations.push(format!("triangle {t} has nonpositive area {area:e}"));
        }
        for k in 0..3 {
            let (a, b, c) = (v[tri[k]], v[tri[(k + 1) % 3]], v[tri[(k + 2) % 3]]);
            let (ab, ac) = (dist(a, b), dist(a, c));
            min_edge = min_edge.min(ab);
            max_edge = max_edge.max(ab);
            let cos = ((b[0] - a[0]) * (c[0] - a[0]) + (b[1] - a[1]) * (c[1] - a[1])) / (ab * ac);
            min_angle = min_angle.min(cos.clamp(-1.0, 1.0).acos().to_degrees());
        }
    }

    let mut max_pair_residual = 0.0f64;
    let mut paired: [HashSet<usize>; 2] = [HashSet::new(), HashSet::new()];
    for p in &mesh.periodic_pairs {
        let (a, b) = (v[p.low], v[p.high]);
        let (k, shift) = match p.axis {
            Axis::X => (0, [1.0, 0.0]),
            Axis::Y => (1, [0.0, 1.0]),
        };
        let r = dist([a[0] + shift[0], a[1] + shift[1]], b);
        max_pair_residual = max_pair_residual.max(r);
        if r > 1e-12 {
            violations.push(format!(
                "periodic pair ({}, {}) is offset by {r:e}",
                p.low, p.high
            ));
        }
        paired[k].insert(p.low);
        paired[k].insert(p.high);
    }
    for e in &mesh.boundary_edges {
        let k = match e.marker {
            Marker::Left | Marker::Right => 0,
            Marker::Bottom | Marker::Top => 1,
            Marker::Solid(_) => continue,
        };
        for &i in &e.v {
            if !paired[k].contains(&i) {
                violations.push(format!(
                    "face vertex {i} at {:?} has no periodic partner",
                    v[i]
                ));
            }
        }
    }

    let fluid_area = mesh.fluid_area();
    if let Some(geom) = &mesh.geometry {
        let phi = geom.porosity();
        if ((fluid_area - phi) / phi).abs() > 5e-3 {
            violations.push(format!(
                "fluid area {fluid_area} differs from porosity {phi} by more than 0.5%"
            ));
        }
        for e in mesh.solid_edges() {
            let Marker::Solid(k) = e.marker else { continue };
            for &i in &e.v {
                let d = geom.inclusions[k].boundary_distance(v[i]);
                if d > 1e-10 {
                    violations.push(format!("wall vertex {i} is {d:e} off inclusion {k}"));
                }
            }
        }
    }
    violations.dedup();
    MeshReport {
        vertices: v.len(),
        triangles: mesh.triangles.len(),
        min_angle,
        min_edge,
        max_edge,
        max_pair_residual,
        fluid_area,
        violations,
    }
}
