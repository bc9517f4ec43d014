//! Triangulations of the fluid part of the periodic unit cell.

mod build;
mod geometry;
mod io;
mod validate;

pub use build::{build_cell, MeshOptions};
pub use geometry::{Inclusion, Point, UnitCellGeometry};
pub use io::{read_mesh, write_mesh};
pub use validate::{validate_mesh, MeshReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Marker {
    /// Fluid/solid interface of the given inclusion.
    Solid(usize),
    Left,
    Right,
    Bottom,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub v: [usize; 2],
    pub marker: Marker,
}

/// `high` is the image of `low` shifted by one cell length along `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicPair {
    pub low: usize,
    pub high: usize,
    pub axis: Axis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub periodic_pairs: Vec<PeriodicPair>,
    /// Exact geometry, when the mesh was generated from one.
    pub geometry: Option<UnitCellGeometry>,
}

impl Mesh {
    pub fn triangle_area(&self, t: usize) -> f64 {
        build::signed_area(&self.vertices, &self.triangles[t])
    }

    pub fn fluid_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    pub fn solid_edges(&self) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary_edges
            .iter()
            .filter(|e| matches!(e.marker, Marker::Solid(_)))
    }

    /// Shortest solid-boundary-adjacent edge, i.e. the first layer thickness scale.
    pub fn min_edge_near_wall(&self) -> f64 {
        let on_wall: std::collections::HashSet<usize> =
            self.solid_edges().flat_map(|e| e.v).collect();
        let mut best = f64::INFINITY;
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if on_wall.contains(&a) || on_wall.contains(&b) {
                    best = best.min(dist(self.vertices[a], self.vertices[b]));
                }
            }
        }
        best
    }

    /// Structured periodic mesh of the full unit square (no inclusion), `n`×`n`
    /// squares each split along the alternating diagonal.
    pub fn periodic_square(n: usize) -> Self {
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                let x = if i == n { 1.0 } else { i as f64 / n as f64 };
                let y = if j == n { 1.0 } else { j as f64 / n as f64 };
                vertices.push([x, y]);
            }
        }
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                if (i + j) % 2 == 0 {
                    triangles.push([a, b, c]);
                    triangles.push([a, c, d]);
                } else {
                    triangles.push([a, b, d]);
                    triangles.push([b, c, d]);
                }
            }
        }
        let mut mesh = Mesh {
            vertices,
            triangles,
            boundary_edges: Vec::new(),
            periodic_pairs: Vec::new(),
            geometry: None,
        };
        mesh.boundary_edges = build::classify_boundary(&mesh, &Default::default());
        mesh.periodic_pairs = build::match_periodic(&mesh.vertices);
        mesh
    }
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("triangulation failed: {0}")]
    Triangulation(String),
    #[error("mesh file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
