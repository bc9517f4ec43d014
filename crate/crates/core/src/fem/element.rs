//! Lagrange P1/P2 shape functions on straight triangles.
//!
//! Local P2 node order: vertices 0, 1, 2, then edge midpoints (0,1), (1,2), (2,0).

use super::quadrature::{NQ, TRI_POINTS, TRI_WEIGHTS};
use crate::mesh::{Mesh, Point};

pub const LOCAL_EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

pub fn p2_values(l: [f64; 3]) -> [f64; 6] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

pub fn p2_gradients(l: [f64; 3], gl: &[[f64; 2]; 3]) -> [[f64; 2]; 6] {
    let mut g = [[0.0; 2]; 6];
    for d in 0..2 {
        for i in 0..3 {
            g[i][d] = (4.0 * l[i] - 1.0) * gl[i][d];
        }
        for (k, &[i, j]) in LOCAL_EDGES.iter().enumerate() {
            g[3 + k][d] = 4.0 * (l[i] * gl[j][d] + l[j] * gl[i][d]);
        }
    }
    g
}

/// Per-triangle geometry and quadrature data.
#[derive(Debug, Clone)]
pub struct Element {
    pub area: f64,
    /// Gradients of the barycentric coordinates.
    pub grad_lambda: [[f64; 2]; 3],
    pub vertices: [Point; 3],
}

impl Element {
    pub fn new(mesh: &Mesh, t: usize) -> Self {
        let tri = mesh.triangles[t];
        let v = [
            mesh.vertices[tri[0]],
            mesh.vertices[tri[1]],
            mesh.vertices[tri[2]],
        ];
        let det =
            (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
        let mut gl = [[0.0; 2]; 3];
        for i in 0..3 {
            let (b, c) = (v[(i + 1) % 3], v[(i + 2) % 3]);
            gl[i] = [(b[1] - c[1]) / det, (c[0] - b[0]) / det];
        }
        Self {
            area: 0.5 * det,
            grad_lambda: gl,
            vertices: v,
        }
    }

    pub fn point(&self, l: [f64; 3]) -> Point {
        let v = &self.vertices;
        [
            l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0],
            l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1],
        ]
    }

    pub fn barycentric(&self, p: Point) -> [f64; 3] {
        let v = &self.vertices;
        let l1 =
            self.grad_lambda[1][0] * (p[0] - v[0][0]) + self.grad_lambda[1][1] * (p[1] - v[0][1]);
        let l2 =
            self.grad_lambda[2][0] * (p[0] - v[0][0]) + self.grad_lambda[2][1] * (p[1] - v[0][1]);
        [1.0 - l1 - l2, l1, l2]
    }
}

/// Quadrature-point data for a whole mesh: entry `t * NQ + q`.
#[derive(Debug, Clone)]
pub struct QuadData {
    pub elements: Vec<Element>,
    pub weights: Vec<f64>,
    pub points: Vec<Point>,
}

impl QuadData {
    pub fn new(mesh: &Mesh) -> Self {
        let elements: Vec<Element> = (0..mesh.triangles.len())
            .map(|t| Element::new(mesh, t))
            .collect();
        let mut weights = Vec::with_capacity(elements.len() * NQ);
        let mut points = Vec::with_capacity(elements.len() * NQ);
        for e in &elements {
            for q in 0..NQ {
                weights.push(e.area * TRI_WEIGHTS[q]);
                points.push(e.point(TRI_POINTS[q]));
            }
        }
        Self {
            elements,
            weights,
            points,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// ∫ f over the mesh for values given at quadrature points.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}
