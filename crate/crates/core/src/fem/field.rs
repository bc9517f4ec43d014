use super::assembly::{shape_at, shape_values};
use super::element::QuadData;
use super::quadrature::NQ;
use super::space::{FeSpace, Topology, NONE};
use crate::mesh::{Mesh, Point};

/// Coefficients of a scalar function in an [`FeSpace`]; eliminated nodes are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub coeffs: Vec<f64>,
}

impl Field {
    pub fn zeros(space: &FeSpace) -> Self {
        Self {
            coeffs: vec![0.0; space.n_dofs],
        }
    }

    /// Nodal interpolation of `f`.
    pub fn interpolate(
        mesh: &Mesh,
        topo: &Topology,
        space: &FeSpace,
        f: impl Fn(Point) -> f64,
    ) -> Self {
        let mut coeffs = vec![0.0; space.n_dofs];
        for node in 0..space.n_raw {
            let d = space.node_dof[node];
            if d != NONE && topo.periodic_root[node] == node {
                coeffs[d] = f(topo.node_point(mesh, node));
            }
        }
        Self { coeffs }
    }

    pub fn node_value(&self, space: &FeSpace, node: usize) -> f64 {
        let d = space.node_dof[node];
        if d == NONE {
            0.0
        } else {
            self.coeffs[d]
        }
    }

    /// Values at all quadrature points.
    pub fn at_quadrature(&self, space: &FeSpace, quad: &QuadData) -> Vec<f64> {
        let mut out = Vec::with_capacity(quad.len());
        for (t, e) in quad.elements.iter().enumerate() {
            let dofs = space.dofs(t);
            for q in 0..NQ {
                let (v, _) = shape_at(space, e, q);
                out.push(
                    (0..space.local_count())
                        .map(|i| coef(&self.coeffs, dofs[i]) * v[i])
                        .sum(),
                );
            }
        }
        out
    }

    /// Gradients at all quadrature points.
    pub fn grad_at_quadrature(&self, space: &FeSpace, quad: &QuadData) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(quad.len());
        for (t, e) in quad.elements.iter().enumerate() {
            let dofs = space.dofs(t);
            for q in 0..NQ {
                let (_, g) = shape_at(space, e, q);
                let mut s = [0.0; 2];
                for i in 0..space.local_count() {
                    let c = coef(&self.coeffs, dofs[i]);
                    s[0] += c * g[i][0];
                    s[1] += c * g[i][1];
                }
                out.push(s);
            }
        }
        out
    }

    /// Value at an arbitrary point of the fluid domain (linear search over triangles).
    pub fn eval(&self, space: &FeSpace, quad: &QuadData, p: Point) -> Option<f64> {
        for (t, e) in quad.elements.iter().enumerate() {
            let l = e.barycentric(p);
            if l.iter().all(|&v| v >= -1e-12) {
                let v = shape_values(space, l);
                let dofs = space.dofs(t);
                return Some(
                    (0..space.local_count())
                        .map(|i| coef(&self.coeffs, dofs[i]) * v[i])
                        .sum(),
                );
            }
        }
        None
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn coef(c: &[f64], d: usize) -> f64 {
    if d == NONE {
        0.0
    } else {
        c[d]
    }
}

/// L² norm of (field − exact) over the mesh.
pub fn l2_error(
    field: &Field,
    space: &FeSpace,
    quad: &QuadData,
    exact: impl Fn(Point) -> f64,
) -> f64 {
    let vals = field.at_quadrature(space, quad);
    vals.iter()
        .zip(&quad.points)
        .zip(&quad.weights)
        .map(|((v, p), w)| w * (v - exact(*p)).powi(2))
        .sum::<f64>()
        .sqrt()
}
