use super::element::{p2_gradients, p2_values, Element, QuadData};
use super::quadrature::{EDGE_RULE, NQ, TRI_POINTS};
use super::space::{FeSpace, Topology, NONE};
use super::sparse::Csr;
use crate::mesh::{Marker, Mesh, Point};

/// Coefficient given as a constant, as values at quadrature points
/// (index `t * NQ + q`), or as a function of position.
#[derive(Clone, Copy)]
pub enum Coef<'a> {
    Const(f64),
    Qp(&'a [f64]),
    Fn(&'a dyn Fn(Point) -> f64),
}

impl Coef<'_> {
    pub fn at(&self, idx: usize, p: Point) -> f64 {
        match self {
            Coef::Const(c) => *c,
            Coef::Qp(v) => v[idx],
            Coef::Fn(f) => f(p),
        }
    }
}

/// Weak form ∫ a ∇u·∇v + c u v = ∫ f v + ∫_S g v.
pub struct ScalarForm<'a> {
    pub diffusion: Coef<'a>,
    pub reaction: Coef<'a>,
    pub source: Coef<'a>,
    /// Flux data on the solid boundary: g(point, inclusion index).
    pub neumann: Option<&'a dyn Fn(Point, usize) -> f64>,
    /// Add one multiplier row enforcing a zero mean.
    pub zero_mean: bool,
}

/// Assembled system: dofs first, then multiplier rows.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: Csr,
    pub rhs: Vec<f64>,
    pub n_dofs: usize,
    pub n_multipliers: usize,
}

/// Shape values and gradients of a space's local basis at quadrature point `q`.
pub fn shape_at(space: &FeSpace, e: &Element, q: usize) -> ([f64; 6], [[f64; 2]; 6]) {
    let l = TRI_POINTS[q];
    if space.order == 2 {
        (p2_values(l), p2_gradients(l, &e.grad_lambda))
    } else {
        let mut v = [0.0; 6];
        let mut g = [[0.0; 2]; 6];
        for i in 0..3 {
            v[i] = l[i];
            g[i] = e.grad_lambda[i];
        }
        (v, g)
    }
}

/// Shape values of the space at barycentric point `l`.
pub fn shape_values(space: &FeSpace, l: [f64; 3]) -> [f64; 6] {
    if space.order == 2 {
        p2_values(l)
    } else {
        [l[0], l[1], l[2], 0.0, 0.0, 0.0]
    }
}

/// ∫ φ_i for every dof.
pub fn mean_row(quad: &QuadData, space: &FeSpace) -> Vec<f64> {
    let mut row = vec![0.0; space.n_dofs];
    let m = space.local_count();
    for (t, e) in quad.elements.iter().enumerate() {
        let dofs = space.dofs(t);
        for q in 0..NQ {
            let (v, _) = shape_at(space, e, q);
            let w = quad.weights[t * NQ + q];
            for i in 0..m {
                if dofs[i] != NONE {
                    row[dofs[i]] += w * v[i];
                }
            }
        }
    }
    row
}

/// ∫ f φ_i for `f` given at quadrature points.
pub fn load_vector(space: &FeSpace, quad: &QuadData, f: &[f64]) -> Vec<f64> {
    let mut load = vec![0.0; space.n_dofs];
    for (t, e) in quad.elements.iter().enumerate() {
        let dofs = space.dofs(t);
        for q in 0..NQ {
            let idx = t * NQ + q;
            let (v, _) = shape_at(space, e, q);
            for i in 0..space.local_count() {
                rhs_add(&mut load, dofs[i], quad.weights[idx] * f[idx] * v[i]);
            }
        }
    }
    load
}

/// ∫_S g φ_i over solid-boundary edges.
pub fn boundary_load(
    mesh: &Mesh,
    topo: &Topology,
    space: &FeSpace,
    quad: &QuadData,
    g: &dyn Fn(Point, usize) -> f64,
) -> Vec<f64> {
    let mut load = vec![0.0; space.n_dofs];
    for be in &mesh.boundary_edges {
        let Marker::Solid(k) = be.marker else {
            continue;
        };
        let (a, b) = (mesh.vertices[be.v[0]], mesh.vertices[be.v[1]]);
        let len = crate::mesh::dist(a, b);
        let Some(eid) = topo.edge_index(be.v[0], be.v[1]) else {
            continue;
        };
        let (t, _) = topo.edge_owner[eid];
        let e = &quad.elements[t];
        let dofs = space.dofs(t);
        for &(s, w) in &EDGE_RULE {
            let p = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let v = shape_values(space, e.barycentric(p));
            let gv = g(p, k);
            for i in 0..space.local_count() {
                if dofs[i] != NONE {
                    load[dofs[i]] += w * len * gv * v[i];
                }
            }
        }
    }
    load
}

/// Galerkin assembly of a scalar form.
pub fn assemble_scalar(
    mesh: &Mesh,
    topo: &Topology,
    space: &FeSpace,
    quad: &QuadData,
    form: &ScalarForm,
) -> LinearSystem {
    let n = space.n_dofs;
    let m = space.local_count();
    let mut trip = Vec::with_capacity(mesh.triangles.len() * m * m);
    let mut rhs = vec![0.0; n + usize::from(form.zero_mean)];
    for (t, e) in quad.elements.iter().enumerate() {
        let dofs = space.dofs(t);
        let mut ke = [[0.0; 6]; 6];
        for q in 0..NQ {
            let idx = t * NQ + q;
            let p = quad.points[idx];
            let w = quad.weights[idx];
            let (v, g) = shape_at(space, e, q);
            let (a, c, f) = (
                form.diffusion.at(idx, p),
                form.reaction.at(idx, p),
                form.source.at(idx, p),
            );
            for i in 0..m {
                rhs_add(&mut rhs, dofs[i], w * f * v[i]);
                for j in 0..m {
                    ke[i][j] += w * (a * (g[i][0] * g[j][0] + g[i][1] * g[j][1]) + c * v[i] * v[j]);
                }
            }
        }
        for i in 0..m {
            if dofs[i] == NONE {
                continue;
            }
            for j in 0..m {
                if dofs[j] != NONE {
                    trip.push((dofs[i], dofs[j], ke[i][j]));
                }
            }
        }
    }
    if let Some(g) = form.neumann {
        for (i, v) in boundary_load(mesh, topo, space, quad, g)
            .into_iter()
            .enumerate()
        {
            rhs[i] += v;
        }
    }
    if form.zero_mean {
        for (i, v) in mean_row(quad, space).into_iter().enumerate() {
            trip.push((i, n, v));
            trip.push((n, i, v));
        }
    }
    let total = n + usize::from(form.zero_mean);
    LinearSystem {
        matrix: Csr::from_triplets(total, &trip),
        rhs,
        n_dofs: n,
        n_multipliers: usize::from(form.zero_mean),
    }
}

fn rhs_add(rhs: &mut [f64], dof: usize, v: f64) {
    if dof != NONE {
        rhs[dof] += v;
    }
}
