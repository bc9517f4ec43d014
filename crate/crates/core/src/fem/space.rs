use super::element::LOCAL_EDGES;
use crate::mesh::{Marker, Mesh, Point};
use std::collections::HashMap;

pub const NONE: usize = usize::MAX;

/// Edge numbering and periodic node identification shared by all spaces on a mesh.
#[derive(Debug, Clone)]
pub struct Topology {
    pub n_vertices: usize,
    /// Global edge id per triangle and local edge.
    pub triangle_edges: Vec<[usize; 3]>,
    pub edges: Vec<[usize; 2]>,
    /// Representative raw node after periodic identification (vertices, then edges).
    pub periodic_root: Vec<usize>,
    /// Raw nodes on the solid boundary.
    pub on_solid: Vec<bool>,
    /// A triangle containing each edge, with the local edge index.
    pub edge_owner: Vec<(usize, usize)>,
    edge_map: HashMap<(usize, usize), usize>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        // Smaller index becomes the root so numbering is deterministic.
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        parent[hi] = lo;
    }
}

impl Topology {
    pub fn new(mesh: &Mesh) -> Self {
        let nv = mesh.vertices.len();
        let mut edge_id: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut triangle_edges = Vec::with_capacity(mesh.triangles.len());
        let mut edge_owner = Vec::new();
        for (ti, t) in mesh.triangles.iter().enumerate() {
            let mut te = [0; 3];
            for (k, &[i, j]) in LOCAL_EDGES.iter().enumerate() {
                let key = (t[i].min(t[j]), t[i].max(t[j]));
                te[k] = *edge_id.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_owner.push((ti, k));
                    edges.len() - 1
                });
            }
            triangle_edges.push(te);
        }
        let n_raw = nv + edges.len();
        let mut parent: Vec<usize> = (0..n_raw).collect();
        for p in &mesh.periodic_pairs {
            union(&mut parent, p.low, p.high);
        }
        for e in &mesh.boundary_edges {
            if matches!(e.marker, Marker::Left | Marker::Bottom) {
                let low = (e.v[0].min(e.v[1]), e.v[0].max(e.v[1]));
                let axis_ok = |a: usize, b: usize| {
                    let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
                    match e.marker {
                        Marker::Left => pb[0] - pa[0] == 1.0,
                        _ => pb[1] - pa[1] == 1.0,
                    }
                };
                // Corner vertices have partners along both axes; pick the one matching this face.
                let image = |v: usize| {
                    mesh.periodic_pairs
                        .iter()
                        .find(|p| p.low == v && axis_ok(v, p.high))
                        .map(|p| p.high)
                };
                if let (Some(a), Some(b)) = (image(e.v[0]), image(e.v[1])) {
                    if let Some(&hi) = edge_id.get(&(a.min(b), a.max(b))) {
                        union(&mut parent, nv + edge_id[&low], nv + hi);
                    }
                }
            }
        }
        let periodic_root = (0..n_raw).map(|i| find(&mut parent, i)).collect();
        let mut on_solid = vec![false; n_raw];
        for e in mesh.solid_edges() {
            on_solid[e.v[0]] = true;
            on_solid[e.v[1]] = true;
            on_solid[nv + edge_id[&(e.v[0].min(e.v[1]), e.v[0].max(e.v[1]))]] = true;
        }
        Self {
            n_vertices: nv,
            triangle_edges,
            edges,
            periodic_root,
            on_solid,
            edge_owner,
            edge_map: edge_id,
        }
    }

    /// Global edge id of the mesh edge (a, b).
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_map.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn n_raw(&self) -> usize {
        self.n_vertices + self.edges.len()
    }

    pub fn node_point(&self, mesh: &Mesh, node: usize) -> Point {
        if node < self.n_vertices {
            mesh.vertices[node]
        } else {
            let [a, b] = self.edges[node - self.n_vertices];
            let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
            [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]
        }
    }
}

/// Scalar Lagrange space (order 1 or 2) with periodic identification and an
/// optional homogeneous Dirichlet condition on the solid boundary.
#[derive(Debug, Clone)]
pub struct FeSpace {
    pub order: usize,
    pub zero_on_solid: bool,
    /// Global raw node ids per triangle (3 for P1, 6 for P2).
    pub triangle_nodes: Vec<[usize; 6]>,
    /// Dof of each raw node, or [`NONE`] when eliminated.
    pub node_dof: Vec<usize>,
    pub n_dofs: usize,
    /// Raw node count before constraints.
    pub n_raw: usize,
    pub n_periodic_identified: usize,
    pub n_eliminated: usize,
}

impl FeSpace {
    pub fn new(topo: &Topology, mesh: &Mesh, order: usize, zero_on_solid: bool) -> Self {
        assert!(order == 1 || order == 2, "order must be 1 or 2");
        let n_raw = if order == 1 {
            topo.n_vertices
        } else {
            topo.n_raw()
        };
        let mut node_dof = vec![NONE; n_raw];
        let mut n_dofs = 0;
        let mut n_eliminated = 0;
        let mut n_periodic_identified = 0;
        for node in 0..n_raw {
            let root = topo.periodic_root[node];
            if zero_on_solid && topo.on_solid[node] {
                n_eliminated += 1;
                continue;
            }
            if root != node {
                n_periodic_identified += 1;
                continue;
            }
            node_dof[node] = n_dofs;
            n_dofs += 1;
        }
        for node in 0..n_raw {
            let root = topo.periodic_root[node];
            if root != node && !(zero_on_solid && topo.on_solid[node]) {
                node_dof[node] = node_dof[root];
            }
        }
        let triangle_nodes = mesh
            .triangles
            .iter()
            .zip(&topo.triangle_edges)
            .map(|(t, e)| {
                let n = topo.n_vertices;
                [t[0], t[1], t[2], n + e[0], n + e[1], n + e[2]]
            })
            .collect();
        Self {
            order,
            zero_on_solid,
            triangle_nodes,
            node_dof,
            n_dofs,
            n_raw,
            n_periodic_identified,
            n_eliminated,
        }
    }

    pub fn local_count(&self) -> usize {
        if self.order == 1 {
            3
        } else {
            6
        }
    }

    /// Dofs of triangle `t` in local node order; eliminated nodes give [`NONE`].
    pub fn dofs(&self, t: usize) -> [usize; 6] {
        let mut d = [NONE; 6];
        for k in 0..self.local_count() {
            d[k] = self.node_dof[self.triangle_nodes[t][k]];
        }
        d
    }
}
