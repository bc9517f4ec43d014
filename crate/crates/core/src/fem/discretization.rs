use super::element::QuadData;
use super::space::{FeSpace, Topology};
use crate::mesh::Mesh;

/// Mesh plus the spaces used by the cell solvers: periodic P2, periodic P2
/// vanishing on the solid boundary, and periodic P1.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Mesh,
    pub topo: Topology,
    pub quad: QuadData,
    pub p2: FeSpace,
    pub p2_wall: FeSpace,
    pub p1: FeSpace,
    pub fluid_area: f64,
}

impl Discretization {
    pub fn new(mesh: Mesh) -> Self {
        let topo = Topology::new(&mesh);
        let quad = QuadData::new(&mesh);
        let p2 = FeSpace::new(&topo, &mesh, 2, false);
        let p2_wall = FeSpace::new(&topo, &mesh, 2, true);
        let p1 = FeSpace::new(&topo, &mesh, 1, false);
        let fluid_area = quad.weights.iter().sum();
        Self {
            mesh,
            topo,
            quad,
            p2,
            p2_wall,
            p1,
            fluid_area,
        }
    }

    pub fn n_quad(&self) -> usize {
        self.quad.weights.len()
    }
}
