use super::assembly::{mean_row, shape_at, Coef, LinearSystem};
use super::element::QuadData;
use super::quadrature::NQ;
use super::space::{FeSpace, NONE};
use super::sparse::Csr;

/// Unknown layout of a velocity/pressure system: `[u_x | u_y | p | λ_p | λ_u?]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StokesLayout {
    pub nv: usize,
    pub np: usize,
    /// Zero-mean multipliers on the velocity components (needed without walls).
    pub velocity_mean: bool,
}

impl StokesLayout {
    pub fn ux(&self) -> usize {
        0
    }
    pub fn uy(&self) -> usize {
        self.nv
    }
    pub fn p(&self) -> usize {
        2 * self.nv
    }
    pub fn p_mean(&self) -> usize {
        2 * self.nv + self.np
    }
    pub fn u_mean(&self) -> usize {
        self.p_mean() + 1
    }
    pub fn len(&self) -> usize {
        self.p_mean() + 1 + if self.velocity_mean { 2 } else { 0 }
    }
    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Pushes the viscous, divergence and mean-constraint blocks of the Stokes
/// operator: ∫∇u:∇w − ∫p div w − ∫q div u. `offset` shifts the field blocks;
/// the pressure mean multiplier sits at `mean_index` and the velocity mean
/// multipliers, when present, right after it.
pub fn push_stokes_blocks(
    trip: &mut Vec<(usize, usize, f64)>,
    vs: &FeSpace,
    ps: &FeSpace,
    quad: &QuadData,
    lay: &StokesLayout,
    offset: usize,
    mean_index: usize,
) {
    for (t, e) in quad.elements.iter().enumerate() {
        let vd = vs.dofs(t);
        let pd = ps.dofs(t);
        let mut a = [[0.0; 6]; 6];
        let mut b = [[[0.0; 3]; 6]; 2];
        for q in 0..NQ {
            let w = quad.weights[t * NQ + q];
            let (_, g) = shape_at(vs, e, q);
            let (pv, _) = shape_at(ps, e, q);
            for i in 0..6 {
                for j in 0..6 {
                    a[i][j] += w * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                }
                for c in 0..2 {
                    for k in 0..3 {
                        b[c][i][k] -= w * g[i][c] * pv[k];
                    }
                }
            }
        }
        for c in 0..2 {
            let base = offset + if c == 0 { lay.ux() } else { lay.uy() };
            for i in 0..6 {
                if vd[i] == NONE {
                    continue;
                }
                for j in 0..6 {
                    if vd[j] != NONE {
                        trip.push((base + vd[i], base + vd[j], a[i][j]));
                    }
                }
                for k in 0..3 {
                    if pd[k] != NONE {
                        let (r, col) = (base + vd[i], offset + lay.p() + pd[k]);
                        trip.push((r, col, b[c][i][k]));
                        trip.push((col, r, b[c][i][k]));
                    }
                }
            }
        }
    }
    for (k, v) in mean_row(quad, ps).into_iter().enumerate() {
        trip.push((offset + lay.p() + k, mean_index, v));
        trip.push((mean_index, offset + lay.p() + k, v));
    }
    if lay.velocity_mean {
        let row = mean_row(quad, vs);
        for c in 0..2 {
            let base = offset + if c == 0 { lay.ux() } else { lay.uy() };
            for (k, &v) in row.iter().enumerate() {
                trip.push((base + k, mean_index + 1 + c, v));
                trip.push((mean_index + 1 + c, base + k, v));
            }
        }
    }
}

/// Stokes system with unit viscosity and body force `f`.
pub fn assemble_stokes(
    vs: &FeSpace,
    ps: &FeSpace,
    quad: &QuadData,
    force: [Coef; 2],
    velocity_mean: bool,
) -> (LinearSystem, StokesLayout) {
    let lay = StokesLayout {
        nv: vs.n_dofs,
        np: ps.n_dofs,
        velocity_mean,
    };
    let mut trip = Vec::new();
    push_stokes_blocks(&mut trip, vs, ps, quad, &lay, 0, lay.p_mean());
    let mut rhs = vec![0.0; lay.len()];
    for (t, e) in quad.elements.iter().enumerate() {
        let vd = vs.dofs(t);
        for q in 0..NQ {
            let idx = t * NQ + q;
            let (v, _) = shape_at(vs, e, q);
            let w = quad.weights[idx];
            for c in 0..2 {
                let f = force[c].at(idx, quad.points[idx]);
                let base = if c == 0 { lay.ux() } else { lay.uy() };
                for i in 0..6 {
                    if vd[i] != NONE {
                        rhs[base + vd[i]] += w * f * v[i];
                    }
                }
            }
        }
    }
    let n = lay.len();
    (
        LinearSystem {
            matrix: Csr::from_triplets(n, &trip),
            rhs,
            n_dofs: 2 * lay.nv + lay.np,
            n_multipliers: n - 2 * lay.nv - lay.np,
        },
        lay,
    )
}
