use super::cell::{theta_space, CellSolutionSet};
use crate::equilibrium::EquilibriumField;
use crate::fem::Discretization;
use faer::{Mat, Side};

/// Space dimension of the cell.
pub const DIM: usize = 2;

type Block = [[f64; DIM]; DIM];

/// Homogenized blocks and the assembled tensor
///
/// ```text
/// M = | K    J_1/z_1   …  J_N/z_N  |
///     | L_1  D_11/z_1  …  D_1N/z_N |
///     | …                          |
///     | L_N  D_N1/z_1  …  D_NN/z_N |
/// ```
///
/// stored row-major with side `DIM (1 + N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveTensor {
    pub n_species: usize,
    pub z: Vec<f64>,
    pub k: Block,
    pub j: Vec<Block>,
    pub l: Vec<Block>,
    /// `d[j][i]` is D_ji.
    pub d: Vec<Vec<Block>>,
    pub m: Vec<f64>,
    pub fluid_area: f64,
}

impl EffectiveTensor {
    pub fn size(&self) -> usize {
        DIM * (1 + self.n_species)
    }

    pub fn m_at(&self, r: usize, c: usize) -> f64 {
        self.m[r * self.size() + c]
    }

    /// ‖M − Mᵀ‖_F / ‖M‖_F.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.size();
        let (mut num, mut den) = (0.0, 0.0);
        for r in 0..n {
            for c in 0..n {
                num += (self.m_at(r, c) - self.m_at(c, r)).powi(2);
                den += self.m_at(r, c).powi(2);
            }
        }
        (num / den).sqrt()
    }

    /// Eigenvalues of (M + Mᵀ)/2 in ascending order.
    pub fn sym_eigenvalues(&self) -> Vec<f64> {
        let n = self.size();
        let s = Mat::<f64>::from_fn(n, n, |r, c| 0.5 * (self.m_at(r, c) + self.m_at(c, r)));
        s.self_adjoint_eigenvalues(Side::Lower)
            .unwrap_or_else(|_| vec![f64::NAN; n])
    }
}

/// Per-problem quadrature data: velocity values and θ gradients.
struct ProblemQp {
    v: [Vec<f64>; DIM],
    theta_grad: Vec<Vec<[f64; 2]>>,
}

fn problem_qp(cells: &CellSolutionSet, disc: &Discretization, p: usize) -> ProblemQp {
    let nsp = cells.layout.n_species;
    ProblemQp {
        v: [0, 1].map(|c| {
            cells
                .velocity(p, c)
                .at_quadrature(&disc.p2_wall, &disc.quad)
        }),
        theta_grad: (0..nsp)
            .map(|j| cells.theta(p, j).grad_at_quadrature(theta_space(disc), &disc.quad))
            .collect(),
    }
}

/// Block integrals with the 1/|Y_F| normalization and the 1/z_i column
/// scalings of M.
pub fn assemble_effective_tensor(
    cells: &CellSolutionSet,
    eq: &EquilibriumField,
    disc: &Discretization,
) -> EffectiveTensor {
    let nsp = cells.layout.n_species;
    let z = &eq.z;
    let area = disc.fluid_area;
    let w = &disc.quad.weights;
    let size = DIM * (1 + nsp);
    // g[src][k][r][l]: row block r (0 = flow, j+1 = species j), component l.
    let mut g = vec![[vec![[0.0; DIM]; 1 + nsp], vec![[0.0; DIM]; 1 + nsp]]; 1 + nsp];
    for (src, gs) in g.iter_mut().enumerate() {
        for (k, gk) in gs.iter_mut().enumerate() {
            let pq = problem_qp(cells, disc, cells.layout.problem(src, k));
            for q in 0..w.len() {
                for l in 0..DIM {
                    let v = pq.v[l][q];
                    gk[0][l] += w[q] * v;
                    for j in 0..nsp {
                        // n_j K_jm z_m / Pe_j = K̃_jm / z_j
                        let mut flux = eq.n[j][q] * v;
                        for m in 0..nsp {
                            let drive = if src == m + 1 && k == l { 1.0 } else { 0.0 };
                            flux +=
                                cells.ktilde_at(q, j, m) / z[j] * (drive + pq.theta_grad[m][q][l]);
                        }
                        gk[1 + j][l] += w[q] * flux;
                    }
                }
            }
            for r in gk.iter_mut() {
                for x in r.iter_mut() {
                    *x /= area;
                }
            }
        }
    }
    let block = |src: usize, r: usize| -> Block {
        let mut b = [[0.0; DIM]; DIM];
        for l in 0..DIM {
            for k in 0..DIM {
                b[l][k] = g[src][k][r][l];
            }
        }
        b
    };
    let mut m = vec![0.0; size * size];
    for src in 0..=nsp {
        let scale = if src == 0 { 1.0 } else { 1.0 / z[src - 1] };
        for r in 0..=nsp {
            let b = block(src, r);
            for l in 0..DIM {
                for k in 0..DIM {
                    m[(r * DIM + l) * size + src * DIM + k] = b[l][k] * scale;
                }
            }
        }
    }
    EffectiveTensor {
        n_species: nsp,
        z: z.clone(),
        k: block(0, 0),
        j: (0..nsp).map(|i| block(1 + i, 0)).collect(),
        l: (0..nsp).map(|j| block(0, 1 + j)).collect(),
        d: (0..nsp)
            .map(|j| (0..nsp).map(|i| block(1 + i, 1 + j)).collect())
            .collect(),
        m,
        fluid_area: area,
    }
}

/// Reciprocity and definiteness diagnostics of M.
#[derive(Debug, Clone, PartialEq)]
pub struct OnsagerReport {
    pub symmetry_residual: f64,
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    /// max_j ‖L_j − (J_j/z_j)ᵀ‖_F / ‖M‖_F.
    pub block_residual: f64,
    pub passed: bool,
}

impl std::fmt::Display for OnsagerReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "symmetry residual  {:.3e}", self.symmetry_residual)?;
        writeln!(f, "block residual     {:.3e}", self.block_residual)?;
        writeln!(f, "eigenvalues        {:?}", self.eigenvalues)?;
        write!(
            f,
            "verdict            {}",
            if self.passed { "pass" } else { "FAIL" }
        )
    }
}

pub fn onsager_check(t: &EffectiveTensor) -> OnsagerReport {
    let symmetry_residual = t.symmetry_residual();
    let eigenvalues = t.sym_eigenvalues();
    let min_eigenvalue = eigenvalues.first().copied().unwrap_or(f64::NAN);
    let norm = t.m.iter().map(|v| v * v).sum::<f64>().sqrt();
    let block_residual = (0..t.n_species)
        .map(|j| {
            let mut s = 0.0;
            for a in 0..DIM {
                for b in 0..DIM {
                    s += (t.l[j][a][b] - t.j[j][b][a] / t.z[j]).powi(2);
                }
            }
            s.sqrt() / norm
        })
        .fold(0.0, f64::max);
    OnsagerReport {
        symmetry_residual,
        min_eigenvalue,
        block_residual,
        passed: symmetry_residual < 1e-6 && min_eigenvalue > 0.0,
        eigenvalues,
    }
}

/// Quadratic form M y·y with y = (λ⁰, z_1λ¹, …, z_Nλᴺ) against the direct
/// integral |Y_F|⁻¹ ∫ |∇v^λ|² + Σ_ij K̃_ij (∇θ^λ_j + λ^j)·(∇θ^λ_i + λ^i),
/// where (v^λ, θ^λ) is the matching combination of cell solutions.
/// `lambda` holds (λ⁰, λ¹, …, λᴺ) flattened. Returns (form, integral).
pub fn energy_identity(
    cells: &CellSolutionSet,
    tensor: &EffectiveTensor,
    disc: &Discretization,
    lambda: &[f64],
) -> (f64, f64) {
    let lay = &cells.layout;
    let nsp = lay.n_species;
    let size = tensor.size();
    assert_eq!(lambda.len(), size, "direction vector has the wrong length");
    let mut y = lambda.to_vec();
    for i in 0..nsp {
        for k in 0..DIM {
            y[(1 + i) * DIM + k] *= tensor.z[i];
        }
    }
    let mut form = 0.0;
    for r in 0..size {
        for c in 0..size {
            form += tensor.m_at(r, c) * y[r] * y[c];
        }
    }
    let mut x = vec![0.0; lay.len()];
    for src in 0..=nsp {
        for k in 0..DIM {
            let coef = lambda[src * DIM + k];
            for (a, b) in x.iter_mut().zip(&cells.solutions[lay.problem(src, k)]) {
                *a += coef * b;
            }
        }
    }
    let combined = CellSolutionSet {
        layout: *lay,
        solutions: vec![x],
        ktilde: Vec::new(),
        residuals: Vec::new(),
        divergence: Vec::new(),
    };
    let gv: Vec<_> = (0..DIM)
        .map(|c| {
            combined
                .velocity(0, c)
                .grad_at_quadrature(&disc.p2_wall, &disc.quad)
        })
        .collect();
    let gt: Vec<_> = (0..nsp)
        .map(|j| {
            combined
                .theta(0, j)
                .grad_at_quadrature(theta_space(disc), &disc.quad)
        })
        .collect();
    let w = &disc.quad.weights;
    let mut integral = 0.0;
    for q in 0..w.len() {
        let mut e = 0.0;
        for c in 0..DIM {
            e += gv[c][q][0].powi(2) + gv[c][q][1].powi(2);
        }
        for i in 0..nsp {
            for j in 0..nsp {
                let kt = cells.ktilde_at(q, i, j);
                for l in 0..DIM {
                    e += kt
                        * (gt[j][q][l] + lambda[(1 + j) * DIM + l])
                        * (gt[i][q][l] + lambda[(1 + i) * DIM + l]);
                }
            }
        }
        integral += w[q] * e;
    }
    (form, integral / disc.fluid_area)
}
