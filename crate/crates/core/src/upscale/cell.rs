use super::UpscaleError;
use crate::equilibrium::EquilibriumField;
use crate::fem::{
    assemble_stokes, mean_row, push_stokes_blocks, shape_at, Coef, Csr, Discretization,
    Factorization, Field, StokesLayout, NONE, NQ, SOLVE_TOL,
};
use crate::msa::{Electrolyte, Scaling};

/// Unknown layout `[v_x | v_y | π | θ_1 .. θ_N | λ_π | λ_θ1 .. λ_θN]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellLayout {
    pub nv: usize,
    pub np: usize,
    pub nt: usize,
    pub n_species: usize,
}

impl CellLayout {
    pub fn velocity(&self, c: usize) -> usize {
        c * self.nv
    }
    pub fn pressure(&self) -> usize {
        2 * self.nv
    }
    pub fn theta(&self, j: usize) -> usize {
        2 * self.nv + self.np + j * self.nt
    }
    /// Number of field unknowns; multipliers follow.
    pub fn core(&self) -> usize {
        self.theta(self.n_species)
    }
    pub fn pressure_mean(&self) -> usize {
        self.core()
    }
    pub fn theta_mean(&self, j: usize) -> usize {
        self.core() + 1 + j
    }
    pub fn len(&self) -> usize {
        self.core() + 1 + self.n_species
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Problem index of source `s` (0 = pressure gradient, l ≥ 1 = species l−1) and direction k.
    pub fn problem(&self, source: usize, k: usize) -> usize {
        2 * source + k
    }
    pub fn n_problems(&self) -> usize {
        2 * (1 + self.n_species)
    }
}

/// Solutions of all 2(1+N) cell problems plus the coefficients they used.
#[derive(Debug, Clone)]
pub struct CellSolutionSet {
    pub layout: CellLayout,
    /// One full unknown vector per problem, indexed by [`CellLayout::problem`].
    pub solutions: Vec<Vec<f64>>,
    /// K̃_ij = z_i z_j n_i K_ij / Pe_i per quadrature point (symmetrized, row-major).
    pub ktilde: Vec<f64>,
    /// Relative residual ‖Ax − b‖/‖b‖ per problem.
    pub residuals: Vec<f64>,
    /// ‖(∫ q_m div v)_m‖₂ / ‖∇v‖_L² per problem.
    pub divergence: Vec<f64>,
}

impl CellSolutionSet {
    pub fn velocity(&self, problem: usize, c: usize) -> Field {
        let l = &self.layout;
        Field {
            coeffs: self.solutions[problem][l.velocity(c)..l.velocity(c) + l.nv].to_vec(),
        }
    }

    pub fn pressure(&self, problem: usize) -> Field {
        let l = &self.layout;
        Field {
            coeffs: self.solutions[problem][l.pressure()..l.pressure() + l.np].to_vec(),
        }
    }

    pub fn theta(&self, problem: usize, j: usize) -> Field {
        let l = &self.layout;
        Field {
            coeffs: self.solutions[problem][l.theta(j)..l.theta(j) + l.nt].to_vec(),
        }
    }

    pub fn ktilde_at(&self, q: usize, i: usize, j: usize) -> f64 {
        let n = self.layout.n_species;
        self.ktilde[q * n * n + i * n + j]
    }
}

/// Space of the θ_j: the pressure space, so that for uniform n_j the
/// coupling rows are multiples of the discrete divergence rows.
pub fn theta_space(disc: &Discretization) -> &crate::fem::FeSpace {
    &disc.p1
}

/// Assembles the monolithic cell operator and all right-hand sides, factors
/// once and solves every problem.
pub fn solve_cell_problems(
    disc: &Discretization,
    eq: &EquilibriumField,
    el: &Electrolyte,
    sc: &Scaling,
) -> Result<CellSolutionSet, UpscaleError> {
    if !el.equal_diameters() {
        return Err(UpscaleError::UnequalDiameters(
            el.species().iter().map(|s| s.sigma).collect(),
        ));
    }
    let nq = disc.n_quad();
    let nsp = eq.n_species();
    if eq.gamma.len() != nq || eq.psi.coeffs.len() != disc.p2.n_dofs || nsp != el.len() {
        return Err(UpscaleError::Mismatch(format!(
            "{} quadrature values for {} points, {} potential dofs for {}",
            eq.gamma.len(),
            nq,
            eq.psi.coeffs.len(),
            disc.p2.n_dofs
        )));
    }
    let z = &eq.z;
    let mut ktilde = vec![0.0; nq * nsp * nsp];
    for q in 0..nq {
        for i in 0..nsp {
            for j in 0..nsp {
                let a = z[i] * z[j] * eq.n[i][q] * eq.k_at(q, i, j) / sc.peclet[i];
                let b = z[j] * z[i] * eq.n[j][q] * eq.k_at(q, j, i) / sc.peclet[j];
                ktilde[q * nsp * nsp + i * nsp + j] = 0.5 * (a + b);
            }
        }
    }
    let kt = |q: usize, i: usize, j: usize| ktilde[q * nsp * nsp + i * nsp + j];

    let (vs, ps, ts) = (&disc.p2_wall, &disc.p1, theta_space(disc));
    let lay = CellLayout {
        nv: vs.n_dofs,
        np: ps.n_dofs,
        nt: ts.n_dofs,
        n_species: nsp,
    };
    let stokes = StokesLayout {
        nv: lay.nv,
        np: lay.np,
        velocity_mean: false,
    };
    let mut trip = Vec::new();
    push_stokes_blocks(
        &mut trip,
        vs,
        ps,
        &disc.quad,
        &stokes,
        0,
        lay.pressure_mean(),
    );
    let theta_mean = mean_row(&disc.quad, ts);
    for j in 0..nsp {
        for (m, &v) in theta_mean.iter().enumerate() {
            trip.push((lay.theta(j) + m, lay.theta_mean(j), v));
            trip.push((lay.theta_mean(j), lay.theta(j) + m, v));
        }
    }
    let np = lay.n_problems();
    let mut rhs = vec![vec![0.0; lay.len()]; np];
    let mut coup = vec![[[[0.0; 6]; 6]; 2]; nsp];
    let mut tt = vec![[[0.0; 6]; 6]; nsp * nsp];
    for (t, e) in disc.quad.elements.iter().enumerate() {
        let vd = vs.dofs(t);
        let td = ts.dofs(t);
        coup.iter_mut().for_each(|c| *c = [[[0.0; 6]; 6]; 2]);
        tt.iter_mut().for_each(|c| *c = [[0.0; 6]; 6]);
        for q in 0..NQ {
            let idx = t * NQ + q;
            let w = disc.quad.weights[idx];
            let (val, _) = shape_at(vs, e, q);
            let (_, grad) = shape_at(ts, e, q);
            for j in 0..nsp {
                let cz = -w * z[j] * eq.n[j][idx];
                for a in 0..6 {
                    for b in 0..6 {
                        for c in 0..2 {
                            coup[j][c][a][b] += cz * val[a] * grad[b][c];
                        }
                    }
                }
                for i in 0..nsp {
                    let kk = -w * kt(idx, i, j);
                    for a in 0..6 {
                        for b in 0..6 {
                            tt[i * nsp + j][a][b] +=
                                kk * (grad[a][0] * grad[b][0] + grad[a][1] * grad[b][1]);
                        }
                    }
                }
            }
            for k in 0..2 {
                let b0 = &mut rhs[lay.problem(0, k)];
                for a in 0..6 {
                    if vd[a] != NONE {
                        b0[lay.velocity(k) + vd[a]] += w * val[a];
                    }
                }
                for s in 0..nsp {
                    let b = &mut rhs[lay.problem(1 + s, k)];
                    for a in 0..6 {
                        if vd[a] != NONE {
                            b[lay.velocity(k) + vd[a]] += w * z[s] * eq.n[s][idx] * val[a];
                        }
                        if td[a] != NONE {
                            for i in 0..nsp {
                                b[lay.theta(i) + td[a]] += w * kt(idx, i, s) * grad[a][k];
                            }
                        }
                    }
                }
            }
        }
        for a in 0..6 {
            for b in 0..6 {
                if td[b] == NONE {
                    continue;
                }
                for j in 0..nsp {
                    if vd[a] != NONE {
                        for c in 0..2 {
                            let (r, col) = (lay.velocity(c) + vd[a], lay.theta(j) + td[b]);
                            trip.push((r, col, coup[j][c][a][b]));
                            trip.push((col, r, coup[j][c][a][b]));
                        }
                    }
                    if td[a] != NONE {
                        for i in 0..nsp {
                            trip.push((
                                lay.theta(i) + td[a],
                                lay.theta(j) + td[b],
                                tt[i * nsp + j][a][b],
                            ));
                        }
                    }
                }
            }
        }
    }
    let matrix = Csr::from_triplets(lay.len(), &trip);
    let mut pins = vec![lay.pressure()];
    pins.extend((0..nsp).map(|j| lay.theta(j)));
    let fact = Factorization::bordered(matrix, lay.core(), pins)?;
    let solutions = fact.solve_many(&rhs, SOLVE_TOL)?;
    let residuals = solutions
        .iter()
        .zip(&rhs)
        .map(|(x, b)| crate::fem::residual(fact.matrix(), x, b))
        .collect();
    let mut set = CellSolutionSet {
        layout: lay,
        solutions,
        ktilde,
        residuals,
        divergence: Vec::new(),
    };
    set.divergence = (0..np)
        .map(|p| weak_divergence(disc, &set.velocity(p, 0), &set.velocity(p, 1)))
        .collect();
    Ok(set)
}

/// ‖(∫ q_m div v)_m‖₂ over the P1 basis, relative to ‖∇v‖_L².
fn weak_divergence(disc: &Discretization, vx: &Field, vy: &Field) -> f64 {
    let gx = vx.grad_at_quadrature(&disc.p2_wall, &disc.quad);
    let gy = vy.grad_at_quadrature(&disc.p2_wall, &disc.quad);
    let div: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a[0] + b[1]).collect();
    let d = crate::fem::load_vector(&disc.p1, &disc.quad, &div);
    let energy: f64 = gx
        .iter()
        .zip(&gy)
        .zip(&disc.quad.weights)
        .map(|((a, b), w)| w * (a[0] * a[0] + a[1] * a[1] + b[0] * b[0] + b[1] * b[1]))
        .sum();
    let num = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    if energy > 0.0 {
        num / energy.sqrt()
    } else {
        num
    }
}

/// Permeability of the uncharged cell: (1/|Y_F|) ∫ v^k·e^l for the Stokes
/// problem with body force e^k, v = 0 on the walls.
pub fn neutral_permeability(disc: &Discretization) -> Result<[[f64; 2]; 2], UpscaleError> {
    let (sys, lay) = assemble_stokes(
        &disc.p2_wall,
        &disc.p1,
        &disc.quad,
        [Coef::Const(1.0), Coef::Const(0.0)],
        false,
    );
    let (sys_y, _) = assemble_stokes(
        &disc.p2_wall,
        &disc.p1,
        &disc.quad,
        [Coef::Const(0.0), Coef::Const(1.0)],
        false,
    );
    let fact = Factorization::bordered(sys.matrix, lay.p_mean(), vec![lay.p()])?;
    let sol = fact.solve_many(&[sys.rhs, sys_y.rhs], SOLVE_TOL)?;
    let mut k = [[0.0; 2]; 2];
    for (kk, x) in sol.iter().enumerate() {
        for l in 0..2 {
            let base = if l == 0 { lay.ux() } else { lay.uy() };
            let f = Field {
                coeffs: x[base..base + lay.nv].to_vec(),
            };
            let vals = f.at_quadrature(&disc.p2_wall, &disc.quad);
            k[l][kk] = vals
                .iter()
                .zip(&disc.quad.weights)
                .map(|(v, w)| v * w)
                .sum::<f64>()
                / disc.fluid_area;
        }
    }
    Ok(k)
}
