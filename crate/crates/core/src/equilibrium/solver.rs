use super::{EquilibriumError, EquilibriumField, SolveTrace, SurfaceCharge};
use crate::fem::{
    assemble_scalar, boundary_load, load_vector, Coef, Csr, Discretization, Factorization, Field,
    ScalarForm,
};
use crate::msa::{
    hard_sphere_p, local_state, onsager_local, solve_gamma_frozen, solve_xi, Electrolyte, Model,
    MsaParams, OnsagerLocal, Reservoir, Scaling,
};
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumOptions {
    /// Newton stops when ‖R‖₂ ≤ tol_pde · max(1, ‖N_σ ∫_S Σ* φ‖₂).
    pub tol_pde: f64,
    /// sup-norm tolerance of both fixed points.
    pub tol_fp: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub max_newton: usize,
    pub max_halvings: usize,
    /// Solves fail when ξ ≥ 1 − xi_guard anywhere.
    pub xi_guard: f64,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        Self {
            tol_pde: 1e-9,
            tol_fp: 1e-8,
            max_outer: 50,
            max_inner: 50,
            max_newton: 50,
            max_halvings: 20,
            xi_guard: 1e-6,
        }
    }
}

/// Frozen semilinear problem: −ΔΨ = β Σ_j z_j g_j e^{−z_jΨ} with the
/// Neumann load `b_s`. `g[j][q]` holds c_j exp(lb Γ z_j²/(1+a_jΓ) − p).
struct Semilinear<'a> {
    disc: &'a Discretization,
    stiffness: Csr,
    b_s: Vec<f64>,
    z: &'a [f64],
    scale: f64,
}

impl Semilinear<'_> {
    fn bulk(&self, psi_qp: &[f64], g: &[Vec<f64>], beta: f64) -> (Vec<f64>, Vec<f64>) {
        let mut src = vec![0.0; psi_qp.len()];
        let mut react = vec![0.0; psi_qp.len()];
        for (j, gj) in g.iter().enumerate() {
            let z = self.z[j];
            for q in 0..psi_qp.len() {
                let n = gj[q] * (-z * psi_qp[q]).exp();
                src[q] += beta * z * n;
                react[q] += beta * z * z * n;
            }
        }
        (src, react)
    }

    fn residual(&self, psi: &[f64], src: &[f64]) -> Vec<f64> {
        let kp = self.stiffness.mul(psi);
        let load = load_vector(&self.disc.p2, &self.disc.quad, src);
        kp.iter()
            .zip(&self.b_s)
            .zip(&load)
            .map(|((a, b), c)| a - b - c)
            .collect()
    }

    fn energy(&self, psi: &[f64], g: &[Vec<f64>], beta: f64) -> f64 {
        let kp = self.stiffness.mul(psi);
        let mut e: f64 = psi.iter().zip(&kp).map(|(a, b)| 0.5 * a * b).sum::<f64>()
            - psi.iter().zip(&self.b_s).map(|(a, b)| a * b).sum::<f64>();
        let psi_qp = Field {
            coeffs: psi.to_vec(),
        }
        .at_quadrature(&self.disc.p2, &self.disc.quad);
        for (j, gj) in g.iter().enumerate() {
            let z = self.z[j];
            for q in 0..psi_qp.len() {
                e += self.disc.quad.weights[q] * beta * gj[q] * (-z * psi_qp[q]).exp();
            }
        }
        e
    }

    /// Damped Newton from `psi`; returns residual norms and step lengths.
    fn newton(
        &self,
        psi: &mut Vec<f64>,
        g: &[Vec<f64>],
        beta: f64,
        opts: &EquilibriumOptions,
    ) -> Result<(Vec<f64>, Vec<f64>), EquilibriumError> {
        let disc = self.disc;
        let norm = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
        let state = |psi: &[f64]| {
            let psi_qp = Field {
                coeffs: psi.to_vec(),
            }
            .at_quadrature(&disc.p2, &disc.quad);
            self.bulk(&psi_qp, g, beta)
        };
        let (src, mut react) = state(psi);
        let mut r = self.residual(psi, &src);
        let mut rn = norm(&r);
        let mut residuals = vec![rn];
        let mut steps = Vec::new();
        for _ in 0..opts.max_newton {
            if rn <= opts.tol_pde * self.scale {
                return Ok((residuals, steps));
            }
            let form = ScalarForm {
                diffusion: Coef::Const(1.0),
                reaction: Coef::Qp(&react),
                source: Coef::Const(0.0),
                neumann: None,
                zero_mean: false,
            };
            let jac = assemble_scalar(&disc.mesh, &disc.topo, &disc.p2, &disc.quad, &form);
            let minus_r: Vec<f64> = r.iter().map(|v| -v).collect();
            let delta = Factorization::cholesky(jac.matrix)?.solve(&minus_r)?;
            let e0 = self.energy(psi, g, beta);
            let slope: f64 = r.iter().zip(&delta).map(|(a, b)| a * b).sum();
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..=opts.max_halvings {
                let trial: Vec<f64> = psi.iter().zip(&delta).map(|(p, d)| p + t * d).collect();
                let e1 = self.energy(&trial, g, beta);
                let armijo = e1 <= e0 + 1e-4 * t * slope;
                // Near convergence energy differences drown in roundoff; fall back to the residual.
                let flat = e1.is_finite() && (e1 - e0).abs() <= 1e-12 * e0.abs().max(1.0);
                if armijo || flat {
                    let (s, rc) = state(&trial);
                    let rt = self.residual(&trial, &s);
                    if armijo || norm(&rt) < rn {
                        accepted = Some((trial, rc, rt));
                        break;
                    }
                }
                t *= 0.5;
            }
            let Some((trial, rc, rt)) = accepted else {
                return Err(EquilibriumError::NewtonDivergence { residuals, steps });
            };
            *psi = trial;
            react = rc;
            r = rt;
            rn = norm(&r);
            residuals.push(rn);
            steps.push(t);
        }
        if rn <= opts.tol_pde * self.scale {
            Ok((residuals, steps))
        } else {
            Err(EquilibriumError::NewtonDivergence { residuals, steps })
        }
    }
}

/// Solves the unit-cell Poisson–Boltzmann problem and evaluates n_j⁰, Γ, ξ and
/// K_ij at every quadrature point.
pub fn solve_equilibrium(
    disc: &Discretization,
    el: &Electrolyte,
    sc: &Scaling,
    res: &Reservoir,
    charge: &SurfaceCharge,
    model: Model,
    opts: &EquilibriumOptions,
) -> Result<EquilibriumField, EquilibriumError> {
    let prm = MsaParams::new(el, sc);
    if model == Model::Msa {
        prm.check_bound1()?;
    }
    el.check_neutrality(1e-10)?;
    let nsp = prm.len();
    let nq = disc.n_quad();
    let n_sigma = sc.n_sigma;
    let b_s = boundary_load(&disc.mesh, &disc.topo, &disc.p2, &disc.quad, &|p, k| {
        n_sigma * charge.value(p, k)
    });
    let stiff_form = ScalarForm {
        diffusion: Coef::Const(1.0),
        reaction: Coef::Const(0.0),
        source: Coef::Const(0.0),
        neumann: None,
        zero_mean: false,
    };
    let stiffness =
        assemble_scalar(&disc.mesh, &disc.topo, &disc.p2, &disc.quad, &stiff_form).matrix;
    let scale = b_s.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    let problem = Semilinear {
        disc,
        stiffness,
        b_s,
        z: &prm.z,
        scale,
    };

    let mut trace = SolveTrace::default();
    let mut psi = vec![0.0; disc.p2.n_dofs];
    let mut gamma = vec![0.0; nq];
    let mut p_hs = vec![0.0; nq];
    let frozen = |gamma: &[f64], p_hs: &[f64]| -> Vec<Vec<f64>> {
        (0..nsp)
            .map(|j| {
                let z2 = prm.z[j] * prm.z[j];
                (0..nq)
                    .map(|q| match model {
                        Model::Ideal => prm.n_inf[j],
                        Model::Msa => {
                            res.c[j]
                                * (prm.lb * gamma[q] * z2 / (1.0 + prm.a[j] * gamma[q]) - p_hs[q])
                                    .exp()
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let psi_at_qp = |psi: &[f64]| {
        Field {
            coeffs: psi.to_vec(),
        }
        .at_quadrature(&disc.p2, &disc.quad)
    };

    loop {
        trace.outer_iters += 1;
        let psi_prev = psi.clone();
        let mut inner = 0;
        loop {
            inner += 1;
            trace.inner_iters += 1;
            let g = frozen(&gamma, &p_hs);
            newton_with_continuation(&problem, &mut psi, &g, sc.beta, opts, &mut trace)?;
            if model == Model::Ideal {
                break;
            }
            let psi_qp = psi_at_qp(&psi);
            let next: Vec<f64> = (0..nq)
                .into_par_iter()
                .map(|q| solve_gamma_frozen(psi_qp[q], p_hs[q], &prm, res))
                .collect::<Result<_, _>>()?;
            let upd = sup_diff(&next, &gamma);
            gamma = next;
            trace.inner_updates.push(upd);
            if upd < opts.tol_fp {
                break;
            }
            if inner >= opts.max_inner {
                return Err(EquilibriumError::Stagnation {
                    what: "screening",
                    iters: inner,
                    update: upd,
                });
            }
        }
        let upd = sup_diff(&psi, &psi_prev);
        trace.outer_updates.push(upd);
        if model == Model::Ideal {
            break;
        }
        let psi_qp = psi_at_qp(&psi);
        let xi: Vec<f64> = (0..nq)
            .into_par_iter()
            .map(|q| solve_xi(psi_qp[q], gamma[q], &prm, res))
            .collect::<Result<_, _>>()?;
        check_guard(&xi, opts.xi_guard)?;
        p_hs = xi
            .iter()
            .map(|&x| hard_sphere_p(x))
            .collect::<Result<_, _>>()?;
        if upd < opts.tol_fp {
            break;
        }
        if trace.outer_iters >= opts.max_outer {
            return Err(EquilibriumError::Stagnation {
                what: "hard-sphere",
                iters: trace.outer_iters,
                update: upd,
            });
        }
    }

    let psi_qp = psi_at_qp(&psi);
    let states = (0..nq)
        .into_par_iter()
        .map(|q| local_state(psi_qp[q], &prm, res, model))
        .collect::<Result<Vec<_>, _>>()?;
    let xi: Vec<f64> = states.iter().map(|s| s.xi).collect();
    check_guard(&xi, opts.xi_guard)?;
    let locals = states
        .par_iter()
        .map(|s| match model {
            Model::Ideal => Ok(OnsagerLocal::identity(nsp)),
            Model::Msa => onsager_local(s, el, sc, model),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let k: Vec<f64> = locals.iter().flat_map(|l| l.k.iter().copied()).collect();
    let n: Vec<Vec<f64>> = (0..nsp)
        .map(|j| states.iter().map(|s| s.n[j]).collect())
        .collect();
    let src: Vec<f64> = states
        .iter()
        .map(|s| sc.beta * (0..nsp).map(|j| prm.z[j] * s.n[j]).sum::<f64>())
        .collect();
    let r = problem.residual(&psi, &src);
    let weak_residual = r.iter().map(|v| v * v).sum::<f64>().sqrt() / problem.scale;
    let boundary_charge = problem.b_s.iter().sum();
    Ok(EquilibriumField {
        model,
        psi: Field { coeffs: psi },
        n,
        gamma: states.iter().map(|s| s.gamma).collect(),
        xi,
        k,
        z: prm.z.clone(),
        n_inf: prm.n_inf.clone(),
        beta: sc.beta,
        n_sigma,
        xi_c: sc.xi_c,
        boundary_charge,
        weak_residual,
        trace,
    })
}

/// Newton at the target β; on failure, geometric continuation β/100, β/10, β
/// restarted from the current iterate.
fn newton_with_continuation(
    problem: &Semilinear,
    psi: &mut Vec<f64>,
    g: &[Vec<f64>],
    beta: f64,
    opts: &EquilibriumOptions,
    trace: &mut SolveTrace,
) -> Result<(), EquilibriumError> {
    let record = |trace: &mut SolveTrace, (r, s): (Vec<f64>, Vec<f64>)| {
        trace.newton_iters += s.len();
        trace.newton_residuals.push(r);
        trace.newton_steps.push(s);
    };
    let start = psi.clone();
    match problem.newton(psi, g, beta, opts) {
        Ok(rs) => {
            record(trace, rs);
            Ok(())
        }
        Err(EquilibriumError::NewtonDivergence { residuals, steps }) => {
            record(trace, (residuals, steps));
            *psi = start;
            for b in [beta / 100.0, beta / 10.0, beta] {
                trace.continuation.push(b);
                let rs = problem.newton(psi, g, b, opts)?;
                record(trace, rs);
            }
            Ok(())
        }
        Err(e) => Err(e),
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn check_guard(xi: &[f64], guard: f64) -> Result<(), EquilibriumError> {
    let max = xi.iter().copied().fold(0.0, f64::max);
    if max >= 1.0 - guard {
        return Err(EquilibriumError::PackingGuard(max, guard));
    }
    Ok(())
}
