use super::config::{ConfigError, RunConfig, SweepPoint};
use crate::equilibrium::{
    equilibrium_diagnostics, solve_equilibrium, EquilibriumError, EquilibriumField,
    EquilibriumReport, SurfaceCharge,
};
use crate::fem::Discretization;
use crate::mesh::{build_cell, MeshError, MeshOptions};
use crate::msa::{Electrolyte, Model, MsaError, MsaParams, Reservoir, Scaling, AVOGADRO};
use crate::upscale::{
    assemble_effective_tensor, neutral_permeability, onsager_check, solve_cell_problems,
    CellSolutionSet, EffectiveTensor, OnsagerReport, UpscaleError,
};
use rayon::prelude::*;
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("mesh: {0}")]
    Mesh(#[from] MeshError),
    #[error("closure: {0}")]
    Msa(#[from] MsaError),
    #[error("equilibrium: {0}")]
    Equilibrium(#[from] EquilibriumError),
    #[error("cell problems: {0}")]
    Upscale(#[from] UpscaleError),
    #[error("effective tensor fails the Onsager check:\n{0}")]
    Onsager(OnsagerReport),
}

/// Mesh options for one point; the first layer is capped by the Debye length
/// and the wall-charge length.
pub fn mesh_options(cfg: &RunConfig, sc: &Scaling) -> MeshOptions {
    let m = &cfg.mesh;
    let wall_cap = (m.wall_factor > 0.0).then(|| {
        let debye = 1.0 / sc.beta.sqrt();
        let charge = if sc.n_sigma > 0.0 && cfg.surface_charge != 0.0 {
            1.0 / (sc.n_sigma * cfg.surface_charge.abs())
        } else {
            f64::INFINITY
        };
        m.wall_factor * debye.min(charge)
    });
    MeshOptions {
        h_far: m.h_far,
        wall_ratio: m.wall_ratio,
        wall_cap,
        growth: m.growth,
        refine: m.refine,
    }
}

pub fn discretize(cfg: &RunConfig, point: &SweepPoint) -> Result<Discretization, RunError> {
    let geom = point.geometry.build()?;
    let mesh = build_cell(&geom, &mesh_options(cfg, &point.scaling))?;
    Ok(Discretization::new(mesh))
}

/// Reservoir closure and equilibrium solve.
pub fn solve_point_equilibrium(
    cfg: &RunConfig,
    point: &SweepPoint,
    disc: &Discretization,
    model: Model,
) -> Result<EquilibriumField, RunError> {
    let prm = MsaParams::new(&point.electrolyte, &point.scaling);
    let res = Reservoir::for_model(&prm, model)?;
    let charge = SurfaceCharge::Uniform(cfg.surface_charge);
    Ok(solve_equilibrium(
        disc,
        &point.electrolyte,
        &point.scaling,
        &res,
        &charge,
        model,
        &cfg.solver,
    )?)
}

/// Everything computed for one (point, model) pair.
#[derive(Debug, Clone)]
pub struct PointSolution {
    pub equilibrium: EquilibriumField,
    pub report: EquilibriumReport,
    pub cells: CellSolutionSet,
    pub tensor: EffectiveTensor,
    pub onsager: OnsagerReport,
    /// Permeability of the uncharged fluid in the same cell.
    pub k0: [[f64; 2]; 2],
}

pub fn solve_point(
    cfg: &RunConfig,
    point: &SweepPoint,
    disc: &Discretization,
    model: Model,
) -> Result<PointSolution, RunError> {
    let equilibrium = solve_point_equilibrium(cfg, point, disc, model)?;
    let report = equilibrium_diagnostics(&equilibrium, disc);
    let cells = solve_cell_problems(disc, &equilibrium, &point.electrolyte, &point.scaling)?;
    let tensor = assemble_effective_tensor(&cells, &equilibrium, disc);
    let onsager = onsager_check(&tensor);
    if !onsager.passed {
        return Err(RunError::Onsager(onsager));
    }
    let k0 = neutral_permeability(disc)?;
    Ok(PointSolution {
        equilibrium,
        report,
        cells,
        tensor,
        onsager,
        k0,
    })
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub run_id: String,
    pub point: usize,
    /// Sweep parameter value (NaN without a sweep).
    pub value: f64,
    pub model: Model,
    pub geometry: String,
    pub porosity: f64,
    pub ell_nm: f64,
    /// Reservoir concentration n* of the first species, mol/l.
    pub n_inf_mol_per_l: f64,
    pub tensor: EffectiveTensor,
    pub krel: [f64; 2],
    /// Cell averages of n_j⁰ in units of n_c.
    pub averages: Vec<f64>,
    pub n_c_mol_per_l: f64,
    pub sym_residual: f64,
    pub min_eig: f64,
    pub newton_iters: usize,
    pub outer_iters: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub point: usize,
    pub value: f64,
    pub model: Model,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub failures: Vec<PointFailure>,
}

impl SweepOutcome {
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn reference_mol_per_l(el: &Electrolyte, sc: &Scaling) -> f64 {
    el.species()[0].n_inf * sc.n_c / (AVOGADRO * 1e3)
}

impl SweepRecord {
    pub fn new(
        point: &SweepPoint,
        model: Model,
        disc: &Discretization,
        sol: &PointSolution,
    ) -> Self {
        let k = &sol.tensor.k;
        SweepRecord {
            run_id: format!("p{:03}-{}", point.index, model),
            point: point.index,
            value: point.value,
            model,
            geometry: point.geometry.name().to_string(),
            porosity: point
                .geometry
                .build()
                .map_or(disc.fluid_area, |g| g.porosity()),
            ell_nm: point.scaling.ell * 1e9,
            n_inf_mol_per_l: reference_mol_per_l(&point.electrolyte, &point.scaling),
            tensor: sol.tensor.clone(),
            krel: [k[0][0] / sol.k0[0][0], k[1][1] / sol.k0[1][1]],
            averages: sol.report.averages.clone(),
            n_c_mol_per_l: point.scaling.n_c / (AVOGADRO * 1e3),
            sym_residual: sol.onsager.symmetry_residual,
            min_eig: sol.onsager.min_eigenvalue,
            newton_iters: sol.report.newton_iters,
            outer_iters: sol.report.outer_iters,
        }
    }
}

fn run_one(cfg: &RunConfig, point: &SweepPoint, model: Model) -> Result<SweepRecord, RunError> {
    let disc = discretize(cfg, point)?;
    let sol = solve_point(cfg, point, &disc, model)?;
    Ok(SweepRecord::new(point, model, &disc, &sol))
}

/// Validates, then runs every (point, model) pair. Records are ordered by
/// sweep value, then model. Failed pairs are listed in the outcome.
pub fn run_sweep(cfg: &RunConfig, sequential: bool) -> Result<SweepOutcome, ConfigError> {
    let points = cfg.validate()?;
    let mut models = cfg.models.clone();
    models.sort();
    models.dedup();
    let jobs: Vec<(&SweepPoint, Model)> = points
        .iter()
        .flat_map(|p| models.iter().map(move |&m| (p, m)))
        .collect();
    let results: Vec<Result<SweepRecord, RunError>> = if sequential {
        jobs.iter().map(|(p, m)| run_one(cfg, p, *m)).collect()
    } else {
        jobs.par_iter().map(|(p, m)| run_one(cfg, p, *m)).collect()
    };
    let mut out = SweepOutcome::default();
    for ((p, m), r) in jobs.iter().zip(results) {
        match r {
            Ok(rec) => out.records.push(rec),
            Err(e) => out.failures.push(PointFailure {
                point: p.index,
                value: p.value,
                model: *m,
                message: e.to_string(),
            }),
        }
    }
    Ok(out)
}

/// Derived groups with units plus the Bound1 and electroneutrality verdicts.
pub fn check_report(cfg: &RunConfig) -> Result<String, ConfigError> {
    let el = cfg.electrolyte()?;
    let mut s = String::new();
    let sv = &el.solvent;
    let _ = writeln!(s, "species (sorted by valence):");
    for sp in el.species() {
        let _ = writeln!(
            s,
            "  {:<6} z = {:+}  D = {:.4e} m^2/s  sigma = {:.4e} m  n_inf = {}",
            sp.name, sp.z, sp.d0, sp.sigma, sp.n_inf
        );
    }
    let neutral = el.check_neutrality(1e-10);
    let _ = writeln!(
        s,
        "electroneutrality: {}",
        match &neutral {
            Ok(()) => "pass".to_string(),
            Err(e) => format!("FAIL ({e})"),
        }
    );
    let points = cfg.points()?;
    let mut ok = neutral.is_ok();
    for p in &points {
        let sc = &p.scaling;
        if cfg.sweep.parameter != super::SweepParameter::None {
            let _ = writeln!(
                s,
                "\n[point {}: {} = {}]",
                p.index,
                cfg.sweep.parameter.name(),
                p.value
            );
        } else {
            let _ = writeln!(s);
        }
        let _ = writeln!(s, "  L_B      = {:.6e} m", sv.bjerrum_length());
        let _ = writeln!(s, "  lambda_D = {:.6e} m", sc.debye_length);
        let _ = writeln!(s, "  ell      = {:.6e} m", sc.ell);
        let _ = writeln!(
            s,
            "  n_c      = {:.6e} 1/m^3 ({} mol/l)",
            sc.n_c,
            sc.n_c / (AVOGADRO * 1e3)
        );
        let _ = writeln!(
            s,
            "  n*       = {} mol/l",
            reference_mol_per_l(&p.electrolyte, sc)
        );
        let _ = writeln!(s, "  beta     = {:.6e}", sc.beta);
        let _ = writeln!(s, "  Gamma_c  = {:.6e} 1/m", sc.gamma_c);
        let _ = writeln!(s, "  xi_c     = {:.6e}", sc.xi_c);
        let _ = writeln!(s, "  N_sigma  = {:.6e}", sc.n_sigma);
        for (sp, pe) in p.electrolyte.species().iter().zip(&sc.peclet) {
            let _ = writeln!(s, "  Pe_{:<5} = {:.6e}", sp.name, pe);
        }
        let prm = MsaParams::new(&p.electrolyte, sc);
        match prm.check_bound1() {
            Ok(()) => {
                let _ = writeln!(s, "  Bound1   : pass");
            }
            Err(e) => {
                ok = false;
                let _ = writeln!(s, "  Bound1   : FAIL ({e})");
            }
        }
        if let Ok(res) = Reservoir::for_model(&prm, Model::Msa) {
            let g: Vec<String> = res.gamma_inf.iter().map(|g| format!("{g:.6}")).collect();
            let _ = writeln!(s, "  gamma_inf (msa) = [{}]", g.join(", "));
        }
    }
    let _ = writeln!(s, "\nverdict: {}", if ok { "valid" } else { "INVALID" });
    if ok {
        Ok(s)
    } else {
        Err(ConfigError::Validation(s))
    }
}
