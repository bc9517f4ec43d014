use poremsa::equilibrium::*;
use poremsa::fem::Discretization;
use poremsa::msa::{Model, MsaParams, Reservoir, Scaling};
use poremsa::sweep::{discretize, solve_point_equilibrium, RunConfig, SweepPoint};

fn config(c: f64, charge: f64) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.n_c_mol_per_l = c;
    cfg.surface_charge = charge;
    cfg
}

fn setup(cfg: &RunConfig) -> (SweepPoint, Discretization) {
    let point = cfg.points().unwrap().remove(0);
    let disc = discretize(cfg, &point).unwrap();
    (point, disc)
}

fn solve(cfg: &RunConfig, model: Model) -> (EquilibriumField, EquilibriumReport, Discretization) {
    let (point, disc) = setup(cfg);
    let eq = solve_point_equilibrium(cfg, &point, &disc, model).unwrap();
    let rep = equilibrium_diagnostics(&eq, &disc);
    (eq, rep, disc)
}

#[test]
fn zero_charge_gives_zero_potential() {
    for model in [Model::Msa, Model::Ideal] {
        let (eq, rep, _) = solve(&config(0.1, 0.0), model);
        assert!(eq.psi.max_abs() < 1e-10, "{model}");
        for (j, nj) in eq.n.iter().enumerate() {
            assert!(nj.iter().all(|v| (v - eq.n_inf[j]).abs() < 1e-10));
            assert!((rep.averages[j] - eq.n_inf[j]).abs() < 1e-10);
        }
    }
}

/// Electroneutrality fixes the averaged counterion excess at
/// N_σ|∫_S Σ*|/(β|Y_F|), about 0.5 at this point, so the 2% bound is out of
/// reach for this wall charge.
#[test]
#[ignore = "bound contradicted by the neutrality identity below"]
fn ideal_large_pore_is_screened() {
    let (eq, rep, _) = solve(&config(0.1, -1.0), Model::Ideal);
    for j in 0..2 {
        let rel = (rep.averages[j] - eq.n_inf[j]).abs() / eq.n_inf[j];
        assert!(rel < 0.02, "species {j}: {}", rep.averages[j]);
    }
}

#[test]
fn averaged_excess_is_fixed_by_neutrality() {
    let mut last = f64::INFINITY;
    for c in [0.1, 1.0] {
        let (eq, rep, disc) = solve(&config(c, -1.0), Model::Ideal);
        let excess = rep.averages[1] - rep.averages[0];
        let expected = -eq.boundary_charge / (eq.beta * disc.fluid_area);
        assert!((excess - expected).abs() < 1e-6 * expected, "{excess} {expected}");
        let dev = (0..2)
            .map(|j| (rep.averages[j] - eq.n_inf[j]).abs())
            .fold(0.0, f64::max);
        assert!(dev < last);
        last = dev;
    }
    assert!(last < 0.05, "{last}");
}

#[test]
fn msa_anion_exceeds_ideal_when_dilute() {
    let cfg = config(0.001, -1.0);
    let (_, msa, _) = solve(&cfg, Model::Msa);
    let (_, ideal, _) = solve(&cfg, Model::Ideal);
    assert!(
        msa.averages[0] > ideal.averages[0],
        "msa {} ideal {}",
        msa.averages[0],
        ideal.averages[0]
    );
}

#[test]
fn solve_meets_tolerances_and_bounds() {
    let cfg = config(0.1, -1.0);
    let (eq, rep, _) = solve(&cfg, Model::Msa);
    assert!(rep.weak_residual < cfg.solver.tol_pde, "{}", rep.weak_residual);
    assert!(rep.charge_balance.abs() < 1e-6, "{}", rep.charge_balance);
    assert!(rep.within_bounds);
    assert!(rep.psi_min < -1.0 && rep.psi_max < 1e-4, "{} {}", rep.psi_min, rep.psi_max);
    assert!(eq.trace.outer_updates.last().unwrap() < &cfg.solver.tol_fp);
}

#[test]
fn newton_tail_is_quadratic() {
    let (eq, _, _) = solve(&config(0.1, -1.0), Model::Ideal);
    let r = eq
        .trace
        .newton_residuals
        .iter()
        .rev()
        .find(|r| r.len() >= 3)
        .expect("a Newton solve with at least two steps");
    let k = r.len();
    let c = r[k - 1] / (r[k - 2] * r[k - 2]);
    assert!(r[k - 1] < r[k - 2] && c.is_finite(), "{r:?}");
    assert!(eq.trace.quadratic_constant().is_some());
}

#[test]
fn stronger_charge_attracts_more_counterions() {
    let (_, weak, _) = solve(&config(0.1, -0.5), Model::Msa);
    let (_, strong, _) = solve(&config(0.1, -1.0), Model::Msa);
    assert!(strong.averages[1] > weak.averages[1]);
    assert!(strong.averages[0] < weak.averages[0]);
}

#[test]
fn potential_is_mesh_converged() {
    let mut coarse_cfg = config(0.1, -1.0);
    coarse_cfg.mesh.refine = 1;
    let mut fine_cfg = coarse_cfg.clone();
    fine_cfg.mesh.refine = 2;
    let (coarse, _, cd) = solve(&coarse_cfg, Model::Msa);
    let (fine, _, fd) = solve(&fine_cfg, Model::Msa);
    let fine_vals = fine.psi.at_quadrature(&fd.p2, &fd.quad);
    let (mut diff, mut norm) = (0.0, 0.0);
    for (q, p) in fd.quad.points.iter().enumerate() {
        if let Some(c) = coarse.psi.eval(&cd.p2, &cd.quad, *p) {
            let w = fd.quad.weights[q];
            diff += w * (c - fine_vals[q]).powi(2);
            norm += w * fine_vals[q].powi(2);
        }
    }
    let rel = (diff / norm).sqrt();
    assert!(rel < 5e-3, "{rel:e}");
}

/// The wall charge shrinks with n_c so that every local concentration, not
/// only the reservoir, tends to zero.
#[test]
fn msa_approaches_ideal_as_packing_vanishes() {
    let diffs: Vec<f64> = [1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&c| {
            let mut cfg = config(c, -1.0);
            cfg.sigma_c = 0.129 * c / 0.1;
            let (msa, _, disc) = solve(&cfg, Model::Msa);
            let (ideal, _, _) = solve(&cfg, Model::Ideal);
            let a = msa.psi.at_quadrature(&disc.p2, &disc.quad);
            let b = ideal.psi.at_quadrature(&disc.p2, &disc.quad);
            let (mut d, mut n) = (0.0, 0.0);
            for q in 0..a.len() {
                d += disc.quad.weights[q] * (a[q] - b[q]).powi(2);
                n += disc.quad.weights[q] * b[q].powi(2);
            }
            (d / n).sqrt()
        })
        .collect();
    assert!(diffs[2] < diffs[1] && diffs[1] < diffs[0], "{diffs:?}");
    let rate = (diffs[0] / diffs[2]).log10() / 2.0;
    assert!((rate - 0.5).abs() < 0.1, "rate {rate} {diffs:?}");
}

#[test]
fn bound1_violation_is_refused() {
    let cfg = config(0.1, -1.0);
    let (point, disc) = setup(&cfg);
    let mut solvent = point.electrolyte.solvent;
    solvent.epsilon *= 0.05;
    let el = poremsa::msa::Electrolyte::new(solvent, point.electrolyte.species().to_vec()).unwrap();
    let sc = Scaling::new(&el, 50e-9, point.scaling.n_c, 0.129).unwrap();
    let prm = MsaParams::new(&el, &sc);
    let res = Reservoir::ideal(&prm);
    let err = solve_equilibrium(
        &disc,
        &el,
        &sc,
        &res,
        &SurfaceCharge::Uniform(-1.0),
        Model::Msa,
        &EquilibriumOptions::default(),
    )
    .unwrap_err();
    assert!(err.to_string().contains("Bjerrum"), "{err}");
}

#[test]
fn export_has_one_row_per_vertex() {
    let cfg = config(0.1, -1.0);
    let (point, disc) = setup(&cfg);
    let eq = solve_point_equilibrium(&cfg, &point, &disc, Model::Ideal).unwrap();
    let prm = MsaParams::new(&point.electrolyte, &point.scaling);
    let res = Reservoir::ideal(&prm);
    let csv = export_csv(&eq, &disc, &point.electrolyte, &point.scaling, &res).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("x,y,Psi"));
    assert_eq!(lines.count(), disc.mesh.vertices.len());
}
