use poremsa::mesh::{build_cell, validate_mesh, MeshOptions, UnitCellGeometry};
use poremsa::msa::*;
use proptest::prelude::*;

const SIGMA: f64 = 3.3e-10;

/// Na, Ca, Cl at neutral reservoir concentrations (mol/L), equal diameters.
fn mixture(na: f64, ca: f64, c_ref: f64) -> (Electrolyte, Scaling, MsaParams) {
    let cl = na + 2.0 * ca;
    let el = Electrolyte::new(
        Electrolyte::nacl().solvent,
        vec![
            Species::new("Na", 1, 1.333e-9, SIGMA, na / c_ref),
            Species::new("Ca", 2, 0.792e-9, SIGMA, ca / c_ref),
            Species::new("Cl", -1, 2.032e-9, SIGMA, cl / c_ref),
        ],
    )
    .unwrap();
    let sc = Scaling::new(&el, 50e-9, Scaling::n_from_mol_per_l(c_ref), 0.129).unwrap();
    let prm = MsaParams::new(&el, &sc);
    (el, sc, prm)
}

/// Screening residual with ξ eliminated, rebuilt from the public closures.
fn screening_residual(psi: f64, gamma: f64, prm: &MsaParams, res: &Reservoir) -> f64 {
    let xi = solve_xi(psi, gamma, prm, res).unwrap();
    let p = hard_sphere_p(xi).unwrap();
    let mut f = gamma * gamma;
    for j in 0..prm.len() {
        let z2 = prm.z[j] * prm.z[j];
        let q = 1.0 + prm.a[j] * gamma;
        let n = res.c[j] * (-prm.z[j] * psi - p + prm.lb * gamma * z2 / q).exp();
        f -= z2 * n / (q * q);
    }
    f
}

fn concentrations() -> impl Strategy<Value = (f64, f64, f64)> {
    (-3.0f64..0.0, -3.0f64..-0.5, -3.0f64..0.0)
        .prop_map(|(a, b, c)| (10f64.powf(a), 10f64.powf(b), 10f64.powf(c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hard_sphere_p_is_increasing(x in 0.0f64..0.95, dx in 1e-6f64..0.04) {
        prop_assert!(hard_sphere_p(x + dx).unwrap() > hard_sphere_p(x).unwrap());
        prop_assert!(hard_sphere_dp(x).unwrap() > 0.0);
    }

    #[test]
    fn packing_residual_changes_sign_once(
        (na, ca, cref) in concentrations(),
        psi in -5.0f64..5.0,
        scale in 0.2f64..3.0,
    ) {
        let (_, _, prm) = mixture(na, ca, cref);
        let res = reservoir_closure(&prm).unwrap();
        let gamma = res.gamma0 * scale;
        let xi = solve_xi(psi, gamma, &prm, &res).unwrap();
        prop_assert!((0.0..1.0).contains(&xi));
        let g = |x: f64| x * hard_sphere_p(x).unwrap().exp();
        let target = g(xi);
        let mut changes = 0;
        let mut last = g(0.0) - target;
        for k in 1..400 {
            let x = 0.99 * k as f64 / 400.0;
            let v = g(x) - target;
            if v.signum() != last.signum() && v != 0.0 && last != 0.0 {
                changes += 1;
            }
            last = v;
        }
        prop_assert!(changes <= 1);
    }

    #[test]
    fn screening_root_is_transversal(
        (na, ca, cref) in concentrations(),
        psi in -5.0f64..5.0,
    ) {
        let (_, _, prm) = mixture(na, ca, cref);
        let res = reservoir_closure(&prm).unwrap();
        let st = local_state(psi, &prm, &res, Model::Msa).unwrap();
        prop_assert!(st.gamma > 0.0);
        let h = 1e-6 * st.gamma;
        let lo = screening_residual(psi, st.gamma - h, &prm, &res);
        let hi = screening_residual(psi, st.gamma + h, &prm, &res);
        prop_assert!(lo < 0.0 && hi > 0.0, "{} {}", lo, hi);
    }

    #[test]
    fn local_state_respects_bounds(
        (na, ca, cref) in concentrations(),
        psi in -5.0f64..5.0,
    ) {
        let (_, _, prm) = mixture(na, ca, cref);
        let res = reservoir_closure(&prm).unwrap();
        let st = local_state(psi, &prm, &res, Model::Msa).unwrap();
        prop_assert!((0.0..1.0).contains(&st.xi));
        prop_assert!(st.n.iter().all(|n| *n > 0.0));
        let p = hard_sphere_p(st.xi).unwrap();
        prop_assert!((st.gamma_hs - p.exp()).abs() <= 1e-14 * st.gamma_hs);
    }

    #[test]
    fn reservoir_screening_root(
        (na, ca, cref) in concentrations(),
    ) {
        let (_, _, prm) = mixture(na, ca, cref);
        let res = reservoir_closure(&prm).unwrap();
        let g = res.gamma0;
        let rhs: f64 = (0..prm.len())
            .map(|j| prm.n_inf[j] * prm.z[j].powi(2) / (1.0 + prm.a[j] * g).powi(2))
            .sum();
        prop_assert!((g * g - rhs).abs() <= 1e-10 * rhs);
    }

    #[test]
    fn onsager_matrix_is_symmetric(
        (na, ca, cref) in concentrations(),
        psi in -5.0f64..5.0,
    ) {
        let (el, sc, prm) = mixture(na, ca, cref);
        let res = reservoir_closure(&prm).unwrap();
        let st = local_state(psi, &prm, &res, Model::Msa).unwrap();
        let on = onsager_local(&st, &el, &sc, Model::Msa).unwrap();
        let d: Vec<f64> = el.species().iter().map(|s| s.d0).collect();
        let m = |i: usize, j: usize| st.n[i] * d[i] * on.k_at(i, j);
        let scale = (0..3).map(|i| m(i, i).abs()).fold(0.0, f64::max);
        for i in 0..3 {
            for j in 0..i {
                prop_assert!((m(i, j) - m(j, i)).abs() <= 1e-12 * scale, "{} {}", m(i, j), m(j, i));
            }
        }
    }

    #[test]
    fn linearization_is_the_potential_derivative(
        (na, ca, cref) in concentrations(),
        psi in -5.0f64..5.0,
    ) {
        let (_, _, prm) = mixture(na, ca, cref);
        let res = reservoir_closure(&prm).unwrap();
        let st = local_state(psi, &prm, &res, Model::Msa).unwrap();
        let lin = linearization_coeffs(&st, &prm, Model::Msa).unwrap();
        prop_assert!(lin.a > 0.0);
        let h = 1e-5;
        let up = local_state(psi + h, &prm, &res, Model::Msa).unwrap();
        let dn = local_state(psi - h, &prm, &res, Model::Msa).unwrap();
        let an = lin.dn_dpsi(&prm.z);
        for i in 0..3 {
            let fd = (up.n[i] - dn.n[i]) / (2.0 * h);
            let scale = st.n.iter().fold(0.0f64, |m, v| m.max(*v));
            prop_assert!((an[i] - fd).abs() <= 1e-5 * scale, "{} vs {}", an[i], fd);
        }
        for i in 0..3 {
            for k in 0..i {
                let (x, y) = (lin.alpha_at(i, k), lin.alpha_at(k, i));
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn ellipse_meshes_are_valid(
        phi in 0.45f64..0.85,
        aspect in 1.0f64..2.5,
        angle in 0.0f64..std::f64::consts::PI,
    ) {
        prop_assume!(UnitCellGeometry::ellipse(phi, aspect, angle).is_ok());
        let g = UnitCellGeometry::ellipse(phi, aspect, angle).unwrap();
        let opts = MeshOptions { h_far: 0.1, ..Default::default() };
        let mesh = build_cell(&g, &opts).unwrap();
        let report = validate_mesh(&mesh);
        prop_assert!(report.is_valid(), "{:?}", report.violations);
        prop_assert!((mesh.fluid_area() - phi).abs() < 0.005 * phi);
    }
}
