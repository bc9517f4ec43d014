use poremsa::msa::*;

fn nacl_at(mol_per_l: f64) -> (Electrolyte, Scaling, MsaParams) {
    let el = Electrolyte::nacl();
    let sc = Scaling::new(&el, 50e-9, Scaling::n_from_mol_per_l(mol_per_l), 0.129).unwrap();
    let prm = MsaParams::new(&el, &sc);
    (el, sc, prm)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn hard_sphere_values() {
    assert_eq!(hard_sphere_p(0.0).unwrap(), 0.0);
    assert!((hard_sphere_p(0.2).unwrap() - 2.46875).abs() < 1e-14);
    assert_eq!(hard_sphere_dp(0.0).unwrap(), 8.0);
    let h = 1e-5;
    for &x in &[0.05, 0.3, 0.6] {
        let fd = (hard_sphere_p(x + h).unwrap() - hard_sphere_p(x - h).unwrap()) / (2.0 * h);
        assert!(rel(fd, hard_sphere_dp(x).unwrap()) < 1e-8);
    }
    assert!(hard_sphere_p(1.0).is_err());
    assert!(hard_sphere_p(-1e-3).is_err());
}

#[test]
fn reservoir_activity_nacl() {
    let (_, _, prm) = nacl_at(0.1);
    let res = reservoir_closure(&prm).unwrap();
    assert!(
        (res.gamma_inf[0] - 0.7678).abs() < 2e-3,
        "{:?}",
        res.gamma_inf
    );
    assert_eq!(res.gamma_inf[0], res.gamma_inf[1]);
}

#[test]
fn bjerrum_and_bound1() {
    let el = Electrolyte::nacl();
    let lb = el.solvent.bjerrum_length();
    assert!(rel(lb, 7.3e-10) < 0.05, "{lb}");
    assert!(7.3e-10 < BOUND1 * 3.3e-10);
    let (_, _, prm) = nacl_at(0.1);
    prm.check_bound1().unwrap();
    let mut bad = prm.clone();
    bad.lb = 20.0 * bad.a[1];
    match bad.check_bound1() {
        Err(MsaError::Bound1 { species, .. }) => assert_eq!(species, "Cl"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn gamma_equal_diameter_closed_form() {
    let (_, _, prm) = nacl_at(0.1);
    let res = reservoir_closure(&prm).unwrap();
    let a = prm.a[0];
    let d: f64 = prm.n_inf.iter().zip(&prm.z).map(|(n, z)| n * z * z).sum();
    let closed = (-1.0 + (1.0 + 4.0 * a * d.sqrt()).sqrt()) / (2.0 * a);
    let g = solve_gamma(0.0, &prm, &res).unwrap();
    assert!(rel(g, closed) < 1e-12, "{g} {closed}");
    assert!(rel(res.gamma0, closed) < 1e-12);
}

#[test]
fn local_state_at_zero_is_reservoir() {
    let (_, _, prm) = nacl_at(0.1);
    let res = reservoir_closure(&prm).unwrap();
    let st = local_state(0.0, &prm, &res, Model::Msa).unwrap();
    for j in 0..2 {
        assert!(rel(st.n[j], prm.n_inf[j]) < 1e-12);
    }
    let ideal = local_state(0.7, &prm, &Reservoir::ideal(&prm), Model::Ideal).unwrap();
    assert!(rel(ideal.n[1], (-0.7f64).exp()) < 1e-15);
}

#[test]
fn local_state_self_consistent() {
    let (_, _, prm) = nacl_at(0.1);
    let res = reservoir_closure(&prm).unwrap();
    let st = local_state(1.0, &prm, &res, Model::Msa).unwrap();
    assert!(prm.gamma_residual(st.gamma, &st.n).abs() < 1e-10);
    assert!((prm.packing(&st.n) - st.xi).abs() < 1e-12);
}

/// 200-step bisection on the monotone residual ξ e^{p(ξ)} − rhs.
fn xi_bisection(psi: f64, gamma: f64, prm: &MsaParams, res: &Reservoir) -> f64 {
    let rhs: f64 = (0..prm.len())
        .map(|j| {
            let z = prm.z[j];
            prm.s[j]
                * res.c[j]
                * (-z * psi + prm.lb * gamma * z * z / (1.0 + prm.a[j] * gamma)).exp()
        })
        .sum();
    let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-15);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * hard_sphere_p(mid).unwrap().exp() < rhs {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn solve_xi_matches_bisection() {
    for &c in &[0.001, 0.1, 1.0] {
        let (_, _, prm) = nacl_at(c);
        let res = reservoir_closure(&prm).unwrap();
        for &psi in &[-5.0, -1.0, 0.0, 2.0, 5.0] {
            for &g in &[0.0, 0.3, 1.0, 3.0] {
                let xi = solve_xi(psi, g, &prm, &res).unwrap();
                assert!((xi - xi_bisection(psi, g, &prm, &res)).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn onsager_symmetry_nacl() {
    let (el, sc, prm) = nacl_at(0.1);
    let res = reservoir_closure(&prm).unwrap();
    let st = local_state(0.0, &prm, &res, Model::Msa).unwrap();
    let on = onsager_local(&st, &el, &sc, Model::Msa).unwrap();
    let d: Vec<f64> = el.species().iter().map(|s| s.d0).collect();
    let a = st.n[0] * d[0] * on.k_at(0, 1);
    let b = st.n[1] * d[1] * on.k_at(1, 0);
    assert!(rel(a, b) < 1e-12, "{a} {b}");
    assert!(on.k_at(0, 0) > 0.0 && on.k_at(1, 1) > 0.0);
    let ideal = onsager_local(&st, &el, &sc, Model::Ideal).unwrap();
    assert_eq!(ideal.k, vec![1.0, 0.0, 0.0, 1.0]);
}

#[test]
fn linearization_matches_finite_difference() {
    let (_, _, prm) = nacl_at(0.1);
    let res = reservoir_closure(&prm).unwrap();
    let h = 1e-5;
    for k in 0..=20 {
        let psi = -5.0 + 0.5 * k as f64;
        let st = local_state(psi, &prm, &res, Model::Msa).unwrap();
        let lin = linearization_coeffs(&st, &prm, Model::Msa).unwrap();
        let up = local_state(psi + h, &prm, &res, Model::Msa).unwrap();
        let dn = local_state(psi - h, &prm, &res, Model::Msa).unwrap();
        let an = lin.dn_dpsi(&prm.z);
        for i in 0..2 {
            let fd = (up.n[i] - dn.n[i]) / (2.0 * h);
            assert!(rel(an[i], fd) < 1e-5, "psi {psi} i {i}: {} vs {fd}", an[i]);
        }
        assert!(rel(lin.alpha_at(0, 1), lin.alpha_at(1, 0)) < 1e-12);
    }
}

#[test]
fn pressure_ideal_and_trapezoid() {
    let (_, _, prm) = nacl_at(0.1);
    let ideal = Reservoir::ideal(&prm);
    let t = equilibrium_pressure(&[-2.0, 0.0, 1.5], &prm, &ideal, Model::Ideal).unwrap();
    for s in &t {
        for j in 0..2 {
            let ex = prm.n_inf[j] * ((-prm.z[j] * s.psi).exp() - 1.0);
            assert!((s.e[j] - ex).abs() < 1e-10 * ex.abs().max(1.0));
        }
    }
    assert_eq!(t[1].p0, 0.0);
}

#[test]
fn xi_vanishes_with_vanishing_packing() {
    let (_, _, prm) = nacl_at(0.1);
    let mut empty = prm.clone();
    empty.s = vec![0.0; prm.len()];
    let res = Reservoir::ideal(&empty);
    assert_eq!(solve_xi(0.5, 1.0, &empty, &res).unwrap(), 0.0);
}

#[test]
fn xi_increases_with_gamma() {
    let (_, _, prm) = nacl_at(0.5);
    let res = reservoir_closure(&prm).unwrap();
    for &psi in &[-3.0, 0.0, 3.0] {
        let mut last = 0.0;
        for k in 0..30 {
            let xi = solve_xi(psi, 0.2 * k as f64, &prm, &res).unwrap();
            assert!(xi >= last, "psi {psi}: {xi} < {last}");
            last = xi;
        }
    }
}

#[test]
fn ideal_screening_reduction() {
    let (_, _, prm) = nacl_at(0.1);
    let ideal = Reservoir::ideal(&prm);
    for &psi in &[-2.0, 0.0, 1.3] {
        let st = local_state(psi, &prm, &ideal, Model::Ideal).unwrap();
        let exact: f64 = (0..2)
            .map(|j| prm.n_inf[j] * prm.z[j] * prm.z[j] * (-prm.z[j] * psi).exp())
            .sum::<f64>()
            .sqrt();
        assert!(rel(st.gamma, exact) < 1e-14);
    }
}

#[test]
fn reservoir_tends_to_ideal_when_dilute() {
    let mut last = 0.0;
    for &c in &[1e-2, 1e-4, 1e-6, 1e-8] {
        let (_, _, prm) = nacl_at(c);
        let res = reservoir_closure(&prm).unwrap();
        let dev = (res.gamma_inf[0] - 1.0).abs();
        assert!(last == 0.0 || dev < last, "{c}: {dev}");
        last = dev;
    }
    assert!(last < 1e-3);
}

#[test]
fn dilute_onsager_tends_to_identity() {
    let (el, sc, prm) = nacl_at(1e-8);
    let res = reservoir_closure(&prm).unwrap();
    let st = local_state(0.0, &prm, &res, Model::Msa).unwrap();
    let on = onsager_local(&st, &el, &sc, Model::Msa).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { 1.0 } else { 0.0 };
            assert!((on.k_at(i, j) - id).abs() < 1e-3, "{:?}", on.k);
        }
    }
}

#[test]
fn non_neutral_reservoir_is_rejected() {
    let el = Electrolyte::nacl().with_n_inf(&[1.0, 0.5]).unwrap();
    let sc = Scaling::new(&el, 50e-9, Scaling::n_from_mol_per_l(0.1), 0.129).unwrap();
    let prm = MsaParams::new(&el, &sc);
    assert!(matches!(
        reservoir_closure(&prm),
        Err(MsaError::NotElectroneutral(_))
    ));
    assert!(el.check_neutrality(1e-10).is_err());
}

#[test]
fn ideal_linearization_is_diagonal() {
    let (_, _, prm) = nacl_at(0.1);
    let ideal = Reservoir::ideal(&prm);
    let st = local_state(0.8, &prm, &ideal, Model::Ideal).unwrap();
    let lin = linearization_coeffs(&st, &prm, Model::Ideal).unwrap();
    for i in 0..2 {
        for k in 0..2 {
            let want = if i == k { -st.n[i] } else { 0.0 };
            assert!((lin.alpha_at(i, k) - want).abs() < 1e-15);
        }
    }
}

#[test]
fn msa_pressure_matches_trapezoid_oracle() {
    let (_, _, prm) = nacl_at(0.1);
    let res = reservoir_closure(&prm).unwrap();
    let targets = [-2.5, 1.5];
    let table = equilibrium_pressure(&targets, &prm, &res, Model::Msa).unwrap();
    for (s, &b) in table.iter().zip(&targets) {
        let panels = 100_000;
        let h = b / panels as f64;
        let mut oracle = [0.0; 2];
        for k in 0..=panels {
            let st = local_state(k as f64 * h, &prm, &res, Model::Msa).unwrap();
            let w = if k == 0 || k == panels { 0.5 } else { 1.0 };
            for j in 0..2 {
                oracle[j] += w * h * (-prm.z[j] * st.n[j]);
            }
        }
        for j in 0..2 {
            assert!(rel(s.e[j], oracle[j]) < 1e-8, "{} vs {}", s.e[j], oracle[j]);
        }
    }
    let zero = equilibrium_pressure(&[0.0], &prm, &res, Model::Msa).unwrap();
    assert_eq!(zero[0].p0, 0.0);
}

#[test]
fn pressure_grid_must_be_monotone() {
    let (_, _, prm) = nacl_at(0.1);
    let res = reservoir_closure(&prm).unwrap();
    assert!(equilibrium_pressure(&[0.0, 1.0, 0.5], &prm, &res, Model::Msa).is_err());
}

#[test]
fn characteristic_groups_nacl() {
    let (_, sc, _) = nacl_at(0.1);
    assert!(sc.gamma_c > 0.117e9 && sc.gamma_c < 1.17e9, "{}", sc.gamma_c);
    assert!(sc.xi_c > 0.252e-4 && sc.xi_c < 25.2e-4, "{}", sc.xi_c);
    assert!(rel(sc.n_c, 6.022e25) < 1e-12);
}
