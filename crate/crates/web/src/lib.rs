//! wasm-bindgen entry points for the static page in `www/`.

use poremsa::msa::{local_state, onsager_local, reservoir_closure, Electrolyte, Model, MsaParams, Scaling};
use poremsa::sweep::{check_report, discretize, solve_point, GeometrySpec, RunConfig};
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// NaCl reservoir activity coefficient and local K diagonal at `count` log-spaced
/// concentrations in [c_min, c_max] mol/l. Returns rows of
/// (c, gamma_inf, K_11, K_22) flattened.
#[wasm_bindgen]
pub fn activity_curve(c_min: f64, c_max: f64, count: usize) -> Result<Vec<f64>, JsValue> {
    if !(c_min > 0.0 && c_max > c_min && count >= 2) {
        return Err(js_err("need 0 < c_min < c_max and at least two points"));
    }
    let el = Electrolyte::nacl();
    let mut out = Vec::with_capacity(4 * count);
    for k in 0..count {
        let t = k as f64 / (count - 1) as f64;
        let c = c_min * (c_max / c_min).powf(t);
        let sc = Scaling::new(&el, 50e-9, Scaling::n_from_mol_per_l(c), 0.129).map_err(js_err)?;
        let prm = MsaParams::new(&el, &sc);
        let res = reservoir_closure(&prm).map_err(js_err)?;
        let st = local_state(0.0, &prm, &res, Model::Msa).map_err(js_err)?;
        let on = onsager_local(&st, &el, &sc, Model::Msa).map_err(js_err)?;
        out.extend([c, res.gamma_inf[0], on.k_at(0, 0), on.k_at(1, 1)]);
    }
    Ok(out)
}

/// Parses a config and returns the derived-groups report, or the error text.
#[wasm_bindgen]
pub fn check_config(text: &str) -> String {
    match RunConfig::parse(text).and_then(|cfg| check_report(&cfg)) {
        Ok(report) => report,
        Err(e) => format!("error: {e}"),
    }
}

/// Coarse NaCl cell solve in an ellipse cell. Returns
/// [K_11, K_12, K_21, K_22, Krel_11, Krel_22, avg_n1, avg_n2, sym_residual, min_eig].
#[wasm_bindgen]
pub fn solve_cell(
    porosity: f64,
    aspect: f64,
    rotation_deg: f64,
    pore_size_nm: f64,
    mol_per_l: f64,
    surface_charge: f64,
    msa: bool,
) -> Result<Vec<f64>, JsValue> {
    let mut cfg = RunConfig::default();
    cfg.geometry = GeometrySpec::Ellipse {
        porosity,
        aspect,
        rotation_deg,
    };
    cfg.pore_size_nm = pore_size_nm;
    cfg.n_c_mol_per_l = mol_per_l;
    cfg.surface_charge = surface_charge;
    cfg.mesh.h_far = 0.1;
    let point = cfg.validate().map_err(js_err)?.remove(0);
    let disc = discretize(&cfg, &point).map_err(js_err)?;
    let model = if msa { Model::Msa } else { Model::Ideal };
    let sol = solve_point(&cfg, &point, &disc, model).map_err(js_err)?;
    let (k, k0) = (sol.tensor.k, sol.k0);
    let mut out = vec![k[0][0], k[0][1], k[1][0], k[1][1]];
    out.extend([k[0][0] / k0[0][0], k[1][1] / k0[1][1]]);
    out.extend(sol.report.averages.iter().take(2));
    out.extend([sol.onsager.symmetry_residual, sol.onsager.min_eigenvalue]);
    Ok(out)
}
