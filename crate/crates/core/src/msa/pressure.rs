use super::closure::{local_state, MsaParams, Reservoir};
use super::{Model, MsaError};
use std::cell::RefCell;

/// One row of the pressure primitive table.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureSample {
    pub psi: f64,
    /// E_j(Ψ) − E_j(0) per species.
    pub e: Vec<f64>,
    /// p⁰ = Σ_j (E_j(Ψ) − E_j(0)).
    pub p0: f64,
}

/// Integrates E_j′(Ψ) = −z_j n_j(Ψ) from 0 to each sampled Ψ.
///
pub fn equilibrium_pressure(
    psi_values: &[f64],
    prm: &MsaParams,
    res: &Reservoir,
    model: Model,
) -> Result<Vec<PressureSample>, MsaError> {
    if psi_values.windows(2).any(|w| !(w[1] > w[0]))
        && psi_values.windows(2).any(|w| !(w[1] < w[0]))
    {
        return Err(MsaError::InvalidInput(
            "pressure grid must be strictly monotone".into(),
        ));
    }
    let nsp = prm.len();
    psi_values
        .iter()
        .map(|&psi| {
            let e = (0..nsp)
                .map(|j| integrate_species(j, 0.0, psi, prm, res, model))
                .collect::<Result<Vec<f64>, _>>()?;
            Ok(PressureSample {
                psi,
                p0: e.iter().sum(),
                e,
            })
        })
        .collect()
}

fn integrate_species(
    j: usize,
    a: f64,
    b: f64,
    prm: &MsaParams,
    res: &Reservoir,
    model: Model,
) -> Result<f64, MsaError> {
    if a == b {
        return Ok(0.0);
    }
    let err: RefCell<Option<MsaError>> = RefCell::new(None);
    let f = |psi: f64| match local_state(psi, prm, res, model) {
        Ok(st) => -prm.z[j] * st.n[j],
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    // Subdivide so each panel spans at most one unit of potential.
    let panels = ((b - a).abs().ceil() as usize).max(1);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let o = quadrature::double_exponential::integrate(f, lo, lo + h, 1e-13);
        if o.error_estimate > 1e-9 * o.integral.abs().max(1.0) {
            return Err(MsaError::Quadrature(o.error_estimate));
        }
        total += o.integral;
    }
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(total)
}
