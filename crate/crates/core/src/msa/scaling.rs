use super::species::Electrolyte;
use super::MsaError;
use std::f64::consts::PI;

/// Characteristic values and dimensionless groups for one pore size.
///
/// Build with [`Scaling::new`]; [`Scaling::with_pore_size`] recomputes every
/// ℓ-dependent group.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaling {
    /// Pore size ℓ, m.
    pub ell: f64,
    /// Macroscopic domain size L, m.
    pub domain_size: f64,
    /// Characteristic concentration n_c, particles/m³.
    pub n_c: f64,
    /// Characteristic diameter σ_c = max σ_j, m.
    pub sigma_c: f64,
    /// Characteristic surface charge Σ_c, C/m².
    pub sigma_surface: f64,
    pub bjerrum_length: f64,
    /// λ_D = sqrt(ε k_B T / (e² n_c Σ n_inf z²)), m.
    pub debye_length: f64,
    /// β = (ℓ/λ_D)².
    pub beta: f64,
    /// Γ_c = sqrt(π L_B n_c), 1/m.
    pub gamma_c: f64,
    /// ξ_c = (π/6) n_c σ_c³.
    pub xi_c: f64,
    /// N_σ = e Σ_c ℓ / (ε k_B T).
    pub n_sigma: f64,
    /// Pe_j = ℓ² k_B T n_c / (η D_j), in species order.
    pub peclet: Vec<f64>,
    /// bi = L_B/σ_c.
    pub bjerrum_number: f64,
    /// D_c = mean of D_j, m²/s.
    pub d_c: f64,
    /// S = k_B T/(η D_c σ_c).
    pub stokes_number: f64,
}

impl Scaling {
    pub fn new(el: &Electrolyte, ell: f64, n_c: f64, sigma_surface: f64) -> Result<Self, MsaError> {
        if !(ell > 0.0 && n_c > 0.0 && sigma_surface >= 0.0) {
            return Err(MsaError::InvalidInput(format!(
                "pore size and n_c must be positive (ell={ell}, n_c={n_c}), Sigma_c nonnegative"
            )));
        }
        let sv = &el.solvent;
        let kt = sv.kt();
        let lb = sv.bjerrum_length();
        let sigma_c = el.species().iter().map(|s| s.sigma).fold(0.0, f64::max);
        let ionic: f64 = el
            .species()
            .iter()
            .map(|s| s.n_inf * (s.z * s.z) as f64)
            .sum();
        let debye_length = (sv.epsilon * kt / (sv.e * sv.e * n_c * ionic)).sqrt();
        let xi_c = PI / 6.0 * n_c * sigma_c.powi(3);
        if !(xi_c > 0.0 && xi_c < 1.0) {
            return Err(MsaError::XiCOutOfRange(xi_c));
        }
        let d_c = el.species().iter().map(|s| s.d0).sum::<f64>() / el.len() as f64;
        Ok(Self {
            ell,
            domain_size: 1e3 * ell,
            n_c,
            sigma_c,
            sigma_surface,
            bjerrum_length: lb,
            debye_length,
            beta: (ell / debye_length).powi(2),
            gamma_c: (PI * lb * n_c).sqrt(),
            xi_c,
            n_sigma: sv.e * sigma_surface * ell / (sv.epsilon * kt),
            peclet: el
                .species()
                .iter()
                .map(|s| ell * ell * kt * n_c / (sv.eta * s.d0))
                .collect(),
            bjerrum_number: lb / sigma_c,
            d_c,
            stokes_number: kt / (sv.eta * d_c * sigma_c),
        })
    }

    pub fn with_pore_size(&self, el: &Electrolyte, ell: f64) -> Result<Self, MsaError> {
        let mut s = Self::new(el, ell, self.n_c, self.sigma_surface)?;
        s.domain_size = self.domain_size;
        Ok(s)
    }

    /// Concentration in mol/l corresponding to `n` in units of n_c.
    pub fn mol_per_l(&self, n: f64) -> f64 {
        n * self.n_c / (super::species::AVOGADRO * 1e3)
    }

    /// Particles/m³ for a concentration in mol/l.
    pub fn n_from_mol_per_l(c: f64) -> f64 {
        c * super::species::AVOGADRO * 1e3
    }
}
