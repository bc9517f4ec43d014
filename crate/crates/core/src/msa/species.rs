use super::MsaError;

pub const AVOGADRO: f64 = 6.022e23;
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;
pub const BOLTZMANN: f64 = 1.380649e-23;

/// One ionic species. `n_inf` is the reservoir concentration in units of n_c.
#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub name: String,
    pub z: i32,
    /// Diffusivity at infinite dilution, m²/s.
    pub d0: f64,
    /// Hard-sphere diameter, m.
    pub sigma: f64,
    pub n_inf: f64,
}

impl Species {
    pub fn new(name: &str, z: i32, d0: f64, sigma: f64, n_inf: f64) -> Self {
        Self {
            name: name.to_string(),
            z,
            d0,
            sigma,
            n_inf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solvent {
    /// Dynamic viscosity, kg/(m·s).
    pub eta: f64,
    /// Dielectric constant, C/(V·m).
    pub epsilon: f64,
    /// Temperature, K.
    pub temperature: f64,
    pub e: f64,
    pub kb: f64,
}

impl Default for Solvent {
    /// Water at 298 K.
    fn default() -> Self {
        Self {
            eta: 0.89e-3,
            epsilon: 6.93e-10,
            temperature: 298.0,
            e: ELEMENTARY_CHARGE,
            kb: BOLTZMANN,
        }
    }
}

impl Solvent {
    pub fn kt(&self) -> f64 {
        self.kb * self.temperature
    }

    /// L_B = e²/(4π ε k_B T), in m.
    pub fn bjerrum_length(&self) -> f64 {
        self.e * self.e / (4.0 * std::f64::consts::PI * self.epsilon * self.kt())
    }

    pub fn validate(&self) -> Result<(), MsaError> {
        for (name, v) in [
            ("eta", self.eta),
            ("epsilon", self.epsilon),
            ("temperature", self.temperature),
            ("e", self.e),
            ("kb", self.kb),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(MsaError::InvalidInput(format!(
                    "solvent {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Species table plus solvent. Species are kept sorted by increasing valence,
/// so the first species is the most negative anion.
#[derive(Debug, Clone, PartialEq)]
pub struct Electrolyte {
    pub solvent: Solvent,
    species: Vec<Species>,
}

impl Electrolyte {
    pub fn new(solvent: Solvent, mut species: Vec<Species>) -> Result<Self, MsaError> {
        solvent.validate()?;
        if species.is_empty() {
            return Err(MsaError::InvalidInput("no species".into()));
        }
        for s in &species {
            if s.z == 0 {
                return Err(MsaError::InvalidInput(format!(
                    "species {} has zero valence",
                    s.name
                )));
            }
            if !(s.d0 > 0.0 && s.sigma > 0.0 && s.n_inf > 0.0) {
                return Err(MsaError::InvalidInput(format!(
                    "species {}: D0, sigma and n_inf must be positive",
                    s.name
                )));
            }
        }
        species.sort_by_key(|s| s.z);
        if species[0].z > 0 || species[species.len() - 1].z < 0 {
            return Err(MsaError::InvalidInput(
                "need at least one anion and one cation".into(),
            ));
        }
        Ok(Self { solvent, species })
    }

    /// Aqueous NaCl at 298 K with n_inf = 1 for both ions.
    pub fn nacl() -> Self {
        Self::new(
            Solvent::default(),
            vec![
                Species::new("Na", 1, 1.333e-9, 3.3e-10, 1.0),
                Species::new("Cl", -1, 2.032e-9, 3.3e-10, 1.0),
            ],
        )
        .expect("NaCl table is valid")
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn len(&self) -> usize {
        self.species.len()
    }

    pub fn is_empty(&self) -> bool {
        self.species.is_empty()
    }

    /// Σ z_j n_inf_j relative to Σ |z_j| n_inf_j.
    pub fn neutrality_defect(&self) -> f64 {
        let net: f64 = self.species.iter().map(|s| s.z as f64 * s.n_inf).sum();
        let abs: f64 = self
            .species
            .iter()
            .map(|s| (s.z as f64).abs() * s.n_inf)
            .sum();
        net / abs
    }

    pub fn check_neutrality(&self, tol: f64) -> Result<(), MsaError> {
        let d = self.neutrality_defect();
        if d.abs() > tol {
            return Err(MsaError::NotElectroneutral(d));
        }
        Ok(())
    }

    /// True when all diameters agree to 1e-12 relative.
    pub fn equal_diameters(&self) -> bool {
        let s0 = self.species[0].sigma;
        self.species
            .iter()
            .all(|s| ((s.sigma - s0) / s0).abs() < 1e-12)
    }

    pub fn with_n_inf(&self, n_inf: &[f64]) -> Result<Self, MsaError> {
        let mut out = self.clone();
        for (s, &n) in out.species.iter_mut().zip(n_inf) {
            s.n_inf = n;
        }
        Self::new(out.solvent, out.species)
    }
}
