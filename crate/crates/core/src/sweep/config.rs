use crate::equilibrium::EquilibriumOptions;
use crate::mesh::{Inclusion, UnitCellGeometry};
use crate::msa::{Electrolyte, Model, MsaParams, Scaling, Solvent, Species};
use ini::Ini;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: unknown key '{key}' in [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: [{section}] {key}: {msg}")]
    Invalid {
        line: usize,
        section: String,
        key: String,
        msg: String,
    },
    #[error("[{section}] missing required key '{key}'")]
    Missing { section: String, key: String },
    #[error("{0}")]
    Validation(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeometrySpec {
    /// Centered ellipse with semi-axis ratio `aspect`, rotated by `rotation_deg`.
    Ellipse {
        porosity: f64,
        aspect: f64,
        rotation_deg: f64,
    },
    /// Centered square inclusion of side sqrt(1 − porosity).
    Square {
        porosity: f64,
    },
    Custom(Vec<Inclusion>),
}

impl GeometrySpec {
    pub fn name(&self) -> &'static str {
        match self {
            GeometrySpec::Ellipse { .. } => "ellipse",
            GeometrySpec::Square { .. } => "square",
            GeometrySpec::Custom(_) => "custom",
        }
    }

    pub fn build(&self) -> Result<UnitCellGeometry, crate::mesh::MeshError> {
        match self {
            GeometrySpec::Ellipse {
                porosity,
                aspect,
                rotation_deg,
            } => UnitCellGeometry::ellipse(*porosity, *aspect, rotation_deg.to_radians()),
            GeometrySpec::Square { porosity } => UnitCellGeometry::square(*porosity),
            GeometrySpec::Custom(inc) => {
                let g = UnitCellGeometry {
                    inclusions: inc.clone(),
                };
                g.validate()?;
                Ok(g)
            }
        }
    }

    pub fn with_porosity(&self, porosity: f64) -> Option<Self> {
        match self {
            GeometrySpec::Ellipse {
                aspect,
                rotation_deg,
                ..
            } => Some(GeometrySpec::Ellipse {
                porosity,
                aspect: *aspect,
                rotation_deg: *rotation_deg,
            }),
            GeometrySpec::Square { .. } => Some(GeometrySpec::Square { porosity }),
            GeometrySpec::Custom(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    None,
    /// Values are reservoir concentrations n* in mol/l.
    Concentration,
    /// Values are pore sizes ℓ in nm.
    PoreSize,
    Porosity,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::None => "none",
            SweepParameter::Concentration => "concentration",
            SweepParameter::PoreSize => "pore_size",
            SweepParameter::Porosity => "porosity",
        }
    }
}

/// How a concentration sweep reaches n*.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcentrationMode {
    /// Scale n_c at fixed n_inf_j.
    NC,
    /// Scale every n_inf_j at fixed n_c; β keeps its configured value.
    NInf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub concentration_mode: ConcentrationMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    pub refine: u32,
    pub h_far: f64,
    pub wall_ratio: f64,
    pub growth: f64,
    /// First-layer cap = wall_factor · min(1/√β, 1/N_σ); 0 disables the cap.
    pub wall_factor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub directory: PathBuf,
    pub svg: bool,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub solvent: Solvent,
    pub species: Vec<Species>,
    /// Characteristic concentration n_c, mol/l.
    pub n_c_mol_per_l: f64,
    pub pore_size_nm: f64,
    /// Characteristic surface charge Σ_c, C/m².
    pub sigma_c: f64,
    /// Dimensionless wall charge Σ* (units of Σ_c).
    pub surface_charge: f64,
    pub geometry: GeometrySpec,
    pub mesh: MeshSpec,
    pub solver: EquilibriumOptions,
    pub models: Vec<Model>,
    pub sweep: SweepSpec,
    pub output: OutputSpec,
}

impl Default for RunConfig {
    /// NaCl at 0.1 mol/l in a 50 nm ellipse cell of porosity 0.62.
    fn default() -> Self {
        let el = Electrolyte::nacl();
        Self {
            solvent: el.solvent,
            species: el.species().to_vec(),
            n_c_mol_per_l: 0.1,
            pore_size_nm: 50.0,
            sigma_c: 0.129,
            surface_charge: -1.0,
            geometry: GeometrySpec::Ellipse {
                porosity: 0.62,
                aspect: 2.0,
                rotation_deg: 45.0,
            },
            mesh: MeshSpec {
                refine: 0,
                h_far: 0.05,
                wall_ratio: 0.15,
                growth: 1.3,
                wall_factor: 0.4,
            },
            solver: EquilibriumOptions::default(),
            models: vec![Model::Msa],
            sweep: SweepSpec {
                parameter: SweepParameter::None,
                values: Vec::new(),
                concentration_mode: ConcentrationMode::NC,
            },
            output: OutputSpec {
                directory: PathBuf::from("out"),
                svg: false,
            },
        }
    }
}

/// One resolved sweep point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub index: usize,
    pub value: f64,
    pub electrolyte: Electrolyte,
    pub scaling: Scaling,
    pub geometry: GeometrySpec,
}

impl RunConfig {
    pub fn electrolyte(&self) -> Result<Electrolyte, ConfigError> {
        Electrolyte::new(self.solvent, self.species.clone())
            .map_err(|e| ConfigError::Validation(e.to_string()))
    }

    pub fn scaling(&self, el: &Electrolyte) -> Result<Scaling, ConfigError> {
        Scaling::new(
            el,
            self.pore_size_nm * 1e-9,
            Scaling::n_from_mol_per_l(self.n_c_mol_per_l),
            self.sigma_c,
        )
        .map_err(|e| ConfigError::Validation(e.to_string()))
    }

    /// Sweep values, or the single base point when no sweep is configured.
    pub fn points(&self) -> Result<Vec<SweepPoint>, ConfigError> {
        let base = self.electrolyte()?;
        let values = match self.sweep.parameter {
            SweepParameter::None => vec![f64::NAN],
            _ => self.sweep.values.clone(),
        };
        if values.is_empty() {
            return Err(ConfigError::Validation("sweep grid is empty".into()));
        }
        let invalid = |e: &dyn std::fmt::Display, v: f64| {
            ConfigError::Validation(if v.is_nan() {
                e.to_string()
            } else {
                format!("sweep value {v}: {e}")
            })
        };
        values
            .iter()
            .enumerate()
            .map(|(index, &v)| {
                let mut cfg = self.clone();
                let mut el = base.clone();
                match self.sweep.parameter {
                    SweepParameter::None => {}
                    SweepParameter::PoreSize => cfg.pore_size_nm = v,
                    SweepParameter::Porosity => {
                        cfg.geometry = self.geometry.with_porosity(v).ok_or_else(|| {
                            ConfigError::Validation(
                                "porosity sweeps need an ellipse or square geometry".into(),
                            )
                        })?;
                    }
                    SweepParameter::Concentration => {
                        let reference = base.species()[0].n_inf * self.n_c_mol_per_l;
                        match self.sweep.concentration_mode {
                            ConcentrationMode::NInf => {
                                let ratio = v / reference;
                                let n: Vec<f64> =
                                    base.species().iter().map(|s| s.n_inf * ratio).collect();
                                el = base.with_n_inf(&n).map_err(|e| invalid(&e, v))?;
                            }
                            ConcentrationMode::NC => {
                                cfg.n_c_mol_per_l = self.n_c_mol_per_l * v / reference
                            }
                        }
                    }
                }
                // λ_D and β stay at the configured n_inf so that scaling n_inf
                // acts on the source term only.
                let scaling = cfg.scaling(&base).map_err(|e| invalid(&e, v))?;
                cfg.geometry.build().map_err(|e| invalid(&e, v))?;
                Ok(SweepPoint {
                    index,
                    value: v,
                    electrolyte: el,
                    scaling,
                    geometry: cfg.geometry,
                })
            })
            .collect()
    }

    /// Bound1 and electroneutrality at every sweep point.
    pub fn validate(&self) -> Result<Vec<SweepPoint>, ConfigError> {
        if self.models.is_empty() {
            return Err(ConfigError::Validation("no model selected".into()));
        }
        let points = self.points()?;
        for p in &points {
            p.electrolyte
                .check_neutrality(1e-10)
                .map_err(|e| ConfigError::Validation(e.to_string()))?;
            if self.models.contains(&Model::Msa) {
                MsaParams::new(&p.electrolyte, &p.scaling)
                    .check_bound1()
                    .map_err(|e| ConfigError::Validation(e.to_string()))?;
            }
        }
        Ok(points)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let t = raw.trim();
            if t.starts_with('[') && !t.contains(']') {
                return Err(ConfigError::Parse {
                    line: i + 1,
                    msg: format!("unclosed section header '{t}'"),
                });
            }
        }
        let ini = Ini::load_from_str_noescape(text).map_err(|e| ConfigError::Parse {
            line: e.line,
            msg: e.msg.to_string(),
        })?;
        let mut cfg = RunConfig::default();
        let mut species: Vec<Species> = Vec::new();
        let mut sweep = RawSweep::default();
        for (name, props) in ini.iter() {
            let Some(section) = name else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(ConfigError::UnknownKey {
                        line: line_of(text, None, k),
                        section: String::new(),
                        key: k.into(),
                    });
                }
                continue;
            };
            let known = matches!(
                section,
                "solvent" | "geometry" | "discretization" | "solver" | "sweep" | "output"
            ) || section.strip_prefix("species.").is_some_and(|n| !n.is_empty());
            if !known {
                return Err(ConfigError::UnknownSection {
                    line: section_line(text, section),
                    name: section.into(),
                });
            }
            let mut reader = Reader { text, section };
            let mut seen = Vec::new();
            for (key, value) in props.iter() {
                if seen.contains(&key) {
                    return Err(reader.invalid(key, "duplicate key"));
                }
                seen.push(key);
                reader.assign(key, value, &mut cfg, &mut species, &mut sweep)?;
            }
            if section.starts_with("species.") {
                for key in ["valence", "diffusivity", "diameter", "n_inf"] {
                    if !seen.contains(&key) {
                        return Err(ConfigError::Missing {
                            section: section.into(),
                            key: key.into(),
                        });
                    }
                }
            }
        }
        if !species.is_empty() {
            cfg.species = species;
        }
        cfg.sweep = sweep.resolve(cfg.sweep.concentration_mode)?;
        cfg.electrolyte()?;
        Ok(cfg)
    }

    /// Resolved configuration in the input format; parsing it back yields an equal config.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let sv = &self.solvent;
        let _ = writeln!(s, "[solvent]");
        let _ = writeln!(s, "temperature = {}", sv.temperature);
        let _ = writeln!(s, "viscosity = {}", sv.eta);
        let _ = writeln!(s, "permittivity = {}", sv.epsilon);
        let _ = writeln!(s, "elementary_charge = {}", sv.e);
        let _ = writeln!(s, "boltzmann = {}", sv.kb);
        let _ = writeln!(s, "n_c_mol_per_l = {}", self.n_c_mol_per_l);
        for sp in &self.species {
            let _ = writeln!(s, "\n[species.{}]", sp.name);
            let _ = writeln!(s, "valence = {}", sp.z);
            let _ = writeln!(s, "diffusivity = {}", sp.d0);
            let _ = writeln!(s, "diameter = {}", sp.sigma);
            let _ = writeln!(s, "n_inf = {}", sp.n_inf);
        }
        let _ = writeln!(s, "\n[geometry]");
        match &self.geometry {
            GeometrySpec::Ellipse {
                porosity,
                aspect,
                rotation_deg,
            } => {
                let _ = writeln!(s, "kind = ellipse\nporosity = {porosity}\naspect = {aspect}\nrotation_deg = {rotation_deg}");
            }
            GeometrySpec::Square { porosity } => {
                let _ = writeln!(s, "kind = square\nporosity = {porosity}");
            }
            GeometrySpec::Custom(inc) => {
                let _ = writeln!(s, "kind = custom");
                let items: Vec<String> = inc.iter().map(inclusion_to_string).collect();
                let _ = writeln!(s, "inclusions = {}", items.join("; "));
            }
        }
        let _ = writeln!(s, "pore_size_nm = {}", self.pore_size_nm);
        let _ = writeln!(s, "sigma_c = {}", self.sigma_c);
        let _ = writeln!(s, "surface_charge = {}", self.surface_charge);
        let m = &self.mesh;
        let _ = writeln!(s, "\n[discretization]");
        let _ = writeln!(
            s,
            "refine = {}\nh_far = {}\nwall_ratio = {}\ngrowth = {}\nwall_factor = {}",
            m.refine, m.h_far, m.wall_ratio, m.growth, m.wall_factor
        );
        let o = &self.solver;
        let _ = writeln!(s, "\n[solver]");
        let models: Vec<String> = self.models.iter().map(|m| m.to_string()).collect();
        let model = if models.len() == 2 {
            "both".to_string()
        } else {
            models.join("")
        };
        let _ = writeln!(s, "model = {model}");
        let _ = writeln!(s, "tol_pde = {}\ntol_fp = {}\nmax_outer = {}\nmax_inner = {}\nmax_newton = {}\nmax_halvings = {}\nxi_guard = {}", o.tol_pde, o.tol_fp, o.max_outer, o.max_inner, o.max_newton, o.max_halvings, o.xi_guard);
        let _ = writeln!(s, "\n[sweep]");
        let _ = writeln!(s, "parameter = {}", self.sweep.parameter.name());
        if self.sweep.parameter != SweepParameter::None {
            let v: Vec<String> = self.sweep.values.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "values = {}", v.join(", "));
        }
        let mode = match self.sweep.concentration_mode {
            ConcentrationMode::NInf => "n_inf",
            ConcentrationMode::NC => "n_c",
        };
        let _ = writeln!(s, "concentration_mode = {mode}");
        let _ = writeln!(s, "\n[output]");
        let _ = writeln!(
            s,
            "directory = {}\nsvg = {}",
            self.output.directory.display(),
            self.output.svg
        );
        s
    }
}

fn inclusion_to_string(inc: &Inclusion) -> String {
    match inc {
        Inclusion::Ellipse {
            center,
            a,
            b,
            rotation,
        } => {
            format!(
                "ellipse {} {} {} {} {}",
                center[0],
                center[1],
                a,
                b,
                rotation.to_degrees()
            )
        }
        Inclusion::Rectangle { center, hx, hy } => {
            format!("rect {} {} {} {}", center[0], center[1], hx, hy)
        }
    }
}

#[derive(Default)]
struct RawSweep {
    parameter: Option<SweepParameter>,
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
    log: bool,
    mode: Option<ConcentrationMode>,
}

impl RawSweep {
    fn resolve(self, default_mode: ConcentrationMode) -> Result<SweepSpec, ConfigError> {
        let parameter = self.parameter.unwrap_or(SweepParameter::None);
        let concentration_mode = self.mode.unwrap_or(default_mode);
        let values = match (self.values, self.start, self.stop, self.count) {
            (Some(v), None, None, None) => v,
            (None, Some(a), Some(b), Some(n)) => {
                if n < 2 {
                    vec![a]
                } else if self.log {
                    if !(a > 0.0 && b > 0.0) {
                        return Err(ConfigError::Validation(
                            "log sweep needs positive bounds".into(),
                        ));
                    }
                    (0..n)
                        .map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp())
                        .collect()
                } else {
                    (0..n)
                        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                        .collect()
                }
            }
            (None, None, None, None) => Vec::new(),
            _ => {
                return Err(ConfigError::Validation(
                    "[sweep] give either 'values' or all of 'start', 'stop', 'count'".into(),
                ))
            }
        };
        if parameter != SweepParameter::None && values.is_empty() {
            return Err(ConfigError::Validation("sweep grid is empty".into()));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ConfigError::Validation(
                "sweep values must be strictly increasing".into(),
            ));
        }
        Ok(SweepSpec {
            parameter,
            values,
            concentration_mode,
        })
    }
}

struct Reader<'a> {
    text: &'a str,
    section: &'a str,
}

impl Reader<'_> {
    fn line(&self, key: &str) -> usize {
        line_of(self.text, Some(self.section), key)
    }

    fn invalid(&self, key: &str, msg: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            line: self.line(key),
            section: self.section.into(),
            key: key.into(),
            msg: msg.into(),
        }
    }

    fn unknown(&self, key: &str) -> ConfigError {
        ConfigError::UnknownKey {
            line: self.line(key),
            section: self.section.into(),
            key: key.into(),
        }
    }

    fn float(&self, key: &str, v: &str) -> Result<f64, ConfigError> {
        v.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.invalid(key, format!("expected a number, got '{v}'")))
    }

    fn positive(&self, key: &str, v: &str) -> Result<f64, ConfigError> {
        let x = self.float(key, v)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(self.invalid(key, "must be positive"))
        }
    }

    fn uint(&self, key: &str, v: &str) -> Result<usize, ConfigError> {
        v.trim()
            .parse()
            .map_err(|_| self.invalid(key, format!("expected a nonnegative integer, got '{v}'")))
    }

    fn boolean(&self, key: &str, v: &str) -> Result<bool, ConfigError> {
        match v.trim() {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(self.invalid(key, format!("expected true or false, got '{v}'"))),
        }
    }

    fn list(&self, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
        v.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| self.float(key, s))
            .collect()
    }

    fn assign(
        &mut self,
        key: &str,
        v: &str,
        cfg: &mut RunConfig,
        species: &mut Vec<Species>,
        sweep: &mut RawSweep,
    ) -> Result<(), ConfigError> {
        match self.section {
            "solvent" => match key {
                "temperature" => cfg.solvent.temperature = self.positive(key, v)?,
                "viscosity" => cfg.solvent.eta = self.positive(key, v)?,
                "permittivity" => cfg.solvent.epsilon = self.positive(key, v)?,
                "elementary_charge" => cfg.solvent.e = self.positive(key, v)?,
                "boltzmann" => cfg.solvent.kb = self.positive(key, v)?,
                "n_c_mol_per_l" => cfg.n_c_mol_per_l = self.positive(key, v)?,
                _ => return Err(self.unknown(key)),
            },
            s if s.starts_with("species.") => {
                let name = &s["species.".len()..];
                if name.is_empty() {
                    return Err(self.invalid(key, "species section needs a name"));
                }
                if !species.iter().any(|sp| sp.name == name) {
                    species.push(Species::new(name, 0, 1.0, 1.0, 1.0));
                }
                let sp = species.iter_mut().find(|sp| sp.name == name).unwrap();
                match key {
                    "valence" => {
                        sp.z = v.trim().parse().map_err(|_| {
                            self.invalid(key, format!("expected an integer, got '{v}'"))
                        })?;
                        if sp.z == 0 {
                            return Err(self.invalid(key, "valence must be nonzero"));
                        }
                    }
                    "diffusivity" => sp.d0 = self.positive(key, v)?,
                    "diameter" => sp.sigma = self.positive(key, v)?,
                    "n_inf" => sp.n_inf = self.positive(key, v)?,
                    _ => return Err(self.unknown(key)),
                }
            }
            "geometry" => match key {
                "kind" => {
                    cfg.geometry = match (v.trim(), &cfg.geometry) {
                        ("ellipse", GeometrySpec::Ellipse { .. })
                        | ("square", GeometrySpec::Square { .. }) => cfg.geometry.clone(),
                        ("ellipse", g) => GeometrySpec::Ellipse {
                            porosity: porosity_of(g),
                            aspect: 2.0,
                            rotation_deg: 45.0,
                        },
                        ("square", g) => GeometrySpec::Square {
                            porosity: porosity_of(g),
                        },
                        ("custom", GeometrySpec::Custom(_)) => cfg.geometry.clone(),
                        ("custom", _) => GeometrySpec::Custom(Vec::new()),
                        _ => {
                            return Err(self.invalid(
                                key,
                                format!("expected ellipse, square or custom, got '{v}'"),
                            ))
                        }
                    }
                }
                "porosity" => {
                    let p = self.float(key, v)?;
                    match &mut cfg.geometry {
                        GeometrySpec::Ellipse { porosity, .. }
                        | GeometrySpec::Square { porosity } => *porosity = p,
                        GeometrySpec::Custom(_) => {
                            return Err(self.invalid(key, "custom geometries take no porosity"))
                        }
                    }
                }
                "aspect" | "rotation_deg" => {
                    let x = self.float(key, v)?;
                    match &mut cfg.geometry {
                        GeometrySpec::Ellipse {
                            aspect,
                            rotation_deg,
                            ..
                        } => {
                            if key == "aspect" {
                                *aspect = x
                            } else {
                                *rotation_deg = x
                            }
                        }
                        _ => {
                            return Err(self.invalid(
                                key,
                                "only ellipse geometries take this key (set kind first)",
                            ))
                        }
                    }
                }
                "inclusions" => {
                    let inc = v
                        .split(';')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| parse_inclusion(s).map_err(|m| self.invalid(key, m)))
                        .collect::<Result<Vec<_>, _>>()?;
                    cfg.geometry = GeometrySpec::Custom(inc);
                }
                "pore_size_nm" => cfg.pore_size_nm = self.positive(key, v)?,
                "sigma_c" => cfg.sigma_c = self.float(key, v)?.abs(),
                "surface_charge" => cfg.surface_charge = self.float(key, v)?,
                _ => return Err(self.unknown(key)),
            },
            "discretization" => match key {
                "refine" => cfg.mesh.refine = self.uint(key, v)? as u32,
                "h_far" => cfg.mesh.h_far = self.positive(key, v)?,
                "wall_ratio" => cfg.mesh.wall_ratio = self.positive(key, v)?,
                "growth" => cfg.mesh.growth = self.positive(key, v)?,
                "wall_factor" => cfg.mesh.wall_factor = self.float(key, v)?.max(0.0),
                _ => return Err(self.unknown(key)),
            },
            "solver" => match key {
                "model" => {
                    cfg.models = match v.trim() {
                        "both" => vec![Model::Msa, Model::Ideal],
                        m => vec![m.parse().map_err(|_| {
                            self.invalid(key, format!("expected msa, ideal or both, got '{v}'"))
                        })?],
                    }
                }
                "tol_pde" => cfg.solver.tol_pde = self.positive(key, v)?,
                "tol_fp" => cfg.solver.tol_fp = self.positive(key, v)?,
                "max_outer" => cfg.solver.max_outer = self.uint(key, v)?,
                "max_inner" => cfg.solver.max_inner = self.uint(key, v)?,
                "max_newton" => cfg.solver.max_newton = self.uint(key, v)?,
                "max_halvings" => cfg.solver.max_halvings = self.uint(key, v)?,
                "xi_guard" => cfg.solver.xi_guard = self.positive(key, v)?,
                _ => return Err(self.unknown(key)),
            },
            "sweep" => {
                match key {
                    "parameter" => sweep.parameter = Some(match v.trim() {
                        "none" => SweepParameter::None,
                        "concentration" => SweepParameter::Concentration,
                        "pore_size" => SweepParameter::PoreSize,
                        "porosity" => SweepParameter::Porosity,
                        _ => return Err(self.invalid(
                            key,
                            format!(
                                "expected none, concentration, pore_size or porosity, got '{v}'"
                            ),
                        )),
                    }),
                    "values" => sweep.values = Some(self.list(key, v)?),
                    "start" => sweep.start = Some(self.float(key, v)?),
                    "stop" => sweep.stop = Some(self.float(key, v)?),
                    "count" => sweep.count = Some(self.uint(key, v)?),
                    "scale" => {
                        sweep.log = match v.trim() {
                            "log" => true,
                            "linear" => false,
                            _ => {
                                return Err(
                                    self.invalid(key, format!("expected log or linear, got '{v}'"))
                                )
                            }
                        }
                    }
                    "concentration_mode" => {
                        sweep.mode = Some(match v.trim() {
                            "n_inf" => ConcentrationMode::NInf,
                            "n_c" => ConcentrationMode::NC,
                            _ => {
                                return Err(
                                    self.invalid(key, format!("expected n_inf or n_c, got '{v}'"))
                                )
                            }
                        })
                    }
                    _ => return Err(self.unknown(key)),
                }
            }
            "output" => match key {
                "directory" => cfg.output.directory = PathBuf::from(v.trim()),
                "svg" => cfg.output.svg = self.boolean(key, v)?,
                _ => return Err(self.unknown(key)),
            },
            other => {
                return Err(ConfigError::UnknownSection {
                    line: section_line(self.text, other),
                    name: other.into(),
                });
            }
        }
        Ok(())
    }
}

fn porosity_of(g: &GeometrySpec) -> f64 {
    match g {
        GeometrySpec::Ellipse { porosity, .. } | GeometrySpec::Square { porosity } => *porosity,
        GeometrySpec::Custom(_) => 0.62,
    }
}

/// `ellipse cx cy a b rotation_deg` or `rect cx cy hx hy`.
fn parse_inclusion(s: &str) -> Result<Inclusion, String> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    let nums = |xs: &[&str]| -> Result<Vec<f64>, String> {
        xs.iter()
            .map(|x| {
                x.parse::<f64>()
                    .map_err(|_| format!("bad number '{x}' in inclusion '{}'", s.trim()))
            })
            .collect()
    };
    match parts.first().copied() {
        Some("ellipse") if parts.len() == 6 => {
            let v = nums(&parts[1..])?;
            Ok(Inclusion::Ellipse {
                center: [v[0], v[1]],
                a: v[2],
                b: v[3],
                rotation: v[4].to_radians(),
            })
        }
        Some("rect") if parts.len() == 5 => {
            let v = nums(&parts[1..])?;
            Ok(Inclusion::Rectangle {
                center: [v[0], v[1]],
                hx: v[2],
                hy: v[3],
            })
        }
        _ => Err(format!(
            "expected 'ellipse cx cy a b rot' or 'rect cx cy hx hy', got '{}'",
            s.trim()
        )),
    }
}

/// 1-based line of `key` inside `[section]` (or before any section).
fn line_of(text: &str, section: Option<&str>, key: &str) -> usize {
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') && line.ends_with(']') {
            current = Some(line[1..line.len() - 1].trim().to_string());
            continue;
        }
        if current.as_deref() == section {
            if let Some((k, _)) = line.split_once('=').or_else(|| line.split_once(':')) {
                if k.trim() == key {
                    return i + 1;
                }
            }
        }
    }
    0
}

fn section_line(text: &str, section: &str) -> usize {
    text.lines()
        .position(|l| {
            let l = l.trim();
            l.starts_with('[') && l.ends_with(']') && l[1..l.len() - 1].trim() == section
        })
        .map_or(0, |i| i + 1)
}
