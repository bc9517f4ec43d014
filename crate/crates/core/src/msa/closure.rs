use super::scaling::Scaling;
use super::species::Electrolyte;
use super::{Model, MsaError};

pub const TOL_ALG: f64 = 1e-12;
pub const MAX_ITER: usize = 200;
/// 6 + 4√2.
pub const BOUND1: f64 = 11.656854249492381;

/// Dimensionless per-species constants of the MSA closure.
///
/// `a_j = Γ_c σ_j`, `s_j = ξ_c (σ_j/σ_c)³`, `lb = L_B Γ_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct MsaParams {
    pub names: Vec<String>,
    pub z: Vec<f64>,
    pub a: Vec<f64>,
    pub s: Vec<f64>,
    pub lb: f64,
    pub n_inf: Vec<f64>,
}

impl MsaParams {
    pub fn new(el: &Electrolyte, sc: &Scaling) -> Self {
        let sp = el.species();
        Self {
            names: sp.iter().map(|s| s.name.clone()).collect(),
            z: sp.iter().map(|s| s.z as f64).collect(),
            a: sp.iter().map(|s| sc.gamma_c * s.sigma).collect(),
            s: sp
                .iter()
                .map(|s| sc.xi_c * (s.sigma / sc.sigma_c).powi(3))
                .collect(),
            lb: sc.bjerrum_length * sc.gamma_c,
            n_inf: sp.iter().map(|s| s.n_inf).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Uniqueness condition for Γ: L_B < (6+4√2) σ_j / z_j² for every species.
    pub fn check_bound1(&self) -> Result<(), MsaError> {
        for j in 0..self.len() {
            let limit = BOUND1 * self.a[j] / (self.z[j] * self.z[j]);
            if self.lb >= limit {
                return Err(MsaError::Bound1 {
                    species: self.names[j].clone(),
                    ratio: self.lb / limit,
                });
            }
        }
        Ok(())
    }

    /// Γ² − Σ z_j² n_j / (1 + a_j Γ)².
    pub fn gamma_residual(&self, gamma: f64, n: &[f64]) -> f64 {
        let sum: f64 = (0..self.len())
            .map(|j| self.z[j] * self.z[j] * n[j] / (1.0 + self.a[j] * gamma).powi(2))
            .sum();
        gamma * gamma - sum
    }

    pub fn packing(&self, n: &[f64]) -> f64 {
        self.s.iter().zip(n).map(|(s, n)| s * n).sum()
    }
}

/// Hard-sphere term p(ξ) = ξ(8 − 9ξ + 3ξ²)/(1 − ξ)³.
pub fn hard_sphere_p(xi: f64) -> Result<f64, MsaError> {
    if !(0.0..1.0).contains(&xi) {
        return Err(MsaError::XiDomain(xi));
    }
    Ok(xi * (8.0 - 9.0 * xi + 3.0 * xi * xi) / (1.0 - xi).powi(3))
}

/// p′(ξ) = (8 − 2ξ)/(1 − ξ)⁴.
pub fn hard_sphere_dp(xi: f64) -> Result<f64, MsaError> {
    if !(0.0..1.0).contains(&xi) {
        return Err(MsaError::XiDomain(xi));
    }
    Ok((8.0 - 2.0 * xi) / (1.0 - xi).powi(4))
}

/// Newton iteration safeguarded by the sign-change bracket `[lo, hi]`.
/// `f` returns value and derivative; `f(lo) < 0 < f(hi)` is assumed.
pub(crate) fn bracketed_newton(
    f: impl Fn(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    what: &'static str,
) -> Result<f64, MsaError> {
    let mut x = x0.clamp(lo, hi);
    for _ in 0..MAX_ITER {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = fx / dfx;
        let mut next = x - step;
        if !(dfx > 0.0 && next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE)
            || hi - lo <= 4.0 * f64::EPSILON * hi.abs()
        {
            return Ok(next);
        }
        x = next;
    }
    Err(MsaError::NoConvergence(what))
}

/// Reservoir values: γ_j at infinite dilution of the cell, Γ(0) and ξ̃(0).
#[derive(Debug, Clone, PartialEq)]
pub struct Reservoir {
    pub gamma_inf: Vec<f64>,
    pub gamma0: f64,
    pub xi0: f64,
    /// c_j = n_inf_j γ_inf_j.
    pub c: Vec<f64>,
}

impl Reservoir {
    pub fn ideal(prm: &MsaParams) -> Self {
        Self {
            gamma_inf: vec![1.0; prm.len()],
            gamma0: 0.0,
            xi0: 0.0,
            c: prm.n_inf.clone(),
        }
    }

    pub fn for_model(prm: &MsaParams, model: Model) -> Result<Self, MsaError> {
        match model {
            Model::Msa => reservoir_closure(prm),
            Model::Ideal => Ok(Self::ideal(prm)),
        }
    }
}

/// Closes the reservoir: Γ(0) solves Γ² = Σ n_inf z²/(1 + aΓ)², ξ̃(0) = Σ s n_inf,
/// and γ_inf_j = exp(p(ξ̃(0)) − lb Γ(0) z_j²/(1 + a_j Γ(0))).
pub fn reservoir_closure(prm: &MsaParams) -> Result<Reservoir, MsaError> {
    let net: f64 = prm.z.iter().zip(&prm.n_inf).map(|(z, n)| z * n).sum();
    let abs: f64 = prm.z.iter().zip(&prm.n_inf).map(|(z, n)| z.abs() * n).sum();
    if (net / abs).abs() > 1e-10 {
        return Err(MsaError::NotElectroneutral(net / abs));
    }
    let d: f64 = prm.z.iter().zip(&prm.n_inf).map(|(z, n)| z * z * n).sum();
    let f = |g: f64| {
        let mut v = g * g;
        let mut dv = 2.0 * g;
        for j in 0..prm.len() {
            let q = 1.0 + prm.a[j] * g;
            let t = prm.z[j] * prm.z[j] * prm.n_inf[j];
            v -= t / (q * q);
            dv += 2.0 * t * prm.a[j] / (q * q * q);
        }
        (v, dv)
    };
    let gamma0 = bracketed_newton(f, 0.0, d.sqrt(), d.sqrt(), "reservoir screening")?;
    let xi0 = prm.packing(&prm.n_inf);
    let p0 = hard_sphere_p(xi0)?;
    let gamma_inf: Vec<f64> = (0..prm.len())
        .map(|j| (p0 - prm.lb * gamma0 * prm.z[j] * prm.z[j] / (1.0 + prm.a[j] * gamma0)).exp())
        .collect();
    let c = gamma_inf
        .iter()
        .zip(&prm.n_inf)
        .map(|(g, n)| g * n)
        .collect();
    Ok(Reservoir {
        gamma_inf,
        gamma0,
        xi0,
        c,
    })
}

/// r_j(Ψ, Γ) = c_j exp(−z_j Ψ + lb Γ z_j²/(1 + a_j Γ)), so that n_j = r_j e^{−p(ξ)}.
fn reduced(prm: &MsaParams, res: &Reservoir, psi: f64, gamma: f64, j: usize) -> f64 {
    let z = prm.z[j];
    res.c[j] * (-z * psi + prm.lb * gamma * z * z / (1.0 + prm.a[j] * gamma)).exp()
}

/// Solves ln ξ + p(ξ) = ln rhs for ξ ∈ [0, 1).
fn xi_from_rhs(rhs: f64) -> Result<f64, MsaError> {
    if !(rhs >= 0.0 && rhs.is_finite()) {
        return Err(MsaError::InvalidInput(format!(
            "packing right-hand side {rhs}"
        )));
    }
    if rhs == 0.0 {
        return Ok(0.0);
    }
    let ln_rhs = rhs.ln();
    let hi = rhs.min(1.0 - 1e-15);
    let f = |x: f64| {
        if x <= 0.0 {
            return (f64::NEG_INFINITY, f64::INFINITY);
        }
        let p = hard_sphere_p(x).unwrap_or(f64::INFINITY);
        let dp = hard_sphere_dp(x).unwrap_or(f64::INFINITY);
        (x.ln() + p - ln_rhs, 1.0 / x + dp)
    };
    let x0 = rhs / (1.0 + 8.0 * rhs);
    let xi = bracketed_newton(f, 0.0, hi, x0, "packing fraction")?;
    let p = hard_sphere_p(xi)?;
    if (xi * p.exp() - rhs).abs() > TOL_ALG * (1.0 + rhs) {
        return Err(MsaError::NoConvergence("packing fraction"));
    }
    Ok(xi)
}

/// ξ(Ψ, Γ): unique root of ξ e^{p(ξ)} = Σ s_j r_j(Ψ, Γ).
pub fn solve_xi(psi: f64, gamma: f64, prm: &MsaParams, res: &Reservoir) -> Result<f64, MsaError> {
    if !(gamma >= 0.0 && psi.is_finite()) {
        return Err(MsaError::InvalidInput(format!(
            "solve_xi needs Gamma >= 0 and finite Psi, got {gamma}, {psi}"
        )));
    }
    let rhs: f64 = (0..prm.len())
        .map(|j| prm.s[j] * reduced(prm, res, psi, gamma, j))
        .sum();
    xi_from_rhs(rhs)
}

/// Screening residual F(Γ) with ξ = ξ(Ψ, Γ) eliminated, and its derivative.
fn gamma_equation(
    psi: f64,
    gamma: f64,
    prm: &MsaParams,
    res: &Reservoir,
) -> Result<(f64, f64), MsaError> {
    let nsp = prm.len();
    let mut r = vec![0.0; nsp];
    let mut rhs = 0.0;
    let mut drhs = 0.0;
    for j in 0..nsp {
        r[j] = reduced(prm, res, psi, gamma, j);
        let q = 1.0 + prm.a[j] * gamma;
        rhs += prm.s[j] * r[j];
        drhs += prm.s[j] * r[j] * prm.lb * prm.z[j] * prm.z[j] / (q * q);
    }
    let xi = xi_from_rhs(rhs)?;
    let p = hard_sphere_p(xi)?;
    let dp = hard_sphere_dp(xi)?;
    let dxi = if xi > 0.0 {
        (drhs / rhs) / (1.0 / xi + dp)
    } else {
        0.0
    };
    let ep = (-p).exp();
    let mut f = gamma * gamma;
    let mut df = 2.0 * gamma;
    for j in 0..nsp {
        let z2 = prm.z[j] * prm.z[j];
        let q = 1.0 + prm.a[j] * gamma;
        let n = r[j] * ep;
        let dn = n * (prm.lb * z2 / (q * q) - dp * dxi);
        f -= z2 * n / (q * q);
        df -= z2 * (dn / (q * q) - 2.0 * prm.a[j] * n / (q * q * q));
    }
    Ok((f, df))
}

/// Γ(Ψ): positive root of Γ² = Σ z_j² n_j(Ψ, Γ)/(1 + a_j Γ)².
pub fn solve_gamma(psi: f64, prm: &MsaParams, res: &Reservoir) -> Result<f64, MsaError> {
    prm.check_bound1()?;
    let eval = |g: f64| gamma_equation(psi, g, prm, res);
    let (f0, _) = eval(0.0)?;
    if f0 >= 0.0 {
        return Ok(0.0);
    }
    let mut hi = (-f0).sqrt().max(1e-300);
    let mut guard = 0;
    while eval(hi)?.0 <= 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(MsaError::NoConvergence("screening bracket"));
        }
    }
    // Errors inside the closure would only come from ξ leaving [0,1), which the
    // bracket search above has already ruled out on [0, hi].
    let f = |g: f64| eval(g).unwrap_or((f64::NAN, f64::NAN));
    let x0 = hi.min(res.gamma0.max(0.5 * hi));
    let g = bracketed_newton(f, 0.0, hi, x0, "screening parameter")?;
    let (fg, _) = eval(g)?;
    let scale: f64 = g * g + 1.0;
    if !(fg.abs() <= TOL_ALG * scale) {
        return Err(MsaError::NoConvergence("screening parameter"));
    }
    Ok(g)
}

/// Γ at potential Ψ with the hard-sphere term p(ξ) held fixed: positive root of
/// Γ² = Σ z_j² c_j exp(−z_jΨ + lb Γ z_j²/(1 + a_jΓ) − p)/(1 + a_jΓ)².
pub fn solve_gamma_frozen(
    psi: f64,
    p_hs: f64,
    prm: &MsaParams,
    res: &Reservoir,
) -> Result<f64, MsaError> {
    if !(psi.is_finite() && p_hs.is_finite()) {
        return Err(MsaError::InvalidInput(format!(
            "non-finite potential {psi} or hard-sphere term {p_hs}"
        )));
    }
    let ep = (-p_hs).exp();
    let f = |g: f64| {
        let mut v = g * g;
        let mut dv = 2.0 * g;
        for j in 0..prm.len() {
            let z2 = prm.z[j] * prm.z[j];
            let q = 1.0 + prm.a[j] * g;
            let n = reduced(prm, res, psi, g, j) * ep;
            v -= z2 * n / (q * q);
            dv -= z2 * n * (prm.lb * z2 / (q * q) - 2.0 * prm.a[j] / q) / (q * q);
        }
        (v, dv)
    };
    let f0 = f(0.0).0;
    if f0 >= 0.0 {
        return Ok(0.0);
    }
    let mut hi = (-f0).sqrt();
    let mut guard = 0;
    while f(hi).0 <= 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 || !hi.is_finite() {
            return Err(MsaError::NoConvergence("screening bracket"));
        }
    }
    bracketed_newton(f, 0.0, hi, 0.5 * hi, "screening parameter")
}

/// Pointwise equilibrium state at potential Ψ.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalState {
    pub psi: f64,
    pub gamma: f64,
    pub xi: f64,
    /// exp(p(ξ)).
    pub gamma_hs: f64,
    pub activity: Vec<f64>,
    pub n: Vec<f64>,
}

/// Concentrations, activities, Γ and ξ at potential Ψ.
pub fn local_state(
    psi: f64,
    prm: &MsaParams,
    res: &Reservoir,
    model: Model,
) -> Result<LocalState, MsaError> {
    let nsp = prm.len();
    match model {
        Model::Ideal => {
            let n: Vec<f64> = (0..nsp)
                .map(|j| prm.n_inf[j] * (-prm.z[j] * psi).exp())
                .collect();
            let gamma = (0..nsp)
                .map(|j| prm.z[j] * prm.z[j] * n[j])
                .sum::<f64>()
                .sqrt();
            Ok(LocalState {
                psi,
                gamma,
                xi: 0.0,
                gamma_hs: 1.0,
                activity: vec![1.0; nsp],
                n,
            })
        }
        Model::Msa => {
            let gamma = solve_gamma(psi, prm, res)?;
            let xi = solve_xi(psi, gamma, prm, res)?;
            let p = hard_sphere_p(xi)?;
            let activity: Vec<f64> = (0..nsp)
                .map(|j| {
                    (p - prm.lb * gamma * prm.z[j] * prm.z[j] / (1.0 + prm.a[j] * gamma)).exp()
                })
                .collect();
            let n = (0..nsp)
                .map(|j| res.c[j] * (-prm.z[j] * psi).exp() / activity[j])
                .collect();
            Ok(LocalState {
                psi,
                gamma,
                xi,
                gamma_hs: p.exp(),
                activity,
                n,
            })
        }
    }
}
