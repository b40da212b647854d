//! Model parameters, unit conventions, and the material formulas that relate
//! the coupling, Kerr, and drive strengths to physical constants.
//!
//! All solver-facing quantities live in [`SystemParams`] and are expressed in
//! units of the magnon linewidth `κ_m`; lab-frame angular frequencies enter
//! only through [`normalize`].

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("parameter `{name}` must be > 0, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("parameter `{name}` must be >= 0, got {value}")]
    Negative { name: &'static str, value: f64 },
}

fn check_finite(name: &'static str, value: f64) -> Result<(), ParamsError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ParamsError::NonFinite { name, value })
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<(), ParamsError> {
    check_finite(name, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(ParamsError::NotPositive { name, value })
    }
}

fn check_non_negative(name: &'static str, value: f64) -> Result<(), ParamsError> {
    check_finite(name, value)?;
    if value >= 0.0 {
        Ok(())
    } else {
        Err(ParamsError::Negative { name, value })
    }
}

/// Rotating-frame model parameters in units of the magnon linewidth `κ_m`.
///
/// `kappa_a < 0` means the cavity channel is amplified rather than damped;
/// the magnon channel is always lossy (`kappa_m > 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Cavity detuning Δ_a = ω_a − ω_d.
    pub delta_a: f64,
    /// Magnon detuning Δ_m = ω_m − ω_d.
    pub delta_m: f64,
    /// Cavity dissipation rate (negative = gain).
    pub kappa_a: f64,
    /// Magnon dissipation rate; the unit of every other field.
    pub kappa_m: f64,
    /// Cavity-magnon coupling strength.
    pub g: f64,
    /// Magnon Kerr coefficient.
    pub chi: f64,
    /// Magnon drive amplitude Ω_d.
    pub omega_d_amp: f64,
}

impl SystemParams {
    pub fn new(
        delta_a: f64,
        delta_m: f64,
        kappa_a: f64,
        kappa_m: f64,
        g: f64,
        chi: f64,
        omega_d_amp: f64,
    ) -> Result<Self, ParamsError> {
        let p = Self {
            delta_a,
            delta_m,
            kappa_a,
            kappa_m,
            g,
            chi,
            omega_d_amp,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        check_finite("delta_a", self.delta_a)?;
        check_finite("delta_m", self.delta_m)?;
        check_finite("kappa_a", self.kappa_a)?;
        check_positive("kappa_m", self.kappa_m)?;
        check_non_negative("g", self.g)?;
        check_non_negative("chi", self.chi)?;
        check_non_negative("omega_d_amp", self.omega_d_amp)?;
        Ok(())
    }

    /// True when the gain-loss balance holds: equal detunings and
    /// `κ_a = -κ_m` (amplified cavity exactly compensating the magnon loss).
    pub fn is_pt_configured(&self) -> bool {
        self.delta_a == self.delta_m && self.kappa_a == -self.kappa_m
    }
}

/// Lab-frame angular frequencies of the cavity, magnon, and drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabFrameParams {
    pub omega_a: f64,
    pub omega_m: f64,
    pub omega_d: f64,
}

impl LabFrameParams {
    pub fn new(omega_a: f64, omega_m: f64, omega_d: f64) -> Result<Self, ParamsError> {
        check_positive("omega_a", omega_a)?;
        check_positive("omega_m", omega_m)?;
        check_positive("omega_d", omega_d)?;
        Ok(Self {
            omega_a,
            omega_m,
            omega_d,
        })
    }

    /// Detunings (Δ_a, Δ_m) relative to the drive, still in lab units.
    pub fn detunings(&self) -> (f64, f64) {
        (self.omega_a - self.omega_d, self.omega_m - self.omega_d)
    }
}

/// Material and field constants entering the derived couplings.
///
/// `gamma` is the gyromagnetic ratio γ = g_e μ_B expressed as an angular
/// frequency per unit field, so that γB₀ is an angular frequency; the
/// derived quantities then inherit those units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Gyromagnetic ratio γ = g_e μ_B (angular frequency per field).
    pub gamma: f64,
    /// Lande factor.
    pub g_e: f64,
    /// Bohr magneton.
    pub mu_b: f64,
    /// Vacuum permeability.
    pub mu_0: f64,
    /// First-order magnetocrystalline anisotropy constant.
    pub chi_an: f64,
    /// Saturation magnetization.
    pub m_sat: f64,
    /// Sphere volume.
    pub v_m: f64,
    /// Number of unit cells carrying spin `spin`.
    pub n_cells: u64,
    /// Spin per unit cell (5/2 for the materials of interest).
    pub spin: f64,
    /// Static bias field.
    pub b_0: f64,
    /// Drive field amplitude.
    pub b_d: f64,
    /// Anisotropy offset of the magnon frequency, ω_m = γB₀ + ω_ai.
    /// Stored for bookkeeping; no derived formula consumes it.
    pub omega_ai: f64,
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<(), ParamsError> {
        check_positive("gamma", self.gamma)?;
        check_positive("g_e", self.g_e)?;
        check_positive("mu_b", self.mu_b)?;
        check_positive("mu_0", self.mu_0)?;
        check_positive("chi_an", self.chi_an)?;
        check_positive("m_sat", self.m_sat)?;
        check_positive("v_m", self.v_m)?;
        if self.n_cells == 0 {
            return Err(ParamsError::NotPositive {
                name: "n_cells",
                value: 0.0,
            });
        }
        check_positive("spin", self.spin)?;
        check_non_negative("b_0", self.b_0)?;
        check_non_negative("b_d", self.b_d)?;
        check_non_negative("omega_ai", self.omega_ai)?;
        Ok(())
    }
}

/// Cavity-magnon coupling g = (γB₀/2)·√(2sN).
pub fn derive_coupling(pc: &PhysicalConstants) -> Result<f64, ParamsError> {
    pc.validate()?;
    let g = 0.5 * pc.gamma * pc.b_0 * (2.0 * pc.spin * pc.n_cells as f64).sqrt();
    check_finite("coupling", g)?;
    Ok(g)
}

/// Kerr coefficient χ = μ₀ χ_an γ² / (M² V_m).
pub fn derive_kerr(pc: &PhysicalConstants) -> Result<f64, ParamsError> {
    pc.validate()?;
    let chi = pc.mu_0 * pc.chi_an * pc.gamma * pc.gamma / (pc.m_sat * pc.m_sat * pc.v_m);
    check_finite("kerr", chi)?;
    Ok(chi)
}

/// Drive strength Ω = (η/2)·B_d with η = (γ/2)·√(5N).
///
/// The factor 5 is 2s for the spin-5/2 unit cell; it is kept literal here to
/// match the convention under which the drive susceptibility is quoted.
pub fn derive_drive(pc: &PhysicalConstants) -> Result<f64, ParamsError> {
    pc.validate()?;
    let omega = 0.25 * pc.gamma * (5.0 * pc.n_cells as f64).sqrt() * pc.b_d;
    check_finite("drive", omega)?;
    Ok(omega)
}

/// Convert lab-frame frequencies and rates into κ_m units.
///
/// `unit` is the magnon linewidth κ_m in the same lab units as the other
/// arguments, so the returned `kappa_m` is always exactly 1.
pub fn normalize(
    lab: &LabFrameParams,
    kappa_a: f64,
    g: f64,
    chi: f64,
    omega_d_amp: f64,
    unit: f64,
) -> Result<SystemParams, ParamsError> {
    check_positive("unit", unit)?;
    let (da, dm) = lab.detunings();
    SystemParams::new(
        da / unit,
        dm / unit,
        kappa_a / unit,
        1.0,
        g / unit,
        chi / unit,
        omega_d_amp / unit,
    )
}
