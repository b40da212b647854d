//! Simulation library for a driven, dissipative cavity-magnon system with a
//! magnon Kerr nonlinearity and a cavity channel that can be lossy or
//! amplifying.
//!
//! The model is a single microwave cavity mode coupled to the uniform
//! (Kittel) magnon mode of a ferrimagnetic sphere. In the frame rotating at
//! the drive frequency the effective Hamiltonian reads (`ħ = 1`)
//!
//! ```text
//! H = (Δ_a - iκ_a) a†a + (Δ_m - iκ_m) m†m + χ (m†m)² + g (a†m + a m†) + Ω_d (m† + m)
//! ```
//!
//! with the `-iκ` terms dropped when a Hermitian generator is requested.
//! Everything is expressed in units of the magnon linewidth `κ_m` (so
//! `κ_m = 1` internally); a negative `κ_a` models cavity gain.
//!
//! Module map:
//! - [`params`]: parameter types, unit normalization, and the material
//!   formulas for `g`, `χ`, `Ω`.
//! - [`spectrum`]: closed-form eigenvalues of the 2×2 coupled-mode matrix,
//!   phase classification, and exceptional-point location.
//! - [`fock`]: truncated two-mode Fock space and dense operator assembly.
//! - [`weakdrive`]: perturbative steady-state amplitudes on the
//!   two-excitation subspace and the reduced `g²(0)` formulas.
//! - [`lindblad`]: full Liouvillian construction, steady states, time
//!   propagation, and exact `g²(0)`.
//! - [`supermode`]: effective Kerr coefficients of the hybridized modes and
//!   their growth towards the exceptional point.

pub mod fock;
pub mod lindblad;
pub mod params;
pub mod spectrum;
pub mod supermode;
pub mod weakdrive;

/// Complex double, the scalar type used throughout.
pub type C64 = num_complex::Complex64;

pub use fock::{FockSpace, Mode, OperatorMatrix};
pub use lindblad::{DensityMatrix, GainModel, LindbladConfig, Liouvillian};
pub use params::{LabFrameParams, PhysicalConstants, SystemParams};
pub use spectrum::{CoupledModeMatrix, FreeVariable, PhaseLabel, SpectrumResult};
pub use supermode::{EffectiveKerr, ScalingPrediction};
pub use weakdrive::{AmplitudeVector, G2Result, G2Variant};
