//! Exact open-system treatment: Liouvillian construction, steady states,
//! time propagation, and second-order correlations.
//!
//! The generator acts on column-vectorized density matrices (vec stacks
//! columns, so ρ[i,j] lives at index i + dim·j):
//!
//! ```text
//! L ρ = -i[H, ρ] + κ_a D[a]ρ + κ_m D[m]ρ,
//! D[o]ρ = 2 o ρ o† - o†o ρ - ρ o†o,
//! ```
//!
//! with `H` the Hermitian rotating-frame Hamiltonian. Under the factor-2
//! convention a single damped mode relaxes as exp(-2κt) in population.
//!
//! Cavity gain is handled two ways. The default `NegativeRate` model plugs
//! κ_a < 0 straight into the loss dissipator: that generator reproduces the
//! reference curves but is not completely positive, so its algebraic null
//! state can fail positivity and its spectrum can leak into the right half
//! plane. The `GainDissipator` model instead uses |κ_a| D[a†], the physical
//! amplifier with its spontaneous-emission noise floor. [`steady_state`]
//! refuses to report a state whenever the spectrum has a growing eigenvalue,
//! naming the offending eigenvalue instead of hiding it.

use crate::fock::{self, FockSpace, Mode, OperatorMatrix};
use crate::params::SystemParams;
use crate::C64;
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, EigVals, Eigh, UPLO};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LindbladError {
    #[error("thermal occupations are not supported (n_th_a = {n_th_a}, n_th_m = {n_th_m})")]
    ThermalUnsupported { n_th_a: f64, n_th_m: f64 },
    #[error("no steady state: {reason}")]
    NoSteadyState { reason: String },
    #[error("steady state violates positivity: min eigenvalue {min_eigenvalue:.3e}")]
    PositivityViolation { min_eigenvalue: f64 },
    #[error("steady-state residual ‖Lρ‖ = {residual:.3e} exceeds tolerance {tol:.1e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
    #[error("eigen-decomposition failed: {0}")]
    LinalgFailure(String),
    #[error("invalid time step: {reason}")]
    InvalidTimeStep { reason: String },
    #[error("time propagation diverged at t = {t}")]
    Diverged { t: f64 },
    #[error("statistics undefined: mode population {population:.3e} below threshold")]
    UndefinedStatistics { population: f64 },
    #[error("expectation value has imaginary residue {imag:.3e}; state is not physical")]
    NonphysicalState { imag: f64 },
    #[error(transparent)]
    Params(#[from] crate::params::ParamsError),
}

/// How a negative cavity rate is mapped onto a dissipator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainModel {
    /// Plug κ_a < 0 into the loss dissipator κ_a D[a].
    NegativeRate,
    /// Replace the photon term by |κ_a| D[a†] when κ_a < 0.
    GainDissipator,
}

/// Solver configuration. Thermal occupations exist as fields for interface
/// completeness but must be zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladConfig {
    pub gain_model: GainModel,
    pub n_th_a: f64,
    pub n_th_m: f64,
}

impl Default for LindbladConfig {
    fn default() -> Self {
        Self {
            gain_model: GainModel::NegativeRate,
            n_th_a: 0.0,
            n_th_m: 0.0,
        }
    }
}

impl LindbladConfig {
    pub fn validate(&self) -> Result<(), LindbladError> {
        if self.n_th_a != 0.0 || self.n_th_m != 0.0 {
            return Err(LindbladError::ThermalUnsupported {
                n_th_a: self.n_th_a,
                n_th_m: self.n_th_m,
            });
        }
        Ok(())
    }
}

/// Tolerances used by [`steady_state`], in κ_m units.
const ZERO_EIG_TOL: f64 = 1e-8;
const GROWTH_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-8;
const POSITIVITY_HARD: f64 = -1e-6;
const POSITIVITY_SOFT: f64 = -1e-8;

/// Dense superoperator on column-vectorized density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    space: FockSpace,
    matrix: Array2<C64>,
}

impl Liouvillian {
    pub fn space(&self) -> FockSpace {
        self.space
    }

    /// The dim²×dim² generator matrix.
    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// Largest absolute row sum; a cheap upper bound on the spectral radius
    /// used for step-size control.
    pub fn norm_inf(&self) -> f64 {
        self.matrix
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Trace-preservation defect: max entry of vec(I)† L. Exactly zero in
    /// infinite dimension; the truncated operators keep it at rounding level.
    pub fn trace_defect(&self) -> f64 {
        let d = self.space.dim();
        let mut worst = 0.0f64;
        for col in 0..d * d {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..d {
                acc += self.matrix[(i + d * i, col)];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }

    /// Full eigenvalue spectrum (stability diagnostic).
    pub fn stability_spectrum(&self) -> Result<Array1<C64>, LindbladError> {
        self.matrix
            .eigvals()
            .map_err(|e| LindbladError::LinalgFailure(e.to_string()))
    }

    /// Apply to a vectorized state.
    pub(crate) fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        self.matrix.dot(v)
    }
}

/// Density matrix on a [`FockSpace`], basis order per the fock contract.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: FockSpace,
    entries: Array2<C64>,
}

impl DensityMatrix {
    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    /// Vacuum projector |0,0⟩⟨0,0|.
    pub fn vacuum(space: FockSpace) -> Self {
        let mut e = Array2::zeros((space.dim(), space.dim()));
        e[(0, 0)] = C64::new(1.0, 0.0);
        Self { space, entries: e }
    }

    /// Pure state ρ = |ψ⟩⟨ψ| / ⟨ψ|ψ⟩ from a coefficient vector in basis
    /// order.
    pub fn from_pure(space: FockSpace, psi: &[C64]) -> Self {
        assert_eq!(psi.len(), space.dim());
        let norm2: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        let d = space.dim();
        let entries = Array2::from_shape_fn((d, d), |(i, j)| psi[i] * psi[j].conj() / norm2);
        Self { space, entries }
    }

    pub fn from_entries(space: FockSpace, entries: Array2<C64>) -> Self {
        assert_eq!(entries.nrows(), space.dim());
        Self { space, entries }
    }

    pub fn trace(&self) -> C64 {
        self.entries.diag().sum()
    }

    /// Max deviation from ρ = ρ†.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.space.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitized matrix.
    pub fn min_eigenvalue(&self) -> Result<f64, LindbladError> {
        let herm = self.hermitized();
        let evals = herm
            .eigvalsh(UPLO::Lower)
            .map_err(|e| LindbladError::LinalgFailure(e.to_string()))?;
        Ok(evals.iter().cloned().fold(f64::INFINITY, f64::min))
    }

    fn hermitized(&self) -> Array2<C64> {
        let adj = self.entries.t().mapv(|z| z.conj());
        (&self.entries + &adj).mapv(|z| 0.5 * z)
    }

    /// ⟨op⟩ = tr(ρ · op).
    pub fn expectation(&self, op: &OperatorMatrix) -> C64 {
        self.entries.dot(op.entries()).diag().sum()
    }

    /// Mean occupation of a mode.
    pub fn mean_occupation(&self, mode: Mode) -> Result<f64, LindbladError> {
        let n = fock::number(self.space, mode);
        let v = self.expectation(&n);
        ensure_real(v)
    }

    /// Trace distance ½‖ρ - σ‖₁.
    pub fn trace_distance(&self, other: &Self) -> Result<f64, LindbladError> {
        let diff = DensityMatrix {
            space: self.space,
            entries: &self.entries - &other.entries,
        };
        let herm = diff.hermitized();
        let evals = herm
            .eigvalsh(UPLO::Lower)
            .map_err(|e| LindbladError::LinalgFailure(e.to_string()))?;
        Ok(0.5 * evals.iter().map(|x| x.abs()).sum::<f64>())
    }

    /// Text dump: one row per line, entries "re,im" separated by single
    /// spaces, row-major in the fock basis order.
    pub fn write_text<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        for row in self.entries.rows() {
            let line: Vec<String> = row
                .iter()
                .map(|z| format!("{:.12e},{:.12e}", z.re, z.im))
                .collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

fn ensure_real(z: C64) -> Result<f64, LindbladError> {
    if z.im.abs() > 1e-8 * z.re.abs().max(1.0) {
        return Err(LindbladError::NonphysicalState { imag: z.im });
    }
    Ok(z.re)
}

fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    ndarray::linalg::kron(a, b)
}

/// vec(o ρ o† …) building block: rate·(2 ō⊗o − I⊗o†o − (o†o)ᵀ⊗I).
fn dissipator_super(o: &Array2<C64>, rate: f64, eye: &Array2<C64>) -> Array2<C64> {
    let od = o.t().mapv(|z| z.conj());
    let odo = od.dot(o);
    let jump = kron(&o.mapv(|z| z.conj()), o).mapv(|z| 2.0 * z);
    let left = kron(eye, &odo);
    let right = kron(&odo.t().to_owned(), eye);
    (jump - left - right).mapv(|z| rate * z)
}

/// Assemble the superoperator for the given parameters and gain model.
pub fn build_liouvillian(
    params: &SystemParams,
    space: FockSpace,
    cfg: &LindbladConfig,
) -> Result<Liouvillian, LindbladError> {
    params.validate()?;
    cfg.validate()?;
    let d = space.dim();
    let eye: Array2<C64> = Array2::eye(d);
    let h = fock::build_hamiltonian(params, space, false).into_entries();

    // -i[H, ρ]  →  -i(I⊗H - Hᵀ⊗I) on column-stacked ρ.
    let minus_i = C64::new(0.0, -1.0);
    let mut l = (kron(&eye, &h) - kron(&h.t().to_owned(), &eye)).mapv(|z| minus_i * z);

    let am = fock::annihilator(space, Mode::Magnon).into_entries();
    let aa = fock::annihilator(space, Mode::Photon).into_entries();

    if cfg.gain_model == GainModel::GainDissipator && params.kappa_a < 0.0 {
        let aad = aa.t().mapv(|z| z.conj());
        l = l + dissipator_super(&aad, -params.kappa_a, &eye);
    } else {
        l = l + dissipator_super(&aa, params.kappa_a, &eye);
    }
    l = l + dissipator_super(&am, params.kappa_m, &eye);

    Ok(Liouvillian { space, matrix: l })
}

/// Steady state from the null eigenvector of the Liouvillian.
///
/// The full spectrum is computed so that instabilities are diagnosed rather
/// than silently integrated over: any eigenvalue with real part above +1e-8
/// aborts, as does a missing or degenerate zero eigenvalue. The extracted
/// state is Hermitized, trace-normalized, checked for residual ‖Lρ‖ < 1e-8,
/// and rejected if an eigenvalue drops below -1e-6.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix, LindbladError> {
    let (evals, evecs) = l
        .matrix
        .eig()
        .map_err(|e| LindbladError::LinalgFailure(e.to_string()))?;

    let mut idx: Vec<usize> = (0..evals.len()).collect();
    idx.sort_by(|&i, &j| evals[i].norm().partial_cmp(&evals[j].norm()).unwrap());
    let zero = idx[0];
    if evals[zero].norm() > ZERO_EIG_TOL {
        return Err(LindbladError::NoSteadyState {
            reason: format!(
                "smallest eigenvalue {:.3e}{:+.3e}i has magnitude above {ZERO_EIG_TOL:.1e}",
                evals[zero].re, evals[zero].im
            ),
        });
    }
    if evals.len() > 1 && evals[idx[1]].norm() < ZERO_EIG_TOL {
        return Err(LindbladError::NoSteadyState {
            reason: format!(
                "zero eigenvalue is degenerate (next magnitude {:.3e})",
                evals[idx[1]].norm()
            ),
        });
    }
    let max_re = evals.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if max_re > GROWTH_TOL {
        let worst = evals
            .iter()
            .max_by(|a, b| a.re.partial_cmp(&b.re).unwrap())
            .unwrap();
        return Err(LindbladError::NoSteadyState {
            reason: format!(
                "unstable eigenvalue {:.6e}{:+.6e}i grows in time",
                worst.re, worst.im
            ),
        });
    }

    // Reshape the column-stacked null vector, Hermitize, normalize.
    let d = l.space.dim();
    let v = evecs.column(zero);
    let raw = Array2::from_shape_fn((d, d), |(i, j)| v[i + d * j]);
    let adj = raw.t().mapv(|z| z.conj());
    let herm = (&raw + &adj).mapv(|z| 0.5 * z);
    let trace: C64 = herm.diag().sum();
    if trace.norm() < 1e-12 {
        return Err(LindbladError::NoSteadyState {
            reason: "null vector is traceless; no normalizable state".into(),
        });
    }
    let rho = herm.mapv(|z| z / trace);

    // Residual of the normalized state under the generator.
    let vec_rho = Array1::from_shape_fn(d * d, |k| rho[(k % d, k / d)]);
    let residual = l
        .apply(&vec_rho)
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > RESIDUAL_TOL {
        return Err(LindbladError::ResidualTooLarge {
            residual,
            tol: RESIDUAL_TOL,
        });
    }

    let out = DensityMatrix {
        space: l.space,
        entries: rho,
    };
    let min_eig = out.min_eigenvalue()?;
    if min_eig < POSITIVITY_HARD {
        return Err(LindbladError::PositivityViolation {
            min_eigenvalue: min_eig,
        });
    }
    if min_eig < POSITIVITY_SOFT {
        log::warn!("steady state is weakly non-positive (min eigenvalue {min_eig:.3e})");
    }
    Ok(out)
}

/// Fourth-order fixed-step propagation of ∂ρ/∂t = Lρ up to `t_final`.
pub fn evolve(
    rho0: &DensityMatrix,
    l: &Liouvillian,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrix, LindbladError> {
    if !(dt > 0.0) {
        return Err(LindbladError::InvalidTimeStep {
            reason: format!("dt = {dt} must be positive"),
        });
    }
    if !(t_final >= 0.0) {
        return Err(LindbladError::InvalidTimeStep {
            reason: format!("t_final = {t_final} must be non-negative"),
        });
    }
    let norm = l.norm_inf();
    if dt * norm >= 1.0 {
        return Err(LindbladError::InvalidTimeStep {
            reason: format!("dt·‖L‖ = {:.3} ≥ 1 is outside the stability region", dt * norm),
        });
    }
    if t_final == 0.0 {
        return Ok(rho0.clone());
    }

    let d = l.space.dim();
    let mut v = Array1::from_shape_fn(d * d, |k| rho0.entries[(k % d, k / d)]);
    let mut t = 0.0;
    let mut steps_since_check = 0usize;
    while t < t_final {
        let h = dt.min(t_final - t);
        let k1 = l.apply(&v);
        let k2 = l.apply(&(&v + &k1.mapv(|z| z * (0.5 * h))));
        let k3 = l.apply(&(&v + &k2.mapv(|z| z * (0.5 * h))));
        let k4 = l.apply(&(&v + &k3.mapv(|z| z * h)));
        v = &v
            + &(k1 + k2.mapv(|z| 2.0 * z) + k3.mapv(|z| 2.0 * z) + k4)
                .mapv(|z| z * (h / 6.0));
        t += h;
        steps_since_check += 1;
        if steps_since_check >= 16 || t >= t_final {
            steps_since_check = 0;
            let mag = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if !mag.is_finite() || mag > 1e9 {
                return Err(LindbladError::Diverged { t });
            }
        }
    }
    let entries = Array2::from_shape_fn((d, d), |(i, j)| v[i + d * j]);
    Ok(DensityMatrix {
        space: l.space,
        entries,
    })
}

/// Exact equal-time second-order correlation g²(0) = ⟨o†o†oo⟩/⟨o†o⟩².
pub fn g2_numeric(rho: &DensityMatrix, mode: Mode) -> Result<f64, LindbladError> {
    let a = fock::annihilator(rho.space, mode);
    let n = a.adjoint().dot(&a);
    let aa = a.dot(&a);
    let quartic = aa.adjoint().dot(&aa);

    let population = ensure_real(rho.expectation(&n))?;
    if population <= 1e-12 {
        return Err(LindbladError::UndefinedStatistics { population });
    }
    let num = ensure_real(rho.expectation(&quartic))?;
    Ok(num / (population * population))
}
