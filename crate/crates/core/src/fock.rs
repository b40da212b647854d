//! Truncated two-mode Fock space and dense operator assembly.
//!
//! Basis contract: the state |m magnons, n photons⟩ sits at index
//! `k = m·(n_max_a + 1) + n` (magnon-major ordering). All operators are dense
//! complex matrices on that basis; at the cutoffs of interest (≤ 10 quanta
//! per mode) sparsity buys nothing.

use crate::params::SystemParams;
use crate::C64;
use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("mode cutoff must be at least 1, got ({n_max_m}, {n_max_a})")]
    CutoffTooSmall { n_max_m: usize, n_max_a: usize },
    #[error("state ({m}, {n}) outside cutoffs ({n_max_m}, {n_max_a})")]
    IndexOutOfRange {
        m: usize,
        n: usize,
        n_max_m: usize,
        n_max_a: usize,
    },
}

/// Which bosonic mode an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Magnon,
    Photon,
}

/// Two-mode truncated Fock space with per-mode cutoffs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    n_max_m: usize,
    n_max_a: usize,
}

impl FockSpace {
    pub fn new(n_max_m: usize, n_max_a: usize) -> Result<Self, FockError> {
        if n_max_m < 1 || n_max_a < 1 {
            return Err(FockError::CutoffTooSmall { n_max_m, n_max_a });
        }
        Ok(Self { n_max_m, n_max_a })
    }

    pub fn n_max_m(&self) -> usize {
        self.n_max_m
    }

    pub fn n_max_a(&self) -> usize {
        self.n_max_a
    }

    pub fn dim(&self) -> usize {
        (self.n_max_m + 1) * (self.n_max_a + 1)
    }

    /// Basis index of |m, n⟩.
    pub fn index(&self, m: usize, n: usize) -> Result<usize, FockError> {
        if m > self.n_max_m || n > self.n_max_a {
            return Err(FockError::IndexOutOfRange {
                m,
                n,
                n_max_m: self.n_max_m,
                n_max_a: self.n_max_a,
            });
        }
        Ok(m * (self.n_max_a + 1) + n)
    }

    /// Occupation numbers (m, n) of basis index `k`.
    pub fn state(&self, k: usize) -> (usize, usize) {
        (k / (self.n_max_a + 1), k % (self.n_max_a + 1))
    }
}

/// Dense complex operator on a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    space: FockSpace,
    entries: Array2<C64>,
}

impl OperatorMatrix {
    pub(crate) fn from_entries(space: FockSpace, entries: Array2<C64>) -> Self {
        debug_assert_eq!(entries.nrows(), space.dim());
        debug_assert_eq!(entries.ncols(), space.dim());
        Self { space, entries }
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<C64> {
        self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_entries(self.space, self.entries.t().mapv(|z| z.conj()))
    }

    /// Matrix product `self · rhs` (same space assumed).
    pub fn dot(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.space, rhs.space);
        Self::from_entries(self.space, self.entries.dot(&rhs.entries))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.space.dim();
        for i in 0..d {
            for j in i..d {
                if (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

fn lowering(dim: usize) -> Array2<C64> {
    let mut a = Array2::zeros((dim, dim));
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

fn identity(dim: usize) -> Array2<C64> {
    Array2::eye(dim)
}

/// Annihilation operator of `mode`, tensor-embedded per the basis contract
/// (identity on the other mode).
pub fn annihilator(space: FockSpace, mode: Mode) -> OperatorMatrix {
    let dm = space.n_max_m + 1;
    let da = space.n_max_a + 1;
    let entries = match mode {
        Mode::Magnon => ndarray::linalg::kron(&lowering(dm), &identity(da)),
        Mode::Photon => ndarray::linalg::kron(&identity(dm), &lowering(da)),
    };
    OperatorMatrix::from_entries(space, entries)
}

/// Number operator of `mode`.
pub fn number(space: FockSpace, mode: Mode) -> OperatorMatrix {
    let a = annihilator(space, mode);
    a.adjoint().dot(&a)
}

/// Identity operator.
pub fn identity_op(space: FockSpace) -> OperatorMatrix {
    OperatorMatrix::from_entries(space, identity(space.dim()))
}

/// Rotating-frame Hamiltonian
/// `H = (Δ_a - iκ_a·[dissipative]) a†a + (Δ_m - iκ_m·[dissipative]) m†m
///      + χ (m†m)² + g (a†m + a m†) + Ω_d (m† + m)`.
///
/// With `dissipative = false` the `-iκ` terms are dropped and the result is
/// exactly Hermitian.
pub fn build_hamiltonian(
    params: &SystemParams,
    space: FockSpace,
    dissipative: bool,
) -> OperatorMatrix {
    let am = annihilator(space, Mode::Magnon);
    let aa = annihilator(space, Mode::Photon);
    let nm = am.adjoint().dot(&am).into_entries();
    let na = aa.adjoint().dot(&aa).into_entries();

    let ca = if dissipative {
        C64::new(params.delta_a, -params.kappa_a)
    } else {
        C64::new(params.delta_a, 0.0)
    };
    let cm = if dissipative {
        C64::new(params.delta_m, -params.kappa_m)
    } else {
        C64::new(params.delta_m, 0.0)
    };

    let exchange =
        aa.adjoint().dot(&am).into_entries() + aa.dot(&am.adjoint()).into_entries();
    let drive = am.adjoint().entries() + am.entries();

    let h = na.mapv(|z| ca * z)
        + nm.mapv(|z| cm * z)
        + nm.dot(&nm).mapv(|z| params.chi * z)
        + exchange.mapv(|z| params.g * z)
        + drive.mapv(|z| params.omega_d_amp * z);
    OperatorMatrix::from_entries(space, h)
}

/// Entry ⟨bra|op|ket⟩ with occupation-number addressing.
pub fn matrix_element(
    op: &OperatorMatrix,
    bra: (usize, usize),
    ket: (usize, usize),
) -> Result<C64, FockError> {
    let i = op.space.index(bra.0, bra.1)?;
    let j = op.space.index(ket.0, ket.1)?;
    Ok(op.entries[(i, j)])
}
