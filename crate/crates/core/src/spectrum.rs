//! Non-Hermitian coupled-mode analysis of the linear cavity-magnon system.
//!
//! The quadratic part of the Hamiltonian is the 2×2 complex symmetric matrix
//!
//! ```text
//! P = | ω_a - iκ_a    g          |
//!     | g             ω_m - iκ_m |
//! ```
//!
//! whose eigenvalues are
//!
//! ```text
//! ω_{1,2} = ½(ω_a + ω_m - i(κ_a + κ_m)) ± ½√(4g² - [i(ω_a - ω_m) + (κ_a - κ_m)]²).
//! ```
//!
//! For the balanced case ω_a = ω_m and κ_a = -κ_m this reduces to
//! ω_a ± √(g² - κ_m²): the spectrum is purely real for g > κ_m (unbroken
//! phase), purely decaying/growing for g < κ_m (broken phase), and the two
//! eigenvalues coalesce at g = κ_m, the exceptional point. More generally the
//! coalescence condition is 2g = |κ_a - κ_m| at equal frequencies.

use crate::params::SystemParams;
use crate::C64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("no exceptional point in bracket [{lo}, {hi}]: min |discriminant| = {min_abs_disc:.3e} at {at}")]
    NoExceptionalPoint {
        lo: f64,
        hi: f64,
        min_abs_disc: f64,
        at: f64,
    },
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
}

/// The 2×2 coupled-mode matrix. In the rotating frame the diagonal
/// frequencies are the detunings Δ_a, Δ_m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledModeMatrix {
    pub p11: C64,
    pub p12: C64,
    pub p21: C64,
    pub p22: C64,
}

impl CoupledModeMatrix {
    /// Build from mode frequencies, rates, and a real coupling; the result is
    /// symmetric (`p12 == p21`) by construction.
    pub fn new(omega_a: f64, kappa_a: f64, omega_m: f64, kappa_m: f64, g: f64) -> Self {
        Self {
            p11: C64::new(omega_a, -kappa_a),
            p12: C64::new(g, 0.0),
            p21: C64::new(g, 0.0),
            p22: C64::new(omega_m, -kappa_m),
        }
    }

    /// Rotating-frame matrix of a parameter set (frequencies → detunings).
    pub fn from_params(p: &SystemParams) -> Self {
        Self::new(p.delta_a, p.kappa_a, p.delta_m, p.kappa_m, p.g)
    }

    /// Discriminant 4g² - [i(ω_a-ω_m) + (κ_a-κ_m)]², identically equal to
    /// (p11-p22)² + 4 p12 p21: the term under the square root of the
    /// eigenvalue formula.
    pub fn discriminant(&self) -> C64 {
        let d = self.p11 - self.p22;
        d * d + 4.0 * self.p12 * self.p21
    }
}

/// Eigen-decomposition of a [`CoupledModeMatrix`]: `P Q = Q D`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub omega1: C64,
    pub omega2: C64,
    /// Columns are the eigenvectors in (cavity, magnon) component order,
    /// unit Euclidean norm, first nonzero component rotated to the positive
    /// real axis.
    pub q: [[C64; 2]; 2],
    /// diag(ω₁, ω₂).
    pub d: [[C64; 2]; 2],
    pub discriminant: C64,
    /// Set when the eigenvectors are parallel within tolerance (the matrix is
    /// non-diagonalizable at an exceptional point).
    pub defective: bool,
}

/// Default tolerance for degeneracy decisions, in κ_m units.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseLabel {
    Unbroken,
    Exceptional,
    Broken,
}

/// Parameter freed when hunting for an exceptional point or sweeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeVariable {
    /// Coupling strength g.
    Coupling,
    /// Cavity rate κ_a.
    KappaA,
    /// Cavity-magnon frequency asymmetry: Δ_a = Δ_m + x with Δ_m held.
    Delta,
}

fn matrix_with(params: &SystemParams, var: FreeVariable, x: f64) -> CoupledModeMatrix {
    let mut p = *params;
    match var {
        FreeVariable::Coupling => p.g = x,
        FreeVariable::KappaA => p.kappa_a = x,
        FreeVariable::Delta => p.delta_a = p.delta_m + x,
    }
    CoupledModeMatrix::from_params(&p)
}

/// √ with the branch fixed to a non-negative real part, breaking the tie on
/// the negative real axis towards a non-negative imaginary part.
fn branch_sqrt(z: C64) -> C64 {
    // Normalize -0.0 so that the principal square root of a negative real
    // lands on +i|z| rather than -i|z|.
    let z = C64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im });
    let s = z.sqrt();
    if s.re < 0.0 || (s.re == 0.0 && s.im < 0.0) {
        -s
    } else {
        s
    }
}

/// Closed-form eigenvalues and eigenvectors.
///
/// At an exceptional point the two eigenvalues coincide, the returned columns
/// of `q` are parallel, and `defective` is set; no error is raised.
pub fn eigenvalues(m: &CoupledModeMatrix) -> SpectrumResult {
    let half_tr = 0.5 * (m.p11 + m.p22);
    let disc = m.discriminant();
    let half_sq = 0.5 * branch_sqrt(disc);
    let omega1 = half_tr + half_sq;
    let omega2 = half_tr - half_sq;

    let col = |omega: C64| -> [C64; 2] {
        // Two algebraic candidates for the eigenvector; pick the larger to
        // stay well-conditioned, covering the decoupled g = 0 case.
        let va = [m.p12, omega - m.p11];
        let vb = [omega - m.p22, m.p21];
        let na = va[0].norm_sqr() + va[1].norm_sqr();
        let nb = vb[0].norm_sqr() + vb[1].norm_sqr();
        let mut v = if na >= nb { va } else { vb };
        let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if norm == 0.0 {
            // Scalar matrix (g = 0, p11 = p22): any basis diagonalizes.
            return if omega == omega1 {
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
            } else {
                [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
            };
        }
        v[0] /= norm;
        v[1] /= norm;
        // Rotate the first nonzero component onto the positive real axis.
        let lead = if v[0].norm() > 1e-14 { v[0] } else { v[1] };
        let phase = lead / lead.norm();
        [v[0] / phase, v[1] / phase]
    };

    let q1 = col(omega1);
    let q2 = col(omega2);
    let det = q1[0] * q2[1] - q1[1] * q2[0];
    let zero = C64::new(0.0, 0.0);
    SpectrumResult {
        omega1,
        omega2,
        q: [[q1[0], q2[0]], [q1[1], q2[1]]],
        d: [[omega1, zero], [zero, omega2]],
        discriminant: disc,
        defective: det.norm() < DEGENERACY_TOL,
    }
}

/// Classify the spectrum: coalesced eigenvalues are `Exceptional`, a purely
/// real pair is `Unbroken`, anything else is `Broken`.
pub fn classify_phase(m: &CoupledModeMatrix, tol: f64) -> PhaseLabel {
    assert!(tol > 0.0, "classification tolerance must be positive");
    let s = eigenvalues(m);
    if (s.omega1 - s.omega2).norm() < tol {
        PhaseLabel::Exceptional
    } else if s.omega1.im.abs() < tol && s.omega2.im.abs() < tol {
        PhaseLabel::Unbroken
    } else {
        PhaseLabel::Broken
    }
}

/// Threshold on |discriminant| below which the minimizer counts as an
/// exceptional point.
const EP_DISC_TOL: f64 = 1e-8;

fn disc_and_derivative(params: &SystemParams, var: FreeVariable, x: f64) -> (C64, C64) {
    let m = matrix_with(params, var, x);
    let disc = m.discriminant();
    let deriv = match var {
        // disc = 4x² - B²
        FreeVariable::Coupling => C64::new(8.0 * x, 0.0),
        // disc = 4g² - (iδ + (x - κ_m))²
        FreeVariable::KappaA => {
            let b = C64::new(x - params.kappa_m, params.delta_a - params.delta_m);
            -2.0 * b
        }
        // disc = 4g² - (ix + (κ_a - κ_m))²
        FreeVariable::Delta => {
            let b = C64::new(params.kappa_a - params.kappa_m, x);
            -2.0 * b * C64::new(0.0, 1.0)
        }
    };
    (disc, deriv)
}

/// Locate an exceptional point by minimizing |discriminant| over `bracket`.
///
/// A coarse scan brackets the minimum, golden-section search narrows it, and
/// a final Newton polish on |disc|² pushes the root to full double precision
/// (landing exactly on representable roots such as g = κ_m).
pub fn find_ep(
    params: &SystemParams,
    var: FreeVariable,
    bracket: (f64, f64),
) -> Result<f64, SpectrumError> {
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(SpectrumError::InvalidBracket { lo, hi });
    }
    let f = |x: f64| disc_and_derivative(params, var, x).0.norm();

    // Coarse scan to bracket the global minimum of |disc|.
    const SCAN: usize = 512;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..=SCAN {
        let x = lo + (hi - lo) * i as f64 / SCAN as f64;
        let v = f(x);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut a = lo + (hi - lo) * best_i.saturating_sub(1) as f64 / SCAN as f64;
    let mut b = lo + (hi - lo) * (best_i + 1).min(SCAN) as f64 / SCAN as f64;

    // Golden-section on the (locally V-shaped or quadratic) |disc|.
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut x = 0.5 * (a + b);

    // Newton steps minimizing h(x) = |disc(x)|²; near a simple root the step
    // is -Re(conj(disc)·disc')/|disc'|², which converges to the rounded root.
    for _ in 0..8 {
        let (disc, deriv) = disc_and_derivative(params, var, x);
        if disc.norm() == 0.0 {
            break;
        }
        let denom = deriv.norm_sqr();
        if denom == 0.0 {
            break;
        }
        let step = (disc.conj() * deriv).re / denom;
        let next = x - step;
        if !next.is_finite() || next < lo || next > hi {
            break;
        }
        if (next - x).abs() <= f64::EPSILON * x.abs() {
            x = next;
            break;
        }
        x = next;
    }

    let residual = f(x);
    if residual < EP_DISC_TOL {
        Ok(x)
    } else {
        Err(SpectrumError::NoExceptionalPoint {
            lo,
            hi,
            min_abs_disc: residual,
            at: x,
        })
    }
}

/// One row of a spectrum sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub value: f64,
    pub omega1: C64,
    pub omega2: C64,
}

/// Sweep the spectrum over `grid` values of the free variable.
///
/// Eigenvalue branches are ordered by nearest-neighbor continuation from one
/// grid point to the next, so the returned curves are smooth across branch
/// cuts; the grid is expected non-empty and sorted.
pub fn spectrum_sweep(
    params: &SystemParams,
    var: FreeVariable,
    grid: &[f64],
) -> Vec<SpectrumPoint> {
    let mut out = Vec::with_capacity(grid.len());
    let mut prev: Option<(C64, C64)> = None;
    for &x in grid {
        let s = eigenvalues(&matrix_with(params, var, x));
        let (mut w1, mut w2) = (s.omega1, s.omega2);
        if let Some((p1, p2)) = prev {
            let keep = (w1 - p1).norm() + (w2 - p2).norm();
            let swap = (w2 - p1).norm() + (w1 - p2).norm();
            if swap < keep {
                std::mem::swap(&mut w1, &mut w2);
            }
        }
        prev = Some((w1, w2));
        out.push(SpectrumPoint {
            value: x,
            omega1: w1,
            omega2: w2,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;
    use ndarray_linalg::Eig;
    use proptest::prelude::*;

    fn pt_params(g: f64) -> SystemParams {
        SystemParams::new(0.0, 0.0, -1.0, 1.0, g, 0.0, 0.0).unwrap()
    }

    #[test]
    fn decoupled_modes() {
        let m = CoupledModeMatrix::new(1.0, 0.1, 2.0, 0.2, 0.0);
        let s = eigenvalues(&m);
        // Branch convention puts the larger-frequency mode first here.
        let mut eigs = [s.omega1, s.omega2];
        eigs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert_relative_eq!(eigs[0].re, 1.0, max_relative = 1e-14);
        assert_relative_eq!(eigs[0].im, -0.1, max_relative = 1e-14);
        assert_relative_eq!(eigs[1].re, 2.0, max_relative = 1e-14);
        assert_relative_eq!(eigs[1].im, -0.2, max_relative = 1e-14);
        assert!(!s.defective);
    }

    #[test]
    fn balanced_ep_collapses_to_real_center() {
        // ω_a = ω_m = ω, κ_a = -κ_m, g = κ_m: both eigenvalues equal ω.
        let m = CoupledModeMatrix::new(3.0, -1.0, 3.0, 1.0, 1.0);
        let s = eigenvalues(&m);
        assert_eq!(s.omega1, s.omega2);
        assert_eq!(s.omega1, C64::new(3.0, 0.0));
        assert!(s.defective);
    }

    #[test]
    fn balanced_strong_coupling_pair_is_real() {
        // g = 2κ_m: ω ± √3 κ_m, purely real; cross-checked against a generic
        // dense eigensolver as an independent oracle.
        let m = CoupledModeMatrix::new(5.0, -1.0, 5.0, 1.0, 2.0);
        let s = eigenvalues(&m);
        let r3 = 3.0f64.sqrt();
        assert_relative_eq!(s.omega1.re, 5.0 + r3, max_relative = 1e-13);
        assert_relative_eq!(s.omega2.re, 5.0 - r3, max_relative = 1e-13);
        assert!(s.omega1.im.abs() < 1e-13);
        assert!(s.omega2.im.abs() < 1e-13);

        let dense = array![[m.p11, m.p12], [m.p21, m.p22]];
        let (mut lapack, _) = dense.eig().unwrap();
        lapack
            .as_slice_mut()
            .unwrap()
            .sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
        assert_relative_eq!(lapack[0].re, s.omega1.re, max_relative = 1e-12);
        assert_relative_eq!(lapack[1].re, s.omega2.re, max_relative = 1e-12);
        assert!(lapack[0].im.abs() < 1e-12 && lapack[1].im.abs() < 1e-12);
    }

    #[test]
    fn eigenvector_similarity_holds() {
        let m = CoupledModeMatrix::new(0.3, 0.7, -0.2, 1.0, 1.4);
        let s = eigenvalues(&m);
        // P q_j = ω_j q_j, column by column.
        for (j, omega) in [(0usize, s.omega1), (1usize, s.omega2)] {
            let v = [s.q[0][j], s.q[1][j]];
            let pv = [
                m.p11 * v[0] + m.p12 * v[1],
                m.p21 * v[0] + m.p22 * v[1],
            ];
            assert!((pv[0] - omega * v[0]).norm() < 1e-10);
            assert!((pv[1] - omega * v[1]).norm() < 1e-10);
            // Unit norm, positive-real leading component.
            assert_relative_eq!(v[0].norm_sqr() + v[1].norm_sqr(), 1.0, max_relative = 1e-12);
            let lead = if v[0].norm() > 1e-14 { v[0] } else { v[1] };
            assert!(lead.im.abs() < 1e-12 && lead.re > 0.0);
        }
    }

    #[test]
    fn classify_three_regimes() {
        let tol = DEGENERACY_TOL;
        let m = |g: f64| CoupledModeMatrix::new(2.0, -1.0, 2.0, 1.0, g);
        assert_eq!(classify_phase(&m(2.0), tol), PhaseLabel::Unbroken);
        assert_eq!(classify_phase(&m(1.0), tol), PhaseLabel::Exceptional);
        assert_eq!(classify_phase(&m(0.5), tol), PhaseLabel::Broken);
    }

    #[test]
    fn find_ep_in_coupling() {
        let p = pt_params(0.0);
        let g = find_ep(&p, FreeVariable::Coupling, (0.1, 3.0)).unwrap();
        assert!((g - 1.0).abs() < 1e-10);
        // Plugged back in, the eigenvalues coalesce to machine precision.
        let s = eigenvalues(&matrix_with(&p, FreeVariable::Coupling, g));
        assert!((s.omega1 - s.omega2).norm() < 1e-8);
    }

    #[test]
    fn find_ep_asymmetric_rates() {
        // κ_a = -3κ_m: the coalescence 2g = |κ_a - κ_m| puts the EP at g = 2.
        let p = SystemParams::new(0.0, 0.0, -3.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        let g = find_ep(&p, FreeVariable::Coupling, (0.5, 3.0)).unwrap();
        assert!((g - 2.0).abs() < 1e-10);
    }

    #[test]
    fn find_ep_in_kappa_a() {
        let p = pt_params(1.0);
        let ka = find_ep(&p, FreeVariable::KappaA, (-3.0, 0.0)).unwrap();
        assert!((ka + 1.0).abs() < 1e-10);
        let s = eigenvalues(&matrix_with(&p, FreeVariable::KappaA, ka));
        assert!((s.omega1 - s.omega2).norm() < 1e-8);
    }

    #[test]
    fn find_ep_reports_absence() {
        // Equal losses admit no coalescence in g over this bracket.
        let p = SystemParams::new(0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        match find_ep(&p, FreeVariable::Coupling, (0.5, 3.0)) {
            Err(SpectrumError::NoExceptionalPoint { .. }) => {}
            other => panic!("expected NoExceptionalPoint, got {other:?}"),
        }
    }

    #[test]
    fn sweep_matches_single_point() {
        let p = SystemParams::new(0.4, 0.0, -1.0, 1.0, 1.3, 0.0, 0.0).unwrap();
        let rows = spectrum_sweep(&p, FreeVariable::Coupling, &[1.3]);
        assert_eq!(rows.len(), 1);
        let s = eigenvalues(&CoupledModeMatrix::from_params(&p));
        assert_eq!(rows[0].omega1, s.omega1);
        assert_eq!(rows[0].omega2, s.omega2);
    }

    #[test]
    fn sweep_detuning_coalesces_at_zero() {
        // Balanced gain/loss with g = κ_m: branches touch at zero asymmetry.
        let p = pt_params(1.0);
        let grid: Vec<f64> = (0..=200).map(|i| -5.0 + 0.05 * i as f64).collect();
        let rows = spectrum_sweep(&p, FreeVariable::Delta, &grid);
        let at_zero = rows.iter().min_by(|a, b| {
            a.value.abs().partial_cmp(&b.value.abs()).unwrap()
        }).unwrap();
        assert!((at_zero.omega1 - at_zero.omega2).norm() < 1e-12);
        // Elsewhere the branches separate.
        assert!((rows[0].omega1 - rows[0].omega2).norm() > 1.0);
    }

    #[test]
    fn sweep_coupling_bifurcates_at_unity() {
        let p = pt_params(0.0);
        let grid: Vec<f64> = (0..=300).map(|i| 0.01 * i as f64).collect();
        let rows = spectrum_sweep(&p, FreeVariable::Coupling, &grid);
        for r in &rows {
            if r.value < 0.99 {
                assert!(
                    (r.omega1.re - r.omega2.re).abs() < 1e-10,
                    "broken phase has a common real part at g={}",
                    r.value
                );
            }
            if r.value > 1.01 {
                assert!(
                    (r.omega1.re - r.omega2.re).abs() > 1e-3,
                    "unbroken phase splits in frequency at g={}",
                    r.value
                );
                assert!(r.omega1.im.abs() < 1e-10 && r.omega2.im.abs() < 1e-10);
            }
        }
        // Continuation keeps each branch smooth through the EP.
        for w in rows.windows(2) {
            assert!((w[1].omega1 - w[0].omega1).norm() < 0.25);
            assert!((w[1].omega2 - w[0].omega2).norm() < 0.25);
        }
    }

    proptest! {
        #[test]
        fn vieta_identities(
            wa in -10.0f64..10.0, wm in -10.0f64..10.0,
            ka in -5.0f64..5.0, km in 0.01f64..5.0, g in 0.0f64..5.0,
        ) {
            let m = CoupledModeMatrix::new(wa, ka, wm, km, g);
            let s = eigenvalues(&m);
            let tr = m.p11 + m.p22;
            let det = m.p11 * m.p22 - m.p12 * m.p21;
            let scale = tr.norm().max(1.0);
            prop_assert!((s.omega1 + s.omega2 - tr).norm() < 1e-12 * scale);
            prop_assert!((s.omega1 * s.omega2 - det).norm() < 1e-12 * det.norm().max(1.0));
        }

        #[test]
        fn unbroken_balanced_spectra_are_real(g in 1.0001f64..5.0) {
            let m = CoupledModeMatrix::new(0.0, -1.0, 0.0, 1.0, g);
            let s = eigenvalues(&m);
            prop_assert!(s.omega1.im.abs() < 1e-10);
            prop_assert!(s.omega2.im.abs() < 1e-10);
        }

        #[test]
        fn classification_shift_invariant(
            shift in -20.0f64..20.0, g in 0.0f64..3.0, ka in -3.0f64..3.0,
        ) {
            let m0 = CoupledModeMatrix::new(0.0, ka, 0.0, 1.0, g);
            let m1 = CoupledModeMatrix::new(shift, ka, shift, 1.0, g);
            prop_assert_eq!(classify_phase(&m0, 1e-9), classify_phase(&m1, 1e-9));
        }

        #[test]
        fn similarity_against_dense_eigensolver(
            wa in -3.0f64..3.0, wm in -3.0f64..3.0,
            ka in -2.0f64..2.0, g in 0.1f64..3.0,
        ) {
            // Same eigenvalue multiset as LAPACK, matched greedily.
            let m = CoupledModeMatrix::new(wa, ka, wm, 1.0, g);
            let s = eigenvalues(&m);
            let dense = array![[m.p11, m.p12], [m.p21, m.p22]];
            let (lapack, _) = dense.eig().unwrap();
            let d1 = (lapack[0] - s.omega1).norm() + (lapack[1] - s.omega2).norm();
            let d2 = (lapack[0] - s.omega2).norm() + (lapack[1] - s.omega1).norm();
            prop_assert!(d1.min(d2) < 1e-10);
        }
    }
}
