//! Static operators of the three-junction flux circuit in a truncated
//! two-dimensional charge (plane-wave) basis.
//!
//! The loop carries two identical junctions (Josephson energy `E_J`,
//! capacitance `C_J`) and one smaller junction (`alpha * E_J`,
//! `alpha * C_J`), threaded by a reduced bias flux `f`. In the symmetric
//! and antisymmetric phase coordinates the potential is
//!
//! ```text
//! U = 2 E_J (1 - cos phi_p cos phi_m) + alpha E_J [1 - cos(2 pi f + 2 phi_m)]
//! ```
//!
//! and the kinetic energy is diagonal in the conjugate charge indices
//! `(n, m)`. Single-valuedness of the wavefunction in the junction phases
//! admits only plane waves with `n ≡ m (mod 2)`; that sector is closed
//! under every coupling stencil below and contains the ground state.
//!
//! All energies are stored as `E/h` in GHz. The charging energy follows the
//! `E_c = e^2 / (2 C_J)` convention, so the kinetic diagonal reads
//! `2 E_c n^2 + [2 E_c / (1 + 2 alpha)] m^2`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Physical circuit record.
///
/// `f` is the reduced bias flux `Phi_e / Phi_0`. Values outside `[0, 1]`
/// are folded into the unit cell when building flux phases, which makes the
/// operators exactly 1-periodic in `f`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CircuitParams {
    /// Josephson energy over Planck constant, GHz.
    pub ej_over_h: f64,
    /// Ratio of the small junction to the two identical ones.
    pub alpha: f64,
    /// Dimensionless ratio `E_J / E_c` with `E_c = e^2 / (2 C_J)`.
    pub ej_over_ec: f64,
    /// Reduced bias flux `Phi_e / Phi_0`.
    pub f: f64,
}

impl CircuitParams {
    /// Reference parameters used throughout: `E_J/h = 192` GHz,
    /// `E_J/E_c = 48`, `alpha = 0.8`, biased at the optimal point.
    pub fn reference() -> Self {
        Self { ej_over_h: 192.0, alpha: 0.8, ej_over_ec: 48.0, f: 0.5 }
    }

    pub fn with_f(self, f: f64) -> Self {
        Self { f, ..self }
    }

    /// Charging energy `E_c/h` in GHz.
    pub fn ec_over_h(&self) -> f64 {
        self.ej_over_h / self.ej_over_ec
    }

    /// Hard validation: positive energies, finite fields.
    pub fn validate(&self) -> Result<()> {
        if !self.ej_over_h.is_finite() || self.ej_over_h <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "ej_over_h",
                reason: format!("must be finite and > 0, got {}", self.ej_over_h),
            });
        }
        if !self.ej_over_ec.is_finite() || self.ej_over_ec <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "ej_over_ec",
                reason: format!("must be finite and > 0, got {}", self.ej_over_ec),
            });
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("must be finite and >= 0, got {}", self.alpha),
            });
        }
        if !self.f.is_finite() {
            return Err(Error::InvalidParameter {
                name: "f",
                reason: "must be finite".into(),
            });
        }
        Ok(())
    }

    /// Soft range advice. The device design assumes `0.5 < alpha < 1` and a
    /// reduced flux inside one unit cell.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !(self.alpha > 0.5 && self.alpha < 1.0) {
            w.push(format!(
                "alpha = {} outside the design range 0.5 < alpha < 1",
                self.alpha
            ));
        }
        if !(0.0..=1.0).contains(&self.f) {
            w.push(format!(
                "f = {} outside [0, 1]; operators are periodic and use f mod 1",
                self.f
            ));
        }
        w
    }

    /// Bias flux phase, folded into one period so that `f` and `f + 1`
    /// produce bitwise-identical operators.
    fn flux_phase(&self) -> C64 {
        let f_frac = self.f - self.f.floor();
        C64::from_polar(1.0, 2.0 * PI * f_frac)
    }
}

/// Charge-basis truncation: kept plane waves are pairs `(n, m)` with
/// `|n| <= n_max`, `|m| <= m_max` and `n ≡ m (mod 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BasisSpec {
    pub n_max: i32,
    pub m_max: i32,
}

impl BasisSpec {
    /// Default truncation; the lowest three eigenvalues move by less than
    /// 1e-6 relative when both cutoffs grow by 4 at `E_J/E_c = 48`.
    pub fn default_truncation() -> Self {
        Self { n_max: 12, m_max: 12 }
    }

    pub fn new(n_max: i32, m_max: i32) -> Result<Self> {
        let b = Self { n_max, m_max };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 4 || self.m_max < 4 {
            return Err(Error::TruncationTooSmall {
                n_max: self.n_max,
                m_max: self.m_max,
            });
        }
        Ok(())
    }

    /// Number of kept states.
    pub fn dim(&self) -> usize {
        self.layout().states.len()
    }

    pub(crate) fn layout(&self) -> BasisLayout {
        let mut states = Vec::new();
        for n in -self.n_max..=self.n_max {
            for m in -self.m_max..=self.m_max {
                if (n - m).rem_euclid(2) == 0 {
                    states.push((n, m));
                }
            }
        }
        let index = states
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i))
            .collect();
        BasisLayout { states, index }
    }
}

impl std::fmt::Display for BasisSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(n_max={}, m_max={})", self.n_max, self.m_max)
    }
}

/// Concrete ordering of the kept `(n, m)` states.
pub(crate) struct BasisLayout {
    pub states: Vec<(i32, i32)>,
    pub index: HashMap<(i32, i32), usize>,
}

/// Hermitian operator in the truncated charge basis.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub dim: usize,
    pub entries: DMatrix<C64>,
    pub basis: BasisSpec,
}

impl OperatorMatrix {
    /// Largest deviation from the conjugate transpose, relative to the
    /// Frobenius norm. Zero by construction for the operators built here.
    pub fn hermiticity_defect(&self) -> f64 {
        let norm = self.entries.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..=i {
                let d = (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / norm
    }
}

/// Circuit Hamiltonian `H/h` (GHz) in the truncated charge basis, for the
/// static bias (no time-dependent drive).
///
/// Stencil, with `(n, m)` the source state:
/// - diagonal: `2 E_c n^2 + [2 E_c/(1+2 alpha)] m^2 + 2 E_J + alpha E_J`;
/// - `(n±1, m±1)`: `-E_J/2` (all four sign pairs), from
///   `-2 E_J cos phi_p cos phi_m`;
/// - `(n, m-2)`: `-(alpha E_J/2) e^{+i 2 pi f}` and `(n, m+2)` its
///   conjugate, from `-alpha E_J cos(2 pi f + 2 phi_m)`.
///
/// Couplings that leave the truncation are dropped on both sides, so the
/// result is exactly Hermitian.
pub fn build_hamiltonian(params: &CircuitParams, basis: &BasisSpec) -> Result<OperatorMatrix> {
    params.validate()?;
    basis.validate()?;
    let layout = basis.layout();
    let dim = layout.states.len();
    let ej = params.ej_over_h;
    let ec = params.ec_over_h();
    let alpha = params.alpha;
    let phase = params.flux_phase();

    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for (j, &(n, m)) in layout.states.iter().enumerate() {
        let kinetic = 2.0 * ec * (n as f64).powi(2)
            + 2.0 * ec / (1.0 + 2.0 * alpha) * (m as f64).powi(2);
        h[(j, j)] += C64::new(kinetic + 2.0 * ej + alpha * ej, 0.0);
        for dn in [-1i32, 1] {
            for dm in [-1i32, 1] {
                if let Some(&i) = layout.index.get(&(n + dn, m + dm)) {
                    h[(i, j)] += C64::new(-ej / 2.0, 0.0);
                }
            }
        }
        if let Some(&i) = layout.index.get(&(n, m - 2)) {
            h[(i, j)] += -alpha * ej / 2.0 * phase;
        }
        if let Some(&i) = layout.index.get(&(n, m + 2)) {
            h[(i, j)] += -alpha * ej / 2.0 * phase.conj();
        }
    }
    Ok(OperatorMatrix { dim, entries: h, basis: *basis })
}

/// Loop supercurrent operator in units of `I_0 = 2 pi E_J / Phi_0`:
///
/// ```text
/// I / I_0 = [alpha / (2 alpha + 1)] [sin(2 pi f + 2 phi_m) - 2 sin phi_m cos phi_p]
/// ```
///
/// Stencil, with `c = alpha / (2 alpha + 1)`:
/// - `(n, m-2)`: `-(i c/2) e^{+i 2 pi f}` and `(n, m+2)` its conjugate;
/// - `(n±1, m+1)`: `-i c/2`, `(n±1, m-1)`: `+i c/2`.
///
/// Every diagonal entry is exactly zero.
pub fn build_current_operator(params: &CircuitParams, basis: &BasisSpec) -> Result<OperatorMatrix> {
    params.validate()?;
    basis.validate()?;
    let layout = basis.layout();
    let dim = layout.states.len();
    let c = params.alpha / (2.0 * params.alpha + 1.0);
    let phase = params.flux_phase();
    let i_half = C64::new(0.0, 0.5);

    let mut op = DMatrix::<C64>::zeros(dim, dim);
    for (j, &(n, m)) in layout.states.iter().enumerate() {
        if let Some(&i) = layout.index.get(&(n, m - 2)) {
            op[(i, j)] += -i_half * phase * c;
        }
        if let Some(&i) = layout.index.get(&(n, m + 2)) {
            op[(i, j)] += i_half * phase.conj() * c;
        }
        for dn in [-1i32, 1] {
            if let Some(&i) = layout.index.get(&(n + dn, m + 1)) {
                op[(i, j)] += -i_half * c;
            }
            if let Some(&i) = layout.index.get(&(n + dn, m - 1)) {
                op[(i, j)] += i_half * c;
            }
        }
    }
    Ok(OperatorMatrix { dim, entries: op, basis: *basis })
}

/// Potential energy `U/h` in GHz at a phase-space point.
pub fn eval_potential(params: &CircuitParams, phi_p: f64, phi_m: f64) -> f64 {
    let ej = params.ej_over_h;
    2.0 * ej * (1.0 - phi_p.cos() * phi_m.cos())
        + params.alpha * ej * (1.0 - (2.0 * PI * params.f + 2.0 * phi_m).cos())
}
