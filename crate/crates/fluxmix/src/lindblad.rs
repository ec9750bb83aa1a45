//! Direct numerical integration of the three-level master equation under
//! rotating-wave drives, and Fourier extraction of the steady oscillation.
//! This is the dynamical cross-check for every closed form in
//! [`crate::response`].
//!
//! The equations of motion are the component block
//!
//! ```text
//! d rho_ij / dt = -i [H_T, rho]_ij - Gamma_ij (rho_ij - rhobar_ij),   i != j
//! d rho_11 / dt = -i [H_T, rho]_11 + gamma12 (rho_22 - rhobar_22) + gamma13 (rho_33 - rhobar_33)
//! d rho_22 / dt = -i [H_T, rho]_22 - gamma12 (rho_22 - rhobar_22) + gamma23 (rho_33 - rhobar_33)
//! d rho_33 / dt = -i [H_T, rho]_33 - (gamma13 + gamma23) (rho_33 - rhobar_33)
//! ```
//!
//! with the thermal state `rhobar = |1><1|` (all transition energies far
//! above `k_B T`) and every rate entering as `2 pi` times its GHz value.
//! The off-diagonal relaxation uses the full coherence rate `Gamma_ij`:
//! that convention makes the printed susceptibility denominators
//! `(i w - i w_ij + 2 pi Gamma_ij)` the exact weak-drive limit of this
//! integrator, which is the whole point of the cross-check.
//!
//! `H_T` is diagonal in the energy eigenbasis plus the rotating-wave drive:
//! element `(i, j)` of the drive is `i_ij * phi * (2 pi E_J/h) * e^{i w t}`
//! in GHz, plus the conjugate entries.

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::response::{DecoherenceRates, Susceptibility, SusceptibilityKind};
use crate::spectral::TransitionData;

/// 3x3 density matrix with trace/Hermiticity/positivity invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3(pub Matrix3<C64>);

impl DensityMatrix3 {
    /// Thermal state `|1><1|`: the ground state holds all population.
    pub fn ground() -> Self {
        let mut m = Matrix3::zeros();
        m[(0, 0)] = C64::new(1.0, 0.0);
        DensityMatrix3(m)
    }

    /// Pure state `|k><k|`, `k` 1-based.
    pub fn level(k: usize) -> Self {
        assert!((1..=3).contains(&k));
        let mut m = Matrix3::zeros();
        m[(k - 1, k - 1)] = C64::new(1.0, 0.0);
        DensityMatrix3(m)
    }

    pub fn trace(&self) -> C64 {
        self.0[(0, 0)] + self.0[(1, 1)] + self.0[(2, 2)]
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..=i {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Structural invariants: finite entries, Hermitian within 1e-10, unit
    /// trace within 1e-9, eigenvalues above -1e-9.
    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        if self.hermiticity_defect() > 1e-10 {
            return Err(Error::InvalidDensityMatrix(format!(
                "hermiticity defect {:.3e}",
                self.hermiticity_defect()
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -1e-9 {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }
}

/// Which pair of rotating-wave drives is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveKind {
    /// Drive 1 on the 1-2 transition, drive 2 on the 2-3 transition;
    /// the mixed output is the 3-1 coherence at `nu1 + nu2`.
    SumConfig,
    /// Drive 1 on the 1-3 transition, drive 2 on the 2-3 transition;
    /// the mixed output is the 2-1 coherence at `nu1 - nu2`.
    DifferenceConfig,
}

/// Rotating-wave drive specification. Amplitudes are flux amplitudes in
/// `Phi_0` units; `ej_over_h` (GHz) sets the coupling scale of each drive
/// element `i_ij * phi * (2 pi E_J/h)`.
#[derive(Debug, Clone, Copy)]
pub struct DriveSpec {
    pub kind: DriveKind,
    pub phi1: f64,
    pub phi2: f64,
    /// GHz.
    pub nu1: f64,
    /// GHz.
    pub nu2: f64,
    /// GHz.
    pub ej_over_h: f64,
}

impl DriveSpec {
    pub fn validate(&self) -> Result<()> {
        if self.phi1 < 0.0 || self.phi2 < 0.0 {
            return Err(Error::InvalidParameter {
                name: "drive amplitudes",
                reason: format!("must be >= 0, got ({}, {})", self.phi1, self.phi2),
            });
        }
        if self.nu1 <= 0.0 || self.nu2 <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "drive frequencies",
                reason: format!("must be > 0, got ({}, {})", self.nu1, self.nu2),
            });
        }
        if self.ej_over_h <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "ej_over_h",
                reason: "must be > 0".into(),
            });
        }
        Ok(())
    }

    /// Largest drive frequency, for step-size validation.
    pub fn nu_max(&self) -> f64 {
        self.nu1.max(self.nu2)
    }

    /// Rabi rates `|i_ij| * phi * 2 pi E_J/h` of the two drive tones, GHz.
    pub fn rabi_rates(&self, td: &TransitionData) -> (f64, f64) {
        let scale = TAU * self.ej_over_h;
        match self.kind {
            DriveKind::SumConfig => {
                (td.i12.norm() * self.phi1 * scale, td.i23.norm() * self.phi2 * scale)
            }
            DriveKind::DifferenceConfig => {
                (td.i13.norm() * self.phi1 * scale, td.i23.norm() * self.phi2 * scale)
            }
        }
    }
}

/// Time derivative of the density matrix under the component equations in
/// the module docs. `t` in ns; the result is in 1/ns.
pub fn rhs(
    rho: &DensityMatrix3,
    t: f64,
    td: &TransitionData,
    rates: &DecoherenceRates,
    drive: Option<&DriveSpec>,
) -> DensityMatrix3 {
    let mut h = Matrix3::<C64>::zeros();
    // Energies enter only through differences; measure from E_1.
    h[(1, 1)] = C64::new(td.omega21, 0.0);
    h[(2, 2)] = C64::new(td.omega31, 0.0);
    if let Some(d) = drive {
        let scale = TAU * d.ej_over_h;
        let tone1 = C64::from_polar(d.phi1 * scale, TAU * d.nu1 * t);
        let tone2 = C64::from_polar(d.phi2 * scale, TAU * d.nu2 * t);
        match d.kind {
            DriveKind::SumConfig => {
                let v12 = td.i12 * tone1;
                let v23 = td.i23 * tone2;
                h[(0, 1)] = v12;
                h[(1, 0)] = v12.conj();
                h[(1, 2)] = v23;
                h[(2, 1)] = v23.conj();
            }
            DriveKind::DifferenceConfig => {
                let v13 = td.i13 * tone1;
                let v23 = td.i23 * tone2;
                h[(0, 2)] = v13;
                h[(2, 0)] = v13.conj();
                h[(1, 2)] = v23;
                h[(2, 1)] = v23.conj();
            }
        }
    }

    let m = &rho.0;
    let comm = h * m - m * h;
    let mut out = comm * C64::new(0.0, -TAU);

    let g21 = TAU * rates.gamma21_total();
    let g31 = TAU * rates.gamma31_total();
    let g32 = TAU * rates.gamma32_total();
    out[(0, 1)] -= g21 * m[(0, 1)];
    out[(1, 0)] -= g21 * m[(1, 0)];
    out[(0, 2)] -= g31 * m[(0, 2)];
    out[(2, 0)] -= g31 * m[(2, 0)];
    out[(1, 2)] -= g32 * m[(1, 2)];
    out[(2, 1)] -= g32 * m[(2, 1)];

    // Populations relax toward rhobar = |1><1| (rhobar_22 = rhobar_33 = 0).
    let p22 = m[(1, 1)];
    let p33 = m[(2, 2)];
    out[(0, 0)] += TAU * (rates.gamma12 * p22 + rates.gamma13 * p33);
    out[(1, 1)] += TAU * (-rates.gamma12 * p22 + rates.gamma23 * p33);
    out[(2, 2)] += TAU * (-(rates.gamma13 + rates.gamma23) * p33);

    DensityMatrix3(out)
}

/// Stored output of [`evolve`]: sparse checkpoints over the whole run for
/// invariant monitoring, and a dense tail window for Fourier extraction.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `(t, rho)` at checkpoint times, including the final state.
    pub checkpoints: Vec<(f64, DensityMatrix3)>,
    /// Dense samples over the tail window, one per step.
    pub tail: Vec<DensityMatrix3>,
    /// Time of `tail[0]`, ns.
    pub tail_t0: f64,
    /// Spacing of tail samples, ns.
    pub tail_dt: f64,
    pub t_final: f64,
    pub dt: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix3 {
        &self.checkpoints.last().expect("trajectory has at least one checkpoint").1
    }

    /// Length of the stored dense window, ns.
    pub fn tail_window(&self) -> f64 {
        if self.tail.len() < 2 {
            0.0
        } else {
            (self.tail.len() - 1) as f64 * self.tail_dt
        }
    }
}

/// Integration options beyond the spec'd arguments of [`evolve`].
#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Length of the dense tail window, ns. Clamped to `t_final`.
    pub tail_window: f64,
    /// Number of invariant checkpoints across the run.
    pub checkpoints: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { tail_window: 2.0, checkpoints: 128 }
    }
}

/// Fixed-step fourth-order (classical Runge-Kutta) integration of the
/// component equations from `rho0` to `t_final`.
///
/// `dt` must resolve the fastest frequency present: `dt <= 1/(20 nu_max)`
/// over drive and transition frequencies. Density-matrix invariants are
/// enforced at every checkpoint; a violation aborts with a step-size
/// diagnostic.
pub fn evolve(
    rho0: &DensityMatrix3,
    td: &TransitionData,
    rates: &DecoherenceRates,
    drive: Option<&DriveSpec>,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    evolve_with(rho0, td, rates, drive, t_final, dt, EvolveOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn evolve_with(
    rho0: &DensityMatrix3,
    td: &TransitionData,
    rates: &DecoherenceRates,
    drive: Option<&DriveSpec>,
    t_final: f64,
    dt: f64,
    opts: EvolveOptions,
) -> Result<Trajectory> {
    rho0.validate()?;
    rates.validate()?;
    if let Some(d) = drive {
        d.validate()?;
    }
    if !(dt > 0.0 && t_final > 0.0 && t_final >= dt) {
        return Err(Error::InvalidParameter {
            name: "evolve",
            reason: format!("need 0 < dt <= t_final, got dt={dt}, t_final={t_final}"),
        });
    }
    let nu_max = td
        .omega31
        .abs()
        .max(drive.map(|d| d.nu_max()).unwrap_or(0.0))
        .max(1e-9);
    let limit = 1.0 / (20.0 * nu_max);
    if dt > limit {
        return Err(Error::StepTooLarge { dt, nu_max, limit });
    }

    let n_steps = (t_final / dt).round().max(1.0) as usize;
    let cp_stride = (n_steps / opts.checkpoints.max(1)).max(1);
    let tail_window = opts.tail_window.min(t_final);
    let tail_steps = ((tail_window / dt).floor() as usize).min(n_steps);
    let tail_start_step = n_steps - tail_steps;

    let mut m = rho0.0;
    let mut checkpoints = Vec::with_capacity(opts.checkpoints + 2);
    let mut tail = Vec::with_capacity(tail_steps + 1);
    checkpoints.push((0.0, DensityMatrix3(m)));
    if tail_start_step == 0 {
        tail.push(DensityMatrix3(m));
    }

    let half = dt / 2.0;
    let sixth = dt / 6.0;
    for step in 0..n_steps {
        let t = step as f64 * dt;
        let k1 = rhs(&DensityMatrix3(m), t, td, rates, drive).0;
        let k2 = rhs(&DensityMatrix3(m + k1 * C64::new(half, 0.0)), t + half, td, rates, drive).0;
        let k3 = rhs(&DensityMatrix3(m + k2 * C64::new(half, 0.0)), t + half, td, rates, drive).0;
        let k4 = rhs(&DensityMatrix3(m + k3 * C64::new(dt, 0.0)), t + dt, td, rates, drive).0;
        m += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(sixth, 0.0);

        let step1 = step + 1;
        if step1 >= tail_start_step {
            tail.push(DensityMatrix3(m));
        }
        if step1 % cp_stride == 0 || step1 == n_steps {
            let state = DensityMatrix3(m);
            let t1 = step1 as f64 * dt;
            state.validate().map_err(|e| Error::IntegrationInvariant {
                t: t1,
                detail: e.to_string(),
                dt,
            })?;
            checkpoints.push((t1, state));
        }
    }

    Ok(Trajectory {
        checkpoints,
        tail,
        tail_t0: tail_start_step as f64 * dt,
        tail_dt: dt,
        t_final: n_steps as f64 * dt,
        dt,
    })
}

/// Project the stored tail samples of `rho_ij(t)` onto `e^{-i 2 pi nu t}`
/// over an integer number of periods at the end of the window: the returned
/// amplitude `A` satisfies `rho_ij(t) ~= A e^{-i 2 pi nu t}` for a
/// steady single-tone signal. `element` is 1-based `(i, j)`.
pub fn extract_component(traj: &Trajectory, element: (usize, usize), nu: f64) -> Result<C64> {
    let (i, j) = element;
    assert!((1..=3).contains(&i) && (1..=3).contains(&j), "element indices are 1-based");
    if nu <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "nu",
            reason: format!("extraction frequency must be > 0, got {nu}"),
        });
    }
    let window = traj.tail_window();
    let periods = (window * nu).floor();
    if periods < 1.0 || traj.tail.len() < 2 {
        return Err(Error::WindowTooShort { window, nu });
    }
    let span = periods / nu;
    let n = ((span / traj.tail_dt).round() as usize).clamp(2, traj.tail.len());
    let start = traj.tail.len() - n;
    let mut acc = C64::new(0.0, 0.0);
    for (k, sample) in traj.tail[start..].iter().enumerate() {
        let t = traj.tail_t0 + (start + k) as f64 * traj.tail_dt;
        acc += sample.0[(i - 1, j - 1)] * C64::from_polar(1.0, TAU * nu * t);
    }
    Ok(acc / n as f64)
}

/// Options for [`chi2_numeric`].
#[derive(Debug, Clone, Copy)]
pub struct Chi2NumericOptions {
    /// Integration steps per period of the fastest frequency.
    pub steps_per_period: f64,
    /// Simulated time in units of `1/Gamma_min`; steady oscillation needs
    /// the transient fully decayed.
    pub lifetimes: f64,
    /// Re-run with a doubled drive and reject if the extracted component is
    /// not bilinear within 1%.
    pub check_bilinearity: bool,
}

impl Default for Chi2NumericOptions {
    fn default() -> Self {
        Self { steps_per_period: 128.0, lifetimes: 10.0, check_bilinearity: false }
    }
}

/// Second-order susceptibility extracted from the integrated dynamics, in
/// the same units and frequency convention as the closed forms:
///
/// - sum configuration: drives `(nu1, nu2)` on the 1-2 / 2-3 transitions;
///   output coherence `rho_31` at `nu1 + nu2`; comparable to
///   [`crate::response::chi2_sum`] at `(nu1, nu2)`.
/// - difference configuration: drives `(nu1, nu2)` on the 1-3 / 2-3
///   transitions with `nu1 > nu2`; output coherence `rho_21` at
///   `nu1 - nu2`; comparable to [`crate::response::chi2_diff`] at formula
///   coordinates `(nu1, 2 nu1 - nu2)`, which label the same detunings.
///
/// The extracted polarization component is divided by `phi1 phi2` and by
/// the documented bridge factor `(2 pi)^2 (2 pi E_J/h)^2` (with one
/// conjugation and sign fixing the analysis convention), which lands it in
/// closed-form units.
pub fn chi2_numeric(
    td: &TransitionData,
    rates: &DecoherenceRates,
    drive: &DriveSpec,
    opts: Chi2NumericOptions,
) -> Result<Susceptibility> {
    drive.validate()?;
    rates.validate()?;
    if drive.phi1 == 0.0 || drive.phi2 == 0.0 {
        return Err(Error::InvalidParameter {
            name: "drive amplitudes",
            reason: "chi2_numeric needs both drives on".into(),
        });
    }
    let gamma_min = rates.gamma_min();
    if gamma_min <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "rates",
            reason: "chi2_numeric needs a positive decoherence floor".into(),
        });
    }
    let (rabi1, rabi2) = drive.rabi_rates(td);
    let ceiling = gamma_min / 20.0;
    if rabi1 > ceiling || rabi2 > ceiling {
        return Err(Error::RegimeViolation {
            detail: format!(
                "Rabi rates ({rabi1:.3e}, {rabi2:.3e}) GHz exceed Gamma_min/20 = {ceiling:.3e} GHz"
            ),
        });
    }

    let (nu_out, element, overlap, kind, report_nu) = match drive.kind {
        DriveKind::SumConfig => {
            let nu_out = drive.nu1 + drive.nu2;
            (nu_out, (3, 1), td.i13, SusceptibilityKind::Sum, (drive.nu1, drive.nu2))
        }
        DriveKind::DifferenceConfig => {
            if drive.nu1 <= drive.nu2 {
                return Err(Error::InvalidParameter {
                    name: "drive frequencies",
                    reason: format!(
                        "difference configuration needs nu1 > nu2, got ({}, {})",
                        drive.nu1, drive.nu2
                    ),
                });
            }
            let nu_out = drive.nu1 - drive.nu2;
            (
                nu_out,
                (2, 1),
                td.i12,
                SusceptibilityKind::Difference,
                (drive.nu1, 2.0 * drive.nu1 - drive.nu2),
            )
        }
    };

    let raw = extract_polarization(td, rates, drive, nu_out, element, opts)?;
    if opts.check_bilinearity {
        let doubled = DriveSpec { phi1: 2.0 * drive.phi1, ..*drive };
        let raw2 = extract_polarization(td, rates, &doubled, nu_out, element, opts)?;
        let ratio = raw2.norm() / raw.norm();
        if (ratio - 2.0).abs() > 0.02 {
            return Err(Error::RegimeViolation {
                detail: format!("extracted component not bilinear: x2 drive gave x{ratio:.4}"),
            });
        }
    }

    let chi_raw = raw * overlap / (drive.phi1 * drive.phi2);
    let bridge = (TAU * drive.ej_over_h).powi(2) * TAU * TAU;
    Ok(Susceptibility {
        value: -chi_raw.conj() / bridge,
        kind,
        nu1: report_nu.0,
        nu2: report_nu.1,
    })
}

fn extract_polarization(
    td: &TransitionData,
    rates: &DecoherenceRates,
    drive: &DriveSpec,
    nu_out: f64,
    element: (usize, usize),
    opts: Chi2NumericOptions,
) -> Result<C64> {
    let nu_max = drive.nu_max().max(td.omega31.abs()).max(nu_out);
    let dt = 1.0 / (opts.steps_per_period * nu_max);
    let t_final = opts.lifetimes / rates.gamma_min();
    let tail_window = (200.0 / nu_out).clamp(1.0, 8.0).min(0.2 * t_final);
    let traj = evolve_with(
        &DensityMatrix3::ground(),
        td,
        rates,
        Some(drive),
        t_final,
        dt,
        EvolveOptions { tail_window, checkpoints: 64 },
    )?;
    extract_component(&traj, element, nu_out)
}
