//! Closed-form second-order response of the flux qutrit: sum-frequency,
//! difference-frequency and second-harmonic susceptibilities, mixing-strength
//! moduli, frequency tunability, and the input-output field amplitude.
//!
//! Public interfaces use ordinary frequencies `nu` in GHz; the `2 pi`
//! converting to angular frequencies is applied inside each formula. All
//! susceptibilities are reported in units of `I_0^3 / (2 pi GHz)^2`, i.e.
//! the printed closed forms with no additional dimensional prefactor. The
//! matching dynamical response (see [`crate::lindblad::chi2_numeric`])
//! carries the drive-coupling scale `(2 pi E_J/h)^2` on top of these units;
//! that single documented factor relates the two conventions.

use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::spectral::TransitionData;

/// Decoherence inputs: pure-dephasing rates `gamma_ii` and off-diagonal
/// decay rates `gamma_ij`, all in GHz (`rate / 2 pi` of the angular value).
///
/// The total coherence-decay rates derive from them as
/// `Gamma21 = gamma12`, `Gamma31 = gamma13 + gamma23 + gamma33`,
/// `Gamma32 = gamma12 + gamma13 + gamma23 + gamma22 + gamma33`, with
/// `Gamma_ij = Gamma_ji`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DecoherenceRates {
    pub gamma11: f64,
    pub gamma22: f64,
    pub gamma33: f64,
    pub gamma12: f64,
    pub gamma13: f64,
    pub gamma23: f64,
}

impl DecoherenceRates {
    /// Defaults matching `Gamma21/2pi = 50 MHz` and `Gamma31/2pi = 30 MHz`:
    /// `gamma12 = 50`, `gamma13 = gamma23 = gamma33 = 10`, `gamma22 = 20`,
    /// `gamma11 = 0` (all MHz here, stored in GHz).
    pub fn reference() -> Self {
        Self {
            gamma11: 0.0,
            gamma22: 0.020,
            gamma33: 0.010,
            gamma12: 0.050,
            gamma13: 0.010,
            gamma23: 0.010,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma11", self.gamma11),
            ("gamma22", self.gamma22),
            ("gamma33", self.gamma33),
            ("gamma12", self.gamma12),
            ("gamma13", self.gamma13),
            ("gamma23", self.gamma23),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "rates",
                    reason: format!("{name} must be finite and >= 0, got {v}"),
                });
            }
        }
        Ok(())
    }

    pub fn gamma21_total(&self) -> f64 {
        self.gamma12
    }

    pub fn gamma31_total(&self) -> f64 {
        self.gamma13 + self.gamma23 + self.gamma33
    }

    pub fn gamma32_total(&self) -> f64 {
        self.gamma12 + self.gamma13 + self.gamma23 + self.gamma22 + self.gamma33
    }

    /// Total coherence-decay rate for the (i, j) pair, 1-based indices.
    pub fn gamma_total(&self, i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (1, 2) => self.gamma21_total(),
            (1, 3) => self.gamma31_total(),
            (2, 3) => self.gamma32_total(),
            _ => panic!("gamma_total: indices must be a pair from {{1,2,3}}"),
        }
    }

    /// Smallest total coherence rate; sets steady-state time scales.
    pub fn gamma_min(&self) -> f64 {
        self.gamma21_total().min(self.gamma31_total()).min(self.gamma32_total())
    }
}

/// Decoherence rates as a function of bias flux. The default
/// treats them as flux-independent; the per-flux hook exists for rate models
/// measured against `f` but nothing in the crate enables it by default.
#[derive(Clone, Copy)]
pub enum RateModel {
    Constant(DecoherenceRates),
    PerFlux(fn(f64) -> DecoherenceRates),
}

impl RateModel {
    pub fn rates_at(&self, f: f64) -> DecoherenceRates {
        match self {
            RateModel::Constant(r) => *r,
            RateModel::PerFlux(hook) => hook(f),
        }
    }
}

impl Default for RateModel {
    fn default() -> Self {
        RateModel::Constant(DecoherenceRates::reference())
    }
}

impl std::fmt::Debug for RateModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RateModel::Constant(r) => f.debug_tuple("Constant").field(r).finish(),
            RateModel::PerFlux(_) => f.write_str("PerFlux(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SusceptibilityKind {
    Sum,
    Difference,
    SecondHarmonic,
}

/// A second-order susceptibility value in units of `I_0^3 / (2 pi GHz)^2`,
/// together with the drive frequencies it was evaluated at.
#[derive(Debug, Clone, Copy)]
pub struct Susceptibility {
    pub value: C64,
    pub kind: SusceptibilityKind,
    pub nu1: f64,
    pub nu2: f64,
}

impl Susceptibility {
    pub fn magnitude(&self) -> f64 {
        self.value.norm()
    }
}

fn check_positive(name: &'static str, nu: f64) -> Result<()> {
    if !nu.is_finite() || nu <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("drive frequency must be finite and > 0, got {nu}"),
        });
    }
    Ok(())
}

/// Sum-frequency susceptibility
/// `chi(w+) = i12 i23 i31 / [(i w1 - i w21 + 2 pi G21)(i w+ - i w31 + 2 pi G31)]`
/// with `w = 2 pi nu` and `w+ = w1 + w2`.
pub fn chi2_sum(
    td: &TransitionData,
    rates: &DecoherenceRates,
    nu1: f64,
    nu2: f64,
) -> Result<Susceptibility> {
    check_positive("nu1", nu1)?;
    check_positive("nu2", nu2)?;
    rates.validate()?;
    let nu_plus = nu1 + nu2;
    let d1 = C64::new(TAU * rates.gamma21_total(), TAU * (nu1 - td.omega21));
    let d2 = C64::new(TAU * rates.gamma31_total(), TAU * (nu_plus - td.omega31));
    Ok(Susceptibility {
        value: td.cyclic_product() / (d1 * d2),
        kind: SusceptibilityKind::Sum,
        nu1,
        nu2,
    })
}

/// Difference-frequency susceptibility
/// `chi(w-) = i13 i21 i32 / [(i w- - i w21 + 2 pi G21)(i w1 - i w31 + 2 pi G31)]`
/// with `w- = w2 - w1`; requires `nu2 > nu1 > 0`.
///
/// `nu1 = nu2` is accepted as the zero-frequency limit of the same printed
/// form (`w- = 0`); callers wanting strict difference generation should keep
/// `nu2 > nu1`.
pub fn chi2_diff(
    td: &TransitionData,
    rates: &DecoherenceRates,
    nu1: f64,
    nu2: f64,
) -> Result<Susceptibility> {
    check_positive("nu1", nu1)?;
    check_positive("nu2", nu2)?;
    rates.validate()?;
    if nu2 < nu1 {
        return Err(Error::InvalidParameter {
            name: "nu2",
            reason: format!("difference generation needs nu2 >= nu1, got nu1={nu1}, nu2={nu2}"),
        });
    }
    let nu_minus = nu2 - nu1;
    let d1 = C64::new(TAU * rates.gamma21_total(), TAU * (nu_minus - td.omega21));
    let d2 = C64::new(TAU * rates.gamma31_total(), TAU * (nu1 - td.omega31));
    Ok(Susceptibility {
        value: td.i13 * td.i21() * td.i32() / (d1 * d2),
        kind: SusceptibilityKind::Difference,
        nu1,
        nu2,
    })
}

/// Second-harmonic point: anharmonicity `delta = nu31/2 - nu21` (GHz) and
/// the susceptibility at the harmonic drive `nu1 = nu2 = nu31/2`,
/// `chi(2 wbar) = i12 i23 i31 / [(i 2 pi delta + 2 pi G12) 2 pi G13]`,
/// whose modulus is `|i12 i23 i31| / [2 pi G13 sqrt((2 pi delta)^2 + (2 pi G12)^2)]`.
pub fn chi2_shg(td: &TransitionData, rates: &DecoherenceRates) -> Result<(f64, Susceptibility)> {
    rates.validate()?;
    let delta = td.omega31 / 2.0 - td.omega21;
    let nu_bar = td.omega31 / 2.0;
    let denom = C64::new(TAU * rates.gamma21_total(), TAU * delta)
        * C64::new(TAU * rates.gamma31_total(), 0.0);
    Ok((
        delta,
        Susceptibility {
            value: td.cyclic_product() / denom,
            kind: SusceptibilityKind::SecondHarmonic,
            nu1: nu_bar,
            nu2: nu_bar,
        },
    ))
}

/// Mixing-strength moduli in `I_0` units: cyclic product `R`, sum-output
/// product `R1`, difference-output product `R2`.
#[derive(Debug, Clone, Copy)]
pub struct MixingModuli {
    /// `|i12 i23 i31|`
    pub r: f64,
    /// `|i21 i32|`
    pub r1: f64,
    /// `|i13 i32|`
    pub r2: f64,
}

pub fn mixing_moduli(td: &TransitionData) -> MixingModuli {
    MixingModuli {
        r: td.cyclic_product().norm(),
        r1: (td.i21() * td.i32()).norm(),
        r2: (td.i13 * td.i32()).norm(),
    }
}

/// Output-field amplitude of the sum-frequency signal on a transmission
/// line coupled through the 1-3 decay channel, vacuum input assumed:
///
/// ```text
/// amplitude = - sqrt(2 pi gamma13) * i21 * i32 * phi1 * phi2 * (2 pi E_J/h)^2
///             / [(i w21 - i w1 + 2 pi G21)(i w31 - i w+ + 2 pi G31)]
/// ```
///
/// with `w = 2 pi nu`, drives `phi1`, `phi2` in `Phi_0` units and
/// `ej_over_h = E_J/h` in GHz. This exact expression (including the stated
/// placement of every `2 pi`) is the crate's unit convention for the
/// emitted field; it is linear in each drive and scales as the square root
/// of the decay rate `gamma13`.
#[allow(clippy::too_many_arguments)]
pub fn output_field_sum(
    td: &TransitionData,
    rates: &DecoherenceRates,
    gamma13: f64,
    ej_over_h: f64,
    phi1: f64,
    phi2: f64,
    nu1: f64,
    nu2: f64,
) -> Result<C64> {
    check_positive("nu1", nu1)?;
    check_positive("nu2", nu2)?;
    rates.validate()?;
    if gamma13 < 0.0 || phi1 < 0.0 || phi2 < 0.0 {
        return Err(Error::InvalidParameter {
            name: "output_field_sum",
            reason: "gamma13 and drive amplitudes must be >= 0".into(),
        });
    }
    let nu_plus = nu1 + nu2;
    let d1 = C64::new(TAU * rates.gamma21_total(), TAU * (td.omega21 - nu1));
    let d2 = C64::new(TAU * rates.gamma31_total(), TAU * (td.omega31 - nu_plus));
    let scale = (TAU * gamma13).sqrt() * phi1 * phi2 * (TAU * ej_over_h).powi(2);
    Ok(-scale * td.i21() * td.i32() / (d1 * d2))
}

/// Largest excursions of the three transition frequencies from their
/// optimal-point values over a flux interval, `(delta31, delta21, delta32)`
/// in GHz. Each entry is the maximal magnitude of
/// `nu_ij(f) - nu_ij(f = 0.5)`; the 3-2 transition softens away from the
/// optimal point, so its excursion is negative and the magnitude is what
/// quantifies tunability.
pub fn tunability<'a>(
    reference: &TransitionData,
    points: impl IntoIterator<Item = &'a TransitionData>,
) -> (f64, f64, f64) {
    let (mut d31, mut d21, mut d32) = (0.0f64, 0.0f64, 0.0f64);
    for td in points {
        d31 = d31.max((td.omega31 - reference.omega31).abs());
        d21 = d21.max((td.omega21 - reference.omega21).abs());
        d32 = d32.max((td.omega32 - reference.omega32).abs());
    }
    (d31, d21, d32)
}
