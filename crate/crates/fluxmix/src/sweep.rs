//! Flux sweeps and operating-point searches over the reduced bias flux:
//! tabulation of spectra, transition elements and susceptibilities, plus
//! golden-section maximization of the mixing strength and bisection for the
//! harmonic-ladder flux points.

use rayon::prelude::*;

use crate::circuit::{build_current_operator, build_hamiltonian, BasisSpec, CircuitParams};
use crate::error::{Error, Result};
use crate::response::{chi2_shg, mixing_moduli, tunability, DecoherenceRates, RateModel};
use crate::spectral::{solve_spectrum, transition_data, SpectrumStatus, TransitionData};

/// Bracket tolerance defaults: 1e-5 in `f`, 1 kHz in the anharmonicity.
pub const F_TOLERANCE: f64 = 1e-5;
pub const DELTA_TOLERANCE_GHZ: f64 = 1e-6;

/// Optional per-row susceptibility columns. The resonant-maximum columns
/// evaluate the closed forms at exact resonance, where both reduce to
/// `R / [(2 pi)^2 G21 G31]`; the second-harmonic column evaluates the
/// printed modulus at the harmonic drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiColumn {
    ShgAbs,
    SumResonantAbs,
    DiffResonantAbs,
}

impl ChiColumn {
    pub fn name(&self) -> &'static str {
        match self {
            ChiColumn::ShgAbs => "chi_shg_abs",
            ChiColumn::SumResonantAbs => "chi_sum_res_abs",
            ChiColumn::DiffResonantAbs => "chi_diff_res_abs",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "chi_shg_abs" => Ok(ChiColumn::ShgAbs),
            "chi_sum_res_abs" => Ok(ChiColumn::SumResonantAbs),
            "chi_diff_res_abs" => Ok(ChiColumn::DiffResonantAbs),
            other => Err(Error::UnknownColumn(other.to_string())),
        }
    }
}

/// One fully evaluated flux point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub f: f64,
    pub energies: [f64; 3],
    pub nu21: f64,
    pub nu31: f64,
    pub nu32: f64,
    pub i12_abs: f64,
    pub i23_abs: f64,
    pub i13_abs: f64,
    pub r: f64,
    pub r1: f64,
    pub r2: f64,
    /// Anharmonicity `nu31/2 - nu21`, GHz.
    pub delta: f64,
    pub status: SpectrumStatus,
    /// Values of the requested optional columns, in request order.
    pub chi: Vec<f64>,
    pub td: TransitionData,
}

/// Rows over a strictly increasing flux grid, plus the request that
/// produced them.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub chi_columns: Vec<ChiColumn>,
}

impl SweepTable {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Fixed column names, then one per optional column, then status.
    pub fn column_names(&self) -> Vec<&'static str> {
        let mut names = vec![
            "f", "e1_ghz", "e2_ghz", "e3_ghz", "nu21_ghz", "nu31_ghz", "nu32_ghz", "i12_abs",
            "i23_abs", "i13_abs", "r", "r1", "r2", "delta_ghz",
        ];
        for c in &self.chi_columns {
            names.push(c.name());
        }
        names.push("status");
        names
    }

    /// Numeric values in column order (status excluded).
    pub fn numeric_row(&self, row: &SweepRow) -> Vec<f64> {
        let mut v = vec![
            row.f,
            row.energies[0],
            row.energies[1],
            row.energies[2],
            row.nu21,
            row.nu31,
            row.nu32,
            row.i12_abs,
            row.i23_abs,
            row.i13_abs,
            row.r,
            row.r1,
            row.r2,
            row.delta,
        ];
        v.extend_from_slice(&row.chi);
        v
    }

    /// Numeric values of a named column across all rows.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let names = self.column_names();
        let idx = names
            .iter()
            .position(|&n| n == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))?;
        if name == "status" {
            return Err(Error::UnknownColumn("status is not numeric".to_string()));
        }
        Ok(self.rows.iter().map(|r| self.numeric_row(r)[idx]).collect())
    }
}

/// Evaluate one flux point: Hamiltonian + current operator construction,
/// three-level solve, transition data, moduli and requested chi columns.
pub fn evaluate_point(
    template: &CircuitParams,
    basis: &BasisSpec,
    rates: &DecoherenceRates,
    f: f64,
    chi_columns: &[ChiColumn],
) -> Result<SweepRow> {
    let params = template.with_f(f);
    let h = build_hamiltonian(&params, basis)?;
    let i_op = build_current_operator(&params, basis)?;
    let spec = solve_spectrum(&h, &params, 3)?;
    let td = transition_data(&spec, &i_op)?;
    let moduli = mixing_moduli(&td);
    let delta = td.omega31 / 2.0 - td.omega21;
    let mut chi = Vec::with_capacity(chi_columns.len());
    for col in chi_columns {
        let v = match col {
            ChiColumn::ShgAbs => chi2_shg(&td, rates)?.1.magnitude(),
            ChiColumn::SumResonantAbs | ChiColumn::DiffResonantAbs => {
                moduli.r
                    / (std::f64::consts::TAU
                        * std::f64::consts::TAU
                        * rates.gamma21_total()
                        * rates.gamma31_total())
            }
        };
        chi.push(v);
    }
    Ok(SweepRow {
        f,
        energies: [spec.energies[0], spec.energies[1], spec.energies[2]],
        nu21: td.omega21,
        nu31: td.omega31,
        nu32: td.omega32,
        i12_abs: td.i12.norm(),
        i23_abs: td.i23.norm(),
        i13_abs: td.i13.norm(),
        r: moduli.r,
        r1: moduli.r1,
        r2: moduli.r2,
        delta,
        status: spec.status,
        chi,
        td,
    })
}

/// Sweep the flux over `steps` evenly spaced points in `[f_min, f_max]`.
/// Rows are evaluated independently (parallel map) and returned in grid
/// order; identical inputs produce identical tables.
pub fn sweep(
    template: &CircuitParams,
    basis: &BasisSpec,
    rates: &DecoherenceRates,
    f_min: f64,
    f_max: f64,
    steps: usize,
    chi_columns: &[ChiColumn],
) -> Result<SweepTable> {
    sweep_with_rates(template, basis, &RateModel::Constant(*rates), f_min, f_max, steps, chi_columns)
}

/// [`sweep`] with a per-flux rate model; the constant model is the default
/// everywhere else in the crate.
pub fn sweep_with_rates(
    template: &CircuitParams,
    basis: &BasisSpec,
    rates: &RateModel,
    f_min: f64,
    f_max: f64,
    steps: usize,
    chi_columns: &[ChiColumn],
) -> Result<SweepTable> {
    if steps < 2 {
        return Err(Error::BadSweep(format!("steps must be >= 2, got {steps}")));
    }
    if !(f_min <= f_max) {
        return Err(Error::BadSweep(format!("need f_min <= f_max, got [{f_min}, {f_max}]")));
    }
    let grid: Vec<f64> = (0..steps)
        .map(|k| f_min + (f_max - f_min) * k as f64 / (steps - 1) as f64)
        .collect();
    let rows: Result<Vec<SweepRow>> = grid
        .par_iter()
        .map(|&f| evaluate_point(template, basis, &rates.rates_at(f), f, chi_columns))
        .collect();
    Ok(SweepTable { rows: rows?, chi_columns: chi_columns.to_vec() })
}

/// Result of a one-dimensional operating-point search.
#[derive(Debug, Clone, Copy)]
pub struct SearchResult {
    pub f_star: f64,
    pub objective: f64,
    pub bracket_width: f64,
    pub iterations: usize,
}

/// Golden-section maximization of the mixing strength `R(f)` inside a
/// bracket that contains exactly one interior maximum.
pub fn find_r_max(
    template: &CircuitParams,
    basis: &BasisSpec,
    bracket: (f64, f64),
    tol: f64,
) -> Result<SearchResult> {
    let r_of = |f: f64| -> Result<f64> {
        let params = template.with_f(f);
        let h = build_hamiltonian(&params, basis)?;
        let i_op = build_current_operator(&params, basis)?;
        let spec = solve_spectrum(&h, &params, 3)?;
        Ok(mixing_moduli(&transition_data(&spec, &i_op)?).r)
    };
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || tol <= 0.0 {
        return Err(Error::BadBracket {
            lo,
            hi,
            reason: "need lo < hi and tol > 0".to_string(),
        });
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = r_of(a)?;
    let mut fb = r_of(b)?;
    let (r_lo, r_hi) = (r_of(lo)?, r_of(hi)?);
    if fa.max(fb) <= r_lo.max(r_hi) {
        let f = if r_lo > r_hi { lo } else { hi };
        return Err(Error::BoundaryMaximum { f });
    }
    let mut iterations = 0usize;
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = r_of(b)?;
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = r_of(a)?;
        }
        iterations += 1;
        if iterations > 200 {
            break;
        }
    }
    let (f_star, objective) = if fa > fb { (a, fa) } else { (b, fb) };
    Ok(SearchResult { f_star, objective, bracket_width: hi - lo, iterations })
}

/// Bisection for a harmonic-ladder flux point: the root of the
/// anharmonicity `delta(f) = nu31/2 - nu21` inside a sign-changing bracket,
/// refined until the bracket is narrower than `tol` and `|delta|` is below
/// [`DELTA_TOLERANCE_GHZ`].
pub fn find_harmonic_flux(
    template: &CircuitParams,
    basis: &BasisSpec,
    bracket: (f64, f64),
    tol: f64,
) -> Result<SearchResult> {
    let delta_of = |f: f64| -> Result<f64> {
        let params = template.with_f(f);
        let h = build_hamiltonian(&params, basis)?;
        let spec = solve_spectrum(&h, &params, 3)?;
        let nu21 = spec.energies[1] - spec.energies[0];
        let nu31 = spec.energies[2] - spec.energies[0];
        Ok(nu31 / 2.0 - nu21)
    };
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || tol <= 0.0 {
        return Err(Error::BadBracket { lo, hi, reason: "need lo < hi and tol > 0".to_string() });
    }
    let mut d_lo = delta_of(lo)?;
    let d_hi = delta_of(hi)?;
    if d_lo == 0.0 {
        return Ok(SearchResult { f_star: lo, objective: 0.0, bracket_width: 0.0, iterations: 0 });
    }
    if d_hi == 0.0 {
        return Ok(SearchResult { f_star: hi, objective: 0.0, bracket_width: 0.0, iterations: 0 });
    }
    if d_lo * d_hi > 0.0 {
        return Err(Error::NoSignChange { lo, hi, d_lo, d_hi });
    }
    let mut mid = 0.5 * (lo + hi);
    let mut d_mid = delta_of(mid)?;
    let mut iterations = 1usize;
    while (hi - lo > tol || d_mid.abs() > DELTA_TOLERANCE_GHZ) && iterations < 200 {
        if d_lo * d_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            d_lo = d_mid;
        }
        mid = 0.5 * (lo + hi);
        d_mid = delta_of(mid)?;
        iterations += 1;
    }
    Ok(SearchResult {
        f_star: mid,
        objective: d_mid,
        bracket_width: hi - lo,
        iterations,
    })
}

/// Frequency tunability over a flux interval: sweep the grid, reference the
/// optimal point `f = 0.5` exactly, and report the largest excursions
/// `(delta31, delta21, delta32)` in GHz.
pub fn tunability_report(
    template: &CircuitParams,
    basis: &BasisSpec,
    rates: &DecoherenceRates,
    f_min: f64,
    f_max: f64,
    steps: usize,
) -> Result<(f64, f64, f64)> {
    if f_min == f_max {
        return Ok((0.0, 0.0, 0.0));
    }
    let reference = evaluate_point(template, basis, rates, 0.5, &[])?.td;
    let table = sweep(template, basis, rates, f_min, f_max, steps, &[])?;
    Ok(tunability(&reference, table.rows.iter().map(|r| &r.td)))
}
