//! Dense Hermitian diagonalization of the circuit operators, gauge fixing,
//! and the three-level reduction (transition frequencies and normalized
//! supercurrent matrix elements).

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::circuit::{BasisSpec, CircuitParams, OperatorMatrix};
use crate::error::{Error, Result};

/// Eigenvalue gap below which the lowest levels are treated as degenerate
/// and the eigenvector gauge as unreliable (GHz).
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumStatus {
    Ok,
    /// Two of the returned levels are closer than [`DEGENERACY_THRESHOLD`];
    /// moduli are still meaningful, individual phases are not.
    NearDegenerate,
}

/// Lowest-k eigenpairs of a circuit operator.
///
/// Eigenvalues ascend; each eigenvector is gauge-fixed so its
/// largest-modulus component is real and positive.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues in GHz, ascending.
    pub energies: Vec<f64>,
    /// Matching eigenvectors in the charge basis, one column each.
    pub vectors: Vec<DVector<C64>>,
    pub params: CircuitParams,
    pub basis: BasisSpec,
    pub status: SpectrumStatus,
}

/// Three-level reduction of a spectrum against the supercurrent operator.
///
/// Frequencies are `nu_ij = E_i - E_j` in GHz with `nu31` formed as
/// `nu21 + nu32`, so the additivity identity holds exactly. Elements
/// `i_ij = <i| I |j> / I_0` use the gauge-fixed eigenvectors.
#[derive(Debug, Clone, Copy)]
pub struct TransitionData {
    pub omega21: f64,
    pub omega31: f64,
    pub omega32: f64,
    pub i12: C64,
    pub i23: C64,
    pub i13: C64,
    /// Reduced flux echo.
    pub f: f64,
}

impl TransitionData {
    pub fn i21(&self) -> C64 {
        self.i12.conj()
    }
    pub fn i32(&self) -> C64 {
        self.i23.conj()
    }
    pub fn i31(&self) -> C64 {
        self.i13.conj()
    }

    /// Cyclic product `i12 * i23 * i31` whose modulus governs the
    /// resonant mixing strength.
    pub fn cyclic_product(&self) -> C64 {
        self.i12 * self.i23 * self.i31()
    }
}

/// Lowest-k eigenpairs of a Hermitian operator by dense eigendecomposition.
///
/// `k >= 3` is required by the three-level reduction downstream. Ties
/// closer than [`DEGENERACY_THRESHOLD`] among the returned levels set
/// [`SpectrumStatus::NearDegenerate`].
pub fn solve_spectrum(h: &OperatorMatrix, params: &CircuitParams, k: usize) -> Result<Spectrum> {
    if k < 3 {
        return Err(Error::TooFewLevels { need: 3, got: k });
    }
    if k > h.dim {
        return Err(Error::TooFewLevels { need: k, got: h.dim });
    }
    let eig = h.entries.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let mut energies = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        energies.push(eig.eigenvalues[idx]);
        let mut v = eig.eigenvectors.column(idx).into_owned();
        gauge_fix(&mut v);
        vectors.push(v);
    }

    let mut status = SpectrumStatus::Ok;
    for w in energies.windows(2) {
        if (w[1] - w[0]).abs() < DEGENERACY_THRESHOLD {
            status = SpectrumStatus::NearDegenerate;
        }
    }

    Ok(Spectrum { energies, vectors, params: *params, basis: h.basis, status })
}

/// Rotate a vector by a global phase so its largest-modulus component is
/// real and positive. Ties resolve to the first maximal index, which keeps
/// the result platform-independent.
fn gauge_fix(v: &mut DVector<C64>) {
    let mut best = 0usize;
    let mut best_norm = 0.0f64;
    for (i, c) in v.iter().enumerate() {
        let n = c.norm_sqr();
        if n > best_norm {
            best_norm = n;
            best = i;
        }
    }
    let pivot = v[best];
    let r = pivot.norm();
    if r > 0.0 {
        let phase = pivot.conj() / r;
        for c in v.iter_mut() {
            *c *= phase;
        }
    }
}

/// Three-level reduction: transition frequencies from the lowest three
/// energies and normalized supercurrent elements between the gauge-fixed
/// eigenvectors.
pub fn transition_data(spec: &Spectrum, i_op: &OperatorMatrix) -> Result<TransitionData> {
    if spec.energies.len() < 3 {
        return Err(Error::TooFewLevels { need: 3, got: spec.energies.len() });
    }
    if spec.basis != i_op.basis {
        return Err(Error::BasisMismatch {
            left: spec.basis.to_string(),
            right: i_op.basis.to_string(),
        });
    }
    let element = |a: &DVector<C64>, b: &DVector<C64>| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (i, ai) in a.iter().enumerate() {
            let mut row = C64::new(0.0, 0.0);
            for (j, bj) in b.iter().enumerate() {
                row += i_op.entries[(i, j)] * bj;
            }
            acc += ai.conj() * row;
        }
        acc
    };
    let omega21 = spec.energies[1] - spec.energies[0];
    let omega32 = spec.energies[2] - spec.energies[1];
    Ok(TransitionData {
        omega21,
        omega32,
        omega31: omega21 + omega32,
        i12: element(&spec.vectors[0], &spec.vectors[1]),
        i23: element(&spec.vectors[1], &spec.vectors[2]),
        i13: element(&spec.vectors[0], &spec.vectors[2]),
        f: spec.params.f,
    })
}

/// Lowest-three eigenvalues per truncation, plus the largest relative
/// drift between successive truncations.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub rows: Vec<(BasisSpec, [f64; 3])>,
    pub max_relative_drift: f64,
}

impl ConvergenceReport {
    pub fn render(&self) -> String {
        let mut out = String::from("basis            e1_ghz              e2_ghz              e3_ghz\n");
        for (b, e) in &self.rows {
            out.push_str(&format!(
                "{:<16} {:<19.12} {:<19.12} {:<19.12}\n",
                b.to_string(),
                e[0],
                e[1],
                e[2]
            ));
        }
        out.push_str(&format!("max relative drift: {:.3e}\n", self.max_relative_drift));
        out
    }
}

/// Solve the lowest three levels for each truncation in `basis_list` and
/// report the drift between successive entries.
pub fn convergence_report(
    params: &CircuitParams,
    basis_list: &[BasisSpec],
) -> Result<ConvergenceReport> {
    if basis_list.len() < 2 {
        return Err(Error::TooFewBases { got: basis_list.len() });
    }
    let mut rows = Vec::with_capacity(basis_list.len());
    for basis in basis_list {
        let h = crate::circuit::build_hamiltonian(params, basis)?;
        let spec = solve_spectrum(&h, params, 3)?;
        rows.push((*basis, [spec.energies[0], spec.energies[1], spec.energies[2]]));
    }
    let mut max_drift = 0.0f64;
    for w in rows.windows(2) {
        for i in 0..3 {
            let (a, b) = (w[0].1[i], w[1].1[i]);
            max_drift = max_drift.max((b - a).abs() / b.abs().max(f64::MIN_POSITIVE));
        }
    }
    Ok(ConvergenceReport { rows, max_relative_drift: max_drift })
}
