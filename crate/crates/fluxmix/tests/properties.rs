//! Property tests for the structural invariants: Hermiticity, gauge
//! invariance of moduli, flux-reflection symmetry, susceptibility
//! conjugation, and lossless number formatting.

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use fluxmix::circuit::{build_current_operator, build_hamiltonian, BasisSpec, CircuitParams};
use fluxmix::response::{chi2_sum, DecoherenceRates};
use fluxmix::spectral::{solve_spectrum, transition_data};
use fluxmix::table_io::format_number;

fn params(alpha: f64, f: f64) -> CircuitParams {
    CircuitParams { ej_over_h: 192.0, alpha, ej_over_ec: 48.0, f }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn operators_hermitian_for_any_alpha_and_flux(
        alpha in 0.3f64..1.2,
        f in 0.0f64..1.0,
    ) {
        let basis = BasisSpec { n_max: 5, m_max: 5 };
        let p = params(alpha, f);
        let h = build_hamiltonian(&p, &basis).unwrap();
        let i = build_current_operator(&p, &basis).unwrap();
        prop_assert_eq!(h.hermiticity_defect(), 0.0);
        prop_assert_eq!(i.hermiticity_defect(), 0.0);
    }

    #[test]
    fn eigenvalues_symmetric_under_flux_reflection(f in 0.40f64..0.60) {
        let basis = BasisSpec { n_max: 8, m_max: 8 };
        let pa = params(0.8, f);
        let pb = params(0.8, 1.0 - f);
        let sa = solve_spectrum(&build_hamiltonian(&pa, &basis).unwrap(), &pa, 3).unwrap();
        let sb = solve_spectrum(&build_hamiltonian(&pb, &basis).unwrap(), &pb, 3).unwrap();
        for (a, b) in sa.energies.iter().zip(&sb.energies) {
            prop_assert!((a - b).abs() / a.abs() < 1e-9, "{} vs {}", a, b);
        }
    }

    #[test]
    fn moduli_invariant_under_random_rephasing(
        f in 0.45f64..0.55,
        phases in prop::array::uniform3(0.0f64..std::f64::consts::TAU),
    ) {
        let basis = BasisSpec { n_max: 8, m_max: 8 };
        let p = params(0.8, f);
        let h = build_hamiltonian(&p, &basis).unwrap();
        let i_op = build_current_operator(&p, &basis).unwrap();
        let spec = solve_spectrum(&h, &p, 3).unwrap();
        let td = transition_data(&spec, &i_op).unwrap();

        let mut rephased = spec.clone();
        for (v, &theta) in rephased.vectors.iter_mut().zip(&phases) {
            let phase = C64::from_polar(1.0, theta);
            for c in v.iter_mut() {
                *c *= phase;
            }
        }
        let td2 = transition_data(&rephased, &i_op).unwrap();

        let tol = 1e-12;
        prop_assert!((td.i12.norm() - td2.i12.norm()).abs() < tol);
        prop_assert!((td.i23.norm() - td2.i23.norm()).abs() < tol);
        prop_assert!((td.i13.norm() - td2.i13.norm()).abs() < tol);
        prop_assert!(
            (td.cyclic_product().norm() - td2.cyclic_product().norm()).abs() < tol
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chi_conjugates_when_detunings_flip(
        d1 in -2.0f64..2.0,
        d2 in -2.0f64..2.0,
        g21 in 0.01f64..0.2,
        g31 in 0.01f64..0.2,
    ) {
        let td = fluxmix::spectral::TransitionData {
            omega21: 10.0,
            omega32: 25.0,
            omega31: 35.0,
            i12: C64::new(0.05, 0.01),
            i23: C64::new(0.12, -0.03),
            i13: C64::new(0.002, 0.015),
            f: 0.49,
        };
        let rates = DecoherenceRates {
            gamma12: g21,
            gamma13: g31,
            gamma23: 0.0,
            gamma33: 0.0,
            gamma11: 0.0,
            gamma22: 0.0,
        };
        // keep drive frequencies positive
        prop_assume!(td.omega21 + d1 > 0.1);
        prop_assume!(td.omega32 - d1 + d2 > 0.1);
        prop_assume!(td.omega21 - d1 > 0.1);
        prop_assume!(td.omega32 + d1 - d2 > 0.1);
        let a = chi2_sum(&td, &rates, td.omega21 + d1, td.omega32 - d1 + d2).unwrap();
        let b = chi2_sum(&td, &rates, td.omega21 - d1, td.omega32 + d1 - d2).unwrap();
        let num = td.cyclic_product();
        let ra = a.value / num;
        let rb = b.value / num;
        prop_assert!((ra - rb.conj()).norm() <= 1e-11 * ra.norm().max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn number_format_roundtrips_any_finite(v in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let s = format_number(v);
        prop_assert_eq!(s.parse::<f64>().unwrap(), v);
    }
}
