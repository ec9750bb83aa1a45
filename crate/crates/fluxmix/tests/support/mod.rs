//! Independent real-space oracle for the charge-basis operators: an
//! 8th-order finite-difference discretization of the circuit Hamiltonian on
//! a periodic phase grid, diagonalized by Lanczos iteration with full
//! reorthogonalization. Shares no code with the plane-wave construction it
//! checks.
//!
//! Wavefunctions live on the (phi_p, phi_m) torus of period 2 pi in each
//! direction and must be symmetric under the half-period shift
//! T: (phi_p, phi_m) -> (phi_p + pi, phi_m + pi), which encodes
//! single-valuedness in the junction phases. The potential commutes with T,
//! so projecting every Lanczos vector onto the symmetric sector keeps the
//! iteration inside it.

use fluxmix::circuit::CircuitParams;
use std::f64::consts::PI;

/// 8th-order central second-difference stencil (coefficient of f(x +- k h),
/// divided by h^2).
const STENCIL: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

pub struct GridOracle {
    pub n: usize,
    h: f64,
    kp: f64,
    km: f64,
    potential: Vec<f64>,
    current: Vec<f64>,
}

impl GridOracle {
    pub fn new(params: &CircuitParams, n: usize) -> Self {
        assert!(n % 2 == 0, "grid must be even for the half-period shift");
        let h = 2.0 * PI / n as f64;
        let ec = params.ec_over_h();
        let mut potential = vec![0.0; n * n];
        let mut current = vec![0.0; n * n];
        let c = params.alpha / (2.0 * params.alpha + 1.0);
        for a in 0..n {
            for b in 0..n {
                let (pp, pm) = (a as f64 * h, b as f64 * h);
                potential[a * n + b] = fluxmix::circuit::eval_potential(params, pp, pm);
                current[a * n + b] =
                    c * ((2.0 * PI * params.f + 2.0 * pm).sin() - 2.0 * pm.sin() * pp.cos());
            }
        }
        GridOracle { n, h, kp: 2.0 * ec, km: 2.0 * ec / (1.0 + 2.0 * params.alpha), potential, current }
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        let inv_h2 = 1.0 / (self.h * self.h);
        for a in 0..n {
            for b in 0..n {
                let mut d2p = STENCIL[0] * x[a * n + b];
                let mut d2m = STENCIL[0] * x[a * n + b];
                for s in 1..=4usize {
                    let ap = (a + s) % n;
                    let am = (a + n - s) % n;
                    let bp = (b + s) % n;
                    let bm = (b + n - s) % n;
                    d2p += STENCIL[s] * (x[ap * n + b] + x[am * n + b]);
                    d2m += STENCIL[s] * (x[a * n + bp] + x[a * n + bm]);
                }
                y[a * n + b] = -self.kp * inv_h2 * d2p - self.km * inv_h2 * d2m
                    + self.potential[a * n + b] * x[a * n + b];
            }
        }
    }

    fn project_symmetric(&self, x: &mut [f64]) {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let ta = (a + n / 2) % n;
                let tb = (b + n / 2) % n;
                if (a, b) < (ta, tb) {
                    let avg = 0.5 * (x[a * n + b] + x[ta * n + tb]);
                    x[a * n + b] = avg;
                    x[ta * n + tb] = avg;
                }
            }
        }
    }

    /// Lowest `k` eigenvalues (GHz) and grid eigenfunctions, normalized so
    /// that `sum psi^2 * h^2 = 1`.
    pub fn lowest(&self, k: usize, iterations: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n2 = self.n * self.n;
        let mut lanczos_vectors: Vec<Vec<f64>> = Vec::with_capacity(iterations);
        let mut alphas = Vec::new();
        let mut betas = Vec::new();

        // deterministic start vector
        let mut seed: u64 = 0x9e3779b97f4a7c15;
        let mut v: Vec<f64> = (0..n2)
            .map(|_| {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        self.project_symmetric(&mut v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);

        let mut w = vec![0.0; n2];
        for j in 0..iterations {
            self.matvec(&v, &mut w);
            self.project_symmetric(&mut w);
            let alpha = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
            alphas.push(alpha);
            for i in 0..n2 {
                w[i] -= alpha * v[i];
            }
            if j > 0 {
                let beta = betas[j - 1];
                let prev = &lanczos_vectors[j - 1];
                for i in 0..n2 {
                    w[i] -= beta * prev[i];
                }
            }
            lanczos_vectors.push(v.clone());
            // full reorthogonalization keeps the basis clean
            for q in &lanczos_vectors {
                let c = q.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
                for i in 0..n2 {
                    w[i] -= c * q[i];
                }
            }
            let beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if beta < 1e-12 {
                break;
            }
            betas.push(beta);
            v = w.iter().map(|x| x / beta).collect();
        }

        let m = alphas.len();
        let mut tri = nalgebra::DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            tri[(i, i)] = alphas[i];
            if i + 1 < m {
                tri[(i, i + 1)] = betas[i];
                tri[(i + 1, i)] = betas[i];
            }
        }
        let eig = tri.symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

        let mut values = Vec::with_capacity(k);
        let mut vectors = Vec::with_capacity(k);
        for &idx in order.iter().take(k) {
            values.push(eig.eigenvalues[idx]);
            let mut ritz = vec![0.0; n2];
            for (j, q) in lanczos_vectors.iter().enumerate() {
                let c = eig.eigenvectors[(j, idx)];
                for i in 0..n2 {
                    ritz[i] += c * q[i];
                }
            }
            let norm = (ritz.iter().map(|x| x * x).sum::<f64>() * self.h * self.h).sqrt();
            ritz.iter_mut().for_each(|x| *x /= norm);
            vectors.push(ritz);
        }
        (values, vectors)
    }

    /// Quadrature of the normalized loop current between two grid
    /// eigenfunctions (trapezoid on the periodic grid is exact to machine
    /// precision for smooth integrands): `<psi_a| I/I_0 |psi_b>`.
    pub fn current_element(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.n * self.n {
            sum += a[i] * self.current[i] * b[i];
        }
        sum * self.h * self.h
    }
}
