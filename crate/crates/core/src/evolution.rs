//! Spectral decomposition and unitary propagation.
//!
//! States evolve as psi(t) = Q exp(-i Lambda t) Q^T psi(0) from the
//! eigendecomposition H = Q Lambda Q^T of the real symmetric Hamiltonian.
//! The single-particle propagator is also available in closed form from the
//! plane-wave dispersion, which gives an independent route for cross-checks.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianMatrix;
use crate::lattice::{BasisMap, LatticeSpec, TwoParticleState};

/// Iteration cap for the QL sweeps; typical symmetric problems converge in
/// a handful of iterations per eigenvalue.
const MAX_EIGEN_ITERATIONS: usize = 100_000;

/// Eigendecomposition H = Q Lambda Q^T with eigenvalues sorted ascending.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    /// Orthogonal matrix whose columns are the eigenvectors, aligned with
    /// `eigenvalues`.
    pub eigenvectors: DMatrix<f64>,
    /// The matrix that was decomposed.
    pub source: DMatrix<f64>,
    /// Present when the source was a two-particle Hamiltonian.
    pub basis: Option<Arc<BasisMap>>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Sorted symmetric eigendecomposition of a raw matrix. Shared by the
/// quantum, effective, and waveguide propagators.
pub(crate) fn symmetric_eigen_sorted(m: DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let eig = nalgebra::SymmetricEigen::try_new(m, f64::EPSILON, MAX_EIGEN_ITERATIONS)
        .ok_or(Error::ConvergenceFailure)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let n = order.len();
    let eigenvalues = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((eigenvalues, eigenvectors))
}

/// Propagates complex amplitudes through Q exp(-i Lambda t) Q^T, splitting
/// the state into real and imaginary parts so every matrix product stays in
/// real arithmetic.
pub(crate) fn spectral_propagate(
    eigenvalues: &DVector<f64>,
    eigenvectors: &DMatrix<f64>,
    x0: &DVector<Complex64>,
    times: &[f64],
) -> Vec<DVector<Complex64>> {
    let qt_re = eigenvectors.transpose() * x0.map(|z| z.re);
    let qt_im = eigenvectors.transpose() * x0.map(|z| z.im);
    times
        .iter()
        .map(|&t| {
            let n = eigenvalues.len();
            let mut w_re = DVector::zeros(n);
            let mut w_im = DVector::zeros(n);
            for k in 0..n {
                let (s, c) = (-eigenvalues[k] * t).sin_cos();
                let w = Complex64::new(qt_re[k], qt_im[k]) * Complex64::new(c, s);
                w_re[k] = w.re;
                w_im[k] = w.im;
            }
            let out_re = eigenvectors * w_re;
            let out_im = eigenvectors * w_im;
            DVector::from_fn(eigenvalues.len(), |i, _| {
                Complex64::new(out_re[i], out_im[i])
            })
        })
        .collect()
}

/// Decomposes a Hamiltonian, sorting eigenvalues ascending.
pub fn decompose(h: &HamiltonianMatrix) -> Result<SpectralDecomposition> {
    let (eigenvalues, eigenvectors) = symmetric_eigen_sorted(h.entries.clone())?;
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        source: h.entries.clone(),
        basis: h.basis.clone(),
    })
}

/// Evolves `psi0` to every requested time (units of 1/J, sorted ascending;
/// negative times are allowed and run the walk backwards).
pub fn evolve(
    dec: &SpectralDecomposition,
    psi0: &TwoParticleState,
    times: &[f64],
) -> Result<Vec<TwoParticleState>> {
    if dec.dim() != psi0.amplitudes.len() {
        return Err(Error::GridMismatch {
            context: format!(
                "decomposition dimension {} vs state dimension {}",
                dec.dim(),
                psi0.amplitudes.len()
            ),
        });
    }
    if times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Validation(
            "evolution times must be sorted ascending".into(),
        ));
    }
    let evolved = spectral_propagate(&dec.eigenvalues, &dec.eigenvectors, &psi0.amplitudes, times);
    Ok(evolved
        .into_iter()
        .zip(times)
        .map(|(amplitudes, &t)| TwoParticleState {
            amplitudes,
            basis: Arc::clone(&psi0.basis),
            time: psi0.time + t,
        })
        .collect())
}

/// Free single-particle propagator on the ring from the plane-wave sum:
/// G[q][l] = (1/L_t) sum_alpha exp(i p_alpha (q-l)) exp(+2 i J cos(p_alpha) t).
pub fn single_particle_propagator(spec: &LatticeSpec, t: f64) -> DMatrix<Complex64> {
    let n = spec.total_sites();
    let grid = spec.momentum_grid();
    // Rank-friendly form: G = (1/L_t) F D F^H with F[l][alpha] = exp(i p l).
    let mut g = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for q in -spec.l_max..=spec.l_max {
        for l in -spec.l_max..=spec.l_max {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in &grid.p_alpha {
                acc += Complex64::new(0.0, p * (q - l) as f64 + 2.0 * spec.j * p.cos() * t).exp();
            }
            g[(spec.offset(q), spec.offset(l))] = acc / n as f64;
        }
    }
    g
}
