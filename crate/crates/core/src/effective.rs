//! Strong-coupling effective model for interaction-bound pairs.
//!
//! For |V| >> J a nearest-neighbour pair cannot unbind (energy conservation
//! forbids trading the interaction energy V for kinetic energy bounded by
//! 8J), so the pair walks as a single composite particle on the ring of
//! bond centres. Second-order perturbation theory through the virtual
//! doublon / distance-2 states gives the composite hopping and its energy
//! offset:
//!
//!   bosons:            J_eff = 3 J^2 / V,  mu_eff = V + 6 J^2 / V
//!   fermions / hcb:    J_eff =   J^2 / V,  mu_eff = V + 2 J^2 / V
//!
//! The effective hopping enters with a positive sign (both second-order
//! paths pick up (-J)^2 / V), which inverts the composite band relative to
//! a bare walker: H_eff |q> = mu_eff |q> + J_eff (|q+1> + |q-1>).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{spectral_propagate, symmetric_eigen_sorted};
use crate::lattice::{LatticeSpec, Statistics, TwoParticleState};

/// Composite-particle parameters of the strong-coupling pair walk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveParams {
    pub j_eff: f64,
    pub mu_eff: f64,
    pub statistics: Statistics,
}

/// Second-order pair hopping and offset for the given couplings.
pub fn effective_params(spec: &LatticeSpec) -> Result<EffectiveParams> {
    if spec.v == 0.0 {
        return Err(Error::ZeroInteraction);
    }
    let ratio = spec.j * spec.j / spec.v;
    let (j_eff, mu_eff) = match spec.statistics {
        Statistics::Bose => (3.0 * ratio, spec.v + 6.0 * ratio),
        Statistics::Fermi | Statistics::HardCoreBose => (ratio, spec.v + 2.0 * ratio),
    };
    Ok(EffectiveParams {
        j_eff,
        mu_eff,
        statistics: spec.statistics,
    })
}

/// Whether the couplings sit safely in the composite-pair regime.
pub fn is_strong_coupling(spec: &LatticeSpec) -> bool {
    spec.v.abs() >= 10.0 * spec.j.abs()
}

/// Single-particle ring Hamiltonian of the composite pair: mu_eff on the
/// diagonal, +J_eff on ring-neighbour bonds.
pub fn effective_hamiltonian(params: &EffectiveParams, l_max: i32) -> DMatrix<f64> {
    let n = (2 * l_max + 1) as usize;
    let mut h = DMatrix::zeros(n, n);
    for q in 0..n {
        h[(q, q)] = params.mu_eff;
        let r = (q + 1) % n;
        h[(q, r)] = params.j_eff;
        h[(r, q)] = params.j_eff;
    }
    h
}

/// Amplitudes c_q on the ring of nearest-neighbour bond centres; the label
/// q stands for the bond (q, q+1), with q = L wrapping to (L, -L).
#[derive(Clone, Debug)]
pub struct CoWalkAmplitudes {
    pub c: DVector<Complex64>,
    pub l_max: i32,
    pub time: f64,
}

impl CoWalkAmplitudes {
    pub fn offset(&self, q: i32) -> usize {
        (q + self.l_max) as usize
    }

    /// Total probability bound in nearest-neighbour pairs.
    pub fn p_bound(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Projects a full two-particle state onto the bound-pair sector.
///
/// c_q is the basis amplitude on the canonical pair (q, q+1); the wrap
/// entry c_L comes from the pair (-L, L), whose canonical order traverses
/// the long way around the ring, so for fermions it enters with a minus
/// sign (the bond-centred order (L, -L) is one transposition away).
pub fn cowalk_projection(state: &TwoParticleState) -> CoWalkAmplitudes {
    let basis = &state.basis;
    let l_max = basis.l_max;
    let wrap_sign = if basis.statistics == Statistics::Fermi {
        -1.0
    } else {
        1.0
    };
    let c = DVector::from_fn(basis.total_sites(), |qi, _| {
        let q = qi as i32 - l_max;
        if q == l_max {
            let idx = basis.index_of(-l_max, l_max).unwrap();
            state.amplitudes[idx] * wrap_sign
        } else {
            let idx = basis.index_of(q, q + 1).unwrap();
            state.amplitudes[idx]
        }
    });
    CoWalkAmplitudes {
        c,
        l_max,
        time: state.time,
    }
}

/// Evolves a composite pair released on bond q0 under the effective model.
pub fn evolve_effective(
    params: &EffectiveParams,
    l_max: i32,
    q0: i32,
    times: &[f64],
) -> Result<Vec<CoWalkAmplitudes>> {
    if q0 < -l_max || q0 > l_max {
        return Err(Error::OutOfRange { site: q0, l_max });
    }
    if times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Validation(
            "evolution times must be sorted ascending".into(),
        ));
    }
    let n = (2 * l_max + 1) as usize;
    let (eigenvalues, eigenvectors) = symmetric_eigen_sorted(effective_hamiltonian(params, l_max))?;
    let mut c0 = DVector::from_element(n, Complex64::new(0.0, 0.0));
    c0[(q0 + l_max) as usize] = Complex64::new(1.0, 0.0);
    let evolved = spectral_propagate(&eigenvalues, &eigenvectors, &c0, times);
    Ok(evolved
        .into_iter()
        .zip(times)
        .map(|(c, &t)| CoWalkAmplitudes { c, l_max, time: t })
        .collect())
}

/// Per-time comparison between a projected full evolution and the
/// effective composite walk.
#[derive(Clone, Debug)]
pub struct EffectiveComparison {
    pub times: Vec<f64>,
    /// L1 distance between the bound-sector-normalized distributions.
    pub l1: Vec<f64>,
    /// Magnitude of the normalized amplitude overlap.
    pub overlap: Vec<f64>,
    pub max_l1: f64,
}

/// Compares bound-pair distributions of two co-walk series sample by
/// sample. Both distributions are normalized to unit bound mass first, so
/// the L1 distance measures shape agreement, not the (small) unbound leak.
pub fn compare_effective(
    full: &[CoWalkAmplitudes],
    effective: &[CoWalkAmplitudes],
) -> Result<EffectiveComparison> {
    if full.len() != effective.len() {
        return Err(Error::GridMismatch {
            context: format!(
                "{} full samples vs {} effective",
                full.len(),
                effective.len()
            ),
        });
    }
    let mut times = Vec::with_capacity(full.len());
    let mut l1 = Vec::with_capacity(full.len());
    let mut overlap = Vec::with_capacity(full.len());
    for (f, e) in full.iter().zip(effective) {
        if f.l_max != e.l_max {
            return Err(Error::GridMismatch {
                context: format!("l_max {} vs {}", f.l_max, e.l_max),
            });
        }
        if (f.time - e.time).abs() > 1e-12 {
            return Err(Error::GridMismatch {
                context: format!("time {} vs {}", f.time, e.time),
            });
        }
        let (pf, pe) = (f.p_bound(), e.p_bound());
        if pf <= 0.0 || pe <= 0.0 {
            return Err(Error::Validation(
                "bound-sector mass vanished; nothing to compare".into(),
            ));
        }
        let dist: f64 =
            f.c.iter()
                .zip(e.c.iter())
                .map(|(a, b)| (a.norm_sqr() / pf - b.norm_sqr() / pe).abs())
                .sum();
        let dot: Complex64 = f.c.iter().zip(e.c.iter()).map(|(a, b)| a.conj() * b).sum();
        times.push(f.time);
        l1.push(dist);
        overlap.push(dot.norm() / (pf.sqrt() * pe.sqrt()));
    }
    let max_l1 = l1.iter().cloned().fold(0.0, f64::max);
    Ok(EffectiveComparison {
        times,
        l1,
        overlap,
        max_l1,
    })
}
