//! Dense ring Hamiltonians in the canonical pair basis.
//!
//! H = -J sum_l (a+_l a_{l+1} + h.c.) + V sum_l n_l n_{l+1}, with site L+1
//! identified with -L. Matrix rules:
//! - diagonal: V when the pair occupies ring-neighbour sites, 0 otherwise
//!   (Bose doublons carry no interaction energy, V couples distinct sites);
//! - hopping: -J per allowed move, with a sqrt(2) factor whenever a Bose
//!   doublon is created or destroyed;
//! - Fermi hops across the ring seam (L <-> -L) reverse the canonical pair
//!   order and pick up +J from reordering the creators; for two particles
//!   this is equivalent to antiperiodic boundary conditions. Hard-core
//!   bosons commute off-site, so their seam hops keep -J.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::{BasisMap, LatticeSpec, Statistics, TwoParticleState};
use crate::numfmt::f64_repr;

/// Real symmetric Hamiltonian together with the configuration it came from.
/// `basis` is present for two-particle matrices and absent for the
/// single-particle variant.
#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    pub entries: DMatrix<f64>,
    pub spec: LatticeSpec,
    pub basis: Option<Arc<BasisMap>>,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Debug dump: CSV with pair (or site) labels on the first row and
    /// column, floats in the canonical 17-significant-digit format.
    pub fn to_csv_string(&self) -> String {
        let labels: Vec<String> = match &self.basis {
            Some(basis) => basis
                .pairs
                .iter()
                .map(|(l1, l2)| format!("{l1}:{l2}"))
                .collect(),
            None => (-self.spec.l_max..=self.spec.l_max)
                .map(|l| l.to_string())
                .collect(),
        };
        let mut out = String::new();
        out.push_str(&format!(",{}\n", labels.join(",")));
        for (i, label) in labels.iter().enumerate() {
            let row: Vec<String> = (0..self.dim())
                .map(|k| f64_repr(self.entries[(i, k)]))
                .collect();
            out.push_str(&format!("{label},{}\n", row.join(",")));
        }
        out
    }
}

/// A single hop of one walker of the pair `(a, b)` from `src` to `dst`:
/// target pair in canonical order and the amplitude factor multiplying -J.
/// None when the move is Pauli/hard-core blocked.
fn hop_target(
    statistics: Statistics,
    (a, b): (i32, i32),
    src: i32,
    dst: i32,
) -> Option<((i32, i32), f64)> {
    debug_assert!(src == a || src == b);
    let partner = if src == a { b } else { a };
    if dst == partner {
        // Landing on the partner site: forbidden unless bosonic, where it
        // builds a doublon.
        return match statistics {
            Statistics::Bose => Some(((dst, dst), std::f64::consts::SQRT_2)),
            Statistics::Fermi | Statistics::HardCoreBose => None,
        };
    }
    let canonical = if dst < partner {
        (dst, partner)
    } else {
        (partner, dst)
    };
    let factor = match statistics {
        // Leaving a doublon: the remaining amplitude carries sqrt(2).
        Statistics::Bose if a == b => std::f64::consts::SQRT_2,
        Statistics::Bose | Statistics::HardCoreBose => 1.0,
        Statistics::Fermi => {
            // Creators are reordered when the mover crosses the partner,
            // which on the ring only happens across the seam.
            let crossed = if src == a {
                dst > partner
            } else {
                dst < partner
            };
            if crossed {
                -1.0
            } else {
                1.0
            }
        }
    };
    Some((canonical, factor))
}

/// Two-particle Hamiltonian over the canonical pair basis of `basis`.
pub fn build_two_particle_hamiltonian(
    spec: &LatticeSpec,
    basis: &Arc<BasisMap>,
) -> Result<HamiltonianMatrix> {
    if basis.statistics != spec.statistics || basis.l_max != spec.l_max {
        return Err(Error::GridMismatch {
            context: format!(
                "basis built for {} L={} but spec has {} L={}",
                basis.statistics, basis.l_max, spec.statistics, spec.l_max
            ),
        });
    }
    let dim = basis.dim();
    let mut h = DMatrix::zeros(dim, dim);
    for (col, &(a, b)) in basis.pairs.iter().enumerate() {
        if a != b && spec.ring_adjacent(a, b) {
            h[(col, col)] = spec.v;
        }
        let movers: &[i32] = if a == b { &[a] } else { &[a, b] };
        for &src in movers {
            for dst in [spec.right_neighbor(src), spec.left_neighbor(src)] {
                if let Some((target, factor)) = hop_target(spec.statistics, (a, b), src, dst) {
                    let row = basis
                        .index_of(target.0, target.1)
                        .expect("hop target stays on the lattice");
                    h[(row, col)] += -spec.j * factor;
                }
            }
        }
    }
    Ok(HamiltonianMatrix {
        entries: h,
        spec: *spec,
        basis: Some(Arc::clone(basis)),
    })
}

/// Single-particle ring Hamiltonian, -J on every ring bond.
pub fn build_single_particle_hamiltonian(spec: &LatticeSpec) -> HamiltonianMatrix {
    let n = spec.total_sites();
    let mut h = DMatrix::zeros(n, n);
    for l in -spec.l_max..=spec.l_max {
        let r = spec.right_neighbor(l);
        let (i, k) = (spec.offset(l), spec.offset(r));
        h[(i, k)] = -spec.j;
        h[(k, i)] = -spec.j;
    }
    HamiltonianMatrix {
        entries: h,
        spec: *spec,
        basis: None,
    }
}

/// Energy expectation <psi|H|psi>, exactly real for symmetric H.
pub fn energy_expectation(h: &HamiltonianMatrix, state: &TwoParticleState) -> Result<f64> {
    if h.dim() != state.amplitudes.len() {
        return Err(Error::GridMismatch {
            context: format!(
                "Hamiltonian dimension {} vs state dimension {}",
                h.dim(),
                state.amplitudes.len()
            ),
        });
    }
    let re = state.amplitudes.map(|z| z.re);
    let im = state.amplitudes.map(|z| z.im);
    Ok((&h.entries * &re).dot(&re) + (&h.entries * &im).dot(&im))
}
