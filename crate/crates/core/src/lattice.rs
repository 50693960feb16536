//! Ring lattice, two-particle basis, and momentum grid.
//!
//! Sites are labelled -L..L on a periodic ring of L_t = 2L+1 sites. The
//! two-particle basis is the lexicographically ordered list of site pairs
//! (l1, l2), with l1 <= l2 for bosons and l1 < l2 for fermions and hard-core
//! bosons. Bose pair states are normalized,
//! |l1 l2> = (1 + delta_{l1,l2})^{-1/2} a+_{l1} a+_{l2} |0>, which is where
//! the sqrt(2) doublon hopping factors downstream come from.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Exchange statistics of the two walkers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Statistics {
    Bose,
    Fermi,
    HardCoreBose,
}

impl Statistics {
    pub const ALL: [Statistics; 3] = [
        Statistics::Bose,
        Statistics::Fermi,
        Statistics::HardCoreBose,
    ];

    /// True when a site may hold both particles at once.
    pub fn allows_double_occupancy(self) -> bool {
        matches!(self, Statistics::Bose)
    }

    /// Stable token used by the CLI and the layout file format.
    pub fn token(self) -> &'static str {
        match self {
            Statistics::Bose => "bose",
            Statistics::Fermi => "fermi",
            Statistics::HardCoreBose => "hcb",
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bose" => Ok(Statistics::Bose),
            "fermi" => Ok(Statistics::Fermi),
            "hcb" => Ok(Statistics::HardCoreBose),
            other => Err(Error::Validation(format!(
                "unknown statistics '{other}' (expected bose, fermi, or hcb)"
            ))),
        }
    }
}

/// The quantum ring itself is always periodic; the open variant exists only
/// on the waveguide side.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RingBoundary {
    #[default]
    Periodic,
}

/// Physical configuration of a run: half-extent L (sites -L..L), hopping J,
/// nearest-neighbour interaction V, and exchange statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSpec {
    pub l_max: i32,
    pub j: f64,
    pub v: f64,
    pub statistics: Statistics,
    pub boundary: RingBoundary,
}

impl LatticeSpec {
    pub fn new(l_max: i32, j: f64, v: f64, statistics: Statistics) -> Result<Self> {
        if l_max < 1 {
            return Err(Error::Validation(format!(
                "half-extent L must be at least 1, got {l_max}"
            )));
        }
        if j <= 0.0 || !j.is_finite() {
            return Err(Error::Validation(format!(
                "hopping J must be positive and finite, got {j}"
            )));
        }
        if !v.is_finite() {
            return Err(Error::Validation(format!(
                "interaction V must be finite, got {v}"
            )));
        }
        Ok(LatticeSpec {
            l_max,
            j,
            v,
            statistics,
            boundary: RingBoundary::Periodic,
        })
    }

    /// Total number of sites, L_t = 2L + 1.
    pub fn total_sites(&self) -> usize {
        (2 * self.l_max + 1) as usize
    }

    pub fn site_in_range(&self, l: i32) -> bool {
        (-self.l_max..=self.l_max).contains(&l)
    }

    /// Storage offset of a site label, site -L first.
    pub fn offset(&self, l: i32) -> usize {
        debug_assert!(self.site_in_range(l));
        (l + self.l_max) as usize
    }

    /// Site label one step to the right, wrapping L back to -L.
    pub fn right_neighbor(&self, l: i32) -> i32 {
        if l == self.l_max {
            -self.l_max
        } else {
            l + 1
        }
    }

    /// Site label one step to the left, wrapping -L back to L.
    pub fn left_neighbor(&self, l: i32) -> i32 {
        if l == -self.l_max {
            self.l_max
        } else {
            l - 1
        }
    }

    /// True when two distinct sites are nearest neighbours on the ring,
    /// which includes the wrap pair {-L, L}.
    pub fn ring_adjacent(&self, a: i32, b: i32) -> bool {
        (a - b).abs() == 1 || (a - b).abs() == 2 * self.l_max
    }

    pub fn momentum_grid(&self) -> MomentumGrid {
        MomentumGrid::new(self.l_max)
    }
}

/// Quasi-momenta p_alpha = 2 pi alpha / L_t for alpha in -L..L.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumGrid {
    pub l_max: i32,
    pub p_alpha: Vec<f64>,
}

impl MomentumGrid {
    pub fn new(l_max: i32) -> Self {
        let l_t = (2 * l_max + 1) as f64;
        let p_alpha = (-l_max..=l_max)
            .map(|alpha| 2.0 * std::f64::consts::PI * alpha as f64 / l_t)
            .collect();
        MomentumGrid { l_max, p_alpha }
    }

    /// Mode labels alpha = -L..L, aligned with `p_alpha`.
    pub fn alphas(&self) -> impl Iterator<Item = i32> + '_ {
        -self.l_max..=self.l_max
    }
}

/// Bijection between ordered site pairs and state-vector indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisMap {
    pub statistics: Statistics,
    pub l_max: i32,
    pub pairs: Vec<(i32, i32)>,
    index: Vec<Option<usize>>,
}

impl BasisMap {
    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn total_sites(&self) -> usize {
        (2 * self.l_max + 1) as usize
    }

    /// Index of a canonically ordered pair; None for pairs outside the basis
    /// (wrong order, double occupancy where forbidden, out of range).
    pub fn index_of(&self, l1: i32, l2: i32) -> Option<usize> {
        let span = self.total_sites() as i32;
        if l1.abs() > self.l_max || l2.abs() > self.l_max {
            return None;
        }
        let flat = (l1 + self.l_max) * span + (l2 + self.l_max);
        self.index[flat as usize]
    }
}

/// Builds the lexicographically ordered two-particle basis for `spec`.
pub fn build_basis(spec: &LatticeSpec) -> BasisMap {
    let l = spec.l_max;
    let mut pairs = Vec::new();
    for l1 in -l..=l {
        let start = if spec.statistics.allows_double_occupancy() {
            l1
        } else {
            l1 + 1
        };
        for l2 in start..=l {
            pairs.push((l1, l2));
        }
    }
    let span = spec.total_sites();
    let mut index = vec![None; span * span];
    for (i, &(l1, l2)) in pairs.iter().enumerate() {
        index[(l1 + l) as usize * span + (l2 + l) as usize] = Some(i);
    }
    BasisMap {
        statistics: spec.statistics,
        l_max: l,
        pairs,
        index,
    }
}

/// Amplitudes C_{l1,l2} over the two-particle basis at one instant.
#[derive(Clone, Debug)]
pub struct TwoParticleState {
    pub amplitudes: DVector<Complex64>,
    pub basis: Arc<BasisMap>,
    /// Time stamp in units of 1/J.
    pub time: f64,
}

impl TwoParticleState {
    /// Wraps an amplitude vector, enforcing dimension and normalization.
    pub fn new(basis: Arc<BasisMap>, amplitudes: DVector<Complex64>, time: f64) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::Validation(format!(
                "amplitude vector length {} does not match basis dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!(
                "state norm {norm} deviates from 1 by more than 1e-10"
            )));
        }
        Ok(TwoParticleState {
            amplitudes,
            basis,
            time,
        })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// State with both walkers released from sites (l1, l2): unit amplitude on
/// the basis element of the normalized state a+_{l1} a+_{l2} |0>. For
/// fermions a reversed input order flips the sign of the amplitude.
pub fn initial_pair_state(basis: &Arc<BasisMap>, l1: i32, l2: i32) -> Result<TwoParticleState> {
    for site in [l1, l2] {
        if site.abs() > basis.l_max {
            return Err(Error::OutOfRange {
                site,
                l_max: basis.l_max,
            });
        }
    }
    if l1 == l2 && !basis.statistics.allows_double_occupancy() {
        return Err(Error::DoubleOccupancyForbidden {
            site: l1,
            statistics: basis.statistics.token(),
        });
    }
    let (a, b) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
    let sign = if l1 > l2 && basis.statistics == Statistics::Fermi {
        -1.0
    } else {
        1.0
    };
    let idx = basis
        .index_of(a, b)
        .expect("canonical in-range pair is always in the basis");
    let mut amplitudes = DVector::from_element(basis.dim(), Complex64::new(0.0, 0.0));
    amplitudes[idx] = Complex64::new(sign, 0.0);
    Ok(TwoParticleState {
        amplitudes,
        basis: Arc::clone(basis),
        time: 0.0,
    })
}
