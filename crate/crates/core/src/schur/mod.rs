//! SU(2) × S_N structure of N two-level systems.
//!
//! Half-integer spins are carried as the integer `two_j = 2j` (and `two_m`
//! for weights) so that no spin label is ever a float.

mod basis;
mod cg;
mod counting;
mod partition;
mod rotation;

pub use basis::{SchurBasis, SchurLabel, Sector, WeightClass};
pub use cg::{clebsch_gordan, clebsch_gordan_exact};
pub use counting::{
    accessible_param_count, binomial, partitions, spin_sectors, su2_multiplicity, symmetric_dimension, weyl_dimension,
};
pub use partition::{IrrepLabel, Partition};
pub use rotation::{basis_phase, collective_block};

/// Largest particle number for which an explicit Schur basis is built.
pub const N_MAX: usize = 10;
