//! N-photon states with visible polarization and hidden spatio-temporal
//! modes, and their reduction to accessible density matrices.

mod accessible;
mod expr;
mod symmetrize;

pub use accessible::{
    accessible_projection, coupled_to_accessible, permutation_twirl, trace_hidden, AccessibleDensityMatrix, Block,
    BlockOperator, CoupledCoefficients,
};
pub use expr::{
    parse_definitions, parse_operator_expression, parse_source, CreationOperatorExpression, Factor, ModeTable, Source,
    Term,
};
pub use symmetrize::{expand_and_symmetrize, FirstQuantizedState, Slot};

use std::fmt;

/// Visible single-photon label. `H` is the `+½` weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    /// Bit in a computational basis index.
    pub fn bit(self) -> usize {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pol::H => "H",
            Pol::V => "V",
        })
    }
}
