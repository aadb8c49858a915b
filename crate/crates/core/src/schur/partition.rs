use std::fmt;

use crate::{Error, Result};

/// A Young diagram: weakly decreasing positive row lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Validates and normalizes (trailing zeros dropped) a partition.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::MalformedPartition(parts, "rows must be weakly decreasing"));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.is_empty() {
            return Err(Error::MalformedPartition(parts, "partition of zero"));
        }
        Ok(Self(parts))
    }

    /// `λ = (N/2 + j, N/2 − j)`.
    pub fn from_spin(n: usize, two_j: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroParticles);
        }
        if two_j > n || !(n - two_j).is_multiple_of(2) {
            return Err(Error::Invalid(format!("2j = {two_j} does not occur for N = {n}")));
        }
        Self::new(vec![(n + two_j) / 2, (n - two_j) / 2])
    }

    /// Inverse of [`Partition::from_spin`]; `None` for more than two rows.
    pub fn to_spin(&self) -> Option<usize> {
        match self.0.as_slice() {
            [a] => Some(*a),
            [a, b] => Some(a - b),
            _ => None,
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Number of nonzero rows.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The integer `N` being partitioned.
    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Row lengths padded with zeros to `d` entries.
    pub fn padded(&self, d: usize) -> Vec<usize> {
        let mut v = self.0.clone();
        v.resize(d.max(v.len()), 0);
        v
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// An irreducible representation label: a spin for qubits, or a Young
/// diagram for general `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IrrepLabel {
    Spin { two_j: usize },
    Young(Partition),
}

impl IrrepLabel {
    pub fn to_partition(&self, n: usize) -> Result<Partition> {
        match self {
            IrrepLabel::Spin { two_j } => Partition::from_spin(n, *two_j),
            IrrepLabel::Young(p) if p.size() == n => Ok(p.clone()),
            IrrepLabel::Young(p) => Err(Error::MalformedPartition(
                p.parts().to_vec(),
                "size differs from particle number",
            )),
        }
    }
}
