use serde::{Deserialize, Serialize};

use super::{State2, State4};
use crate::error::{Error, Result};

/// Involutions of the two maps. `Sigma1..Sigma3` act on the plane, `Sigma4..Sigma6` on R^4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryId {
    Sigma1,
    Sigma2,
    Sigma3,
    Sigma4,
    Sigma5,
    Sigma6,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryKind {
    /// `f o s = s o f`
    Symmetry,
    /// `f o s = s o f^-1`
    Reversor,
}

impl SymmetryId {
    pub const ALL: [SymmetryId; 6] = [
        SymmetryId::Sigma1,
        SymmetryId::Sigma2,
        SymmetryId::Sigma3,
        SymmetryId::Sigma4,
        SymmetryId::Sigma5,
        SymmetryId::Sigma6,
    ];

    pub fn kind(self) -> SymmetryKind {
        match self {
            SymmetryId::Sigma1 | SymmetryId::Sigma4 => SymmetryKind::Symmetry,
            _ => SymmetryKind::Reversor,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            SymmetryId::Sigma1 | SymmetryId::Sigma2 | SymmetryId::Sigma3 => 2,
            _ => 4,
        }
    }

    pub fn apply2(self, s: State2) -> Result<State2> {
        match self {
            SymmetryId::Sigma1 => Ok(State2::new(-s.x, -s.y)),
            SymmetryId::Sigma2 => Ok(State2::new(s.y, s.x)),
            SymmetryId::Sigma3 => Ok(State2::new(-s.y, -s.x)),
            _ => Err(Error::DimensionMismatch {
                expected: 4,
                found: 2,
            }),
        }
    }

    pub fn apply4(self, s: State4) -> Result<State4> {
        match self {
            SymmetryId::Sigma4 => Ok(State4::new(-s.x, -s.y, -s.z, -s.w)),
            SymmetryId::Sigma5 => Ok(State4::new(s.w, s.z, s.y, s.x)),
            SymmetryId::Sigma6 => Ok(State4::new(-s.w, -s.z, -s.y, -s.x)),
            _ => Err(Error::DimensionMismatch {
                expected: 2,
                found: 4,
            }),
        }
    }
}

/// A point of either phase space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseState {
    Two(State2),
    Four(State4),
}

pub fn apply_symmetry(id: SymmetryId, s: PhaseState) -> Result<PhaseState> {
    match s {
        PhaseState::Two(s) => id.apply2(s).map(PhaseState::Two),
        PhaseState::Four(s) => id.apply4(s).map(PhaseState::Four),
    }
}
