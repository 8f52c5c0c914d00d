//! Spectral phase of `J(c1, c2)` read off from `|c1² + c2² - 1| / (c1 c2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::BOUNDARY_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseTag {
    AbsolutelyContinuous,
    Discrete,
    /// `c1 + c2 = 1`.
    BoundaryEasy,
    /// `|c1 - c2| = 1`.
    BoundaryCritical,
}

impl PhaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseTag::AbsolutelyContinuous => "AbsolutelyContinuous",
            PhaseTag::Discrete => "Discrete",
            PhaseTag::BoundaryEasy => "BoundaryEasy",
            PhaseTag::BoundaryCritical => "BoundaryCritical",
        }
    }
}

impl std::fmt::Display for PhaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRegion {
    pub tag: PhaseTag,
    pub discriminant: f64,
}

pub fn discriminant(c1: f64, c2: f64) -> f64 {
    ((c1 * c1 + c2 * c2 - 1.0) / (c1 * c2)).abs()
}

/// Classifies `(c1, c2)` in the positive quadrant. Points within
/// [`BOUNDARY_TOL`] of discriminant 2 count as boundary points.
pub fn phase_classify(c1: f64, c2: f64) -> Result<PhaseRegion> {
    if !(c1.is_finite() && c1 > 0.0 && c2.is_finite() && c2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "c1 and c2 must be positive, got ({c1}, {c2})"
        )));
    }
    let d = discriminant(c1, c2);
    let tag = if (d - 2.0).abs() <= BOUNDARY_TOL {
        // On the boundary (c1² + c2² - 1)² = 4 c1² c2², which factors into
        // c1 + c2 = 1 or |c1 - c2| = 1 in the positive quadrant.
        if ((c1 + c2) - 1.0).abs() <= ((c1 - c2).abs() - 1.0).abs() {
            PhaseTag::BoundaryEasy
        } else {
            PhaseTag::BoundaryCritical
        }
    } else if d < 2.0 {
        PhaseTag::AbsolutelyContinuous
    } else {
        PhaseTag::Discrete
    };
    Ok(PhaseRegion {
        tag,
        discriminant: d,
    })
}
