pub mod error;
pub mod expansion;
pub mod extended;
pub mod family;
pub mod fit;
pub mod kelley;
pub mod phase;
pub mod poincare;
pub mod recurrence;
pub mod riccati;
pub mod signed_log;
pub mod spectrum;

pub use error::{Error, Result};
pub use family::{JacobiFamily, SpectralWindow};
pub use phase::{phase_classify, PhaseRegion, PhaseTag};
pub use signed_log::{SignedLogSeq, SignedLogValue};
