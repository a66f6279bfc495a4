use thiserror::Error;

use crate::coin::Region;
use crate::dynamics::StationaryRun;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// The proposed coin matrix fails the unitarity check.
    #[error("coin matrix is not unitary (deviation {deviation:.3e} from C\u{2020}C = I)")]
    NotUnitary { deviation: f64 },

    /// Some coin entry is (numerically) zero, so the walk does not couple
    /// source and sink.
    #[error("trivial coin: an entry has modulus <= 1e-12, violating abcd != 0")]
    TrivialCoin,

    /// The requested quantity only exists in a different frequency band.
    #[error("frequency parameters lie outside the {required} band")]
    OutOfRegime { required: Region },

    /// Site index outside {0..M-1}.
    #[error("site index {n} out of range for a path of {m} sites")]
    IndexOutOfRange { n: usize, m: usize },

    /// A walk over zero sites is meaningless.
    #[error("path length M must be at least 1")]
    ZeroSites,

    /// The driven evolution did not settle within the step budget. The best
    /// iterate is carried along so callers can still inspect it.
    #[error("no stationary state within {} steps (last residual {:.3e})", .best.t, .best.residual)]
    NoConvergence { best: Box<StationaryRun> },

    /// The stationary linear system is numerically singular.
    #[error("stationary linear system is numerically singular (condition estimate {cond_estimate:.3e})")]
    SingularSystem { cond_estimate: f64 },

    /// A field with no mass cannot be normalized into a distribution.
    #[error("field norm is zero; no distribution to extract")]
    ZeroField,

    /// The regime and the scaling scheme cannot occur together.
    #[error("scaling scheme is inconsistent with the {region} band")]
    InconsistentScaling { region: Region },

    /// The requested evaluation does not exist for this law.
    #[error("unsupported evaluation: {reason}")]
    Unsupported { reason: &'static str },
}
