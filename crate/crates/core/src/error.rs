use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    /// The force on the component vanishes, so there is no Wannier-Stark
    /// ladder and no Bloch oscillation. Callers should use free propagation.
    #[error("static force is zero: no Wannier-Stark ladder, use free propagation")]
    ZeroForce,

    #[error("lattice too small ({reason}): need at least {required} sites")]
    LatticeTooSmall { required: usize, reason: String },

    #[error("time step {dt:e} s exceeds the stability budget; use dt <= {suggested:e} s")]
    UnstableStep { dt: f64, suggested: f64 },

    #[error("grid spacing {dx:e} m does not resolve the barrier; use dx <= {required:e} m")]
    GridTooCoarse { dx: f64, required: f64 },

    #[error("wave function reaches the grid edge: {occupancy:e} probability in the outer 5% (limit {limit:e})")]
    EdgeOccupancy { occupancy: f64, limit: f64 },

    #[error("band search found {found} of {requested} bands below {ceiling:e} rad/s")]
    BandSearchExhausted {
        found: usize,
        requested: usize,
        ceiling: f64,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
