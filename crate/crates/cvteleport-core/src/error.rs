use core::fmt;

/// Errors shared by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// A `ModeId` was used with a registry it does not belong to.
    UnknownMode,
    /// Expressions from different registries were combined.
    MixedRegistries,
    /// A numeric parameter was outside its allowed range.
    ParamRange {
        name: &'static str,
        value: f64,
    },
    /// An operation required a normalized state but `Σ|amp|²` was not 1.
    UnnormalizedState {
        norm_sq: f64,
    },
    /// The requested balancing attenuation exceeds 1 (gain would be needed).
    InfeasibleBalance {
        eta: f64,
    },
    /// A quadrature spectrum pair implies a negative photon number.
    NonPhysicalSpectrum {
        nbar: f64,
    },
    /// Density matrices of different dimension were compared.
    DimensionMismatch {
        left: usize,
        right: usize,
    },
    /// A network handed to the oracle is not a canonical commuting output set.
    NonCanonicalNetwork,
    /// The oracle cannot realize the given expressions with its op set.
    UnsupportedNetwork,
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::UnknownMode => write!(f, "mode is not registered in this registry"),
            CoreError::MixedRegistries => {
                write!(f, "expressions belong to different mode registries")
            }
            CoreError::ParamRange { name, value } => {
                write!(f, "parameter `{name}` out of range: {value}")
            }
            CoreError::UnnormalizedState { norm_sq } => {
                write!(f, "state is not normalized (Σ|amp|² = {norm_sq})")
            }
            CoreError::InfeasibleBalance { eta } => {
                write!(f, "balancing requires η = {eta} > 1; gain too large to balance")
            }
            CoreError::NonPhysicalSpectrum { nbar } => {
                write!(f, "spectrum pair implies negative photon number {nbar}")
            }
            CoreError::DimensionMismatch { left, right } => {
                write!(f, "density matrix dimensions differ: {left} vs {right}")
            }
            CoreError::NonCanonicalNetwork => {
                write!(f, "output expressions are not a canonical commuting set")
            }
            CoreError::UnsupportedNetwork => {
                write!(f, "network cannot be decomposed into elementary Gaussian ops")
            }
        }
    }
}

impl core::error::Error for CoreError {}
