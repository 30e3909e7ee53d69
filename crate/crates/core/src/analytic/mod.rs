//! Closed-form predictions: well statistics, trap regimes, transport and the 1D limit.

pub mod luttinger;
pub mod transport;
pub mod trap;
pub mod wells;

pub use luttinger::{luttinger_analysis, luttinger_parameter, renormalized_disorder, LuttingerInput, LuttingerReport};
pub use transport::{relaxation_time, superfluid_corrections, vrh, Relaxation};
pub use trap::{trap_regime, RegimeLabel, RegimeReport};
pub use wells::{
    filled_state_correlated, filled_state_uncorrelated, well_statistics_correlated, well_statistics_uncorrelated,
    FilledState, PrefactorMode, WellStats,
};
