//! Neighbourhood stability over time and checks of the theoretical link
//! between DTW and forecast distributions for ANN processes.

pub mod ari;
pub mod evolution;
pub mod theory;
pub mod wasserstein;

pub use ari::{adjusted_rand, Partition};
pub use evolution::{neighborhood_evolution, query_evolution, EvolutionPoint};
pub use theory::{theoretical_dtw_ann, AnnParams};
pub use wasserstein::wasserstein_forecast;
