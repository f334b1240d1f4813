//! Nearest-neighbour forecast averaging for panels of heterogeneous,
//! unequal-length time series.
//!
//! Series are compared with asymmetric open-begin/open-end dynamic time
//! warping on centered values. For every query series the closest series with
//! a longer history form a neighbourhood, and the one-step-ahead forecast of a
//! local exponential smoothing model is improved by one of nine averaging
//! strategies (see [`averaging::AvgMethod`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the
//! experiment driver and the command line live in the `nnavg` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod averaging;
pub mod barycenter;
pub mod cv;
pub mod diagnostics;
pub mod dtw;
pub mod error;
pub mod ets;
pub mod metrics;
pub mod neighborhood;
mod optim;
pub mod pipeline;
pub mod pooled;
pub mod series;
pub mod synth;

pub use averaging::{AvgMethod, WeightVector};
pub use barycenter::{adba, AdbaConfig, Barycenter};
pub use dtw::{dtw_asymmetric, dtw_symmetric, CostMatrix, DtwResult, StepPattern, WarpingPath};
pub use error::Error;
pub use ets::{EtsForm, EtsModel, ForecastDist, RefitModel};
pub use neighborhood::{find_neighbors, Neighborhood};
pub use pooled::PanelModel;
pub use series::{CenteredSeries, Panel, TimeSeries};
pub use synth::{generate_panel, SynthConfig};

/// Denominators below this are treated as zero.
pub const ZERO_TOL: f64 = 1e-12;
