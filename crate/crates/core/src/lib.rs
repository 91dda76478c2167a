//! Directional influence networks from panel time series via
//! volatility-constrained (VC) correlation.
//!
//! The pipeline is: [`panel`] ingestion → [`transforms`] rates of change →
//! per-entity [`stats`] (Pearson, volatility subsets, VC correlations, ΔF)
//! → cross-entity [`aggregate`] with a z-test on mean ΔF → [`network`]
//! construction. [`synth`] generates seeded panels with planted coupling.
//!
//! Numeric code is generic over [`Real`]; the `*F64`/`*F32` aliases below
//! name the common instantiations.

pub mod aggregate;
pub mod network;
pub mod num;
pub mod panel;
pub mod pipeline;
pub mod stats;
pub mod synth;
pub mod transforms;

pub use aggregate::{aggregate_pair, z_test, PairAggregate, Verdict, DEFAULT_ALPHA};
pub use network::{build_networks, InfluenceNetwork};
pub use num::{exact_sum, Real};
pub use panel::{
    load_csv, read_csv, Dataset, Normalization, PanelError, Schema, VariableId, MIN_RATE_POINTS,
};
pub use pipeline::{analyze, Analysis, AnalysisConfig, Error, DEFAULT_H};
pub use stats::{
    constrained_pearson, moments, omega, pearson, vc_pair, PairFirmStats, VcCorrelation,
};
pub use synth::{generate, SynthSpec};
pub use transforms::{build_rate_panel, RatePanel};

pub type DatasetF64 = Dataset<f64>;
pub type DatasetF32 = Dataset<f32>;
pub type RatePanelF64 = RatePanel<f64>;
pub type PairFirmStatsF64 = PairFirmStats<f64>;
pub type PairFirmStatsF32 = PairFirmStats<f32>;
pub type PairAggregateF64 = PairAggregate<f64>;
pub type PairAggregateF32 = PairAggregate<f32>;
pub type InfluenceNetworkF64 = InfluenceNetwork<f64>;
pub type AnalysisF64 = Analysis<f64>;
pub type AnalysisF32 = Analysis<f32>;
