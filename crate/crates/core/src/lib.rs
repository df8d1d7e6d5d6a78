//! Dematerialization analysis under technical progress and demand rebound.
//!
//! A material's total usage `m = p * m_c` declines only when
//!
//! ```text
//! d ln p/dt - k + eps * (k + d ln G_c/dt) < 0
//! ```
//!
//! where `k` is the exponential improvement rate of the technology's
//! performance per cost, `eps` the (common) income and price elasticity of
//! demand, `p` population and `G_c` per-capita GDP. The crate provides:
//!
//! * [`model`]: the closed-form growth equations and the criterion itself,
//! * [`estimate`]: log-linear trend fitting and elasticity estimation from trend rates,
//! * [`phase`]: boundary solving and classification of parameter grids,
//! * [`cases`]: the bundled 57-case dataset, its replication and an absolute-decline detector.
//!
//! Every routine is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64` (or `f32` with a `32` suffix).
//!
//! ```
//! use demat_core::{materialization_index, Era};
//!
//! let era = Era::new(0.01, 0.03).unwrap();
//! // k = 5%/yr, eps = 0.5: pop - k + eps (k + gdp) = 0.01 - 0.05 + 0.04
//! let index = materialization_index(era, 0.05, 0.5).unwrap();
//! assert!(index.abs() < 1e-15);
//! ```

#![forbid(unsafe_code)]
#![warn(rust_2018_idioms, missing_debug_implementations)]

pub mod cases;
mod error;
pub mod estimate;
pub mod model;
pub mod phase;
mod scalar;
pub mod tabular;

pub use cases::{
    assess_case, detect_absolute_decline, era_for, load_cases, replicate_tables, CaseAssessment,
    CaseRecord, Category, DeclineVerdict, EraRule, ReplicationReport,
};
pub use error::{Error, Result};
pub use estimate::{
    elasticity_from_rates, fit_exponential, ln_rate_to_log10, log10_rate_to_ln, ExponentialFit,
    Observation, SeriesKind, TimeSeries,
};
pub use model::{
    classify_index, materialization_index, per_capita_usage_rate, project_trend, project_usage,
    strong_demat_criterion, Classification, DemandTrend, DematAssessment, ElasticityPair,
    EraContext, TechnologyTrend, UsagePoint,
};
pub use phase::{
    boundary_polyline, boundary_solve, classify_grid, combined_growth_series, Axis, Boundary,
    NoBoundary, Param, Params, PhaseCell, PhaseGrid, Preset, RegionSpec,
};
pub use scalar::{lit, Scalar};

pub type Era = EraContext<f64>;
pub type Elasticities = ElasticityPair<f64>;
pub type Assessment = DematAssessment<f64>;
pub type Series = TimeSeries<f64>;
pub type Fit = ExponentialFit<f64>;
pub type Region = RegionSpec<f64>;
pub type Grid = PhaseGrid<f64>;
pub type Case = CaseRecord<f64>;
pub type CaseResult = CaseAssessment<f64>;
pub type Verdict = DeclineVerdict<f64>;

pub type Era32 = EraContext<f32>;
pub type Elasticities32 = ElasticityPair<f32>;
pub type Series32 = TimeSeries<f32>;
pub type Fit32 = ExponentialFit<f32>;
pub type Region32 = RegionSpec<f32>;
pub type Grid32 = PhaseGrid<f32>;
