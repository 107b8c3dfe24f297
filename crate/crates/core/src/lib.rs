//! Annual macro links between inflation, unemployment and labor-force growth.

pub mod dataset;
pub mod diagnose;
pub mod error;
pub mod estimate;
pub mod forecast;
pub mod ingest;
pub mod linalg;
pub mod oracle;
pub mod scalar;
pub mod series;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use series::{align, Aligned, AnnualSeries, Units, YearRange};

pub type Series = AnnualSeries<f64>;
pub type Series32 = AnnualSeries<f32>;
pub type Data = Dataset<f64>;
pub type Fit = estimate::FitResult<f64>;
pub type Fit32 = estimate::FitResult<f32>;
pub type Model = estimate::LinearModel<f64>;
pub type Scenario = forecast::Scenario<f64>;
pub type Report = forecast::ForecastReport<f64>;
