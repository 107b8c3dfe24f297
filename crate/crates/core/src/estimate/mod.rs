//! Lagged linear links between annual series, fitted either on annual values
//! or on cumulative curves, with optional single-break piecewise variants and
//! exhaustive lag and break scans.

mod fit;
mod model;
mod scan;
mod spec;

pub use fit::{cumulative_fit, fit, fit_piecewise, ols_fit, FitResult, ParamEstimate};
pub use model::{original_phillips, predict, LinearModel, SegmentCoefficients};
pub use scan::{scan_break, scan_lag, BreakScan, BreakScanEntry, Criterion, LagScan, LagScanEntry, DEFAULT_LAGS};
pub use spec::{Estimator, LinkSpec, Predictor, Sharing, SharingFlags, MAX_ABS_LAG, MIN_SEGMENT_OBS};
