use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::YearRange;

/// Largest lag, in years, a specification may use.
pub const MAX_ABS_LAG: i32 = 20;

/// Fewest observations a segment may have when it carries its own coefficients.
pub const MIN_SEGMENT_OBS: usize = 5;

/// A predictor series entering at `x(t - lag)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predictor {
    pub name: String,
    #[serde(default)]
    pub lag: i32,
}

impl Predictor {
    pub fn new(name: impl Into<String>, lag: i32) -> Self {
        Self { name: name.into(), lag }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// Least squares on annual values.
    Ols,
    /// Least squares on cumulative curves with the final cumulative level pinned to the observed one.
    Cumulative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sharing {
    /// One coefficient for both sides of the break.
    Shared,
    /// A separate coefficient before and after the break.
    PerSegment,
}

/// Cross-segment constraints, one flag for the intercept and one per predictor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharingFlags {
    pub intercept: Sharing,
    pub slopes: Vec<Sharing>,
}

impl SharingFlags {
    pub fn all(n_predictors: usize, sharing: Sharing) -> Self {
        Self { intercept: sharing, slopes: vec![sharing; n_predictors] }
    }

    pub fn any_per_segment(&self) -> bool {
        self.intercept == Sharing::PerSegment || self.slopes.contains(&Sharing::PerSegment)
    }
}

/// Declarative description of a lagged linear link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub response: String,
    pub predictors: Vec<Predictor>,
    /// First year of the second segment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub break_year: Option<i32>,
    /// Defaults to every coefficient per-segment when a break is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sharing: Option<SharingFlags>,
    pub estimator: Estimator,
    /// Years to fit; defaults to everything the series have in common.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<YearRange>,
}

impl LinkSpec {
    pub fn new(response: impl Into<String>, predictors: Vec<Predictor>, estimator: Estimator) -> Self {
        Self {
            response: response.into(),
            predictors,
            break_year: None,
            sharing: None,
            estimator,
            window: None,
        }
    }

    /// Single-predictor link `response(t) = a + b * predictor(t - lag)`.
    pub fn simple(response: &str, predictor: &str, lag: i32, estimator: Estimator) -> Self {
        Self::new(response, vec![Predictor::new(predictor, lag)], estimator)
    }

    pub fn with_window(mut self, window: YearRange) -> Self {
        self.window = Some(window);
        self
    }

    pub fn with_estimator(mut self, estimator: Estimator) -> Self {
        self.estimator = estimator;
        self
    }

    pub fn with_break(mut self, year: i32, sharing: SharingFlags) -> Self {
        self.break_year = Some(year);
        self.sharing = Some(sharing);
        self
    }

    /// Sharing flags in effect, filling in the per-segment default.
    pub fn effective_sharing(&self) -> SharingFlags {
        self.sharing
            .clone()
            .unwrap_or_else(|| SharingFlags::all(self.predictors.len(), Sharing::PerSegment))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: LinkSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the parts of the specification that do not depend on data.
    pub fn validate(&self) -> Result<()> {
        if self.predictors.is_empty() {
            return Err(Error::input("a link needs at least one predictor"));
        }
        if let Some(p) = self.predictors.iter().find(|p| p.lag.abs() > MAX_ABS_LAG) {
            return Err(Error::input(format!(
                "lag {} of {:?} outside ±{MAX_ABS_LAG}",
                p.lag, p.name
            )));
        }
        if let Some(sharing) = &self.sharing {
            if sharing.slopes.len() != self.predictors.len() {
                return Err(Error::input(format!(
                    "{} slope sharing flags for {} predictors",
                    sharing.slopes.len(),
                    self.predictors.len()
                )));
            }
        }
        if let (Some(year), Some(window)) = (self.break_year, self.window) {
            if year <= window.first || year > window.last {
                return Err(Error::input(format!("break year {year} not strictly inside window {window}")));
            }
        }
        Ok(())
    }
}
