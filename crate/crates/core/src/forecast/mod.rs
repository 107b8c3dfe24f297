//! Labor-force scenarios pushed through inflation and unemployment links.
//!
//! Forecasts are open loop: predicted inflation and unemployment never feed
//! back into the labor force.

mod registry;

use std::fmt::Write as _;

use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::estimate::{predict, LinearModel};
use crate::ingest::participation_labor_force;
use crate::scalar::Scalar;
use crate::series::{AnnualSeries, Units, YearRange};

pub use registry::{registry_model, RegistryEntry, REGISTRY};

/// Predictor name for labor-force growth.
pub const GROWTH: &str = "l";
/// Predictor name for the companion unemployment path.
pub const UNEMPLOYMENT: &str = "u";

/// Where a scenario's labor force comes from.
#[derive(Clone, Copy, Debug)]
pub enum LaborForceSource<'a, T> {
    Direct(&'a AnnualSeries<T>),
    Participation { population: &'a AnnualSeries<T>, rate: T },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario<T> {
    pub labor_force: AnnualSeries<T>,
    /// Backward log growth of `labor_force`.
    pub growth: AnnualSeries<T>,
    pub horizon: YearRange,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub participation: Option<T>,
}

/// Builds a scenario; the path must cover the horizon and the year before it.
pub fn build_scenario<T: Scalar>(source: LaborForceSource<'_, T>, horizon: YearRange) -> Result<Scenario<T>> {
    let (labor_force, participation) = match source {
        LaborForceSource::Direct(lf) => (lf.clone(), None),
        LaborForceSource::Participation { population, rate } => {
            (participation_labor_force(population, rate)?, Some(rate))
        }
    };
    if labor_force.units() != Units::Persons {
        return Err(Error::UnitMismatch { left: labor_force.units(), right: Units::Persons });
    }
    if horizon.first <= labor_force.first_year() || horizon.last > labor_force.last_year() {
        return Err(Error::input(format!(
            "labor-force path {} must cover horizon {horizon} plus the year before it",
            labor_force.span()
        )));
    }
    let growth = labor_force.log_growth()?.window(horizon)?;
    Ok(Scenario { labor_force, growth, horizon, participation })
}

/// Straight-line labor force between two anchor years.
pub fn linear_path<T: Scalar>(first: (i32, T), last: (i32, T)) -> Result<AnnualSeries<T>> {
    let span = YearRange::new(first.0, last.0)?;
    let steps = T::from_count(span.len() - 1);
    let values = span
        .years()
        .map(|y| {
            if y == last.0 {
                last.1
            } else {
                first.1 + (last.1 - first.1) * T::from_count((y - first.0) as usize) / steps
            }
        })
        .collect();
    Ok(AnnualSeries::new(first.0, values, Units::Persons)?.with_label("labor force"))
}

fn uses(model: &LinearModel<impl Scalar>, name: &str) -> bool {
    model.predictors.iter().any(|p| p.name == name)
}

/// Growth under `l` and under any `dlog(..)` name the model refers to.
fn scenario_data<T: Scalar>(model: &LinearModel<T>, scenario: &Scenario<T>, unemployment: Option<&AnnualSeries<T>>) -> Result<Dataset<T>> {
    let mut data = Dataset::new();
    data.insert(GROWTH, scenario.growth.clone());
    for p in &model.predictors {
        if p.name.starts_with("dlog(") {
            data.insert(p.name.clone(), scenario.growth.clone());
        } else if p.name == UNEMPLOYMENT {
            let u = unemployment.ok_or_else(|| {
                Error::input(format!("model {} needs a companion unemployment path", model.id))
            })?;
            data.insert(UNEMPLOYMENT, u.clone());
        } else if p.name != GROWTH {
            return Err(Error::input(format!(
                "model {} uses predictor {:?}, which a labor-force scenario does not provide",
                model.id, p.name
            )));
        }
    }
    Ok(data)
}

/// Inflation path over the scenario horizon.
///
/// Models that also take unemployment need `unemployment` covering the horizon.
pub fn forecast_inflation<T: Scalar>(
    model: &LinearModel<T>,
    scenario: &Scenario<T>,
    unemployment: Option<&AnnualSeries<T>>,
) -> Result<AnnualSeries<T>> {
    if model.response_units != Units::FractionPerYear {
        return Err(Error::input(format!("model {} does not predict an inflation rate", model.id)));
    }
    let data = scenario_data(model, scenario, unemployment)?;
    predict(model, &data, scenario.horizon)
}

/// Unemployment path over the scenario horizon.
pub fn forecast_unemployment<T: Scalar>(model: &LinearModel<T>, scenario: &Scenario<T>) -> Result<AnnualSeries<T>> {
    if model.response_units != Units::Fraction {
        return Err(Error::input(format!("model {} does not predict an unemployment rate", model.id)));
    }
    if uses(model, UNEMPLOYMENT) {
        return Err(Error::input(format!("model {} predicts unemployment from itself", model.id)));
    }
    let data = scenario_data(model, scenario, None)?;
    predict(model, &data, scenario.horizon)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variable {
    Inflation,
    Unemployment,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForecastPath<T> {
    pub model: String,
    pub variable: Variable,
    pub path: AnnualSeries<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForecastReport<T> {
    pub scenario: Scenario<T>,
    /// One path per model, in the order given.
    pub paths: Vec<ForecastPath<T>>,
}

/// Runs every model on `scenario`.
///
/// Unemployment models run first; an inflation model that needs unemployment
/// takes the first unemployment path in the list.
pub fn forecast_report<T: Scalar>(models: &[LinearModel<T>], scenario: &Scenario<T>) -> Result<ForecastReport<T>> {
    if models.is_empty() {
        return Err(Error::input("forecast needs at least one model"));
    }
    let mut paths: Vec<Option<ForecastPath<T>>> = vec![None; models.len()];
    for (i, m) in models.iter().enumerate() {
        if m.response_units == Units::Fraction {
            let path = forecast_unemployment(m, scenario)?;
            paths[i] = Some(ForecastPath { model: m.id.clone(), variable: Variable::Unemployment, path });
        }
    }
    let companion = paths.iter().flatten().next().map(|p| p.path.clone());
    for (i, m) in models.iter().enumerate() {
        if paths[i].is_none() {
            let path = forecast_inflation(m, scenario, companion.as_ref())?;
            paths[i] = Some(ForecastPath { model: m.id.clone(), variable: Variable::Inflation, path });
        }
    }
    Ok(ForecastReport { scenario: scenario.clone(), paths: paths.into_iter().flatten().collect() })
}

impl<T: Scalar> ForecastReport<T> {
    /// One row per horizon year: labor force, growth, then each path.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("year,labor_force,growth");
        for p in &self.paths {
            out.push(',');
            out.push_str(&p.model);
        }
        out.push('\n');
        for year in self.scenario.horizon.years() {
            let get = |s: &AnnualSeries<T>| s.get(year).expect("paths cover the horizon");
            let _ = write!(out, "{year},{},{}", get(&self.scenario.labor_force), get(&self.scenario.growth));
            for p in &self.paths {
                let _ = write!(out, ",{}", get(&p.path));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
