use std::cmp::Ordering;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::fit::{fit, FitResult};
use super::spec::{Estimator, LinkSpec};

/// Lags tried when none are given.
pub const DEFAULT_LAGS: RangeInclusive<i32> = -5..=5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    AnnualR2,
    CumulativeR2,
}

impl Criterion {
    /// The goodness-of-fit measure matching what `estimator` minimizes.
    pub fn default_for(estimator: Estimator) -> Self {
        match estimator {
            Estimator::Ols => Criterion::AnnualR2,
            Estimator::Cumulative => Criterion::CumulativeR2,
        }
    }

    pub fn value<T: Scalar>(&self, fit: &FitResult<T>) -> T {
        match self {
            Criterion::AnnualR2 => fit.r2_annual,
            Criterion::CumulativeR2 => fit.r2_cumulative,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LagScanEntry<T> {
    pub lag: i32,
    pub criterion: T,
    #[serde(skip)]
    pub fit: FitResult<T>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LagScan<T> {
    pub predictor: String,
    pub criterion: Criterion,
    /// Feasible lags in ascending order.
    pub entries: Vec<LagScanEntry<T>>,
    pub best_lag: i32,
}

impl<T: Scalar> LagScan<T> {
    pub fn best(&self) -> &LagScanEntry<T> {
        self.entries.iter().find(|e| e.lag == self.best_lag).expect("best lag is an entry")
    }
}

/// Input errors mark an infeasible candidate; anything else is a real failure.
fn feasible<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Input(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Refits `spec` with predictor `predictor` at each lag and keeps the best.
///
/// Lags whose sample does not fit the data are skipped. Ties go to the
/// smallest `|lag|`, then to the negative lag.
pub fn scan_lag<T: Scalar>(
    spec: &LinkSpec,
    data: &Dataset<T>,
    predictor: usize,
    lags: RangeInclusive<i32>,
    criterion: Option<Criterion>,
) -> Result<LagScan<T>> {
    spec.validate()?;
    let Some(target) = spec.predictors.get(predictor) else {
        return Err(Error::input(format!(
            "predictor index {predictor} out of range for {} predictors",
            spec.predictors.len()
        )));
    };
    let criterion = criterion.unwrap_or_else(|| Criterion::default_for(spec.estimator));
    let lags: Vec<i32> = lags.collect();
    let fits = lags
        .par_iter()
        .map(|&lag| {
            let mut s = spec.clone();
            s.predictors[predictor].lag = lag;
            if s.validate().is_err() {
                return Ok(None);
            }
            feasible(fit(&s, data))
        })
        .collect::<Vec<_>>();
    let mut entries = Vec::new();
    for (lag, f) in lags.into_iter().zip(fits) {
        if let Some(fit) = f? {
            entries.push(LagScanEntry { lag, criterion: criterion.value(&fit), fit });
        }
    }
    let best_lag = best_lag(entries.iter().map(|e| (e.lag, e.criterion)))
        .ok_or_else(|| Error::input("no feasible lag in the scanned range"))?;
    Ok(LagScan {
        predictor: target.name.clone(),
        criterion,
        best_lag,
        entries,
    })
}

/// Largest score wins; ties go to the smallest `|lag|`, then the negative lag.
fn best_lag<T: Scalar>(scores: impl Iterator<Item = (i32, T)>) -> Option<i32> {
    scores
        .filter(|(_, v)| !v.is_nan())
        .max_by(|(la, a), (lb, b)| {
            a.partial_cmp(b)
                .unwrap_or(Ordering::Equal)
                .then_with(|| (lb.abs(), *lb > 0).cmp(&(la.abs(), *la > 0)))
        })
        .map(|(lag, _)| lag)
}

#[derive(Clone, Debug, Serialize)]
pub struct BreakScanEntry<T> {
    pub year: i32,
    /// Annual SSE for OLS fits, cumulative SSE for cumulative fits.
    pub objective: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct BreakScan<T> {
    pub estimator: Estimator,
    /// Feasible candidates in ascending order.
    pub entries: Vec<BreakScanEntry<T>>,
    pub best_year: i32,
    #[serde(skip)]
    pub best_fit: FitResult<T>,
}

/// Fits a broken model at each candidate year and keeps the smallest objective.
///
/// Sharing flags come from `spec` (all per-segment by default). Infeasible
/// candidates are skipped; ties go to the earliest year.
pub fn scan_break<T: Scalar>(spec: &LinkSpec, data: &Dataset<T>, candidates: &[i32]) -> Result<BreakScan<T>> {
    spec.validate()?;
    let mut years = candidates.to_vec();
    years.sort_unstable();
    years.dedup();
    let sharing = spec.effective_sharing();
    let fits = years
        .par_iter()
        .map(|&year| {
            let mut s = spec.clone();
            s.break_year = Some(year);
            s.sharing = Some(sharing.clone());
            if s.validate().is_err() {
                return Ok(None);
            }
            feasible(fit(&s, data))
        })
        .collect::<Vec<_>>();
    let mut entries = Vec::new();
    let mut best: Option<(i32, FitResult<T>)> = None;
    for (year, f) in years.into_iter().zip(fits) {
        let Some(fit) = f? else { continue };
        let objective = fit.objective();
        entries.push(BreakScanEntry { year, objective });
        if best.as_ref().is_none_or(|(_, b)| objective < b.objective()) {
            best = Some((year, fit));
        }
    }
    let (best_year, best_fit) = best.ok_or_else(|| Error::input("no feasible break year among the candidates"))?;
    Ok(BreakScan { estimator: spec.estimator, entries, best_year, best_fit })
}
