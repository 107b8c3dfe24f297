//! Year-indexed annual series and the transforms the estimators are built on.
//!
//! Every rate is stored as a dimensionless fraction (`0.05` is 5%). Series
//! are gap-free by construction: a value exists for every year between
//! [`AnnualSeries::first_year`] and [`AnnualSeries::last_year`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Physical meaning of a series' values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Units {
    /// Annual rate of change, e.g. inflation or labor-force growth.
    FractionPerYear,
    /// Level expressed as a fraction, e.g. the unemployment rate.
    Fraction,
    /// Head count.
    Persons,
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Units::FractionPerYear => "fraction-per-year",
            Units::Fraction => "fraction",
            Units::Persons => "persons",
        })
    }
}

/// Inclusive range of calendar years, written `Y1:Y2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct YearRange {
    pub first: i32,
    pub last: i32,
}

impl YearRange {
    pub fn new(first: i32, last: i32) -> Result<Self> {
        if first > last {
            return Err(Error::input(format!("empty year range {first}:{last}")));
        }
        Ok(Self { first, last })
    }

    pub fn len(&self) -> usize {
        (self.last - self.first + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, year: i32) -> bool {
        year >= self.first && year <= self.last
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.first..=self.last
    }

    pub fn intersect(&self, other: &YearRange) -> Option<YearRange> {
        let first = self.first.max(other.first);
        let last = self.last.min(other.last);
        (first <= last).then_some(YearRange { first, last })
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.first, self.last)
    }
}

impl From<YearRange> for String {
    fn from(r: YearRange) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for YearRange {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for YearRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::input(format!("expected Y1:Y2, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<i32>()
                .map_err(|_| Error::input(format!("bad year {t:?} in range {s:?}")))
        };
        YearRange::new(parse(a)?, parse(b)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnualSeries<T> {
    start_year: i32,
    values: Vec<T>,
    label: String,
    units: Units,
}

impl<T: Scalar> AnnualSeries<T> {
    /// Builds a series whose first value belongs to `start_year`.
    pub fn new(start_year: i32, values: Vec<T>, units: Units) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::input("series must contain at least one value"));
        }
        Ok(Self { start_year, values, label: String::new(), units })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn first_year(&self) -> i32 {
        self.start_year
    }

    pub fn last_year(&self) -> i32 {
        self.start_year + self.values.len() as i32 - 1
    }

    pub fn span(&self) -> YearRange {
        YearRange { first: self.first_year(), last: self.last_year() }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.values.len()).map(move |i| self.start_year + i as i32)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, T)> + '_ {
        self.years().zip(self.values.iter().copied())
    }

    pub fn get(&self, year: i32) -> Option<T> {
        let offset = year.checked_sub(self.start_year)?;
        usize::try_from(offset).ok().and_then(|i| self.values.get(i).copied())
    }

    /// Values over `range`, or an error naming the first uncovered year.
    pub fn slice(&self, range: YearRange) -> Result<&[T]> {
        if !self.span().contains(range.first) || !self.span().contains(range.last) {
            let missing = range.years().find(|y| self.get(*y).is_none()).unwrap_or(range.first);
            return Err(Error::input(format!(
                "series {:?} ({}) does not cover year {missing}",
                self.label,
                self.span()
            )));
        }
        let lo = (range.first - self.start_year) as usize;
        Ok(&self.values[lo..lo + range.len()])
    }

    /// Restricts the series to `range`, which must be covered.
    pub fn window(&self, range: YearRange) -> Result<Self> {
        let values = self.slice(range)?.to_vec();
        Ok(Self { start_year: range.first, values, label: self.label.clone(), units: self.units })
    }

    /// Re-indexes so the value formerly at year `y` sits at `y + lag`.
    pub fn shift(&self, lag: i32) -> Self {
        Self {
            start_year: self.start_year + lag,
            values: self.values.clone(),
            label: self.label.clone(),
            units: self.units,
        }
    }

    /// Backward log-difference `ln x(t) - ln x(t-1)`; the result starts one year later.
    pub fn log_growth(&self) -> Result<Self> {
        if self.units != Units::Persons {
            return Err(Error::UnitMismatch { left: self.units, right: Units::Persons });
        }
        if self.values.len() < 2 {
            return Err(Error::input("log growth needs at least two levels"));
        }
        if let Some((year, v)) = self.iter().find(|(_, v)| !(*v > T::zero())) {
            return Err(Error::domain(format!("non-positive level {v} in year {year}")));
        }
        let values = self.values.windows(2).map(|w| w[1].ln() - w[0].ln()).collect();
        Ok(Self {
            start_year: self.start_year + 1,
            values,
            label: format!("dlog({})", self.label),
            units: Units::FractionPerYear,
        })
    }

    /// Running sum; the first value equals the first input value.
    pub fn cumulate(&self) -> Self {
        let values = self
            .values
            .iter()
            .scan(T::zero(), |acc, &v| {
                *acc = *acc + v;
                Some(*acc)
            })
            .collect();
        Self {
            start_year: self.start_year,
            values,
            label: format!("cum({})", self.label),
            units: self.units,
        }
    }

    /// Centered three-year mean; endpoints average the two available points.
    pub fn moving_average_3(&self) -> Self {
        let n = self.values.len();
        let v = &self.values;
        let values = (0..n)
            .map(|i| {
                let lo = i.saturating_sub(1);
                let hi = (i + 1).min(n - 1);
                let window = &v[lo..=hi];
                window.iter().copied().sum::<T>() / T::from_count(window.len())
            })
            .collect();
        Self {
            start_year: self.start_year,
            values,
            label: format!("ma3({})", self.label),
            units: self.units,
        }
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            start_year: self.start_year,
            values: self.values.iter().map(|&v| v * factor).collect(),
            label: self.label.clone(),
            units: self.units,
        }
    }

    /// Pointwise combination of two series with equal units over identical years.
    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.units != other.units {
            return Err(Error::UnitMismatch { left: self.units, right: other.units });
        }
        if self.span() != other.span() {
            return Err(Error::input(format!(
                "series cover different years: {} vs {}",
                self.span(),
                other.span()
            )));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self {
            start_year: self.start_year,
            values,
            label: self.label.clone(),
            units: self.units,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn mean(&self) -> T {
        self.values.iter().copied().sum::<T>() / T::from_count(self.values.len())
    }
}

/// Equal-length value vectors over the years two series share.
#[derive(Clone, Debug, PartialEq)]
pub struct Aligned<T> {
    pub years: YearRange,
    pub a: Vec<T>,
    pub b: Vec<T>,
}

impl<T> Aligned<T> {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// Pairs `a(t)` with `b(t - lag_b)` over the overlap of `a` and `shift(b, lag_b)`.
pub fn align<T: Scalar>(a: &AnnualSeries<T>, b: &AnnualSeries<T>, lag_b: i32) -> Result<Aligned<T>> {
    let shifted = b.shift(lag_b);
    let years = a.span().intersect(&shifted.span()).ok_or_else(|| {
        Error::input(format!(
            "no overlap between {} and {} shifted by {lag_b}",
            a.span(),
            b.span()
        ))
    })?;
    Ok(Aligned { years, a: a.slice(years)?.to_vec(), b: shifted.slice(years)?.to_vec() })
}
