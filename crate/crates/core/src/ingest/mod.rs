//! Loading annual series from CSV files, JSON manifests and a cached HTTP
//! source, with conversion to internal units on the way in.
//!
//! Internally rates are fractions (0.05, not 5) and headcounts are persons.

mod file;
mod manifest;
mod remote;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{AnnualSeries, Units};

pub use file::{read_csv_file, read_csv_series, write_csv_series};
pub use manifest::{load_manifest, DatasetManifest, ManifestEntry};
pub use remote::{parse_payload, Fetcher, RemoteDescriptor, CACHE_DIR_ENV};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    CpiInflation,
    DgdpInflation,
    Unemployment,
    LaborForce,
    Population,
}

impl SeriesKind {
    pub fn internal_units(self) -> Units {
        match self {
            SeriesKind::CpiInflation | SeriesKind::DgdpInflation => Units::FractionPerYear,
            SeriesKind::Unemployment => Units::Fraction,
            SeriesKind::LaborForce | SeriesKind::Population => Units::Persons,
        }
    }
}

/// Units a source is declared in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceUnits {
    Fraction,
    Percent,
    Persons,
    Thousands,
}

impl SourceUnits {
    /// Fails unless these units can describe a series of `kind`.
    pub fn check(self, kind: SeriesKind) -> Result<Self> {
        let count = kind.internal_units() == Units::Persons;
        let ok = match self {
            SourceUnits::Fraction | SourceUnits::Percent => !count,
            SourceUnits::Persons | SourceUnits::Thousands => count,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::input(format!("units {self} cannot describe a {kind:?} series")))
        }
    }

    pub fn to_internal<T: Scalar>(self, v: T) -> T {
        match self {
            SourceUnits::Fraction | SourceUnits::Persons => v,
            SourceUnits::Percent => v / T::lit(100.0),
            SourceUnits::Thousands => v * T::lit(1000.0),
        }
    }
}

impl fmt::Display for SourceUnits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceUnits::Fraction => "fraction",
            SourceUnits::Percent => "percent",
            SourceUnits::Persons => "persons",
            SourceUnits::Thousands => "thousands",
        })
    }
}

impl FromStr for SourceUnits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fraction" => Ok(SourceUnits::Fraction),
            "percent" => Ok(SourceUnits::Percent),
            "persons" => Ok(SourceUnits::Persons),
            "thousands" => Ok(SourceUnits::Thousands),
            other => Err(Error::input(format!("unknown units {other:?}"))),
        }
    }
}

/// Labor force as a fixed share of population.
pub fn participation_labor_force<T: Scalar>(population: &AnnualSeries<T>, rate: T) -> Result<AnnualSeries<T>> {
    if !(rate >= T::zero() && rate <= T::one()) {
        return Err(Error::input(format!("participation rate {rate} outside [0, 1]")));
    }
    if population.units() != Units::Persons {
        return Err(Error::UnitMismatch { left: population.units(), right: Units::Persons });
    }
    Ok(population.scale(rate).with_label("labor force"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn participation() {
        let pop = AnnualSeries::new(2010, vec![128_600_000.0_f64, 120_000_000.0], Units::Persons).unwrap();
        assert!(participation_labor_force(&pop, 0.0).unwrap().values().iter().all(|&v| v == 0.0));
        assert_eq!(participation_labor_force(&pop, 1.0).unwrap().values(), pop.values());
        let lf = participation_labor_force(&pop, 0.521).unwrap();
        assert!((lf.values()[0] - 67_000_600.0).abs() < 1e-6);
        assert!(participation_labor_force(&pop, 1.01).is_err());
        assert!(participation_labor_force(&pop, -0.1).is_err());
        assert!(participation_labor_force(&pop, f64::NAN).is_err());
        let rate = AnnualSeries::new(2010, vec![0.05_f64], Units::Fraction).unwrap();
        assert!(matches!(participation_labor_force(&rate, 0.5), Err(Error::UnitMismatch { .. })));
    }

    #[test]
    fn exact_conversions() {
        assert_eq!(SourceUnits::Percent.to_internal(2.5_f64), 0.025);
        assert_eq!(SourceUnits::Thousands.to_internal(66_900.0_f64), 66_900_000.0);
        for u in [SourceUnits::Fraction, SourceUnits::Percent, SourceUnits::Persons, SourceUnits::Thousands] {
            assert_eq!(u.to_string().parse::<SourceUnits>().unwrap(), u);
        }
    }
}
