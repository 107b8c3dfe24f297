//! Published Japan links with their printed coefficients, frozen.
//!
//! Series names: `l` labor-force growth, `u` unemployment, `cpi` and `dgdp`
//! inflation (CPI and GDP deflator), `pi` CPI inflation as a predictor.

use crate::error::{Error, Result};
use crate::estimate::{LinearModel, Predictor, SegmentCoefficients};
use crate::scalar::Scalar;
use crate::series::Units;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegistryEntry {
    pub id: &'static str,
    pub description: &'static str,
}

pub const REGISTRY: [RegistryEntry; 5] = [
    RegistryEntry { id: "anti-phillips", description: "u = 0.044 - 1.10 pi, fitted 1982-2012" },
    RegistryEntry { id: "cpi-labor", description: "cpi = 0.0007 + 1.31 l" },
    RegistryEntry { id: "dgdp-labor", description: "dgdp = -0.0084 + 1.90 l" },
    RegistryEntry {
        id: "unemployment-labor",
        description: "u = 0.0432 - 0.179 l before 1977, 0.0432 - 1.556 l from 1977",
    },
    RegistryEntry {
        id: "generalized",
        description: "dgdp = 0.161 - 10.0 l + 0.9 u before 1982, -0.0392 + 2.80 l + 0.9 u from 1982",
    },
];

fn seg<T: Scalar>(intercept: f64, slopes: &[f64]) -> SegmentCoefficients<T> {
    SegmentCoefficients { intercept: T::lit(intercept), slopes: slopes.iter().map(|&b| T::lit(b)).collect() }
}

fn model<T: Scalar>(
    id: &str,
    response: &str,
    units: Units,
    predictors: &[&str],
    break_year: Option<i32>,
    segments: Vec<SegmentCoefficients<T>>,
) -> LinearModel<T> {
    LinearModel {
        id: id.to_string(),
        response: response.to_string(),
        response_units: units,
        predictors: predictors.iter().map(|p| Predictor::new(*p, 0)).collect(),
        break_year,
        segments,
    }
}

/// Looks up a registry model by id.
pub fn registry_model<T: Scalar>(id: &str) -> Result<LinearModel<T>> {
    let inflation = Units::FractionPerYear;
    let rate = Units::Fraction;
    Ok(match id {
        "anti-phillips" => model(id, "u", rate, &["pi"], None, vec![seg(0.044, &[-1.10])]),
        "cpi-labor" => model(id, "cpi", inflation, &["l"], None, vec![seg(0.0007, &[1.31])]),
        "dgdp-labor" => model(id, "dgdp", inflation, &["l"], None, vec![seg(-0.0084, &[1.90])]),
        "unemployment-labor" => model(
            id,
            "u",
            rate,
            &["l"],
            Some(1977),
            vec![seg(0.0432, &[-0.179]), seg(0.0432, &[-1.556])],
        ),
        "generalized" => model(
            id,
            "dgdp",
            inflation,
            &["l", "u"],
            Some(1982),
            vec![seg(0.161, &[-10.0, 0.9]), seg(-0.0392, &[2.80, 0.9])],
        ),
        other => {
            let known: Vec<_> = REGISTRY.iter().map(|e| e.id).collect();
            return Err(Error::input(format!("unknown model {other:?}; known: {}", known.join(", "))));
        }
    })
}
