use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{AnnualSeries, Units, YearRange};

use super::spec::Predictor;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SegmentCoefficients<T> {
    pub intercept: T,
    /// One slope per predictor, in specification order.
    pub slopes: Vec<T>,
}

/// A lagged linear link with fixed coefficients, optionally broken at one year.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearModel<T> {
    pub id: String,
    pub response: String,
    pub response_units: Units,
    pub predictors: Vec<Predictor>,
    /// Segment 0 applies before this year, segment 1 from it on.
    pub break_year: Option<i32>,
    pub segments: Vec<SegmentCoefficients<T>>,
}

impl<T: Scalar> LinearModel<T> {
    /// Unbroken model `response = intercept + Σ slope_j * predictor_j`.
    pub fn linear(
        id: impl Into<String>,
        response: impl Into<String>,
        response_units: Units,
        predictors: Vec<Predictor>,
        intercept: T,
        slopes: Vec<T>,
    ) -> Self {
        Self {
            id: id.into(),
            response: response.into(),
            response_units,
            predictors,
            break_year: None,
            segments: vec![SegmentCoefficients { intercept, slopes }],
        }
    }

    pub fn segment_index(&self, year: i32) -> usize {
        match self.break_year {
            Some(b) if year >= b => self.segments.len() - 1,
            _ => 0,
        }
    }

    pub fn segment_for(&self, year: i32) -> &SegmentCoefficients<T> {
        &self.segments[self.segment_index(year)]
    }

    /// Response at `year` given predictor values already taken at their lags.
    pub fn evaluate(&self, year: i32, predictor_values: &[T]) -> T {
        let seg = self.segment_for(year);
        seg.slopes
            .iter()
            .zip(predictor_values)
            .fold(seg.intercept, |acc, (&b, &x)| acc + b * x)
    }
}

/// Evaluates `model` for every year in `years`, segment by segment.
pub fn predict<T: Scalar>(model: &LinearModel<T>, data: &Dataset<T>, years: YearRange) -> Result<AnnualSeries<T>> {
    let columns = model
        .predictors
        .iter()
        .map(|p| {
            let shifted = data.resolve(&p.name)?.shift(p.lag);
            shifted.slice(years).map(<[T]>::to_vec).map_err(|_| {
                Error::input(format!(
                    "predictor {:?} at lag {} does not cover {years}",
                    p.name, p.lag
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let values = years
        .years()
        .enumerate()
        .map(|(i, year)| {
            let xs: Vec<T> = columns.iter().map(|c| c[i]).collect();
            model.evaluate(year, &xs)
        })
        .collect();
    Ok(AnnualSeries::new(years.first, values, model.response_units)?
        .with_label(format!("{} ({})", model.response, model.id)))
}

/// The 1958 wage-unemployment curve `w = -0.90 + 9.64 u^-1.39`, both in percent.
pub fn original_phillips<T: Scalar>(unemployment_percent: T) -> Result<T> {
    if !(unemployment_percent > T::zero()) {
        return Err(Error::domain(format!(
            "unemployment must be positive, got {unemployment_percent}"
        )));
    }
    Ok(T::lit(-0.90) + T::lit(9.64) * unemployment_percent.powf(T::lit(-1.39)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq9() -> LinearModel<f64> {
        LinearModel {
            id: "eq9".into(),
            response: "u".into(),
            response_units: Units::Fraction,
            predictors: vec![Predictor::new("l", 0)],
            break_year: Some(1977),
            segments: vec![
                SegmentCoefficients { intercept: 0.0432, slopes: vec![-0.179] },
                SegmentCoefficients { intercept: 0.0432, slopes: vec![-1.556] },
            ],
        }
    }

    #[test]
    fn original_phillips_values() {
        assert!((original_phillips(1.0_f64).unwrap() - 8.74).abs() < 1e-12);
        // -0.90 + 9.64 * 2^-1.39
        let expected = -0.90 + 9.64 * (-1.39_f64 * 2.0_f64.ln()).exp();
        assert!((original_phillips(2.0_f64).unwrap() - expected).abs() < 1e-12);
        assert!((original_phillips(2.0_f64).unwrap() - 2.7785).abs() < 1e-3);
        assert!((original_phillips(1e9_f64).unwrap() + 0.90).abs() < 1e-9);
        assert!(matches!(original_phillips(0.0_f64), Err(Error::Domain(_))));
        assert!(matches!(original_phillips(-1.0_f64), Err(Error::Domain(_))));
    }

    #[test]
    fn segment_aware_prediction() {
        let l = AnnualSeries::new(1975, vec![-0.004; 4], Units::FractionPerYear).unwrap();
        let data = Dataset::new().with("l", l);
        let p = predict(&eq9(), &data, YearRange { first: 1975, last: 1978 }).unwrap();
        let pre = 0.0432 + 0.179 * 0.004;
        let post = 0.0432 + 1.556 * 0.004;
        assert!((p.values()[0] - pre).abs() < 1e-15);
        assert!((p.values()[1] - pre).abs() < 1e-15);
        assert!((p.values()[2] - 0.049_424).abs() < 1e-12);
        assert!((p.values()[3] - post).abs() < 1e-15);
    }

    #[test]
    fn zero_predictors_give_intercept() {
        let m = LinearModel::linear("m", "pi", Units::FractionPerYear, vec![Predictor::new("x", 1)], 0.03, vec![2.0]);
        let x = AnnualSeries::new(1990, vec![0.0; 10], Units::FractionPerYear).unwrap();
        let p = predict(&m, &Dataset::new().with("x", x), YearRange { first: 1991, last: 1999 }).unwrap();
        assert!(p.values().iter().all(|&v| v == 0.03));
    }

    #[test]
    fn missing_predictor_years() {
        let m = LinearModel::linear("m", "pi", Units::FractionPerYear, vec![Predictor::new("x", 2)], 0.0, vec![1.0]);
        let x = AnnualSeries::new(1990, vec![0.0; 10], Units::FractionPerYear).unwrap();
        let data = Dataset::new().with("x", x);
        assert!(predict(&m, &data, YearRange { first: 1991, last: 1999 }).is_err());
        assert!(predict(&m, &data, YearRange { first: 1992, last: 2001 }).is_ok());
    }
}
