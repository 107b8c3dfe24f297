use serde::Serialize;

use crate::dataset::Dataset;
use crate::diagnose::{population_sd, r_squared_values, t_pvalue};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};
use crate::scalar::Scalar;
use crate::series::{AnnualSeries, Units, YearRange};

use super::model::{LinearModel, SegmentCoefficients};
use super::spec::{Estimator, LinkSpec, Sharing, SharingFlags, MIN_SEGMENT_OBS};

/// Response and lagged predictors over a common, gap-free window.
#[derive(Clone, Debug)]
pub(crate) struct Sample<T> {
    pub years: YearRange,
    pub response: Vec<T>,
    pub response_units: Units,
    pub predictors: Vec<Vec<T>>,
}

pub(crate) fn build_sample<T: Scalar>(spec: &LinkSpec, data: &Dataset<T>) -> Result<Sample<T>> {
    let response = data.resolve(&spec.response)?;
    let predictors = spec
        .predictors
        .iter()
        .map(|p| Ok(data.resolve(&p.name)?.shift(p.lag)))
        .collect::<Result<Vec<_>>>()?;
    let years = match spec.window {
        Some(w) => w,
        None => predictors
            .iter()
            .try_fold(response.span(), |acc, s| acc.intersect(&s.span()))
            .ok_or_else(|| Error::input("response and lagged predictors do not overlap"))?,
    };
    Ok(Sample {
        years,
        response: response.slice(years)?.to_vec(),
        response_units: response.units(),
        predictors: predictors
            .iter()
            .map(|s| s.slice(years).map(<[T]>::to_vec))
            .collect::<Result<_>>()?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Term {
    Intercept,
    Slope(usize),
}

#[derive(Clone, Copy, Debug)]
struct Column {
    term: Term,
    /// `None` for a coefficient shared by every segment.
    segment: Option<usize>,
}

/// Maps coefficients to design-matrix columns given the break and sharing flags.
struct Layout {
    columns: Vec<Column>,
    n_segments: usize,
    break_year: Option<i32>,
}

impl Layout {
    fn new(n_predictors: usize, break_year: Option<i32>, sharing: &SharingFlags) -> Self {
        let n_segments = if break_year.is_some() { 2 } else { 1 };
        let mut columns = Vec::new();
        let terms = std::iter::once((Term::Intercept, sharing.intercept))
            .chain((0..n_predictors).map(|j| (Term::Slope(j), sharing.slopes[j])));
        for (term, flag) in terms {
            if n_segments == 1 || flag == Sharing::Shared {
                columns.push(Column { term, segment: None });
            } else {
                columns.extend((0..n_segments).map(|s| Column { term, segment: Some(s) }));
            }
        }
        Self { columns, n_segments, break_year }
    }

    fn segment_of(&self, year: i32) -> usize {
        match self.break_year {
            Some(b) if year >= b => 1,
            _ => 0,
        }
    }

    fn design<T: Scalar>(&self, sample: &Sample<T>) -> Matrix<T> {
        let n = sample.response.len();
        let mut d = Matrix::zeros(n, self.columns.len());
        for (i, year) in sample.years.years().enumerate() {
            let seg = self.segment_of(year);
            for (j, col) in self.columns.iter().enumerate() {
                if col.segment.is_some_and(|s| s != seg) {
                    continue;
                }
                d[(i, j)] = match col.term {
                    Term::Intercept => T::one(),
                    Term::Slope(k) => sample.predictors[k][i],
                };
            }
        }
        d
    }

    fn coefficient<T: Scalar>(&self, coefs: &[T], term: Term, segment: usize) -> T {
        self.columns
            .iter()
            .position(|c| c.term == term && c.segment.is_none_or(|s| s == segment))
            .map(|j| coefs[j])
            .expect("every term has a column for every segment")
    }

    fn segments<T: Scalar>(&self, coefs: &[T], n_predictors: usize) -> Vec<SegmentCoefficients<T>> {
        (0..self.n_segments)
            .map(|s| SegmentCoefficients {
                intercept: self.coefficient(coefs, Term::Intercept, s),
                slopes: (0..n_predictors).map(|j| self.coefficient(coefs, Term::Slope(j), s)).collect(),
            })
            .collect()
    }

    /// Column solved out of the endpoint constraint: the intercept of the last segment.
    fn eliminated(&self) -> usize {
        let last = self.n_segments - 1;
        self.columns
            .iter()
            .position(|c| c.term == Term::Intercept && c.segment.is_none_or(|s| s == last))
            .expect("intercept column")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamEstimate<T> {
    /// `intercept` or the predictor name.
    pub term: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lag: Option<i32>,
    /// Segment index for per-segment coefficients.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segment: Option<usize>,
    pub estimate: T,
    pub std_error: T,
    pub t_value: T,
    pub p_value: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult<T> {
    pub spec: LinkSpec,
    pub model: LinearModel<T>,
    pub params: Vec<ParamEstimate<T>>,
    pub window: YearRange,
    pub n_obs: usize,
    pub dof: usize,
    pub r2_annual: T,
    pub r2_cumulative: T,
    /// Annual sum of squared residuals.
    pub sse: T,
    /// Sum of squared gaps between observed and predicted cumulative curves.
    pub cumulative_sse: T,
    /// Population standard deviation of the annual residuals.
    pub sigma: T,
    #[serde(skip)]
    pub observed: AnnualSeries<T>,
    #[serde(skip)]
    pub fitted: AnnualSeries<T>,
    #[serde(skip)]
    pub residuals: AnnualSeries<T>,
}

impl<T: Scalar> FitResult<T> {
    /// Quantity the estimator minimized.
    pub fn objective(&self) -> T {
        match self.spec.estimator {
            Estimator::Ols => self.sse,
            Estimator::Cumulative => self.cumulative_sse,
        }
    }

    /// `C_obs(T_last) - C_pred(T_last)`; zero up to rounding for cumulative fits.
    pub fn endpoint_gap(&self) -> T {
        let obs: T = self.observed.values().iter().copied().sum();
        let pred: T = self.fitted.values().iter().copied().sum();
        obs - pred
    }

    pub fn intercept(&self, segment: usize) -> T {
        self.model.segments[segment].intercept
    }

    pub fn slope(&self, segment: usize, predictor: usize) -> T {
        self.model.segments[segment].slopes[predictor]
    }

    pub fn observed_cumulative(&self) -> AnnualSeries<T> {
        self.observed.cumulate()
    }

    pub fn fitted_cumulative(&self) -> AnnualSeries<T> {
        self.fitted.cumulate()
    }
}

/// Least squares on annual values.
pub fn ols_fit<T: Scalar>(spec: &LinkSpec, data: &Dataset<T>) -> Result<FitResult<T>> {
    fit_with(spec, data, Estimator::Ols)
}

/// Least squares on cumulative curves subject to `C_pred(T_last) = C_obs(T_last)`.
///
/// Both curves start from zero the year before the window. The constraint is
/// linear in the coefficients, so the last segment's intercept is solved out of
/// it and the remaining coefficients come from an unconstrained reduced problem.
pub fn cumulative_fit<T: Scalar>(spec: &LinkSpec, data: &Dataset<T>) -> Result<FitResult<T>> {
    fit_with(spec, data, Estimator::Cumulative)
}

/// Broken fit with the estimator named in `spec`; `spec.break_year` must be set.
pub fn fit_piecewise<T: Scalar>(spec: &LinkSpec, data: &Dataset<T>) -> Result<FitResult<T>> {
    if spec.break_year.is_none() {
        return Err(Error::input("piecewise fit needs a break year"));
    }
    fit(spec, data)
}

/// Fits with the estimator named in `spec`.
pub fn fit<T: Scalar>(spec: &LinkSpec, data: &Dataset<T>) -> Result<FitResult<T>> {
    fit_with(spec, data, spec.estimator)
}

fn fit_with<T: Scalar>(spec: &LinkSpec, data: &Dataset<T>, estimator: Estimator) -> Result<FitResult<T>> {
    spec.validate()?;
    let sample = build_sample(spec, data)?;
    fit_sample(spec, &sample, estimator)
}

fn check_break(spec: &LinkSpec, sharing: &SharingFlags, years: YearRange) -> Result<()> {
    let Some(b) = spec.break_year else { return Ok(()) };
    if b <= years.first || b > years.last {
        return Err(Error::input(format!("break year {b} not strictly inside sample {years}")));
    }
    if sharing.any_per_segment() {
        let before = (b - years.first) as usize;
        let after = (years.last - b + 1) as usize;
        if before.min(after) < MIN_SEGMENT_OBS {
            return Err(Error::input(format!(
                "break {b} leaves segments of {before} and {after} years; need {MIN_SEGMENT_OBS} each"
            )));
        }
    }
    Ok(())
}

pub(crate) fn fit_sample<T: Scalar>(spec: &LinkSpec, sample: &Sample<T>, estimator: Estimator) -> Result<FitResult<T>> {
    let sharing = spec.effective_sharing();
    check_break(spec, &sharing, sample.years)?;
    let layout = Layout::new(spec.predictors.len(), spec.break_year, &sharing);
    let n = sample.response.len();
    let p = layout.columns.len();
    if n < p + 2 {
        return Err(Error::input(format!("{n} observations for {p} coefficients; need at least {}", p + 2)));
    }

    let design = layout.design(sample);
    let y = &sample.response;
    let annual = least_squares(&design, y)?;
    let coefs = match estimator {
        Estimator::Ols => annual.coefficients.clone(),
        Estimator::Cumulative => cumulative_coefficients(&design, y, layout.eliminated())?,
    };

    let fitted = design.mul_vec(&coefs);
    let residuals: Vec<T> = y.iter().zip(&fitted).map(|(&a, &b)| a - b).collect();
    let sse: T = residuals.iter().map(|&e| e * e).sum();
    let dof = n - p;
    let s2 = sse / T::from_count(dof);

    let params = layout
        .columns
        .iter()
        .enumerate()
        .map(|(j, col)| {
            let std_error = (s2 * annual.xtx_inv[(j, j)]).sqrt();
            let estimate = coefs[j];
            let t_value = if std_error > T::zero() {
                estimate / std_error
            } else if estimate.is_zero() {
                T::zero()
            } else {
                T::infinity() * estimate.signum()
            };
            let (term, lag) = match col.term {
                Term::Intercept => ("intercept".to_string(), None),
                Term::Slope(k) => (spec.predictors[k].name.clone(), Some(spec.predictors[k].lag)),
            };
            Ok(ParamEstimate {
                term,
                lag,
                segment: col.segment,
                estimate,
                std_error,
                t_value,
                p_value: t_pvalue(t_value, dof)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let observed = AnnualSeries::new(sample.years.first, y.clone(), sample.response_units)?
        .with_label(spec.response.clone());
    let fitted = AnnualSeries::new(sample.years.first, fitted, sample.response_units)?
        .with_label(format!("fitted {}", spec.response));
    let residuals = AnnualSeries::new(sample.years.first, residuals, sample.response_units)?
        .with_label(format!("residual {}", spec.response));

    let c_obs = observed.cumulate();
    let c_pred = fitted.cumulate();
    let cumulative_sse = c_obs
        .values()
        .iter()
        .zip(c_pred.values())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum();

    let mut spec_echo = spec.clone();
    spec_echo.estimator = estimator;
    if spec_echo.break_year.is_some() {
        spec_echo.sharing = Some(sharing);
    }

    Ok(FitResult {
        model: LinearModel {
            id: format!("fit:{}", spec.response),
            response: spec.response.clone(),
            response_units: sample.response_units,
            predictors: spec.predictors.clone(),
            break_year: spec.break_year,
            segments: layout.segments(&coefs, spec.predictors.len()),
        },
        spec: spec_echo,
        params,
        window: sample.years,
        n_obs: n,
        dof,
        r2_annual: r_squared_values(observed.values(), fitted.values())?,
        r2_cumulative: r_squared_values(c_obs.values(), c_pred.values())?,
        sse,
        cumulative_sse,
        sigma: population_sd(residuals.values()),
        observed,
        fitted,
        residuals,
    })
}

/// Minimizes `||C(y) - C(D) b||²` subject to `1ᵀ D b = 1ᵀ y`, where `C` is the running sum.
fn cumulative_coefficients<T: Scalar>(design: &Matrix<T>, y: &[T], eliminated: usize) -> Result<Vec<T>> {
    let (n, p) = (design.rows(), design.cols());
    let mut cd = Matrix::zeros(n, p);
    let mut cy = vec![T::zero(); n];
    for i in 0..n {
        for j in 0..p {
            let prev = if i == 0 { T::zero() } else { cd[(i - 1, j)] };
            cd[(i, j)] = prev + design[(i, j)];
        }
        cy[i] = if i == 0 { y[0] } else { cy[i - 1] + y[i] };
    }
    let totals: Vec<T> = (0..p).map(|j| cd[(n - 1, j)]).collect();
    let total_y = cy[n - 1];
    let pivot = totals[eliminated];
    if pivot.is_zero() {
        return Err(Error::estimation("endpoint constraint does not involve the eliminated intercept"));
    }

    let kept: Vec<usize> = (0..p).filter(|&j| j != eliminated).collect();
    let mut reduced = Matrix::zeros(n, kept.len());
    let mut target = vec![T::zero(); n];
    for i in 0..n {
        let ce = cd[(i, eliminated)];
        for (k, &j) in kept.iter().enumerate() {
            reduced[(i, k)] = cd[(i, j)] - ce * totals[j] / pivot;
        }
        target[i] = cy[i] - ce * total_y / pivot;
    }
    let solved = least_squares(&reduced, &target)?.coefficients;

    let mut coefs = vec![T::zero(); p];
    let mut rest = total_y;
    for (k, &j) in kept.iter().enumerate() {
        coefs[j] = solved[k];
        rest = rest - totals[j] * solved[k];
    }
    coefs[eliminated] = rest / pivot;
    Ok(coefs)
}
