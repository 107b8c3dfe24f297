//! Fit-quality statistics, Student-t tail probabilities and the augmented
//! Dickey-Fuller unit-root test.

mod adf;
pub mod special;

pub use adf::{adf_test, AdfResult, CriticalValues, Significance};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::AnnualSeries;

/// `1 - SSE/SST` over identical windows. Negative for predictions worse than the mean.
pub fn r_squared<T: Scalar>(observed: &AnnualSeries<T>, predicted: &AnnualSeries<T>) -> Result<T> {
    if observed.span() != predicted.span() {
        return Err(Error::input(format!(
            "observed covers {} but predicted covers {}",
            observed.span(),
            predicted.span()
        )));
    }
    r_squared_values(observed.values(), predicted.values())
}

pub(crate) fn r_squared_values<T: Scalar>(observed: &[T], predicted: &[T]) -> Result<T> {
    if observed.len() < 3 {
        return Err(Error::input("r-squared needs at least three points"));
    }
    let mean = observed.iter().copied().sum::<T>() / T::from_count(observed.len());
    let sst: T = observed.iter().map(|&y| (y - mean) * (y - mean)).sum();
    if sst.is_zero() {
        return Err(Error::domain("observed series has zero variance"));
    }
    let sse: T = observed.iter().zip(predicted).map(|(&y, &p)| (y - p) * (y - p)).sum();
    Ok(T::one() - sse / sst)
}

/// Population standard deviation of the residuals (divides by N).
pub fn residual_sigma<T: Scalar>(residuals: &AnnualSeries<T>) -> Result<T> {
    if residuals.len() < 2 {
        return Err(Error::input("residual sigma needs at least two points"));
    }
    Ok(population_sd(residuals.values()))
}

pub(crate) fn population_sd<T: Scalar>(v: &[T]) -> T {
    let n = T::from_count(v.len());
    let mean = v.iter().copied().sum::<T>() / n;
    (v.iter().map(|&e| (e - mean) * (e - mean)).sum::<T>() / n).sqrt()
}

/// Two-sided Student-t tail probability `P(|T| >= |t|)` with `dof` degrees of freedom.
pub fn t_pvalue<T: Scalar>(t: T, dof: usize) -> Result<T> {
    if dof == 0 {
        return Err(Error::input("degrees of freedom must be positive"));
    }
    if t.is_nan() {
        return Err(Error::domain("t statistic is NaN"));
    }
    if t.is_infinite() {
        return Ok(T::zero());
    }
    let nu = T::from_count(dof);
    let t2 = t * t;
    let denom = nu + t2;
    let p = special::inc_beta_xy(nu / T::lit(2.0), T::lit(0.5), nu / denom, t2 / denom);
    Ok(p.max(T::zero()).min(T::one()))
}
