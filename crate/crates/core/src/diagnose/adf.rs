use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};
use crate::scalar::Scalar;
use crate::series::AnnualSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Significance {
    #[serde(rename = "1%")]
    OnePercent,
    #[serde(rename = "5%")]
    FivePercent,
    #[serde(rename = "10%")]
    TenPercent,
}

impl Significance {
    pub const ALL: [Significance; 3] =
        [Significance::OnePercent, Significance::FivePercent, Significance::TenPercent];
}

/// Dickey-Fuller critical values for the constant, no-trend regression.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalValues {
    /// Tabulated sample size the values belong to; `None` is the asymptotic row.
    pub table_size: Option<usize>,
    pub one_percent: f64,
    pub five_percent: f64,
    pub ten_percent: f64,
}

impl CriticalValues {
    pub fn at(&self, level: Significance) -> f64 {
        match level {
            Significance::OnePercent => self.one_percent,
            Significance::FivePercent => self.five_percent,
            Significance::TenPercent => self.ten_percent,
        }
    }
}

// Fuller (1976), Table 8.5.2, tau_mu.
const DF_TABLE: [CriticalValues; 4] = [
    CriticalValues { table_size: Some(25), one_percent: -3.75, five_percent: -3.00, ten_percent: -2.63 },
    CriticalValues { table_size: Some(50), one_percent: -3.58, five_percent: -2.93, ten_percent: -2.60 },
    CriticalValues { table_size: Some(100), one_percent: -3.51, five_percent: -2.89, ten_percent: -2.58 },
    CriticalValues { table_size: None, one_percent: -3.43, five_percent: -2.86, ten_percent: -2.57 },
];

/// Picks the table row nearest to `n` on the `1/n` scale the response surface is linear in.
pub(crate) fn critical_values_for(n: usize) -> CriticalValues {
    let inv = |row: &CriticalValues| row.table_size.map_or(0.0, |m| 1.0 / m as f64);
    let target = 1.0 / n.max(1) as f64;
    *DF_TABLE
        .iter()
        .min_by(|a, b| (inv(a) - target).abs().total_cmp(&(inv(b) - target).abs()))
        .expect("non-empty table")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdfResult<T> {
    /// t-ratio on the lagged level.
    pub statistic: T,
    pub lag_order: usize,
    /// Observations entering the test regression.
    pub n_obs: usize,
    pub specification: &'static str,
    pub critical_values: CriticalValues,
}

impl<T: Scalar> AdfResult<T> {
    /// True when the unit-root null is rejected at `level`.
    pub fn rejects(&self, level: Significance) -> bool {
        self.statistic.to_f64_lossy() < self.critical_values.at(level)
    }
}

/// Augmented Dickey-Fuller test with a constant and `lag_order` lagged differences.
///
/// Regresses `Δs(t)` on `1`, `s(t-1)` and `Δs(t-1) .. Δs(t-lag_order)`.
pub fn adf_test<T: Scalar>(series: &AnnualSeries<T>, lag_order: usize) -> Result<AdfResult<T>> {
    let y = series.values();
    let n = y.len();
    if n < lag_order + 10 {
        return Err(Error::input(format!(
            "ADF with {lag_order} lags needs at least {} points, got {n}",
            lag_order + 10
        )));
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::domain("ADF test on a constant series"));
    }
    let dy: Vec<T> = y.windows(2).map(|w| w[1] - w[0]).collect();
    // dy[t-1] = y[t] - y[t-1]
    let rows: Vec<usize> = ((lag_order + 1)..n).collect();
    let m = rows.len();
    let mut x = Matrix::zeros(m, 2 + lag_order);
    let mut target = Vec::with_capacity(m);
    for (r, &t) in rows.iter().enumerate() {
        x[(r, 0)] = T::one();
        x[(r, 1)] = y[t - 1];
        for i in 1..=lag_order {
            x[(r, 1 + i)] = dy[t - 1 - i];
        }
        target.push(dy[t - 1]);
    }
    let ls = least_squares(&x, &target).map_err(|e| match e {
        Error::Estimation(msg) => Error::domain(format!("degenerate ADF regression: {msg}")),
        other => other,
    })?;
    let fitted = x.mul_vec(&ls.coefficients);
    let sse: T = target.iter().zip(&fitted).map(|(&a, &b)| (a - b) * (a - b)).sum();
    let dof = m - x.cols();
    if dof == 0 {
        return Err(Error::input("no residual degrees of freedom in ADF regression"));
    }
    let s2 = sse / T::from_count(dof);
    let se = (s2 * ls.xtx_inv[(1, 1)]).sqrt();
    if !(se > T::zero()) {
        return Err(Error::domain("ADF regression fits exactly; statistic undefined"));
    }
    Ok(AdfResult {
        statistic: ls.coefficients[1] / se,
        lag_order,
        n_obs: m,
        specification: "constant, no trend",
        critical_values: critical_values_for(m),
    })
}
