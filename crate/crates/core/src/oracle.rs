//! Synthetic data with known coefficients and slow, transparent reference
//! solvers that share no code with the estimators they check.
//!
//! The random stream is ChaCha8 seeded from a `u64`, stable across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::estimate::{Estimator, LinkSpec, Predictor, Sharing, SharingFlags};
use crate::scalar::Scalar;
use crate::series::{AnnualSeries, Units};

/// Reflecting bound of the synthetic growth walk, per year.
pub const WALK_BOUND: f64 = 0.02;
/// Standard deviation of one walk step.
pub const WALK_STEP: f64 = 0.005;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthBreak {
    pub year: i32,
    /// Coefficients from `year` on.
    pub intercept: f64,
    pub slopes: Vec<f64>,
}

/// Everything that determines a synthetic dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub start_year: i32,
    /// Response length.
    pub length: usize,
    pub intercept: f64,
    /// One slope per predictor.
    pub slopes: Vec<f64>,
    /// Shared by all predictors: `y(t) = a + Σ b_j x_j(t - lag)`.
    #[serde(default)]
    pub lag: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub break_at: Option<SynthBreak>,
    pub noise_sd: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn simple(intercept: f64, slope: f64, noise_sd: f64, length: usize, seed: u64) -> Self {
        Self {
            start_year: 1960,
            length,
            intercept,
            slopes: vec![slope],
            lag: 0,
            break_at: None,
            noise_sd,
            seed,
        }
    }

    /// Name of predictor `j` in [`SynthData::dataset`].
    pub fn predictor_name(j: usize) -> String {
        format!("x{j}")
    }

    /// A link specification matching the generating structure.
    pub fn link_spec(&self, estimator: Estimator) -> LinkSpec {
        let predictors = (0..self.slopes.len()).map(|j| Predictor::new(Self::predictor_name(j), self.lag)).collect();
        let mut spec = LinkSpec::new("y", predictors, estimator);
        if let Some(b) = &self.break_at {
            let flag = |same: bool| if same { Sharing::Shared } else { Sharing::PerSegment };
            let sharing = SharingFlags {
                intercept: flag(b.intercept == self.intercept),
                slopes: self.slopes.iter().zip(&b.slopes).map(|(a, c)| flag(a == c)).collect(),
            };
            spec = spec.with_break(b.year, sharing);
        }
        spec
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthData<T> {
    pub predictors: Vec<AnnualSeries<T>>,
    pub response: AnnualSeries<T>,
}

impl<T: Scalar> SynthData<T> {
    /// Predictors as `x0, x1, ..` and the response as `y`.
    pub fn dataset(&self) -> Dataset<T> {
        let mut d = Dataset::new();
        for (j, x) in self.predictors.iter().enumerate() {
            d.insert(SynthSpec::predictor_name(j), x.clone());
        }
        d.insert("y", self.response.clone());
        d
    }
}

fn reflect(mut v: f64, bound: f64) -> f64 {
    while v.abs() > bound {
        v = if v > bound { 2.0 * bound - v } else { -2.0 * bound - v };
    }
    v
}

fn walk(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let step = Normal::new(0.0, WALK_STEP).expect("valid step");
    let mut x = rng.random_range(-WALK_BOUND / 2.0..WALK_BOUND / 2.0);
    (0..n)
        .map(|_| {
            let v = x;
            x = reflect(x + step.sample(rng), WALK_BOUND);
            v
        })
        .collect()
}

/// Draws a dataset from `spec`.
///
/// Predictors are drawn before noise, so they depend only on the seed, the
/// length, the lag and the number of predictors, never on the coefficients.
pub fn generate<T: Scalar>(spec: &SynthSpec) -> Result<SynthData<T>> {
    if !(spec.noise_sd >= 0.0) || !spec.noise_sd.is_finite() {
        return Err(Error::input(format!("noise sd must be finite and non-negative, got {}", spec.noise_sd)));
    }
    if spec.length < 10 {
        return Err(Error::input(format!("synthetic length {} below 10", spec.length)));
    }
    if spec.slopes.is_empty() {
        return Err(Error::input("synthetic model needs at least one slope"));
    }
    if let Some(b) = &spec.break_at {
        if b.slopes.len() != spec.slopes.len() {
            return Err(Error::input("break slopes must match the predictor count"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_x = spec.length + spec.lag.unsigned_abs() as usize;
    let x_start = spec.start_year - spec.lag.max(0);
    let xs: Vec<Vec<f64>> = spec.slopes.iter().map(|_| walk(&mut rng, n_x)).collect();
    let noise = Normal::new(0.0, spec.noise_sd).map_err(|e| Error::input(e.to_string()))?;
    let y: Vec<f64> = (0..spec.length)
        .map(|i| {
            let year = spec.start_year + i as i32;
            let (a, b) = match &spec.break_at {
                Some(brk) if year >= brk.year => (brk.intercept, &brk.slopes),
                _ => (spec.intercept, &spec.slopes),
            };
            let xi = (year - spec.lag - x_start) as usize;
            let mean = b.iter().zip(&xs).fold(a, |acc, (bj, x)| acc + bj * x[xi]);
            if spec.noise_sd > 0.0 {
                mean + noise.sample(&mut rng)
            } else {
                mean
            }
        })
        .collect();
    let to_t = |v: Vec<f64>| v.into_iter().map(T::lit).collect::<Vec<T>>();
    Ok(SynthData {
        predictors: xs
            .into_iter()
            .enumerate()
            .map(|(j, x)| {
                AnnualSeries::new(x_start, to_t(x), Units::FractionPerYear).map(|s| s.with_label(SynthSpec::predictor_name(j)))
            })
            .collect::<Result<_>>()?,
        response: AnnualSeries::new(spec.start_year, to_t(y), Units::FractionPerYear)?.with_label("y"),
    })
}

/// Seeded Gaussian white noise.
pub fn white_noise(n: usize, sd: f64, seed: u64) -> Result<AnnualSeries<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = Normal::new(0.0, sd).map_err(|e| Error::input(e.to_string()))?;
    AnnualSeries::new(1800, (0..n).map(|_| d.sample(&mut rng)).collect(), Units::Fraction)
}

/// Seeded Gaussian random walk starting at zero.
pub fn random_walk(n: usize, sd: f64, seed: u64) -> Result<AnnualSeries<f64>> {
    let steps = white_noise(n, sd, seed)?;
    let mut acc = 0.0;
    let v = steps.values().iter().map(|e| {
        acc += e;
        acc
    });
    AnnualSeries::new(1800, v.collect(), Units::Fraction)
}

/// Least squares by solving `XᵀX b = Xᵀy` with Gauss-Jordan elimination.
///
/// `columns` is the full design, intercept included if wanted.
pub fn brute_force_design(columns: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let p = columns.len();
    if p == 0 || columns.iter().any(|c| c.len() != y.len()) {
        return Err(Error::input("design columns must be non-empty and match the response length"));
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    // augmented [XᵀX | Xᵀy]
    let mut m: Vec<Vec<f64>> = (0..p)
        .map(|i| {
            let mut row: Vec<f64> = (0..p).map(|j| dot(&columns[i], &columns[j])).collect();
            row.push(dot(&columns[i], y));
            row
        })
        .collect();
    let scale = (0..p).map(|i| m[i][i].abs()).fold(0.0, f64::max);
    for k in 0..p {
        let piv = (k..p).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs())).expect("rows remain");
        if !(m[piv][k].abs() > 1e-12 * scale) {
            return Err(Error::estimation("normal equations are singular"));
        }
        m.swap(k, piv);
        let d = m[k][k];
        for v in m[k].iter_mut() {
            *v /= d;
        }
        for i in 0..p {
            if i != k {
                let f = m[i][k];
                if f != 0.0 {
                    for j in k..=p {
                        m[i][j] -= f * m[k][j];
                    }
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[p]).collect())
}

/// `[intercept, slopes..]` for `y = a + Σ b_j x_j`.
pub fn brute_force_ols(predictors: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let mut cols = vec![vec![1.0; y.len()]];
    cols.extend(predictors.iter().cloned());
    brute_force_design(&cols, y)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridOptimum {
    pub intercept: f64,
    pub slope: f64,
    /// Constrained cumulative SSE at the optimum.
    pub sse: f64,
    /// Grid spacing in the slope.
    pub spacing: f64,
}

/// Cumulative SSE of `y ≈ a + b x` with `a` pinned by the endpoint constraint.
fn constrained_sse(x: &[f64], y: &[f64], b: f64) -> (f64, f64) {
    let n = y.len() as f64;
    let a = (y.iter().sum::<f64>() - b * x.iter().sum::<f64>()) / n;
    let (mut cy, mut cp, mut sse) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        cy += yi;
        cp += a + b * xi;
        sse += (cy - cp) * (cy - cp);
    }
    (a, sse)
}

/// Exhaustive search over `steps` evenly spaced slopes in `[lo, hi]`.
pub fn brute_force_constrained(x: &[f64], y: &[f64], lo: f64, hi: f64, steps: usize) -> Result<GridOptimum> {
    if steps < 2 || !(hi > lo) || x.len() != y.len() || y.is_empty() {
        return Err(Error::input("grid needs lo < hi, at least two steps and matching non-empty samples"));
    }
    let spacing = (hi - lo) / (steps - 1) as f64;
    let mut best: Option<GridOptimum> = None;
    for k in 0..steps {
        let slope = if k == steps - 1 { hi } else { lo + spacing * k as f64 };
        let (intercept, sse) = constrained_sse(x, y, slope);
        if best.is_none_or(|b| sse < b.sse) {
            best = Some(GridOptimum { intercept, slope, sse, spacing });
        }
    }
    Ok(best.expect("at least two grid points"))
}

/// Nested grids: each level re-centres on the previous optimum with half-width
/// `shrink` times the last one. With odd `steps` the old optimum stays on the
/// grid, so the SSE never increases from level to level.
pub fn brute_force_constrained_nested(
    x: &[f64],
    y: &[f64],
    center: f64,
    half_width: f64,
    steps: usize,
    levels: usize,
    shrink: f64,
) -> Result<Vec<GridOptimum>> {
    if steps % 2 == 0 || !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::input("nested grid needs odd steps and 0 < shrink < 1"));
    }
    let mut trace = Vec::with_capacity(levels);
    let (mut c, mut hw) = (center, half_width);
    for _ in 0..levels {
        let opt = brute_force_constrained(x, y, c - hw, c + hw, steps)?;
        trace.push(opt);
        c = opt.slope;
        hw *= shrink;
    }
    Ok(trace)
}
