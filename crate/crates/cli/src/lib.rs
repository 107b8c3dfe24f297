//! Command-line front end: fit, scan, diagnose, forecast, plot and fetch.
//!
//! Exit codes: 0 success, 1 data or model error, 2 usage error.

pub mod svg;

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use laborcurve::diagnose::{adf_test, AdfResult, Significance};
use laborcurve::estimate::{self, Criterion, Estimator, LinkSpec, Predictor, Sharing, SharingFlags};
use laborcurve::forecast::{self, build_scenario, linear_path, registry_model, LaborForceSource, Variable};
use laborcurve::ingest::{write_csv_series, DatasetManifest, Fetcher, SeriesKind, SourceUnits};
use laborcurve::oracle::{generate, SynthBreak, SynthSpec};
use laborcurve::{Data, Series, Units, YearRange};

use svg::{emit_svg_chart, ChartSeries, ChartStyle};

#[derive(Debug)]
pub enum CliError {
    /// Bad or missing arguments; exit code 2.
    Usage(String),
    /// Data, model or I/O failure; exit code 1.
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Run(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<laborcurve::Error> for CliError {
    fn from(e: laborcurve::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

// Status lines go to stdout; a closed pipe must not abort the command.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Parser, Debug)]
#[command(name = "laborcurve", version, about = "Inflation, unemployment and labor-force links: fit, scan, diagnose, forecast")]
pub struct Cli {
    /// Dataset manifest (JSON) naming the input series.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Output directory, created if absent.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Artifact formats; comma-separated or repeated.
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    pub format: Vec<Format>,
    /// Fit or display window, `Y1:Y2`.
    #[arg(long, global = true)]
    pub window: Option<YearRange>,
    /// Seed for synthetic generation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cache for remote series; defaults to $LABORCURVE_CACHE_DIR, then OUT/cache.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// HTTP timeout in seconds.
    #[arg(long, global = true, default_value_t = 30)]
    pub timeout: u64,
    /// Never use the network; remote series must be cached.
    #[arg(long, global = true)]
    pub offline: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Ols,
    Cumulative,
}

impl From<EstimatorArg> for Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Ols => Estimator::Ols,
            EstimatorArg::Cumulative => Estimator::Cumulative,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    AnnualR2,
    CumulativeR2,
}

#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// JSON link specification; replaces the inline flags below.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub response: Option<String>,
    /// Predictor series, optionally with a lag in years (`dlog(lf):1`).
    #[arg(long = "predictor", value_name = "NAME[:LAG]", allow_hyphen_values = true)]
    pub predictors: Vec<String>,
    #[arg(long, value_enum, default_value = "ols")]
    pub estimator: EstimatorArg,
    /// First year of the second segment.
    #[arg(long = "break")]
    pub break_year: Option<i32>,
    /// Terms sharing one coefficient across the break: `intercept` or a predictor name.
    #[arg(long = "shared", value_name = "TERM")]
    pub shared: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit a link; writes fit.json and residuals.csv.
    Fit(SpecArgs),
    /// Refit over a range of lags for one predictor.
    ScanLag {
        #[command(flatten)]
        spec: SpecArgs,
        /// Index of the predictor whose lag is scanned.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value = "-5:5", allow_hyphen_values = true)]
        lags: String,
        #[arg(long, value_enum)]
        criterion: Option<CriterionArg>,
    },
    /// Fit broken models over candidate break years.
    ScanBreak {
        #[command(flatten)]
        spec: SpecArgs,
        /// Candidate years `Y1:Y2`; defaults to every year inside the sample.
        #[arg(long)]
        candidates: Option<YearRange>,
    },
    /// Augmented Dickey-Fuller test on a series or on fit residuals.
    Diagnose {
        /// Test this series instead of fit residuals.
        #[arg(long)]
        series: Option<String>,
        #[command(flatten)]
        spec: SpecArgs,
        /// Lagged differences in the test regression.
        #[arg(long, default_value_t = 1)]
        lags: usize,
    },
    /// Propagate a labor-force scenario through registry or refitted models.
    Forecast {
        /// Registry model id; repeatable. Defaults to dgdp-labor and unemployment-labor.
        #[arg(long = "model")]
        models: Vec<String>,
        /// Refit a JSON link spec on the manifest data and forecast with it; repeatable.
        #[arg(long = "fit-spec")]
        fit_specs: Vec<PathBuf>,
        /// Labor-force path from the manifest.
        #[arg(long)]
        labor_force: Option<String>,
        /// Population path from the manifest, scaled by --participation.
        #[arg(long)]
        population: Option<String>,
        #[arg(long)]
        participation: Option<f64>,
        /// Straight-line labor force `Y1:PERSONS:Y2:PERSONS`.
        #[arg(long)]
        linear: Option<String>,
        /// Forecast years; defaults to the path without its first year.
        #[arg(long)]
        horizon: Option<YearRange>,
    },
    /// Chart series as lines, or a scatter with its regression line.
    Plot {
        #[arg(long = "series")]
        series: Vec<String>,
        /// Scatter `X,Y` with the least-squares line of Y on X.
        #[arg(long)]
        scatter: Option<String>,
        /// Plot running sums instead of annual values.
        #[arg(long)]
        cumulative: bool,
        #[arg(long, default_value = "")]
        title: String,
        #[arg(long, default_value = "plot.svg")]
        name: String,
    },
    /// Download remote manifest entries into the cache and OUT/NAME.csv.
    Fetch {
        #[arg(long = "name")]
        names: Vec<String>,
    },
    /// Write a seeded synthetic dataset with a manifest.
    Synth {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        intercept: f64,
        #[arg(long = "slope", allow_hyphen_values = true, required = true)]
        slopes: Vec<f64>,
        #[arg(long, default_value_t = 0.002)]
        noise: f64,
        #[arg(long, default_value_t = 40)]
        length: usize,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        lag: i32,
        #[arg(long, default_value_t = 1970)]
        start_year: i32,
        #[arg(long = "break")]
        break_year: Option<i32>,
        #[arg(long, allow_hyphen_values = true)]
        break_intercept: Option<f64>,
        #[arg(long = "break-slope", allow_hyphen_values = true)]
        break_slopes: Vec<f64>,
    },
}

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn formats(&self, default: &[Format]) -> Vec<Format> {
        if self.cli.format.is_empty() {
            default.to_vec()
        } else {
            self.cli.format.clone()
        }
    }

    fn fetcher(&self) -> Fetcher {
        let f = match &self.cli.cache_dir {
            Some(d) => Fetcher::new(d),
            None => Fetcher::from_env(self.cli.out.join("cache")),
        };
        f.with_timeout(Duration::from_secs(self.cli.timeout)).offline(self.cli.offline)
    }

    fn manifest(&self) -> CliResult<DatasetManifest> {
        let path = self.cli.manifest.as_ref().ok_or_else(|| usage("this command needs --manifest PATH"))?;
        if !path.is_file() {
            return Err(usage(format!("manifest {} does not exist", path.display())));
        }
        Ok(DatasetManifest::from_file(path)?)
    }

    fn data(&self) -> CliResult<Data> {
        Ok(self.manifest()?.load(&self.fetcher())?)
    }

    fn write(&self, name: &str, contents: &str) -> CliResult<PathBuf> {
        fs::create_dir_all(&self.cli.out)?;
        let path = self.cli.out.join(name);
        fs::write(&path, contents)?;
        say!("wrote {}", path.display());
        Ok(path)
    }

    fn link_spec(&self, args: &SpecArgs) -> CliResult<LinkSpec> {
        let mut spec = match &args.spec {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read spec {}: {e}", path.display())))?;
                LinkSpec::from_json(&text).map_err(|e| usage(format!("spec {}: {e}", path.display())))?
            }
            None => inline_spec(args)?,
        };
        if let Some(w) = self.cli.window {
            spec.window = Some(w);
        }
        spec.validate().map_err(|e| usage(e.to_string()))?;
        Ok(spec)
    }
}

fn parse_predictor(s: &str) -> CliResult<Predictor> {
    match s.rsplit_once(':') {
        Some((name, lag)) if !name.is_empty() => {
            let lag = lag.parse().map_err(|_| usage(format!("bad lag in predictor {s:?}")))?;
            Ok(Predictor::new(name, lag))
        }
        _ => Ok(Predictor::new(s, 0)),
    }
}

fn inline_spec(args: &SpecArgs) -> CliResult<LinkSpec> {
    let response = args.response.clone().ok_or_else(|| usage("give --spec FILE or --response NAME"))?;
    if args.predictors.is_empty() {
        return Err(usage("give at least one --predictor NAME[:LAG]"));
    }
    let predictors = args.predictors.iter().map(|p| parse_predictor(p)).collect::<CliResult<Vec<_>>>()?;
    let mut spec = LinkSpec::new(response, predictors, args.estimator.into());
    for term in &args.shared {
        if term != "intercept" && !spec.predictors.iter().any(|p| &p.name == term) {
            return Err(usage(format!("--shared {term:?} is neither `intercept` nor a predictor")));
        }
    }
    if let Some(b) = args.break_year {
        let flag = |name: &str| if args.shared.iter().any(|t| t == name) { Sharing::Shared } else { Sharing::PerSegment };
        let sharing = SharingFlags {
            intercept: flag("intercept"),
            slopes: spec.predictors.iter().map(|p| flag(&p.name)).collect(),
        };
        spec = spec.with_break(b, sharing);
    } else if !args.shared.is_empty() {
        return Err(usage("--shared only applies with --break"));
    }
    Ok(spec)
}

fn parse_range(s: &str) -> CliResult<(i32, i32)> {
    let (a, b) = s.split_once(':').ok_or_else(|| usage(format!("expected A:B, got {s:?}")))?;
    let p = |t: &str| t.trim().parse::<i32>().map_err(|_| usage(format!("bad integer {t:?} in {s:?}")));
    let (a, b) = (p(a)?, p(b)?);
    if a > b {
        return Err(usage(format!("empty range {s:?}")));
    }
    Ok((a, b))
}

/// Runs the parsed command line.
pub fn run(cli: &Cli) -> CliResult<()> {
    let ctx = Ctx { cli };
    match &cli.command {
        Command::Fit(args) => cmd_fit(&ctx, args),
        Command::ScanLag { spec, index, lags, criterion } => cmd_scan_lag(&ctx, spec, *index, lags, *criterion),
        Command::ScanBreak { spec, candidates } => cmd_scan_break(&ctx, spec, *candidates),
        Command::Diagnose { series, spec, lags } => cmd_diagnose(&ctx, series.as_deref(), spec, *lags),
        Command::Forecast { models, fit_specs, labor_force, population, participation, linear, horizon } => {
            let scenario = ScenarioArgs {
                labor_force: labor_force.as_deref(),
                population: population.as_deref(),
                participation: *participation,
                linear: linear.as_deref(),
                horizon: *horizon,
            };
            cmd_forecast(&ctx, models, fit_specs, scenario)
        }
        Command::Plot { series, scatter, cumulative, title, name } => {
            cmd_plot(&ctx, series, scatter.as_deref(), *cumulative, title, name)
        }
        Command::Fetch { names } => cmd_fetch(&ctx, names),
        Command::Synth { intercept, slopes, noise, length, lag, start_year, break_year, break_intercept, break_slopes } => {
            let brk = match break_year {
                None => None,
                Some(year) => Some(SynthBreak {
                    year: *year,
                    intercept: break_intercept.unwrap_or(*intercept),
                    slopes: if break_slopes.is_empty() { slopes.clone() } else { break_slopes.clone() },
                }),
            };
            let spec = SynthSpec {
                start_year: *start_year,
                length: *length,
                intercept: *intercept,
                slopes: slopes.clone(),
                lag: *lag,
                break_at: brk,
                noise_sd: *noise,
                seed: cli.seed,
            };
            cmd_synth(&ctx, &spec)
        }
    }
}

#[derive(Serialize)]
struct FitArtifact<'a> {
    #[serde(flatten)]
    fit: &'a laborcurve::Fit,
    endpoint_gap: f64,
}

fn cmd_fit(ctx: &Ctx, args: &SpecArgs) -> CliResult<()> {
    let spec = ctx.link_spec(args)?;
    let data = ctx.data()?;
    let fit = estimate::fit(&spec, &data)?;
    let artifact = FitArtifact { fit: &fit, endpoint_gap: fit.endpoint_gap() };
    ctx.write("fit.json", &(serde_json::to_string_pretty(&artifact)? + "\n"))?;

    let mut csv = String::from("year,observed,fitted,residual,observed_cumulative,fitted_cumulative\n");
    let (co, cf) = (fit.observed_cumulative(), fit.fitted_cumulative());
    for (i, year) in fit.window.years().enumerate() {
        csv.push_str(&format!(
            "{year},{},{},{},{},{}\n",
            fit.observed.values()[i],
            fit.fitted.values()[i],
            fit.residuals.values()[i],
            co.values()[i],
            cf.values()[i]
        ));
    }
    ctx.write("residuals.csv", &csv)?;

    if ctx.formats(&[]).contains(&Format::Svg) {
        let style = ChartStyle { title: format!("{} observed and fitted", spec.response), ..Default::default() };
        let annual = emit_svg_chart(
            &[ChartSeries::from_series("observed", &fit.observed), ChartSeries::from_series("fitted", &fit.fitted)],
            &style,
        )?;
        ctx.write("fit.svg", &annual)?;
        let style = ChartStyle { title: format!("{} cumulative", spec.response), ..Default::default() };
        let cumulative = emit_svg_chart(&[ChartSeries::from_series("observed", &co), ChartSeries::from_series("fitted", &cf)], &style)?;
        ctx.write("fit_cumulative.svg", &cumulative)?;
    }
    say!(
        "{}: n={} r2={:.4} r2_cum={:.4} sigma={:.5}",
        spec.response, fit.n_obs, fit.r2_annual, fit.r2_cumulative, fit.sigma
    );
    for p in &fit.params {
        let seg = p.segment.map(|s| format!("[{s}]")).unwrap_or_default();
        say!("  {}{seg} = {:.6} (se {:.6}, p {:.3e})", p.term, p.estimate, p.std_error, p.p_value);
    }
    Ok(())
}

fn cmd_scan_lag(ctx: &Ctx, args: &SpecArgs, index: usize, lags: &str, criterion: Option<CriterionArg>) -> CliResult<()> {
    let spec = ctx.link_spec(args)?;
    let (lo, hi) = parse_range(lags)?;
    if index >= spec.predictors.len() {
        return Err(usage(format!("--index {index} but the spec has {} predictors", spec.predictors.len())));
    }
    let data = ctx.data()?;
    let criterion = criterion.map(|c| match c {
        CriterionArg::AnnualR2 => Criterion::AnnualR2,
        CriterionArg::CumulativeR2 => Criterion::CumulativeR2,
    });
    let scan = estimate::scan_lag(&spec, &data, index, lo..=hi, criterion)?;
    for f in ctx.formats(&[Format::Csv]) {
        match f {
            Format::Csv => {
                let mut csv = String::from("lag,r2_annual,r2_cumulative,slope,best\n");
                for e in &scan.entries {
                    let best = if e.lag == scan.best_lag { "*" } else { "" };
                    csv.push_str(&format!(
                        "{},{},{},{},{best}\n",
                        e.lag,
                        e.fit.r2_annual,
                        e.fit.r2_cumulative,
                        e.fit.slope(e.fit.model.segments.len() - 1, index)
                    ));
                }
                ctx.write("scan_lag.csv", &csv)?;
            }
            Format::Json => {
                ctx.write("scan_lag.json", &(serde_json::to_string_pretty(&scan)? + "\n"))?;
            }
            Format::Svg => {
                let pts = scan.entries.iter().map(|e| (f64::from(e.lag), e.criterion)).collect();
                let style = ChartStyle { title: "lag scan".into(), x_label: "lag".into(), ..Default::default() };
                ctx.write("scan_lag.svg", &emit_svg_chart(&[ChartSeries::line(format!("{criterion:?}"), pts)], &style)?)?;
            }
        }
    }
    say!("best lag {} ({:?} = {:.4})", scan.best_lag, scan.criterion, scan.best().criterion);
    Ok(())
}

fn cmd_scan_break(ctx: &Ctx, args: &SpecArgs, candidates: Option<YearRange>) -> CliResult<()> {
    let spec = ctx.link_spec(args)?;
    let data = ctx.data()?;
    let years: Vec<i32> = match candidates {
        Some(r) => r.years().collect(),
        None => {
            let mut plain = spec.clone();
            plain.break_year = None;
            plain.sharing = None;
            let w = estimate::fit(&plain, &data)?.window;
            (w.first + 1..=w.last).collect()
        }
    };
    let scan = estimate::scan_break(&spec, &data, &years)?;
    for f in ctx.formats(&[Format::Csv]) {
        match f {
            Format::Csv => {
                let mut csv = String::from("year,objective,best\n");
                for e in &scan.entries {
                    let best = if e.year == scan.best_year { "*" } else { "" };
                    csv.push_str(&format!("{},{},{best}\n", e.year, e.objective));
                }
                ctx.write("scan_break.csv", &csv)?;
            }
            Format::Json => {
                ctx.write("scan_break.json", &(serde_json::to_string_pretty(&scan)? + "\n"))?;
            }
            Format::Svg => {
                let pts = scan.entries.iter().map(|e| (f64::from(e.year), e.objective)).collect();
                let style = ChartStyle { title: "break scan".into(), y_label: "objective".into(), ..Default::default() };
                ctx.write("scan_break.svg", &emit_svg_chart(&[ChartSeries::line("objective", pts)], &style)?)?;
            }
        }
    }
    say!("best break {}", scan.best_year);
    Ok(())
}

#[derive(Serialize)]
struct AdfArtifact {
    target: String,
    #[serde(flatten)]
    result: AdfResult<f64>,
    rejects_unit_root: Vec<(Significance, bool)>,
}

fn adf_artifact(target: String, s: &Series, lags: usize) -> CliResult<AdfArtifact> {
    let result = adf_test(s, lags)?;
    let rejects_unit_root = Significance::ALL.iter().map(|&l| (l, result.rejects(l))).collect();
    Ok(AdfArtifact { target, result, rejects_unit_root })
}

fn cmd_diagnose(ctx: &Ctx, series: Option<&str>, args: &SpecArgs, lags: usize) -> CliResult<()> {
    let data = ctx.data()?;
    let tests = match series {
        Some(name) => {
            let mut s = data.resolve(name)?;
            if let Some(w) = ctx.cli.window {
                s = s.window(w)?;
            }
            vec![adf_artifact(name.to_string(), &s, lags)?]
        }
        None => {
            let spec = ctx.link_spec(args)?;
            let fit = estimate::fit(&spec, &data)?;
            let gap = fit.observed_cumulative().sub(&fit.fitted_cumulative())?;
            vec![
                adf_artifact("residuals".into(), &fit.residuals, lags)?,
                adf_artifact("cumulative-residuals".into(), &gap, lags)?,
            ]
        }
    };
    for f in ctx.formats(&[Format::Json]) {
        match f {
            Format::Json => {
                ctx.write("diagnose.json", &(serde_json::to_string_pretty(&tests)? + "\n"))?;
            }
            Format::Csv => {
                let mut csv = String::from("target,statistic,lag_order,n_obs,cv_1,cv_5,cv_10,reject_5\n");
                for t in &tests {
                    let cv = &t.result.critical_values;
                    csv.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        t.target,
                        t.result.statistic,
                        t.result.lag_order,
                        t.result.n_obs,
                        cv.one_percent,
                        cv.five_percent,
                        cv.ten_percent,
                        t.result.rejects(Significance::FivePercent)
                    ));
                }
                ctx.write("diagnose.csv", &csv)?;
            }
            Format::Svg => return Err(usage("diagnose has no SVG output")),
        }
    }
    for t in &tests {
        say!(
            "{}: ADF {:.3} (5% critical {:.2}) {}",
            t.target,
            t.result.statistic,
            t.result.critical_values.five_percent,
            if t.result.rejects(Significance::FivePercent) { "rejects unit root" } else { "unit root not rejected" }
        );
    }
    Ok(())
}

struct ScenarioArgs<'a> {
    labor_force: Option<&'a str>,
    population: Option<&'a str>,
    participation: Option<f64>,
    linear: Option<&'a str>,
    horizon: Option<YearRange>,
}

fn parse_linear(s: &str) -> CliResult<Series> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || usage(format!("--linear expects Y1:PERSONS:Y2:PERSONS, got {s:?}"));
    if parts.len() != 4 {
        return Err(bad());
    }
    let y1: i32 = parts[0].parse().map_err(|_| bad())?;
    let v1: f64 = parts[1].parse().map_err(|_| bad())?;
    let y2: i32 = parts[2].parse().map_err(|_| bad())?;
    let v2: f64 = parts[3].parse().map_err(|_| bad())?;
    linear_path((y1, v1), (y2, v2)).map_err(|e| usage(e.to_string()))
}

fn cmd_forecast(ctx: &Ctx, models: &[String], fit_specs: &[PathBuf], sc: ScenarioArgs) -> CliResult<()> {
    let sources = [sc.labor_force.is_some(), sc.population.is_some(), sc.linear.is_some()];
    if sources.iter().filter(|&&b| b).count() != 1 {
        return Err(usage("give exactly one of --labor-force, --population, --linear"));
    }
    if sc.population.is_some() != sc.participation.is_some() {
        return Err(usage("--population and --participation go together"));
    }
    let needs_data = sc.labor_force.is_some() || sc.population.is_some() || !fit_specs.is_empty();
    let data = if needs_data { Some(ctx.data()?) } else { None };

    let path = match (sc.labor_force, sc.population, sc.linear) {
        (Some(name), _, _) => data.as_ref().expect("loaded").resolve(name)?,
        (_, Some(name), _) => data.as_ref().expect("loaded").resolve(name)?,
        (_, _, Some(lin)) => parse_linear(lin)?,
        _ => unreachable!("checked above"),
    };
    let horizon = match sc.horizon {
        Some(h) => h,
        None => YearRange::new(path.first_year() + 1, path.last_year())?,
    };
    let source = match sc.participation {
        Some(rate) => LaborForceSource::Participation { population: &path, rate },
        None => LaborForceSource::Direct(&path),
    };
    let scenario = build_scenario(source, horizon)?;

    let mut chosen = Vec::new();
    let ids: Vec<String> = if models.is_empty() && fit_specs.is_empty() {
        vec!["dgdp-labor".into(), "unemployment-labor".into()]
    } else {
        models.to_vec()
    };
    for id in &ids {
        chosen.push(registry_model::<f64>(id).map_err(|e| usage(e.to_string()))?);
    }
    for p in fit_specs {
        let text = fs::read_to_string(p).map_err(|e| usage(format!("cannot read spec {}: {e}", p.display())))?;
        let spec = LinkSpec::from_json(&text).map_err(|e| usage(format!("spec {}: {e}", p.display())))?;
        let mut model = estimate::fit(&spec, data.as_ref().expect("loaded"))?.model;
        model.id = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or(model.id);
        chosen.push(model);
    }
    let report = forecast::forecast_report(&chosen, &scenario)?;

    for f in ctx.formats(&[Format::Csv, Format::Json]) {
        match f {
            Format::Csv => {
                ctx.write("forecast.csv", &report.to_csv())?;
            }
            Format::Json => {
                ctx.write("forecast.json", &(report.to_json()? + "\n"))?;
            }
            Format::Svg => {
                for (variable, name, title) in [
                    (Variable::Inflation, "forecast_inflation.svg", "inflation forecast"),
                    (Variable::Unemployment, "forecast_unemployment.svg", "unemployment forecast"),
                ] {
                    let series: Vec<ChartSeries> = report
                        .paths
                        .iter()
                        .filter(|p| p.variable == variable)
                        .map(|p| ChartSeries::from_series(&p.model, &p.path))
                        .collect();
                    if !series.is_empty() {
                        let style = ChartStyle { title: title.into(), y_percent: true, ..Default::default() };
                        ctx.write(name, &emit_svg_chart(&series, &style)?)?;
                    }
                }
            }
        }
    }
    for p in &report.paths {
        let last = p.path.values().last().copied().unwrap_or(f64::NAN);
        say!("{} {:?}: mean {:.4}, {} {:.4}", p.model, p.variable, p.path.mean(), horizon.last, last);
    }
    Ok(())
}

fn cmd_plot(ctx: &Ctx, names: &[String], scatter: Option<&str>, cumulative: bool, title: &str, file: &str) -> CliResult<()> {
    if names.is_empty() == scatter.is_none() {
        return Err(usage("give either --series NAME... or --scatter X,Y"));
    }
    if !file.ends_with(".svg") || file.contains('/') || file.contains('\\') {
        return Err(usage("--name must be a plain file name ending in .svg"));
    }
    let data = ctx.data()?;
    let prep = |name: &str| -> CliResult<Series> {
        let mut s = data.resolve(name)?;
        if let Some(w) = ctx.cli.window {
            s = s.window(w)?;
        }
        Ok(if cumulative { s.cumulate() } else { s })
    };
    let svg = match scatter {
        None => {
            let series = names
                .iter()
                .map(|n| Ok(ChartSeries::from_series(n.as_str(), &prep(n)?)))
                .collect::<CliResult<Vec<_>>>()?;
            let percent = series.iter().all(|s| matches!(s.y_units, Some(Units::Fraction | Units::FractionPerYear)));
            emit_svg_chart(&series, &ChartStyle { title: title.into(), y_percent: percent, ..Default::default() })?
        }
        Some(pair) => {
            let (xn, yn) = pair.split_once(',').ok_or_else(|| usage("--scatter expects X,Y"))?;
            let mut spec = LinkSpec::simple(yn, xn, 0, Estimator::Ols);
            spec.window = ctx.cli.window;
            let fit = estimate::ols_fit(&spec, &data)?;
            let x = data.resolve(xn)?.window(fit.window)?;
            let pts: Vec<(f64, f64)> = x.values().iter().copied().zip(fit.observed.values().iter().copied()).collect();
            let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
            let line = |v: f64| fit.intercept(0) + fit.slope(0, 0) * v;
            let label = format!("{yn} = {:.4} {:+.3} {xn}", fit.intercept(0), fit.slope(0, 0));
            let style = ChartStyle {
                title: title.into(),
                x_label: xn.into(),
                y_label: yn.into(),
                x_years: false,
                x_percent: true,
                y_percent: true,
                ..Default::default()
            };
            emit_svg_chart(
                &[ChartSeries::scatter(format!("{}-{}", fit.window.first, fit.window.last), pts), ChartSeries::line(label, vec![(lo, line(lo)), (hi, line(hi))])],
                &style,
            )?
        }
    };
    ctx.write(file, &svg)?;
    Ok(())
}

fn cmd_fetch(ctx: &Ctx, names: &[String]) -> CliResult<()> {
    let manifest = ctx.manifest()?;
    let fetcher = ctx.fetcher();
    let wanted: Vec<&String> = if names.is_empty() {
        manifest.series.iter().filter(|(_, e)| e.remote.is_some()).map(|(n, _)| n).collect()
    } else {
        names.iter().collect()
    };
    if wanted.is_empty() {
        say!("no remote series in manifest");
    }
    for name in wanted {
        let series: Series = manifest.load_entry(name, &fetcher)?;
        let mut buf = Vec::new();
        write_csv_series(&series, &mut buf)?;
        ctx.write(&format!("{name}.csv"), &String::from_utf8(buf).expect("ascii csv"))?;
        if let Some(r) = &manifest.series[name.as_str()].remote {
            say!("cached {}", fetcher.cache_path(r).display());
        }
    }
    Ok(())
}

fn cmd_synth(ctx: &Ctx, spec: &SynthSpec) -> CliResult<()> {
    let data = generate::<f64>(spec).map_err(|e| usage(e.to_string()))?;
    let mut manifest = DatasetManifest::default();
    let mut files: Vec<(String, &Series)> = data
        .predictors
        .iter()
        .enumerate()
        .map(|(j, x)| (SynthSpec::predictor_name(j), x))
        .collect();
    files.push(("y".into(), &data.response));
    for (name, s) in files {
        let mut buf = Vec::new();
        write_csv_series(s, &mut buf)?;
        ctx.write(&format!("{name}.csv"), &String::from_utf8(buf).expect("ascii csv"))?;
        manifest.series.insert(
            name.clone(),
            laborcurve::ingest::ManifestEntry {
                path: Some(PathBuf::from(format!("{name}.csv"))),
                remote: None,
                kind: SeriesKind::CpiInflation,
                units: SourceUnits::Fraction,
            },
        );
    }
    ctx.write("manifest.json", &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
    ctx.write("synth.json", &(serde_json::to_string_pretty(spec)? + "\n"))?;
    Ok(())
}

/// Entry point shared by the binary and the tests.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `laborcurve --help` for usage");
            }
            e.exit_code()
        }
    }
}
