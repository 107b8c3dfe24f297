//! Acceptance checks. Each test prints one `[PASS]` or `[FAIL]` line to the
//! real stdout, bypassing libtest capture, then asserts.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use laborcurve::diagnose::{adf_test, Significance};
use laborcurve::estimate::{cumulative_fit, fit, fit_piecewise, ols_fit, scan_break, Estimator, LinkSpec};
use laborcurve::forecast::{build_scenario, forecast_inflation, forecast_unemployment, linear_path, registry_model, LaborForceSource};
use laborcurve::ingest::{load_manifest, Fetcher};
use laborcurve::oracle::{brute_force_constrained_nested, brute_force_ols, generate, random_walk, white_noise, SynthBreak, SynthSpec};
use laborcurve::{Data, Fit, YearRange};

fn report(name: &str, pass: bool, detail: String) {
    let line = format!("[{}] {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn japan() -> Data {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/japan");
    let cache = tempfile::tempdir().unwrap();
    load_manifest(&root.join("manifest.json"), &Fetcher::new(cache.path()).offline(true)).unwrap()
}

const MODERN: YearRange = YearRange { first: 1982, last: 2012 };

fn max_coef_error(f: &Fit, expect: &[(usize, f64, &[f64])]) -> f64 {
    let mut worst = 0.0_f64;
    for &(seg, a, bs) in expect {
        worst = worst.max((f.intercept(seg) - a).abs());
        for (j, b) in bs.iter().enumerate() {
            worst = worst.max((f.slope(seg, j) - b).abs());
        }
    }
    worst
}

#[test]
fn exact_recovery_on_noise_free_data() {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut gaps = 0.0_f64;
    // inflation on lagged unemployment, inflation on labor-force growth
    for (a, b, lag) in [(0.0416, -0.93, 1), (0.0007, 1.31, 0)] {
        let spec = SynthSpec { lag, noise_sd: 0.0, ..SynthSpec::simple(a, b, 0.0, 31, 21) };
        let d = generate::<f64>(&spec).unwrap().dataset();
        let o = ols_fit(&spec.link_spec(Estimator::Ols), &d).unwrap();
        let c = cumulative_fit(&spec.link_spec(Estimator::Cumulative), &d).unwrap();
        worst = worst.max(max_coef_error(&o, &[(0, a, &[b])])).max(max_coef_error(&c, &[(0, a, &[b])]));
        gaps = gaps.max(c.endpoint_gap().abs());
    }
    // generalized link with two predictors
    let spec = SynthSpec { slopes: vec![2.80, 0.9], ..SynthSpec::simple(-0.0392, 0.0, 0.0, 31, 22) };
    let d = generate::<f64>(&spec).unwrap().dataset();
    for est in [Estimator::Ols, Estimator::Cumulative] {
        let f = fit(&spec.link_spec(est), &d).unwrap();
        worst = worst.max(max_coef_error(&f, &[(0, -0.0392, &[2.80, 0.9])]));
    }
    // broken unemployment link, shared intercept
    let spec = SynthSpec {
        start_year: 1962,
        break_at: Some(SynthBreak { year: 1977, intercept: 0.0432, slopes: vec![-1.556] }),
        ..SynthSpec::simple(0.0432, -0.179, 0.0, 51, 23)
    };
    let d = generate::<f64>(&spec).unwrap().dataset();
    for est in [Estimator::Ols, Estimator::Cumulative] {
        let f = fit_piecewise(&spec.link_spec(est), &d).unwrap();
        worst = worst.max(max_coef_error(&f, &[(0, 0.0432, &[-0.179]), (1, 0.0432, &[-1.556])]));
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-8 && elapsed < Duration::from_secs(1);
    report("exact recovery", pass, format!("max |error| {worst:.2e} (tol 1e-8), endpoint gap {gaps:.1e}, {elapsed:.2?} (limit 1 s)"));
    assert!(pass);
}

#[test]
fn oracle_equivalence_on_noisy_instances() {
    let start = Instant::now();
    let (mut ols_worst, mut grid_worst_ratio) = (0.0_f64, 0.0_f64);
    for seed in 0..100 {
        let spec = SynthSpec { slopes: vec![1.9, -0.4], ..SynthSpec::simple(-0.008, 0.0, 0.004, 31, 1000 + seed) };
        let data = generate::<f64>(&spec).unwrap();
        let f = ols_fit(&spec.link_spec(Estimator::Ols), &data.dataset()).unwrap();
        let xs: Vec<Vec<f64>> = data.predictors.iter().map(|p| p.values().to_vec()).collect();
        let oracle = brute_force_ols(&xs, data.response.values()).unwrap();
        let est = [f.intercept(0), f.slope(0, 0), f.slope(0, 1)];
        for (e, o) in est.iter().zip(&oracle) {
            ols_worst = ols_worst.max((e - o).abs());
        }

        let spec = SynthSpec::simple(-0.008, 1.9, 0.004, 31, 2000 + seed);
        let data = generate::<f64>(&spec).unwrap();
        let c = cumulative_fit(&spec.link_spec(Estimator::Cumulative), &data.dataset()).unwrap();
        let trace = brute_force_constrained_nested(data.predictors[0].values(), data.response.values(), 0.0, 8.0, 81, 6, 0.1).unwrap();
        let g = trace.last().unwrap();
        grid_worst_ratio = grid_worst_ratio.max((c.slope(0, 0) - g.slope).abs() / g.spacing);
    }
    let elapsed = start.elapsed();
    let pass = ols_worst < 1e-10 && grid_worst_ratio <= 1.0 && elapsed < Duration::from_secs(10);
    report(
        "oracle equivalence",
        pass,
        format!(
            "100 instances; OLS max |diff| {ols_worst:.2e} (tol 1e-10); cumulative slope within {grid_worst_ratio:.3} grid steps (tol 1); {elapsed:.2?} (limit 10 s)"
        ),
    );
    assert!(pass);
}

#[test]
fn endpoint_constraint_is_exact() {
    let mut worst = 0.0_f64;
    let mut count = 0;
    let mut note = |f: &Fit| {
        worst = worst.max(f.endpoint_gap().abs());
        count += 1;
    };
    for seed in 0..100 {
        let spec = SynthSpec { slopes: vec![1.3, 0.7], lag: (seed % 3) as i32, ..SynthSpec::simple(0.002, 0.0, 0.005, 40, 3000 + seed) };
        note(&cumulative_fit(&spec.link_spec(Estimator::Cumulative), &generate::<f64>(&spec).unwrap().dataset()).unwrap());
        let broken = SynthSpec {
            break_at: Some(SynthBreak { year: 1980 + (seed % 15) as i32, intercept: -0.01, slopes: vec![2.0] }),
            ..SynthSpec::simple(0.01, -0.5, 0.005, 40, 4000 + seed)
        };
        note(&fit_piecewise(&broken.link_spec(Estimator::Cumulative), &generate::<f64>(&broken).unwrap().dataset()).unwrap());
    }
    let d = japan();
    for (y, x) in [("u", "cpi"), ("cpi", "dlog(lf)"), ("dgdp", "dlog(lf)"), ("cpi", "u")] {
        note(&fit(&LinkSpec::simple(y, x, 0, Estimator::Cumulative).with_window(MODERN), &d).unwrap());
    }
    let pass = worst < 1e-12;
    report("endpoint constraint", pass, format!("{count} cumulative fits, max |C_pred - C_obs| at last year {worst:.2e} (tol 1e-12)"));
    assert!(pass);
}

#[test]
fn published_coefficients_reproduce_on_fixture() {
    let d = japan();
    let p = fit(&LinkSpec::simple("cpi", "u", 0, Estimator::Ols).with_window(MODERN), &d).unwrap();
    let (slope, icpt, r2) = (p.slope(0, 0), p.intercept(0), p.r2_annual);
    let phillips = (slope - -0.93).abs() <= 0.15 && (icpt - 0.041).abs() <= 0.010 && (r2 - 0.70).abs() <= 0.07;

    let a = fit(&LinkSpec::simple("u", "cpi", 0, Estimator::Cumulative).with_window(MODERN), &d).unwrap();
    let anti = (a.slope(0, 0) - -1.10).abs() <= 0.20 && (a.sigma - 0.007).abs() <= 0.002;
    let pass = phillips && anti;
    report(
        "published coefficients",
        pass,
        format!(
            "inflation on unemployment 1982-2012: slope {slope:.3} (-0.93 +/- 0.15), intercept {icpt:.4} (0.041 +/- 0.010), R2 {r2:.3} (0.70 +/- 0.07); \
             unemployment on inflation, cumulative: slope {:.3} (-1.10 +/- 0.20), sigma {:.4} (0.007 +/- 0.002)",
            a.slope(0, 0),
            a.sigma
        ),
    );
    assert!(pass);
}

#[test]
fn deflator_cumulative_fit_quality() {
    let f = fit(&LinkSpec::simple("dgdp", "dlog(lf)", 0, Estimator::Cumulative).with_window(MODERN), &japan()).unwrap();
    let pass = f.r2_cumulative >= 0.97;
    report(
        "deflator cumulative fit",
        pass,
        format!(
            "GDP deflator on labor-force growth 1982-2012: cumulative R2 {:.4} (need >= 0.97); data-conditional, fixture is a hand transcription",
            f.r2_cumulative
        ),
    );
    assert!(pass);
}

#[test]
fn declining_labor_force_forecast() {
    let start = Instant::now();
    let rate: f64 = 0.521;
    let population = linear_path((2010, 67_000_000.0 / rate), (2050, 57_000_000.0 / rate)).unwrap();
    let horizon = YearRange { first: 2011, last: 2050 };
    let scenario = build_scenario(LaborForceSource::Participation { population: &population, rate }, horizon).unwrap();
    let pi = forecast_inflation(&registry_model::<f64>("dgdp-labor").unwrap(), &scenario, None).unwrap();
    let u = forecast_unemployment(&registry_model("unemployment-labor").unwrap(), &scenario).unwrap();
    let (mean, end, u_end) = (pi.mean(), pi.get(2050).unwrap(), u.get(2050).unwrap());

    // Worked by hand from the printed coefficients: growth averages ln(57/67)/40
    // and is ln(57/57.25) in the last year.
    let hand_mean: f64 = -0.0084 + 1.90 * -0.004_040_6;
    let hand_end: f64 = -0.0084 + 1.90 * -0.004_376_4;
    let hand_u_end: f64 = 0.0432 - 1.556 * -0.004_376_4;
    let hand = (mean - hand_mean).abs() < 1e-6 && (end - hand_end).abs() < 1e-6 && (u_end - hand_u_end).abs() < 1e-6;

    let elapsed = start.elapsed();
    let pass = (-0.022..=-0.004).contains(&mean)
        && (end - -0.020).abs() <= 0.004
        && (0.050..=0.060).contains(&u_end)
        && hand
        && elapsed < Duration::from_secs(1);
    report(
        "labor-force forecast",
        pass,
        format!(
            "mean deflator inflation {mean:.5} in [-0.022, -0.004]; 2050 {end:.5} (-0.020 +/- 0.004); 2050 unemployment {u_end:.5} in [0.050, 0.060]; \
             hand values {}; {elapsed:.2?} (limit 1 s)",
            if hand { "match" } else { "differ" }
        ),
    );
    assert!(pass);
}

#[test]
fn adf_separates_noise_from_random_walks() {
    let (mut noise_rejects, mut walk_keeps, mut scale_worst) = (0, 0, 0.0_f64);
    for seed in 0..100 {
        let noise = white_noise(200, 1.0, seed).unwrap();
        let walk = random_walk(200, 1.0, seed).unwrap();
        let tn = adf_test(&noise, 1).unwrap();
        let tw = adf_test(&walk, 1).unwrap();
        noise_rejects += usize::from(tn.rejects(Significance::FivePercent));
        walk_keeps += usize::from(!tw.rejects(Significance::FivePercent));
        for (s, t) in [(&noise, tn.statistic), (&walk, tw.statistic)] {
            for k in [1e-3, 250.0] {
                scale_worst = scale_worst.max((adf_test(&s.scale(k), 1).unwrap().statistic - t).abs());
            }
        }
    }
    let pass = noise_rejects >= 95 && walk_keeps >= 90 && scale_worst < 1e-10;
    report(
        "ADF behaviour",
        pass,
        format!(
            "white noise rejected {noise_rejects}/100 (need >= 95); random walk kept {walk_keeps}/100 (need >= 90); \
             scale invariance max |dt| {scale_worst:.1e} (tol 1e-10)"
        ),
    );
    assert!(pass);
}

fn serve_once_per_request(body: &'static str) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap() == 0 || line == "\r\n" {
                    break;
                }
            }
            let _ = write!(stream, "HTTP/1.1 200 OK\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}", body.len());
        }
    });
    format!("http://{addr}")
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.insert(path.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    files
}

#[test]
fn cli_artifacts_are_byte_identical() {
    let work = tempfile::tempdir().unwrap();
    let japan = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/japan/manifest.json");
    let japan = japan.to_str().unwrap().to_string();
    let base = serve_once_per_request("TIME_PERIOD,OBS_VALUE\n2010,5.1\n2011,4.6\n2012,4.3\n");
    let remote = work.path().join("remote.json");
    std::fs::write(
        &remote,
        format!(r#"{{"series": {{"u": {{"remote": {{"base_url": "{base}", "dataset": "MEI", "key": "JPN.UNR"}}, "kind": "unemployment", "units": "percent"}}}}}}"#),
    )
    .unwrap();
    let remote = remote.to_str().unwrap().to_string();

    let all = "csv,json,svg";
    let commands: Vec<(&str, Vec<&str>)> = vec![
        ("fit", vec!["fit", "--manifest", &japan, "--response", "u", "--predictor", "cpi", "--estimator", "cumulative", "--window", "1982:2012", "--format", "svg"]),
        ("fit-break", vec!["fit", "--manifest", &japan, "--response", "u", "--predictor", "dlog(lf)", "--break", "1977", "--shared", "intercept"]),
        ("scan-lag", vec!["scan-lag", "--manifest", &japan, "--response", "cpi", "--predictor", "dlog(lf)", "--window", "1982:2012", "--format", all]),
        ("scan-break", vec!["scan-break", "--manifest", &japan, "--response", "cpi", "--predictor", "u", "--break", "1990", "--window", "1975:2012", "--format", all]),
        ("diagnose", vec!["diagnose", "--manifest", &japan, "--response", "cpi", "--predictor", "dlog(lf)", "--estimator", "cumulative", "--window", "1982:2012", "--format", "json,csv"]),
        ("forecast", vec!["forecast", "--linear", "2010:67000000:2050:57000000", "--model", "dgdp-labor", "--model", "generalized", "--model", "unemployment-labor", "--format", all]),
        ("plot", vec!["plot", "--manifest", &japan, "--scatter", "u,cpi", "--window", "1982:2012"]),
        ("plot-lines", vec!["plot", "--manifest", &japan, "--series", "cpi", "--series", "dgdp", "--cumulative", "--name", "cumulative.svg"]),
        ("fetch", vec!["fetch", "--manifest", &remote]),
        ("synth", vec!["synth", "--seed", "42", "--slope", "1.5", "--break", "1995", "--break-slope", "3"]),
    ];
    let mut failures = Vec::new();
    let mut artifacts = 0;
    for (label, args) in &commands {
        let mut snaps = Vec::new();
        for run in 0..2 {
            let out = work.path().join(format!("{label}-{run}"));
            let cache = work.path().join(format!("{label}-cache-{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_laborcurve"))
                .args(args)
                .args(["--out", out.to_str().unwrap(), "--cache-dir", cache.to_str().unwrap()])
                .output()
                .unwrap();
            assert!(status.status.success(), "{label}: {}", String::from_utf8_lossy(&status.stderr));
            snaps.push(snapshot(&out));
        }
        if snaps[0].is_empty() || snaps[0] != snaps[1] {
            failures.push(*label);
        }
        artifacts += snaps[0].len();
    }
    let svgs: usize = commands.len();
    let pass = failures.is_empty();
    report(
        "CLI determinism",
        pass,
        format!("{svgs} command lines, {artifacts} artifacts compared across two runs; differing: {failures:?}"),
    );
    assert!(pass);
}

/// Slope contrast `|Δb|·sd(x)/σ`: the typical size of the shift in the
/// response relative to the noise.
const CONTRAST: f64 = 3.0;

#[test]
fn break_scan_finds_injected_breaks() {
    let noise = 0.002;
    let mut hits = 0;
    let mut misses: HashMap<i32, usize> = HashMap::new();
    for seed in 0..100u64 {
        let year = 1980 + (seed * 7 % 21) as i32;
        let mut spec = SynthSpec {
            start_year: 1970,
            break_at: Some(SynthBreak { year, intercept: 0.0, slopes: vec![1.0] }),
            ..SynthSpec::simple(0.0, 1.0, noise, 40, 5000 + seed)
        };
        let x = generate::<f64>(&spec).unwrap().predictors[0].clone();
        let xs = x.window(YearRange { first: 1970, last: 2009 }).unwrap();
        let m = xs.mean();
        let sd = (xs.values().iter().map(|v| (v - m) * (v - m)).sum::<f64>() / xs.len() as f64).sqrt();
        let sign = if seed % 2 == 0 { 1.0 } else { -1.0 };
        spec.break_at.as_mut().unwrap().slopes = vec![1.0 + sign * CONTRAST * noise / sd];

        let data = generate::<f64>(&spec).unwrap();
        let years: Vec<i32> = (1971..=2009).collect();
        let scan = scan_break(&spec.link_spec(Estimator::Ols), &data.dataset(), &years).unwrap();
        if scan.best_year == year {
            hits += 1;
        } else {
            *misses.entry((scan.best_year - year).abs()).or_default() += 1;
        }
    }
    let mut off: Vec<_> = misses.into_iter().collect();
    off.sort();
    let pass = hits >= 90;
    report(
        "break detection",
        pass,
        format!("exact break year in {hits}/100 instances at contrast {CONTRAST} (need >= 90); misses by |offset|: {off:?}"),
    );
    assert!(pass);
}
