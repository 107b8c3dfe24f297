//! Fits on the bundled Japan fixture. The fixture is a hand transcription, so
//! bounds here are loose; see data/japan/README.md.

use std::path::Path;

use laborcurve::diagnose::{adf_test, Significance};
use laborcurve::estimate::{fit, scan_break, Estimator, LinkSpec, Sharing, SharingFlags};
use laborcurve::ingest::{load_manifest, Fetcher};
use laborcurve::{Data, YearRange};

fn japan() -> Data {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/japan");
    let cache = tempfile::tempdir().unwrap();
    load_manifest(&root.join("manifest.json"), &Fetcher::new(cache.path()).offline(true)).unwrap()
}

const MODERN: YearRange = YearRange { first: 1982, last: 2012 };

#[test]
fn fixture_loads_in_internal_units() {
    let d = japan();
    let u = d.get("u").unwrap();
    assert_eq!(u.span(), YearRange { first: 1960, last: 2012 });
    assert!(u.values().iter().all(|&v| (0.0..0.1).contains(&v)));
    assert!(d.get("lf").unwrap().values().iter().all(|&v| v > 4.0e7 && v < 7.0e7));
    assert_eq!(d.resolve("dlog(lf)").unwrap().first_year(), 1961);
}

#[test]
fn phillips_curve_since_1982() {
    let f = fit(&LinkSpec::simple("cpi", "u", 0, Estimator::Ols).with_window(MODERN), &japan()).unwrap();
    assert!((f.slope(0, 0) - -0.96).abs() < 0.05);
    assert!(f.r2_annual > 0.65);
    assert!(f.params[1].p_value < 1e-6);
}

#[test]
fn anti_phillips_cumulative_and_annual_differ() {
    let d = japan();
    let spec = LinkSpec::simple("u", "cpi", 0, Estimator::Cumulative).with_window(MODERN);
    let cum = fit(&spec, &d).unwrap();
    let ols = fit(&spec.clone().with_estimator(Estimator::Ols), &d).unwrap();
    assert!((cum.slope(0, 0) - -1.07).abs() < 0.05);
    assert!((ols.slope(0, 0) - -0.73).abs() < 0.05);
    assert!(cum.endpoint_gap().abs() < 1e-12);
    // an intercept makes OLS residuals sum to zero, so it closes the gap too
    assert!(ols.endpoint_gap().abs() < 1e-12);
    assert!(cum.r2_cumulative > ols.r2_cumulative);
}

#[test]
fn inflation_on_labor_force_residuals_are_stationary() {
    let spec = LinkSpec::simple("cpi", "dlog(lf)", 0, Estimator::Cumulative).with_window(MODERN);
    let f = fit(&spec, &japan()).unwrap();
    assert!(f.slope(0, 0) > 0.5);
    assert!(adf_test(&f.residuals, 1).unwrap().rejects(Significance::FivePercent));
}

#[test]
fn anti_phillips_break_scan() {
    let spec = LinkSpec::simple("cpi", "u", 0, Estimator::Ols)
        .with_window(YearRange { first: 1975, last: 2012 })
        .with_break(1990, SharingFlags::all(1, Sharing::PerSegment));
    let years: Vec<i32> = (1978..=2008).collect();
    let scan = scan_break(&spec, &japan(), &years).unwrap();
    // five observations per segment rule out 1978 and 1979
    assert_eq!(scan.entries.first().unwrap().year, 1980);
    assert_eq!(scan.entries.len(), years.len() - 2);
    assert!((1980..=1984).contains(&scan.best_year), "best {}", scan.best_year);
}
