use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use laborcurve::ingest::{DatasetManifest, Fetcher, RemoteDescriptor, SeriesKind, SourceUnits};
use laborcurve::{Error, Series};

const SDMX: &str = "DATAFLOW,LOCATION,TIME_PERIOD,OBS_VALUE\nMEI,JPN,2011,4.6\nMEI,JPN,2010,5.1\nMEI,JPN,2012,4.3\n";

/// Serves fixed bodies by path; anything else is a 404. Counts requests.
fn serve(routes: HashMap<&'static str, &'static str>) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            counter.fetch_add(1, Ordering::SeqCst);
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap() == 0 || line == "\r\n" {
                    break;
                }
            }
            let path = request_line.split_whitespace().nth(1).unwrap_or("").to_string();
            let (status, body) = match routes.get(path.as_str()) {
                Some(body) => ("200 OK", *body),
                None => ("404 Not Found", "no such dataset"),
            };
            let _ = write!(
                stream,
                "HTTP/1.1 {status}\r\nContent-Type: text/csv\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
        }
    });
    (format!("http://{addr}"), hits)
}

fn descriptor(base: &str, key: &str) -> RemoteDescriptor {
    RemoteDescriptor { base_url: base.into(), dataset: "MEI".into(), key: key.into(), query: None, cache: None }
}

#[test]
fn fetch_converts_and_caches() {
    let (base, hits) = serve(HashMap::from([("/MEI/JPN.UNR", SDMX)]));
    let cache = tempfile::tempdir().unwrap();
    let fetcher = Fetcher::new(cache.path());
    let d = descriptor(&base, "JPN.UNR");
    let s: Series = fetcher.fetch(&d, SeriesKind::Unemployment, SourceUnits::Percent).unwrap();
    assert_eq!(s.start_year(), 2010);
    assert_eq!(s.values(), &[5.1 / 100.0, 4.6 / 100.0, 4.3 / 100.0]);
    assert_eq!(hits.load(Ordering::SeqCst), 1);
    assert_eq!(std::fs::read_to_string(fetcher.cache_path(&d)).unwrap(), SDMX);

    let again: Series = fetcher.fetch(&d, SeriesKind::Unemployment, SourceUnits::Percent).unwrap();
    assert_eq!(again, s);
    assert_eq!(hits.load(Ordering::SeqCst), 1, "second fetch is served from cache");

    let offline = Fetcher::new(cache.path()).offline(true);
    assert_eq!(offline.fetch::<f64>(&d, SeriesKind::Unemployment, SourceUnits::Percent).unwrap(), s);
}

#[test]
fn missing_resource_is_a_retrieval_error() {
    let (base, _) = serve(HashMap::new());
    let cache = tempfile::tempdir().unwrap();
    let fetcher = Fetcher::new(cache.path());
    let d = descriptor(&base, "JPN.NOPE");
    let err = fetcher.fetch::<f64>(&d, SeriesKind::Unemployment, SourceUnits::Percent).unwrap_err();
    assert!(matches!(err, Error::Retrieval(_)), "{err:?}");
    assert!(!fetcher.cache_path(&d).exists());
}

#[test]
fn invalid_payload_is_not_cached() {
    let (base, hits) = serve(HashMap::from([("/MEI/BAD", "<html>maintenance</html>")]));
    let cache = tempfile::tempdir().unwrap();
    let fetcher = Fetcher::new(cache.path());
    let d = descriptor(&base, "BAD");
    assert!(matches!(fetcher.fetch::<f64>(&d, SeriesKind::Unemployment, SourceUnits::Percent), Err(Error::Parse { .. })));
    assert!(!fetcher.cache_path(&d).exists());
    let _ = fetcher.fetch::<f64>(&d, SeriesKind::Unemployment, SourceUnits::Percent);
    assert_eq!(hits.load(Ordering::SeqCst), 2);
}

#[test]
fn offline_miss_fails_without_network() {
    let cache = tempfile::tempdir().unwrap();
    let d = descriptor("http://127.0.0.1:9", "JPN.UNR");
    let err = Fetcher::new(cache.path()).offline(true).fetch_raw(&d).unwrap_err();
    assert!(matches!(err, Error::Retrieval(_)));
}

#[test]
fn unreachable_host_is_a_retrieval_error() {
    let cache = tempfile::tempdir().unwrap();
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = listener.local_addr().unwrap().port();
    drop(listener);
    let d = descriptor(&format!("http://127.0.0.1:{port}"), "JPN.UNR");
    let fetcher = Fetcher::new(cache.path()).with_timeout(std::time::Duration::from_secs(2));
    assert!(matches!(fetcher.fetch_raw(&d), Err(Error::Retrieval(_))));
}

#[test]
fn manifest_mixes_local_and_remote() {
    let (base, _) = serve(HashMap::from([("/MEI/JPN.UNR", SDMX)]));
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cpi.csv"), "year,value\n2010,-0.7\n2011,-0.3\n2012,0.0\n").unwrap();
    let json = format!(
        r#"{{"series": {{
            "cpi": {{"path": "cpi.csv", "kind": "cpi-inflation", "units": "percent"}},
            "u": {{"remote": {{"base_url": "{base}", "dataset": "MEI", "key": "JPN.UNR"}}, "kind": "unemployment", "units": "percent"}}
        }}}}"#
    );
    let manifest = DatasetManifest::from_json(&json, dir.path()).unwrap();
    let data = manifest.load::<f64>(&Fetcher::new(dir.path().join("cache"))).unwrap();
    assert_eq!(data.get("cpi").unwrap().values()[0], -0.7 / 100.0);
    assert_eq!(data.get("u").unwrap().len(), 3);

    let both = json.replace(r#""path": "cpi.csv","#, r#""path": "cpi.csv", "remote": {"base_url": "x", "dataset": "d", "key": "k"},"#);
    assert!(DatasetManifest::from_json(&both, dir.path()).is_err());
}
