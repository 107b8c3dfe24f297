use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::AnnualSeries;

use super::{read_csv_series, SeriesKind, SourceUnits};

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "LABORCURVE_CACHE_DIR";

const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// An SDMX-style REST resource: `{base_url}/{dataset}/{key}[?{query}]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemoteDescriptor {
    pub base_url: String,
    pub dataset: String,
    pub key: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
    /// File name inside the cache directory; derived from dataset and key when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache: Option<String>,
}

impl RemoteDescriptor {
    pub fn url(&self) -> String {
        let mut url = format!("{}/{}/{}", self.base_url.trim_end_matches('/'), self.dataset, self.key);
        if let Some(q) = &self.query {
            url.push('?');
            url.push_str(q);
        }
        url
    }

    pub fn cache_name(&self) -> String {
        self.cache.clone().unwrap_or_else(|| {
            let safe = |s: &str| s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect::<String>();
            format!("{}__{}.csv", safe(&self.dataset), safe(&self.key))
        })
    }
}

/// Cache-first HTTP client. Payloads are stored verbatim, one file per key.
#[derive(Clone, Debug)]
pub struct Fetcher {
    cache_dir: PathBuf,
    timeout: Duration,
    offline: bool,
}

impl Fetcher {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        Self { cache_dir: cache_dir.into(), timeout: DEFAULT_TIMEOUT, offline: false }
    }

    /// Uses `$LABORCURVE_CACHE_DIR` if set, else `fallback`.
    pub fn from_env(fallback: impl Into<PathBuf>) -> Self {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Self::new(dir),
            _ => Self::new(fallback),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    /// Never touch the network; a cache miss is a retrieval error.
    pub fn offline(mut self, offline: bool) -> Self {
        self.offline = offline;
        self
    }

    pub fn cache_dir(&self) -> &Path {
        &self.cache_dir
    }

    pub fn cache_path(&self, desc: &RemoteDescriptor) -> PathBuf {
        self.cache_dir.join(desc.cache_name())
    }

    /// Raw payload, from the cache if present, else from the network.
    ///
    /// `validate` runs before anything is cached so a bad payload never lands on disk.
    pub fn fetch_raw_with(&self, desc: &RemoteDescriptor, validate: impl FnOnce(&str) -> Result<()>) -> Result<String> {
        let path = self.cache_path(desc);
        let lock = key_lock(&path);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        if let Ok(cached) = fs::read_to_string(&path) {
            return Ok(cached);
        }
        if self.offline {
            return Err(Error::Retrieval(format!("{} not cached and network disabled", desc.url())));
        }
        let body = self.download(&desc.url())?;
        validate(&body)?;
        fs::create_dir_all(&self.cache_dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.cache_dir)?;
        tmp.write_all(body.as_bytes())?;
        tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
        Ok(body)
    }

    pub fn fetch_raw(&self, desc: &RemoteDescriptor) -> Result<String> {
        self.fetch_raw_with(desc, |_| Ok(()))
    }

    pub fn fetch<T: Scalar>(&self, desc: &RemoteDescriptor, kind: SeriesKind, units: SourceUnits) -> Result<AnnualSeries<T>> {
        let body = self.fetch_raw_with(desc, |b| parse_payload::<T>(b, kind, units).map(|_| ()))?;
        parse_payload(&body, kind, units)
    }

    fn download(&self, url: &str) -> Result<String> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let mut resp = agent.get(url).call().map_err(|e| Error::Retrieval(format!("GET {url}: {e}")))?;
        resp.body_mut()
            .read_to_string()
            .map_err(|e| Error::Retrieval(format!("GET {url}: reading body: {e}")))
    }
}

/// One mutex per cache file so concurrent fetches of a key serialize.
fn key_lock(path: &Path) -> Arc<Mutex<()>> {
    static LOCKS: OnceLock<Mutex<HashMap<PathBuf, Arc<Mutex<()>>>>> = OnceLock::new();
    let mut map = LOCKS.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
    map.entry(path.to_path_buf()).or_default().clone()
}

/// Parses either a `year,value` table or SDMX-CSV with `TIME_PERIOD` and `OBS_VALUE` columns.
pub fn parse_payload<T: Scalar>(body: &str, kind: SeriesKind, units: SourceUnits) -> Result<AnnualSeries<T>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Parse { row: 1, message: e.to_string() })?
        .clone();
    let col = |name: &str| header.iter().position(|h| h == name);
    let (Some(t), Some(v)) = (col("TIME_PERIOD"), col("OBS_VALUE")) else {
        return read_csv_series(body.as_bytes(), kind, units);
    };
    let units = units.check(kind)?;
    let mut rows: Vec<(i32, T, u64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            row: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let row = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let year = field(t)
            .get(..4)
            .and_then(|y| y.parse::<i32>().ok())
            .filter(|_| field(t).len() == 4)
            .ok_or_else(|| Error::Parse { row, message: format!("bad annual period {:?}", field(t)) })?;
        let value: T = field(v)
            .parse()
            .map_err(|_| Error::Parse { row, message: format!("bad value {:?}", field(v)) })?;
        rows.push((year, units.to_internal(value), row));
    }
    rows.sort_by_key(|r| r.0);
    for w in rows.windows(2) {
        let (prev, (year, _, row)) = (w[0].0, w[1]);
        if year == prev {
            return Err(Error::Parse { row, message: format!("duplicate year {year}") });
        }
        if year != prev + 1 {
            return Err(Error::Parse { row, message: format!("gap: year {} missing", prev + 1) });
        }
    }
    let start = rows.first().map(|r| r.0).ok_or_else(|| Error::input("payload has no observations"))?;
    AnnualSeries::new(start, rows.into_iter().map(|r| r.1).collect(), kind.internal_units())
}
