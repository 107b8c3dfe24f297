use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::AnnualSeries;

use super::{read_csv_file, Fetcher, RemoteDescriptor, SeriesKind, SourceUnits};

/// One named series: exactly one of `path` or `remote`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    /// Relative paths resolve against the manifest's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remote: Option<RemoteDescriptor>,
    pub kind: SeriesKind,
    pub units: SourceUnits,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub series: BTreeMap<String, ManifestEntry>,
    /// Directory relative paths resolve against; set by [`DatasetManifest::from_file`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl DatasetManifest {
    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut m: DatasetManifest = serde_json::from_str(text)?;
        m.base_dir = base_dir.into();
        for (name, e) in &m.series {
            if e.path.is_some() == e.remote.is_some() {
                return Err(Error::input(format!("series {name:?} needs exactly one of `path` or `remote`")));
            }
            e.units.check(e.kind).map_err(|err| Error::input(format!("series {name:?}: {err}")))?;
        }
        Ok(m)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read manifest {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json(&text, base)
    }

    pub fn load_entry<T: Scalar>(&self, name: &str, fetcher: &Fetcher) -> Result<AnnualSeries<T>> {
        let e = self
            .series
            .get(name)
            .ok_or_else(|| Error::input(format!("manifest has no series {name:?}")))?;
        let series = match (&e.path, &e.remote) {
            (Some(p), _) => read_csv_file(&self.base_dir.join(p), e.kind, e.units),
            (None, Some(r)) => fetcher.fetch(r, e.kind, e.units),
            (None, None) => unreachable!("validated on construction"),
        }
        .map_err(|err| match err {
            Error::Parse { row, message } => Error::Parse { row, message: format!("{name}: {message}") },
            other => other,
        })?;
        Ok(series.with_label(name))
    }

    /// Loads every entry.
    pub fn load<T: Scalar>(&self, fetcher: &Fetcher) -> Result<Dataset<T>> {
        let mut data = Dataset::new();
        for name in self.series.keys() {
            data.insert(name.clone(), self.load_entry(name, fetcher)?);
        }
        Ok(data)
    }
}

/// Reads the manifest at `path` and loads all its series.
pub fn load_manifest<T: Scalar>(path: &Path, fetcher: &Fetcher) -> Result<Dataset<T>> {
    DatasetManifest::from_file(path)?.load(fetcher)
}
