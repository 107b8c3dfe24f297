use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::AnnualSeries;

/// Named collection of series that model specifications refer to.
///
/// Besides stored names, [`Dataset::resolve`] understands `dlog(NAME)`, the
/// annual log growth of a stored level series such as a labor force.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset<T> {
    series: BTreeMap<String, AnnualSeries<T>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new() -> Self {
        Self { series: BTreeMap::new() }
    }

    pub fn insert(&mut self, name: impl Into<String>, series: AnnualSeries<T>) -> &mut Self {
        self.series.insert(name.into(), series);
        self
    }

    pub fn with(mut self, name: impl Into<String>, series: AnnualSeries<T>) -> Self {
        self.insert(name, series);
        self
    }

    pub fn get(&self, name: &str) -> Option<&AnnualSeries<T>> {
        self.series.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &AnnualSeries<T>)> {
        self.series.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Looks up `name`, deriving `dlog(..)` growth series on demand.
    pub fn resolve(&self, name: &str) -> Result<AnnualSeries<T>> {
        if let Some(s) = self.series.get(name) {
            return Ok(s.clone());
        }
        if let Some(inner) = name.strip_prefix("dlog(").and_then(|r| r.strip_suffix(')')) {
            return Ok(self.resolve(inner)?.log_growth()?.with_label(name));
        }
        Err(Error::input(format!("unknown series {name:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Units;

    #[test]
    fn resolves_growth() {
        let lf = AnnualSeries::new(2000, vec![100.0, 110.0], Units::Persons).unwrap();
        let d = Dataset::new().with("lf", lf);
        let g = d.resolve("dlog(lf)").unwrap();
        assert_eq!(g.start_year(), 2001);
        assert!((g.values()[0] - 1.1_f64.ln()).abs() < 1e-15);
        assert!(d.resolve("dlog(missing)").is_err());
        assert!(d.resolve("u").is_err());
    }
}
