use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::AnnualSeries;

use super::{SeriesKind, SourceUnits};

/// Reads a `year,value` table with strictly consecutive years.
pub fn read_csv_series<T: Scalar, R: Read>(source: R, kind: SeriesKind, units: SourceUnits) -> Result<AnnualSeries<T>> {
    let units = units.check(kind)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let header = reader.headers().map_err(|e| parse_error(1, e))?;
    if header.len() != 2 || &header[0] != "year" || &header[1] != "value" {
        return Err(Error::Parse { row: 1, message: format!("expected header `year,value`, got {header:?}") });
    }
    let mut start = None;
    let mut next_year = 0;
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line());
            parse_error(row, e)
        })?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(Error::Parse { row, message: format!("expected 2 fields, got {}", record.len()) });
        }
        let year: i32 = record[0]
            .parse()
            .map_err(|_| Error::Parse { row, message: format!("bad year {:?}", &record[0]) })?;
        let value: T = record[1]
            .parse()
            .map_err(|_| Error::Parse { row, message: format!("bad value {:?}", &record[1]) })?;
        match start {
            None => start = Some(year),
            Some(_) if year == next_year => {}
            Some(_) if year < next_year => {
                let message = if year == next_year - 1 { "duplicate year" } else { "year out of order" };
                return Err(Error::Parse { row, message: format!("{message} {year}") });
            }
            Some(_) => {
                return Err(Error::Parse { row, message: format!("gap: year {next_year} missing before {year}") });
            }
        }
        next_year = year + 1;
        values.push(units.to_internal(value));
    }
    let start = start.ok_or_else(|| Error::input("series source has no data rows"))?;
    AnnualSeries::new(start, values, kind.internal_units())
}

pub fn read_csv_file<T: Scalar>(path: &Path, kind: SeriesKind, units: SourceUnits) -> Result<AnnualSeries<T>> {
    let file = File::open(path).map_err(|e| Error::input(format!("cannot open {}: {e}", path.display())))?;
    read_csv_series(file, kind, units)
}

/// Writes `year,value` rows in internal units with round-trip precision.
pub fn write_csv_series<T: Scalar, W: Write>(series: &AnnualSeries<T>, mut out: W) -> Result<()> {
    writeln!(out, "year,value")?;
    for (year, v) in series.iter() {
        writeln!(out, "{year},{v}")?;
    }
    Ok(())
}

fn parse_error(row: u64, e: csv::Error) -> Error {
    Error::Parse { row, message: e.to_string() }
}
