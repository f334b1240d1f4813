//! Long-format panel CSV: `id,time,value`, one row per observation.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use nnavg_core::series::{Panel, Time, TimeSeries};
use serde::{Deserialize, Serialize};

use crate::error::IoError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Row {
    id: String,
    time: Time,
    value: f64,
}

/// Reads a panel. Rows may come in any order; each series must be observed
/// at consecutive times.
pub fn read_panel<R: Read>(reader: R) -> Result<Panel, IoError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut by_id: BTreeMap<String, BTreeMap<Time, f64>> = BTreeMap::new();
    for (line, row) in rdr.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| IoError::Csv { line: line + 2, source: e })?;
        if !row.value.is_finite() {
            return Err(IoError::Invalid(format!("series {}: non-finite value at time {}", row.id, row.time)));
        }
        if by_id.entry(row.id.clone()).or_default().insert(row.time, row.value).is_some() {
            return Err(IoError::Invalid(format!("series {}: duplicate time {}", row.id, row.time)));
        }
    }
    if by_id.is_empty() {
        return Err(IoError::Invalid("panel CSV has no rows".into()));
    }
    let mut series = Vec::with_capacity(by_id.len());
    for (id, obs) in by_id {
        let start = *obs.keys().next().expect("non-empty");
        for (offset, t) in obs.keys().enumerate() {
            if *t != start + offset as Time {
                return Err(IoError::Invalid(format!("series {id}: gap before time {t}")));
            }
        }
        series.push(TimeSeries::new(id, start, obs.into_values().collect())?);
    }
    Ok(Panel::new(series)?)
}

pub fn read_panel_file(path: &Path) -> Result<Panel, IoError> {
    let file = std::fs::File::open(path).map_err(|e| IoError::Open { path: path.to_path_buf(), source: e })?;
    read_panel(std::io::BufReader::new(file))
}

/// Writes a panel sorted by id, then time.
pub fn write_panel<W: Write>(panel: &Panel, writer: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    for s in panel.iter() {
        for (i, v) in s.values().iter().enumerate() {
            w.serialize(Row { id: s.id().to_string(), time: s.start() + i as Time, value: *v })?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_sorts_rows() {
        let text = "id,time,value\nb,3,1.5\na,1,2\nb,2,0.5\na,2,3\n";
        let panel = read_panel(text.as_bytes()).unwrap();
        assert_eq!(panel.get("b").unwrap().start(), 2);
        let mut out = Vec::new();
        write_panel(&panel, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "id,time,value\na,1,2.0\na,2,3.0\nb,2,0.5\nb,3,1.5\n");
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "id,time,value\n",
            "id,time,value\na,1,1\na,1,2\n",
            "id,time,value\na,1,1\na,3,2\n",
            "id,time,value\na,1,NaN\n",
            "id,time,value\na,x,1\n",
            "id,time,value\na,0,1\n",
        ] {
            assert!(read_panel(bad.as_bytes()).is_err(), "{bad}");
        }
    }
}
