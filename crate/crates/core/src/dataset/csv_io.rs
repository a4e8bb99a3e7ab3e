use std::io::{Read, Write};
use std::path::Path;

use super::{Dataset, DatasetError, WellLogRecord};

/// Header of every well-log CSV, in this exact order.
pub const CSV_COLUMNS: [&str; 7] = [
    "well_id",
    "depth",
    "gamma_ray",
    "resistivity",
    "density",
    "clay_volume",
    "oil_saturation",
];

/// Loads a well-log CSV. The dataset is named after the file stem.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| DatasetError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    read_csv(file, name)
}

/// Parses well-log CSV from any reader. Line numbers in errors are 1-based
/// data-row numbers (the header is line 0).
pub fn read_csv(reader: impl Read, name: impl Into<String>) -> Result<Dataset, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|_| DatasetError::ParseError { line: 0, column: "header".into() })?
        .clone();

    let mut index = [0usize; 7];
    for (slot, col) in index.iter_mut().zip(CSV_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == col)
            .ok_or_else(|| DatasetError::MissingColumn(col.to_string()))?;
    }

    let mut records = Vec::new();
    for (row, result) in rdr.records().enumerate() {
        let line = row + 1;
        let rec = result.map_err(|_| DatasetError::ParseError { line, column: "row".into() })?;
        let field = |k: usize| rec.get(index[k]).unwrap_or("");
        let number = |k: usize| -> Result<f64, DatasetError> {
            field(k).parse::<f64>().map_err(|_| DatasetError::ParseError {
                line,
                column: CSV_COLUMNS[k].to_string(),
            })
        };
        let well_id = field(0).to_string();
        if well_id.is_empty() {
            return Err(DatasetError::InvariantViolation { line, reason: "empty well_id".into() });
        }
        let depth = if field(1).is_empty() { None } else { Some(number(1)?) };
        let r = WellLogRecord {
            well_id,
            depth,
            gamma_ray: number(2)?,
            resistivity: number(3)?,
            density: number(4)?,
            clay_volume: number(5)?,
            oil_saturation: number(6)?,
        };
        r.validate().map_err(|reason| DatasetError::InvariantViolation { line, reason })?;
        records.push(r);
    }
    if records.is_empty() {
        return Err(DatasetError::EmptyDataset);
    }
    Dataset::new(name, records)
}

/// Writes a dataset in the canonical column order. Floats use Rust's
/// shortest round-trip formatting, so `read_csv(write_csv(d)) == d`.
pub fn write_csv(data: &Dataset, writer: impl Write) -> Result<(), DatasetError> {
    let io = |e: csv::Error| DatasetError::Io { path: data.name().to_string(), message: e.to_string() };
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in data.records() {
        let depth = r.depth.map(|d| d.to_string()).unwrap_or_default();
        w.write_record([
            r.well_id.clone(),
            depth,
            r.gamma_ray.to_string(),
            r.resistivity.to_string(),
            r.density.to_string(),
            r.clay_volume.to_string(),
            r.oil_saturation.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| DatasetError::Io { path: data.name().to_string(), message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "well_id,depth,gamma_ray,resistivity,density,clay_volume,oil_saturation\n";

    #[test]
    fn three_valid_rows_in_order() {
        let text = format!(
            "{HEADER}A,1000.5,80,5.2,2.4,0.30,0\nA,,45,12,2.2,0.08,0.55\nB,1001,120,2.1,2.6,0.45,0\n"
        );
        let d = read_csv(text.as_bytes(), "t").unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.records()[0].depth, Some(1000.5));
        assert_eq!(d.records()[1].depth, None);
        assert_eq!(d.records()[1].oil_saturation, 0.55);
        assert_eq!(d.records()[2].well_id, "B");
    }

    #[test]
    fn out_of_range_saturation_names_line() {
        let text = format!("{HEADER}A,1,80,5,2.4,0.3,0\nA,2,80,5,2.4,0.3,1.4\n");
        match read_csv(text.as_bytes(), "t") {
            Err(DatasetError::InvariantViolation { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_named() {
        let text = "well_id,depth,gamma_ray,resistivity,density,oil_saturation\nA,1,80,5,2.4,0\n";
        assert_eq!(
            read_csv(text.as_bytes(), "t").unwrap_err(),
            DatasetError::MissingColumn("clay_volume".into())
        );
    }

    #[test]
    fn unparsable_cell_and_empty_file() {
        let text = format!("{HEADER}A,1,eighty,5,2.4,0.3,0\n");
        assert_eq!(
            read_csv(text.as_bytes(), "t").unwrap_err(),
            DatasetError::ParseError { line: 1, column: "gamma_ray".into() }
        );
        assert_eq!(read_csv(HEADER.as_bytes(), "t").unwrap_err(), DatasetError::EmptyDataset);
    }

    #[test]
    fn write_then_read_is_identity() {
        let text = format!("{HEADER}A,1000.5,80.125,5.2,2.4,0.30,0\nB,,45,12,2.2,0.08,0.1234567890123\n");
        let d = read_csv(text.as_bytes(), "t").unwrap();
        let mut buf = Vec::new();
        write_csv(&d, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice(), "t").unwrap(), d);
    }
}
