//! Numeric CSV tables: one header row, then rows of reals. The last column is the response.

use std::io::Read;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Features and response read from a CSV table.
#[derive(Debug, Clone)]
pub struct Table {
    pub feature_names: Vec<String>,
    pub response_name: String,
    pub features: DMatrix<f64>,
    pub response: DVector<f64>,
}

pub fn read_table_path(path: impl AsRef<Path>) -> Result<Table> {
    let file = std::fs::File::open(path.as_ref())?;
    read_table(file)
}

pub fn read_table<R: Read>(reader: R) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if headers.len() < 2 {
        return Err(Error::Parse("need at least one feature column and a response column".into()));
    }
    let width = headers.len();
    let mut values = Vec::new();
    let mut rows = 0usize;
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != width {
            return Err(Error::Parse(format!("row {} has {} fields, expected {width}", line + 2, record.len())));
        }
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: `{field}` is not a number", line + 2)))?;
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Parse("table has no data rows".into()));
    }
    let all = DMatrix::from_row_slice(rows, width, &values);
    let d = width - 1;
    Ok(Table {
        feature_names: headers[..d].to_vec(),
        response_name: headers[d].clone(),
        features: all.columns(0, d).into_owned(),
        response: all.column(d).into_owned(),
    })
}

/// Writes features and response with headers `x0..x{d-1},y`.
pub fn write_table<W: std::io::Write>(writer: W, features: &DMatrix<f64>, response: &DVector<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..features.ncols()).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for i in 0..features.nrows() {
        let mut row: Vec<String> = features.row(i).iter().map(|v| v.to_string()).collect();
        row.push(response[i].to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
