//! CSV persistence for sampled series.
//!
//! Layout: a header `t,v1,...,vn`, optionally followed by closed-form
//! derivative columns `v1_d1,...,vn_d1,v1_d2,...`. Lines starting with `#`
//! are comments. Numbers are written in the shortest decimal form that reads
//! back to the same `f64`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::PhaseVector;

use super::series::SampledSeries;

/// Relative jitter tolerated between consecutive time steps.
pub const TIME_JITTER_REL: f64 = 1e-9;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Csv {
        line,
        message: e.to_string(),
    }
}

fn derivative_order(name: &str) -> Option<usize> {
    let (_, suffix) = name.rsplit_once("_d")?;
    match suffix {
        "1" => Some(1),
        "2" => Some(2),
        "3" => Some(3),
        _ => None,
    }
}

pub fn read_series<R: Read>(reader: R) -> Result<SampledSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    let header_line = rdr.position().line().max(1);
    let names: Vec<&str> = header.iter().collect();
    if names.first().map(|s| s.trim()) != Some("t") {
        return Err(Error::Csv {
            line: header_line,
            message: "header must start with a 't' column".into(),
        });
    }
    let n = names[1..].iter().take_while(|c| derivative_order(c).is_none()).count();
    if n < 2 {
        return Err(Error::Csv {
            line: header_line,
            message: format!("need at least 2 phase columns, found {n}"),
        });
    }
    let deriv_cols = names.len() - 1 - n;
    if !deriv_cols.is_multiple_of(n) || deriv_cols / n > 3 {
        return Err(Error::Csv {
            line: header_line,
            message: format!("derivative columns must come in groups of {n} (up to order 3)"),
        });
    }
    for (j, name) in names[1 + n..].iter().enumerate() {
        if derivative_order(name) != Some(j / n + 1) {
            return Err(Error::Csv {
                line: header_line,
                message: format!("unexpected column '{name}'"),
            });
        }
    }
    let n_channels = deriv_cols / n;
    let width = names.len();

    let mut times: Vec<f64> = Vec::new();
    let mut lines: Vec<u64> = Vec::new();
    let mut samples = Vec::new();
    let mut channels: Vec<Vec<PhaseVector>> = vec![Vec::new(); n_channels];
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(Error::Csv {
                line,
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        let mut row = Vec::with_capacity(width);
        for (j, field) in rec.iter().enumerate() {
            let x: f64 = field.parse().map_err(|_| Error::Csv {
                line,
                message: format!("column '{}': cannot parse '{field}' as a number", names[j]),
            })?;
            if !x.is_finite() {
                return Err(Error::Csv {
                    line,
                    message: format!("column '{}': non-finite value", names[j]),
                });
            }
            row.push(x);
        }
        times.push(row[0]);
        lines.push(line);
        samples.push(PhaseVector::new(row[1..=n].to_vec())?);
        for (c, ch) in channels.iter_mut().enumerate() {
            let start = 1 + n * (c + 1);
            ch.push(PhaseVector::new(row[start..start + n].to_vec())?);
        }
    }

    if times.len() < 2 {
        return Err(Error::TooFewSamples {
            got: times.len(),
            need: 2,
        });
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Csv {
            line: lines[1],
            message: "time column must be strictly increasing".into(),
        });
    }
    for k in 1..times.len() {
        let step = times[k] - times[k - 1];
        let tol = TIME_JITTER_REL * dt + 4.0 * f64::EPSILON * (times[k].abs() + times[k - 1].abs());
        if step <= 0.0 || (step - dt).abs() > tol {
            return Err(Error::Csv {
                line: lines[k],
                message: format!("non-uniform time step {step:e} (expected {dt:e})"),
            });
        }
    }

    let mut series = SampledSeries::new(times[0], dt, samples)?;
    series.channels = channels;
    Ok(series)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<SampledSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    read_series(file)
}

pub fn write_series<W: Write>(series: &SampledSeries, writer: W) -> Result<()> {
    let n = series.dim();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("v{i}")));
    for order in 1..=series.channels.len() {
        header.extend((1..=n).map(|i| format!("v{i}_d{order}")));
    }
    let rows = (0..series.len()).map(|k| {
        let mut row = vec![fmt_num(series.time(k))];
        row.extend(series.samples[k].iter().map(|x| fmt_num(*x)));
        for ch in &series.channels {
            row.extend(ch[k].iter().map(|x| fmt_num(*x)));
        }
        row
    });
    write_table(writer, &header, rows)
}

pub fn write_csv(series: &SampledSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_err(path))?;
    write_series(series, BufWriter::new(file))
}

/// Shortest decimal form that reads back to the same value; exponent
/// notation for very small or very large magnitudes.
pub fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

/// Writes a header and rows of already formatted fields.
pub fn write_table<W, I>(writer: W, header: &[String], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new().from_writer(writer);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<output>".into(),
        source,
    })?;
    Ok(())
}
