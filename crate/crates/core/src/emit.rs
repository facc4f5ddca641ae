//! Flat-file output: CSV with a fixed header or a JSON array of objects.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` exactly. Field order is fixed per record type so
//! identical inputs give byte-identical files.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::asymptotics::AsymptoticsRecord;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::SpectralEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format {other:?}; expected csv or json"))),
        }
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        // adding +0 turns −0 into +0
        format!("{:.16e}", x + 0.0)
    } else {
        x.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Int(v) => v.to_string(),
            Field::Float(v) => fmt_f64(*v),
            Field::Str(s) => s.clone(),
            Field::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Field::Int(v) => v.to_string(),
            Field::Float(v) if v.is_finite() => fmt_f64(*v),
            Field::Float(_) => "null".into(),
            Field::Str(s) => serde_json::to_string(s).expect("string serializes"),
            Field::Bool(b) => b.to_string(),
        }
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as i64)
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Float(v)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Str(v.to_string())
    }
}

/// A row type with a fixed column order. Serde names must match `HEADER`.
pub trait Record: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];

    fn fields(&self) -> Vec<Field>;
}

pub fn write_records<R: Record, W: Write>(records: &[R], format: Format, mut writer: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            w.write_record(R::HEADER)?;
            for r in records {
                w.write_record(r.fields().iter().map(Field::csv))?;
            }
            w.flush().map_err(|e| Error::Csv(e.into()))?;
        }
        Format::Json => {
            let mut out = String::from("[");
            for (i, r) in records.iter().enumerate() {
                out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
                for (j, (key, field)) in R::HEADER.iter().zip(r.fields()).enumerate() {
                    if j > 0 {
                        out.push_str(", ");
                    }
                    write!(out, "\"{key}\": {}", field.json()).expect("write to string");
                }
                out.push('}');
            }
            out.push_str(if records.is_empty() { "]\n" } else { "\n]\n" });
            writer.write_all(out.as_bytes()).map_err(|e| Error::Csv(e.into()))?;
        }
    }
    Ok(())
}

/// Writes `records` to `path`, creating or truncating it.
pub fn emit<R: Record>(records: &[R], format: Format, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    write_records(records, format, &mut w)?;
    w.flush().map_err(io_err)
}

pub fn read_records<R: Record, Rd: Read>(format: Format, reader: Rd) -> Result<Vec<R>> {
    match format {
        Format::Csv => {
            let mut r = csv::Reader::from_reader(reader);
            let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
            if header != R::HEADER {
                return Err(Error::Config(format!("unexpected CSV header {header:?}")));
            }
            r.deserialize().map(|row| row.map_err(Error::from)).collect()
        }
        Format::Json => Ok(serde_json::from_reader(reader)?),
    }
}

pub fn parse_file<R: Record>(format: Format, path: &Path) -> Result<Vec<R>> {
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    read_records(format, file)
}

/// One row of the exported eigenbasis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub k: usize,
    pub l: usize,
    pub class: String,
    pub phi: f64,
    pub re_v0: f64,
    pub im_v0: f64,
    pub re_v1: f64,
    pub im_v1: f64,
}

impl<T: Real> From<&SpectralEntry<T>> for SpectrumRow {
    fn from(e: &SpectralEntry<T>) -> Self {
        Self {
            k: e.momentum.k(),
            l: e.momentum.l(),
            class: e.class.as_str().to_string(),
            phi: e.phi.to_f64_lossy(),
            re_v0: e.v[0].re.to_f64_lossy(),
            im_v0: e.v[0].im.to_f64_lossy(),
            re_v1: e.v[1].re.to_f64_lossy(),
            im_v1: e.v[1].im.to_f64_lossy(),
        }
    }
}

impl Record for SpectrumRow {
    const HEADER: &'static [&'static str] = &["k", "l", "class", "phi", "re_v0", "im_v0", "re_v1", "im_v1"];

    fn fields(&self) -> Vec<Field> {
        vec![
            self.k.into(),
            self.l.into(),
            self.class.as_str().into(),
            self.phi.into(),
            self.re_v0.into(),
            self.im_v0.into(),
            self.re_v1.into(),
            self.im_v1.into(),
        ]
    }
}

impl Record for AsymptoticsRecord {
    const HEADER: &'static [&'static str] = &[
        "n",
        "lambda_exact",
        "lambda_approx",
        "c2_direct",
        "c2_reduced",
        "i_n",
        "phi_min",
        "overlap_marked",
        "t_opt",
        "p_model",
    ];

    fn fields(&self) -> Vec<Field> {
        vec![
            self.n.into(),
            self.lambda_exact.into(),
            self.lambda_approx.into(),
            self.c2_direct.into(),
            self.c2_reduced.into(),
            self.i_n.into(),
            self.phi_min.into(),
            self.overlap_marked.into(),
            self.t_opt.into(),
            self.p_model.into(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
        assert_eq!(fmt_f64(-0.0), "0.0000000000000000e0");
        let x = std::f64::consts::PI / 7.0;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn empty_csv_is_header_only() {
        let mut buf = Vec::new();
        write_records::<SpectrumRow, _>(&[], Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,l,class,phi,re_v0,im_v0,re_v1,im_v1\n");
        let mut buf = Vec::new();
        write_records::<SpectrumRow, _>(&[], Format::Json, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "[]\n");
    }

    #[test]
    fn header_mismatch_rejected() {
        let text = "a,b\n1,2\n";
        assert!(read_records::<SpectrumRow, _>(Format::Csv, text.as_bytes()).is_err());
    }

    #[test]
    fn format_parsing() {
        assert_eq!("JSON".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }
}
