//! Text formats shared by the command line and the examples: CSV with a
//! header row and 12 significant digits, single-object JSON, and readers for
//! everything that is written.

use std::io::{self, BufRead, Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dyadic::BinaryWord;
use crate::error::{Error, Result};
use crate::growth::{Checkpoint, RatioTrace};
use crate::spectrum::{SpectrumSample, Q0};

pub const SPECTRUM_HEADER: [&str; 4] = ["alpha", "q0", "t_q0", "dimension"];
pub const TRACE_HEADER: [&str; 4] = ["n", "log2_S", "log2_psi", "log_ratio"];
pub const CONSTRUCT_HEADER: [&str; 5] = ["k", "N_k", "S_NK_log2", "psi_log2", "ratio"];

/// `x` with 12 significant digits, in the shorter of fixed and scientific
/// notation; `inf`, `-inf` and `nan` for the non-finite values.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn parse_f64(field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {field:?}")))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

fn to_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Header check plus raw records.
fn read_records<R: Read>(r: R, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut reader = csv::Reader::from_reader(r);
    let found = reader.headers().map_err(csv_error)?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Parse(format!(
            "expected header {}, found {}",
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    reader.records().map(|r| r.map_err(csv_error)).collect()
}

pub fn write_spectrum_csv<W: Write>(rows: &[SpectrumSample], w: W) -> io::Result<()> {
    let mut out = writer(w);
    out.write_record(SPECTRUM_HEADER).map_err(to_io)?;
    for s in rows {
        let q0 = match s.q0 {
            Q0::Finite(q) => fmt_sig(q),
            Q0::AtInfinity => "inf".into(),
        };
        out.write_record([fmt_sig(s.alpha), q0, fmt_sig(s.t_q0), fmt_sig(s.dimension)])
            .map_err(to_io)?;
    }
    out.flush()
}

/// A spectrum row as read back from CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub alpha: f64,
    /// `None` for the `inf` marker.
    pub q0: Option<f64>,
    pub t_q0: f64,
    pub dimension: f64,
}

pub fn read_spectrum_csv<R: Read>(r: R) -> Result<Vec<SpectrumRow>> {
    read_records(r, &SPECTRUM_HEADER)?
        .iter()
        .map(|rec| {
            let q0 = match &rec[1] {
                "inf" => None,
                other => Some(parse_f64(other)?),
            };
            Ok(SpectrumRow {
                alpha: parse_f64(&rec[0])?,
                q0,
                t_q0: parse_f64(&rec[2])?,
                dimension: parse_f64(&rec[3])?,
            })
        })
        .collect()
}

pub fn write_trace_csv<W: Write>(trace: &RatioTrace, w: W) -> io::Result<()> {
    let mut out = writer(w);
    out.write_record(TRACE_HEADER).map_err(to_io)?;
    for c in &trace.checkpoints {
        out.write_record([
            c.n.to_string(),
            fmt_sig(c.log2_s),
            fmt_sig(c.log2_psi),
            fmt_sig(c.log_ratio),
        ])
        .map_err(to_io)?;
    }
    out.flush()
}

pub fn read_trace_csv<R: Read>(r: R) -> Result<RatioTrace> {
    let checkpoints = read_records(r, &TRACE_HEADER)?
        .iter()
        .map(|rec| {
            Ok(Checkpoint {
                n: rec[0]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad position {:?}", &rec[0])))?,
                log2_s: parse_f64(&rec[1])?,
                log2_psi: parse_f64(&rec[2])?,
                log_ratio: parse_f64(&rec[3])?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(RatioTrace { checkpoints })
}

/// One checkpoint of a constructed point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructRow {
    pub k: u64,
    pub n_k: u64,
    pub s_log2: f64,
    pub psi_log2: f64,
    pub ratio: f64,
}

pub fn write_construct_csv<W: Write>(rows: &[ConstructRow], w: W) -> io::Result<()> {
    let mut out = writer(w);
    out.write_record(CONSTRUCT_HEADER).map_err(to_io)?;
    for r in rows {
        out.write_record([
            r.k.to_string(),
            r.n_k.to_string(),
            fmt_sig(r.s_log2),
            fmt_sig(r.psi_log2),
            fmt_sig(r.ratio),
        ])
        .map_err(to_io)?;
    }
    out.flush()
}

pub fn read_construct_csv<R: Read>(r: R) -> Result<Vec<ConstructRow>> {
    let int = |s: &str| {
        s.parse::<u64>()
            .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
    };
    read_records(r, &CONSTRUCT_HEADER)?
        .iter()
        .map(|rec| {
            Ok(ConstructRow {
                k: int(&rec[0])?,
                n_k: int(&rec[1])?,
                s_log2: parse_f64(&rec[2])?,
                psi_log2: parse_f64(&rec[3])?,
                ratio: parse_f64(&rec[4])?,
            })
        })
        .collect()
}

/// Single-line JSON object.
pub fn to_json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report types serialize")
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("json: {e}")))
}

/// Output of `construct`/`infinity`: a JSON header line, a digit line and a CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamDocument {
    pub header: serde_json::Value,
    pub digits: BinaryWord,
    pub table: String,
}

pub fn read_stream_document<R: BufRead>(mut r: R) -> Result<StreamDocument> {
    let mut line = String::new();
    let mut next_line = |r: &mut R| -> Result<String> {
        line.clear();
        r.read_line(&mut line)
            .map_err(|e| Error::Parse(format!("read: {e}")))?;
        Ok(line.clone())
    };
    let header = from_json(next_line(&mut r)?.trim_end())?;
    let digits = BinaryWord::parse_line(&next_line(&mut r)?)?;
    let mut table = String::new();
    r.read_to_string(&mut table)
        .map_err(|e| Error::Parse(format!("read: {e}")))?;
    Ok(StreamDocument { header, digits, table })
}

/// Digit prefix file: one line of `0`/`1`.
pub fn read_digit_file(path: &std::path::Path) -> Result<BinaryWord> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    BinaryWord::parse_line(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-0.457_532_884_365_514_9), "-0.457532884366");
        assert_eq!(fmt_sig(123_456_789_012_345.0), "1.23456789012e14");
        assert_eq!(fmt_sig(1e-7), "1e-7");
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
        assert_eq!(fmt_sig(f64::NEG_INFINITY), "-inf");
        for x in [std::f64::consts::PI, 1e300, -2.5e-300, 0.1, 99_999_999_999.95] {
            let back: f64 = fmt_sig(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-11, "{x} -> {}", fmt_sig(x));
        }
    }

    #[test]
    fn spectrum_round_trip() {
        let rows = vec![
            SpectrumSample {
                alpha: 1.0,
                q0: Q0::AtInfinity,
                t_q0: f64::NEG_INFINITY,
                dimension: 0.0,
                saturated: false,
            },
            SpectrumSample {
                alpha: 1.5,
                q0: Q0::Finite(0.351),
                t_q0: 0.359,
                dimension: 0.886,
                saturated: false,
            },
        ];
        let mut buf = Vec::new();
        write_spectrum_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("alpha,q0,t_q0,dimension\n1,inf,-inf,0\n"));
        let back = read_spectrum_csv(text.as_bytes()).unwrap();
        assert_eq!(back[0].q0, None);
        assert_eq!(back[1].q0, Some(0.351));
        assert!(read_trace_csv(text.as_bytes()).is_err());
    }
}
