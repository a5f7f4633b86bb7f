//! CSV ingestion of time series and the JSON tensor format.
//!
//! CSV input: a header `t,x1,...,xd` followed by rows of decimal numbers with
//! strictly increasing `t`. Times are mapped affinely onto `[0, 1]`.
//!
//! JSON tensor output:
//! `{"d":2,"depth":1,"interval":[0,1],"levels":[[1],[0,0]]}` with level `k`
//! holding `d^k` numbers in lexicographic word order. Numbers carry at most
//! 17 significant digits, which reproduces every `f64` bit for bit.

use std::io::Read;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::signature::SampledPath;
use crate::tensor::TruncatedTensor;

/// A path read from CSV plus the original (unnormalised) time span.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvPath {
    pub path: SampledPath<f64>,
    pub time_span: (f64, f64),
}

fn csv_err(line: u64, message: impl Into<String>) -> Error {
    Error::Csv {
        line,
        message: message.into(),
    }
}

pub fn read_csv_str(text: &str) -> Result<CsvPath> {
    read_csv(text.as_bytes())
}

/// Parses a CSV time series. Errors name the offending line and column.
pub fn read_csv<R: Read>(source: R) -> Result<CsvPath> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut records = reader.records();

    let header = match records.next() {
        Some(r) => r.map_err(|e| csv_err(1, e.to_string()))?,
        None => return Err(csv_err(1, "empty input")),
    };
    let d = header.len().saturating_sub(1);
    if d == 0 {
        return Err(csv_err(1, "header must be `t,x1,...,xd` with d ≥ 1"));
    }
    for (i, name) in header.iter().enumerate() {
        let expected = if i == 0 {
            "t".to_string()
        } else {
            format!("x{i}")
        };
        if name != expected {
            return Err(csv_err(
                1,
                format!("header column {} is `{name}`, expected `{expected}`", i + 1),
            ));
        }
    }

    let mut raw_times = Vec::new();
    let mut points = Vec::new();
    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            csv_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != d + 1 {
            return Err(csv_err(
                line,
                format!("expected {} fields, found {}", d + 1, record.len()),
            ));
        }
        for (col, cell) in record.iter().enumerate() {
            let value: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| {
                    csv_err(
                        line,
                        format!("column {}: `{cell}` is not a finite number", col + 1),
                    )
                })?;
            if col == 0 {
                if let Some(&prev) = raw_times.last() {
                    if value <= prev {
                        return Err(csv_err(
                            line,
                            format!("time {value} does not increase on {prev}"),
                        ));
                    }
                }
                raw_times.push(value);
            } else {
                points.push(value);
            }
        }
    }
    if raw_times.is_empty() {
        return Err(csv_err(2, "no data rows"));
    }
    let t0 = raw_times[0];
    let t1 = *raw_times.last().unwrap();
    let times = if raw_times.len() == 1 {
        vec![0.0]
    } else {
        let span = t1 - t0;
        let n = raw_times.len();
        raw_times
            .iter()
            .enumerate()
            .map(|(i, t)| if i + 1 == n { 1.0 } else { (t - t0) / span })
            .collect()
    };
    let path = SampledPath::from_flat(d, times, points)?;
    Ok(CsvPath {
        path,
        time_span: (t0, t1),
    })
}

/// Metadata written alongside a tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorMeta {
    /// Window in normalised time.
    pub interval: (f64, f64),
    /// Original time span of the source data, when known.
    pub time_span: Option<(f64, f64)>,
}

impl Default for TensorMeta {
    fn default() -> Self {
        Self {
            interval: (0.0, 1.0),
            time_span: None,
        }
    }
}

/// Shortest decimal rendering with at most 17 significant digits that
/// parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0.0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let n = digits.len() as i32;
    let body = if (-5..17).contains(&exp) {
        if exp >= 0 {
            if n <= exp + 1 {
                format!("{digits}{}", "0".repeat((exp + 1 - n) as usize))
            } else {
                let (int, frac) = digits.split_at((exp + 1) as usize);
                format!("{int}.{frac}")
            }
        } else {
            format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
        }
    } else if n == 1 {
        format!("{digits}e{exp}")
    } else {
        format!("{}.{}e{exp}", &digits[..1], &digits[1..])
    };
    format!("{sign}{body}")
}

fn write_array(out: &mut String, values: &[f64]) {
    out.push('[');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format_number(*v));
    }
    out.push(']');
}

/// Serialises a tensor; field order is `d, depth, interval, [time_span,] levels`.
pub fn write_tensor_json(x: &TruncatedTensor<f64>, meta: &TensorMeta) -> String {
    let mut out = format!("{{\"d\":{},\"depth\":{},\"interval\":", x.d(), x.depth());
    write_array(&mut out, &[meta.interval.0, meta.interval.1]);
    if let Some((a, b)) = meta.time_span {
        out.push_str(",\"time_span\":");
        write_array(&mut out, &[a, b]);
    }
    out.push_str(",\"levels\":[");
    for (k, level) in x.levels().enumerate() {
        if k > 0 {
            out.push(',');
        }
        write_array(&mut out, level);
    }
    out.push_str("]}");
    out
}

fn as_pair(v: &Value, key: &str) -> Result<(f64, f64)> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Json(format!("`{key}` must be a two-element array")))?;
    let num = |x: &Value| {
        x.as_f64()
            .ok_or_else(|| Error::Json(format!("`{key}` holds a non-number")))
    };
    Ok((num(&arr[0])?, num(&arr[1])?))
}

/// Parses the JSON tensor format.
pub fn read_tensor_json(text: &str) -> Result<(TruncatedTensor<f64>, TensorMeta)> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    let field = |key: &str| {
        v.get(key)
            .ok_or_else(|| Error::Json(format!("missing `{key}`")))
    };
    let uint = |key: &str| -> Result<usize> {
        field(key)?
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| Error::Json(format!("`{key}` must be a nonnegative integer")))
    };
    let d = uint("d")?;
    let depth = uint("depth")?;
    let interval = as_pair(field("interval")?, "interval")?;
    let time_span = match v.get("time_span") {
        Some(ts) => Some(as_pair(ts, "time_span")?),
        None => None,
    };
    let levels = field("levels")?
        .as_array()
        .ok_or_else(|| Error::Json("`levels` must be an array".into()))?;
    if levels.len() != depth + 1 {
        return Err(Error::Json(format!(
            "{} levels for depth {depth}",
            levels.len()
        )));
    }
    let levels = levels
        .iter()
        .map(|level| {
            level
                .as_array()
                .ok_or_else(|| Error::Json("each level must be an array".into()))?
                .iter()
                .map(|x| {
                    x.as_f64()
                        .ok_or_else(|| Error::Json("non-numeric coefficient".into()))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let tensor = TruncatedTensor::from_levels(d, levels)?;
    Ok((
        tensor,
        TensorMeta {
            interval,
            time_span,
        },
    ))
}
