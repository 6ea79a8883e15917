//! Plain-text signal input and CSV output.
//!
//! Signals are read either as one value per line (uniform samples on
//! `[0, 1]`) or as `x,value` pairs with strictly increasing `x`, which are
//! mapped affinely onto `[0, 1]`. Blank lines and lines starting with `#` are
//! skipped. Numbers are written with Rust's shortest round-trip formatting,
//! so a written signal reads back bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path as FsPath;

use hv_geodesic::Signal;
use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn parse_number(tok: &str, path: &str, line: usize) -> Result<f64, IoError> {
    let x: f64 = tok.trim().parse().map_err(|_| IoError::Parse {
        path: path.into(),
        line,
        message: format!("cannot parse {:?} as a number", tok.trim()),
    })?;
    if !x.is_finite() {
        return Err(IoError::Parse {
            path: path.into(),
            line,
            message: "non-finite value".into(),
        });
    }
    Ok(x)
}

/// Parses signal text; `name` is used in error messages.
pub fn parse_signal(text: &str, name: &str) -> Result<(Option<Vec<f64>>, Vec<f64>), IoError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut columns = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let row = raw.trim();
        if row.is_empty() || row.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = row.split(',').collect();
        if toks.len() > 2 || columns.is_some_and(|c| c != toks.len()) {
            return Err(IoError::Parse {
                path: name.into(),
                line,
                message: format!(
                    "expected {} column(s), found {}",
                    columns.unwrap_or(1),
                    toks.len()
                ),
            });
        }
        columns = Some(toks.len());
        if toks.len() == 2 {
            let x = parse_number(toks[0], name, line)?;
            if let Some(&prev) = xs.last() {
                if x <= prev {
                    return Err(IoError::Parse {
                        path: name.into(),
                        line,
                        message: format!("x = {x} does not increase"),
                    });
                }
            }
            xs.push(x);
            ys.push(parse_number(toks[1], name, line)?);
        } else {
            ys.push(parse_number(toks[0], name, line)?);
        }
    }
    if ys.len() < 5 {
        return Err(IoError::Invalid {
            path: name.into(),
            message: format!("a signal needs at least 5 samples, found {}", ys.len()),
        });
    }
    Ok(((columns == Some(2)).then_some(xs), ys))
}

fn to_signal(
    xs: Option<Vec<f64>>,
    ys: Vec<f64>,
    target_nx: Option<usize>,
    name: &str,
) -> Result<Signal, IoError> {
    let invalid = |e: hv_geodesic::HvError| IoError::Invalid {
        path: name.into(),
        message: e.to_string(),
    };
    let nx = target_nx.unwrap_or(ys.len() - 1);
    let values = match xs {
        None => return Ok(Signal::new(ys).map_err(invalid)?.resample(nx)),
        Some(xs) => {
            let (a, b) = (xs[0], xs[xs.len() - 1]);
            let unit: Vec<f64> = xs.iter().map(|x| (x - a) / (b - a)).collect();
            let mut seg = 0;
            (0..=nx)
                .map(|i| {
                    let q = i as f64 / nx as f64;
                    while seg + 2 < unit.len() && unit[seg + 1] < q {
                        seg += 1;
                    }
                    let (x0, x1) = (unit[seg], unit[seg + 1]);
                    let theta = ((q - x0) / (x1 - x0)).clamp(0.0, 1.0);
                    if theta == 0.0 {
                        ys[seg]
                    } else if theta == 1.0 {
                        ys[seg + 1]
                    } else {
                        (1.0 - theta) * ys[seg] + theta * ys[seg + 1]
                    }
                })
                .collect()
        }
    };
    Signal::new(values).map_err(invalid)
}

/// Reads a signal, resampled to `target_nx` intervals when given.
pub fn load_signal(path: &FsPath, target_nx: Option<usize>) -> Result<Signal, IoError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: name.clone(),
        source,
    })?;
    let (xs, ys) = parse_signal(&text, &name)?;
    to_signal(xs, ys, target_nx, &name)
}

/// One value per line.
pub fn format_signal(signal: &Signal) -> String {
    let mut out = String::new();
    for v in signal.values() {
        writeln!(out, "{v}").expect("writing to a String");
    }
    out
}

/// One comma-separated row per matrix row.
pub fn format_matrix(m: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses the output of [`format_matrix`].
pub fn parse_matrix(text: &str) -> Option<Array2<f64>> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(',')
                .map(|t| t.trim().parse().ok())
                .collect::<Option<Vec<f64>>>()
        })
        .collect::<Option<_>>()?;
    let ncols = rows.first()?.len();
    if rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Array2::from_shape_vec((rows.len(), ncols), rows.concat()).ok()
}

pub fn write_text(path: &FsPath, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}
