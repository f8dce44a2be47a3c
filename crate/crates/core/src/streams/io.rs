//! Row files.
//!
//! Text: a `d=<int>` header line, then one row per line as comma-separated
//! decimals. Kept-row files append `;<weight>` to each line.
//!
//! Binary: magic `ORSS`, `u32` version (1), `u32` d, then the rows as
//! little-endian `f64` in row-major order. Kept-row files follow the rows with
//! a parallel section of one little-endian `f64` weight per row.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::{RowSink, RowStream, WeightedRow};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const BINARY_MAGIC: &[u8; 4] = b"ORSS";
pub const BINARY_VERSION: u32 = 1;
const HEADER_LEN: u64 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowFormat {
    Text,
    Binary,
}

impl RowFormat {
    /// `.bin` and `.orss` files are binary, anything else is text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin") | Some("orss") => RowFormat::Binary,
            _ => RowFormat::Text,
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Kept rows loaded from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedRows<T> {
    pub dim: usize,
    pub rows: Vec<WeightedRow<T>>,
}

/// Opens a row file as a lazy stream. Weights in kept-row text files are
/// ignored; binary files must not carry a weight section.
pub fn read_rows<T: Scalar>(path: &Path, format: RowFormat) -> Result<RowStream<'static, T>> {
    match format {
        RowFormat::Text => {
            let (dim, lines) = open_text(path)?;
            let path = path.to_path_buf();
            Ok(RowStream::new(
                dim,
                lines.map(move |item| {
                    let (lineno, line) = item?;
                    parse_text_row(&path, lineno, &line, dim).map(|(row, _)| row)
                }),
            ))
        }
        RowFormat::Binary => {
            let (dim, n, reader) = open_binary(path, false)?;
            let path = path.to_path_buf();
            let mut reader = reader;
            Ok(RowStream::new(
                dim,
                (0..n).map(move |_| read_f64s(&mut reader, dim, &path)),
            ))
        }
    }
}

/// Loads a kept-row file with its weights.
pub fn read_weighted_rows<T: Scalar>(path: &Path, format: RowFormat) -> Result<WeightedRows<T>> {
    match format {
        RowFormat::Text => {
            let (dim, lines) = open_text(path)?;
            let mut rows = Vec::new();
            for item in lines {
                let (lineno, line) = item?;
                let (row, weight) = parse_text_row(path, lineno, &line, dim)?;
                let weight = weight.ok_or_else(|| parse_err(path, lineno, "missing `;weight`"))?;
                rows.push(WeightedRow { row, weight });
            }
            Ok(WeightedRows { dim, rows })
        }
        RowFormat::Binary => {
            let (dim, n, mut reader) = open_binary(path, true)?;
            let mut data = Vec::with_capacity(n);
            for _ in 0..n {
                data.push(read_f64s::<T>(&mut reader, dim, path)?);
            }
            let weights = read_f64s::<T>(&mut reader, n, path)?;
            let rows = data
                .into_iter()
                .zip(weights)
                .map(|(row, weight)| WeightedRow { row, weight })
                .collect();
            Ok(WeightedRows { dim, rows })
        }
    }
}

type TextLines = Box<dyn Iterator<Item = Result<(usize, String)>>>;

fn open_text(path: &Path) -> Result<(usize, TextLines)> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut lines = BufReader::new(file).lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line.map_err(io_err(path))?,
        None => return Err(parse_err(path, 1, "missing `d=<int>` header")),
    };
    let dim = header
        .trim()
        .strip_prefix("d=")
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&d| d > 0)
        .ok_or_else(|| {
            parse_err(
                path,
                1,
                format!("bad header `{header}`, expected `d=<int>`"),
            )
        })?;
    let owned: PathBuf = path.to_path_buf();
    let body = lines.filter_map(move |(i, line)| match line {
        Ok(l) if l.trim().is_empty() => None,
        Ok(l) => Some(Ok((i + 1, l))),
        Err(source) => Some(Err(Error::Io {
            path: owned.clone(),
            source,
        })),
    });
    Ok((dim, Box::new(body)))
}

fn parse_text_row<T: Scalar>(
    path: &Path,
    lineno: usize,
    line: &str,
    dim: usize,
) -> Result<(Vec<T>, Option<T>)> {
    let (values, weight) = match line.split_once(';') {
        Some((v, w)) => (v, Some(w)),
        None => (line, None),
    };
    let parse = |tok: &str| -> Result<T> {
        tok.trim()
            .parse::<f64>()
            .map(T::lit)
            .map_err(|e| parse_err(path, lineno, format!("bad number `{}`: {e}", tok.trim())))
    };
    let row = values.split(',').map(parse).collect::<Result<Vec<T>>>()?;
    if row.len() != dim {
        return Err(parse_err(
            path,
            lineno,
            format!("row has {} entries, header declares d={dim}", row.len()),
        ));
    }
    let weight = weight.map(parse).transpose()?;
    Ok((row, weight))
}

fn open_binary(path: &Path, weighted: bool) -> Result<(usize, usize, BufReader<File>)> {
    let file = File::open(path).map_err(io_err(path))?;
    let len = file.metadata().map_err(io_err(path))?.len();
    let mut reader = BufReader::new(file);
    let mut header = [0u8; HEADER_LEN as usize];
    reader
        .read_exact(&mut header)
        .map_err(|_| format_err(path, "truncated header"))?;
    if &header[..4] != BINARY_MAGIC {
        return Err(format_err(path, "bad magic, expected `ORSS`"));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().expect("4 bytes"));
    if version != BINARY_VERSION {
        return Err(format_err(path, format!("unsupported version {version}")));
    }
    let dim = u32::from_le_bytes(header[8..12].try_into().expect("4 bytes")) as usize;
    if dim == 0 {
        return Err(format_err(path, "dimension must be positive"));
    }
    let per_row = 8 * (dim as u64 + u64::from(weighted));
    let body = len - HEADER_LEN;
    if !body.is_multiple_of(per_row) {
        return Err(format_err(
            path,
            format!("payload of {body} bytes is not a whole number of {per_row}-byte rows"),
        ));
    }
    Ok((dim, (body / per_row) as usize, reader))
}

fn read_f64s<T: Scalar>(reader: &mut impl Read, count: usize, path: &Path) -> Result<Vec<T>> {
    let mut buf = vec![0u8; 8 * count];
    reader.read_exact(&mut buf).map_err(io_err(path))?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| T::lit(f64::from_le_bytes(c.try_into().expect("8 bytes"))))
        .collect())
}

/// Streaming writer for row files. Binary weights are buffered and written
/// by [`RowWriter::finish`], which must be called.
pub struct RowWriter<T> {
    path: PathBuf,
    format: RowFormat,
    dim: usize,
    weighted: bool,
    out: BufWriter<File>,
    weights: Vec<T>,
    rows: usize,
}

impl<T: Scalar> RowWriter<T> {
    pub fn create(path: &Path, format: RowFormat, dim: usize, weighted: bool) -> Result<Self> {
        let file = File::create(path).map_err(io_err(path))?;
        let mut out = BufWriter::new(file);
        let write = match format {
            RowFormat::Text => writeln!(out, "d={dim}"),
            RowFormat::Binary => out
                .write_all(BINARY_MAGIC)
                .and_then(|_| out.write_all(&BINARY_VERSION.to_le_bytes()))
                .and_then(|_| out.write_all(&(dim as u32).to_le_bytes())),
        };
        write.map_err(io_err(path))?;
        Ok(Self {
            path: path.to_path_buf(),
            format,
            dim,
            weighted,
            out,
            weights: Vec::new(),
            rows: 0,
        })
    }

    pub fn rows_written(&self) -> usize {
        self.rows
    }

    pub fn push(&mut self, row: &[T], weight: Option<T>) -> Result<()> {
        crate::linalg::check_row(row, self.dim, self.rows)?;
        if weight.is_some() != self.weighted {
            return Err(format_err(
                &self.path,
                "weight presence must match the file kind",
            ));
        }
        let res = match self.format {
            RowFormat::Text => {
                let mut line = row
                    .iter()
                    .map(|x| x.as_f64().to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                if let Some(w) = weight {
                    line.push(';');
                    line.push_str(&w.as_f64().to_string());
                }
                writeln!(self.out, "{line}")
            }
            RowFormat::Binary => {
                if let Some(w) = weight {
                    self.weights.push(w);
                }
                row.iter()
                    .try_for_each(|x| self.out.write_all(&x.as_f64().to_le_bytes()))
            }
        };
        res.map_err(io_err(&self.path))?;
        self.rows += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        if self.format == RowFormat::Binary {
            for w in &self.weights {
                self.out
                    .write_all(&w.as_f64().to_le_bytes())
                    .map_err(io_err(&self.path))?;
            }
        }
        self.out.flush().map_err(io_err(&self.path))
    }
}

impl<T: Scalar> RowSink<T> for RowWriter<T> {
    fn accept(&mut self, row: WeightedRow<T>) -> Result<()> {
        self.push(&row.row, Some(row.weight))
    }
}

pub fn write_rows<T: Scalar, R: AsRef<[T]>>(
    path: &Path,
    format: RowFormat,
    dim: usize,
    rows: &[R],
) -> Result<()> {
    let mut w = RowWriter::create(path, format, dim, false)?;
    for r in rows {
        w.push(r.as_ref(), None)?;
    }
    w.finish()
}

pub fn write_weighted_rows<T: Scalar>(
    path: &Path,
    format: RowFormat,
    dim: usize,
    rows: &[WeightedRow<T>],
) -> Result<()> {
    let mut w = RowWriter::create(path, format, dim, true)?;
    for r in rows {
        w.push(&r.row, Some(r.weight))?;
    }
    w.finish()
}
