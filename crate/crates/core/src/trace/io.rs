use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;
use std::sync::Arc;

use super::{KeyColumn, Trace, TraceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Header row of variable names, then one row of `0`/`1` cells per event.
    Csv,
    /// First line: space-separated variable names. Then one line per event
    /// holding one `0`/`1` character per variable.
    Bitlines,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "bitlines" => Ok(Format::Bitlines),
            other => Err(format!(
                "unknown trace format {other:?} (expected csv or bitlines)"
            )),
        }
    }
}

/// Turns the cells of one input row into variable values. The default,
/// [`BinaryCells`], accepts exactly `0` and `1`; a custom mapper can evaluate
/// predicates over richer cells before they reach the evaluator.
pub trait RowMapper: Send + Sync {
    /// Output variable names for the given input header.
    fn variables(&self, header: &[String]) -> Result<Vec<String>, String>;

    /// Appends one value per output variable to `out`.
    fn map_row(&self, cells: &[&str], out: &mut Vec<bool>) -> Result<(), String>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BinaryCells;

impl RowMapper for BinaryCells {
    fn variables(&self, header: &[String]) -> Result<Vec<String>, String> {
        Ok(header.to_vec())
    }

    fn map_row(&self, cells: &[&str], out: &mut Vec<bool>) -> Result<(), String> {
        for (j, cell) in cells.iter().enumerate() {
            match *cell {
                "0" => out.push(false),
                "1" => out.push(true),
                other => {
                    return Err(format!(
                        "column {}: expected 0 or 1, found {other:?}",
                        j + 1
                    ))
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone)]
pub struct LoadOptions {
    pub format: Format,
    /// CSV column holding integer slice keys. It is removed from the
    /// variables; empty cells mean "no key".
    pub key_column: Option<String>,
    pub mapper: Arc<dyn RowMapper>,
}

impl LoadOptions {
    pub fn new(format: Format) -> LoadOptions {
        LoadOptions {
            format,
            key_column: None,
            mapper: Arc::new(BinaryCells),
        }
    }

    pub fn key_column(mut self, name: impl Into<String>) -> LoadOptions {
        self.key_column = Some(name.into());
        self
    }
}

pub fn load_trace<R: Read>(source: R, format: Format) -> Result<Trace, TraceError> {
    load_trace_with(source, &LoadOptions::new(format))
}

pub fn load_trace_with<R: Read>(source: R, opts: &LoadOptions) -> Result<Trace, TraceError> {
    match opts.format {
        Format::Csv => load_csv(source, opts),
        Format::Bitlines => load_bitlines(source, opts),
    }
}

struct Builder<'a> {
    opts: &'a LoadOptions,
    trace: Trace,
    key_at: Option<usize>,
    width: usize,
    keys: Vec<Option<i64>>,
    row: Vec<bool>,
}

impl<'a> Builder<'a> {
    fn new(opts: &'a LoadOptions, header: Vec<String>) -> Result<Builder<'a>, TraceError> {
        let width = header.len();
        let key_at = opts
            .key_column
            .as_ref()
            .and_then(|k| header.iter().position(|h| h == k));
        let inputs: Vec<String> = header
            .into_iter()
            .enumerate()
            .filter(|&(j, _)| Some(j) != key_at)
            .map(|(_, h)| h)
            .collect();
        let vars = opts
            .mapper
            .variables(&inputs)
            .map_err(|message| TraceError::Parse { line: 1, message })?;
        Ok(Builder {
            opts,
            trace: Trace::new(vars)?,
            key_at,
            width,
            keys: Vec::new(),
            row: Vec::new(),
        })
    }

    fn push(&mut self, line: u64, cells: &[&str]) -> Result<(), TraceError> {
        let err = |message: String| TraceError::Parse { line, message };
        if cells.len() != self.width {
            return Err(err(format!(
                "expected {} values, found {}",
                self.width,
                cells.len()
            )));
        }
        let mut values: Vec<&str> = Vec::with_capacity(self.width);
        for (j, &cell) in cells.iter().enumerate() {
            if Some(j) == self.key_at {
                let key = if cell.is_empty() {
                    None
                } else {
                    Some(
                        cell.parse::<i64>()
                            .map_err(|_| err(format!("key {cell:?} is not an integer")))?,
                    )
                };
                self.keys.push(key);
            } else {
                values.push(cell);
            }
        }
        self.row.clear();
        self.opts
            .mapper
            .map_row(&values, &mut self.row)
            .map_err(err)?;
        self.trace
            .push_event(&self.row)
            .map_err(|e| err(e.to_string()))
    }

    fn finish(mut self) -> Result<Trace, TraceError> {
        if let (Some(_), Some(name)) = (self.key_at, &self.opts.key_column) {
            self.trace.set_keys(KeyColumn {
                name: name.clone(),
                values: self.keys,
            })?;
        }
        Ok(self.trace)
    }
}

fn load_csv<R: Read>(source: R, opts: &LoadOptions) -> Result<Trace, TraceError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(csv_error)?.iter().map(str::to_string).collect(),
        None => {
            return Err(TraceError::Parse {
                line: 1,
                message: "missing header row".into(),
            })
        }
    };
    let mut b = Builder::new(opts, header)?;
    for record in records {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let cells: Vec<&str> = record.iter().collect();
        b.push(line, &cells)?;
    }
    b.finish()
}

fn csv_error(e: csv::Error) -> TraceError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => TraceError::Io(io),
        kind => TraceError::Parse {
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn load_bitlines<R: Read>(source: R, opts: &LoadOptions) -> Result<Trace, TraceError> {
    let mut lines = BufReader::new(source).lines();
    let header = match lines.next() {
        Some(l) => l?.split_whitespace().map(str::to_string).collect(),
        None => {
            return Err(TraceError::Parse {
                line: 1,
                message: "missing header line".into(),
            })
        }
    };
    let mut b = Builder::new(opts, header)?;
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = (0..line.len())
            .map(|k| line.get(k..k + 1).unwrap_or("?"))
            .collect();
        b.push(i as u64 + 2, &cells)?;
    }
    b.finish()
}

/// Writes the canonical form of a trace. CSV output puts the key column, if
/// any, after the variables; bitlines cannot carry keys and omits them.
pub fn write_trace<W: Write>(trace: &Trace, sink: W, format: Format) -> Result<(), TraceError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(sink);
            let key = trace.keys();
            let mut header: Vec<&str> = trace.variables().iter().map(String::as_str).collect();
            if let Some(k) = key {
                header.push(&k.name);
            }
            w.write_record(&header).map_err(csv_error)?;
            let mut row: Vec<String> = Vec::new();
            for (i, event) in trace.events().enumerate() {
                row.clear();
                row.extend(event.iter().map(|&b| if b { "1" } else { "0" }.to_string()));
                if let Some(k) = key {
                    row.push(k.values[i].map_or(String::new(), |v| v.to_string()));
                }
                w.write_record(&row).map_err(csv_error)?;
            }
            w.flush()?;
        }
        Format::Bitlines => {
            let mut w = std::io::BufWriter::new(sink);
            writeln!(w, "{}", trace.variables().join(" "))?;
            let mut line = String::with_capacity(trace.variables().len() + 1);
            for event in trace.events() {
                line.clear();
                line.extend(event.iter().map(|&b| if b { '1' } else { '0' }));
                line.push('\n');
                w.write_all(line.as_bytes())?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
