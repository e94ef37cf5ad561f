//! Boolean event traces: file formats, ground bitmaps, slicing and the
//! random generator.

mod gen;
mod ground;
mod io;
mod slice;

use thiserror::Error;

pub use gen::{generate_random_trace, TraceGenSpec, PRNG_ID};
pub use ground::build_ground_bitmaps;
pub use io::{
    load_trace, load_trace_with, write_trace, BinaryCells, Format, LoadOptions, RowMapper,
};
pub use slice::{slice, SliceKey};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("duplicate variable name {0:?}")]
    DuplicateVariable(String),
    #[error("event has {found} values, expected {expected}")]
    Width { expected: usize, found: usize },
}

/// Integer side column used to slice a trace. `None` marks an event
/// without a key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyColumn {
    pub name: String,
    pub values: Vec<Option<i64>>,
}

/// A finite sequence of events, each assigning a Boolean to every variable.
/// Event 0 is the oldest.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    variables: Vec<String>,
    // Event-major: event i occupies bits[i * width .. (i + 1) * width].
    bits: Vec<bool>,
    len: usize,
    keys: Option<KeyColumn>,
}

impl Trace {
    pub fn new(variables: Vec<String>) -> Result<Trace, TraceError> {
        for (i, v) in variables.iter().enumerate() {
            if variables[..i].contains(v) {
                return Err(TraceError::DuplicateVariable(v.clone()));
            }
        }
        Ok(Trace {
            variables,
            bits: Vec::new(),
            len: 0,
            keys: None,
        })
    }

    pub fn from_events<E: AsRef<[bool]>>(
        variables: Vec<String>,
        events: &[E],
    ) -> Result<Trace, TraceError> {
        let mut t = Trace::new(variables)?;
        for e in events {
            t.push_event(e.as_ref())?;
        }
        Ok(t)
    }

    pub fn push_event(&mut self, values: &[bool]) -> Result<(), TraceError> {
        if values.len() != self.variables.len() {
            return Err(TraceError::Width {
                expected: self.variables.len(),
                found: values.len(),
            });
        }
        self.bits.extend_from_slice(values);
        self.len += 1;
        if let Some(keys) = &mut self.keys {
            keys.values.push(None);
        }
        Ok(())
    }

    /// Attaches a key column; its length must match the event count.
    pub fn set_keys(&mut self, keys: KeyColumn) -> Result<(), TraceError> {
        if keys.values.len() != self.len {
            return Err(TraceError::Width {
                expected: self.len,
                found: keys.values.len(),
            });
        }
        self.keys = Some(keys);
        Ok(())
    }

    pub fn keys(&self) -> Option<&KeyColumn> {
        self.keys.as_ref()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn event(&self, i: usize) -> &[bool] {
        let w = self.variables.len();
        &self.bits[i * w..(i + 1) * w]
    }

    pub fn events(&self) -> impl Iterator<Item = &[bool]> {
        (0..self.len).map(|i| self.event(i))
    }

    pub fn value(&self, var: usize, event: usize) -> bool {
        assert!(
            var < self.variables.len() && event < self.len,
            "trace index out of range"
        );
        self.bits[event * self.variables.len() + var]
    }

    /// All values of one variable, oldest first.
    pub fn column(&self, name: &str) -> Option<Vec<bool>> {
        let v = self.var_index(name)?;
        Some((0..self.len).map(|i| self.value(v, i)).collect())
    }

    /// Sub-trace made of the listed events, in the given order.
    pub fn select(&self, events: &[usize]) -> Trace {
        let mut out = Trace {
            variables: self.variables.clone(),
            ..Trace::default()
        };
        for &i in events {
            out.bits.extend_from_slice(self.event(i));
        }
        out.len = events.len();
        out.keys = self.keys.as_ref().map(|k| KeyColumn {
            name: k.name.clone(),
            values: events.iter().map(|&i| k.values[i]).collect(),
        });
        out
    }
}
