//! Post-order evaluation of formulas over ground bitmaps, plus a naive
//! reference evaluator.

mod ops;
pub mod oracle;

use std::borrow::Cow;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::bitmap::{Bitmap, BitmapError};
use crate::ltl::Formula;
use crate::par;

pub use ops::{op_and, op_finally, op_globally, op_implies, op_next, op_not, op_or, op_until};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("atom {0:?} is not bound to a trace variable")]
    UnboundAtom(String),
    #[error("bitmap for {name:?} has length {found}, expected {expected}")]
    BindingLength {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Bitmap(#[from] BitmapError),
}

/// Ground bitmaps of the trace variables, all of the trace length.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundEnv<B> {
    bindings: BTreeMap<String, B>,
    trace_len: usize,
    events_scanned: usize,
}

impl<B: Bitmap> GroundEnv<B> {
    pub fn new(trace_len: usize) -> GroundEnv<B> {
        GroundEnv {
            bindings: BTreeMap::new(),
            trace_len,
            events_scanned: 0,
        }
    }

    pub fn bind(&mut self, name: &str, bitmap: B) -> Result<(), EvalError> {
        if bitmap.len() != self.trace_len {
            return Err(EvalError::BindingLength {
                name: name.to_string(),
                expected: self.trace_len,
                found: bitmap.len(),
            });
        }
        self.bindings.insert(name.to_string(), bitmap);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&B> {
        self.bindings.get(name)
    }

    pub fn trace_len(&self) -> usize {
        self.trace_len
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.bindings.keys().map(String::as_str)
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&str, &B)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Events visited while building the environment from a trace.
    pub fn events_scanned(&self) -> usize {
        self.events_scanned
    }

    pub(crate) fn set_events_scanned(&mut self, n: usize) {
        self.events_scanned = n;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult<B> {
    /// Bit `i` tells whether the suffix starting at event `i` satisfies the
    /// formula.
    pub bitmap: B,
    pub verdict: bool,
    /// Largest total payload of the bitmaps alive at the same time during
    /// evaluation, ground bitmaps included while they are operands.
    pub peak_bitmap_bytes: usize,
}

#[derive(Default)]
struct Memory {
    live: usize,
    peak: usize,
}

impl Memory {
    fn alloc(&mut self, bytes: usize) {
        self.live += bytes;
        self.peak = self.peak.max(self.live);
    }

    fn free(&mut self, bytes: usize) {
        self.live -= bytes;
    }
}

fn node<'e, B: Bitmap>(
    f: &Formula,
    env: &'e GroundEnv<B>,
    mem: &mut Memory,
) -> Result<Cow<'e, B>, EvalError> {
    let unary = |g: &Formula,
                 mem: &mut Memory,
                 op: &dyn Fn(Cow<'e, B>) -> B|
     -> Result<Cow<'e, B>, EvalError> {
        let a = node(g, env, mem)?;
        let a_bytes = a.payload_bytes();
        let r = op(a);
        mem.alloc(r.payload_bytes());
        mem.free(a_bytes);
        Ok(Cow::Owned(r))
    };
    let binary = |l: &Formula,
                  r: &Formula,
                  mem: &mut Memory,
                  op: fn(&B, &B) -> Result<B, BitmapError>|
     -> Result<Cow<'e, B>, EvalError> {
        let a = node(l, env, mem)?;
        let b = node(r, env, mem)?;
        let out = op(&a, &b)?;
        mem.alloc(out.payload_bytes());
        mem.free(a.payload_bytes() + b.payload_bytes());
        Ok(Cow::Owned(out))
    };
    match f {
        Formula::Atom(name) => {
            let b = env
                .get(name)
                .ok_or_else(|| EvalError::UnboundAtom(name.to_string()))?;
            mem.alloc(b.payload_bytes());
            Ok(Cow::Borrowed(b))
        }
        Formula::Not(g) => unary(g, mem, &|a| op_not(&a)),
        Formula::Next(g) => unary(g, mem, &|a| op_next(a.into_owned())),
        Formula::Globally(g) => unary(g, mem, &|a| op_globally(&a)),
        Formula::Finally(g) => unary(g, mem, &|a| op_finally(&a)),
        Formula::And(l, r) => binary(l, r, mem, op_and),
        Formula::Or(l, r) => binary(l, r, mem, op_or),
        Formula::Implies(l, r) => binary(l, r, mem, op_implies),
        Formula::Until(l, r) => binary(l, r, mem, op_until),
    }
}

/// Evaluates `f` bottom-up over the ground bitmaps in `env`.
pub fn eval<B: Bitmap>(f: &Formula, env: &GroundEnv<B>) -> Result<EvalResult<B>, EvalError> {
    let mut mem = Memory::default();
    let bitmap = node(f, env, &mut mem)?.into_owned();
    let verdict = if env.trace_len() == 0 {
        empty_trace_verdict(f)
    } else {
        bitmap.get(0)
    };
    Ok(EvalResult {
        bitmap,
        verdict,
        peak_bitmap_bytes: mem.peak,
    })
}

/// Whole-trace verdict of `f`.
pub fn verdict<B: Bitmap>(f: &Formula, env: &GroundEnv<B>) -> Result<bool, EvalError> {
    eval(f, env).map(|r| r.verdict)
}

/// Verdict on the empty trace: `G` holds, `F`, `X` and `U` do not, atoms are
/// false and connectives combine their operands.
pub fn empty_trace_verdict(f: &Formula) -> bool {
    match f {
        Formula::Atom(_) => false,
        Formula::Globally(_) => true,
        Formula::Finally(_) | Formula::Next(_) | Formula::Until(..) => false,
        Formula::Not(g) => !empty_trace_verdict(g),
        Formula::And(l, r) => empty_trace_verdict(l) && empty_trace_verdict(r),
        Formula::Or(l, r) => empty_trace_verdict(l) || empty_trace_verdict(r),
        Formula::Implies(l, r) => !empty_trace_verdict(l) || empty_trace_verdict(r),
    }
}

/// Evaluates several formulas against one environment, in parallel when
/// the `parallel` feature is enabled. Results keep the input order.
pub fn eval_many<B: Bitmap>(
    formulas: &[Formula],
    env: &GroundEnv<B>,
) -> Vec<Result<EvalResult<B>, EvalError>> {
    par::map_collect(formulas, |f| eval(f, env))
}

/// Same as [`eval_many`], always on the calling thread.
pub fn eval_many_sequential<B: Bitmap>(
    formulas: &[Formula],
    env: &GroundEnv<B>,
) -> Vec<Result<EvalResult<B>, EvalError>> {
    formulas.iter().map(|f| eval(f, env)).collect()
}
