//! Backend-independent bitmap contract and its three implementations.
//!
//! A bitmap is a finite sequence of bits `b_0 .. b_{n-1}` where index 0 is the
//! first (oldest) event of a trace. Every backend implements [`Bitmap`]; the
//! evaluator is generic over it, so a new representation only has to satisfy
//! the trait to be usable everywhere.
//!
//! Values are immutable from the caller's perspective. The appending
//! primitives (`add_many`, `copy_to`, `remove_first_bit`) consume the bitmap
//! and hand back the updated one, which lets backends mutate in place.

mod raw;
mod rle;
mod roaring;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use raw::{RawBitmap, RawCursor};
pub use rle::{RleBitmap, RleCursor};
pub use roaring::{RoaringBitmap, RoaringCursor};

pub(crate) const WORD_BITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitmapError {
    #[error("bitmap length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid bit character {found:?} at offset {offset}")]
    InvalidBitChar { offset: usize, found: char },
}

/// A resumable position inside one bitmap.
///
/// The cursor remembers both the absolute bit index and a backend-specific
/// internal position, so repeated forward searches do not rescan the prefix.
pub trait BitCursor {
    /// Absolute bit index the cursor points at. Equals the bitmap length once
    /// a search has run off the end.
    fn absolute(&self) -> usize;

    /// Bit under the cursor, `None` when past the end.
    fn bit(&self) -> Option<bool>;

    /// Moves to the smallest index `i >= from` with `b_i == v` and returns it.
    ///
    /// Searches with non-decreasing `from` cost amortized time proportional
    /// to the runs crossed; seeking backwards is allowed but restarts the
    /// internal walk.
    fn seek(&mut self, v: bool, from: usize) -> Option<usize>;
}

pub trait Bitmap: Clone + fmt::Debug + PartialEq + Send + Sync + Sized {
    type Cursor<'a>: BitCursor
    where
        Self: 'a;

    /// Backend name as accepted by [`Backend::from_str`].
    const NAME: &'static str;

    fn empty() -> Self;

    /// Builds a bitmap from LSB-first packed words. Bits at or past `len` are
    /// ignored.
    ///
    /// # Panics
    /// If `words` holds fewer than `len` bits.
    fn from_words(words: Vec<u64>, len: usize) -> Self;

    /// Decodes into the uncompressed representation.
    fn to_raw(&self) -> RawBitmap;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Bit at index `i`.
    ///
    /// # Panics
    /// If `i >= self.len()`.
    fn get(&self, i: usize) -> bool;

    fn and(&self, other: &Self) -> Result<Self, BitmapError>;

    fn or(&self, other: &Self) -> Result<Self, BitmapError>;

    fn not(&self) -> Self;

    /// Appends `len` copies of `v`.
    fn add_many(self, v: bool, len: usize) -> Self;

    /// Appends `src[start .. start + len]`.
    ///
    /// # Panics
    /// If `start + len > src.len()`.
    fn copy_to(self, src: &Self, start: usize, len: usize) -> Self;

    /// Drops bit 0, shifting every other bit one position towards the front.
    ///
    /// # Panics
    /// If the bitmap is empty.
    fn remove_first_bit(self) -> Self;

    /// Smallest `i >= from` with `b_i == v`.
    fn next(&self, v: bool, from: usize) -> Option<usize>;

    /// Largest `i` with `b_i == v`.
    fn last(&self, v: bool) -> Option<usize>;

    /// Bytes of backend payload (words or containers), without per-object
    /// overhead.
    fn payload_bytes(&self) -> usize;

    fn cursor(&self) -> Self::Cursor<'_>;

    fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0usize;
        for bit in bits {
            if len.is_multiple_of(WORD_BITS) {
                words.push(0u64);
            }
            if bit {
                *words.last_mut().unwrap() |= 1 << (len % WORD_BITS);
            }
            len += 1;
        }
        Self::from_words(words, len)
    }

    fn to_bools(&self) -> Vec<bool> {
        let raw = self.to_raw();
        (0..raw.len()).map(|i| raw.get(i)).collect()
    }

    /// Bit-for-bit equality with a bitmap of any backend.
    fn same_bits<O: Bitmap>(&self, other: &O) -> bool {
        self.len() == other.len() && self.to_raw() == other.to_raw()
    }

    /// Debug rendering, `'0'`/`'1'` per bit with index 0 first.
    fn render(&self) -> String {
        let raw = self.to_raw();
        (0..raw.len())
            .map(|i| if raw.get(i) { '1' } else { '0' })
            .collect()
    }

    /// Parses the debug rendering produced by [`Bitmap::render`].
    fn parse_bits(text: &str) -> Result<Self, BitmapError> {
        let mut bits = Vec::with_capacity(text.len());
        for (offset, found) in text.chars().enumerate() {
            match found {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(BitmapError::InvalidBitChar { offset, found }),
            }
        }
        Ok(Self::from_bits(bits))
    }
}

/// Runtime backend selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Backend {
    Raw,
    Rle64,
    Roaring,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Raw, Backend::Rle64, Backend::Roaring];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Raw => RawBitmap::NAME,
            Backend::Rle64 => RleBitmap::NAME,
            Backend::Roaring => RoaringBitmap::NAME,
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown backend {0:?} (expected raw, rle64 or roaring)")]
pub struct UnknownBackend(pub String);

impl FromStr for Backend {
    type Err = UnknownBackend;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" => Ok(Backend::Raw),
            "rle64" => Ok(Backend::Rle64),
            "roaring" => Ok(Backend::Roaring),
            other => Err(UnknownBackend(other.to_string())),
        }
    }
}

/// Dispatches a generic expression over the concrete bitmap type selected by
/// a [`Backend`] value. Inside the body, the given identifier names the type.
///
/// ```
/// use ltlbit::bitmap::{Backend, Bitmap};
/// use ltlbit::with_backend;
///
/// let name = with_backend!(Backend::Rle64, B => B::NAME);
/// assert_eq!(name, "rle64");
/// ```
#[macro_export]
macro_rules! with_backend {
    ($backend:expr, $ty:ident => $body:expr) => {
        match $backend {
            $crate::bitmap::Backend::Raw => {
                type $ty = $crate::bitmap::RawBitmap;
                $body
            }
            $crate::bitmap::Backend::Rle64 => {
                type $ty = $crate::bitmap::RleBitmap;
                $body
            }
            $crate::bitmap::Backend::Roaring => {
                type $ty = $crate::bitmap::RoaringBitmap;
                $body
            }
        }
    };
}

/// Last answer of a cursor search, per searched value. A search for `v`
/// from `from` that returned `found` proves there is no `v` in
/// `from..found`, so later searches starting inside that range have the
/// same answer and need not rescan it.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct SeekMemo([Option<(usize, Option<usize>)>; 2]);

impl SeekMemo {
    pub(crate) fn recall(&self, v: bool, from: usize) -> Option<Option<usize>> {
        let (lo, found) = self.0[v as usize]?;
        (from >= lo && found.is_none_or(|f| from <= f)).then_some(found)
    }

    pub(crate) fn remember(&mut self, v: bool, from: usize, found: Option<usize>) {
        self.0[v as usize] = Some((from, found));
    }
}

#[inline]
pub(crate) fn low_mask(bits: usize) -> u64 {
    if bits >= WORD_BITS {
        !0
    } else {
        (1u64 << bits) - 1
    }
}

pub(crate) fn check_same_len(left: usize, right: usize) -> Result<(), BitmapError> {
    if left == right {
        Ok(())
    } else {
        Err(BitmapError::LengthMismatch { left, right })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backend_names_round_trip() {
        for b in Backend::ALL {
            assert_eq!(b.name().parse::<Backend>().unwrap(), b);
        }
        assert!("wah".parse::<Backend>().is_err());
    }

    #[test]
    fn parse_bits_rejects_garbage() {
        assert_eq!(
            RawBitmap::parse_bits("01x").unwrap_err(),
            BitmapError::InvalidBitChar {
                offset: 2,
                found: 'x'
            }
        );
    }
}
