//! Offline LTL evaluation over per-variable bitmaps.
//!
//! A finite trace of boolean observations is turned into one bitmap per
//! variable (bit `i` is the value at event `i`, oldest first). A formula is
//! then evaluated bottom-up, each operator mapping whole bitmaps to a bitmap,
//! so the result bitmap holds the truth value of the formula at every
//! position. The verdict is the bit at position 0.
//!
//! Three interchangeable bitmap backends implement [`bitmap::Bitmap`]:
//! uncompressed words, a word-aligned run-length encoding and a
//! roaring-style chunked set.

pub mod bench;
pub mod bitmap;
pub mod eval;
pub mod ltl;
pub mod par;
pub mod trace;

pub use bitmap::{Backend, Bitmap, RawBitmap, RleBitmap, RoaringBitmap};
pub use eval::{eval, EvalError, EvalResult, GroundEnv};
pub use ltl::{parse, Formula};
pub use trace::Trace;
