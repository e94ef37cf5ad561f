//! EWAH-style run-length encoded bitmap.
//!
//! The stream is a sequence of groups. Each group starts with a marker word
//! followed by its dirty (literal) words:
//!
//! ```text
//! bit 0       fill value
//! bits 1..33  number of fill words (all bits equal to the fill value)
//! bits 33..64 number of dirty words that follow the marker
//! ```
//!
//! The logical bitmap is cut into 64-bit words. A complete word that is all
//! zeros or all ones is always stored as part of a fill, never as a dirty
//! word. A trailing partial word (when `len % 64 != 0`) is always the last
//! dirty word of the stream, with its padding bits cleared. Together with
//! run merging on append, this makes the encoding canonical: equal bit
//! sequences have identical word streams.

use super::{
    check_same_len, low_mask, BitCursor, Bitmap, BitmapError, RawBitmap, SeekMemo, WORD_BITS,
};

const FILL_COUNT_BITS: u32 = 32;
const DIRTY_COUNT_BITS: u32 = 31;
const MAX_FILL: u64 = (1 << FILL_COUNT_BITS) - 1;
const MAX_DIRTY: u64 = (1 << DIRTY_COUNT_BITS) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Marker {
    pub fill_bit: bool,
    pub fill_words: u64,
    pub dirty_words: u64,
}

impl Marker {
    const EMPTY: Marker = Marker {
        fill_bit: false,
        fill_words: 0,
        dirty_words: 0,
    };

    fn decode(word: u64) -> Marker {
        Marker {
            fill_bit: word & 1 == 1,
            fill_words: (word >> 1) & MAX_FILL,
            dirty_words: word >> (1 + FILL_COUNT_BITS),
        }
    }

    fn encode(self) -> u64 {
        debug_assert!(self.fill_words <= MAX_FILL && self.dirty_words <= MAX_DIRTY);
        self.fill_bit as u64 | (self.fill_words << 1) | (self.dirty_words << (1 + FILL_COUNT_BITS))
    }
}

#[derive(Debug, Clone)]
pub struct RleBitmap {
    words: Vec<u64>,
    /// Index of the last marker word in `words`.
    marker: usize,
    len: usize,
}

impl PartialEq for RleBitmap {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.words == other.words
    }
}

impl Eq for RleBitmap {}

impl RleBitmap {
    /// Raw word stream, markers included.
    pub fn stream(&self) -> &[u64] {
        &self.words
    }

    fn last_marker(&self) -> Marker {
        Marker::decode(self.words[self.marker])
    }

    fn set_last_marker(&mut self, m: Marker) {
        self.words[self.marker] = m.encode();
    }

    fn start_group(&mut self, m: Marker) {
        self.marker = self.words.len();
        self.words.push(m.encode());
    }

    fn partial_bits(&self) -> usize {
        self.len % WORD_BITS
    }

    /// Appends `count` complete fill words. Requires a word-aligned length.
    fn push_fill(&mut self, bit: bool, mut count: u64) {
        debug_assert_eq!(self.partial_bits(), 0);
        self.len += count as usize * WORD_BITS;
        while count > 0 {
            let mut m = self.last_marker();
            let absorbs = m.dirty_words == 0 && (m.fill_words == 0 || m.fill_bit == bit);
            if absorbs && m.fill_words < MAX_FILL {
                let take = count.min(MAX_FILL - m.fill_words);
                m.fill_bit = bit;
                m.fill_words += take;
                self.set_last_marker(m);
                count -= take;
            } else {
                let take = count.min(MAX_FILL);
                self.start_group(Marker {
                    fill_bit: bit,
                    fill_words: take,
                    dirty_words: 0,
                });
                count -= take;
            }
        }
    }

    /// Appends a dirty word without touching `len`.
    fn push_dirty(&mut self, word: u64) {
        let mut m = self.last_marker();
        if m.dirty_words < MAX_DIRTY {
            m.dirty_words += 1;
            self.set_last_marker(m);
        } else {
            self.start_group(Marker {
                dirty_words: 1,
                ..Marker::EMPTY
            });
        }
        self.words.push(word);
    }

    /// Appends one complete word, routing homogeneous words into fills.
    fn push_word(&mut self, word: u64) {
        debug_assert_eq!(self.partial_bits(), 0);
        match word {
            0 => self.push_fill(false, 1),
            w if w == !0 => self.push_fill(true, 1),
            w => {
                self.push_dirty(w);
                self.len += WORD_BITS;
            }
        }
    }

    /// Removes the trailing partial dirty word and returns its bits.
    fn pop_partial(&mut self) -> u64 {
        debug_assert_ne!(self.partial_bits(), 0);
        let word = self.words.pop().expect("partial word present");
        let mut m = self.last_marker();
        m.dirty_words -= 1;
        if m.dirty_words == 0 && m.fill_words == 0 && self.marker != 0 {
            // A group that only existed for this partial word.
            self.words.pop();
            self.marker = self.find_last_marker();
        } else {
            self.set_last_marker(m);
        }
        self.len -= self.partial_bits();
        word
    }

    fn find_last_marker(&self) -> usize {
        let mut pos = 0;
        let mut last = 0;
        while pos < self.words.len() {
            last = pos;
            pos += 1 + Marker::decode(self.words[pos]).dirty_words as usize;
        }
        last
    }

    /// Appends the low `n <= 64` bits of `bits`.
    pub(crate) fn push_bits(&mut self, bits: u64, n: usize) {
        if n == 0 {
            return;
        }
        let bits = bits & low_mask(n);
        let off = self.partial_bits();
        if off == 0 {
            if n == WORD_BITS {
                self.push_word(bits);
            } else {
                self.push_dirty(bits);
                self.len += n;
            }
            return;
        }
        let current = self.pop_partial();
        let combined = current | (bits << off);
        if off + n >= WORD_BITS {
            self.push_word(combined);
            let rest = off + n - WORD_BITS;
            if rest > 0 {
                self.push_dirty(bits >> (WORD_BITS - off));
                self.len += rest;
            }
        } else {
            self.push_dirty(combined);
            self.len += off + n;
        }
    }

    fn runs(&self) -> RunReader<'_> {
        RunReader::new(&self.words, self.len)
    }

    /// Walks the stream and checks every structural invariant of the
    /// canonical encoding. Returns a description of the first violation.
    pub fn validate(&self) -> Result<(), String> {
        if self.words.is_empty() {
            return Err("stream has no marker".into());
        }
        let total_words = self.len.div_ceil(WORD_BITS);
        let partial = self.partial_bits();
        let mut pos = 0usize;
        let mut logical = 0usize;
        let mut prev: Option<Marker> = None;
        let mut last_marker = 0usize;
        while pos < self.words.len() {
            let m = Marker::decode(self.words[pos]);
            last_marker = pos;
            if m.fill_words == 0 && m.fill_bit {
                return Err(format!(
                    "marker at {pos} has fill bit set without fill words"
                ));
            }
            if let Some(p) = prev {
                if p.fill_words == 0 && p.dirty_words == 0 {
                    return Err(format!("empty group before marker at {pos}"));
                }
                if m.fill_words == 0 && p.dirty_words < MAX_DIRTY {
                    return Err(format!("marker at {pos} carries no fill and could merge"));
                }
                if p.dirty_words == 0 && p.fill_bit == m.fill_bit && p.fill_words < MAX_FILL {
                    return Err(format!("marker at {pos} repeats the previous fill"));
                }
            }
            logical += m.fill_words as usize;
            let dirty_end = pos + 1 + m.dirty_words as usize;
            if dirty_end > self.words.len() {
                return Err(format!("marker at {pos} overruns the stream"));
            }
            for (k, &w) in self.words[pos + 1..dirty_end].iter().enumerate() {
                let is_tail = logical + k + 1 == total_words && partial != 0;
                if is_tail {
                    if dirty_end != self.words.len() || k + 1 != m.dirty_words as usize {
                        return Err("partial word is not last".into());
                    }
                    if w & !low_mask(partial) != 0 {
                        return Err("padding bits set in partial word".into());
                    }
                } else if w == 0 || w == !0 {
                    return Err(format!("homogeneous dirty word at {}", pos + 1 + k));
                }
            }
            logical += m.dirty_words as usize;
            prev = Some(m);
            pos = dirty_end;
        }
        if logical != total_words {
            return Err(format!(
                "stream encodes {logical} words, length needs {total_words}"
            ));
        }
        if last_marker != self.marker {
            return Err("cached marker index is stale".into());
        }
        Ok(())
    }

    fn zip_runs(&self, other: &Self, and: bool) -> Result<Self, BitmapError> {
        check_same_len(self.len, other.len)?;
        let mut out = RleBitmap::empty();
        let mut left = self.runs();
        let mut right = other.runs();
        let mut a = left.next();
        let mut b = right.next();
        while let (Some(ca), Some(cb)) = (a, b) {
            match (ca.kind, cb.kind) {
                (ChunkKind::Fill { bit: x, words: n }, ChunkKind::Fill { bit: y, words: m }) => {
                    let k = n.min(m);
                    out.push_fill(if and { x & y } else { x | y }, k);
                    a = consume_fill(&mut left, ca, k);
                    b = consume_fill(&mut right, cb, k);
                }
                (ChunkKind::Fill { bit, words }, ChunkKind::Literal { word, bits })
                | (ChunkKind::Literal { word, bits }, ChunkKind::Fill { bit, words }) => {
                    let w = if bit == and {
                        word
                    } else if bit {
                        low_mask(bits)
                    } else {
                        0
                    };
                    out.push_bits(w, bits);
                    if matches!(ca.kind, ChunkKind::Fill { .. }) {
                        debug_assert!(words >= 1);
                        a = consume_fill(&mut left, ca, 1);
                        b = right.next();
                    } else {
                        a = left.next();
                        b = consume_fill(&mut right, cb, 1);
                    }
                }
                (ChunkKind::Literal { word: x, bits }, ChunkKind::Literal { word: y, .. }) => {
                    out.push_bits(if and { x & y } else { x | y }, bits);
                    a = left.next();
                    b = right.next();
                }
            }
        }
        debug_assert!(a.is_none() && b.is_none());
        Ok(out)
    }
}

fn consume_fill<'a>(reader: &mut RunReader<'a>, chunk: Chunk, k: u64) -> Option<Chunk> {
    match chunk.kind {
        ChunkKind::Fill { bit, words } if words > k => Some(Chunk {
            start_word: chunk.start_word + k as usize,
            kind: ChunkKind::Fill {
                bit,
                words: words - k,
            },
        }),
        _ => reader.next(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ChunkKind {
    /// `words` complete words of `bit`.
    Fill { bit: bool, words: u64 },
    /// One stored word carrying `bits` valid bits (64 unless it is the tail).
    Literal { word: u64, bits: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Chunk {
    start_word: usize,
    kind: ChunkKind,
}

impl Chunk {
    fn start_bit(&self) -> usize {
        self.start_word * WORD_BITS
    }

    fn end_bit(&self) -> usize {
        match self.kind {
            ChunkKind::Fill { words, .. } => (self.start_word + words as usize) * WORD_BITS,
            ChunkKind::Literal { bits, .. } => self.start_word * WORD_BITS + bits,
        }
    }
}

/// Forward reader producing fill runs and literal words.
#[derive(Debug, Clone)]
struct RunReader<'a> {
    words: &'a [u64],
    len: usize,
    /// Next stream index to decode.
    pos: usize,
    dirty_left: u64,
    logical: usize,
}

impl<'a> RunReader<'a> {
    fn new(words: &'a [u64], len: usize) -> Self {
        RunReader {
            words,
            len,
            pos: 0,
            dirty_left: 0,
            logical: 0,
        }
    }
}

impl Iterator for RunReader<'_> {
    type Item = Chunk;

    fn next(&mut self) -> Option<Chunk> {
        loop {
            if self.dirty_left > 0 {
                self.dirty_left -= 1;
                let word = self.words[self.pos];
                self.pos += 1;
                let start_word = self.logical;
                self.logical += 1;
                let bits = (self.len - start_word * WORD_BITS).min(WORD_BITS);
                return Some(Chunk {
                    start_word,
                    kind: ChunkKind::Literal { word, bits },
                });
            }
            if self.pos >= self.words.len() {
                return None;
            }
            let m = Marker::decode(self.words[self.pos]);
            self.pos += 1;
            self.dirty_left = m.dirty_words;
            if m.fill_words > 0 {
                let start_word = self.logical;
                self.logical += m.fill_words as usize;
                return Some(Chunk {
                    start_word,
                    kind: ChunkKind::Fill {
                        bit: m.fill_bit,
                        words: m.fill_words,
                    },
                });
            }
        }
    }
}

/// Searches one chunk for the first `v` at or after `from`.
fn search_chunk(chunk: &Chunk, v: bool, from: usize, len: usize) -> Option<usize> {
    let from = from.max(chunk.start_bit());
    let found = match chunk.kind {
        ChunkKind::Fill { bit, .. } => (bit == v).then_some(from),
        ChunkKind::Literal { word, bits } => {
            let word = if v { word } else { !word & low_mask(bits) };
            let word = word & (!0u64 << (from - chunk.start_bit()));
            (word != 0).then(|| chunk.start_bit() + word.trailing_zeros() as usize)
        }
    };
    found.filter(|&i| i < len && i < chunk.end_bit())
}

impl Bitmap for RleBitmap {
    type Cursor<'a> = RleCursor<'a>;

    const NAME: &'static str = "rle64";

    fn empty() -> Self {
        RleBitmap {
            words: vec![Marker::EMPTY.encode()],
            marker: 0,
            len: 0,
        }
    }

    fn from_words(words: Vec<u64>, len: usize) -> Self {
        assert!(
            words.len() * WORD_BITS >= len,
            "{} words cannot hold {len} bits",
            words.len()
        );
        let mut out = RleBitmap::empty();
        let full = len / WORD_BITS;
        for &w in &words[..full] {
            out.push_word(w);
        }
        let tail = len % WORD_BITS;
        if tail != 0 {
            out.push_bits(words[full], tail);
        }
        out
    }

    fn to_raw(&self) -> RawBitmap {
        let mut words = Vec::with_capacity(self.len.div_ceil(WORD_BITS));
        for chunk in self.runs() {
            match chunk.kind {
                ChunkKind::Fill { bit, words: n } => {
                    words.extend(std::iter::repeat_n(if bit { !0 } else { 0 }, n as usize))
                }
                ChunkKind::Literal { word, .. } => words.push(word),
            }
        }
        RawBitmap::from_words(words, self.len)
    }

    fn len(&self) -> usize {
        self.len
    }

    fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let chunk = self
            .runs()
            .find(|c| c.end_bit() > i)
            .expect("index within length lies in some chunk");
        match chunk.kind {
            ChunkKind::Fill { bit, .. } => bit,
            ChunkKind::Literal { word, .. } => (word >> (i - chunk.start_bit())) & 1 == 1,
        }
    }

    fn and(&self, other: &Self) -> Result<Self, BitmapError> {
        self.zip_runs(other, true)
    }

    fn or(&self, other: &Self) -> Result<Self, BitmapError> {
        self.zip_runs(other, false)
    }

    fn not(&self) -> Self {
        let mut out = RleBitmap::empty();
        for chunk in self.runs() {
            match chunk.kind {
                ChunkKind::Fill { bit, words } => out.push_fill(!bit, words),
                ChunkKind::Literal { word, bits } => out.push_bits(!word, bits),
            }
        }
        out
    }

    fn add_many(mut self, v: bool, len: usize) -> Self {
        let pattern = if v { !0 } else { 0 };
        let off = self.partial_bits();
        let mut left = len;
        if off != 0 {
            let head = left.min(WORD_BITS - off);
            self.push_bits(pattern, head);
            left -= head;
        }
        let full = left / WORD_BITS;
        if full > 0 {
            self.push_fill(v, full as u64);
        }
        self.push_bits(pattern, left % WORD_BITS);
        self
    }

    fn copy_to(mut self, src: &Self, start: usize, len: usize) -> Self {
        let end = start.checked_add(len).expect("copy range overflows");
        assert!(
            end <= src.len,
            "copy range {start}..{end} exceeds source length {}",
            src.len
        );
        if len == 0 {
            return self;
        }
        for chunk in src.runs() {
            if chunk.end_bit() <= start {
                continue;
            }
            if chunk.start_bit() >= end {
                break;
            }
            let lo = start.max(chunk.start_bit());
            let hi = end.min(chunk.end_bit());
            match chunk.kind {
                ChunkKind::Fill { bit, .. } => self = self.add_many(bit, hi - lo),
                ChunkKind::Literal { word, .. } => {
                    self.push_bits(word >> (lo - chunk.start_bit()), hi - lo)
                }
            }
        }
        self
    }

    fn remove_first_bit(self) -> Self {
        assert!(self.len > 0, "remove_first_bit on an empty bitmap");
        RleBitmap::empty().copy_to(&self, 1, self.len - 1)
    }

    fn next(&self, v: bool, from: usize) -> Option<usize> {
        self.cursor().seek(v, from)
    }

    fn last(&self, v: bool) -> Option<usize> {
        // The stream cannot be walked backwards; one forward pass keeps the
        // latest hit.
        let mut found = None;
        for chunk in self.runs() {
            match chunk.kind {
                ChunkKind::Fill { bit, .. } if bit == v => found = Some(chunk.end_bit() - 1),
                ChunkKind::Fill { .. } => {}
                ChunkKind::Literal { word, bits } => {
                    let word = if v { word } else { !word & low_mask(bits) };
                    if word != 0 {
                        found = Some(chunk.start_bit() + 63 - word.leading_zeros() as usize);
                    }
                }
            }
        }
        found
    }

    fn payload_bytes(&self) -> usize {
        self.words.len() * std::mem::size_of::<u64>()
    }

    fn cursor(&self) -> RleCursor<'_> {
        let mut reader = self.runs();
        let chunk = reader.next();
        RleCursor {
            reader,
            chunk,
            absolute: 0,
            bit: (self.len > 0).then(|| self.get(0)),
            len: self.len,
            words: &self.words,
            memo: SeekMemo::default(),
        }
    }
}

/// Run-skipping cursor over an [`RleBitmap`].
///
/// The internal position is the chunk (fill run or literal word) containing
/// `absolute`, together with the stream reader positioned right after it.
#[derive(Debug, Clone)]
pub struct RleCursor<'a> {
    words: &'a [u64],
    reader: RunReader<'a>,
    chunk: Option<Chunk>,
    absolute: usize,
    bit: Option<bool>,
    len: usize,
    memo: SeekMemo,
}

impl RleCursor<'_> {
    fn rewind(&mut self) {
        self.reader = RunReader::new(self.words, self.len);
        self.chunk = self.reader.next();
    }

    fn scan(&mut self, v: bool, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        if self.chunk.is_none_or(|c| from < c.start_bit()) {
            self.rewind();
        }
        while let Some(chunk) = self.chunk {
            if chunk.end_bit() > from {
                if let Some(i) = search_chunk(&chunk, v, from, self.len) {
                    return Some(i);
                }
            }
            match self.reader.next() {
                Some(next) => self.chunk = Some(next),
                None => break,
            }
        }
        None
    }
}

impl BitCursor for RleCursor<'_> {
    fn absolute(&self) -> usize {
        self.absolute
    }

    fn bit(&self) -> Option<bool> {
        self.bit
    }

    fn seek(&mut self, v: bool, from: usize) -> Option<usize> {
        let found = match self.memo.recall(v, from) {
            Some(found) => found,
            None => {
                let found = self.scan(v, from);
                self.memo.remember(v, from, found);
                found
            }
        };
        self.absolute = found.unwrap_or(self.len);
        self.bit = found.map(|_| v);
        found
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bm(s: &str) -> RleBitmap {
        let b = RleBitmap::parse_bits(s).unwrap();
        b.validate().unwrap();
        b
    }

    #[test]
    fn marker_round_trip() {
        let m = Marker {
            fill_bit: true,
            fill_words: MAX_FILL,
            dirty_words: MAX_DIRTY,
        };
        assert_eq!(Marker::decode(m.encode()), m);
        let m = Marker {
            fill_bit: false,
            fill_words: 7,
            dirty_words: 3,
        };
        assert_eq!(Marker::decode(m.encode()), m);
    }

    #[test]
    fn long_runs_take_two_words() {
        let b = RleBitmap::empty()
            .add_many(false, 1_000_000)
            .add_many(true, 1_000_000);
        b.validate().unwrap();
        assert_eq!(b.len(), 2_000_000);
        assert!(
            b.stream().len() <= 10,
            "stream has {} words",
            b.stream().len()
        );
        assert_eq!(b.next(true, 0), Some(1_000_000));
        assert_eq!(b.last(false), Some(999_999));
    }

    #[test]
    fn alternating_bits_are_dirty() {
        let b = RleBitmap::from_bits((0..64).map(|i| i % 2 == 1));
        b.validate().unwrap();
        // one marker, one dirty word
        assert_eq!(b.stream().len(), 2);
        assert_eq!(Marker::decode(b.stream()[0]).dirty_words, 1);
    }

    #[test]
    fn appending_nothing_leaves_stream_alone() {
        let b = bm("0110");
        let before = b.stream().to_vec();
        let b = b.add_many(true, 0);
        assert_eq!(b.stream(), &before[..]);
    }

    #[test]
    fn zero_run_payload() {
        let b = RleBitmap::empty().add_many(false, 640);
        assert!(b.payload_bytes() <= 16);
    }

    #[test]
    fn partial_word_merges_into_fill() {
        let b = RleBitmap::empty().add_many(true, 63);
        assert_eq!(b.stream().len(), 2);
        let b = b.add_many(true, 1);
        b.validate().unwrap();
        assert_eq!(b.stream().len(), 1);
        let b = b.add_many(true, 64);
        assert_eq!(
            b.stream(),
            &[Marker {
                fill_bit: true,
                fill_words: 2,
                dirty_words: 0
            }
            .encode()]
        );
    }

    #[test]
    fn fill_after_dirty_starts_new_group() {
        let b = RleBitmap::from_bits((0..64).map(|i| i == 3))
            .add_many(false, 128)
            .add_many(true, 64);
        b.validate().unwrap();
        let markers: Vec<Marker> = [0, 2, 3]
            .iter()
            .map(|&i| Marker::decode(b.stream()[i]))
            .collect();
        assert_eq!(
            markers[0],
            Marker {
                fill_bit: false,
                fill_words: 0,
                dirty_words: 1
            }
        );
        assert_eq!(
            markers[1],
            Marker {
                fill_bit: false,
                fill_words: 2,
                dirty_words: 0
            }
        );
        assert_eq!(
            markers[2],
            Marker {
                fill_bit: true,
                fill_words: 1,
                dirty_words: 0
            }
        );
    }

    #[test]
    fn cursor_skips_runs_and_rewinds() {
        let b = RleBitmap::empty()
            .add_many(false, 1000)
            .add_many(true, 1)
            .add_many(false, 23);
        let mut c = b.cursor();
        assert_eq!(c.seek(true, 0), Some(1000));
        assert_eq!(c.bit(), Some(true));
        assert_eq!(c.seek(false, 1000), Some(1001));
        assert_eq!(c.seek(true, 1001), None);
        assert_eq!(c.absolute(), 1024);
        assert_eq!(c.seek(false, 5), Some(5));
    }

    #[test]
    fn validator_flags_broken_streams() {
        let mut b = bm("0110");
        b.words[1] |= 1 << 10;
        assert!(b.validate().is_err());
        let mut b = RleBitmap::empty().add_many(true, 128);
        b.words.push(
            Marker {
                fill_bit: true,
                fill_words: 1,
                dirty_words: 0,
            }
            .encode(),
        );
        b.marker = 1;
        b.len += 64;
        assert!(b.validate().is_err());
    }
}
