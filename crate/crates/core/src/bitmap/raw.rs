use super::{check_same_len, low_mask, BitCursor, Bitmap, BitmapError, SeekMemo, WORD_BITS};

/// Uncompressed bitmap: 64-bit words, bits packed LSB-first.
///
/// Bits past `len` in the final word are always zero, so two bitmaps hold the
/// same bits exactly when their word vectors and lengths are equal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawBitmap {
    words: Vec<u64>,
    len: usize,
}

impl RawBitmap {
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn into_words(self) -> Vec<u64> {
        self.words
    }

    fn words_for(len: usize) -> usize {
        len.div_ceil(WORD_BITS)
    }

    fn clear_padding(&mut self) {
        let tail = self.len % WORD_BITS;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= low_mask(tail);
            }
        }
    }

    /// Reads `n <= 64` bits starting at `pos`, LSB-first.
    fn extract(&self, pos: usize, n: usize) -> u64 {
        debug_assert!(n <= WORD_BITS && pos + n <= self.len);
        if n == 0 {
            return 0;
        }
        let w = pos / WORD_BITS;
        let off = pos % WORD_BITS;
        let mut bits = self.words[w] >> off;
        if off != 0 && off + n > WORD_BITS {
            bits |= self.words[w + 1] << (WORD_BITS - off);
        }
        bits & low_mask(n)
    }

    /// Appends the low `n <= 64` bits of `bits`.
    pub(crate) fn push_bits(&mut self, bits: u64, n: usize) {
        if n == 0 {
            return;
        }
        let bits = bits & low_mask(n);
        let off = self.len % WORD_BITS;
        if off == 0 {
            self.words.push(bits);
        } else {
            *self.words.last_mut().unwrap() |= bits << off;
            if off + n > WORD_BITS {
                self.words.push(bits >> (WORD_BITS - off));
            }
        }
        self.len += n;
    }

    fn zip_words(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Result<Self, BitmapError> {
        check_same_len(self.len, other.len)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(RawBitmap {
            words,
            len: self.len,
        })
    }
}

impl Bitmap for RawBitmap {
    type Cursor<'a> = RawCursor<'a>;

    const NAME: &'static str = "raw";

    fn empty() -> Self {
        RawBitmap::default()
    }

    fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        let need = Self::words_for(len);
        assert!(
            words.len() >= need,
            "{} words cannot hold {len} bits",
            words.len()
        );
        words.truncate(need);
        let mut b = RawBitmap { words, len };
        b.clear_padding();
        b
    }

    fn to_raw(&self) -> RawBitmap {
        self.clone()
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
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    fn and(&self, other: &Self) -> Result<Self, BitmapError> {
        self.zip_words(other, |a, b| a & b)
    }

    fn or(&self, other: &Self) -> Result<Self, BitmapError> {
        self.zip_words(other, |a, b| a | b)
    }

    fn not(&self) -> Self {
        let mut b = RawBitmap {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        b.clear_padding();
        b
    }

    fn add_many(mut self, v: bool, len: usize) -> Self {
        if len == 0 {
            return self;
        }
        let new_len = self.len + len;
        let need = Self::words_for(new_len);
        if v {
            let off = self.len % WORD_BITS;
            if off != 0 {
                *self.words.last_mut().unwrap() |= !0 << off;
            }
            self.words.resize(need, !0);
        } else {
            self.words.resize(need, 0);
        }
        self.len = new_len;
        self.clear_padding();
        self
    }

    fn copy_to(mut self, src: &Self, start: usize, len: usize) -> Self {
        let end = start.checked_add(len).expect("copy range overflows");
        assert!(
            end <= src.len,
            "copy range {start}..{end} exceeds source length {}",
            src.len
        );
        self.words
            .reserve(Self::words_for(self.len + len) - self.words.len());
        let mut pos = start;
        while pos < end {
            let n = (end - pos).min(WORD_BITS);
            self.push_bits(src.extract(pos, n), n);
            pos += n;
        }
        self
    }

    fn remove_first_bit(mut self) -> Self {
        assert!(self.len > 0, "remove_first_bit on an empty bitmap");
        let n = self.words.len();
        for i in 0..n {
            let carry = if i + 1 < n {
                self.words[i + 1] << (WORD_BITS - 1)
            } else {
                0
            };
            self.words[i] = (self.words[i] >> 1) | carry;
        }
        self.len -= 1;
        self.words.truncate(Self::words_for(self.len));
        self
    }

    fn next(&self, v: bool, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let flip = if v { 0 } else { !0 };
        let mut w = from / WORD_BITS;
        let mut word = (self.words[w] ^ flip) & (!0 << (from % WORD_BITS));
        loop {
            if word != 0 {
                let i = w * WORD_BITS + word.trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
            w += 1;
            if w == self.words.len() {
                return None;
            }
            word = self.words[w] ^ flip;
        }
    }

    fn last(&self, v: bool) -> Option<usize> {
        let flip = if v { 0 } else { !0 };
        let tail = self.len % WORD_BITS;
        for w in (0..self.words.len()).rev() {
            let mut word = self.words[w] ^ flip;
            if w + 1 == self.words.len() && tail != 0 {
                word &= low_mask(tail);
            }
            if word != 0 {
                return Some(w * WORD_BITS + (WORD_BITS - 1 - word.leading_zeros() as usize));
            }
        }
        None
    }

    fn payload_bytes(&self) -> usize {
        self.words.len() * std::mem::size_of::<u64>()
    }

    fn cursor(&self) -> RawCursor<'_> {
        RawCursor {
            bitmap: self,
            absolute: 0,
            bit: (self.len > 0).then(|| self.get(0)),
            memo: SeekMemo::default(),
        }
    }
}

/// Cursor over a [`RawBitmap`]; the internal position is the word index,
/// derived from `absolute`.
#[derive(Debug, Clone)]
pub struct RawCursor<'a> {
    bitmap: &'a RawBitmap,
    absolute: usize,
    bit: Option<bool>,
    memo: SeekMemo,
}

impl BitCursor for RawCursor<'_> {
    fn absolute(&self) -> usize {
        self.absolute
    }

    fn bit(&self) -> Option<bool> {
        self.bit
    }

    fn seek(&mut self, v: bool, from: usize) -> Option<usize> {
        let found = self.memo.recall(v, from).unwrap_or_else(|| {
            let found = self.bitmap.next(v, from);
            self.memo.remember(v, from, found);
            found
        });
        self.absolute = found.unwrap_or(self.bitmap.len);
        self.bit = found.map(|_| v);
        found
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bm(s: &str) -> RawBitmap {
        RawBitmap::parse_bits(s).unwrap()
    }

    #[test]
    fn padding_stays_zero() {
        let b = bm("0110").not();
        assert_eq!(b.words(), &[0b1001]);
        let b = RawBitmap::empty().add_many(true, 70);
        assert_eq!(b.words(), &[!0, 0b111111]);
        let b = b.remove_first_bit();
        assert_eq!(b.words(), &[!0, 0b11111]);
        assert_eq!(b.len(), 69);
    }

    #[test]
    fn payload_counts_words() {
        assert_eq!(RawBitmap::empty().add_many(false, 640).payload_bytes(), 80);
        assert_eq!(RawBitmap::empty().payload_bytes(), 0);
    }

    #[test]
    fn copy_across_word_boundaries() {
        let src = RawBitmap::from_bits((0..200).map(|i| i % 3 == 0));
        let dst = bm("1").copy_to(&src, 61, 130);
        let expected: Vec<bool> = std::iter::once(true)
            .chain((61..191).map(|i| i % 3 == 0))
            .collect();
        assert_eq!(dst.to_bools(), expected);
    }

    #[test]
    fn from_words_masks_padding() {
        let b = RawBitmap::from_words(vec![!0, !0], 65);
        assert_eq!(b.words(), &[!0, 1]);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn get_rejects_out_of_range() {
        bm("01").get(2);
    }

    #[test]
    #[should_panic(expected = "exceeds source length")]
    fn copy_rejects_overflow() {
        bm("").copy_to(&bm("01"), 1, 2);
    }
}
