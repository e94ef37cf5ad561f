//! Roaring-style two-level bitmap.
//!
//! Positions are split into a 16-bit high key and a 16-bit low part. Each key
//! with at least one set bit owns a container: a sorted array of low parts
//! while the cardinality is at most [`ARRAY_MAX`], a packed 65536-bit block
//! otherwise. The logical length is stored separately because a set of
//! positions says nothing about trailing zeros.

use super::{
    check_same_len, low_mask, BitCursor, Bitmap, BitmapError, RawBitmap, SeekMemo, WORD_BITS,
};

/// Largest cardinality kept in array form.
pub const ARRAY_MAX: usize = 4096;
const CHUNK_BITS: usize = 1 << 16;
const BLOCK_WORDS: usize = CHUNK_BITS / WORD_BITS;
/// Positions must fit in 32 bits.
const MAX_LEN: usize = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Container {
    Array(Vec<u16>),
    Block {
        words: Box<[u64; BLOCK_WORDS]>,
        card: usize,
    },
}

impl Container {
    fn cardinality(&self) -> usize {
        match self {
            Container::Array(a) => a.len(),
            Container::Block { card, .. } => *card,
        }
    }

    fn payload_bytes(&self) -> usize {
        match self {
            Container::Array(a) => a.len() * 2,
            Container::Block { .. } => BLOCK_WORDS * 8,
        }
    }

    fn empty_block() -> Box<[u64; BLOCK_WORDS]> {
        Box::new([0u64; BLOCK_WORDS])
    }

    /// Chooses the container form required by the cardinality rule. Returns
    /// `None` when no bit is set.
    fn from_block(words: Box<[u64; BLOCK_WORDS]>) -> Option<Container> {
        let card: usize = words.iter().map(|w| w.count_ones() as usize).sum();
        match card {
            0 => None,
            c if c <= ARRAY_MAX => Some(Container::Array(block_values(&words).collect())),
            card => Some(Container::Block { words, card }),
        }
    }

    fn to_block(&self) -> Box<[u64; BLOCK_WORDS]> {
        match self {
            Container::Array(a) => {
                let mut words = Container::empty_block();
                for &v in a {
                    words[v as usize / WORD_BITS] |= 1 << (v as usize % WORD_BITS);
                }
                words
            }
            Container::Block { words, .. } => words.clone(),
        }
    }

    fn contains(&self, low: u16) -> bool {
        match self {
            Container::Array(a) => a.binary_search(&low).is_ok(),
            Container::Block { words, .. } => {
                (words[low as usize / WORD_BITS] >> (low as usize % WORD_BITS)) & 1 == 1
            }
        }
    }

    fn min(&self) -> u16 {
        match self {
            Container::Array(a) => a[0],
            Container::Block { words, .. } => {
                let (i, w) = words.iter().enumerate().find(|(_, w)| **w != 0).unwrap();
                (i * WORD_BITS + w.trailing_zeros() as usize) as u16
            }
        }
    }

    fn max(&self) -> u16 {
        match self {
            Container::Array(a) => *a.last().unwrap(),
            Container::Block { words, .. } => {
                let (i, w) = words
                    .iter()
                    .enumerate()
                    .rev()
                    .find(|(_, w)| **w != 0)
                    .unwrap();
                (i * WORD_BITS + 63 - w.leading_zeros() as usize) as u16
            }
        }
    }

    /// First set value `>= low`.
    fn next_set(&self, low: u16) -> Option<u16> {
        match self {
            Container::Array(a) => a.get(a.partition_point(|&v| v < low)).copied(),
            Container::Block { words, .. } => {
                block_next(words, low as usize, false).map(|v| v as u16)
            }
        }
    }

    /// First unset value `>= low` within the chunk.
    fn next_unset(&self, low: u16) -> Option<u16> {
        match self {
            Container::Array(a) => {
                let mut i = a.partition_point(|&v| v < low);
                let mut cur = low as usize;
                while i < a.len() && a[i] as usize == cur {
                    cur += 1;
                    i += 1;
                }
                (cur < CHUNK_BITS).then_some(cur as u16)
            }
            Container::Block { words, .. } => {
                block_next(words, low as usize, true).map(|v| v as u16)
            }
        }
    }

    /// Last unset value `<= high` within the chunk.
    fn prev_unset(&self, high: u16) -> Option<u16> {
        match self {
            Container::Array(a) => {
                let mut i = a.partition_point(|&v| v <= high);
                let mut cur = high as i64;
                while i > 0 && a[i - 1] as i64 == cur {
                    cur -= 1;
                    i -= 1;
                }
                (cur >= 0).then_some(cur as u16)
            }
            Container::Block { words, .. } => {
                let mut w = high as usize / WORD_BITS;
                let mut word = !words[w] & low_mask(high as usize % WORD_BITS + 1);
                loop {
                    if word != 0 {
                        return Some((w * WORD_BITS + 63 - word.leading_zeros() as usize) as u16);
                    }
                    if w == 0 {
                        return None;
                    }
                    w -= 1;
                    word = !words[w];
                }
            }
        }
    }

    fn values(&self) -> Box<dyn Iterator<Item = u16> + '_> {
        match self {
            Container::Array(a) => Box::new(a.iter().copied()),
            Container::Block { words, .. } => Box::new(block_values(words)),
        }
    }

    fn and(&self, other: &Container) -> Option<Container> {
        match (self, other) {
            (Container::Array(a), Container::Array(b)) => {
                let mut out = Vec::with_capacity(a.len().min(b.len()));
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            out.push(a[i]);
                            i += 1;
                            j += 1;
                        }
                    }
                }
                (!out.is_empty()).then_some(Container::Array(out))
            }
            (Container::Array(a), block @ Container::Block { .. })
            | (block @ Container::Block { .. }, Container::Array(a)) => {
                let out: Vec<u16> = a.iter().copied().filter(|&v| block.contains(v)).collect();
                (!out.is_empty()).then_some(Container::Array(out))
            }
            (Container::Block { words: a, .. }, Container::Block { words: b, .. }) => {
                let mut words = Container::empty_block();
                for (k, w) in words.iter_mut().enumerate() {
                    *w = a[k] & b[k];
                }
                Container::from_block(words)
            }
        }
    }

    fn or(&self, other: &Container) -> Container {
        match (self, other) {
            (Container::Array(a), Container::Array(b)) => {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => {
                            out.push(a[i]);
                            i += 1;
                        }
                        std::cmp::Ordering::Greater => {
                            out.push(b[j]);
                            j += 1;
                        }
                        std::cmp::Ordering::Equal => {
                            out.push(a[i]);
                            i += 1;
                            j += 1;
                        }
                    }
                }
                out.extend_from_slice(&a[i..]);
                out.extend_from_slice(&b[j..]);
                if out.len() <= ARRAY_MAX {
                    Container::Array(out)
                } else {
                    Container::from_block(Container::Array(out).to_block()).unwrap()
                }
            }
            (x, y) => {
                let mut words = x.to_block();
                match y {
                    Container::Array(b) => {
                        for &v in b {
                            words[v as usize / WORD_BITS] |= 1 << (v as usize % WORD_BITS);
                        }
                    }
                    Container::Block { words: b, .. } => {
                        for (k, w) in words.iter_mut().enumerate() {
                            *w |= b[k];
                        }
                    }
                }
                Container::from_block(words).unwrap()
            }
        }
    }

    /// Complement restricted to `0..limit`.
    fn complement(&self, limit: usize) -> Option<Container> {
        let mut words = self.to_block();
        for (k, w) in words.iter_mut().enumerate() {
            let lo = k * WORD_BITS;
            *w = if lo >= limit {
                0
            } else {
                !*w & low_mask(limit - lo)
            };
        }
        Container::from_block(words)
    }
}

fn block_values(words: &[u64; BLOCK_WORDS]) -> impl Iterator<Item = u16> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            (w != 0).then(|| {
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                (i * WORD_BITS + t) as u16
            })
        })
    })
}

fn block_next(words: &[u64; BLOCK_WORDS], from: usize, unset: bool) -> Option<usize> {
    let flip = if unset { !0 } else { 0 };
    let mut w = from / WORD_BITS;
    let mut word = (words[w] ^ flip) & (!0u64 << (from % WORD_BITS));
    loop {
        if word != 0 {
            return Some(w * WORD_BITS + word.trailing_zeros() as usize);
        }
        w += 1;
        if w == BLOCK_WORDS {
            return None;
        }
        word = words[w] ^ flip;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RoaringBitmap {
    keys: Vec<u16>,
    containers: Vec<Container>,
    len: usize,
}

fn split(i: usize) -> (u16, u16) {
    ((i >> 16) as u16, (i & 0xFFFF) as u16)
}

fn join(key: u16, low: u16) -> usize {
    ((key as usize) << 16) | low as usize
}

impl RoaringBitmap {
    pub fn cardinality(&self) -> usize {
        self.containers.iter().map(Container::cardinality).sum()
    }

    /// Number of containers in array form and in block form.
    pub fn container_counts(&self) -> (usize, usize) {
        let arrays = self
            .containers
            .iter()
            .filter(|c| matches!(c, Container::Array(_)))
            .count();
        (arrays, self.containers.len() - arrays)
    }

    /// Checks the structural invariants: sorted unique keys, no empty
    /// containers, array form exactly when cardinality is at most 4096, and
    /// every stored position below the length.
    pub fn validate(&self) -> Result<(), String> {
        if self.keys.len() != self.containers.len() {
            return Err("key/container count mismatch".into());
        }
        if self.keys.windows(2).any(|w| w[0] >= w[1]) {
            return Err("keys not strictly increasing".into());
        }
        for (&key, c) in self.keys.iter().zip(&self.containers) {
            match c {
                Container::Array(a) => {
                    if a.is_empty() {
                        return Err(format!("empty container at key {key}"));
                    }
                    if a.len() > ARRAY_MAX {
                        return Err(format!("array container at key {key} holds {}", a.len()));
                    }
                    if a.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(format!("array at key {key} not sorted"));
                    }
                }
                Container::Block { words, card } => {
                    let real: usize = words.iter().map(|w| w.count_ones() as usize).sum();
                    if real != *card {
                        return Err(format!("stale cardinality at key {key}"));
                    }
                    if real <= ARRAY_MAX {
                        return Err(format!("block container at key {key} holds only {real}"));
                    }
                }
            }
        }
        if let (Some(&key), Some(c)) = (self.keys.last(), self.containers.last()) {
            if join(key, c.max()) >= self.len {
                return Err("set position beyond length".into());
            }
        }
        Ok(())
    }

    fn container(&self, key: u16) -> Option<&Container> {
        self.keys
            .binary_search(&key)
            .ok()
            .map(|i| &self.containers[i])
    }

    /// Appends position `pos`, which must exceed every stored position.
    fn push_value(&mut self, pos: usize) {
        let (key, low) = split(pos);
        if self.keys.last() != Some(&key) {
            self.keys.push(key);
            self.containers.push(Container::Array(Vec::new()));
        }
        let c = self.containers.last_mut().unwrap();
        match c {
            Container::Array(a) => {
                a.push(low);
                if a.len() > ARRAY_MAX {
                    *c = Container::from_block(c.to_block()).unwrap();
                }
            }
            Container::Block { words, card } => {
                words[low as usize / WORD_BITS] |= 1 << (low as usize % WORD_BITS);
                *card += 1;
            }
        }
    }

    /// Sets every position in `start..end`; all are past the stored ones.
    fn push_range(&mut self, start: usize, end: usize) {
        let mut pos = start;
        while pos < end {
            let (key, low) = split(pos);
            let chunk_end = end.min(join(key, 0) + CHUNK_BITS);
            let count = chunk_end - pos;
            if self.keys.last() != Some(&key) {
                self.keys.push(key);
                self.containers.push(Container::Array(Vec::new()));
            }
            let c = self.containers.last_mut().unwrap();
            let hi = low as usize + count;
            if c.cardinality() + count <= ARRAY_MAX {
                if let Container::Array(a) = c {
                    a.extend((low as usize..hi).map(|v| v as u16));
                }
            } else {
                let mut words = c.to_block();
                let mut v = low as usize;
                while v < hi {
                    let off = v % WORD_BITS;
                    let n = (hi - v).min(WORD_BITS - off);
                    words[v / WORD_BITS] |= low_mask(n) << off;
                    v += n;
                }
                *c = Container::from_block(words).unwrap();
            }
            pos = chunk_end;
        }
    }

    fn set_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.keys
            .iter()
            .zip(&self.containers)
            .flat_map(|(&key, c)| c.values().map(move |low| join(key, low)))
    }

    fn merge(
        &self,
        other: &Self,
        both: impl Fn(&Container, &Container) -> Option<Container>,
        keep_unmatched: bool,
    ) -> Self {
        let mut out = RoaringBitmap {
            len: self.len,
            ..Default::default()
        };
        let (mut i, mut j) = (0, 0);
        let mut emit = |key: u16, c: Option<Container>| {
            if let Some(c) = c {
                out.keys.push(key);
                out.containers.push(c);
            }
        };
        while i < self.keys.len() || j < other.keys.len() {
            let a = self.keys.get(i);
            let b = other.keys.get(j);
            match (a, b) {
                (Some(&ka), Some(&kb)) if ka == kb => {
                    emit(ka, both(&self.containers[i], &other.containers[j]));
                    i += 1;
                    j += 1;
                }
                (Some(&ka), Some(&kb)) if ka < kb => {
                    emit(ka, keep_unmatched.then(|| self.containers[i].clone()));
                    i += 1;
                }
                (Some(&ka), None) => {
                    emit(ka, keep_unmatched.then(|| self.containers[i].clone()));
                    i += 1;
                }
                (_, Some(&kb)) => {
                    emit(kb, keep_unmatched.then(|| other.containers[j].clone()));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        out
    }
}

impl Bitmap for RoaringBitmap {
    type Cursor<'a> = RoaringCursor<'a>;

    const NAME: &'static str = "roaring";

    fn empty() -> Self {
        RoaringBitmap::default()
    }

    fn from_words(words: Vec<u64>, len: usize) -> Self {
        assert!(
            words.len() * WORD_BITS >= len,
            "{} words cannot hold {len} bits",
            words.len()
        );
        assert!(len <= MAX_LEN, "length {len} exceeds 2^32 positions");
        let mut out = RoaringBitmap {
            len,
            ..Default::default()
        };
        let nwords = len.div_ceil(WORD_BITS);
        for (k, chunk) in words[..nwords].chunks(BLOCK_WORDS).enumerate() {
            let mut block = Container::empty_block();
            block[..chunk.len()].copy_from_slice(chunk);
            let chunk_bits = (len - k * CHUNK_BITS).min(CHUNK_BITS);
            if chunk_bits < CHUNK_BITS {
                let last = chunk_bits.div_ceil(WORD_BITS) - 1;
                block[last] &= low_mask(chunk_bits - last * WORD_BITS);
            }
            if let Some(c) = Container::from_block(block) {
                out.keys.push(k as u16);
                out.containers.push(c);
            }
        }
        out
    }

    fn to_raw(&self) -> RawBitmap {
        let mut words = vec![0u64; self.len.div_ceil(WORD_BITS)];
        for (&key, c) in self.keys.iter().zip(&self.containers) {
            let base = key as usize * BLOCK_WORDS;
            match c {
                Container::Array(a) => {
                    for &v in a {
                        words[base + v as usize / WORD_BITS] |= 1 << (v as usize % WORD_BITS);
                    }
                }
                Container::Block { words: block, .. } => {
                    let end = (base + BLOCK_WORDS).min(words.len());
                    words[base..end].copy_from_slice(&block[..end - base]);
                }
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
        let (key, low) = split(i);
        self.container(key).is_some_and(|c| c.contains(low))
    }

    fn and(&self, other: &Self) -> Result<Self, BitmapError> {
        check_same_len(self.len, other.len)?;
        Ok(self.merge(other, Container::and, false))
    }

    fn or(&self, other: &Self) -> Result<Self, BitmapError> {
        check_same_len(self.len, other.len)?;
        Ok(self.merge(other, |a, b| Some(a.or(b)), true))
    }

    fn not(&self) -> Self {
        let mut out = RoaringBitmap {
            len: self.len,
            ..Default::default()
        };
        if self.len == 0 {
            return out;
        }
        let last_key = split(self.len - 1).0;
        for key in 0..=last_key {
            let limit = (self.len - join(key, 0)).min(CHUNK_BITS);
            let flipped = match self.container(key) {
                Some(c) => c.complement(limit),
                None if limit <= ARRAY_MAX => {
                    Some(Container::Array((0..limit).map(|v| v as u16).collect()))
                }
                None => Container::Array(Vec::new()).complement(limit),
            };
            if let Some(c) = flipped {
                out.keys.push(key);
                out.containers.push(c);
            }
        }
        out
    }

    fn add_many(mut self, v: bool, len: usize) -> Self {
        let end = self.len + len;
        assert!(end <= MAX_LEN, "length {end} exceeds 2^32 positions");
        if v {
            self.push_range(self.len, end);
        }
        self.len = end;
        self
    }

    fn copy_to(mut self, src: &Self, start: usize, len: usize) -> Self {
        let end = start.checked_add(len).expect("copy range overflows");
        assert!(
            end <= src.len,
            "copy range {start}..{end} exceeds source length {}",
            src.len
        );
        let base = self.len;
        assert!(base + len <= MAX_LEN, "length exceeds 2^32 positions");
        let first = src
            .keys
            .partition_point(|&k| join(k, 0) + CHUNK_BITS <= start);
        for (&key, c) in src.keys[first..].iter().zip(&src.containers[first..]) {
            if join(key, 0) >= end {
                break;
            }
            for low in c.values() {
                let pos = join(key, low);
                if pos >= end {
                    break;
                }
                if pos >= start {
                    self.push_value(base + pos - start);
                }
            }
        }
        self.len = base + len;
        self
    }

    fn remove_first_bit(self) -> Self {
        assert!(self.len > 0, "remove_first_bit on an empty bitmap");
        let mut out = RoaringBitmap {
            len: self.len - 1,
            ..Default::default()
        };
        for pos in self.set_positions().filter(|&p| p > 0) {
            out.push_value(pos - 1);
        }
        out
    }

    fn next(&self, v: bool, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        if v {
            let (key, low) = split(from);
            let idx = self.keys.partition_point(|&k| k < key);
            for (&k, c) in self.keys[idx..].iter().zip(&self.containers[idx..]) {
                let hit = if k == key {
                    c.next_set(low)
                } else {
                    Some(c.min())
                };
                if let Some(l) = hit {
                    return Some(join(k, l));
                }
            }
            None
        } else {
            let mut pos = from;
            while pos < self.len {
                let (key, low) = split(pos);
                match self.container(key) {
                    None => return Some(pos),
                    Some(c) => match c.next_unset(low) {
                        Some(l) => return Some(join(key, l)).filter(|&p| p < self.len),
                        None => pos = join(key, 0) + CHUNK_BITS,
                    },
                }
            }
            None
        }
    }

    fn last(&self, v: bool) -> Option<usize> {
        if v {
            let (key, c) = (self.keys.last()?, self.containers.last()?);
            return Some(join(*key, c.max()));
        }
        let mut pos = self.len.checked_sub(1)?;
        loop {
            let (key, low) = split(pos);
            match self.container(key) {
                None => return Some(pos),
                Some(c) => match c.prev_unset(low) {
                    Some(l) => return Some(join(key, l)),
                    None if key == 0 => return None,
                    None => pos = join(key, 0) - 1,
                },
            }
        }
    }

    fn payload_bytes(&self) -> usize {
        self.keys.len() * 2
            + self
                .containers
                .iter()
                .map(Container::payload_bytes)
                .sum::<usize>()
    }

    fn cursor(&self) -> RoaringCursor<'_> {
        RoaringCursor {
            bitmap: self,
            absolute: 0,
            bit: (self.len > 0).then(|| self.get(0)),
            memo: SeekMemo::default(),
        }
    }
}

/// Cursor over a [`RoaringBitmap`]. Random access makes resumption cheap, so
/// the internal position is just the absolute index.
#[derive(Debug, Clone)]
pub struct RoaringCursor<'a> {
    bitmap: &'a RoaringBitmap,
    absolute: usize,
    bit: Option<bool>,
    memo: SeekMemo,
}

impl BitCursor for RoaringCursor<'_> {
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
