//! Bitmap implementations of the LTL operators. Each maps whole operand
//! bitmaps to the bitmap of the compound formula.

use crate::bitmap::{BitCursor, Bitmap, BitmapError};

pub fn op_not<B: Bitmap>(a: &B) -> B {
    a.not()
}

pub fn op_and<B: Bitmap>(a: &B, b: &B) -> Result<B, BitmapError> {
    a.and(b)
}

pub fn op_or<B: Bitmap>(a: &B, b: &B) -> Result<B, BitmapError> {
    a.or(b)
}

pub fn op_implies<B: Bitmap>(a: &B, b: &B) -> Result<B, BitmapError> {
    a.not().or(b)
}

/// Drops the first bit and appends a 0: the last event has no successor.
pub fn op_next<B: Bitmap>(a: B) -> B {
    if a.is_empty() {
        return a;
    }
    a.remove_first_bit().add_many(false, 1)
}

/// `0^{p+1} 1^{n-p-1}` where `p` is the last 0 of `a`.
pub fn op_globally<B: Bitmap>(a: &B) -> B {
    match a.last(false) {
        None => a.clone(),
        Some(p) => B::empty()
            .add_many(false, p + 1)
            .add_many(true, a.len() - p - 1),
    }
}

/// `1^{p+1} 0^{n-p-1}` where `p` is the last 1 of `a`.
pub fn op_finally<B: Bitmap>(a: &B) -> B {
    match a.last(true) {
        None => a.clone(),
        Some(p) => B::empty()
            .add_many(true, p + 1)
            .add_many(false, a.len() - p - 1),
    }
}

/// Strong until, built left to right one run at a time.
///
/// At position `p` with `b_p = 1` the whole 1-run of `b` is satisfied. With
/// `b_p = 0`, the positions up to the next 1 of `b` are satisfied exactly
/// when `a` stays 1 until then; otherwise they are 0 up to the next 1 of `a`
/// (or that 1 of `b`, whichever comes first). The four cursors only move
/// forward, so the cost is proportional to the runs of the operands.
pub fn op_until<B: Bitmap>(a: &B, b: &B) -> Result<B, BitmapError> {
    if a.len() != b.len() {
        return Err(BitmapError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    let mut a0 = a.cursor();
    let mut a1 = a.cursor();
    let mut b0 = b.cursor();
    let mut b1 = b.cursor();
    let mut out = B::empty();
    let mut p = 0;
    while p < n {
        let Some(next_b1) = b1.seek(true, p) else {
            // No witness left: nothing from here on holds.
            out = out.add_many(false, n - p);
            break;
        };
        if next_b1 == p {
            let end = b0.seek(false, p).unwrap_or(n);
            out = out.add_many(true, end - p);
            p = end;
            continue;
        }
        match a0.seek(false, p) {
            Some(gap) if gap < next_b1 => {
                let Some(resume) = a1.seek(true, gap) else {
                    // `a` is 0 for good: the result is `b` itself, which is
                    // 0 up to the next witness.
                    out = out.copy_to(b, p, n - p);
                    break;
                };
                let stop = resume.min(next_b1);
                out = out.add_many(false, stop - p);
                p = stop;
            }
            _ => {
                out = out.add_many(true, next_b1 - p);
                p = next_b1;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitmap::{RawBitmap, RleBitmap, RoaringBitmap};

    fn all<F: Fn(&str) -> String>(f: F, cases: &[(&str, &str)]) {
        for (input, expected) in cases {
            assert_eq!(f(input), *expected, "input {input}");
        }
    }

    fn unary<B: Bitmap>(op: fn(&B) -> B, s: &str) -> String {
        op(&B::parse_bits(s).unwrap()).render()
    }

    fn until<B: Bitmap>(a: &str, b: &str) -> String {
        op_until(&B::parse_bits(a).unwrap(), &B::parse_bits(b).unwrap())
            .unwrap()
            .render()
    }

    fn examples<B: Bitmap>() {
        all(
            |s| op_next(B::parse_bits(s).unwrap()).render(),
            &[("0110", "1100"), ("1", "0"), ("", "")],
        );
        all(
            |s| unary::<B>(op_globally, s),
            &[
                ("1111", "1111"),
                ("1101", "0001"),
                ("0111", "0111"),
                ("", ""),
            ],
        );
        all(
            |s| unary::<B>(op_finally, s),
            &[
                ("0000", "0000"),
                ("0010", "1110"),
                ("1000", "1000"),
                ("", ""),
            ],
        );
        assert_eq!(until::<B>("1110", "0010"), "1110");
        assert_eq!(until::<B>("0101", "1111"), "1111");
        assert_eq!(until::<B>("1011", "0100"), "1100");
        assert_eq!(until::<B>("0000", "0101"), "0101");
        assert_eq!(until::<B>("1111", "0000"), "0000");
        assert_eq!(until::<B>("", ""), "");
        let a = B::parse_bits("0101").unwrap();
        let b = B::parse_bits("0011").unwrap();
        assert_eq!(op_implies(&a, &b).unwrap().render(), "1011");
        assert!(op_until(&a, &B::parse_bits("01").unwrap()).is_err());
    }

    #[test]
    fn operator_examples_raw() {
        examples::<RawBitmap>();
    }

    #[test]
    fn operator_examples_rle() {
        examples::<RleBitmap>();
    }

    #[test]
    fn operator_examples_roaring() {
        examples::<RoaringBitmap>();
    }

    #[test]
    fn until_over_long_runs() {
        // a: 1^100 0^50 1^200; b: 0^300 1^50
        let a = RleBitmap::from_bits((0..350).map(|i| !(100..150).contains(&i)));
        let b = RleBitmap::from_bits((0..350).map(|i| i >= 300));
        let r = op_until(&a, &b).unwrap().to_bools();
        for (i, &bit) in r.iter().enumerate() {
            assert_eq!(bit, i >= 150, "position {i}");
        }
    }
}
