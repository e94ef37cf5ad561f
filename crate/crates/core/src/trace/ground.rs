use crate::bitmap::Bitmap;
use crate::eval::GroundEnv;

use super::Trace;

/// Builds the ground bitmap of every variable in one pass over the events.
/// The returned environment records how many events were visited.
pub fn build_ground_bitmaps<B: Bitmap>(trace: &Trace) -> GroundEnv<B> {
    let n = trace.len();
    let width = trace.variables().len();
    let mut words = vec![vec![0u64; n.div_ceil(64)]; width];
    let mut scanned = 0;
    for (i, event) in trace.events().enumerate() {
        let bit = 1u64 << (i % 64);
        for (column, &value) in words.iter_mut().zip(event) {
            if value {
                column[i / 64] |= bit;
            }
        }
        scanned += 1;
    }
    let mut env = GroundEnv::new(n);
    for (name, column) in trace.variables().iter().zip(words) {
        env.bind(name, B::from_words(column, n))
            .expect("column length matches the trace");
    }
    env.set_events_scanned(scanned);
    env
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitmap::{RawBitmap, RleBitmap, RoaringBitmap};

    fn check<B: Bitmap>(trace: &Trace) {
        let env = build_ground_bitmaps::<B>(trace);
        assert_eq!(env.trace_len(), trace.len());
        assert_eq!(env.events_scanned(), trace.len());
        for name in trace.variables() {
            assert_eq!(
                env.get(name).unwrap().to_bools(),
                trace.column(name).unwrap(),
                "{name}"
            );
        }
    }

    #[test]
    fn matches_columns() {
        let t = Trace::from_events(vec!["p".into()], &[[true], [true], [false]]).unwrap();
        check::<RawBitmap>(&t);
        check::<RleBitmap>(&t);
        check::<RoaringBitmap>(&t);
        let env = build_ground_bitmaps::<RawBitmap>(&t);
        assert_eq!(env.get("p").unwrap().render(), "110");
    }

    #[test]
    fn empty_trace() {
        let t = Trace::new(vec!["p".into(), "q".into()]).unwrap();
        let env = build_ground_bitmaps::<RleBitmap>(&t);
        assert_eq!(env.trace_len(), 0);
        assert_eq!(env.get("q").unwrap().len(), 0);
    }
}
