use ltlbit::bitmap::{Bitmap, RawBitmap, RleBitmap, RoaringBitmap};
use ltlbit::eval::eval;
use ltlbit::ltl::parse;
use ltlbit::trace::{
    build_ground_bitmaps, generate_random_trace, load_trace, load_trace_with, slice, write_trace,
    Format, KeyColumn, LoadOptions, SliceKey, Trace, TraceGenSpec,
};
use proptest::prelude::*;

fn random_trace() -> impl Strategy<Value = Trace> {
    // File formats need at least one column.
    (0usize..200, 1usize..6, 1usize..10, any::<u64>()).prop_map(|(n, vars, repeat, seed)| {
        generate_random_trace(&TraceGenSpec::new(n, seed).vars(vars).repeat(repeat))
    })
}

fn ground_matches_columns<B: Bitmap>(t: &Trace) -> Result<(), TestCaseError> {
    let env = build_ground_bitmaps::<B>(t);
    prop_assert_eq!(env.events_scanned(), t.len());
    prop_assert_eq!(env.names().count(), t.variables().len());
    for (v, name) in t.variables().iter().enumerate() {
        let column: Vec<bool> = (0..t.len()).map(|i| t.event(i)[v]).collect();
        prop_assert_eq!(env.get(name).unwrap().to_bools(), column);
    }
    Ok(())
}

proptest! {
    #[test]
    fn canonical_files_round_trip(t in random_trace(), csv in any::<bool>()) {
        let format = if csv { Format::Csv } else { Format::Bitlines };
        let mut first = Vec::new();
        write_trace(&t, &mut first, format).unwrap();
        let loaded = load_trace(&first[..], format).unwrap();
        let mut second = Vec::new();
        write_trace(&loaded, &mut second, format).unwrap();
        prop_assert_eq!(first, second);
        prop_assert_eq!(loaded, t);
    }

    #[test]
    fn ground_bitmaps_match_columns(t in random_trace()) {
        ground_matches_columns::<RawBitmap>(&t)?;
        ground_matches_columns::<RleBitmap>(&t)?;
        ground_matches_columns::<RoaringBitmap>(&t)?;
    }

    #[test]
    fn slices_partition_the_trace(t in random_trace(), keys in prop::collection::vec(prop::option::of(0i64..4), 200)) {
        let mut t = t;
        t.set_keys(KeyColumn { name: "id".into(), values: keys[..t.len()].to_vec() }).unwrap();
        let slices = slice(&t, "id");
        prop_assert_eq!(slices.values().map(Trace::len).sum::<usize>(), t.len());
        for (k, sub) in &slices {
            let expected: Vec<usize> = (0..t.len())
                .filter(|&i| t.keys().unwrap().values[i].map_or(SliceKey::Unkeyed, SliceKey::Key) == *k)
                .collect();
            prop_assert_eq!(sub, &t.select(&expected));
        }
    }
}

#[test]
fn per_slice_evaluation_equals_filtering_by_hand() {
    let text = "p,q,id\n1,0,1\n0,0,2\n1,1,1\n0,1,2\n1,0,\n0,1,1\n";
    let opts = LoadOptions::new(Format::Csv).key_column("id");
    let t = load_trace_with(text.as_bytes(), &opts).unwrap();
    let f = parse("G (p -> F q)").unwrap();
    let slices = slice(&t, "id");
    assert_eq!(slices.len(), 3);
    let by_hand = [
        (SliceKey::Key(1), "p,q\n1,0\n1,1\n0,1\n"),
        (SliceKey::Key(2), "p,q\n0,0\n0,1\n"),
        (SliceKey::Unkeyed, "p,q\n1,0\n"),
    ];
    for (key, csv) in by_hand {
        let manual = load_trace(csv.as_bytes(), Format::Csv).unwrap();
        let sliced = eval(&f, &build_ground_bitmaps::<RleBitmap>(&slices[&key])).unwrap();
        let filtered = eval(&f, &build_ground_bitmaps::<RleBitmap>(&manual)).unwrap();
        assert_eq!(sliced.bitmap, filtered.bitmap, "slice {key}");
        assert_eq!(sliced.verdict, filtered.verdict);
    }
}

#[test]
fn load_examples() {
    let t = load_trace("p,q\n1,0\n0,1\n".as_bytes(), Format::Csv).unwrap();
    assert_eq!(t.len(), 2);
    assert_eq!(t.variables(), ["p", "q"]);
    assert!(load_trace("p\n2\n".as_bytes(), Format::Csv).is_err());
    assert_eq!(
        load_trace("p q\n10\n01\n".as_bytes(), Format::Bitlines).unwrap(),
        t
    );
}
