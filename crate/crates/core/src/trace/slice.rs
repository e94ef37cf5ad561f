use std::collections::BTreeMap;
use std::fmt;

use super::Trace;

/// Slice identifier. Events without a key land in [`SliceKey::Unkeyed`],
/// which sorts after every keyed slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SliceKey {
    Key(i64),
    Unkeyed,
}

impl fmt::Display for SliceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SliceKey::Key(k) => write!(f, "{k}"),
            SliceKey::Unkeyed => f.write_str("unkeyed"),
        }
    }
}

/// Partitions the events of `trace` by key, keeping their relative order.
///
/// The key comes from the trace's key column when it is named `key`.
/// Otherwise variables named `key` followed by an integer (`id0`, `id1`, ...
/// for `key = "id"`) act as one-hot key flags: an event belongs to the slice
/// of the smallest flag that is set, and to the unkeyed slice if none is.
pub fn slice(trace: &Trace, key: &str) -> BTreeMap<SliceKey, Trace> {
    let keys: Vec<SliceKey> = match trace.keys().filter(|k| k.name == key) {
        Some(column) => column
            .values
            .iter()
            .map(|v| v.map_or(SliceKey::Unkeyed, SliceKey::Key))
            .collect(),
        None => {
            let mut flags: Vec<(i64, usize)> = trace
                .variables()
                .iter()
                .enumerate()
                .filter_map(|(at, name)| Some((name.strip_prefix(key)?.parse::<i64>().ok()?, at)))
                .collect();
            flags.sort_unstable();
            (0..trace.len())
                .map(|i| {
                    flags
                        .iter()
                        .find(|&&(_, at)| trace.value(at, i))
                        .map_or(SliceKey::Unkeyed, |&(k, _)| SliceKey::Key(k))
                })
                .collect()
        }
    };
    let mut members: BTreeMap<SliceKey, Vec<usize>> = BTreeMap::new();
    for (i, k) in keys.into_iter().enumerate() {
        members.entry(k).or_default().push(i);
    }
    members
        .into_iter()
        .map(|(k, events)| (k, trace.select(&events)))
        .collect()
}
