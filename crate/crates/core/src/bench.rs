//! Benchmark harness: throughput, peak bitmap memory and compression of the
//! ground bitmaps, written as CSV.

use std::io::{Read, Write};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bitmap::{Backend, Bitmap, RawBitmap, RleBitmap, RoaringBitmap};
use crate::eval::{eval, EvalError, GroundEnv};
use crate::ltl::Formula;
use crate::par;
use crate::trace::{build_ground_bitmaps, generate_random_trace, Trace, TraceGenSpec};

pub const BENCH_COLUMNS: [&str; 9] = [
    "formula_id",
    "backend",
    "trace_length",
    "repeat",
    "throughput_hz",
    "peak_bitmap_bytes",
    "compressed_ratio",
    "wall_ms",
    "seed",
];

/// One measured cell. Measurement fields are empty when the cell failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub formula_id: String,
    pub backend: String,
    pub trace_length: usize,
    pub repeat: usize,
    /// Events per second of evaluation time (median over repetitions).
    pub throughput_hz: Option<f64>,
    pub peak_bitmap_bytes: Option<usize>,
    /// Total payload of the ground bitmaps relative to the raw backend.
    pub compressed_ratio: Option<f64>,
    /// Median wall time of one evaluation, in milliseconds.
    pub wall_ms: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutcome {
    pub record: BenchRecord,
    pub verdict: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub formulas: Vec<(String, Formula)>,
    pub backends: Vec<Backend>,
    pub lengths: Vec<usize>,
    pub num_vars: usize,
    pub repeat: usize,
    pub seed: u64,
    /// Timed repetitions per cell, after one warm-up run.
    pub reps: usize,
    /// Time ground-bitmap construction together with evaluation.
    pub include_ingest: bool,
    /// Cells measured concurrently. 1 keeps timings free of interference.
    pub jobs: usize,
    /// Each repetition loops the evaluation until at least this much time
    /// has passed, so short evaluations are not lost in timer resolution.
    pub min_rep_time: Duration,
}

impl BenchConfig {
    pub fn new(
        formulas: Vec<(String, Formula)>,
        backends: Vec<Backend>,
        lengths: Vec<usize>,
    ) -> BenchConfig {
        BenchConfig {
            formulas,
            backends,
            lengths,
            num_vars: 10,
            repeat: 1,
            seed: 0,
            reps: 5,
            include_ingest: false,
            jobs: 1,
            min_rep_time: Duration::from_millis(2),
        }
    }
}

struct Grounds {
    raw: Option<GroundEnv<RawBitmap>>,
    rle: Option<GroundEnv<RleBitmap>>,
    roaring: Option<GroundEnv<RoaringBitmap>>,
    raw_payload: usize,
}

trait Pick: Bitmap {
    fn pick(g: &Grounds) -> &GroundEnv<Self>;
}

impl Pick for RawBitmap {
    fn pick(g: &Grounds) -> &GroundEnv<Self> {
        g.raw.as_ref().expect("raw environment built")
    }
}

impl Pick for RleBitmap {
    fn pick(g: &Grounds) -> &GroundEnv<Self> {
        g.rle.as_ref().expect("rle64 environment built")
    }
}

impl Pick for RoaringBitmap {
    fn pick(g: &Grounds) -> &GroundEnv<Self> {
        g.roaring.as_ref().expect("roaring environment built")
    }
}

fn env_payload<B: Bitmap>(env: &GroundEnv<B>) -> usize {
    env.bindings().map(|(_, b)| b.payload_bytes()).sum()
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    }
}

struct Measurement {
    verdict: bool,
    peak: usize,
    seconds: f64,
}

fn measure<B: Pick>(
    f: &Formula,
    trace: &Trace,
    grounds: &Grounds,
    config: &BenchConfig,
) -> Result<Measurement, EvalError> {
    let env = B::pick(grounds);
    let run = || -> Result<(bool, usize), EvalError> {
        if config.include_ingest {
            let fresh = build_ground_bitmaps::<B>(trace);
            eval(f, &fresh).map(|r| (r.verdict, r.peak_bitmap_bytes))
        } else {
            eval(f, env).map(|r| (r.verdict, r.peak_bitmap_bytes))
        }
    };
    let start = Instant::now();
    let (verdict, peak) = run()?;
    let first = start.elapsed();
    let inner = if first.is_zero() {
        1000
    } else {
        (config.min_rep_time.as_secs_f64() / first.as_secs_f64())
            .ceil()
            .max(1.0) as usize
    };
    let mut samples = Vec::with_capacity(config.reps.max(1));
    for _ in 0..config.reps.max(1) {
        let start = Instant::now();
        for _ in 0..inner {
            std::hint::black_box(run()?);
        }
        samples.push(start.elapsed().as_secs_f64() / inner as f64);
    }
    Ok(Measurement {
        verdict,
        peak,
        seconds: median(&mut samples),
    })
}

fn ratio(payload: usize, raw: usize) -> f64 {
    if raw == 0 {
        1.0
    } else {
        payload as f64 / raw as f64
    }
}

fn run_cell(
    (id, f): &(String, Formula),
    backend: Backend,
    trace: &Trace,
    grounds: &Grounds,
    config: &BenchConfig,
) -> BenchOutcome {
    let (measured, payload) = crate::with_backend!(backend, B => (
        measure::<B>(f, trace, grounds, config),
        env_payload(B::pick(grounds)),
    ));
    let mut record = BenchRecord {
        formula_id: id.clone(),
        backend: backend.name().to_string(),
        trace_length: trace.len(),
        repeat: config.repeat,
        throughput_hz: None,
        peak_bitmap_bytes: None,
        compressed_ratio: None,
        wall_ms: None,
        seed: config.seed,
    };
    match measured {
        Ok(m) => {
            record.throughput_hz = Some(if m.seconds > 0.0 {
                trace.len() as f64 / m.seconds
            } else {
                0.0
            });
            record.peak_bitmap_bytes = Some(m.peak);
            record.compressed_ratio = Some(ratio(payload, grounds.raw_payload));
            record.wall_ms = Some(m.seconds * 1e3);
            BenchOutcome {
                record,
                verdict: Some(m.verdict),
                error: None,
            }
        }
        Err(e) => BenchOutcome {
            record,
            verdict: None,
            error: Some(e.to_string()),
        },
    }
}

/// Measures every (formula, backend, length) cell on traces generated from
/// the configured seed. Rows come out ordered by length, then formula, then
/// backend.
pub fn run_bench(config: &BenchConfig) -> Vec<BenchOutcome> {
    let mut out = Vec::new();
    for &length in &config.lengths {
        let spec = TraceGenSpec::new(length, config.seed)
            .vars(config.num_vars)
            .repeat(config.repeat.max(1));
        let trace = generate_random_trace(&spec);
        let wants = |b: Backend| config.backends.contains(&b);
        let raw = build_ground_bitmaps::<RawBitmap>(&trace);
        let grounds = Grounds {
            raw_payload: env_payload(&raw),
            raw: Some(raw),
            rle: wants(Backend::Rle64).then(|| build_ground_bitmaps(&trace)),
            roaring: wants(Backend::Roaring).then(|| build_ground_bitmaps(&trace)),
        };
        let cells: Vec<(usize, Backend)> = (0..config.formulas.len())
            .flat_map(|i| config.backends.iter().map(move |&b| (i, b)))
            .collect();
        let measure_cell =
            |&(i, b): &(usize, Backend)| run_cell(&config.formulas[i], b, &trace, &grounds, config);
        if config.jobs > 1 {
            out.extend(par::with_threads(Some(config.jobs), || {
                par::map_collect(&cells, measure_cell)
            }));
        } else {
            out.extend(cells.iter().map(measure_cell));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionRow {
    pub trace_length: usize,
    pub repeat: usize,
    pub backend: String,
    pub variable: String,
    pub payload_bytes: usize,
    pub raw_bytes: usize,
    pub compressed_ratio: f64,
    pub seed: u64,
}

/// Payload of every ground bitmap under each backend, relative to raw.
pub fn compression_report(
    lengths: &[usize],
    repeats: &[usize],
    backends: &[Backend],
    num_vars: usize,
    seed: u64,
) -> Vec<CompressionRow> {
    let mut rows = Vec::new();
    for &length in lengths {
        for &repeat in repeats {
            let trace = generate_random_trace(
                &TraceGenSpec::new(length, seed)
                    .vars(num_vars)
                    .repeat(repeat),
            );
            let raw = build_ground_bitmaps::<RawBitmap>(&trace);
            for &backend in backends {
                let sizes: Vec<(String, usize)> = crate::with_backend!(backend, B => {
                    let env = build_ground_bitmaps::<B>(&trace);
                    env.bindings().map(|(n, b)| (n.to_string(), b.payload_bytes())).collect()
                });
                for (name, payload) in sizes {
                    let raw_bytes = raw.get(&name).expect("same variables").payload_bytes();
                    rows.push(CompressionRow {
                        trace_length: length,
                        repeat,
                        backend: backend.name().to_string(),
                        compressed_ratio: ratio(payload, raw_bytes),
                        variable: name,
                        payload_bytes: payload,
                        raw_bytes,
                        seed,
                    });
                }
            }
        }
    }
    rows
}

/// Writes rows as CSV with a header line and `\n` line endings.
pub fn write_csv<W: Write, T: Serialize>(sink: W, rows: &[T]) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses bench CSV, insisting on the exact column order.
pub fn read_bench_csv<R: Read>(source: R) -> Result<Vec<BenchRecord>, csv::Error> {
    let mut r = csv::Reader::from_reader(source);
    let header = r.headers()?.clone();
    if header.iter().ne(BENCH_COLUMNS.iter().copied()) {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!(
                "unexpected bench header {:?}",
                header.iter().collect::<Vec<_>>()
            ),
        )));
    }
    r.deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn quick(
        formulas: &[(&str, &str)],
        backends: Vec<Backend>,
        lengths: Vec<usize>,
    ) -> BenchConfig {
        let formulas = formulas
            .iter()
            .map(|(id, f)| (id.to_string(), parse(f).unwrap()))
            .collect();
        BenchConfig {
            reps: 1,
            min_rep_time: Duration::ZERO,
            ..BenchConfig::new(formulas, backends, lengths)
        }
    }

    #[test]
    fn median_odd_and_even() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn one_row_per_cell() {
        let c = quick(
            &[("a", "G s0"), ("b", "s0 U s1")],
            Backend::ALL.to_vec(),
            vec![0, 100],
        );
        let out = run_bench(&c);
        assert_eq!(out.len(), 2 * 3 * 2);
        assert!(out.iter().all(|o| o.error.is_none()));
        let raw_rows = out.iter().filter(|o| o.record.backend == "raw");
        assert!(raw_rows
            .clone()
            .all(|o| o.record.compressed_ratio == Some(1.0)));
        assert_eq!(raw_rows.count(), 4);
        let empty = out
            .iter()
            .find(|o| o.record.trace_length == 0 && o.record.formula_id == "a")
            .unwrap();
        assert_eq!(empty.verdict, Some(true));
        assert_eq!(empty.record.throughput_hz, Some(0.0));
    }

    #[test]
    fn failed_cell_has_empty_measurements() {
        let c = quick(&[("bad", "G nope")], vec![Backend::Raw], vec![10]);
        let out = run_bench(&c);
        assert!(out[0].error.as_deref().unwrap().contains("nope"));
        assert_eq!(out[0].record.throughput_hz, None);
        let mut buf = Vec::new();
        write_csv(&mut buf, &[out[0].record.clone()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "bad,raw,10,1,,,,,0");
    }

    #[test]
    fn csv_round_trip() {
        let c = quick(
            &[("a", "F s1")],
            vec![Backend::Rle64, Backend::Roaring],
            vec![64],
        );
        let rows: Vec<_> = run_bench(&c).into_iter().map(|o| o.record).collect();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), BENCH_COLUMNS.join(","));
        assert_eq!(read_bench_csv(&buf[..]).unwrap(), rows);
        let swapped = text.replacen("formula_id,backend", "backend,formula_id", 1);
        assert!(read_bench_csv(swapped.as_bytes()).is_err());
    }

    #[test]
    fn parallel_jobs_match_sequential() {
        let mut c = quick(
            &[("a", "G s0"), ("b", "s0 U s1"), ("c", "X s2")],
            Backend::ALL.to_vec(),
            vec![500],
        );
        let seq = run_bench(&c);
        c.jobs = 4;
        let par = run_bench(&c);
        let strip = |v: &[BenchOutcome]| {
            v.iter()
                .map(|o| {
                    (
                        o.record.formula_id.clone(),
                        o.record.backend.clone(),
                        o.verdict,
                        o.record.peak_bitmap_bytes,
                    )
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&seq), strip(&par));
    }

    #[test]
    fn compression_rows() {
        let rows = compression_report(&[6400], &[1, 64], &Backend::ALL, 2, 9);
        assert_eq!(rows.len(), 2 * 3 * 2);
        for r in &rows {
            assert_eq!(r.raw_bytes, 800);
            if r.backend == "raw" {
                assert_eq!(r.compressed_ratio, 1.0);
            }
            if r.backend == "rle64" && r.repeat == 64 {
                assert!(r.compressed_ratio <= 0.75, "{r:?}");
            }
        }
    }
}
