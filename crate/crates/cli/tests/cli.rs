use std::path::PathBuf;
use std::process::{Command, Output};

use ltlbit::bench::{read_bench_csv, BenchRecord, BENCH_COLUMNS};
use ltlbit::trace::{load_trace, Format};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn ltlbit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltlbit"))
        .args(args)
        .env_remove("LTLBIT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn check(trace: &str, formula: &str, extra: &[&str]) -> Output {
    let path = fixture(trace);
    let mut args = vec![
        "check",
        "--trace",
        path.to_str().unwrap(),
        "--formula",
        formula,
    ];
    args.extend_from_slice(extra);
    ltlbit(&args)
}

fn line<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no {key} line in:\n{out}"))
}

#[test]
fn satisfied_formula_exits_zero() {
    for backend in ["raw", "rle64", "roaring"] {
        let o = check("all_p.csv", "G p", &["--backend", backend]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let out = stdout(&o);
        assert_eq!(line(&out, "verdict"), "true");
        assert_eq!(line(&out, "backend"), backend);
        assert_eq!(line(&out, "events"), "4");
    }
}

#[test]
fn empty_trace_eventually_is_violated() {
    let o = check("empty.csv", "F p", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(line(&stdout(&o), "verdict"), "false");
    let o = check("empty.csv", "G p", &[]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn parse_error_exits_two_with_diagnostic() {
    let o = check("all_p.csv", "G (p ->", &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("error: syntax error at offset 7"), "{err}");
    assert!(err.contains("G (p ->\n") && err.contains('^'), "{err}");
    assert!(stdout(&o).is_empty());
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(check("missing.csv", "p", &[]).status.code(), Some(2));
    assert_eq!(check("all_p.csv", "G r", &[]).status.code(), Some(2));
    assert_eq!(
        check("all_p.csv", "p", &["--backend", "bogus"])
            .status
            .code(),
        Some(2)
    );
    let path = fixture("all_p.csv");
    assert_eq!(
        ltlbit(&["check", "--trace", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let o = ltlbit(&[
        "check",
        "--trace",
        path.to_str().unwrap(),
        "--formula-id",
        "Z99",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn positions_are_printed_oldest_first() {
    let o = check("request_response.csv", "G (p -> F q)", &["--positions"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert_eq!(line(&out, "positions"), "00001");
    assert_eq!(line(&out, "size"), "3");
    assert_eq!(line(&out, "depth"), "3");
    assert_eq!(line(&out, "formula"), "G (p -> F q)");
}

#[test]
fn bitlines_and_csv_agree() {
    let csv = check(
        "request_response.csv",
        "p U (q | X p)",
        &["--positions", "--backend", "roaring"],
    );
    let bits = check(
        "request_response.bits",
        "p U (q | X p)",
        &["--positions", "--format", "bitlines"],
    );
    assert_eq!(csv.status.code(), bits.status.code());
    assert_eq!(
        line(&stdout(&csv), "positions"),
        line(&stdout(&bits), "positions")
    );
}

#[test]
fn corpus_formula_by_id() {
    let path = fixture("all_p.csv");
    let o = ltlbit(&[
        "check",
        "--trace",
        path.to_str().unwrap(),
        "--formula-id",
        "a1",
    ]);
    // Corpus formulas range over s0..s9, which this trace lacks.
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("s0"), "{}", stderr(&o));
}

#[test]
fn slices_are_checked_separately() {
    let o = check("sessions.csv", "G (p -> F q)", &["--slice", "session"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(line(&out, "slices"), "3");
    assert_eq!(line(&out, "slice 7"), "true (2 events)");
    assert_eq!(line(&out, "slice 8"), "false (2 events)");
    assert_eq!(line(&out, "slice unkeyed"), "true (1 events)");
    assert_eq!(line(&out, "events"), "5");

    let o = check("sessions.csv", "F q", &["--slice", "session"]);
    assert_eq!(o.status.code(), Some(1));
    let o = check("sessions.csv", "G (p -> F q)", &[]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "session column is not Boolean without --slice"
    );
}

fn bench(extra: &[&str]) -> Vec<BenchRecord> {
    let mut args = vec!["bench", "--reps", "1"];
    args.extend_from_slice(extra);
    let o = ltlbit(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), BENCH_COLUMNS.join(","));
    assert!(!out.contains('\r'));
    assert!(stderr(&o).contains("prng=chacha8"));
    read_bench_csv(out.as_bytes()).expect("bench CSV parses back")
}

#[test]
fn bench_emits_one_row_per_cell() {
    let rows = bench(&["--length", "300,1k"]);
    assert_eq!(rows.len(), 57 * 3 * 2);
    for r in &rows {
        assert!(r.throughput_hz.unwrap() > 0.0);
        assert!(r.wall_ms.unwrap() >= 0.0);
        assert_eq!(r.seed, 0);
        if r.backend == "raw" {
            assert_eq!(r.compressed_ratio, Some(1.0));
        }
    }
}

/// Rows with the timing columns blanked.
fn non_timing(rows: &[BenchRecord]) -> Vec<BenchRecord> {
    rows.iter()
        .map(|r| BenchRecord {
            throughput_hz: None,
            wall_ms: None,
            ..r.clone()
        })
        .collect()
}

#[test]
fn bench_is_deterministic_for_a_seed() {
    let args = [
        "--formula-id",
        "D19,S01",
        "--length",
        "2000",
        "--repeat",
        "4",
        "--seed",
        "42",
    ];
    let a = bench(&args);
    let b = bench(&args);
    assert_eq!(a.len(), 6);
    assert_eq!(non_timing(&a), non_timing(&b));
    assert!(a.iter().all(|r| r.seed == 42 && r.repeat == 4));

    let env = Command::new(env!("CARGO_BIN_EXE_ltlbit"))
        .args([
            "bench",
            "--reps",
            "1",
            "--formula-id",
            "D19,S01",
            "--length",
            "2000",
            "--repeat",
            "4",
        ])
        .env("LTLBIT_SEED", "42")
        .output()
        .unwrap();
    let c = read_bench_csv(&env.stdout[..]).unwrap();
    assert_eq!(non_timing(&a), non_timing(&c));
}

#[test]
fn failed_bench_cell_keeps_its_row() {
    let rows = bench(&[
        "--formula",
        "zz",
        "--formula-id",
        "A1",
        "--backend",
        "raw",
        "--length",
        "500",
    ]);
    assert_eq!(rows.len(), 2);
    let failed = rows.iter().find(|r| r.formula_id == "F1").unwrap();
    assert_eq!(failed.throughput_hz, None);
    assert_eq!(failed.peak_bitmap_bytes, None);
    let ok = rows.iter().find(|r| r.formula_id == "A1").unwrap();
    assert!(ok.throughput_hz.is_some());
}

#[test]
fn gen_writes_loadable_traces() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let bits = dir.path().join("t.bits");
    for (path, format) in [(&csv, "csv"), (&bits, "bitlines")] {
        let o = ltlbit(&[
            "gen",
            "--length",
            "1k",
            "--vars",
            "3",
            "--repeat",
            "8",
            "--seed",
            "9",
            "--format",
            format,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = load_trace(std::fs::File::open(&csv).unwrap(), Format::Csv).unwrap();
    let b = load_trace(std::fs::File::open(&bits).unwrap(), Format::Bitlines).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 1000);
    assert_eq!(a.variables(), ["s0", "s1", "s2"]);

    let again = ltlbit(&[
        "gen", "--length", "1k", "--vars", "3", "--repeat", "8", "--seed", "9",
    ]);
    assert_eq!(again.stdout, std::fs::read(&csv).unwrap());

    let o = check_path(&csv, "G (s0 -> F s1) | F G s2");
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", stderr(&o));
}

fn check_path(path: &std::path::Path, formula: &str) -> Output {
    ltlbit(&[
        "check",
        "--trace",
        path.to_str().unwrap(),
        "--formula",
        formula,
    ])
}

#[test]
fn compress_report_lists_every_ground_bitmap() {
    let o = ltlbit(&[
        "compress-report",
        "--length",
        "6400",
        "--repeat",
        "1,64",
        "--vars",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut r = csv::Reader::from_reader(&o.stdout[..]);
    let header: Vec<String> = r.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(
        header,
        [
            "trace_length",
            "repeat",
            "backend",
            "variable",
            "payload_bytes",
            "raw_bytes",
            "compressed_ratio",
            "seed"
        ]
    );
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2 * 3 * 4);
    for row in &rows {
        let ratio: f64 = row[6].parse().unwrap();
        match (&row[2], &row[1]) {
            ("raw", _) => assert_eq!(ratio, 1.0),
            ("rle64", "64") => assert!(ratio <= 0.75, "{row:?}"),
            ("rle64", "1") => assert!(ratio <= 1.25, "{row:?}"),
            _ => {}
        }
    }
}
