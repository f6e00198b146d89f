//! End-to-end runs of the binary: argument handling, formats, exit
//! codes, and determinism of the emitted bytes.

use std::fs;
use std::process::{Command, Output};

use chseq::machseq::ChSequence;
use chseq::seqio;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chseq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn generate_square_sequence() {
    let out = run(&["generate", "--algorithm", "ideal-ch", "--L", "2"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("98 4 ideal-ch L=2 p=7"));
    let values: Vec<u32> = lines
        .flat_map(str::split_whitespace)
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 98);
    // Row 0 of the worked 7x7 example, on duty for the first 14 slots.
    assert_eq!(
        &values[..14],
        &[0, 0, 1, 3, 1, 0, 2, 0, 0, 1, 3, 1, 0, 2]
    );
}

#[test]
fn generate_lone_channel_parks() {
    let out = run(&["generate", "--algorithm", "ortho-ch", "--N", "4", "--avail", "0"]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("55 4 ortho-ch N=4 p=5 r=none seed=0"));
    let values: Vec<u32> = lines
        .flat_map(str::split_whitespace)
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(values, vec![0; 55]);
}

#[test]
fn generate_rejects_csv_and_wrong_sizing() {
    let out = run(&["generate", "--algorithm", "ideal-ch", "--L", "2", "--format", "csv"]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("not CSV"));

    let out = run(&["generate", "--algorithm", "ideal-ch", "--N", "4"]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("sized by --L"));

    let out = run(&["generate", "--algorithm", "ortho-ch", "--L", "2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("sized by --N"));

    let out = run(&["generate", "--algorithm", "general-mach"]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("needs --N"));
}

#[test]
fn generate_writes_files_and_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let seq_path = dir.path().join("seq.txt");
    let matrix_path = dir.path().join("matrix.txt");
    let dots_path = dir.path().join("dots.txt");
    let out = run(&[
        "generate",
        "--algorithm",
        "ideal-ch",
        "--L",
        "2",
        "--out",
        seq_path.to_str().unwrap(),
        "--matrix-out",
        matrix_path.to_str().unwrap(),
        "--ideal-out",
        dots_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout_of(&out).starts_with("wrote "));

    let seq = seqio::read_sequence(fs::read_to_string(&seq_path).unwrap().as_bytes()).unwrap();
    assert_eq!(seq.period(), 98);

    let matrix = fs::read_to_string(&matrix_path).unwrap();
    let rows: Vec<&str> = matrix.lines().collect();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0], "0 0 1 3 1 0 2");

    let dots = fs::read_to_string(&dots_path).unwrap();
    assert_eq!(dots.lines().count(), 7);
    for line in dots.lines() {
        assert!(line.chars().all(|c| c == '0' || c == '1'));
    }
}

#[test]
fn matrix_out_needs_a_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("matrix.txt");
    let out = run(&[
        "generate", "--algorithm", "ortho-ch", "--N", "4", "--avail", "0",
        "--matrix-out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("no matrix"));

    let out = run(&[
        "generate", "--algorithm", "ortho-ch", "--N", "4",
        "--ideal-out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("applies to ideal-ch and general-mach"));
}

#[test]
fn verify_constructions_pass() {
    let out = run(&["verify", "--algorithm", "ideal-ch", "--L", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    for check in [
        "ok: ideal placement law",
        "ok: 2D diversity",
        "ok: drift sweep",
        "ok: aligned-box drift sweep",
    ] {
        assert!(text.contains(check), "missing {check:?} in:\n{text}");
    }
    assert!(text.contains("verdict: pass"));

    let out = run(&["verify", "--algorithm", "ortho-ch", "--N", "5"]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("ok: column cover"));
    assert!(text.contains("ok: pairwise orthogonality"));
    assert!(text.contains("verdict: pass"));
}

#[test]
fn verify_file_catches_an_erased_channel() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.txt");

    // A certified 4-channel sequence with every channel-3 slot erased
    // to channel 0 can no longer meet on channel 3 anywhere.
    let good = chseq::machseq::general_mach_ch(4).unwrap();
    let values: Vec<u32> = good.values().iter().map(|&v| if v == 3 { 0 } else { v }).collect();
    let broken = ChSequence::new(values, 4, good.provenance()).unwrap();
    let mut file = fs::File::create(&path).unwrap();
    seqio::write_sequence(&mut file, &broken).unwrap();
    drop(file);

    let out = run(&["verify", "--file", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(
        text.contains("FAIL: drift sweep: drift 0 never meets channel 3"),
        "unexpected report:\n{text}"
    );
    assert!(text.contains("verdict: fail"));

    // Channels 0..3 kept their witnesses, so capping the count passes.
    let out = run(&["verify", "--file", path.to_str().unwrap(), "--N", "3"]);
    assert_eq!(code(&out), 0);
    assert!(stdout_of(&out).contains("verdict: pass"));

    let out = run(&[
        "verify", "--file", path.to_str().unwrap(), "--algorithm", "ideal-ch",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("not both"));
}

#[test]
fn sweep_stays_under_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("runs.csv");
    let out = run(&[
        "sweep",
        "--algorithm",
        "ortho-ch",
        "--N",
        "4",
        "--avail1",
        "0,1,3",
        "--avail2",
        "0,2,3",
        "--seeds",
        "3",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    let summary = stdout_of(&out);
    for needle in [
        "metric=time-to-rendezvous",
        "period1=55",
        "period2=55",
        "runs=165",
        "misses=0",
        "bound=55",
        "pass=true",
    ] {
        assert!(summary.contains(needle), "missing {needle:?} in:\n{summary}");
    }

    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("drift,seed,n1,n2,G,T,Tsharp"));
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[2], "3");
        assert_eq!(fields[3], "3");
        assert_eq!(fields[4], "2");
        let t: i64 = fields[5].parse().unwrap();
        assert!((1..=55).contains(&t), "T = {t} out of range in {line:?}");
        rows += 1;
    }
    assert_eq!(rows, 165);
}

#[test]
fn square_sweep_reports_full_diversity() {
    let out = run(&["sweep", "--algorithm", "ideal-ch", "--L", "2", "--seeds", "1"]);
    assert_eq!(code(&out), 0);
    let summary = stderr_of(&out);
    assert!(summary.contains("metric=time-to-full-diversity"));
    assert!(summary.contains("bound=98"));
    assert!(summary.contains("pass=true"));
    // Without --out the per-run CSV owns stdout.
    let csv = stdout_of(&out);
    assert!(csv.starts_with("drift,seed,n1,n2,G,T,Tsharp"));
    assert_eq!(csv.lines().count(), 99);
}

#[test]
fn disjoint_availability_is_unusable() {
    let out = run(&[
        "simulate", "--algorithm", "ortho-ch", "--N", "4",
        "--avail1", "0,1", "--avail2", "2,3",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("no common channel"));
}

#[test]
fn simulate_reports_every_common_channel() {
    let out = run(&[
        "simulate", "--algorithm", "ortho-ch", "--N", "4", "--drift", "7", "--seed", "3",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("common=0,1,2,3"));
    assert!(text.contains("horizon=110"));
    let t_line = text.lines().find(|l| l.starts_with("t=")).unwrap();
    let t: i64 = t_line.trim_start_matches("t=").parse().unwrap();
    assert!((1..=55).contains(&t), "T = {t} over the worst-case bound");
    for k in 0..4 {
        assert!(text.contains(&format!("met[{k}]=")));
    }
}

#[test]
fn json_outputs_parse() {
    let out = run(&[
        "generate", "--algorithm", "ortho-ch", "--N", "4", "--seed", "9",
        "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["period"], 55);
    assert_eq!(v["values"].as_array().unwrap().len(), 55);

    let out = run(&["verify", "--algorithm", "general-mach", "--N", "3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["pass"], true);

    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("runs.csv");
    let out = run(&[
        "sweep", "--algorithm", "ortho-ch", "--N", "2", "--seeds", "2",
        "--ettr-trials", "200", "--format", "json",
        "--out", csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["ettr"]["trials"], 200);

    let out = run(&["simulate", "--algorithm", "ideal-ch", "--L", "2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(v["t"].as_u64().unwrap() >= 1);

    let out = run(&["ratio", "--N", "100", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["p"], 127);
    assert_eq!(v["usable"], 106);
}

#[test]
fn ratio_prints_the_pinned_line() {
    let out = run(&["ratio", "--N", "100"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout_of(&out),
        "N=100 p=127 reserved=21 usable=106 ratio=32258/11236=2.870951\n"
    );
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "generate", "--algorithm", "ortho-ch", "--N", "7",
        "--avail", "1,2,5", "--seed", "42",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);

    let args = [
        "sweep", "--algorithm", "ortho-ch", "--N", "5",
        "--avail1", "0,1,4", "--avail2", "1,2", "--seeds", "2", "--format", "json",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0, "stderr: {}", stderr_of(&first));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stderr, second.stderr);
}
