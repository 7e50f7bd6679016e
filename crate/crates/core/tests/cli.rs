//! End-to-end runs of the binary: exit codes, output determinism, and the
//! file artifacts of each subcommand.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

static DIR_SEQ: AtomicU32 = AtomicU32::new(0);

fn scratch_dir(name: &str) -> PathBuf {
    let seq = DIR_SEQ.fetch_add(1, Ordering::SeqCst);
    let dir = std::env::temp_dir().join(format!(
        "kscolor-cli-{}-{}-{}",
        std::process::id(),
        seq,
        name
    ));
    fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

fn kscolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kscolor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

const TRIPLE_DOC: &str = "ksdoc 1\npoint x 1 0 0\npoint y 0 1 0\npoint z 0 0 1\ntriple x y z\n";

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf8 temp path")
}

#[test]
fn construct_writes_system_and_figure() {
    let dir = scratch_dir("construct");
    let sys = dir.join("sys.ksdoc");
    let svg = dir.join("fig.svg");
    let out = kscolor(&[
        "construct",
        "--out",
        path_str(&sys),
        "--svg",
        path_str(&svg),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("points 114"));
    assert!(text.contains("triples 7"));
    assert!(text.contains("pairs 0"));
    assert!(text.contains("spans 108"));
    assert!(sys.exists());
    let svg_text = fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<?xml"));
    assert_eq!(svg_text.matches("<polyline").count(), 9);

    // Identical invocations produce byte-identical artifacts.
    let sys2 = dir.join("sys2.ksdoc");
    let out2 = kscolor(&["construct", "--out", path_str(&sys2)]);
    assert_eq!(code(&out2), 0);
    assert_eq!(
        fs::read_to_string(&sys).unwrap(),
        fs::read_to_string(&sys2).unwrap()
    );
}

#[test]
fn construct_rejects_bad_step() {
    let dir = scratch_dir("badstep");
    let out = kscolor(&[
        "construct",
        "--step-deg",
        "7",
        "--out",
        path_str(&dir.join("x.ksdoc")),
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn verify_constructed_system_is_uncolorable_with_certificate() {
    let dir = scratch_dir("verify");
    let sys = dir.join("sys.ksdoc");
    assert_eq!(code(&kscolor(&["construct", "--out", path_str(&sys)])), 0);

    let cert = dir.join("cert.txt");
    let out = kscolor(&[
        "verify",
        path_str(&sys),
        "--certificate",
        path_str(&cert),
    ]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.starts_with("UNCOLORABLE"));
    assert!(cert.exists());

    let check = kscolor(&["check-cert", path_str(&sys), path_str(&cert)]);
    assert_eq!(code(&check), 0);
    assert!(stdout(&check).contains("certificate ok"));

    // A tampered certificate is rejected with the failing step.
    let mut lines: Vec<String> = fs::read_to_string(&cert)
        .unwrap()
        .lines()
        .map(|s| s.to_string())
        .collect();
    let idx = lines
        .iter()
        .position(|l| l.starts_with("PROP"))
        .expect("certificate has propagation steps");
    lines.remove(idx);
    let bad = dir.join("bad-cert.txt");
    fs::write(&bad, lines.join("\n") + "\n").unwrap();
    let check = kscolor(&["check-cert", path_str(&sys), path_str(&bad)]);
    assert_eq!(code(&check), 1);
    assert!(stdout(&check).contains("certificate invalid"));
}

#[test]
fn verify_small_system_modes_agree() {
    let dir = scratch_dir("modes");
    let doc = dir.join("triple.ksdoc");
    fs::write(&doc, TRIPLE_DOC).unwrap();

    let full = kscolor(&["verify", path_str(&doc)]);
    assert_eq!(code(&full), 0);
    assert!(stdout(&full).starts_with("VALID"));
    assert!(stdout(&full).contains("coloring RGG"));

    let brute = kscolor(&["verify", path_str(&doc), "--mode", "brute"]);
    assert_eq!(code(&brute), 0);
    assert!(stdout(&brute).starts_with("VALID"));

    let json = kscolor(&["verify", path_str(&doc), "--json"]);
    assert_eq!(code(&json), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(parsed["verdict"], "VALID");
    assert_eq!(parsed["points"], 3);

    // Identical invocations give byte-identical stdout.
    let again = kscolor(&["verify", path_str(&doc)]);
    assert_eq!(stdout(&full), stdout(&again));
}

#[test]
fn verify_error_exit_codes() {
    let dir = scratch_dir("errors");
    let missing = kscolor(&["verify", path_str(&dir.join("absent.ksdoc"))]);
    assert_eq!(code(&missing), 2);

    let garbled = dir.join("garbled.ksdoc");
    fs::write(&garbled, "not a document\n").unwrap();
    let parse = kscolor(&["verify", path_str(&garbled)]);
    assert_eq!(code(&parse), 5);

    // A triple that is not geometrically orthogonal fails validation.
    let skew = dir.join("skew.ksdoc");
    fs::write(
        &skew,
        "ksdoc 1\npoint a 1 0 0\npoint b 0.1 1 0\npoint c 0 0 1\ntriple a b c\n",
    )
    .unwrap();
    let geo = kscolor(&["verify", path_str(&skew)]);
    assert_eq!(code(&geo), 3);
}

#[test]
fn export_cnf_layout() {
    let dir = scratch_dir("cnf");
    let doc = dir.join("triple.ksdoc");
    fs::write(&doc, TRIPLE_DOC).unwrap();
    let out_path = dir.join("triple.cnf");
    let out = kscolor(&["export-cnf", path_str(&doc), "--out", path_str(&out_path)]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&out_path).unwrap();
    assert_eq!(
        text,
        "c 1 x\nc 2 y\nc 3 z\np cnf 3 4\n1 2 3 0\n-1 -2 0\n-1 -3 0\n-2 -3 0\n"
    );
}

#[test]
fn plan_descent_listing_and_errors() {
    let out = kscolor(&[
        "plan-descent",
        "--from-lat",
        "60",
        "--from-lon",
        "0",
        "--to-lat",
        "30",
        "--to-lon",
        "180",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("steps 7"));
    assert_eq!(text.lines().count(), 8);

    let json = kscolor(&[
        "plan-descent",
        "--from-lat",
        "60",
        "--from-lon",
        "0",
        "--to-lat",
        "30",
        "--to-lon",
        "180",
        "--json",
    ]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(parsed["steps"].as_array().unwrap().len(), 7);

    let north = kscolor(&[
        "plan-descent",
        "--from-lat",
        "30",
        "--from-lon",
        "0",
        "--to-lat",
        "60",
        "--to-lon",
        "0",
    ]);
    assert_eq!(code(&north), 4);
}

#[test]
fn derive_builds_verifiable_system() {
    let dir = scratch_dir("derive");
    let vectors = dir.join("vectors.ksdoc");
    fs::write(
        &vectors,
        "ksdoc 1\npoint x 1 0 0\npoint y 0 1 0\npoint z 0 0 1\npoint d 1 1 0\n",
    )
    .unwrap();
    let derived = dir.join("derived.ksdoc");
    let out = kscolor(&["derive", path_str(&vectors), "--out", path_str(&derived)]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("triples 1"));
    assert!(text.contains("pairs 1"));
    assert!(text.contains("spans 3"));

    let verify = kscolor(&["verify", path_str(&derived)]);
    assert_eq!(code(&verify), 0);
    assert!(stdout(&verify).starts_with("VALID"));

    // Restricting the scan to triples drops the pair and spans.
    let only_triples = dir.join("triples-only.ksdoc");
    let out = kscolor(&[
        "derive",
        path_str(&vectors),
        "--triples",
        "--out",
        path_str(&only_triples),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("pairs 0"));
}

#[test]
fn tolerance_override_flag() {
    let dir = scratch_dir("tolflag");
    let doc = dir.join("skew.ksdoc");
    fs::write(
        &doc,
        "ksdoc 1\npoint a 1 0 0\npoint b 0.0001 1 0\npoint c 0 0 1\ntriple a b c\n",
    )
    .unwrap();
    // Strict tolerances reject the skewed triple; a loose override accepts.
    assert_eq!(code(&kscolor(&["verify", path_str(&doc)])), 3);
    let loose = kscolor(&["verify", path_str(&doc), "--tol", "orth=1e-3"]);
    assert_eq!(code(&loose), 0);
}
