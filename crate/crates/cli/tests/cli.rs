//! End-to-end checks of the binary: exit codes, output contract, file
//! exports, generation determinism, and a scripted play session.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ltlf-synth"))
}

fn write_spec(dir: &Path, name: &str, formula: &str, partition: &str) -> PathBuf {
    let spec = dir.join(format!("{name}.ltlf"));
    fs::write(&spec, formula).unwrap();
    fs::write(dir.join(format!("{name}.part")), partition).unwrap();
    spec
}

fn synth(spec: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("synth")
        .arg(spec)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn stdout_lines(output: &Output) -> Vec<String> {
    String::from_utf8_lossy(&output.stdout)
        .lines()
        .map(str::to_string)
        .collect()
}

const XY: &str = ".inputs: x\n.outputs: y\n";

#[test]
fn realizable_spec_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s", "y", XY);
    let out = synth(&spec, &[]);
    assert_eq!(out.status.code(), Some(0));
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "REALIZABLE");
    assert_eq!(lines[1], "provenance=full");
}

#[test]
fn unrealizable_spec_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s", "x", XY);
    let out = synth(&spec, &[]);
    assert_eq!(out.status.code(), Some(1));
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "UNREALIZABLE");
    assert_eq!(lines[1], "provenance=conjunct:1");
}

#[test]
fn missing_partition_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("s.ltlf");
    fs::write(&spec, "y").unwrap();
    let out = synth(&spec, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("partition"));
}

#[test]
fn parse_error_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s", "y U (", XY);
    let out = synth(&spec, &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn undeclared_proposition_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s", "F z", XY);
    let out = synth(&spec, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("z"));
}

#[test]
fn stats_line_and_modes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "s",
        "F y1 && G (x -> y2)",
        ".inputs: x\n.outputs: y1 y2\n",
    );
    for mode in ["incremental", "individual", "monolithic"] {
        let out = synth(&spec, &["--mode", mode, "--stats", "--verify"]);
        assert_eq!(out.status.code(), Some(0), "mode {mode}");
        let lines = stdout_lines(&out);
        assert_eq!(lines[0], "REALIZABLE");
        assert!(
            lines[2].starts_with(&format!("stats mode={mode}")),
            "{}",
            lines[2]
        );
    }
}

#[test]
fn dot_exports_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s", "G (x -> y)", XY);
    let strategy_dot = dir.path().join("strategy.dot");
    let dfa_dot = dir.path().join("region.dot");
    let out = synth(
        &spec,
        &[
            "--dot-strategy",
            strategy_dot.to_str().unwrap(),
            "--dot-dfa",
            dfa_dot.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let strategy = fs::read_to_string(&strategy_dot).unwrap();
    assert!(strategy.starts_with("digraph strategy"));
    let region = fs::read_to_string(&dfa_dot).unwrap();
    assert!(region.starts_with("digraph dfa"));
}

#[test]
fn play_scripted_session_halts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s", "F y", XY);
    let mut child = bin()
        .arg("play")
        .arg(&spec)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"x\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("agent: y"), "{stdout}");
    assert!(stdout.contains("HALT"), "{stdout}");
}

#[test]
fn play_rejects_unknown_proposition_then_quits() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s", "G y", XY);
    let mut child = bin()
        .arg("play")
        .arg(&spec)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"bogus\nquit\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown proposition"));
}

#[test]
fn play_refuses_unrealizable_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s", "F x", XY);
    let out = bin()
        .arg("play")
        .arg(&spec)
        .stdin(Stdio::null())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_lines(&out)[0], "UNREALIZABLE");
}

#[test]
fn gen_is_deterministic_and_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("one");
    let out2 = dir.path().join("two");
    for out in [&out1, &out2] {
        let status = bin()
            .args(["gen", "--seed", "7", "--conjuncts", "3", "--size", "6"])
            .args(["--inputs", "2", "--outputs", "2", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let spec1 = fs::read(out1.with_extension("ltlf")).unwrap();
    let spec2 = fs::read(out2.with_extension("ltlf")).unwrap();
    assert_eq!(spec1, spec2, "byte-identical per seed");
    assert_eq!(
        fs::read(out1.with_extension("part")).unwrap(),
        fs::read(out2.with_extension("part")).unwrap()
    );

    // the generated spec is consumable by synth
    let out = synth(&out1.with_extension("ltlf"), &[]);
    assert!(matches!(out.status.code(), Some(0) | Some(1)));
}

#[test]
fn gen_rejects_zero_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["gen", "--seed", "1", "--conjuncts", "0", "--out"])
        .arg(dir.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn max_states_guard_reported() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s", "F y && G (x -> X y)", XY);
    let out = synth(&spec, &["--max-states", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("state limit"));
}
