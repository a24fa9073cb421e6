use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hexent(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hexent")).args(args).current_dir(dir).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

const CONFIG: &str = r#"
seed = 3
shots = 500
calibration_shots = 2000

[topology.heavy_hex]
rows = 1
cols = 1

[noise.readout]
rate = 0.04

[bootstrap]
replicates = 100
"#;

#[test]
fn topology_command_reports_the_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = hexent(&["topology", "--preset", "manhattan", "--out", "t"], dir.path());
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("65 qubits, 72 edges") && text.contains("3 CZ layers"), "{text}");
    assert!(dir.path().join("t/topology.json").is_file());
    assert!(dir.path().join("t/schedule.json").is_file());
}

#[test]
fn staged_commands_reproduce_the_full_run() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), CONFIG).unwrap();
    assert_eq!(code(&hexent(&["run", "--config", "c.toml", "--out", "full"], dir.path())), 0);
    assert_eq!(code(&hexent(&["simulate", "--config", "c.toml", "--out", "staged"], dir.path())), 0);
    for cmd in ["tomography", "qrem", "analyze"] {
        let out = hexent(&[cmd, "--config", "c.toml", "--input", "staged"], dir.path());
        assert_eq!(code(&out), 0, "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(code(&hexent(&["report", "--input", "staged", "--out", "again"], dir.path())), 0);
    let full = fs::read(dir.path().join("full/records.json")).unwrap();
    assert_eq!(fs::read(dir.path().join("staged/records.json")).unwrap(), full);
    assert_eq!(
        fs::read(dir.path().join("again/summary.json")).unwrap(),
        fs::read(dir.path().join("full/summary.json")).unwrap()
    );
    assert!(dir.path().join("staged/matrices/qrem_on/edge_0_1.json").is_file());
    assert!(dir.path().join("staged/qrem/edge_0_1.json").is_file());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), CONFIG).unwrap();
    fs::write(dir.path().join("bad.toml"), "shots = 0\n[topology]\npreset = \"rochester\"\n").unwrap();
    fs::write(dir.path().join("typo.toml"), "shot = 10\n[topology]\npreset = \"rochester\"\n").unwrap();
    assert_eq!(code(&hexent(&["--help"], dir.path())), 0);
    assert_eq!(code(&hexent(&["frobnicate"], dir.path())), 1);
    assert_eq!(code(&hexent(&["run", "--config", "bad.toml", "--out", "o"], dir.path())), 1);
    assert_eq!(code(&hexent(&["run", "--config", "typo.toml", "--out", "o"], dir.path())), 1);
    assert_eq!(code(&hexent(&["topology", "--preset", "nowhere"], dir.path())), 1);
    assert_eq!(code(&hexent(&["topology", "--heavy-hex", "0x2"], dir.path())), 1);
    assert_eq!(code(&hexent(&["analyze", "--input", "missing"], dir.path())), 1);
    assert_eq!(code(&hexent(&["simulate", "--config", "c.toml", "--out", "s"], dir.path())), 0);
    fs::remove_file(dir.path().join("s/counts/edge_0_1.json")).unwrap();
    assert_eq!(code(&hexent(&["analyze", "--input", "s"], dir.path())), 2);
}
