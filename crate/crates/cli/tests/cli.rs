use std::path::Path;
use std::process::{Command, Output};

const TWO_QUBIT: &str = "\
scenario = two_qubit
trials = 40
master_seed = 3

[model]
omega = 1
g = 0.1
t = 2
gamma = 1
initial = eigenstate

[error]
alpha = 0,0,1,0
beta = 0,0,1,0

[scheme]
pulses = YY

[sweep]
n = 2, 4, 8
gamma_t = 0, 1
";

fn ddsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddsim")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn numeric_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn missing_config_is_an_io_error() {
    let out = ddsim(&["limits", "--config", "/nonexistent/ddsim.conf"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "bad.conf", &TWO_QUBIT.replace("omega = 1", "omega = fast"));
    let out = ddsim(&["limits", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model.omega"));
}

#[test]
fn header_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "ok.conf", TWO_QUBIT);
    let target = dir.path().join("sweep.csv");
    let out = ddsim(&["sweep-pulses", "--config", &path, "--out", target.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&target).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("# ddsim "));
    assert!(header.contains("command=sweep-pulses"));
    assert!(header.contains("master_seed=3"));
    assert!(header.contains("trials=40"));
    let hash = header.split("config_sha256=").nth(1).unwrap().split(' ').next().unwrap();
    assert_eq!(hash.len(), 64);
    assert_eq!(numeric_rows(&csv).len(), 6);
}

#[test]
fn noiseless_rows_ignore_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "ok.conf", &TWO_QUBIT.replace("gamma_t = 0, 1", "gamma_t = 0"));
    let run = |seed: &str| {
        let out = ddsim(&["sweep-pulses", "--config", &path, "--seed", seed]);
        assert!(out.status.success());
        numeric_rows(&String::from_utf8(out.stdout).unwrap())
            .into_iter()
            .map(|mut row| {
                row.pop();
                row
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(run("1"), run("99"));
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "ok.conf", TWO_QUBIT);
    for command in ["sweep-pulses", "bounds", "limits"] {
        let a = ddsim(&[command, "--config", &path]);
        let b = ddsim(&[command, "--config", &path]);
        assert!(a.status.success(), "{command}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{command}");
    }
}

#[test]
fn trial_override_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "ok.conf", TWO_QUBIT);
    let out = ddsim(&["sweep-pulses", "--config", &path, "--trials", "7"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().next().unwrap().contains("trials=7"));
}
