use std::process::Command;

fn bench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bench"))
}

fn write_config(dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("periodic.toml");
    let text = format!(
        r#"operator = "periodic_smolyak"
functions = ["cos2pi"]
p = 2.0
q = 2.0
r = 4
sweep = [3, 4, 5, 6, 7]

[weight]
lambda = 2.0
a = 0.5

[output]
dir = "{}"
"#,
        dir.join("out").display()
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_writes_report_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = bench().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/errors.csv")).unwrap();
    assert!(csv.starts_with("n,function,p,q,error,samples_used"));
    assert_eq!(csv.lines().count(), 6);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "pass");
}

#[test]
fn grids_have_levels() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = bench().arg("grids").arg(&cfg).arg("--out").arg(dir.path().join("g")).output().unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("g/grid_3.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,level_l1"));
    let levels: Vec<usize> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(levels.len(), 32);
    assert_eq!(levels.iter().filter(|&&l| l == 0).count(), 4);
}

#[test]
fn probe_reports_growth() {
    let out = bench()
        .args(["probe", "marcinkiewicz", "--degrees", "16,32", "--trials", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(v["growth_per_octave"].as_f64().unwrap() < 0.1);
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "operator = \"nope\"").unwrap();
    let out = bench().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
