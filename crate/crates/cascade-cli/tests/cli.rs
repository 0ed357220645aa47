use std::path::Path;
use std::process::{Command, Output};

fn cascade(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cascade"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn invalid_configurations_exit_2() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&cascade(d.path(), &["build-set", "--N", "1"])), 2);
    assert_eq!(code(&cascade(d.path(), &["build-set", "--bogus", "1"])), 2);
    assert_eq!(code(&cascade(d.path(), &["simulate-toy", "--precision", "f17"])), 2);
    assert_eq!(code(&cascade(d.path(), &["simulate-toy", "--threads", "0"])), 2);
    let cfg = d.path().join("bad.cfg");
    std::fs::write(&cfg, "nonsense = 3\n").unwrap();
    assert_eq!(code(&cascade(d.path(), &["simulate-toy", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn build_then_certify() {
    let d = tempfile::tempdir().unwrap();
    let o = cascade(d.path(), &["build-set", "--N", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read(d.path(), "certificate.txt").contains("certified = true"));
    let set = d.path().join("set.txt");
    let c = tempfile::tempdir().unwrap();
    assert_eq!(code(&cascade(c.path(), &["certify", "--set", set.to_str().unwrap()])), 0);
    assert!(read(c.path(), "certificate.txt").contains("certified = true"));
}

#[test]
fn prototype_fails_certification_with_4() {
    let d = tempfile::tempdir().unwrap();
    // The prototype is written uncertified; certification is a separate step.
    assert_eq!(code(&cascade(d.path(), &["build-set", "--N", "3", "--strategy", "prototype"])), 0);
    let set = d.path().join("set.txt");
    let c = tempfile::tempdir().unwrap();
    assert_eq!(code(&cascade(c.path(), &["certify", "--set", set.to_str().unwrap()])), 4);
    assert!(read(c.path(), "certificate.txt").contains("certified = false"));
}

#[test]
fn periodic_toy_orbit_keeps_its_mode() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&cascade(d.path(), &["simulate-toy", "--N", "6", "--b0", "periodic:3", "--T", "2"])), 0);
    let csv = read(d.path(), "trajectory.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# precision = f64"));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "abs2_b3").unwrap();
    let mut rows = 0;
    for l in lines {
        let v: f64 = l.split(',').nth(col).unwrap().parse().unwrap();
        // Only integration error, at the default step.
        assert!((v - 1.0).abs() < 1e-9);
        rows += 1;
    }
    assert!(rows > 2);
}

#[test]
fn outputs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert_eq!(code(&cascade(d.path(), &["simulate-toy", "--N", "4", "--b0", "random:7", "--T", "1"])), 0);
    }
    for f in ["trajectory.csv", "summary.json"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
}

#[test]
fn flags_override_config_file() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    std::fs::write(&cfg, "# toy run\nN = 5\nT = 0.5\n").unwrap();
    let o = cascade(d.path(), &["simulate-toy", "--config", cfg.to_str().unwrap(), "--T", "0.25"]);
    assert_eq!(code(&o), 0);
    let echoed = String::from_utf8_lossy(&o.stdout);
    let resolved = read(d.path(), "resolved.cfg");
    assert!(echoed.contains(&resolved));
    assert!(resolved.contains("N = 5\n"));
    assert!(resolved.contains("T = 0.25\n"));
    assert!(resolved.contains("tol = 1e-13\n"));
}

#[test]
fn portrait_and_scans() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&cascade(d.path(), &["phase-portrait", "--grid", "11"])), 0);
    assert_eq!(read(d.path(), "critical.csv").lines().count(), 4);
    assert!(read(d.path(), "hamiltonian.txt").contains("period"));

    let s = tempfile::tempdir().unwrap();
    assert_eq!(code(&cascade(s.path(), &["no-transfer-scan", "--phases", "4", "--T", "5"])), 0);
    let scan: serde_json::Value = serde_json::from_str(&read(s.path(), "scan.json")).unwrap();
    assert!(scan.is_object());

    // The rectangle transfers, so a no-transfer claim must fail.
    let r = tempfile::tempdir().unwrap();
    assert_eq!(code(&cascade(r.path(), &["no-transfer-scan", "--system", "rectangle", "--phases", "4", "--T", "3"])), 4);
}
