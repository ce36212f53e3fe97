use std::process::Command;

fn jscc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_jscc")).args(args).output().expect("run binary")
}

#[test]
fn table1_prints_four_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let out = jscc(&["table1", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("17.01") && text.contains("0.6760") && text.contains("0.5743"));
    let csv = std::fs::read_to_string(csv).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "P1,P2,a_star,b_star,D_min");
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn sweep_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &std::path::Path| {
        vec![
            "sweep".to_string(),
            "--rho".into(),
            "0.75".into(),
            "--snr-db".into(),
            "-20:40:10".into(),
            "--mc".into(),
            "--samples".into(),
            "20000".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    for p in [&a, &b] {
        let v = args(p);
        let out = jscc(&v.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let text = String::from_utf8(ta).unwrap();
    assert!(!text.contains('\r'));
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 7 * 4);
    let d = |db: &str, scheme: &str| -> f64 {
        rows.iter().find(|r| r[0] == db && r[2] == scheme).unwrap()[3].parse().unwrap()
    };
    for s in ["af", "sb", "lt"] {
        assert!(d("30", "nc") <= d("30", s) + 1e-9);
    }
    assert!(d("30", "lt") <= d("30", "sb"));
    assert!(d("-20", "af") <= d("-20", "sb") && d("-20", "af") <= d("-20", "lt"));
}

#[test]
fn config_errors_report_field_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "channel=gmac\nrho=0.2,2\n").unwrap();
    let out = jscc(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("rho"), "{err}");

    let out = jscc(&["sweep", "--schemes", ""]);
    assert_eq!(out.status.code(), Some(2));

    let out = jscc(&["sweep", "--config", cfg.to_str().unwrap(), "--rho", "0.5", "--snr-db", "0"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 5);
}

#[test]
fn multiuser_and_sideinfo_columns() {
    let out = jscc(&["multiuser", "--snr-db", "-10,10", "--n-users", "2,10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "snr_db,N,scheme,D");
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 3);

    let out = jscc(&["sideinfo", "--si", "none,dec", "--si-gain", "0,1", "--schemes", "af"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "snr_db,rho,s,scheme,availability,D_sum");
    let vals: Vec<f64> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(vals.len(), 4);
    assert_eq!(vals[0], vals[1]);
    assert!(vals[3] < vals[2]);
}

#[test]
fn oracle_check_passes() {
    let out = jscc(&["oracle-check", "--rho", "0.5", "--snr-db", "0,10", "--samples", "200000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",pass")));
}
