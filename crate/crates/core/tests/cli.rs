use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_torsor");

fn torsor(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("TORSOR_OUT_DIR").output().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn scenario(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn bundled_scenario_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = torsor(&["run", "pointwise_projectile", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("pointwise_projectile.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,m,x1,x2,x3,p1,p2,p3,q1,q2,q3,l1,l2,l3");
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = torsor(&["run", "cauchy_manufactured", "--tolerance-scale", "1e-30", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stdout).contains("FAIL"));
}

#[test]
fn missing_connection_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/pointwise_coriolis.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&src).unwrap();
    v.as_object_mut().unwrap().remove("connection");
    let path = scenario(dir.path(), "broken.json", &v.to_string());
    let out = torsor(&["run", &path, "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("connection"), "{}", text(&out.stderr));
}

#[test]
fn wrong_schema_and_bad_json_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario(dir.path(), "s.json", r#"{"schema": 7}"#);
    assert_eq!(torsor(&["run", &path]).status.code(), Some(2));
    let path = scenario(dir.path(), "t.json", "{ not json");
    assert_eq!(torsor(&["run", &path]).status.code(), Some(2));
    assert_eq!(torsor(&["run", "no_such_scenario"]).status.code(), Some(2));
}

#[test]
fn list_names_every_family() {
    let out = torsor(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let s = text(&out.stdout);
    for name in ["pointwise", "cauchy", "1d", "2d", "3d_cosserat", "reduction"] {
        assert!(s.contains(name), "missing {name} in\n{s}");
    }
}

#[test]
fn describe_names_the_law() {
    let out = torsor(&["describe", "pointwise_coriolis"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).contains("pointwise balance"));
    assert_eq!(torsor(&["describe", "bogus"]).status.code(), Some(2));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN).args(["run", "free_particle"]).env("TORSOR_OUT_DIR", dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("free_particle.csv").exists());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for name in ["random_3d_cosserat", "sphere_shell_2d", "pointwise_coriolis", "reduction_disc"] {
        for d in [&a, &b] {
            let out = torsor(&["run", name, "--seed", "11", "--out-dir", d.path().to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(0), "{name}: {}", text(&out.stdout));
        }
    }
    for e in std::fs::read_dir(a.path()).unwrap() {
        let p = e.unwrap().path();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(b.path().join(p.file_name().unwrap())).unwrap());
    }
}

#[test]
fn residual_records_have_ten_entries() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(torsor(&["run", "plate_2d", "--out-dir", dir.path().to_str().unwrap()]).status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("plate_2d.json")).unwrap()).unwrap();
    let records = v["records"].as_array().or_else(|| v.as_array()).expect("records");
    for r in records {
        assert_eq!(r["residual"].as_array().unwrap().len(), 10);
        assert!(r["chart_point"].is_array());
        assert!(r["norms"]["max_abs"].is_number());
    }
}
