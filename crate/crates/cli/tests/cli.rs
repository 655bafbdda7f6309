use std::path::PathBuf;
use std::process::Command;

fn voa() -> Command {
    Command::new(env!("CARGO_BIN_EXE_voa"))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("voa-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn verify_writes_json_report() {
    let gram = scratch("neg2.json", r#"{"gram": [[-2]]}"#);
    let out = gram.with_file_name("table4.json");
    let status =
        voa().args(["verify", "--gram"]).arg(&gram).args(["--suite", "table4", "--out"]).arg(&out).status().unwrap();
    assert!(status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["suite"], "table4");
    assert_eq!(v["pass"], true);
    assert_eq!(v["gram"], serde_json::json!([[-2]]));
}

#[test]
fn verify_markdown_to_stdout() {
    let gram = scratch("two.json", r#"{"gram": [[2]]}"#);
    let out = voa()
        .args(["verify", "--gram"])
        .arg(&gram)
        .args(["--suite", "jacobi", "--samples", "10", "--seed", "3", "--format", "md"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# Suite `jacobi`"));
    assert_eq!(text.lines().filter(|l| l.starts_with("| #")).count(), 10);
}

#[test]
fn unknown_suite_is_rejected() {
    let gram = scratch("u.json", r#"{"gram": [[2]]}"#);
    let out = voa().args(["verify", "--gram"]).arg(&gram).args(["--suite", "tableX"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn bad_gram_is_reported() {
    let gram = scratch("odd.json", r#"{"gram": [[3]]}"#);
    let out = voa().args(["verify", "--gram"]).arg(&gram).args(["--suite", "table1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn census_of_hyperbolic_plane() {
    let gram = scratch("u2.json", r#"{"gram": [[0, 1], [1, 0]]}"#);
    let out = voa().args(["census", "--gram"]).arg(&gram).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let dims: Vec<u64> = v["modules"].as_array().unwrap().iter().map(|m| m["top_dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![2, 4]);
    assert_eq!(v["complete"], true);
}

#[test]
fn bare_matrix_is_not_a_lattice_file() {
    let gram = scratch("bare.json", "[[2]]");
    let out = voa().args(["verify", "--gram"]).arg(&gram).args(["--suite", "table3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
