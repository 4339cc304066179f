use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_koszulkit"))
}

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("koszulkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const DUAL_NUMBERS_NO_TASKS: &str = "format = 1\n[field]\nkind = \"Q\"\n[quiver]\nvertices = [\"v\"]\n\
arrows = [{name=\"x\", from=\"v\", to=\"v\", weight=1}]\n[relations]\nrules = [\"x*x\"]\n\
[limits]\nweight_max = 4\nnilpotency_bound = 1\nhom_max = 3\njpower_max = 3\n";

#[test]
fn run_prints_text_and_exits_zero() {
    let out = bin().args(["run", "--input"]).arg(corpus("a2.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("== koszul: ok"));
}

#[test]
fn empty_task_list_is_a_validation_error() {
    let p = scratch("empty.toml", DUAL_NUMBERS_NO_TASKS);
    let out = bin().args(["run", "--input"]).arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no tasks"));
}

#[test]
fn tasks_flag_overrides_file() {
    let p = scratch("override.toml", DUAL_NUMBERS_NO_TASKS);
    let out = bin()
        .args(["run", "--format", "json", "--tasks", "koszul,gr", "--input"])
        .arg(&p)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report_schema"], 1);
    let names: Vec<&str> = v["tasks"].as_array().unwrap().iter().map(|t| t["task"].as_str().unwrap()).collect();
    assert_eq!(names, ["resolve", "koszul", "gr"]);
}

#[test]
fn syntax_error_exits_two() {
    let p = scratch("bad.toml", "format = 1\n[field\n");
    let out = bin().args(["run", "--input"]).arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn unknown_task_exits_two() {
    let out = bin()
        .args(["run", "--tasks", "frobnicate", "--input"])
        .arg(corpus("a2.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn impossible_task_exits_four() {
    let out = bin().args(["run", "--input"]).arg(corpus("dual_numbers.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn field_override_and_out_file() {
    let dest = std::env::temp_dir().join(format!("koszulkit-out-{}.json", std::process::id()));
    let out = bin()
        .args(["run", "--format", "json", "--field", "Fp:7", "--timings", "--input"])
        .arg(corpus("bend_back.toml"))
        .arg("--out")
        .arg(&dest)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(v["field"]["kind"], "Fp");
    assert_eq!(v["field"]["p"], 7);
    assert!(v["tasks"][0]["wall_clock_us"].is_u64());
    std::fs::remove_file(dest).ok();
}

#[test]
fn bad_field_exits_two() {
    let out = bin()
        .args(["run", "--field", "Fp:8", "--input"])
        .arg(corpus("a2.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_reports_dims() {
    let out = bin().args(["validate", "--input"]).arg(corpus("cyclic3.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("(truncated)"));
    let missing = bin().args(["validate", "--input", "/nonexistent.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}
