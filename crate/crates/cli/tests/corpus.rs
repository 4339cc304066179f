use std::path::PathBuf;

use koszulkit::{parse_report, render, run, Format, RunConfig, Status, TaskResult};
use koszulkit_core::koszul::Verdict;
use koszulkit_core::presentation::Task;
use sha2::{Digest, Sha256};

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn inputs() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    files.sort();
    assert!(files.len() >= 8);
    files
}

fn run_file(path: &PathBuf, threads: Option<usize>) -> koszulkit::Report {
    let mut config = RunConfig::new(path);
    config.threads = threads;
    run(&config).unwrap()
}

/// Set `KOSZULKIT_UPDATE_EXPECTED=1` to rewrite the stored reports.
#[test]
fn reports_match_stored_expectations() {
    let update = std::env::var_os("KOSZULKIT_UPDATE_EXPECTED").is_some();
    for input in inputs() {
        let name = input.file_stem().unwrap().to_str().unwrap().to_string();
        let expected_path = corpus().join("expected").join(format!("{name}.json"));
        let json = render(&run_file(&input, None), Format::Json);
        if update {
            std::fs::write(&expected_path, &json).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&expected_path).unwrap();
        assert_eq!(json, expected, "report for {name} differs from {}", expected_path.display());
    }
}

#[test]
fn json_round_trips() {
    for input in inputs() {
        let report = run_file(&input, None);
        let back = parse_report(&render(&report, Format::Json)).unwrap();
        assert_eq!(back, report, "{}", input.display());
    }
}

#[test]
fn identical_across_thread_counts() {
    for input in inputs() {
        let one = render(&run_file(&input, Some(1)), Format::Json);
        let four = render(&run_file(&input, Some(4)), Format::Json);
        assert_eq!(one, four, "{}", input.display());
    }
}

#[test]
fn input_hash_matches_file() {
    for input in inputs() {
        let bytes = std::fs::read(&input).unwrap();
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(run_file(&input, None).input_sha256, digest);
    }
}

fn has_window(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Object(m) => {
            m.keys().any(|k| k == "window" || k == "n_max" || k == "internal_window") || m.values().any(has_window)
        }
        serde_json::Value::Array(a) => a.iter().any(has_window),
        _ => false,
    }
}

#[test]
fn every_verdict_carries_a_window() {
    for input in inputs() {
        let v = serde_json::to_value(run_file(&input, None)).unwrap();
        for task in v["tasks"].as_array().unwrap() {
            let Some(result) = task.get("result") else { continue };
            let body = result.as_object().unwrap().values().next().unwrap();
            assert!(has_window(body), "{} in {}", task["task"], input.display());
        }
    }
}

#[test]
fn sjodin_verdicts() {
    let r = run_file(&corpus().join("sjodin.toml"), None);
    let Some(TaskResult::QuasiKoszul(q)) = &r.task(Task::QuasiKoszul).unwrap().result else { panic!() };
    assert_eq!(q.certificate.verdict, Verdict::PassInWindow);
    assert_eq!(q.agree, Some(true));
    let Some(TaskResult::Koszul(k)) = &r.task(Task::Koszul).unwrap().result else { panic!() };
    assert_eq!(k.certificate.verdict, Verdict::Fail);
    let Some(TaskResult::Gr(g)) = &r.task(Task::Gr).unwrap().result else { panic!() };
    assert_eq!(g.dims, vec![1, 2, 1, 1]);
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn cps_koszul_and_double_dual() {
    let r = run_file(&corpus().join("cps_b.toml"), None);
    let Some(TaskResult::Koszul(k)) = &r.task(Task::Koszul).unwrap().result else { panic!() };
    assert!(k.certificate.passes());
    let Some(TaskResult::DoubleDual(d)) = &r.task(Task::DoubleDual).unwrap().result else { panic!() };
    assert!(d.dims_match);
    assert!(!r.task(Task::Ext).unwrap().requested);
}

#[test]
fn dual_numbers_text_has_diagonal_betti_grid() {
    let r = run_file(&corpus().join("dual_numbers.toml"), None);
    let text = render(&r, Format::Text);
    let grid: Vec<&str> = text
        .lines()
        .skip_while(|l| !l.contains("Betti table (rows"))
        .skip(3)
        .take(5)
        .collect();
    for (t, line) in grid.iter().enumerate() {
        let cells: Vec<&str> = line.split('|').nth(1).unwrap().split_whitespace().collect();
        for (n, c) in cells.iter().enumerate() {
            assert_eq!(*c == "1", n == t, "row {t}: {line}");
        }
    }
    // E(A) = k[u] is infinite, so self-injectivity is refused.
    assert_eq!(r.task(Task::SelfInjectiveDual).unwrap().status, Status::Impossible);
    assert_eq!(r.exit_code(), 4);
}

#[test]
fn failed_certificate_renders_witness() {
    let r = run_file(&corpus().join("cubic_ungraded.toml"), None);
    let text = render(&r, Format::Text);
    assert!(text.contains("witness at (n, k) = (1, 1)"), "{text}");
    assert!(text.contains("vector ["));
}
