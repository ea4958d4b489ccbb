//! End-to-end tests that drive the compiled `polyz` binary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn polyz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_line(out: &Output) -> String {
    assert!(
        out.status.success(),
        "expected success, got {:?}; stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone())
        .expect("utf-8 stdout")
        .trim_end()
        .to_string()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("polyz-cli-test-{}-{name}", std::process::id()))
}

#[test]
fn collect_example() {
    let out = polyz(&["collect", "--group", "g2", "g2*g1"]);
    assert_eq!(stdout_line(&out), "g1^-1*g2");
}

#[test]
fn pow_example_vector_form() {
    let out = polyz(&["pow", "--group", "b1", "[0,1,1]", "2"]);
    assert_eq!(stdout_line(&out), "[-1,2,2]");
}

#[test]
fn classify_rejects_non_automorphism() {
    let out = polyz(&[
        "aut-classify",
        "--group",
        "b1",
        "--matrix",
        "[[1,0,0],[0,2,0],[0,0,1]]",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("not an automorphism"), "stderr: {stderr}");
}

#[test]
fn classify_accepts_family_matrix() {
    let out = polyz(&[
        "aut-classify",
        "--group",
        "b1",
        "--matrix",
        "[[1,0,1],[0,0,1],[0,1,0]]",
    ]);
    assert_eq!(stdout_line(&out), "b1:alpha(a=0; A=[[0,1],[1,0]])");
}

#[test]
fn compose_and_inner_and_out_class() {
    let out = polyz(&["aut-compose", "--group", "g2", "alpha(1)", "alpha(1)"]);
    assert_eq!(stdout_line(&out), "gamma(2)");

    let out = polyz(&["aut-inner", "--group", "g2", "g1"]);
    assert_eq!(stdout_line(&out), "gamma(2)");

    let out = polyz(&["out-class", "--group", "g2", "beta(3)"]);
    assert_eq!(stdout_line(&out), "[beta(1)]");
}

#[test]
fn central_words() {
    let out = polyz(&["central", "--group", "b1", "[0,2,0]"]);
    assert_eq!(stdout_line(&out), "true");
    let out = polyz(&["central", "--group", "a1", "g1"]);
    assert_eq!(stdout_line(&out), "false");
}

/// `collect` output is already in normal form, so collecting it again must
/// return it unchanged.
#[test]
fn collect_is_idempotent_on_random_raw_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0111EC7);
    for group in ["g2", "b1", "a0", "a1", "b0", "zxz"] {
        let n = if group == "g2" || group == "zxz" { 2 } else { 3 };
        for _ in 0..25 {
            let factors: Vec<String> = (0..rng.gen_range(1..=8))
                .map(|_| {
                    format!(
                        "g{}^{}",
                        rng.gen_range(1..=n),
                        rng.gen_range(-9i64..=9).max(1) * if rng.gen() { 1 } else { -1 }
                    )
                })
                .collect();
            let raw = factors.join("*");
            let first = stdout_line(&polyz(&["collect", "--group", group, &raw]));
            let second = stdout_line(&polyz(&["collect", "--group", group, &first]));
            assert_eq!(first, second, "group {group}, raw word {raw}");
        }
    }
}

#[test]
fn usage_errors_exit_2() {
    let out = polyz(&["collect", "g1"]);
    assert_eq!(out.status.code(), Some(2), "missing group selector");

    let out = polyz(&["collect", "--group", "nope", "g1"]);
    assert_eq!(out.status.code(), Some(2), "unknown preset");
    assert!(String::from_utf8_lossy(&out.stderr).contains("available: z, g2, zxz, b1, a0, a1, b0"));

    let out = polyz(&["collect", "--group", "g2", "gX*"]);
    assert_eq!(out.status.code(), Some(2), "malformed word");

    let out = polyz(&["collect", "--group", "g2", "[1,2,3]"]);
    assert_eq!(out.status.code(), Some(2), "wrong arity vector");
}

#[test]
fn presentation_file_selects_group() {
    let path = temp_path("presentation.txt");
    std::fs::write(
        &path,
        "<g1,g2,g3 | g2*g1=g1^-1*g2, g3*g1=g1^-1*g3, g3*g2=g1*g2*g3>",
    )
    .unwrap();
    let out = polyz(&[
        "collect",
        "--presentation",
        path.to_str().unwrap(),
        "g3*g2",
    ]);
    assert_eq!(stdout_line(&out), "g1*g2*g3");
    std::fs::remove_file(&path).ok();
}

#[test]
fn witness_round_trip_verifies() {
    let out = polyz(&["iso-witness", "--group", "g2", "inner-twist", "alpha(1)", "g1"]);
    let witness = stdout_line(&out);
    let path = temp_path("witness.json");
    std::fs::write(&path, &witness).unwrap();

    let out = polyz(&["iso-verify", path.to_str().unwrap()]);
    let report = stdout_line(&out);
    assert!(report.ends_with("PASS"), "report: {report}");

    // corrupt the conjugating element; verification must now fail with exit 1
    let mut v: Value = serde_json::from_str(&witness).unwrap();
    v["element"] = serde_json::json!(["0", "1"]);
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    let out = polyz(&["iso-verify", "--count", "200", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn malformed_witness_is_usage_error() {
    let path = temp_path("garbage.json");
    std::fs::write(&path, "{\"kind\": \"unknown\"}").unwrap();
    let out = polyz(&["iso-verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(&path).ok();
}

#[test]
fn bench_zero_runs_is_empty_report() {
    let out = polyz(&["bench", "--group", "g2", "--count", "0", "pow"]);
    assert_eq!(stdout_line(&out), "bench pow on g2: 0 runs");
}

#[test]
fn bench_times_after_equality_check() {
    let out = polyz(&["bench", "--group", "b1", "--count", "30", "mul"]);
    let report = stdout_line(&out);
    assert!(report.contains("30 runs"), "report: {report}");
    assert!(report.contains("speedup"), "report: {report}");
}

#[test]
fn bench_detects_kernel_mismatch() {
    let out = Command::new(env!("CARGO_BIN_EXE_polyz"))
        .args(["bench", "--group", "g2", "--count", "5", "pow"])
        .env("POLYZ_BENCH_CORRUPT", "1")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("disagree"));
}

#[test]
fn json_envelope_is_schema_stable() {
    let out = polyz(&["pow", "--group", "g2", "--json", "g1*g2", "1000000000000"]);
    let v: Value = serde_json::from_str(&stdout_line(&out)).unwrap();
    assert_eq!(v["schema"], "polyz-cli/1");
    assert_eq!(v["command"], "pow");
    assert_eq!(v["group"], "g2");
    // exponents always travel as decimal strings so arbitrary precision survives
    assert_eq!(v["word"], serde_json::json!(["0", "1000000000000"]));

    let out = polyz(&["out-class", "--group", "g2", "--json", "delta(4)"]);
    let v: Value = serde_json::from_str(&stdout_line(&out)).unwrap();
    assert_eq!(v["class"], "[alpha(0)]");
    assert_eq!(v["inner"], false);
}
