use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn jobs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("jobs")
}

fn run(args: &[&str], job: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bockstein")).args(args).arg(job).output().unwrap()
}

fn write_job(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn sample_jobs_pass() {
    let cases: [(&[&str], &str); 12] = [
        (&["cohomology"], "cohomology_z3"),
        (&["cup"], "cup_z3sq"),
        (&["bockstein"], "bockstein_z9"),
        (&["massey"], "massey_z3sq"),
        (&["galois-type"], "galois_z9"),
        (&["triple-vanish"], "triple_zero"),
        (&["triple-vanish"], "triple_obstructed"),
        (&["verify", "cyclic"], "verify_cyclic_z9"),
        (&["verify", "bicyclic"], "verify_bicyclic"),
        (&["verify", "heisenberg"], "verify_heisenberg"),
        (&["verify", "connecting"], "verify_connecting"),
        (&["verify", "bocklemma"], "verify_bocklemma"),
    ];
    for (args, name) in cases {
        let out = run(args, &jobs().join(format!("{name}.toml")));
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(report(&out)["pass"], true, "{name}");
    }
}

#[test]
fn triple_vanish_reports_status() {
    let zero = report(&run(&["triple-vanish"], &jobs().join("triple_zero.toml")));
    assert_eq!(zero["result"]["solution"]["status"], "Solved");
    let obstructed = report(&run(&["triple-vanish"], &jobs().join("triple_obstructed.toml")));
    assert_eq!(obstructed["result"]["solution"]["status"], "Obstructed");
}

#[test]
fn malformed_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = [
        write_job(&dir, "syntax.toml", "group = { kind = \"cyclic\", orders = [3\n"),
        write_job(&dir, "unknown.toml", "group = { kind = \"cyclic\", orders = [3] }\ncolour = 1\n"),
        write_job(&dir, "prime.toml", "group = { kind = \"cyclic\", orders = [4] }\nring = { p = 3 }\n"),
        dir.path().join("missing.toml"),
    ];
    for job in &bad {
        assert_eq!(run(&["cohomology"], job).status.code(), Some(3), "{}", job.display());
    }
}

#[test]
fn unsupported_degree_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(&dir, "h4.toml", "group = { kind = \"heisenberg\", q = 3 }\nring = { p = 3 }\nn = 4\n");
    assert_eq!(run(&["verify", "heisenberg"], &job).status.code(), Some(2));
}

#[test]
fn literal_heisenberg_claim_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(jobs().join("verify_heisenberg.toml")).unwrap() + "literal = true\n";
    let job = write_job(&dir, "literal.toml", &text);
    let out = run(&["verify", "heisenberg"], &job);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["pass"], false);
    assert_eq!(r["result"]["reports"][0]["evaluation"][2][2], -1);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let job = jobs().join("verify_bicyclic.toml");
    let first = run(&["verify", "bicyclic"], &job).stdout;
    let second = run(&["verify", "bicyclic"], &job).stdout;
    assert_eq!(first, second);
    let path = dir.path().join("out.json");
    let out = run(&["--out", path.to_str().unwrap(), "verify", "bicyclic"], &job);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn timings_only_on_request() {
    let job = jobs().join("cohomology_z3.toml");
    assert!(report(&run(&["cohomology"], &job)).get("seconds").is_none());
    assert!(report(&run(&["--timings", "cohomology"], &job))["seconds"].is_number());
}
