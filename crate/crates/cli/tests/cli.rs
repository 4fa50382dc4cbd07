use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bqldpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bqldpc"))
        .current_dir(data_root())
        .args(args)
        .output()
        .expect("binary runs")
}

fn data_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<String> {
    csv.lines().filter(|l| !l.starts_with('#')).map(str::to_string).collect()
}

const SMALL: &str = r#"{
    "code": { "kind": "xzzx_toric", "n1": 4, "n2": 3 },
    "eta": [0.5, 100],
    "p": [0.08],
    "trials": 3000,
    "min_failures": 20,
    "batch_size": 256,
    "seed": 42,
    "update": "x_to_z"
}"#;

#[test]
fn build_prints_parameters_and_writes_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("xzzx");
    let o = bqldpc(&["build", "--xzzx-toric", "3", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "[[12,2,3]]\n");
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("rotated=sector2"));

    let o = bqldpc(&["params", "--bundle", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("N=12 K=2\n"));
}

#[test]
fn build_from_data_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hgp");
    let o = bqldpc(&["build", "--hgp", "data/mkmn_16_4_6.txt", "data/mkmn_16_4_6.txt", "--max-weight", "2", "--out"]
        .into_iter()
        .chain([out.to_str().unwrap()])
        .collect::<Vec<_>>());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("[[400,16,"), "{}", stdout(&o));
}

#[test]
fn classical_params() {
    let o = bqldpc(&["params", "--matrix", "data/mkmn_16_4_6.txt"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "[16,4,6]\nchecks=12 girth=6\n");
}

#[test]
fn hashing_table() {
    let o = bqldpc(&["hashing", "--eta", "0.5,inf"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "eta,p_hashing\n0.5,0.189290\ninf,0.500000\n");
}

#[test]
fn exit_code_two_on_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        SMALL.replace("\"trials\": 3000", "\"trials\": 0"),
        SMALL.replace("\"seed\": 42", "\"seed\": 42, \"colour\": 1"),
        "not json".to_string(),
    ];
    for (i, text) in cases.iter().enumerate() {
        let path = dir.path().join(format!("c{i}.json"));
        fs::write(&path, text).unwrap();
        let o = bqldpc(&["simulate", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "case {i}");
        assert!(o.stdout.is_empty(), "no rows before validation");
    }
    assert_eq!(bqldpc(&["simulate", "missing.json"]).status.code(), Some(2));

    let proto = dir.path().join("bad.proto");
    fs::write(&proto, "L=5\n(0) (1\n").unwrap();
    let o = bqldpc(&["build", "--lifted-product", proto.to_str().unwrap(), proto.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    assert_eq!(bqldpc(&["build"]).status.code(), Some(2));
    assert_eq!(bqldpc(&["hashing", "--rate", "1"]).status.code(), Some(2));
}

#[test]
fn exit_code_three_on_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    fs::write(&path, SMALL).unwrap();
    let o = bqldpc(&["simulate", path.to_str().unwrap(), "--out", "/nonexistent-dir/out.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    fs::write(&path, SMALL).unwrap();
    let p = path.to_str().unwrap();
    let one = bqldpc(&["--threads", "1", "simulate", p, "--out", "-"]);
    let again = bqldpc(&["--threads", "1", "simulate", p, "--out", "-"]);
    let four = bqldpc(&["--threads", "4", "simulate", p, "--out", "-"]);
    assert!(one.status.success());
    let rows = data_rows(&stdout(&one));
    assert_eq!(rows.len(), 3);
    assert_eq!(stdout(&one), stdout(&again));
    assert_eq!(stdout(&one), stdout(&four));
}

#[test]
fn simulate_resumes_from_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, SMALL.replace("\"update\"", "\"output\": \"out.csv\", \"update\"")).unwrap();
    let o = bqldpc(&["simulate", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = dir.path().join("out.csv");
    let full = fs::read_to_string(&csv).unwrap();

    let cut: Vec<&str> = full.lines().collect();
    fs::write(&csv, format!("{}\n", cut[..cut.len() - 1].join("\n"))).unwrap();
    let o = bqldpc(&["simulate", cfg.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("1 points computed, 1 already present"));
    assert_eq!(fs::read_to_string(&csv).unwrap(), full);
}

#[test]
fn sweep_flags_match_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    fs::write(&path, SMALL).unwrap();
    let from_file = bqldpc(&["simulate", path.to_str().unwrap(), "--out", "-"]);
    let from_flags = bqldpc(&[
        "sweep", "--xzzx-toric", "4", "3", "--eta", "0.5,100", "--p", "0.08", "--trials", "3000", "--min-failures", "20",
        "--batch-size", "256", "--seed", "42", "--update", "x_to_z", "--out", "-",
    ]);
    assert!(from_flags.status.success(), "{}", String::from_utf8_lossy(&from_flags.stderr));
    assert_eq!(stdout(&from_file), stdout(&from_flags));
}
