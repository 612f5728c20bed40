use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gensym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gensym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn model(dir: &Path, prefix: &str, args: &[&str]) {
    let out_prefix = path(dir, prefix);
    let mut all = vec!["model"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out-prefix", &out_prefix]);
    let o = gensym(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn read_json(p: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn angular_model_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    model(dir.path(), "a_", &["angular", "--l", "1", "--en", "-0.5", "--g", "0.1"]);
    for f in ["a_H.json", "a_M.json", "a_R.json", "a_meta.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let h = read_json(&path(dir.path(), "a_H.json"));
    assert_eq!(h["dim"], 3);
    let out = path(dir.path(), "report.json");
    let o = gensym(&[
        "analyze",
        "--hamiltonian",
        &path(dir.path(), "a_H.json"),
        "--symmetry",
        &path(dir.path(), "a_M.json"),
        "--require",
        "--out",
        &out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = read_json(&out);
    assert_eq!(rep["detection"]["kind"], "Case2");
    let sizes: Vec<usize> = rep["multiplets"]["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["members"].as_array().unwrap().len())
        .collect();
    let mut sorted = sizes.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, vec![1, 2]);
    assert_eq!(rep["stability"]["counts"]["case1"], 1);
    assert_eq!(rep["stability"]["counts"]["case5"], 2);
    assert_eq!(rep["spectrum"].as_array().unwrap().len(), 3);
}

#[test]
fn model_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    model(
        dir.path(),
        "jc_",
        &["jc", "--omega", "1", "--omega0", "1.3", "--kappa", "0.2", "--cutoff", "16"],
    );
    assert_eq!(read_json(&path(dir.path(), "jc_H.json"))["dim"], 34);
    assert!(dir.path().join("jc_M_exc.json").exists());
    model(dir.path(), "hc_", &["hardcore", "--sites", "6", "--z", "0.1+0.05i"]);
    assert_eq!(read_json(&path(dir.path(), "hc_M.json"))["dim"], 64);
    let meta = read_json(&path(dir.path(), "hc_meta.json"));
    assert_eq!(meta["known_gamma"][0], -1.0);
}

#[test]
fn random_pair_fails_require() {
    let dir = tempfile::tempdir().unwrap();
    model(dir.path(), "p1_", &["projection", "--dim", "8", "--seed", "1"]);
    model(dir.path(), "p2_", &["projection", "--dim", "8", "--seed", "2"]);
    let args = [
        "analyze",
        "--hamiltonian",
        &path(dir.path(), "p1_H.json"),
        "--symmetry",
        &path(dir.path(), "p2_H.json"),
    ];
    let o = gensym(&args);
    assert_eq!(o.status.code(), Some(0));
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["detection"]["kind"], "NoGenSym");
    let mut with_require = args.to_vec();
    with_require.push("--require");
    assert_eq!(gensym(&with_require).status.code(), Some(1));
}

#[test]
fn projection_pair_is_case2() {
    let dir = tempfile::tempdir().unwrap();
    model(dir.path(), "p_", &["projection", "--dim", "6", "--seed", "4"]);
    let o = gensym(&[
        "analyze",
        "--hamiltonian",
        &path(dir.path(), "p_H.json"),
        "--symmetry",
        &path(dir.path(), "p_M.json"),
    ]);
    assert!(o.status.success());
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["detection"]["kind"], "Case2");
    assert!(rep["multiplets"].is_object());
}

#[test]
fn input_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.json");
    std::fs::write(&bad, r#"{"dim":2,"entries":[[[0,0],[0,0],[0,0]]]}"#).unwrap();
    let o = gensym(&["analyze", "--hamiltonian", &bad, "--symmetry", &bad]);
    assert_eq!(o.status.code(), Some(3));
    let missing = path(dir.path(), "missing.json");
    let o = gensym(&["analyze", "--hamiltonian", &missing, "--symmetry", &missing]);
    assert_eq!(o.status.code(), Some(3));
    let o = gensym(&["model", "nope", "--out-prefix", &path(dir.path(), "x")]);
    assert_eq!(o.status.code(), Some(3));
    let o = gensym(&[
        "sweep", "--model", "angular", "--l", "1", "--en", "0", "--g", "0.1", "--param", "g", "--from", "abc",
        "--to", "1", "--steps", "3",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sweep_csv_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = path(dir.path(), name);
        let o = gensym(&[
            "sweep", "--model", "angular", "--l", "1", "--en", "-0.5", "--g", "0.1", "--param", "g", "--from", "0",
            "--to", "0.5", "--steps", "6", "--out", &out,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("s1.csv");
    let b = run("s2.csv");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next(), Some("param,index,eigenvalue,multiplet_class"));
    assert_eq!(text.lines().count(), 19);
}
