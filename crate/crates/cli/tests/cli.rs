use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

fn nodal(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nodal")).args(args).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap(), text)
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let common = ["--out", out, "--no-plot"];
    let run = |extra: &[&str]| nodal(&[extra, &common[..]].concat());

    assert_eq!(nodal(&["--help"]).0, 0);
    assert_eq!(run(&["curvature", "--preset", "torus-mix", "--N", "200"]).0, 0);
    assert_eq!(run(&["unimodal", "--measure", "mu", "--N", "1e6", "--bins", "32"]).0, 0);
    let (code, text) = run(&["unimodal", "--measure", "sigma", "--N", "1e6", "--bins", "32"]);
    assert_eq!(code, 1, "{text}");
    assert!(text.contains("FAIL"), "{text}");
    // Monotonicity needs a harmonic polynomial.
    assert_eq!(run(&["monotone", "--preset", "torus-sin"]).0, 2);
    assert_eq!(run(&["monotone", "--rgrid", "1.0:0.5:0.1"]).0, 2);
    assert_eq!(run(&["density", "--preset", "no-such-preset"]).0, 2);
    assert_eq!(run(&["density", "--workers", "0"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
}

#[test]
fn reports_carry_the_config_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let (code, text) = nodal(&["density", "--N", "1e5", "--bins", "16", "--out", out]);
    assert_eq!(code, 0, "{text}");
    let files = tree(tmp.path());
    let json = files.iter().find(|(k, _)| k.ends_with(".json")).expect("json report").1;
    let v: serde_json::Value = serde_json::from_slice(json).unwrap();
    let hash = v["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    for (name, bytes) in &files {
        let text = String::from_utf8_lossy(bytes);
        assert!(text.contains(hash), "{name} lacks the hash");
    }
    assert!(files.keys().any(|k| k.ends_with(".csv")));
    assert!(files.keys().any(|k| k.ends_with(".svg")));
}

#[test]
fn output_is_independent_of_worker_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, workers) in [(&a, "1"), (&b, "3")] {
        let out = dir.path().to_str().unwrap();
        for cmd in [
            &["density", "--N", "2e5", "--bins", "16"][..],
            &["divergence", "--N", "2e5"][..],
            &["sphere", "--N", "1e5", "--egrid", "0.2:0.8:0.2"][..],
        ] {
            let (code, text) = nodal(&[cmd, &["--seed", "9", "--workers", workers, "--out", out][..]].concat());
            assert_eq!(code, 0, "{text}");
        }
    }
    let (ta, tb) = (tree(a.path()), tree(b.path()));
    assert!(!ta.is_empty());
    assert_eq!(ta.keys().collect::<Vec<_>>(), tb.keys().collect::<Vec<_>>());
    for (name, bytes) in &ta {
        assert!(bytes == &tb[name], "{name} differs");
    }
}
