use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lzlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lzlab")).current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn periodic_lz78_preset_prints_the_phrase_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = lzlab(dir.path(), &["preset", "periodic-lz78", "--out", "t"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let files: Vec<_> = fs::read_dir(dir.path().join("t")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(files.len(), 1);
    let text = fs::read_to_string(dir.path().join("t").join(&files[0])).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# lzlab 0.1.0 config="));
    assert_eq!(lines.next().unwrap(), "phrase,start,length,parent,symbol,word,complete");
    let words: Vec<&str> = lines.map(|l| l.split(',').nth(5).unwrap()).collect();
    assert_eq!(words, ["0", "1", "01", "010", "10", "101", "0101", "01010", "1010", "10101"]);
}

#[test]
fn empty_config_lists_missing_fields() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.toml"), "").unwrap();
    let o = lzlab(dir.path(), &["--config", "empty.toml"]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    for field in ["seed", "output", "experiment"] {
        assert!(err.contains(field), "{err}");
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = "seed = 1\noutput = \"o\"\n[experiment.a]\nkind = \"lz78\"\nlength = 30\nlenght = 4\nsource = { kind = \"periodic\", pattern = [0, 1] }\n";
    fs::write(dir.path().join("typo.toml"), text).unwrap();
    let o = lzlab(dir.path(), &["--config", "typo.toml"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("lenght"), "{}", stderr(&o));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        let o = lzlab(dir.path(), &["--seed", "9", "--out", out, "sweep", "--source", "markov", "--codec", "swlz", "--nw", "16,32", "--seeds", "1,2"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let mut files: Vec<_> = fs::read_dir(dir.path().join(out)).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        files.iter().map(|f| (f.file_name().unwrap().to_owned(), fs::read(f).unwrap())).collect::<Vec<_>>()
    };
    let a = run("a");
    assert_eq!(a.len(), 2);
    assert_eq!(a, run("b"));
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = lzlab(dir.path(), &["--out", "g", "generate", "--source", "markov", "--n", "5000"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let raw = fs::read_dir(dir.path().join("g"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|e| e == "raw"))
        .unwrap();
    let raw = raw.to_str().unwrap();
    for (codec, extra) in [("swlz", vec![]), ("fslz", vec!["--lo-policy", "positive-entropy:0.8813"])] {
        let mut args = vec!["--out", "x.lzlb", "encode", "--input", raw, "--codec", codec, "--nw", "256"];
        args.extend(extra);
        let o = lzlab(dir.path(), &args);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let o = lzlab(dir.path(), &["--out", "back.raw", "decode", "--input", "x.lzlb"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert_eq!(fs::read(dir.path().join("back.raw")).unwrap(), fs::read(raw).unwrap());
    }
}

#[test]
fn corrupt_container_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = lzlab(dir.path(), &["--out", "x.lzlb", "encode", "--source", "coin", "--n", "3000", "--codec", "swlz", "--nw", "64"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut bytes = fs::read(dir.path().join("x.lzlb")).unwrap();
    bytes.truncate(bytes.len() - 50);
    fs::write(dir.path().join("x.lzlb"), &bytes).unwrap();
    let o = lzlab(dir.path(), &["--out", "back.raw", "decode", "--input", "x.lzlb"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn guard_refusal_exits_3_and_removes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = lzlab(dir.path(), &["--out", "l", "ldp", "--source", "coin", "--n-grid", "8,40", "--eps-grid", "0.3", "--trials", "10"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let left = fs::read_dir(dir.path().join("l")).map(|d| d.count()).unwrap_or(0);
    assert_eq!(left, 0);
}

#[test]
fn preset_list_names_every_preset() {
    let dir = tempfile::tempdir().unwrap();
    let o = lzlab(dir.path(), &["preset", "--list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for (name, _) in lzlab::harness::presets::PRESETS {
        assert!(text.contains(name));
    }
    assert_eq!(code(&lzlab(dir.path(), &["preset", "no-such-preset"])), 2);
}
