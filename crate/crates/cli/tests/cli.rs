use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn pcrf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcrf")).args(args).env_remove("PCRF_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn matches_golden(args: &[&str], model: &str, expected: &str) {
    let path = golden(model);
    let mut all = args.to_vec();
    all.insert(1, path.to_str().unwrap());
    let out = pcrf(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let want = std::fs::read_to_string(golden(expected)).unwrap();
    assert_eq!(stdout(&out), want, "{args:?}");
}

#[test]
fn golden_transcripts() {
    matches_golden(&["partition"], "uniform.pcrf", "partition_uniform.out");
    matches_golden(&["map"], "ab.pcrf", "map_ab.out");
    matches_golden(&["check"], "binary.pcrf", "check_binary.out");
    matches_golden(&["sample", "--seed", "7", "--count", "5"], "binary.pcrf", "sample_binary.out");
    matches_golden(&["marginals"], "binary.pcrf", "marginals_binary.out");
}

#[test]
fn uniform_partition_is_eight() {
    let out = stdout(&pcrf(&["partition", golden("uniform.pcrf").to_str().unwrap()]));
    assert!(out.starts_with("result command=partition semiring=sum-product algorithm=alg1 z=8.0000000000000000e0 "));
}

#[test]
fn map_finds_abab() {
    let out = stdout(&pcrf(&["map", golden("ab.pcrf").to_str().unwrap()]));
    assert!(out.contains("energy=-2.0000000000000000e0 labeling=abab"), "{out}");
}

#[test]
fn alg4_and_alg5_agree() {
    let m = golden("binary.pcrf");
    let z = |alg: &str| {
        let out = stdout(&pcrf(&["partition", m.to_str().unwrap(), "--algorithm", alg]));
        out.split_whitespace().find_map(|f| f.strip_prefix("z=")).unwrap().to_string()
    };
    assert_eq!(z("alg4"), z("alg5"));
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let m = golden("binary.pcrf");
    let args = ["sample", m.to_str().unwrap(), "--seed", "11", "--count", "50", "--sampler", "alias"];
    assert_eq!(pcrf(&args).stdout, pcrf(&args).stdout);
    let a = Command::new(env!("CARGO_BIN_EXE_pcrf"))
        .args(["sample", m.to_str().unwrap(), "--count", "50"])
        .env("PCRF_SEED", "11")
        .output()
        .unwrap();
    let b = pcrf(&["sample", m.to_str().unwrap(), "--count", "50", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pcrf"))
        .args(["stats", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"pcrf 1\nalphabet a\nn 1\npattern a 0\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(stdout(&out).contains(" P=1 "));
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir().join(format!("pcrf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.pcrf");
    std::fs::write(&bad, "pcrf 1\nalphabet a b\nn 3\npattern ac 0\n").unwrap();
    let out = pcrf(&["partition", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ac"));

    let out = pcrf(&["partition", golden("ab.pcrf").to_str().unwrap(), "--algorithm", "alg1"]);
    assert_eq!(out.status.code(), Some(1));

    let big = dir.join("big.pcrf");
    std::fs::write(&big, "pcrf 1\nalphabet a b c d\nn 9\npattern a 0\n").unwrap();
    assert_eq!(pcrf(&["check", big.to_str().unwrap()]).status.code(), Some(1));

    assert_eq!(pcrf(&["nonsense", "x"]).status.code(), Some(1));
    assert_eq!(pcrf(&["stats", dir.join("missing").to_str().unwrap()]).status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn closure_warning_on_stderr() {
    let dir = std::env::temp_dir().join(format!("pcrf-warn-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let m = dir.join("m.pcrf");
    std::fs::write(&m, "pcrf 1\nalphabet a b\nn 2\npattern ab -1\n").unwrap();
    let out = pcrf(&["partition", m.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("warning: "));
    assert!(!stdout(&out).contains("warning"));
    std::fs::remove_dir_all(&dir).unwrap();
}
