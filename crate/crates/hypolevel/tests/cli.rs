//! End-to-end tests of the binary: exit codes, determinism of written
//! artifacts, and output hygiene.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypolevel"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn hypolevel")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hypolevel-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn eval_prints_quantities() {
    let out = run(&["eval", "--map", "z^2", "--at", "0.5"]);
    assert_eq!(code(&out), 0, "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("f(z)   = 0.25"), "{text}");
    assert!(text.contains("f'(z)"), "{text}");
    assert!(text.contains("nu_f"), "{text}");
}

#[test]
fn parse_errors_exit_2() {
    assert_eq!(code(&run(&["eval", "--map", "z +", "--at", "0"])), 2);
    assert_eq!(code(&run(&["eval", "--map", "z^2", "--at", "nonsense"])), 2);
    // a map that is not a self-map of the disk is rejected up front
    assert_eq!(code(&run(&["eval", "--map", "2*z", "--at", "0.1"])), 2);
    // pole inside the disk
    assert_eq!(code(&run(&["levelset", "--map", "z/(1 - 2*z)", "--omega", "1.5"])), 2);
    assert_eq!(code(&run(&["verify", "no-such-suite"])), 2);
}

#[test]
fn empty_region_exits_3() {
    // |f(0)| = 0 <= tanh(1), so D_{-2}(z) is empty
    let out = run(&["levelset", "--map", "z", "--dmu=-2"]);
    assert_eq!(code(&out), 3, "{out:?}");
    let out = run(&["convexity", "--map", "z", "--dmu=-2", "--pairs", "10"]);
    assert_eq!(code(&out), 3, "{out:?}");
}

#[test]
fn convexity_violation_exits_4() {
    let out = run(&[
        "convexity",
        "--map",
        "aut(-0.5, 0)",
        "--omega",
        "0.8",
        "--pairs",
        "300",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&out), 4, "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"verdict\": \"violated\""), "{text}");

    // a theorem configuration exits 0
    let out = run(&[
        "convexity", "--map", "z^2", "--omega", "1.5", "--pairs", "100", "--seed", "7",
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
}

#[test]
fn levelset_artifacts_are_deterministic_and_complete() {
    let dir = temp_dir("levelset");
    let json1 = dir.join("region1.json");
    let json2 = dir.join("region2.json");
    let svg = dir.join("region.svg");
    let csv = dir.join("region.csv");
    for json in [&json1, &json2] {
        let out = run(&[
            "levelset",
            "--map",
            "z^2",
            "--omega",
            "1.5",
            "--resolution",
            "128",
            "--out",
            json.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{out:?}");
    }
    let (a, b) = (std::fs::read(&json1).unwrap(), std::fs::read(&json2).unwrap());
    assert_eq!(a, b, "level-set JSON differs between identical runs");
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("\"schema\": \"hypolevel-region/1\""), "{text}");
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("x,y\n"));
    // atomic writes leave no temporaries behind
    for entry in std::fs::read_dir(&dir).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        assert!(!name.ends_with(".tmp"), "leftover temporary {name}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn render_consumes_region_and_report() {
    let dir = temp_dir("render");
    let region = dir.join("region.json");
    let report = dir.join("report.json");
    let svg = dir.join("out.svg");
    let out = run(&[
        "levelset",
        "--map",
        "aut(-0.5, 0)",
        "--omega",
        "0.8",
        "--resolution",
        "128",
        "--out",
        region.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let out = run(&[
        "convexity",
        "--map",
        "aut(-0.5, 0)",
        "--omega",
        "0.8",
        "--pairs",
        "300",
        "--seed",
        "7",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "{out:?}");
    let out = run(&[
        "render",
        "--region",
        region.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains("<svg") && text.contains("circle"), "{text}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_writes_numbered_frames() {
    let dir = temp_dir("sweep");
    let out = run(&[
        "sweep",
        "--map",
        "z^2",
        "--family",
        "omega",
        "--from",
        "1.2",
        "--to",
        "1.8",
        "--steps",
        "3",
        "--resolution",
        "64",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    for k in 0..3 {
        assert!(dir.join(format!("frame_{k:04}.json")).exists());
        assert!(dir.join(format!("frame_{k:04}.svg")).exists());
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_list_and_config_file() {
    let out = run(&["verify", "--list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 10, "{text}");
    assert!(text.contains("theorem31"), "{text}");

    // config file supplies defaults; flags win
    let dir = temp_dir("config");
    let cfg = dir.join("hypolevel.conf");
    std::fs::write(&cfg, "map = z^2\nat = 0.5\n# comment\n").unwrap();
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "eval"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(String::from_utf8(out.stdout).unwrap().contains("f(z)   = 0.25"));
    std::fs::remove_dir_all(&dir).ok();
}
