use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn hdrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdrank"))
        .args(args)
        .output()
        .expect("spawn hdrank")
}

fn ok(args: &[&str]) -> String {
    let out = hdrank(args);
    assert!(
        out.status.success(),
        "hdrank {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn err(args: &[&str]) -> String {
    let out = hdrank(args);
    assert!(!out.status.success(), "hdrank {args:?} unexpectedly succeeded");
    String::from_utf8(out.stderr).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn gen_small(dir: &Path) {
    ok(&[
        "gen-synth",
        "--n-train",
        "60",
        "--n-test",
        "40",
        "--tasks",
        "3",
        "--seed",
        "11",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
}

#[test]
fn gen_synth_is_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    gen_small(a.path());
    gen_small(b.path());
    for f in ["train_archs.csv", "train_ranks.csv", "test_archs.csv", "test_ranks.csv"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    // The manifest records the output directory; everything else must match.
    let manifest = |d: &Path| {
        let mut v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap();
        v["config"]["out_dir"] = serde_json::Value::Null;
        v
    };
    assert_eq!(manifest(a.path()), manifest(b.path()));
    let header = fs::read_to_string(a.path().join("train_ranks.csv")).unwrap();
    assert!(header.starts_with("arch_id,task_1,task_2,task_3\n"));
}

#[test]
fn gen_synth_rejects_single_training_arch() {
    let d = TempDir::new().unwrap();
    let msg = err(&["gen-synth", "--n-train", "1", "--out-dir", d.path().to_str().unwrap()]);
    assert!(msg.starts_with("error[config]"), "{msg}");
}

#[test]
fn refuses_to_overwrite_without_force() {
    let d = TempDir::new().unwrap();
    gen_small(d.path());
    let msg = err(&[
        "gen-synth",
        "--n-train",
        "60",
        "--n-test",
        "40",
        "--tasks",
        "3",
        "--out-dir",
        d.path().to_str().unwrap(),
    ]);
    assert!(msg.starts_with("error[exists]"), "{msg}");
    ok(&[
        "gen-synth",
        "--n-train",
        "60",
        "--n-test",
        "40",
        "--tasks",
        "3",
        "--out-dir",
        d.path().to_str().unwrap(),
        "--force",
    ]);
}

#[test]
fn train_predict_eval_pipeline() {
    let d = TempDir::new().unwrap();
    let dir = d.path();
    gen_small(dir);
    let model = p(dir, "model.bin");
    let trained = ok(&[
        "train",
        "--archs",
        &p(dir, "train_archs.csv"),
        "--ranks",
        &p(dir, "train_ranks.csv"),
        "--out",
        &model,
        "--dim",
        "2000",
    ]);
    assert!(trained.contains("epoch  1"), "{trained}");

    let pred = p(dir, "pred.csv");
    let sims = p(dir, "sims.csv");
    ok(&[
        "predict",
        "--model",
        &model,
        "--archs",
        &p(dir, "test_archs.csv"),
        "--out",
        &pred,
        "--emit-sims",
        &sims,
    ]);
    assert!(dir.join("pred.csv.meta.json").exists());
    let pred_text = fs::read_to_string(&pred).unwrap();
    assert_eq!(pred_text.lines().count(), 41);
    assert_eq!(fs::read_to_string(&sims).unwrap().lines().count(), 41);

    let report = p(dir, "tau.csv");
    let json = p(dir, "tau.json");
    let table = ok(&[
        "eval",
        "--pred",
        &pred,
        "--truth",
        &p(dir, "test_ranks.csv"),
        "--out",
        &report,
        "--json",
        &json,
        "--baseline-trials",
        "20",
    ]);
    assert!(table.contains("Average"), "{table}");
    assert!(table.contains("random baseline over 20 trials"), "{table}");
    let csv = fs::read_to_string(&report).unwrap();
    assert!(csv.starts_with("task,tau\n"));
    assert!(csv.lines().last().unwrap().starts_with("average,"));
    assert!(dir.join("tau.csv.meta.json").exists());
    let parsed: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(parsed["baseline"]["trials"], 20);
}

#[test]
fn eval_of_truth_against_itself_is_one() {
    let d = TempDir::new().unwrap();
    gen_small(d.path());
    let truth = p(d.path(), "test_ranks.csv");
    let out = p(d.path(), "tau.csv");
    ok(&["eval", "--pred", &truth, "--truth", &truth, "--out", &out]);
    for line in fs::read_to_string(&out).unwrap().lines().skip(1) {
        let tau: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(tau, 1.0, "{line}");
    }
}

#[test]
fn empty_arch_file_predicts_header_only() {
    let d = TempDir::new().unwrap();
    let dir = d.path();
    gen_small(dir);
    let model = p(dir, "model.bin");
    ok(&[
        "train",
        "--archs",
        &p(dir, "train_archs.csv"),
        "--ranks",
        &p(dir, "train_ranks.csv"),
        "--out",
        &model,
        "--dim",
        "256",
        "--no-retrain",
    ]);
    let header = fs::read_to_string(dir.join("test_archs.csv"))
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    fs::write(dir.join("empty.csv"), header + "\n").unwrap();
    let pred = p(dir, "pred.csv");
    ok(&[
        "predict",
        "--model",
        &model,
        "--archs",
        &p(dir, "empty.csv"),
        "--out",
        &pred,
    ]);
    assert_eq!(fs::read_to_string(&pred).unwrap(), "arch_id,task_1,task_2,task_3\n");
}

#[test]
fn sweep_writes_one_row_per_dim() {
    let d = TempDir::new().unwrap();
    gen_small(d.path());
    let out = p(d.path(), "sweep.csv");
    ok(&[
        "sweep",
        "--dims",
        "512,128,256",
        "--data-dir",
        d.path().to_str().unwrap(),
        "--out",
        &out,
        "--threads",
        "1",
    ]);
    assert!(d.path().join("sweep.csv.meta.json").exists());
    let text = fs::read_to_string(&out).unwrap();
    let dims: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(dims, ["128", "256", "512"]);
}

#[test]
fn errors_are_categorized() {
    let d = TempDir::new().unwrap();
    let dir = d.path();
    let missing = p(dir, "nope.csv");
    let msg = err(&[
        "train",
        "--archs",
        &missing,
        "--ranks",
        &missing,
        "--out",
        &p(dir, "m.bin"),
    ]);
    assert!(msg.starts_with("error[io]"), "{msg}");

    fs::write(dir.join("bad.csv"), "arch_id,depth\nx,10\n").unwrap();
    let msg = err(&[
        "train",
        "--archs",
        &p(dir, "bad.csv"),
        "--ranks",
        &missing,
        "--out",
        &p(dir, "m.bin"),
    ]);
    assert!(
        msg.starts_with("error[parse]") || msg.starts_with("error[format]"),
        "{msg}"
    );

    let msg = err(&[
        "train",
        "--archs",
        &missing,
        "--ranks",
        &missing,
        "--out",
        &p(dir, "m.bin"),
        "--dim",
        "0",
    ]);
    assert!(msg.starts_with("error[dimension]"), "{msg}");

    fs::write(dir.join("junk.bin"), b"not a model").unwrap();
    let msg = err(&[
        "predict",
        "--model",
        &p(dir, "junk.bin"),
        "--archs",
        &missing,
        "--out",
        &p(dir, "o.csv"),
    ]);
    assert!(msg.starts_with("error[format]"), "{msg}");
}
