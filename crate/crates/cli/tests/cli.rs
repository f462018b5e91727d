use std::path::{Path, PathBuf};
use std::process::{Command, Output};

struct Fixture {
    _dir: tempfile::TempDir,
    src: PathBuf,
    out: PathBuf,
}

fn memepop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memepop")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixture(posts: usize) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src");
    let out = dir.path().join("out");
    let o = memepop(&["synth", s(&src), "--posts", &posts.to_string()]);
    assert!(o.status.success());
    Fixture { _dir: dir, src, out }
}

impl Fixture {
    fn run(&self, cmd: &[&str], extra: &[&str]) -> Output {
        let archive = self.src.join("archive.jsonl");
        let images = self.src.join("images");
        let ann = self.src.join("annotations.csv");
        let mut args: Vec<&str> = cmd.to_vec();
        args.extend([
            "--seed",
            "5",
            "--output-dir",
            s(&self.out),
            "--archive",
            s(&archive),
            "--images-dir",
            s(&images),
            "--annotations",
            s(&ann),
            "--label-quantile",
            "0.8",
            "--n-trees",
            "20",
        ]);
        args.extend(extra);
        memepop(&args)
    }

    fn ok(&self, cmd: &[&str]) -> String {
        let o = self.run(cmd, &[]);
        assert!(o.status.success(), "{cmd:?}: {}", String::from_utf8_lossy(&o.stderr));
        String::from_utf8(o.stdout).unwrap()
    }

    fn read(&self, name: &str) -> Vec<u8> {
        std::fs::read(self.out.join(name)).unwrap()
    }
}

#[test]
fn ingest_writes_corpus_and_reports_counts() {
    let f = fixture(150);
    let stdout = f.ok(&["ingest"]);
    assert!(stdout.contains("records=144"), "{stdout}");
    assert!(f.out.join("corpus.jsonl").is_file());
    let stats: serde_json::Value = serde_json::from_slice(&f.read("corpus_stats.json")).unwrap();
    assert_eq!(stats["records"], 144);
}

#[test]
fn ingest_rerun_is_byte_identical() {
    let f = fixture(150);
    f.ok(&["ingest"]);
    let first = f.read("corpus.jsonl");
    f.ok(&["ingest"]);
    assert_eq!(first, f.read("corpus.jsonl"));
}

#[test]
fn missing_archive_is_a_config_error_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = memepop(&["ingest", "--seed", "1", "--output-dir", s(dir.path()), "--archive", "/no/such/archive.jsonl"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/no/such/archive.jsonl"));
}

#[test]
fn seed_is_mandatory() {
    let o = memepop(&["train", "--output-dir", "/tmp"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
}

#[test]
fn unusable_archive_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let archive = dir.path().join("a.jsonl");
    std::fs::write(&archive, "{\"id\": 1}\nnot json\n").unwrap();
    let o = memepop(&["ingest", "--seed", "1", "--output-dir", s(dir.path()), "--archive", s(&archive)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn featurize_excludes_undecodable_images_and_registers_columns() {
    let f = fixture(150);
    f.ok(&["ingest"]);
    let o = f.run(&["featurize"], &[]);
    assert!(o.status.success());
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("excluding s00043") && stderr.contains("undecodable"), "{stderr}");
    let manifest: serde_json::Value = serde_json::from_slice(&f.read("features.manifest.json")).unwrap();
    let blocks: Vec<&str> =
        manifest["registry"]["columns"].as_array().unwrap().iter().map(|c| c["block"].as_str().unwrap()).collect();
    assert_eq!(blocks.iter().filter(|b| **b == "text").count(), 38);
    assert_eq!(blocks.iter().filter(|b| **b == "image").count(), 53);
    assert!(manifest["excluded"].as_array().unwrap().iter().any(|x| x["id"] == "s00043"));

    let features = f.read("features.csv");
    f.ok(&["featurize"]);
    assert_eq!(features, f.read("features.csv"));
}

#[test]
fn training_twice_gives_identical_models_and_reports() {
    let f = fixture(200);
    f.ok(&["ingest"]);
    f.ok(&["featurize"]);
    f.ok(&["train"]);
    let model = f.read("model.json");
    f.ok(&["train"]);
    assert_eq!(model, f.read("model.json"));
    let stdout = f.ok(&["evaluate"]);
    assert!(stdout.contains("auc="), "{stdout}");
    assert!(f.out.join("evaluate.report.json").is_file());
    assert!(f.out.join("evaluate.roc.csv").is_file());
}

#[test]
fn incremental_experiment_writes_four_reports() {
    let f = fixture(200);
    f.ok(&["ingest"]);
    f.ok(&["featurize"]);
    f.ok(&["experiment", "incremental"]);
    let reports = std::fs::read_dir(&f.out)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".report.json"))
        .count();
    assert_eq!(reports, 4);
    let stdout = f.ok(&["report"]);
    assert_eq!(stdout.lines().count(), 4);
    assert!(f.out.join("summary.csv").is_file());
}

#[test]
fn external_scores_with_mismatched_ids_fail() {
    let f = fixture(200);
    f.ok(&["ingest"]);
    f.ok(&["featurize"]);
    f.ok(&["train"]);
    let scores = f.src.join("scores.csv");
    std::fs::write(&scores, "post_id,score\nnot_an_id,0.4\n").unwrap();
    let o = f.run(&["experiment", "external"], &["--scores", s(&scores)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no external score"));
}

#[test]
fn flags_override_config_file_values() {
    let f = fixture(150);
    let cfg = f.src.join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "seed = 1\noutput_dir = \"{}\"\narchive = \"archive.jsonl\"\nimages_dir = \"images\"\nlabel_quantile = 0.8\n\n[forest]\nn_trees = 10\n",
            s(&f.out)
        ),
    )
    .unwrap();
    let run = |extra: &[&str]| {
        for cmd in ["ingest", "featurize", "train"] {
            let mut args = vec![cmd, "--config", s(&cfg)];
            args.extend(extra);
            let o = memepop(&args);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        }
        serde_json::from_slice::<serde_json::Value>(&std::fs::read(f.out.join("model.json")).unwrap()).unwrap()
    };
    let from_file = run(&[]);
    assert_eq!(from_file["config"]["seed"], 1);
    assert_eq!(from_file["model"]["trees"].as_array().unwrap().len(), 10);
    let overridden = run(&["--seed", "9", "--n-trees", "4"]);
    assert_eq!(overridden["config"]["seed"], 9);
    assert_eq!(overridden["model"]["trees"].as_array().unwrap().len(), 4);
}

#[test]
fn malformed_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "seed = 1\nnot_a_field = true\n").unwrap();
    let o = memepop(&["ingest", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn environment_is_not_consulted() {
    let f = fixture(60);
    f.ok(&["ingest"]);
    let o = Command::new(env!("CARGO_BIN_EXE_memepop"))
        .env("RUST_LOG", "off")
        .args(["featurize", "--seed", "5", "--output-dir", s(&f.out), "--images-dir", s(&f.src.join("images"))])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("excluding"));
}
