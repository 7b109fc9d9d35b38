use std::path::Path;
use std::process::{Command, Output};

fn arbiter(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arbiter"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        stdout(out),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn synthetic_corpus_through_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    assert_ok(&arbiter(
        &[
            "synth",
            "--debates",
            "10",
            "--signal",
            "1",
            "--seed",
            "3",
            "--out-dir",
            "corpus",
        ],
        cwd,
    ));

    let out = arbiter(&["validate", "corpus"], cwd);
    assert_ok(&out);
    assert_eq!(stdout(&out).lines().count(), 10);

    let out = arbiter(&["stats", "corpus"], cwd);
    assert_ok(&out);
    assert!(stdout(&out).contains("debates:   10"));

    let out = arbiter(
        &[
            "encode",
            "corpus/syn0000.json",
            "--apx",
            "af.apx",
            "--summary",
        ],
        cwd,
    );
    assert_ok(&out);
    assert!(stdout(&out).starts_with("|A|="));
    let apx = std::fs::read_to_string(cwd.join("af.apx")).unwrap();
    assert!(apx.contains("arg(a0)."));

    for semantics in ["naive", "preferred"] {
        let out = arbiter(
            &["solve", "af.apx", "--semantics", semantics, "--oracle"],
            cwd,
        );
        assert_ok(&out);
        let from_json = arbiter(
            &["solve", "corpus/syn0000.json", "--semantics", semantics],
            cwd,
        );
        assert_eq!(stdout(&out), stdout(&from_json));
    }

    let out = arbiter(
        &[
            "build-samples",
            "--corpus",
            "corpus",
            "--semantics",
            "naive",
            "--embeddings",
            "corpus/embeddings.txt",
            "--out",
            "samples.json",
        ],
        cwd,
    );
    assert_ok(&out);
    std::fs::write(cwd.join("train.toml"), "learning_rate = 0.01\nepochs = 3\n").unwrap();
    assert_ok(&arbiter(
        &[
            "train",
            "--samples",
            "samples.json",
            "--config",
            "train.toml",
            "--out",
            "model.ckpt",
            "--hidden",
            "16",
        ],
        cwd,
    ));
    let out = arbiter(
        &[
            "predict",
            "--model",
            "model.ckpt",
            "--samples",
            "samples.json",
        ],
        cwd,
    );
    assert_ok(&out);
    let text = stdout(&out);
    assert!(text.contains("debate-wise"));
    assert_eq!(text.lines().filter(|l| l.starts_with("syn")).count(), 10);
}

#[test]
fn run_writes_text_and_json_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    std::fs::write(
        cwd.join("experiment.toml"),
        r#"
models = ["random", "naive-atb", "longformer", "naive-gn"]
runs = 2
hidden = 8

[synthetic]
debates = 10
signal = 1.0

[train]
epochs = 2
"#,
    )
    .unwrap();
    let out = arbiter(
        &[
            "run",
            "--config",
            "experiment.toml",
            "--fixed-split",
            "--json",
            "report.json",
        ],
        cwd,
    );
    assert_ok(&out);
    assert!(stdout(&out).contains("Longformer     not implemented"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(cwd.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["config"]["fixed_split"], true);
}

#[test]
fn invalid_input_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    std::fs::write(
        cwd.join("bad.json"),
        r#"{"id":"b","winner":"F","adus":[{"id":"x","text":"t","stance":"F","phase":"arg"}],
            "relations":[{"source":"x","target":"y","kind":"conflict"}]}"#,
    )
    .unwrap();
    let out = arbiter(&["validate", "bad.json"], cwd);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("\"y\""));

    std::fs::write(cwd.join("bad.toml"), "runs = 0\ncorpus = \"c\"\n").unwrap();
    assert_eq!(
        arbiter(&["run", "--config", "bad.toml"], cwd).status.code(),
        Some(2)
    );
}

#[test]
fn corpus_too_small_to_split_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    assert_ok(&arbiter(
        &["synth", "--debates", "2", "--signal", "0", "--out-dir", "c"],
        cwd,
    ));
    std::fs::remove_file(cwd.join("c/syn0001.json")).unwrap();
    std::fs::write(
        cwd.join("exp.toml"),
        "corpus = \"c\"\nmodels = [\"random\"]\n[embeddings]\nsource = \"hash\"\n",
    )
    .unwrap();
    let out = arbiter(&["run", "--config", "exp.toml"], cwd);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.matches("need at least 2 debates").count(), 1, "{err}");
    assert!(err.contains("run 0: split: "), "{err}");
}

#[test]
fn exceeded_extension_cap_exits_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    let mut apx = String::new();
    for i in 0..6 {
        apx.push_str(&format!(
            "arg(p{i}). arg(q{i}). att(p{i},q{i}). att(q{i},p{i}).\n"
        ));
    }
    std::fs::write(cwd.join("big.apx"), apx).unwrap();
    let out = arbiter(
        &[
            "solve",
            "big.apx",
            "--semantics",
            "naive",
            "--max-extensions",
            "10",
        ],
        cwd,
    );
    assert_eq!(out.status.code(), Some(3));
    let out = arbiter(&["solve", "big.apx", "--semantics", "naive"], cwd);
    assert_ok(&out);
    assert_eq!(stdout(&out).lines().count(), 64);
}

#[test]
fn converts_a_spreadsheet() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    std::fs::write(
        cwd.join("d.csv"),
        "ID,PHASE,ADU_CAT,STANCE,RELATED_ID,ARGUMENT_RELATION_TYPE\n\
         1,INTRO,First claim,FAVOUR,2,RA\n\
         2,ARGUMENTATION,Support,FAVOUR,,\n\
         3,ARGUMENTATION,Rebuttal,AGAINST,1,CA\n",
    )
    .unwrap();
    let out = arbiter(
        &[
            "convert", "d.csv", "--id", "d1", "--winner", "A", "--out", "d1.json",
        ],
        cwd,
    );
    assert_ok(&out);
    assert!(stdout(&out).contains("3 ADUs, 2 relations"));
    assert_ok(&arbiter(&["validate", "d1.json"], cwd));
    let out = arbiter(&["encode", "d1.json"], cwd);
    assert!(stdout(&out).contains("|A|=2 |R|=1"));
}
