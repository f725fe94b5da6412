use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use chatsat::chatlog::read_corpus;
use chatsat::eval::{compute_metrics, read_calls, Metrics};

const SMALL: [&str; 10] = [
    "--set",
    "model.hidden_dim=12",
    "--set",
    "model.embed_dim=6",
    "--set",
    "model.max_len=150",
    "--set",
    "model.max_epochs=4",
    "--set",
    "forest.n_trees=20",
];

fn chatsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chatsat")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = chatsat(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn generate(dir: &Path) -> String {
    ok(&["--out", p(dir), "--seed", "5", "--set", "gen.n_sessions=400", "--set", "gen.labeled_fraction=0.5", "generate"]);
    dir.join("corpus.jsonl").to_str().unwrap().to_string()
}

fn train(corpus: &str, out: &Path, methods: &str) {
    let mut args: Vec<&str> = SMALL.to_vec();
    let m = format!("methods={methods}");
    args.extend(["--seed", "5", "--set", &m, "--out", p(out), "train", corpus]);
    ok(&args);
}

#[test]
fn generate_is_deterministic() {
    let t = tempfile::tempdir().unwrap();
    let a = generate(&t.path().join("a"));
    let b = generate(&t.path().join("b"));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    for f in ["ground_truth.json", "run.cfg"] {
        assert_eq!(fs::read(t.path().join("a").join(f)).unwrap(), fs::read(t.path().join("b").join(f)).unwrap());
    }
}

#[test]
fn train_and_evaluate_all_methods_reproducibly() {
    let t = tempfile::tempdir().unwrap();
    let corpus = generate(&t.path().join("g"));
    let (m1, m2) = (t.path().join("m1"), t.path().join("m2"));
    train(&corpus, &m1, "all");
    train(&corpus, &m2, "all");
    let mut names: Vec<String> = fs::read_dir(&m1).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names.iter().filter(|n| n.ends_with(".model")).count(), 8);
    for n in &names {
        assert_eq!(fs::read(m1.join(n)).unwrap(), fs::read(m2.join(n)).unwrap(), "{n} differs");
    }

    let mut reports = Vec::new();
    for e in ["e1", "e2"] {
        let mut args: Vec<&str> = SMALL.to_vec();
        let out = t.path().join(e);
        args.extend(["--out", p(&out), "evaluate", "--models", p(&m1), &corpus]);
        let table = ok(&args);
        reports.push((table, fs::read(out.join("report.json")).unwrap()));
    }
    assert_eq!(reports[0], reports[1]);
    let table = &reports[0].0;
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 9, "{table}");
    assert_eq!(lines[0].split_whitespace().collect::<Vec<_>>(), ["Method", "Accuracy", "Precision", "Recall", "F1"]);
    let methods: Vec<&str> = lines[1..].iter().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(methods, ["Valence", "Ngram", "RNN", "LSTM", "GRU", "RNN-Time", "LSTM-Time", "GRU-Time"]);
    for l in &lines[1..] {
        assert_eq!(l.split_whitespace().count(), 5);
    }
}

#[test]
fn infer_on_training_corpus_matches_recorded_metrics() {
    let t = tempfile::tempdir().unwrap();
    let corpus = generate(&t.path().join("g"));
    let m = t.path().join("m");
    train(&corpus, &m, "lstm_time,ngram");
    let recorded: BTreeMap<String, Metrics> =
        serde_json::from_str(&fs::read_to_string(m.join("train_metrics.json")).unwrap()).unwrap();
    let sessions = read_corpus(Path::new(&corpus)).unwrap();
    for slug in ["lstm_time", "ngram"] {
        let out = t.path().join(format!("i_{slug}"));
        let model = m.join(format!("{slug}.model"));
        ok(&["--out", p(&out), "infer", "--model", p(&model), &corpus]);
        let calls = read_calls(fs::read(out.join("calls.tsv")).unwrap().as_slice()).unwrap();
        assert_eq!(calls.len(), sessions.len());
        let by_id: BTreeMap<&str, u8> = calls.iter().map(|c| (c.session_id.as_str(), c.call)).collect();
        let (pred, truth): (Vec<u8>, Vec<u8>) =
            sessions.labeled().map(|s| (by_id[s.id()], s.label().unwrap())).unzip();
        let got = compute_metrics(&pred, &truth).unwrap();
        let want = &recorded[slug];
        assert_eq!((got.tp, got.fp, got.tn, got.fn_), (want.tp, want.fp, want.tn, want.fn_), "{slug}");
        assert!((got.f1 - want.f1).abs() < 1e-12);
    }

    let b = t.path().join("b");
    let calls = t.path().join("i_lstm_time").join("calls.tsv");
    let text = ok(&["--out", p(&b), "bias-report", "--calls", p(&calls), &corpus]);
    assert!(text.contains("Unlabeled"));
    assert!(fs::read_to_string(b.join("bias.svg")).unwrap().starts_with("<svg"));
    let again = t.path().join("b2");
    ok(&["--out", p(&again), "bias-report", "--calls", p(&calls), &corpus]);
    assert_eq!(fs::read(b.join("bias.json")).unwrap(), fs::read(again.join("bias.json")).unwrap());
}

#[test]
fn fingerprint_drift_is_rejected() {
    let t = tempfile::tempdir().unwrap();
    let corpus = generate(&t.path().join("g"));
    let m = t.path().join("m");
    train(&corpus, &m, "lstm");
    let mut c = chatsat::container::Container::load(&m.join("lstm.model")).unwrap();
    let vocab = c.texts.get_mut("attach.vocab").unwrap();
    *vocab = vocab.replace("# min_frequency 5", "# min_frequency 4");
    c.save(&m.join("lstm.model")).unwrap();
    let out = chatsat(&["infer", "--model", p(&m.join("lstm.model")), &corpus]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error: fingerprint_mismatch: "), "{err}");
}

#[test]
fn gradcheck_passes_with_defaults() {
    let text = ok(&["gradcheck"]);
    assert!(text.ends_with("PASS\n"), "{text}");
    let line = text.lines().find(|l| l.starts_with("max relative error")).unwrap();
    let v: f64 = line.split_whitespace().nth(3).unwrap().parse().unwrap();
    assert!(v < 1e-4);
}

#[test]
fn errors_are_one_line_and_nonzero() {
    let t = tempfile::tempdir().unwrap();
    let empty = t.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let out = chatsat(&["stats", p(&empty)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error: invalid_input: "), "{err}");

    let out_dir = t.path().join("never");
    let out = chatsat(&["--set", "model.hidden_dimm=3", "--out", p(&out_dir), "gradcheck"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error: config: "));
    assert!(!out_dir.exists(), "no output before config validation");

    let out = chatsat(&["train", p(&empty)]);
    assert_eq!(out.status.code(), Some(2), "train without --out");
}
