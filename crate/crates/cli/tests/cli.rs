use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use eventweave::corpus::{write_conllu, Corpus};
use eventweave::synth::{memorization_corpus, synth_corpus, SynthConfig};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn lexicon_args() -> Vec<String> {
    let f = fixtures();
    vec![
        "--wordnet".into(),
        f.join("wordnet").display().to_string(),
        "--verbnet".into(),
        f.join("verbnet").display().to_string(),
    ]
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eventweave"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(!out.status.success(), "{args:?} should fail");
    String::from_utf8(out.stderr).unwrap()
}

fn write_corpus(dir: &Path, name: &str, corpus: &Corpus) {
    std::fs::write(dir.join(name), write_conllu(corpus)).unwrap();
}

#[test]
fn ingest_writes_corpus_and_split() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::create_dir(d.join("in")).unwrap();
    let corpus = synth_corpus(&SynthConfig { stories: 20, seed: 4, ..Default::default() });
    let (a, b) = corpus.stories.split_at(12);
    write_corpus(&d.join("in"), "a.conllu", &Corpus::new(a.to_vec()).unwrap());
    write_corpus(&d.join("in"), "b.conllu", &Corpus::new(b.to_vec()).unwrap());
    std::fs::write(d.join("in/notes.txt"), "ignored").unwrap();

    let stdout = ok(d, &["ingest", "--input", "in", "--out", "c.bin", "--seed", "7"]);
    assert!(stdout.starts_with("20 stories"), "{stdout}");
    let loaded = Corpus::load(d.join("c.bin")).unwrap();
    assert_eq!(loaded.len(), 20);
    let parts: usize = ["train", "validation", "test"]
        .iter()
        .map(|p| Corpus::load(d.join(format!("c.{p}.bin"))).unwrap().len())
        .sum();
    assert_eq!(parts, 20);

    std::fs::create_dir(d.join("empty")).unwrap();
    assert!(fails(d, &["ingest", "--input", "empty", "--out", "x.bin"]).contains("no .conllu"));
}

#[test]
fn train_decode_evaluate_generate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = memorization_corpus(4, 5);
    write_corpus(d, "memo.conllu", &corpus);
    ok(d, &["ingest", "--input", "memo.conllu", "--out", "c.bin"]);
    ok(d, &["dataset", "--corpus", "c.bin", "--kind", "e2e", "--condition", "1", "--out-dir", "ds", "--stem", "e2e"]);
    ok(d, &["dataset", "--corpus", "c.bin", "--kind", "e2s", "--condition", "orig-orig", "--out-dir", "ds", "--stem", "e2s"]);
    assert!(d.join("ds/e2e.json").exists());
    ok(d, &["train", "--pairs", "ds/e2e.tsv", "--out", "e2e.model"]);
    ok(d, &["train", "--pairs", "ds/e2s.tsv", "--out", "e2s.model"]);

    let tsv = std::fs::read_to_string(d.join("ds/e2s.tsv")).unwrap();
    let (input, output) = tsv.lines().next().unwrap().split_once('\t').unwrap();
    let decoded = ok(d, &["decode", "--model", "e2s.model", "--input", input]);
    assert_eq!(decoded.trim(), output);
    let greedy = ok(d, &["decode", "--model", "e2s.model", "--input", input, "--greedy"]);
    assert_eq!(greedy.trim(), output);

    ok(d, &["evaluate", "--model", "e2s.model", "--pairs", "ds/e2s.tsv", "--label", "memo", "--json", "r.json"]);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(report["condition"], "memo");
    assert_eq!(report["bleu"], 1.0);
    assert_eq!(report["pairs"], corpus.sentence_count());

    write_corpus(d, "seed.conllu", &Corpus::new(vec![corpus.stories[0].clone()]).unwrap());
    ok(d, &[
        "generate", "--seed", "seed.conllu", "--e2e", "e2e.model", "--e2s", "e2s.model", "--steps", "3", "--out", "t.jsonl",
    ]);
    let transcript = std::fs::read_to_string(d.join("t.jsonl")).unwrap();
    let steps: Vec<serde_json::Value> = transcript.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(steps.len(), 3);
    let expected: Vec<&str> = corpus.stories[0].sentences[1..4].iter().map(|s| s.raw_text.as_str()).collect();
    let got: Vec<&str> = steps.iter().map(|s| s["sentence"].as_str().unwrap()).collect();
    assert_eq!(got, expected);
}

#[test]
fn generalized_commands_need_lexicons() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let golden = fixtures().join("golden.conllu");
    ok(d, &["ingest", "--input", golden.to_str().unwrap(), "--out", "c.bin"]);
    let err = fails(d, &["eventify", "--corpus", "c.bin", "--mode", "generalized", "--out", "e.jsonl"]);
    assert!(err.contains("--wordnet"), "{err}");
    let err = fails(d, &["dataset", "--corpus", "c.bin", "--kind", "e2s", "--condition", "gen-gen", "--out-dir", "ds"]);
    assert!(err.contains("--wordnet"), "{err}");

    let mut args = vec!["eventify", "--corpus", "c.bin", "--mode", "generalized", "--out", "e.jsonl"];
    let lex = lexicon_args();
    args.extend(lex.iter().map(String::as_str));
    ok(d, &args);
    let first: serde_json::Value = serde_json::from_str(
        std::fs::read_to_string(d.join("e.jsonl")).unwrap().lines().next().unwrap(),
    )
    .unwrap();
    assert_eq!(first["story"], "store");
    assert_eq!(first["v"], "escape-51.1");
}

#[test]
fn genre_conditions_need_a_topic_model() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let golden = fixtures().join("golden.conllu");
    let lex = lexicon_args();
    let lex: Vec<&str> = lex.iter().map(String::as_str).collect();
    ok(d, &["ingest", "--input", golden.to_str().unwrap(), "--out", "c.bin"]);
    ok(d, &["train-lda", "--corpus", "c.bin", "--topics", "3", "--iters", "20", "--out", "m.lda"]);

    let mut args = vec!["dataset", "--corpus", "c.bin", "--kind", "e2e", "--condition", "5", "--out-dir", "ds", "--stem", "g"];
    args.extend(&lex);
    fails(d, &args);
    args.extend(["--genre", "m.lda"]);
    ok(d, &args);
    let tsv = std::fs::read_to_string(d.join("ds/g.tsv")).unwrap();
    for line in tsv.lines() {
        let (input, _) = line.split_once('\t').unwrap();
        assert_eq!(input.split(' ').count(), 5);
        assert!(input.split(' ').last().unwrap().starts_with("GENRE_"));
    }

    let err = fails(d, &["dataset", "--corpus", "c.bin", "--kind", "e2e", "--condition", "12", "--out-dir", "ds"]);
    assert!(err.contains("12"), "{err}");
    fails(d, &["dataset", "--corpus", "c.bin", "--kind", "e2s", "--condition", "bogus", "--out-dir", "ds"]);
}

#[test]
fn splitprune_writes_fragments() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let golden = fixtures().join("golden.conllu");
    ok(d, &["ingest", "--input", golden.to_str().unwrap(), "--out", "c.bin"]);
    ok(d, &["splitprune", "--corpus", "c.bin", "--out", "f.jsonl"]);
    let text = std::fs::read_to_string(d.join("f.jsonl")).unwrap();
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["text"], "John and Mary went.");
}
