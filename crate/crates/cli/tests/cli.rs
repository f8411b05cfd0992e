use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nettagger::corpus::write_corpus;
use nettagger::synthetic::SyntheticGrammar;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nettagger"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    /// Synthetic train and test corpora plus a tagset file.
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let grammar = SyntheticGrammar::new(1);
        let write = |name: &str, tokens: usize, seed: u64| {
            let mut buf = Vec::new();
            write_corpus(&grammar.generate(tokens, seed), &mut buf).unwrap();
            fs::write(dir.path().join(name), buf).unwrap();
        };
        write("train.txt", 4_000, 1);
        write("test.txt", 600, 2);
        let mut tags = Vec::new();
        grammar.tagset.write_config(&mut tags).unwrap();
        fs::write(dir.path().join("tags.txt"), tags).unwrap();
        Workspace { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).display().to_string()
    }

    fn write(&self, name: &str, text: &str) -> String {
        fs::write(self.dir.path().join(name), text).unwrap();
        self.path(name)
    }

    fn read(&self, name: &str) -> Vec<u8> {
        fs::read(self.dir.path().join(name)).unwrap()
    }

    fn build_and_train(&self, model: &str, extra: &[&str]) -> Output {
        let o = run(&[
            "build-lexicon",
            "--corpus",
            &self.path("train.txt"),
            "--tagset",
            &self.path("tags.txt"),
            "--lexicon",
            &self.path("lex.txt"),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let (corpus, lexicon, model) = (
            self.path("train.txt"),
            self.path("lex.txt"),
            self.path(model),
        );
        let mut args = vec![
            "train",
            "--corpus",
            &corpus,
            "--lexicon",
            &lexicon,
            "--log-interval",
            "2000",
            "--model",
            &model,
        ];
        if !extra.contains(&"--total-cycles") {
            args.extend(["--total-cycles", "8000"]);
        }
        args.extend(extra);
        run(&args)
    }

    fn tag(&self, model: &str, input: &str, output: &str, extra: &[&str]) -> Output {
        let mut args = vec![
            "tag".to_string(),
            "--lexicon".into(),
            self.path("lex.txt"),
            "--model".into(),
            self.path(model),
            "--input".into(),
            input.to_string(),
            "--output".into(),
            self.path(output),
        ];
        args.extend(extra.iter().map(|s| s.to_string()));
        bin().args(&args).output().unwrap()
    }
}

#[test]
fn full_pipeline_is_deterministic() {
    let ws = Workspace::new();
    let o = ws.build_and_train("m1.txt", &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let err = stderr(&o);
    assert!(err.contains("# total_cycles = 8000"), "{err}");
    assert!(err.contains("cycle 8000"), "{err}");
    assert!(ws.build_and_train("m2.txt", &[]).status.success());
    assert_eq!(ws.read("m1.txt"), ws.read("m2.txt"));

    let test = ws.path("test.txt");
    assert!(ws.tag("m1.txt", &test, "t1.txt", &[]).status.success());
    assert!(ws.tag("m2.txt", &test, "t2.txt", &[]).status.success());
    assert_eq!(ws.read("t1.txt"), ws.read("t2.txt"));

    let o = run(&[
        "eval",
        "--gold",
        &test,
        "--tagged",
        &ws.path("t1.txt"),
        "--output",
        &ws.path("report.txt"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("accuracy"));
    let report = String::from_utf8(ws.read("report.txt")).unwrap();
    for key in [
        "tokens",
        "correct",
        "accuracy",
        "ambiguous",
        "ambiguous_rate",
        "correct_with_alternatives",
        "accuracy_with_alternatives",
    ] {
        assert!(
            report.lines().any(|l| l.split('\t').next() == Some(key)),
            "{key} missing"
        );
    }
    let accuracy: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("accuracy\t"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(accuracy > 0.8, "{accuracy}");
    assert!(!ws.read("report.txt.confusion").is_empty());
}

#[test]
fn config_file_and_flag_override() {
    let ws = Workspace::new();
    let cfg = ws.write(
        "run.conf",
        "# settings\ntotal_cycles = 3000\nseed = 4\nhidden = 5\n",
    );
    let o = ws.build_and_train("m.txt", &["--config", &cfg, "--seed", "7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let err = stderr(&o);
    // the explicit --total-cycles in build_and_train beats the file
    assert!(err.contains("# total_cycles = 8000"));
    assert!(err.contains("# seed = 7"));
    assert!(err.contains("# hidden = 5"));
    let model = String::from_utf8(ws.read("m.txt")).unwrap();
    assert_eq!(model.lines().nth(1), Some("48 5 8"));

    let bad = ws.write("bad.conf", "hiden = 3\n");
    let o = run(&[
        "inspect",
        "--config",
        &bad,
        "--lexicon",
        &ws.path("lex.txt"),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn zero_cycles_writes_the_seeded_initial_network() {
    let ws = Workspace::new();
    let o = ws.build_and_train("a.txt", &["--total-cycles", "0", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = ws.build_and_train(
        "b.txt",
        &[
            "--total-cycles",
            "0",
            "--seed",
            "3",
            "--learning-rate",
            "0.5",
        ],
    );
    assert!(o.status.success());
    assert_eq!(ws.read("a.txt"), ws.read("b.txt"));
    let o = ws.build_and_train("c.txt", &["--total-cycles", "0", "--seed", "4"]);
    assert!(o.status.success());
    assert_ne!(ws.read("a.txt"), ws.read("c.txt"));
}

#[test]
fn tag_output_formats() {
    let ws = Workspace::new();
    assert!(ws.build_and_train("m.txt", &[]).status.success());
    let input = ws.write("raw.txt", "the\nfoo\n\n\nzzzly\n");

    let o = ws.tag("m.txt", &input, "plain.txt", &["--alt-margin", "1.0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let plain = String::from_utf8(ws.read("plain.txt")).unwrap();
    let lines: Vec<&str> = plain.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[2], "");
    assert_eq!(lines[4], "");
    // a margin of 1 always yields an alternative
    assert!(lines[0].starts_with("the\t") && lines[0].split('\t').count() == 3);

    let o = ws.tag(
        "m.txt",
        &input,
        "scores.txt",
        &["--scores", "--alt-margin", "0"],
    );
    assert!(o.status.success());
    let scored = String::from_utf8(ws.read("scores.txt")).unwrap();
    for line in scored.lines().filter(|l| !l.is_empty()) {
        let fields: Vec<&str> = line.split('\t').collect();
        assert_eq!(fields.len(), 4, "{line}");
        assert_eq!(fields[2], "");
        assert_eq!(fields[3].split(',').count(), 8);
    }

    let empty = ws.write("empty.txt", "");
    let o = ws.tag("m.txt", &empty, "empty_out.txt", &[]);
    assert!(o.status.success());
    assert!(ws.read("empty_out.txt").is_empty());
}

#[test]
fn eval_of_gold_against_itself_is_perfect() {
    let ws = Workspace::new();
    let test = ws.path("test.txt");
    let o = run(&[
        "eval",
        "--gold",
        &test,
        "--tagged",
        &test,
        "--output",
        &ws.path("r.txt"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = String::from_utf8(ws.read("r.txt")).unwrap();
    assert!(report.contains("accuracy\t1.000000"), "{report}");
    assert!(report.contains("ambiguous\t0\n"));
}

#[test]
fn eval_names_the_first_misaligned_line() {
    let ws = Workspace::new();
    let gold = ws.write("gold.txt", "a\tX\nb\tY\n\nc\tX\n");
    let tagged = ws.write("tagged.txt", "a\tX\nb\tY\n\nd\tX\n");
    let o = run(&["eval", "--gold", &gold, "--tagged", &tagged]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    let short = ws.write("short.txt", "a\tX\nb\tY\n");
    let o = run(&["eval", "--gold", &gold, "--tagged", &short]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tagset_without_open_classes_is_a_config_error() {
    let ws = Workspace::new();
    let tags = ws.write("closed.txt", "DT\nIN\nJJ\nMD\nNN\nPR\nRB\nVB\n");
    let o = run(&[
        "build-lexicon",
        "--corpus",
        &ws.path("train.txt"),
        "--tagset",
        &tags,
        "--lexicon",
        &ws.path("lex.txt"),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(!Path::new(&ws.path("lex.txt")).exists());
}

#[test]
fn exit_codes() {
    let ws = Workspace::new();
    // unknown subcommand and missing required setting
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["train"]).status.code(), Some(1));
    // malformed corpus
    let broken = ws.write("broken.txt", "a\tX\tY\n");
    let o = run(&[
        "build-lexicon",
        "--corpus",
        &broken,
        "--tagset",
        &ws.path("tags.txt"),
        "--lexicon",
        &ws.path("lex.txt"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"));
    // missing file
    let missing: PathBuf = ws.dir.path().join("nope.txt");
    let o = run(&["inspect", "--lexicon", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    // diverging training
    let o = ws.build_and_train(
        "m.txt",
        &[
            "--hidden",
            "4",
            "--learning-rate",
            "1e308",
            "--init-range",
            "1e300",
        ],
    );
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(!Path::new(&ws.path("m.txt")).exists());
}

#[test]
fn inspect_and_learning_curve() {
    let ws = Workspace::new();
    assert!(ws
        .build_and_train("m.txt", &["--total-cycles", "0"])
        .status
        .success());
    let o = run(&[
        "inspect",
        "--lexicon",
        &ws.path("lex.txt"),
        "--word",
        "Zzzness",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("source\tSuffix"), "{out}");
    assert!(out.contains("<ROOT>"));
    let o = run(&["inspect", "--lexicon", &ws.path("lex.txt")]);
    assert!(stdout(&o).contains("open\tJJ NN RB VB"));

    let o = run(&[
        "learning-curve",
        "--corpus",
        &ws.path("train.txt"),
        "--tagset",
        &ws.path("tags.txt"),
        "--test-tokens",
        "500",
        "--sizes",
        "500,3000",
        "--total-cycles",
        "3000",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "requested\ttrain_tokens\taccuracy");
    assert!(lines[2].starts_with("3000\t"));
}

#[test]
fn eval_compare_reports_shared_errors() {
    let ws = Workspace::new();
    let gold = ws.write("gold.txt", "a\tX\nb\tY\nc\tX\nd\tY\n");
    let one = ws.write("one.txt", "a\tY\nb\tY\nc\tY\nd\tY\n");
    let two = ws.write("two.txt", "a\tY\nb\tX\nc\tX\nd\tY\n");
    let o = run(&[
        "eval",
        "--gold",
        &gold,
        "--tagged",
        &one,
        "--compare",
        &two,
        "--output",
        &ws.path("r.txt"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = String::from_utf8(ws.read("r.txt")).unwrap();
    assert!(report.contains("errors\t2\n"), "{report}");
    assert!(report.contains("compare_errors\t2\n"));
    assert!(report.contains("shared_errors\t1\n"));
    assert!(report.contains("error_overlap\t0.500000\n"));
    assert!(stdout(&o).contains("error_overlap\t0.500000"));
}
