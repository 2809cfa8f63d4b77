use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BRANCH_TREE: &str = include_str!("../../core/tests/data/branch_tree.tree");

const BRANCH_TREE_T: &str = "\
# point-set v1
dim 4
box 40 40 40 40
0 0 0 0
0 0 0 2
2 2 2 0
2 2 2 2
16 16 16 24
16 16 16 26
18 18 18 24
18 18 18 26
";

fn npair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_npair")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

struct Scratch {
    dir: TempDir,
}

impl Scratch {
    fn new() -> Self {
        Scratch { dir: TempDir::new().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        s(&p)
    }
}

fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

fn generate(w: &Scratch, tree: &str, bounds: &str, tag: &str) -> (String, String, Output) {
    let (t, s_) = (s(&w.path(&format!("{tag}.t"))), s(&w.path(&format!("{tag}.s"))));
    let out = npair(&["generate", tree, "--box", bounds, "--out", &t, &s_]);
    (t, s_, out)
}

#[test]
fn generate_branch_tree() {
    let w = Scratch::new();
    let tree = w.file("branch.tree", BRANCH_TREE);
    let (t, _, out) = generate(&w, &tree, "40^4", "branch");
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(fs::read_to_string(t).unwrap(), BRANCH_TREE_T);
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["certificate"]["t_points"], 8);
    assert_eq!(report["certificate"]["box"], serde_json::json!([40, 40, 40, 40]));
    assert_eq!(report["certificate"]["direct_sum"]["status"], "ok");
}

#[test]
fn generate_is_deterministic() {
    let w = Scratch::new();
    let tree = w.file("branch.tree", BRANCH_TREE);
    let (t1, s1, _) = generate(&w, &tree, "12,12,12,30", "a");
    let (t2, s2, _) = generate(&w, &tree, "12,12,12,30", "b");
    assert_eq!(fs::read(t1).unwrap(), fs::read(t2).unwrap());
    assert_eq!(fs::read(s1).unwrap(), fs::read(s2).unwrap());
}

#[test]
fn trivial_tree_generates_the_origin() {
    let w = Scratch::new();
    let tree = w.file("z.tree", "[tree]\nroot phi\n[initial]\nspecial=zero-T\n");
    let (t, s_, out) = generate(&w, &tree, "6", "z");
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(t).unwrap(), "# point-set v1\ndim 1\nbox 6\n0\n");
    assert_eq!(fs::read_to_string(s_).unwrap().lines().count(), 3 + 6);
}

#[test]
fn exit_codes_separate_failure_classes() {
    let w = Scratch::new();
    let bad_delta = w.file("d.tree", &BRANCH_TREE.replace("y1 0\n", "y1 2\n"));
    let out = generate(&w, &bad_delta, "8^4", "d").2;
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("delta must be 0 or 1"), "{}", stderr(&out));

    let garbled = w.file("g.tree", &BRANCH_TREE.replace("root phi", "rot phi"));
    assert_eq!(code(&generate(&w, &garbled, "8^4", "g").2), 2);

    let tree = w.file("branch.tree", BRANCH_TREE);
    assert_eq!(code(&generate(&w, &tree, "100000^4", "big").2), 4);
    assert_eq!(code(&generate(&w, &tree, "8^3", "dim").2), 3);
    assert_eq!(code(&npair(&["generate", "/nonexistent/tree", "--out", "a", "b"])), 1);
    assert_eq!(code(&npair(&["generate", &tree, "--box", "4,x", "--out", "a", "b"])), 2);
}

#[test]
fn verify_reports_ok_and_failure() {
    let w = Scratch::new();
    let tree = w.file("branch.tree", BRANCH_TREE);
    let (t, s_, _) = generate(&w, &tree, "16,16,16,32", "branch");
    let out = npair(&["verify", &t, &s_, "--box", "8^4", "--separability"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["direct_sum"]["status"], "ok");
    assert_eq!(report["separability"]["separable"], true);
    assert_eq!(report["separability"]["partition"], serde_json::json!([[0, 1, 2], [3]]));

    let a = w.file("a", "# point-set v1\ndim 1\nbox 4\n0\n1\n");
    let out = npair(&["verify", &a, &a]);
    assert_eq!(code(&out), 5);
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["direct_sum"], serde_json::json!({"status": "failure", "point": [1], "count": 2}));

    assert_eq!(code(&npair(&["verify", &t, &s_, "--box", "99^4"])), 4);
}

#[test]
fn decompose_then_generate_reproduces_the_dumps() {
    let w = Scratch::new();
    let tree = w.file("branch.tree", BRANCH_TREE);
    let (t, s_, _) = generate(&w, &tree, "20,20,20,32", "branch");
    let forest = s(&w.path("forest.txt"));
    let out = npair(&["decompose", &t, &s_, "--out", &forest, "--trace"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let certified: Vec<u64> = serde_json::from_value(report["certified"].clone()).unwrap();
    assert!(report["trace"].as_array().is_some_and(|t| !t.is_empty()));
    assert!(fs::read_to_string(&forest).unwrap().starts_with("# weighted-forest v1"));

    let bounds: Vec<String> = certified.iter().map(|m| m.to_string()).collect();
    let bounds = bounds.join(",");
    let (t2, s2, out) = generate(&w, &forest, &bounds, "again");
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (t3, s3, _) = generate(&w, &tree, &bounds, "orig");
    assert_eq!(fs::read(t2).unwrap(), fs::read(t3).unwrap());
    assert_eq!(fs::read(s2).unwrap(), fs::read(s3).unwrap());

    // Without --out the forest is printed.
    let out = npair(&["decompose", &t, &s_]);
    assert_eq!(stdout(&out), fs::read_to_string(&forest).unwrap());
}

#[test]
fn roundtrip_of_a_file_and_of_random_trees() {
    let w = Scratch::new();
    let tree = w.file("branch.tree", BRANCH_TREE);
    let out = npair(&["roundtrip", &tree, "--box", "16,16,16,28"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "IDENTICAL on certified box [0,16)x[0,16)x[0,16)x[0,28)\n");

    let out = npair(&["roundtrip", "--random", "3", "--seed", "7", "--nodes", "25"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let lines: Vec<String> = stdout(&out).lines().map(String::from).collect();
    assert_eq!(lines.len(), 3);
    for (k, line) in lines.iter().enumerate() {
        assert!(line.starts_with(&format!("tree {k}: IDENTICAL on certified box")), "{line}");
    }
}

#[test]
fn closed_form_lists_the_t_atoms() {
    let w = Scratch::new();
    let tree = w.file("branch.tree", BRANCH_TREE);
    let out = npair(&["closed-form", &tree]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let atoms: Vec<&str> = text.lines().filter(|l| l.starts_with("P[")).collect();
    assert_eq!(
        atoms,
        [
            "P[x1] = 1",
            "P[x2] = 1",
            "P[x3] = 1",
            "P[y1] = 1 + x1^2 x2^2 x3^2",
            "P[x4] = 1 + x4^2",
            "P[phi] = 1 + x1^16 x2^16 x3^16 x4^24",
        ]
    );
    assert_eq!(text.lines().filter(|l| l.starts_with("Q[")).count(), 6);

    let out = npair(&["closed-form", &tree, "--table"]);
    assert!(stdout(&out).starts_with("node  | y1"));
    let out = npair(&["closed-form", &tree, "--json"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v[0]["factorization"]["factors"].as_array().unwrap().len(), 6);
}

#[test]
fn extend_writes_trees_that_read_back() {
    let w = Scratch::new();
    let z = w.file("z.tree", "[tree]\nroot phi\n[initial]\nspecial=zero-T\n");
    let out = npair(&["extend", &z, "--step", "second axis=0 delta=0 a=1,2"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("illegal extension"));

    let once = s(&w.path("once.tree"));
    let out = npair(&["extend", &z, "--step", "second axis=0 delta=1 a=1,2", "--out", &once]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = npair(&["extend", &once, "--step", "first axis=1 C={0,2} D={0,1}", "--step", "second axis=0 delta=0 a=2,1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let twice = w.file("twice.tree", &stdout(&out));
    let out = npair(&["roundtrip", &twice, "--box", "24,24,24"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    // Re-reading and re-writing a tree file is the identity.
    let out = npair(&["extend", &once, "--step", "first axis=0 C={0} D={0,1}"]);
    let text = stdout(&out);
    let again = w.file("again.tree", &text);
    let out = npair(&["extend", &again, "--step", "first axis=0 C={0} D={0}"]);
    assert_eq!(stdout(&out), text);

    assert_eq!(code(&npair(&["extend", &z, "--step", "sideways axis=0"])), 2);
}
