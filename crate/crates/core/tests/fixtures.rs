use std::path::{Path, PathBuf};
use std::time::Duration;

use sdtab_core::compiler::{build_theory, BuildOptions, Theory};
use sdtab_core::engine::{prove, validate, ProofResult, SearchConfig};
use sdtab_core::render::{render, skeleton, RenderOptions, Skeleton};
use sdtab_core::tptp::{parse_problem, Problem};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn load(name: &str, tag: &str) -> (Problem, Theory) {
    let path = fixture(name);
    let text = std::fs::read_to_string(&path).unwrap();
    let p = parse_problem(&text, &path).unwrap();
    let t = build_theory(&p, tag, BuildOptions::default());
    (p, t)
}

fn run(name: &str, tag: &str) -> (String, Skeleton, usize) {
    let (p, t) = load(name, tag);
    let cfg = SearchConfig { timeout: Duration::from_secs(30), ..SearchConfig::default() };
    let goal = p.conjecture().unwrap().formula.clone();
    match prove(&t, &goal, &cfg) {
        ProofResult::Proof(tree, stats) => {
            validate(&tree, &t).unwrap();
            let text = render(&tree, &p, tag, RenderOptions::default());
            println!("{text}\n{stats}");
            let sk = skeleton(&text);
            (text, sk, stats.rule_applications)
        }
        other => panic!("{name}: no proof: {:?}\n{}", other.stats(), t.dump()),
    }
}

#[test]
fn puzzle_proof_has_three_closures() {
    let (_, sk, _) = run("puzzle132.p", "szen");
    assert_eq!(sk.leaves, 3, "{sk}");
}

#[test]
fn drest_proof() {
    let (text, _, _) = run("b_drest.p", "b");
    assert!(text.contains("b_BIG"));
}

#[test]
fn geometry_proof() {
    let (_, sk, _) = run("geometry170.p", "szen");
    assert_eq!(sk.count("DisjTree"), 1, "{sk}");
}

#[test]
fn inclusion_is_short() {
    let (_, _, n) = run("inclusion.p", "szen");
    assert!(n <= 3, "{n}");
}
