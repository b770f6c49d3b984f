//! Every emitted JSON document parses back into an equal value.

use constellation_cli::formats::{
    BasisSetDoc, CertificateDoc, ConstellationDoc, DefectDoc, MateDoc, MolsDoc, SearchDoc, Table1Doc, VerifyDoc,
};
use constellation_cli::run_command;
use constellation_core::affine::{make_plane, table1_constellation};
use constellation_core::latin::{mols_macneish, mols_prime_power, render_latin, LatinSquare};
use constellation_core::mub::{fourier_family6, hw_triple, tao_basis, wf_complete_set, MuConstellation};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

fn payload(args: &[&str]) -> Value {
    let out = run_command(
        std::iter::once("constellation-kit")
            .chain(args.iter().copied())
            .chain(["--json"]),
    );
    assert!(out.exit_code <= 1, "{args:?}: {}", out.report);
    out.payload.expect("--json yields a payload")
}

// Parse the emitted text, and check that serializing the parsed value gives
// the same document back.
fn parse<T: DeserializeOwned + Serialize>(v: &Value) -> T {
    let text = serde_json::to_string_pretty(v).unwrap();
    let doc: T = serde_json::from_str(&text).unwrap();
    assert_eq!(&serde_json::to_value(&doc).unwrap(), v);
    doc
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn planes() {
    for q in [2u32, 3, 4, 5, 7, 8, 9] {
        let doc: ConstellationDoc = parse(&payload(&["plane", "--order", &q.to_string()]));
        assert_eq!(doc.build().unwrap(), make_plane(q).unwrap());
        assert!(doc.classes.iter().flatten().all(|l| l.windows(2).all(|w| w[0] < w[1])));
    }
}

#[test]
fn plane_file_and_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let path = path.to_str().unwrap();
    let written: ConstellationDoc = parse(&payload(&["plane", "--order", "4", "--out", path]));
    let on_disk: ConstellationDoc = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(written, on_disk);
    let v: VerifyDoc = parse(&payload(&["verify", "--in", path, "--plane-axioms"]));
    assert!(v.valid);
    assert_eq!(v.foliations, 5);
    assert_eq!(v.plane_axioms, Some(vec![]));
}

#[test]
fn completion() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = ConstellationDoc::new(&make_plane(5).unwrap());
    let mut dropped = doc.classes.remove(2);
    dropped.sort();
    let path = write(&dir, "four.json", &serde_json::to_string(&doc).unwrap());
    let done: ConstellationDoc = parse(&payload(&["complete", "--in", &path]));
    let c = done.build().unwrap();
    assert_eq!(c.classes().len(), 6);
    let mut added: Vec<Vec<usize>> = c.classes()[5].lines().iter().map(|l| l.points().to_vec()).collect();
    added.sort();
    assert_eq!(added, dropped);
}

#[test]
fn example_table() {
    let doc: Table1Doc = parse(&payload(&["table1", "--verify"]));
    assert_eq!(doc.constellation.build().unwrap(), table1_constellation());
    assert_eq!(doc.signature, "⟨5,5,5,4⟩₆");
    assert!(doc.verification.unwrap().valid);
}

#[test]
fn mols_and_mates() {
    let doc: MolsDoc = parse(&payload(&["mols", "--order", "7", "--method", "primepower"]));
    let want: Vec<Vec<Vec<u8>>> = mols_prime_power(7).unwrap().iter().map(LatinSquare::rows).collect();
    assert_eq!(doc.squares, want);
    let doc: MolsDoc = parse(&payload(&["mols", "--order", "12", "--method", "macneish"]));
    let want: Vec<Vec<Vec<u8>>> = mols_macneish(12).unwrap().iter().map(LatinSquare::rows).collect();
    assert_eq!(doc.squares, want);
    assert!(doc.pairwise_orthogonal);

    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "c5.txt", &render_latin(&LatinSquare::cyclic(5)));
    let doc: MateDoc = parse(&payload(&["mate", "--in", &path]));
    let mate = LatinSquare::new(doc.mate.unwrap()).unwrap();
    assert!(LatinSquare::cyclic(5).is_orthogonal_to(&mate));
}

#[test]
fn certificates() {
    let doc: CertificateDoc = parse(&payload(&["certify-no-mols6", "--order", "4", "--workers", "1"]));
    assert_eq!(doc.squares_examined, 4);
    assert!(!doc.asserts_nonexistence);
}

#[test]
fn basis_sets() {
    let cases: Vec<(Vec<&str>, MuConstellation)> = vec![
        (vec!["--kind", "hw-triple", "--dim", "6"], hw_triple(6).unwrap()),
        (vec!["--kind", "wf", "--dim", "7"], wf_complete_set(7).unwrap()),
        (
            vec!["--kind", "tao"],
            MuConstellation::new(6, vec![tao_basis().unwrap()]).unwrap(),
        ),
        (
            vec!["--kind", "fourier-family", "--a", "0.1", "--b", "-0.37"],
            MuConstellation::new(6, vec![fourier_family6(0.1, -0.37)]).unwrap(),
        ),
    ];
    for (args, want) in cases {
        let mut argv = vec!["mub", "make"];
        argv.extend(args);
        let doc: BasisSetDoc = parse(&payload(&argv));
        // floats survive the text round trip bit for bit
        assert_eq!(doc.build().unwrap(), want);
    }
}

#[test]
fn defects() {
    let dir = tempfile::tempdir().unwrap();
    let set = BasisSetDoc::new(&wf_complete_set(5).unwrap());
    let path = write(&dir, "wf5.json", &serde_json::to_string(&set).unwrap());
    let doc: DefectDoc = parse(&payload(&["mub", "defect", "--in", &path]));
    assert!(doc.mutually_unbiased);
    assert_eq!(doc.pair_defects.len(), 15);
}

#[test]
fn search_results() {
    let doc: SearchDoc = parse(&payload(&[
        "mub",
        "search",
        "--dim",
        "3",
        "--signature",
        "2,2",
        "--restarts",
        "4",
        "--seed",
        "1",
        "--workers",
        "1",
    ]));
    assert_eq!(doc.status, "Found");
    let c = doc.configuration.build().unwrap();
    assert_eq!(c.bases().len(), 2);
    let doc: SearchDoc = parse(&payload(&[
        "mub",
        "search",
        "--dim",
        "6",
        "--signature",
        "5,4,3,2",
        "--restarts",
        "1",
        "--seed",
        "1",
        "--max-iterations",
        "20",
    ]));
    assert_eq!(doc.status, "NotFound");
    assert!(doc.note.contains("not a proof"));
}
