use std::process::Command;

use enriques_cli::report::{ReportDocument, ReportResult};
use enriques_cli::{run, EXIT_INPUT, EXIT_OK};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_enriques"))
}

const PAIR2: &str = "let E1,E2 = isotropic(E1.E2=2); 2*E1+2*E2";

#[test]
fn gengon_of_a_square_class() {
    let out = run(["enriques", "--format", "json", "gengon", PAIR2]);
    assert_eq!(out.code, EXIT_OK);
    match out.document.unwrap().result {
        ReportResult::Gengon(g) => {
            assert_eq!(g.gengon, 6);
            assert_eq!(g.case_tag.as_str(), "a");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn text_and_json_agree() {
    let json = run(["enriques", "--format", "json", "invariants", PAIR2]);
    let text = run(["enriques", "invariants", PAIR2]);
    let ReportResult::Invariants(r) = json.document.unwrap().result else { panic!() };
    let field = |key: &str| {
        text.stdout
            .lines()
            .find(|l| l.starts_with(&format!("{key:<20} ")))
            .map(|l| l[21..].trim().to_string())
            .unwrap()
    };
    assert_eq!(field("phi"), r.phi.value.to_string());
    assert_eq!(field("mu"), r.mu.value.to_string());
    assert_eq!(field("gengon"), r.gengon.to_string());
    assert_eq!(field("quarter bound"), r.quarter_bound.to_string());
    assert_eq!(field("L^2"), r.l_squared.to_string());
}

#[test]
fn every_command_round_trips() {
    let d = "let E1,E2,E3 = isotropic(E1.E2=2, E1.E3=2, E2.E3=1); E1+E2+E3";
    let cases: Vec<Vec<&str>> = vec![
        vec!["invariants", PAIR2],
        vec!["phi", PAIR2],
        vec!["mu", PAIR2, "--cap", "9"],
        vec!["gengon", PAIR2],
        vec!["classify", PAIR2],
        vec!["decompose", PAIR2],
        vec!["ten-frame", d],
        vec!["extremal", PAIR2],
        vec!["verify", "--radius", "1"],
        vec!["oracle-check", "--radius", "1", "--anchors", "2"],
        vec!["phi", "3*"],
    ];
    for args in cases {
        let mut full = vec!["enriques", "--format", "json", "--threads", "1"];
        full.extend(&args);
        let a = run(full.clone());
        let doc = ReportDocument::from_json(&a.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
        assert_eq!(Some(&doc), a.document.as_ref(), "{args:?}");
        if !matches!(doc.result, ReportResult::Verify(_) | ReportResult::OracleCheck(_)) {
            assert_eq!(a.stdout, run(full).stdout, "{args:?} is not byte-stable");
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(["enriques", "phi", "3*"]).code, EXIT_INPUT);
    assert_eq!(run(["enriques", "phi", "E + 1"]).code, EXIT_INPUT);
    assert_eq!(run(["enriques", "nope"]).code, EXIT_INPUT);
    assert_eq!(run(["enriques", "mu", PAIR2, "--cap", "1"]).code, EXIT_INPUT);
    assert_eq!(run(["enriques", "verify", "--radius", "0"]).code, EXIT_INPUT);
    assert_eq!(run(["enriques", "verify", "--radius", "1", "--checks", "bogus"]).code, EXIT_INPUT);
    assert_eq!(run(["enriques", "--help"]).code, EXIT_OK);
    let e = run(["enriques", "phi", "v[2000000,0,0,0,0,0,0,0,0,0]"]);
    assert_eq!(e.code, 3, "{}", e.stderr);
}

#[test]
fn binary_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = bin()
        .args(["--format", "json", "--output"])
        .arg(&path)
        .args(["phi", "v[1,1,0,0,0,0,0,0,0,0]"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written.as_bytes(), out.stdout.as_slice());
    let doc = ReportDocument::from_json(&written).unwrap();
    let ReportResult::Phi(w) = doc.result else { panic!() };
    assert_eq!(w.value, 1);
}

#[test]
fn binary_reports_syntax_errors() {
    let out = bin().args(["phi", "3*"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("position 2"), "{err}");
}
