use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use qumin::syntax::parse_program;
use qumin::typesys::{check_quantum_library, Globals, LibraryError, LinearType, RoutineSignature, TypeErrorKind};

fn corpus(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn check(rel: &str) -> Result<BTreeMap<String, RoutineSignature>, LibraryError> {
    let path = corpus(rel);
    let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let nodes = parse_program(&text).unwrap_or_else(|e| panic!("{rel}: {e}"));
    check_quantum_library(&nodes, &Globals::new())
}

fn qubits(n: u32) -> LinearType {
    LinearType::qubits(n)
}

fn op(n: u32) -> LinearType {
    LinearType::operator(n)
}

fn bang(t: LinearType) -> LinearType {
    LinearType::bang(t)
}

fn curried(params: Vec<LinearType>, result: LinearType) -> LinearType {
    params.into_iter().rev().fold(result, |acc, p| LinearType::lolli(p, acc))
}

fn assert_signature(rel: &str, routine: &str, expected: LinearType) {
    let table = check(rel).unwrap_or_else(|e| panic!("{rel} rejected: {e}"));
    let sig = table.get(routine).unwrap_or_else(|| panic!("{rel}: no routine {routine}"));
    assert!(
        sig.as_type().equivalent(&expected),
        "{rel}: {routine} has {}, expected {expected}",
        sig.as_type()
    );
}

#[test]
fn simple_routine() {
    assert_signature(
        "simpleRoutine.qum",
        "simpleRoutine",
        curried(vec![qubits(1), op(1)], bang(qubits(1))),
    );
}

#[test]
fn deutsch_routine() {
    assert_signature(
        "deutschTypes.qum",
        "deutschRoutine",
        curried(
            vec![qubits(2), bang(op(1)), bang(op(1)), bang(op(2))],
            bang(qubits(2)),
        ),
    );
}

#[test]
fn grover_routines() {
    for (rel, n) in [
        ("groverMeasureTypes.qum", 3),
        ("groverTypes.qum", 3),
        ("groverNTypes.qum", 4),
    ] {
        let table = check(rel).unwrap_or_else(|e| panic!("{rel}: {e}"));
        let sig = &table["groverRoutine"];
        assert_eq!(sig.params.len(), 3, "{rel}");
        assert!(sig.params[0].1.equivalent(&qubits(n)), "{rel}");
        assert!(sig.params[1].1.equivalent(&bang(op(n))), "{rel}");
        assert!(sig.result.equivalent(&bang(qubits(n))), "{rel}: {}", sig.result);
    }
}

#[test]
fn accepted_typing_cases() {
    let mut files: Vec<PathBuf> = fs::read_dir(corpus("typing/accept"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert!(files.len() >= 5);
    for path in files {
        let rel = format!("typing/accept/{}", path.file_name().unwrap().to_string_lossy());
        let table = check(&rel).unwrap_or_else(|e| panic!("{rel} rejected: {e}"));
        assert!(!table.is_empty(), "{rel}");
    }
}

fn rejection(rel: &str) -> LibraryError {
    match check(rel) {
        Ok(table) => panic!("{rel} accepted: {:?}", table.keys().collect::<Vec<_>>()),
        Err(e) => e,
    }
}

fn violation(name: &str, used: u32) -> TypeErrorKind {
    TypeErrorKind::LinearityViolation {
        name: name.into(),
        used,
    }
}

#[test]
fn cloning_and_discarding_are_rejected() {
    let e = rejection("cloning.qum");
    assert_eq!((e.routine.as_str(), &e.error.kind), ("cloning", &violation("q", 2)));
    let e = rejection("unused.qum");
    assert_eq!((e.routine.as_str(), &e.error.kind), ("discard", &violation("q", 0)));
}

#[test]
fn rejected_typing_cases() {
    type Case = (&'static str, &'static str, fn(&TypeErrorKind) -> bool);
    let cases: &[Case] = &[
        ("operatorTwice", "twice", |k| *k == violation("U", 2)),
        ("dimMismatch", "wide", |k| matches!(k, TypeErrorKind::DimMismatch { .. })),
        ("unknownName", "mystery", |k| *k == TypeErrorKind::UnknownName("frobnicate".into())),
        ("promotion", "leak", |k| *k == TypeErrorKind::PromotionError),
        ("discarded", "drop", |k| matches!(k, TypeErrorKind::DiscardedLinear(_))),
        ("unusedLet", "halfway", |k| *k == violation("p", 0)),
        ("splitUnused", "dropSecond", |k| *k == violation("b", 0)),
        ("badSubsystems", "split", |k| matches!(k, TypeErrorKind::DimMismatch { .. })),
    ];
    let on_disk = fs::read_dir(corpus("typing/reject")).unwrap().count();
    assert_eq!(on_disk, cases.len(), "every reject file needs an expectation");
    for (file, routine, expected) in cases {
        let e = rejection(&format!("typing/reject/{file}.qum"));
        assert_eq!(e.routine, *routine, "{file}");
        assert!(expected(&e.error.kind), "{file}: unexpected {}", e.error);
    }
}

#[test]
fn rejection_spans_point_into_the_routine() {
    let text = fs::read_to_string(corpus("cloning.qum")).unwrap();
    let e = rejection("cloning.qum");
    let span = e.error.span;
    assert!(span.start < span.end && span.end <= text.len());
    assert!(text[span.start..].starts_with("lambda") || text[span.start..span.end].contains('q'));
}
