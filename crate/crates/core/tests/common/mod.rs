#![allow(dead_code)]

pub mod lossless;

use std::path::PathBuf;

use docamr::builder::DocGraph;
use docamr::document::{load_document, Document, DocumentAnnotation};
use docamr::penman::parse_penman;

pub fn fixture_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture(name: &str) -> Document {
    let dir = fixture_dir(name);
    load_document(dir.join("input.amr"), dir.join("coref.json")).unwrap()
}

pub fn golden(name: &str, mode: &str) -> DocGraph {
    let text = std::fs::read_to_string(fixture_dir(name).join(format!("{mode}.amr"))).unwrap();
    DocGraph::from_amr(parse_penman(&text).unwrap().remove(0)).unwrap()
}

pub fn document(id: &str, amr: &str, annotation: &str) -> Document {
    Document::new(
        id,
        parse_penman(amr).unwrap(),
        DocumentAnnotation::from_json(annotation).unwrap(),
    )
    .unwrap()
}
