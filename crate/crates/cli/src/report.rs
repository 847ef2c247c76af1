//! JSON and text rendering of scores. Numbers are written with four fixed
//! decimals so reports compare byte for byte.

use std::path::Path;
use std::time::Duration;

use docamr::smatch::{Counts, CorefScore, SearchConfig, SmatchResult};
use docamr::CorpusScore;
use serde_json::{json, Map, Number, Value};

pub const EVALUATE_SCHEMA: &str = "docamr-evaluate/1";
pub const STATS_SCHEMA: &str = "docamr-stats/1";
pub const INJECT_SCHEMA: &str = "docamr-inject/1";
pub const BENCH_SCHEMA: &str = "docamr-bench/1";

pub fn fixed(x: f64) -> Value {
    Value::Number(format!("{x:.4}").parse::<Number>().expect("formatted float is a JSON number"))
}

pub fn millis(d: Duration) -> Value {
    fixed(d.as_secs_f64() * 1000.0)
}

fn coref(c: &CorefScore<f64>) -> Value {
    json!({"precision": fixed(c.precision), "recall": fixed(c.recall), "f1": fixed(c.f1)})
}

fn counts(c: &Counts) -> Value {
    json!({
        "matched": c.matched,
        "pred_triples": c.source_triples,
        "gold_triples": c.target_triples,
        "coref_matched": c.coref_matched,
        "coref_pred": c.coref_source,
        "coref_gold": c.coref_target,
    })
}

fn scores(r: &SmatchResult<f64>, timing: bool) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("precision".into(), fixed(r.precision));
    m.insert("recall".into(), fixed(r.recall));
    m.insert("f1".into(), fixed(r.f1));
    m.insert("coref".into(), coref(&r.coref));
    m.insert("counts".into(), counts(&r.counts));
    if timing {
        m.insert("elapsed_ms".into(), millis(r.elapsed));
    }
    m
}

pub fn evaluate_json(result: &CorpusScore, config: &SearchConfig, timing: bool) -> Value {
    let mut top = Map::new();
    top.insert("schema".into(), json!(EVALUATE_SCHEMA));
    top.extend(scores(&result.total, timing));
    let per_doc = result
        .per_doc
        .iter()
        .map(|(id, r)| {
            let mut m = Map::new();
            m.insert("doc_id".into(), json!(id));
            m.extend(scores(r, timing));
            Value::Object(m)
        })
        .collect();
    top.insert("per_doc".into(), Value::Array(per_doc));
    top.insert("seed".into(), json!(config.seed));
    top.insert("restarts".into(), json!(config.restarts));
    top.insert("constrained".into(), json!(config.constrained));
    top.insert("exact_max".into(), json!(config.max_exact_nodes));
    Value::Object(top)
}

pub fn evaluate_text(result: &CorpusScore, timing: bool) -> String {
    let t = &result.total;
    let mut out = format!(
        "Precision: {:.4}\nRecall: {:.4}\nF-score: {:.4}\nCoref precision: {:.4}\nCoref recall: {:.4}\nCoref F-score: {:.4}\n",
        t.precision, t.recall, t.f1, t.coref.precision, t.coref.recall, t.coref.f1
    );
    if timing {
        out.push_str(&format!("Elapsed: {:.1} ms\n", t.elapsed.as_secs_f64() * 1000.0));
    }
    out
}

/// Run description written to stderr when `--json` is set.
pub struct RunManifest<'a> {
    pub subcommand: &'a str,
    pub inputs: Vec<(&'a str, &'a Path)>,
    pub mode: Option<&'a str>,
    pub seed: Option<u64>,
    pub elapsed: Duration,
}

impl RunManifest<'_> {
    pub fn to_json(&self) -> Value {
        let inputs: Map<String, Value> = self
            .inputs
            .iter()
            .map(|(k, p)| (k.to_string(), json!(p.display().to_string())))
            .collect();
        json!({
            "manifest": {
                "subcommand": self.subcommand,
                "inputs": inputs,
                "mode": self.mode,
                "seed": self.seed,
                "version": env!("CARGO_PKG_VERSION"),
                "elapsed_ms": millis(self.elapsed),
            }
        })
    }
}
