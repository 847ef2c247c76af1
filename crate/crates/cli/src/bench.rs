//! Timing of constrained against unconstrained scoring on a synthetic
//! corpus sampled from a pool of sentence graphs.

use std::time::{Duration, Instant};

use docamr::builder::{build, BuildConfig, Mode};
use docamr::penman::AmrGraph;
use docamr::smatch::{extract_triples, hill_climb, pool_size, SearchConfig};
use docamr::synth::{perturb_document, sample_document, Noise};
use docamr::SmatchScore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{fixed, millis, BENCH_SCHEMA};

/// Allowed shortfall of the constrained f1 below the unconstrained one.
pub const F1_TOLERANCE: f64 = 1e-9;

pub struct BenchSettings {
    pub sizes: Vec<usize>,
    pub docs: usize,
    pub noise: f64,
    pub search: SearchConfig,
}

#[derive(Debug, Default)]
pub struct SizeRow {
    pub sentences: usize,
    pub docs: usize,
    pub variables: usize,
    pub pool_unconstrained: usize,
    pub pool_constrained: usize,
    pub time_unconstrained: Duration,
    pub time_constrained: Duration,
    pub f1_unconstrained: Vec<f64>,
    pub f1_constrained: Vec<f64>,
}

impl SizeRow {
    pub fn speedup(&self) -> f64 {
        self.time_unconstrained.as_secs_f64() / self.time_constrained.as_secs_f64().max(1e-9)
    }

    /// Largest amount by which the constrained f1 trails the unconstrained one.
    pub fn max_gap(&self) -> f64 {
        self.f1_unconstrained
            .iter()
            .zip(&self.f1_constrained)
            .map(|(u, c)| u - c)
            .fold(0.0, f64::max)
    }

    /// Documents where the constrained score fell short.
    pub fn shortfalls(&self) -> Vec<usize> {
        (0..self.docs)
            .filter(|&i| self.f1_constrained[i] < self.f1_unconstrained[i] - F1_TOLERANCE)
            .collect()
    }
}

pub fn run(pool: &[AmrGraph], settings: &BenchSettings, config: &BuildConfig) -> docamr::Result<Vec<SizeRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.search.seed);
    let mut rows = Vec::new();
    for &size in &settings.sizes {
        let mut row = SizeRow {
            sentences: size,
            docs: settings.docs,
            ..SizeRow::default()
        };
        for d in 0..settings.docs {
            let id = format!("bench-{size}-{d}");
            let gold = sample_document(&mut rng, &id, pool, size);
            let pred = perturb_document(&mut rng, &gold, &Noise::structural(settings.noise));
            let gold = extract_triples(&build(&gold, Mode::DocAmr, config));
            let pred = extract_triples(&build(&pred, Mode::DocAmr, config));
            row.variables += pred.variables.len().max(gold.variables.len());
            row.pool_unconstrained += pool_size(&pred, &gold, false)?;
            row.pool_constrained += pool_size(&pred, &gold, true)?;
            for constrained in [false, true] {
                let cfg = SearchConfig {
                    constrained,
                    ..settings.search
                };
                let start = Instant::now();
                let (_, r): (_, SmatchScore) = hill_climb(&pred, &gold, &cfg)?;
                let elapsed = start.elapsed();
                if constrained {
                    row.time_constrained += elapsed;
                    row.f1_constrained.push(r.f1);
                } else {
                    row.time_unconstrained += elapsed;
                    row.f1_unconstrained.push(r.f1);
                }
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

pub fn to_json(rows: &[SizeRow], settings: &BenchSettings) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "sentences": r.sentences,
                "docs": r.docs,
                "variables": r.variables,
                "pool_unconstrained": r.pool_unconstrained,
                "pool_constrained": r.pool_constrained,
                "ms_unconstrained": millis(r.time_unconstrained),
                "ms_constrained": millis(r.time_constrained),
                "speedup": fixed(r.speedup()),
                "f1_unconstrained": fixed(mean(&r.f1_unconstrained)),
                "f1_constrained": fixed(mean(&r.f1_constrained)),
                "f1_shortfalls": r.shortfalls().len(),
                "f1_max_gap": fixed(r.max_gap()),
            })
        })
        .collect();
    json!({
        "schema": BENCH_SCHEMA,
        "seed": settings.search.seed,
        "restarts": settings.search.restarts,
        "noise": fixed(settings.noise),
        "sizes": rows,
    })
}

pub fn to_text(rows: &[SizeRow]) -> String {
    let mut out = format!(
        "{:>9} {:>5} {:>6} {:>8} {:>8} {:>10} {:>10} {:>8} {:>7} {:>7}\n",
        "sentences", "docs", "vars", "pool_u", "pool_c", "ms_u", "ms_c", "speedup", "f1_u", "f1_c"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>9} {:>5} {:>6} {:>8} {:>8} {:>10.2} {:>10.2} {:>8.2} {:>7.4} {:>7.4}\n",
            r.sentences,
            r.docs,
            r.variables,
            r.pool_unconstrained,
            r.pool_constrained,
            r.time_unconstrained.as_secs_f64() * 1000.0,
            r.time_constrained.as_secs_f64() * 1000.0,
            r.speedup(),
            mean(&r.f1_unconstrained),
            mean(&r.f1_constrained),
        ));
    }
    out
}
