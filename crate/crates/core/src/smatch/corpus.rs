use rayon::prelude::*;

use super::{score_pair, SearchConfig, SmatchResult};
use crate::builder::DocGraph;
use crate::scalar::Scalar;
use crate::smatch::extract_triples;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusResult<T> {
    /// Micro-average: counts summed over documents before dividing.
    pub total: SmatchResult<T>,
    pub per_doc: Vec<(String, SmatchResult<T>)>,
}

/// Scores `pred` against `gold`, pairing documents by position. Documents
/// are scored in parallel; results keep input order.
pub fn score_corpus<T: Scalar>(gold: &[DocGraph], pred: &[DocGraph], config: &SearchConfig) -> Result<CorpusResult<T>> {
    config.validate()?;
    if gold.len() != pred.len() {
        return Err(Error::Usage(format!(
            "gold has {} documents but prediction has {}",
            gold.len(),
            pred.len()
        )));
    }
    for (g, p) in gold.iter().zip(pred) {
        if g.doc_id() != p.doc_id() {
            return Err(Error::Usage(format!(
                "document ids differ: gold {} vs prediction {}",
                g.doc_id(),
                p.doc_id()
            )));
        }
    }
    let start = std::time::Instant::now();
    let per_doc: Vec<(String, SmatchResult<T>)> = gold
        .par_iter()
        .zip(pred.par_iter())
        .map(|(g, p)| {
            let (_, result) = score_pair::<T>(&extract_triples(p), &extract_triples(g), config)?;
            Ok((g.doc_id().to_string(), result))
        })
        .collect::<Result<_>>()?;
    let mut counts = super::Counts::default();
    for (_, r) in &per_doc {
        counts += r.counts;
    }
    let mut total = SmatchResult::from_counts(counts, config.restarts);
    total.elapsed = start.elapsed();
    Ok(CorpusResult { total, per_doc })
}
