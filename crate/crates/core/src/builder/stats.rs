use serde::Serialize;

use super::{DocGraph, Mode, PronounTarget};
use crate::document::Document;
use crate::{Error, Result};

/// Merge counters over one or more documents.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub nodes_in_chains: usize,
    pub pronouns_in_chains: usize,
    pub pronouns_merged_into_pronoun: usize,
    pub pronouns_merged_into_interlocutor_entity: usize,
    pub pronouns_merged_into_other_node: usize,
    pub pronouns_merged_into_coref_entity: usize,
    pub named_entities_in_chains: usize,
    pub named_entities_after_merge: usize,
}

impl std::ops::AddAssign for StatsReport {
    fn add_assign(&mut self, o: Self) {
        self.nodes_in_chains += o.nodes_in_chains;
        self.pronouns_in_chains += o.pronouns_in_chains;
        self.pronouns_merged_into_pronoun += o.pronouns_merged_into_pronoun;
        self.pronouns_merged_into_interlocutor_entity += o.pronouns_merged_into_interlocutor_entity;
        self.pronouns_merged_into_other_node += o.pronouns_merged_into_other_node;
        self.pronouns_merged_into_coref_entity += o.pronouns_merged_into_coref_entity;
        self.named_entities_in_chains += o.named_entities_in_chains;
        self.named_entities_after_merge += o.named_entities_after_merge;
    }
}

pub fn chain_statistics(doc: &Document, built: &DocGraph) -> Result<StatsReport> {
    if built.mode != Some(Mode::DocAmr) {
        let mode = built.mode.map_or("unknown".to_string(), |m| m.to_string());
        return Err(Error::Usage(format!(
            "merge statistics need a graph built in docamr mode, got {mode}"
        )));
    }
    if built.doc_id() != doc.doc_id || built.outcomes.len() != doc.annotation.chains.len() {
        return Err(Error::Usage(format!(
            "graph {} was not built from document {}",
            built.doc_id(),
            doc.doc_id
        )));
    }
    let mut report = StatsReport::default();
    for o in &built.outcomes {
        report.nodes_in_chains += o.members;
        report.pronouns_in_chains += o.pronouns;
        report.named_entities_in_chains += o.named_entities;
        report.named_entities_after_merge += o.named_entities_after;
        let slot = match o.pronoun_target {
            Some(PronounTarget::Pronoun) => &mut report.pronouns_merged_into_pronoun,
            Some(PronounTarget::InterlocutorEntity) => &mut report.pronouns_merged_into_interlocutor_entity,
            Some(PronounTarget::OtherNode) => &mut report.pronouns_merged_into_other_node,
            Some(PronounTarget::CorefEntity) => &mut report.pronouns_merged_into_coref_entity,
            None => continue,
        };
        *slot += o.pronouns;
    }
    Ok(report)
}
