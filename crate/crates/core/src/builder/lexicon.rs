use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use super::resources::{load_text, tsv_pairs};
use crate::{Error, Result};

const BUNDLED: &str = include_str!("../../data/pronouns.tsv");

/// Specificity tiers, most specific first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PronounTier {
    Personal,
    Demonstrative,
    IndefinitePerson,
    IndefiniteThing,
    Generic,
}

impl FromStr for PronounTier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "personal" => PronounTier::Personal,
            "demonstrative" => PronounTier::Demonstrative,
            "indefinite-person" => PronounTier::IndefinitePerson,
            "indefinite-thing" => PronounTier::IndefiniteThing,
            "generic" => PronounTier::Generic,
            other => return Err(format!("unknown pronoun tier {other}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PronounLexicon {
    tiers: BTreeMap<String, PronounTier>,
    interlocutors: BTreeSet<String>,
}

impl PronounLexicon {
    pub fn from_tsv(source: &str, text: &str) -> Result<Self> {
        let mut tiers = BTreeMap::new();
        for row in tsv_pairs(source, text) {
            let (line, concept, tier) = row?;
            let tier = tier.parse().map_err(|message| Error::Data {
                path: source.to_string(),
                message: format!("line {line}: {message}"),
            })?;
            tiers.insert(concept.to_string(), tier);
        }
        let interlocutors = ["i", "you"]
            .into_iter()
            .filter(|c| tiers.contains_key(*c))
            .map(str::to_string)
            .collect();
        Ok(PronounLexicon { tiers, interlocutors })
    }

    pub fn bundled() -> Self {
        Self::from_tsv("<bundled pronouns.tsv>", BUNDLED).expect("bundled lexicon is valid")
    }

    /// `$DOCAMR_DATA/pronouns.tsv` if present, else the bundled list.
    pub fn load() -> Result<Self> {
        let (source, text) = load_text("pronouns.tsv", BUNDLED)?;
        Self::from_tsv(&source, &text)
    }

    pub fn is_pronoun(&self, concept: &str) -> bool {
        self.tiers.contains_key(concept)
    }

    pub fn tier(&self, concept: &str) -> Option<PronounTier> {
        self.tiers.get(concept).copied()
    }

    pub fn is_interlocutor(&self, concept: &str) -> bool {
        self.interlocutors.contains(concept)
    }

    /// Most specific concept; within a tier the first one given wins.
    pub fn most_specific<'a, I>(&self, concepts: I) -> Option<&'a str>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut best: Option<(&'a str, PronounTier)> = None;
        for c in concepts {
            let Some(t) = self.tier(c) else { continue };
            if best.is_none_or(|(_, bt)| t < bt) {
                best = Some((c, t));
            }
        }
        best.map(|(c, _)| c)
    }
}

impl Default for PronounLexicon {
    fn default() -> Self {
        Self::bundled()
    }
}
