//! Document-level AMR: building unified document graphs from sentence
//! graphs plus coreference, and scoring them with Smatch.

pub mod builder;
pub mod document;
pub mod error;
pub mod inject;
pub mod penman;
pub mod scalar;
pub mod smatch;
pub mod synth;

pub use error::{Error, Result};

pub type Rational = num_rational::Ratio<i64>;
pub type SmatchScore = smatch::SmatchResult<f64>;
pub type ExactSmatchScore = smatch::SmatchResult<Rational>;
pub type CorpusScore = smatch::CorpusResult<f64>;
