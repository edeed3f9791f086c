//! Corpus toolkit for measuring how English loanword verbs integrate into
//! Spanish social-media usage: lexicon, morphology, matching, language
//! identification, author features and statistics.

pub mod features;
pub mod ingest;
pub mod langid;
pub mod lexicon;
pub mod matcher;
pub mod morphology;
pub mod normalize;
pub mod pipeline;
pub mod stats;
pub mod synth;
