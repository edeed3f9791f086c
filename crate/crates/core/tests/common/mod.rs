#![allow(dead_code)]

use std::path::PathBuf;

use integra_core::lexicon::Lexicon;
use integra_core::matcher::Matcher;
use integra_core::morphology::{expand_lexicon, ExpandedLexicon};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn bundled_expanded() -> ExpandedLexicon {
    expand_lexicon(&Lexicon::bundled().expect("bundled lexicon parses")).expect("bundled lexicon expands")
}

pub fn bundled_matcher() -> Matcher {
    Matcher::new(&bundled_expanded())
}
