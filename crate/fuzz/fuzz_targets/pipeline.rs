#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use tusk::corpus::{Abbreviations, ReportDocument};
use tusk::{HeuristicConfig, Lexicon, Pipeline};

fuzz_target!(|data: &str| {
    static PIPELINE: OnceLock<Pipeline> = OnceLock::new();
    let pipeline = PIPELINE.get_or_init(|| Pipeline::new(&Lexicon::shipped(), HeuristicConfig::default()));
    let doc = ReportDocument::from_text("fuzz-2021-01", 2021, 1, data, &Abbreviations::default()).expect("valid month");
    for event in pipeline.extract(&doc) {
        assert!(event.species.is_some() || event.product.is_some() || event.arrest_count.is_some());
        assert!(event.sentence_index < doc.sentences.len());
    }
});
