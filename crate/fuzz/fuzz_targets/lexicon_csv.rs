#![no_main]

use libfuzzer_sys::fuzz_target;
use tusk::corpus::{Abbreviations, ReportDocument};
use tusk::{compile, find_entities, Lexicon};

fuzz_target!(|data: &str| {
    let Ok(lexicon) = Lexicon::parse(data, "fuzz") else {
        return;
    };
    let matcher = compile(&lexicon);
    let text: Vec<&str> = lexicon.iter().map(|(surface, _, _)| surface).take(64).collect();
    let doc = ReportDocument::from_text("fuzz-2021-01", 2021, 1, text.join(" , "), &Abbreviations::empty())
        .expect("valid month");
    for span in find_entities(&doc, &matcher) {
        assert!(lexicon.get(&span.text).is_some());
    }
});
