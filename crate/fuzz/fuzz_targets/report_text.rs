#![no_main]

use libfuzzer_sys::fuzz_target;
use tusk::corpus::{tokenize, Abbreviations, ReportDocument};

fuzz_target!(|data: &str| {
    let doc = ReportDocument::from_text("fuzz-2021-01", 2021, 1, data, &Abbreviations::default()).expect("valid month");
    let mut last = 0;
    for sentence in &doc.sentences {
        assert!(sentence.start_char >= last && sentence.end_char <= data.len());
        for token in &sentence.tokens {
            assert_eq!(&data[token.start_char..token.end_char], token.text);
        }
        last = sentence.end_char;
    }
    let flat: Vec<_> = doc.sentences.iter().flat_map(|s| s.tokens.iter().cloned()).collect();
    assert_eq!(flat, tokenize(data));
});
