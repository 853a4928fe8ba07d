#![no_main]

use libfuzzer_sys::fuzz_target;
use tusk::corpus::tokenize;
use tusk::measure::{detect_arrest_count_with, find_numbers, find_weights, parse_number, ArrestRule};

fuzz_target!(|data: &str| {
    let tokens = tokenize(data);
    if let Some((_, used)) = parse_number(&tokens) {
        assert!(used >= 1 && used <= tokens.len());
    }
    for w in find_weights(&tokens) {
        assert!(w.start < w.end && w.end <= tokens.len());
        assert!(w.weight.value_kg >= 0.0);
    }
    for (start, end, _) in find_numbers(&tokens) {
        assert!(start < end && end <= tokens.len());
    }
    let _ = detect_arrest_count_with(&tokens, ArrestRule::default());
});
