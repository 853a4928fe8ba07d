#![no_main]

use libfuzzer_sys::fuzz_target;
use tusk::corpus::parse_report_name;

fuzz_target!(|data: &str| {
    if let Ok(name) = parse_report_name(data) {
        assert!((1..=12).contains(&name.month));
        assert!(data.starts_with(&name.report_id));
    }
});
