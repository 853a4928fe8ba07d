#![no_main]

use libfuzzer_sys::fuzz_target;
use tusk::HeuristicConfig;

fuzz_target!(|data: &str| {
    if let Ok(config) = HeuristicConfig::parse(data) {
        assert_eq!(
            HeuristicConfig::parse(&config.to_text()).expect("own output parses"),
            config
        );
    }
});
