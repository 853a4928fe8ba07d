#![no_main]

use libfuzzer_sys::fuzz_target;
use tusk::store::{import_csv, write_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(events) = import_csv(data) else { return };
    let mut first = Vec::new();
    write_csv(&events, &mut first).expect("in-memory write");
    let again = import_csv(first.as_slice()).expect("own output parses");
    let mut second = Vec::new();
    write_csv(&again, &mut second).expect("in-memory write");
    assert_eq!(first, second);
});
