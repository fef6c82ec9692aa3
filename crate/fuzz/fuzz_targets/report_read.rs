#![no_main]

use abdg_core::report::{read_report, write_report};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(report) = read_report(text) else { return };
    // Writing is canonical: a written report reads back and rewrites to the same bytes.
    let once = write_report(&report);
    let again = write_report(&read_report(&once).expect("written report reads back"));
    assert_eq!(once, again);
});
