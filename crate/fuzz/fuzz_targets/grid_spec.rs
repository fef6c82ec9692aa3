#![no_main]

use abdg_cli::config::{MAX_GRID, MIN_GRID};
use abdg_cli::parse_grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = std::str::from_utf8(data) else { return };
    let Ok((n, m)) = parse_grid(spec) else { return };
    assert!((MIN_GRID..=MAX_GRID).contains(&n) && (MIN_GRID..=MAX_GRID).contains(&m));
    assert_eq!(parse_grid(&format!("{n}x{m}")).unwrap(), (n, m));
});
