#![no_main]

use abdg_cli::config::CONFIG_KEYS;
use abdg_cli::{parse_config, RawSettings, RunConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(map) = parse_config(text) else { return };
    for k in map.keys() {
        assert!(
            CONFIG_KEYS.contains(&k.as_str()) || k.starts_with("param."),
            "unknown key {k:?} accepted"
        );
    }
    // Validation may reject the settings but must not panic.
    let _ = RunConfig::from_raw(RawSettings::from_config(&map));
});
