#![no_main]

use libfuzzer_sys::fuzz_target;
use usertype::ingest::scan_entities;

fuzz_target!(|s: &str| {
    let counts = scan_entities(s);
    let total = counts.hashtags + counts.urls + counts.mentions;
    assert!(total as usize <= s.len());
});
