#![no_main]

use libfuzzer_sys::fuzz_target;
use usertype::ingest::Timestamp;

fuzz_target!(|s: &str| {
    if let Ok(t) = Timestamp::parse(s) {
        assert_eq!(Timestamp::parse(&t.to_string()), Ok(t));
    }
});
