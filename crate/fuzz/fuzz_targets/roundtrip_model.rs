#![no_main]

use hazbench::dsl::{parse_bundle, serialize_bundle};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(first) = parse_bundle(data, "fuzz") {
        let text = serialize_bundle(&first);
        let second = parse_bundle(&text, "fuzz").expect("serialized model parses");
        assert_eq!(first, second);
    }
});
