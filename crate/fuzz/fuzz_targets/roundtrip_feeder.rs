#![no_main]

use hazbench::dsl::{parse_feeder, serialize_feeder};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(first) = parse_feeder(data, "fuzz") {
        let text = serialize_feeder(&first);
        let second = parse_feeder(&text, "fuzz").expect("serialized feeder parses");
        assert_eq!(first, second);
    }
});
