#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = hazbench::dsl::parse_testspec(data, "fuzz");
});
