#![no_main]

use galled_census_core::io::parse_ns_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(ns) = parse_ns_list(data) {
        assert!(ns.iter().all(|&n| n > 0));
        let joined = ns.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        assert_eq!(parse_ns_list(&joined).unwrap(), ns);
    }
});
