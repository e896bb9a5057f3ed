#![no_main]

use galled_census_core::io::{parse_dist_csv, DistTable};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(dist) = DistTable::from_json(text) {
        assert_eq!(DistTable::from_json(&dist.to_json()).unwrap(), dist);
        let csv = parse_dist_csv(&dist.to_csv()).unwrap();
        assert_eq!(csv.rows, dist.rows);
    }
});
