#![no_main]

use galled_census_core::io::parse_dist_csv;
use galled_census_core::series::ExactRational;
use libfuzzer_sys::fuzz_target;
use num_traits::One;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(dist) = parse_dist_csv(text) {
        let mass: ExactRational = dist.weights().into_iter().sum();
        assert!(mass.is_one());
    }
});
