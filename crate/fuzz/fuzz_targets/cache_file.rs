#![no_main]

use galled_census_core::io::CacheFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = CacheFile::from_json(text) else {
        return;
    };
    let n = file.n_table();
    let b = file.b_table();
    // Anything that decodes must survive a write/read cycle unchanged.
    if let (Ok(n), Ok(b)) = (n, b) {
        let again = CacheFile::from_json(&CacheFile::new(n.as_ref(), b.as_ref()).to_json()).unwrap();
        assert_eq!(again.n_table().unwrap(), n);
        assert_eq!(again.b_table().unwrap(), b);
    }
});
