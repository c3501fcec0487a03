#![no_main]

use libfuzzer_sys::fuzz_target;
use theta_hecke::FourierMap;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(m) = FourierMap::from_json(text) else { return };
    let again = FourierMap::from_json(&m.to_json()).expect("own output parses");
    assert_eq!(again, m);
});
