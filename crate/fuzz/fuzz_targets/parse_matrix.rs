#![no_main]

use libfuzzer_sys::fuzz_target;
use theta_hecke::lattice::intmat::{format_matrix, parse_matrix};
use theta_hecke::lattice::IntegralLattice;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(m) = parse_matrix(text) else { return };
    assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
    // validation must reject or accept without panicking
    if m.len() <= 8 {
        let _ = IntegralLattice::new(m);
    }
});
