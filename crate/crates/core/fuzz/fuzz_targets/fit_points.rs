#![no_main]

use dihedral_rb::estimation::fit::{
    fit_exponential_with_offset, fit_single_exponential, DecayPoint,
};
use libfuzzer_sys::fuzz_target;

// 24 bytes per point: m, y, stderr as little-endian f64
fuzz_target!(|data: &[u8]| {
    let points: Vec<DecayPoint> = data
        .chunks_exact(24)
        .take(64)
        .map(|c| {
            let f = |i: usize| f64::from_le_bytes(c[8 * i..8 * i + 8].try_into().unwrap());
            DecayPoint::new(f(0), f(1), f(2))
        })
        .collect();
    if let Ok(fit) = fit_single_exponential(&points) {
        assert!(fit.rate.is_finite() && fit.rate > 0.0 && fit.rate <= 1.05);
    }
    let _ = fit_exponential_with_offset(&points);
});
