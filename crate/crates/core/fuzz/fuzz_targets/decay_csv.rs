#![no_main]

use dihedral_rb::estimation::{fit_dataset, Combination, DecayDataset, FitOptions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(ds) = DecayDataset::from_csv(data) else {
        return;
    };
    let _ = ds.combination(Combination::Parity);
    let _ = ds.combination(Combination::Faithful);
    let _ = fit_dataset(&ds, &FitOptions::default());
    let text = ds.to_csv_string().expect("parsed data serializes");
    let again = DecayDataset::from_csv(text.as_bytes()).expect("serialized data parses");
    assert_eq!(again.rows.len(), ds.rows.len());
});
