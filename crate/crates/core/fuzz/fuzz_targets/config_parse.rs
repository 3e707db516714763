#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = dihedral_rb::cli::parse_config(text) {
        // keep the group small so plan construction stays cheap
        if cfg.group.j <= 64 {
            let _ = cfg.to_plan();
        }
    }
});
