#![no_main]

use bloch_kit::symbols::{parse_symbol, Symbol};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(expr) = parse_symbol(text) {
        // the canonical printer must reparse to the same tree
        let printed = expr.to_string();
        assert_eq!(parse_symbol(&printed).as_ref(), Ok(&expr), "{printed}");
    }
    if text.len() <= 256 {
        let _ = Symbol::parse(text);
    }
});
