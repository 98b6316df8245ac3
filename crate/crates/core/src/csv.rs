//! Shared CSV formatting.

/// Version of every CSV schema emitted by this crate.
pub const SCHEMA_VERSION: u32 = 1;

/// Formats a float with 12 significant digits in a locale-independent way.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{:.11e}", v);
    // Re-parse so trailing zeros and small exponents come out in plain form.
    let rounded: f64 = s.parse().unwrap_or(v);
    let plain = format!("{rounded}");
    if plain.len() <= 20 {
        plain
    } else {
        let (mant, exp) = s.split_once('e').unwrap_or((&s, "0"));
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{mant}e{exp}")
    }
}
