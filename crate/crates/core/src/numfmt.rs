//! Canonical float formatting shared by every text artifact (CSV, layout
//! files, debug dumps): 17 significant digits, enough to round-trip f64
//! exactly, rendered deterministically.

pub fn f64_repr(x: f64) -> String {
    format!("{x:.16e}")
}
