//! Plain-text number formatting shared by the CSV writers.

/// Formats a float with 17 significant digits, enough for an exact
/// round-trip through `str::parse::<f64>`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}
