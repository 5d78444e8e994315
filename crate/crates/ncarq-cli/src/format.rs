//! Deterministic text formatting for the CSV reports: floats carry nine
//! significant digits so reruns are byte-identical and diffable.

/// Format with nine significant digits; positional notation for magnitudes
/// between 1e-4 and 1e9, scientific otherwise.
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".to_string() } else { "-inf".to_string() };
    }
    let sci = format!("{:.8e}", x);
    let exp: i32 = sci[sci.find('e').expect("exponent marker") + 1..]
        .parse()
        .expect("well-formed exponent");
    if (-4..=8).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        sci
    }
}

/// RFC-4180 field quoting: only when the value embeds a delimiter, quote or
/// line break.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
