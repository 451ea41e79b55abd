//! Byte-stable serialisation helpers: JSON with sorted keys, CSV with LF.

use serde::Serialize;

/// Compact JSON with object keys in sorted order.
pub fn to_sorted_json<T: Serialize + ?Sized>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("value serialises");
    serde_json::to_string(&v).expect("json value prints")
}

/// Indented JSON with sorted keys and a trailing newline.
pub fn to_sorted_json_pretty<T: Serialize + ?Sized>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("value serialises");
    let mut s = serde_json::to_string_pretty(&v).expect("json value prints");
    s.push('\n');
    s
}

/// Formats a float for CSV output; infinities print as `inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

/// Joins rows into CSV text with a header and LF line endings.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}
