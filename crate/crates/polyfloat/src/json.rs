//! JSON serialization helpers. All floats are printed at 17 significant
//! digits so that serialized artifacts round-trip bit-exactly.

use serde::Serialize;
use std::io;

#[derive(Default)]
struct G17Formatter;

impl serde_json::ser::Formatter for G17Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{:.16e}", value)
    }
}

/// Serializes `value` as compact JSON with 17-significant-digit floats.
pub fn to_string_g17<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17Formatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits utf8"))
}
