//! Output formatting: every float is serialized with 17 significant digits
//! so that JSON and CSV round-trip bit-faithfully.

use std::io::{self, Write};

/// 17-significant-digit rendering of a float.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON formatter that writes floats through [`float`].
pub struct Sig17Formatter;

impl serde_json::ser::Formatter for Sig17Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes `value` as compact JSON with bit-faithful floats.
pub fn to_json_string<T: serde::Serialize>(value: &T) -> io::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17Formatter);
    value
        .serialize(&mut ser)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trips() {
        for x in [0.0, -1.5, 0.1, std::f64::consts::PI, 1e-300, -2.2250738585072014e-308] {
            let s = float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn json_floats_round_trip() {
        let v = vec![0.1f64, 1.0 / 3.0, 123456.789];
        let text = to_json_string(&v).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(v, back);
    }
}
