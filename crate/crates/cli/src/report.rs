//! Compact JSON with every float written to 17 significant digits, so equal
//! inputs give byte-identical reports.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};
use serde_json::Value;

struct Fixed17;

impl Formatter for Fixed17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_string(value: &Value) -> String {
    let mut out = Vec::new();
    value
        .serialize(&mut Serializer::with_formatter(&mut out, Fixed17))
        .expect("serializing a Value into memory cannot fail");
    String::from_utf8(out).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(to_string(&json!({"x": 0.1})), r#"{"x":1.0000000000000001e-1}"#);
        assert_eq!(to_string(&json!([1.0, 2])), "[1.0000000000000000e0,2]");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [std::f64::consts::PI, -1e-300, 123456.789, 0.0] {
            let text = to_string(&json!(v));
            assert_eq!(text.parse::<f64>().unwrap(), v);
        }
    }
}
