//! Lengths with mandatory units.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

/// A length as written in a scene file, e.g. `"200 nm"`. Converted to
/// meters by [`Length::meters`]; a missing or unknown unit is an error.
#[derive(Debug, Clone, PartialEq)]
pub struct Length(pub String);

const UNITS: [(&str, f64); 4] = [("nm", 1e-9), ("um", 1e-6), ("mm", 1e-3), ("m", 1.0)];

impl Length {
    /// Exact textual form of a value in meters; parses back bit-identically.
    pub fn from_meters(v: f64) -> Self {
        Length(format!("{v:?} m"))
    }

    pub fn meters(&self, field: &str) -> Result<f64, CliError> {
        let raw = self.0.trim();
        let split = raw.find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E');
        let unknown = || CliError::UnknownUnit {
            field: field.to_string(),
            value: self.0.clone(),
        };
        let at = split.ok_or_else(unknown)?;
        let (num, unit) = raw.split_at(at);
        let scale = UNITS
            .iter()
            .find(|(u, _)| *u == unit.trim())
            .map(|(_, s)| *s)
            .ok_or_else(unknown)?;
        let value: f64 = num.trim().parse().map_err(|_| CliError::Validation {
            entity: field.to_string(),
            reason: format!("`{}` is not a number", num.trim()),
        })?;
        if !value.is_finite() {
            return Err(CliError::Validation {
                entity: field.to_string(),
                reason: format!("`{}` is not finite", self.0),
            });
        }
        Ok(if scale == 1.0 { value } else { value * scale })
    }
}

impl Serialize for Length {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

struct LengthVisitor;

impl<'de> Visitor<'de> for LengthVisitor {
    type Value = Length;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a length such as \"200 nm\"")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Length, E> {
        Ok(Length(v.to_string()))
    }

    // bare numbers are kept so that the missing unit is reported as such
    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Length, E> {
        Ok(Length(format!("{v}")))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Length, E> {
        Ok(Length(format!("{v}")))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Length, E> {
        Ok(Length(format!("{v}")))
    }
}

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Length, D::Error> {
        d.deserialize_any(LengthVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Result<f64, CliError> {
        Length(s.into()).meters("x")
    }

    #[test]
    fn units() {
        assert_eq!(m("200 nm").unwrap(), 200.0 * 1e-9);
        assert_eq!(m("1.5um").unwrap(), 1.5 * 1e-6);
        assert_eq!(m("-25 nm").unwrap(), -25.0 * 1e-9);
        assert_eq!(m("2e-3 m").unwrap(), 2e-3);
        assert_eq!(m("3 mm").unwrap(), 3.0 * 1e-3);
    }

    #[test]
    fn missing_or_unknown_unit() {
        for s in ["200", "1e-6", "5 km", "4 inch", ""] {
            assert!(matches!(m(s), Err(CliError::UnknownUnit { .. })), "{s}");
        }
    }

    #[test]
    fn meters_round_trip_exactly() {
        for v in [1e-9 * 200.0, 0.1 + 0.2, -1.234_567_890_123e-7, 5e-324] {
            assert_eq!(Length::from_meters(v).meters("x").unwrap(), v);
        }
    }
}
