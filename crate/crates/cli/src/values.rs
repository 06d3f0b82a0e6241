//! Flag and job-file value types. Each accepts a compact string on the
//! command line and either that string or a JSON array in job files.

use geniter::raster::Coord;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

#[derive(Debug)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseError {}

fn parse_f64(s: &str) -> Result<f64, ParseError> {
    let t = s.trim();
    t.parse::<f64>()
        .map_err(|_| ParseError(format!("`{t}` is not a number")))
}

/// Comma-separated reals: `12.5,13.5`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct NumList(pub Vec<f64>);

impl FromStr for NumList {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        s.split(',').map(parse_f64).collect::<Result<_, _>>().map(NumList)
    }
}

impl<'de> Deserialize<'de> for NumList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<f64>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(v) => Ok(NumList(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl NumList {
    pub fn pair(&self, what: &str) -> Result<(f64, f64), String> {
        match self.0.as_slice() {
            [a, b] => Ok((*a, *b)),
            _ => Err(format!("{what} needs exactly two numbers")),
        }
    }
}

/// Comma-separated unsigned integers: `8,8,4`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UintList(pub Vec<u64>);

impl FromStr for UintList {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| ParseError(format!("`{}` is not a non-negative integer", t.trim())))
            })
            .collect::<Result<_, _>>()
            .map(UintList)
    }
}

impl<'de> Deserialize<'de> for UintList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<u64>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(v) => Ok(UintList(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A complex literal: `1.5`, `0.3+0.2i`, `-2i`, `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexValue(pub f64, pub f64);

fn imaginary_coefficient(s: &str) -> Result<f64, ParseError> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => parse_f64(s),
    }
}

impl FromStr for ComplexValue {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = t.strip_suffix('i') else {
            return Ok(ComplexValue(parse_f64(&t)?, 0.0));
        };
        // Split at the last sign that is not part of an exponent.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        match split {
            Some(k) => Ok(ComplexValue(
                parse_f64(&body[..k])?,
                imaginary_coefficient(&body[k..])?,
            )),
            None => Ok(ComplexValue(0.0, imaginary_coefficient(body)?)),
        }
    }
}

impl Serialize for ComplexValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.1 == 0.0 {
            s.serialize_f64(self.0)
        } else {
            [self.0, self.1].serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for ComplexValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(f64),
            Pair([f64; 2]),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Real(v) => Ok(ComplexValue(v, 0.0)),
            Raw::Pair([re, im]) => Ok(ComplexValue(re, im)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Comma-separated complex literals, used for seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ComplexList(pub Vec<ComplexValue>);

impl FromStr for ComplexList {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        s.split(',').map(str::parse).collect::<Result<_, _>>().map(ComplexList)
    }
}

impl<'de> Deserialize<'de> for ComplexList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<ComplexValue>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(v) => Ok(ComplexList(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Seed bindings for raster cells: `h`, `v`, `plane`, or a complex
/// constant, comma-separated (`h,v,0.5`).
#[derive(Debug, Clone, PartialEq)]
pub struct Binding(pub Vec<Coord>);

fn parse_coord(s: &str) -> Result<Coord, ParseError> {
    match s.trim() {
        "h" | "horizontal" | "x" => Ok(Coord::Horizontal),
        "v" | "vertical" | "y" => Ok(Coord::Vertical),
        "p" | "plane" => Ok(Coord::Plane),
        other => {
            let ComplexValue(re, im) = other.parse()?;
            Ok(Coord::Fixed(re, im))
        }
    }
}

fn coord_text(c: &Coord) -> String {
    match c {
        Coord::Horizontal => "h".into(),
        Coord::Vertical => "v".into(),
        Coord::Plane => "plane".into(),
        Coord::Fixed(re, 0.0) => format!("{re}"),
        Coord::Fixed(re, im) => format!("{re}{im:+}i"),
    }
}

impl FromStr for Binding {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        s.split(',').map(parse_coord).collect::<Result<_, _>>().map(Binding)
    }
}

impl Serialize for Binding {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.0.iter().map(coord_text).collect();
        s.serialize_str(&parts.join(","))
    }
}

impl<'de> Deserialize<'de> for Binding {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<String>),
            Text(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::List(v) => v.join(","),
            Raw::Text(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}
