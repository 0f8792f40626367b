//! Fixed-format numbers for CSV and JSON output.

use std::collections::BTreeMap;

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Scientific notation with 9 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

/// A float serialized as a JSON number in [`sci`] format, or `null` when not finite.
#[derive(Debug, Clone, Copy)]
pub struct Sci(pub f64);

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            RawValue::from_string(sci(self.0))
                .map_err(S::Error::custom)?
                .serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

pub fn sci_vec(v: &[f64]) -> Vec<Sci> {
    v.iter().copied().map(Sci).collect()
}

/// Reasons for fields emitted as `null`, keyed by field name.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Reasons(BTreeMap<&'static str, String>);

impl Reasons {
    /// Keeps the value, or records why it is missing.
    pub fn take<V, E: std::fmt::Display>(
        &mut self,
        field: &'static str,
        r: Result<V, E>,
    ) -> Option<V> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.0.insert(field, e.to_string());
                None
            }
        }
    }

    /// Like [`Reasons::take`] for floats, also rejecting non-finite values.
    pub fn number<E: std::fmt::Display>(
        &mut self,
        field: &'static str,
        r: Result<f64, E>,
    ) -> Option<Sci> {
        match self.take(field, r) {
            Some(v) if v.is_finite() => Some(Sci(v)),
            Some(v) => {
                self.0.insert(field, format!("not finite ({v})"));
                None
            }
            None => None,
        }
    }
}

/// CSV text with LF line endings.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &[String]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Self { buf }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
