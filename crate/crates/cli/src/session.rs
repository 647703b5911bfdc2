//! Named bindings persisted as a version-tagged JSON document.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::Path;

use kval_core::text::{
    is_valid_binding_name, parse_field, parse_gamma, parse_series_file, print_field,
    print_series_file,
};
use kval_core::{Error, FieldElem, GammaVal, PowerSeries, Result};
use serde::{Deserialize, Serialize};

pub const SESSION_VERSION: u32 = 1;

/// One stored value, kept in its canonical text form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Binding {
    Field { value: String },
    Gamma { value: String },
    Series { value: String },
    Report { command: String, text: String, data: serde_json::Value },
}

impl Binding {
    pub fn kind(&self) -> &'static str {
        match self {
            Binding::Field { .. } => "field",
            Binding::Gamma { .. } => "gamma",
            Binding::Series { .. } => "series",
            Binding::Report { .. } => "report",
        }
    }

    pub fn field(a: &FieldElem) -> Self {
        Binding::Field { value: print_field(a) }
    }

    pub fn gamma(g: &GammaVal) -> Self {
        Binding::Gamma { value: g.to_string() }
    }

    pub fn series(s: &PowerSeries) -> Result<Self> {
        Ok(Binding::Series { value: print_series_file(s)? })
    }

    /// Canonical text shown by `session load`.
    pub fn text(&self) -> &str {
        match self {
            Binding::Field { value } | Binding::Gamma { value } | Binding::Series { value } => value,
            Binding::Report { text, .. } => text,
        }
    }

    pub fn as_field(&self) -> Option<FieldElem> {
        match self {
            Binding::Field { value } => parse_field(value).ok(),
            _ => None,
        }
    }

    pub fn as_gamma(&self) -> Option<GammaVal> {
        match self {
            Binding::Gamma { value } => parse_gamma(value).ok(),
            _ => None,
        }
    }

    pub fn as_series(&self) -> Option<PowerSeries> {
        match self {
            Binding::Series { value } => parse_series_file(value).ok(),
            _ => None,
        }
    }

    fn check(&self) -> Result<()> {
        let ok = match self {
            Binding::Field { .. } => self.as_field().is_some(),
            Binding::Gamma { .. } => self.as_gamma().is_some(),
            Binding::Series { .. } => self.as_series().is_some(),
            Binding::Report { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("stored {} value does not parse", self.kind())))
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub version: u32,
    pub bindings: BTreeMap<String, Binding>,
}

impl Session {
    pub fn new() -> Self {
        Session {
            version: SESSION_VERSION,
            bindings: BTreeMap::new(),
        }
    }

    pub fn from_json(src: &str) -> Result<Self> {
        if src.trim().is_empty() {
            return Ok(Session::new());
        }
        let s: Session = serde_json::from_str(src)
            .map_err(|e| Error::Domain(format!("malformed session file: {e}")))?;
        if s.version != SESSION_VERSION {
            return Err(Error::Domain(format!(
                "unsupported session version {} (expected {SESSION_VERSION})",
                s.version
            )));
        }
        for (name, b) in &s.bindings {
            if !is_valid_binding_name(name) {
                return Err(Error::Domain(format!("invalid binding name `{name}` in session")));
            }
            b.check()?;
        }
        Ok(s)
    }

    /// Deterministic serialization: sorted keys, two-space indent, trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("session serializes");
        out.push('\n');
        out
    }

    pub fn insert(&mut self, name: &str, b: Binding) -> Result<()> {
        if !is_valid_binding_name(name) {
            return Err(Error::Domain(format!(
                "`{name}` is not a usable name: it must match [A-Za-z_][A-Za-z0-9_]* and not be \
                 a variable X<n>, a generator g<n> or a reserved word"
            )));
        }
        self.bindings.insert(name.to_string(), b);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Binding> {
        self.bindings.get(name)
    }

    pub fn field(&self, name: &str) -> Option<FieldElem> {
        self.get(name).and_then(Binding::as_field)
    }
}

/// A session file held under an exclusive advisory lock until dropped.
pub struct SessionFile {
    file: File,
    pub session: Session,
    original: String,
}

impl SessionFile {
    pub fn open(path: &Path) -> Result<Self> {
        let io = |e: std::io::Error| Error::Domain(format!("session file {}: {e}", path.display()));
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(path)
            .map_err(io)?;
        file.lock().map_err(io)?;
        let mut original = String::new();
        file.read_to_string(&mut original).map_err(io)?;
        let session = Session::from_json(&original)?;
        Ok(SessionFile {
            file,
            session,
            original,
        })
    }

    /// Rewrites the file when the bindings changed.
    pub fn store(&mut self) -> Result<()> {
        let text = self.session.to_json();
        if text == self.original {
            return Ok(());
        }
        let io = |e: std::io::Error| Error::Domain(format!("writing session file: {e}"));
        self.file.seek(SeekFrom::Start(0)).map_err(io)?;
        self.file.set_len(0).map_err(io)?;
        self.file.write_all(text.as_bytes()).map_err(io)?;
        self.file.flush().map_err(io)?;
        self.original = text;
        Ok(())
    }
}

impl Drop for SessionFile {
    fn drop(&mut self) {
        let _ = self.file.unlock();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_byte_stable() {
        let mut s = Session::new();
        s.insert("b", Binding::field(&FieldElem::var(2))).unwrap();
        s.insert("a", Binding::gamma(&GammaVal::generator_pow(1, -1))).unwrap();
        let text = s.to_json();
        let back = Session::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
    }

    #[test]
    fn reserved_names_are_refused() {
        let mut s = Session::new();
        for bad in ["X1", "g2", "z", "y", "1a", ""] {
            assert!(s.insert(bad, Binding::field(&FieldElem::one())).is_err(), "{bad}");
        }
        assert!(s.insert("_x1", Binding::field(&FieldElem::one())).is_ok());
    }

    #[test]
    fn unknown_fields_are_ignored() {
        let src = r#"{"version": 1, "future": true, "bindings": {"a": {"kind": "field", "value": "X1", "note": 3}}}"#;
        let s = Session::from_json(src).unwrap();
        assert_eq!(s.field("a"), Some(FieldElem::var(1)));
    }
}
