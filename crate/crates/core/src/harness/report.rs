//! Run reports. Every number is stored with its unit; the same report renders
//! as an aligned text table or as JSON. Nothing time- or host-dependent goes
//! in, so identical inputs give byte-identical output.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::Mode;
use crate::quat::{PureAxis, Quaternion};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Machine,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Quantity { value: f64, unit: &'static str },
    Count { value: u64, unit: &'static str },
    Text { text: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Field {
    pub name: String,
    #[serde(flatten)]
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub title: String,
    pub fields: Vec<Field>,
}

impl Section {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            fields: Vec::new(),
        }
    }

    pub fn quantity(
        &mut self,
        name: impl Into<String>,
        value: f64,
        unit: &'static str,
    ) -> &mut Self {
        self.fields.push(Field {
            name: name.into(),
            value: Value::Quantity { value, unit },
        });
        self
    }

    pub fn count(&mut self, name: impl Into<String>, value: u64) -> &mut Self {
        self.fields.push(Field {
            name: name.into(),
            value: Value::Count {
                value,
                unit: "count",
            },
        });
        self
    }

    pub fn text(&mut self, name: impl Into<String>, text: impl Into<String>) -> &mut Self {
        self.fields.push(Field {
            name: name.into(),
            value: Value::Text { text: text.into() },
        });
        self
    }

    /// Components `w, x, y, z` as `{name}.w` etc.
    pub fn quaternion(&mut self, name: &str, q: Quaternion, unit: &'static str) -> &mut Self {
        for (c, v) in ["w", "x", "y", "z"].iter().zip(q.to_array()) {
            self.quantity(format!("{name}.{c}"), v, unit);
        }
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.fields
            .iter()
            .find(|f| f.name == name)
            .map(|f| &f.value)
    }
}

pub fn axis_text(axis: PureAxis) -> String {
    match axis {
        a if a == PureAxis::I => "i".into(),
        a if a == PureAxis::J => "j".into(),
        a if a == PureAxis::K => "k".into(),
        a => {
            let [x, y, z] = a.components();
            format!("[{x}, {y}, {z}]")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub input: String,
    pub input_sha256: String,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(input: &str, bytes: &[u8], seed: Option<u64>) -> Self {
        let digest = Sha256::digest(bytes);
        let mut hex = String::with_capacity(64);
        for b in digest {
            write!(hex, "{b:02x}").expect("string write");
        }
        Self {
            tool: TOOL,
            version: VERSION,
            input: input.into(),
            input_sha256: hex,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub mode: Mode,
    pub provenance: Provenance,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn section(&self, title: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.title == title)
    }

    /// Looks up a numeric field by section title and field name.
    pub fn number(&self, title: &str, name: &str) -> Option<f64> {
        match self.section(title)?.get(name)? {
            Value::Quantity { value, .. } => Some(*value),
            Value::Count { value, .. } => Some(*value as f64),
            Value::Text { .. } => None,
        }
    }

    pub fn text(&self, title: &str, name: &str) -> Option<&str> {
        match self.section(title)?.get(name)? {
            Value::Text { text } => Some(text),
            _ => None,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.to_table(),
            Format::Machine => self.to_json(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let p = &self.provenance;
        let _ = writeln!(out, "{} {}  mode: {}", p.tool, p.version, self.mode);
        let _ = writeln!(out, "input: {}", p.input);
        let _ = writeln!(out, "sha256: {}", p.input_sha256);
        if let Some(seed) = p.seed {
            let _ = writeln!(out, "seed: {seed}");
        }
        let width = self
            .sections
            .iter()
            .flat_map(|s| s.fields.iter().map(|f| f.name.chars().count()))
            .max()
            .unwrap_or(0);
        for s in &self.sections {
            let _ = writeln!(out, "\n[{}]", s.title);
            for f in &s.fields {
                let (value, unit) = match &f.value {
                    Value::Quantity { value, unit } => (format_number(*value), *unit),
                    Value::Count { value, unit } => (value.to_string(), *unit),
                    Value::Text { text } => (text.clone(), ""),
                };
                let line = format!("  {:<width$}  {:>22}  {unit}", f.name, value);
                let _ = writeln!(out, "{}", line.trim_end());
            }
        }
        out
    }
}

fn format_number(v: f64) -> String {
    if v == 0.0 || (1e-4..1e6).contains(&v.abs()) {
        format!("{v:.12}")
    } else if v.is_finite() {
        format!("{v:.12e}")
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut s = Section::new("discriminator");
        s.quantity("F", 0.75, "1")
            .count("used", 10)
            .text("class", "QUATERNION_ADMISSIBLE");
        s.quantity("sigma", 1.5e-7, "barn");
        Report {
            mode: Mode::Classify,
            provenance: Provenance::new("x.csv", b"abc", None),
            sections: vec![s],
        }
    }

    #[test]
    fn digest_is_sha256() {
        assert_eq!(
            sample().provenance.input_sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn every_number_has_a_unit() {
        let json: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        for f in json["sections"][0]["fields"].as_array().unwrap() {
            if f.get("value").is_some() {
                assert!(f["unit"].is_string(), "{f}");
            }
        }
        assert_eq!(json["mode"], "classify");
        assert_eq!(json["sections"][0]["fields"][0]["value"], 0.75);
    }

    #[test]
    fn table_lines() {
        let t = sample().to_table();
        assert!(t.contains("[discriminator]"));
        assert!(t
            .lines()
            .any(|l| l.contains("F") && l.contains("0.750000000000") && l.ends_with(" 1")));
        assert!(t
            .lines()
            .any(|l| l.contains("1.500000000000e-7") && l.ends_with("barn")));
        assert!(t
            .lines()
            .any(|l| l.trim_end().ends_with("QUATERNION_ADMISSIBLE")));
        assert_eq!(sample().number("discriminator", "used"), Some(10.0));
        assert_eq!(
            sample().text("discriminator", "class"),
            Some("QUATERNION_ADMISSIBLE")
        );
    }
}
