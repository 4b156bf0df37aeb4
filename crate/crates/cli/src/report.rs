use serde::Serialize;
use serde_json::Value;

pub const TOOL: &str = "polarconv";

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub window: Value,
    pub probe_families: Vec<String>,
    pub notes: Vec<String>,
}

/// Field order is the serialization order and is part of the format.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub results: Value,
    pub provenance: Provenance,
}

/// What a subcommand produces before it is wrapped in a [`Report`].
pub struct Outcome {
    pub checks: Vec<Check>,
    pub results: Value,
    pub probe_families: Vec<String>,
    pub notes: Vec<String>,
    pub csv: String,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Floats in CSV use Rust's shortest round-trip form.
pub fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

pub fn f(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or(String::new(), |v| v.to_string())
}
