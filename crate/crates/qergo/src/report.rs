use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">")]
    Above,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Below => "<",
            Relation::AtMost => "<=",
            Relation::Above => ">",
        }
    }
}

/// One thresholded quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, threshold: f64) -> Self {
        let pass = match relation {
            Relation::Below => value < threshold,
            Relation::AtMost => value <= threshold,
            Relation::Above => value > threshold,
        };
        Self { name: name.into(), value, relation, threshold, pass }
    }

    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Relation::Below, threshold)
    }

    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Relation::AtMost, threshold)
    }

    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Relation::Above, threshold)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    /// Command-specific numbers (tables, fits, bound values).
    pub data: serde_json::Value,
    pub outputs: Vec<PathBuf>,
}

impl Report {
    pub fn new(command: &str, checks: Vec<Check>, data: serde_json::Value, outputs: Vec<PathBuf>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { command: command.to_string(), pass, checks, data, outputs }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{verdict}  {:<40} {:.6e} {} {:.3e}", c.name, c.value, c.relation.symbol(), c.threshold);
        }
        if let serde_json::Value::Object(map) = &self.data {
            for (k, v) in map {
                let _ = writeln!(s, "{k}: {v}");
            }
        }
        for p in &self.outputs {
            let _ = writeln!(s, "wrote {}", p.display());
        }
        let _ = write!(s, "{}: {}", self.command, if self.pass { "pass" } else { "fail" });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Check::below("a", 1.0, 2.0).pass);
        assert!(!Check::below("a", 2.0, 2.0).pass);
        assert!(Check::at_most("a", 2.0, 2.0).pass);
        assert!(!Check::above("a", f64::NAN, 0.0).pass);
        let r = Report::new("x", vec![Check::below("a", 1.0, 2.0), Check::above("b", 0.0, 1.0)], serde_json::json!({}), vec![]);
        assert!(!r.pass);
        assert!(r.to_text().ends_with("x: fail"));
    }
}
