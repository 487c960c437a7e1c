//! Schema-stable reports. Identical runs must produce byte-identical
//! output, so timings go to stderr and never into the report body.

use serde::Serialize;

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    /// All logarithms in reports are natural logs.
    pub log_base: &'static str,
    pub params: serde_json::Value,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    pub data: serde_json::Value,
}

#[derive(Serialize)]
pub struct Row {
    pub radius: usize,
    pub size: String,
    pub log_ratio: Option<f64>,
    pub bound: Option<f64>,
    /// Exact integer bound where one applies (big values as strings).
    pub bound_exact: Option<String>,
}

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Report {
    pub fn new(command: &str, params: serde_json::Value) -> Self {
        Report {
            command: command.to_string(),
            log_base: "natural",
            params,
            rows: Vec::new(),
            checks: Vec::new(),
            data: serde_json::Value::Object(Default::default()),
        }
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(Check { name: name.to_string(), pass, detail });
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut out = String::new();
                out.push_str(&format!("# command,{}\n# log_base,natural\n", self.command));
                out.push_str("radius,size,log_ratio,bound,bound_exact\n");
                for r in &self.rows {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        r.radius,
                        r.size,
                        r.log_ratio.map_or(String::new(), |x| x.to_string()),
                        r.bound.map_or(String::new(), |x| x.to_string()),
                        r.bound_exact.clone().unwrap_or_default(),
                    ));
                }
                for c in &self.checks {
                    out.push_str(&format!("# check,{},{},{}\n", c.name, c.pass, c.detail));
                }
                out
            }
        }
    }
}
