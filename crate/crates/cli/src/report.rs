//! Reports shared by every command, rendered as text or JSON.

use serde::Serialize;

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA: &str = "nrcs-report/1";

/// One report per invocation. Fields a command does not produce are omitted
/// from both renderings.
#[derive(Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decision: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_basis: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub visited: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<WitnessStep>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget_exhausted: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap_hit: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<Vec<String>>,
}

/// A certificate step `transition@anchor`, with the transition index counted
/// from 0, plus the configuration reached.
#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessStep {
    pub transition: usize,
    pub anchor: String,
    pub rule: String,
    pub reached: String,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            ..Report::default()
        }
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports hold only plain data")
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k}: {v}\n"));
        if let Some(a) = &self.algorithm {
            line("algorithm", a.clone());
        }
        if let Some(d) = &self.decision {
            line("decision", d.clone());
        }
        if let Some(i) = self.iterations {
            line("iterations", i.to_string());
        }
        if let Some(b) = &self.basis_sizes {
            let v: Vec<String> = b.iter().map(usize::to_string).collect();
            line("basis sizes", v.join(" "));
        }
        if let Some(b) = &self.final_basis {
            line("final basis size", b.len().to_string());
        }
        if let Some(v) = self.visited {
            line("visited", v.to_string());
        }
        if let Some(v) = &self.value {
            let s = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Array(xs) => {
                    let items: Vec<String> = xs
                        .iter()
                        .map(|x| {
                            x.as_str()
                                .map(str::to_string)
                                .unwrap_or_else(|| x.to_string())
                        })
                        .collect();
                    format!("[{}]", items.join(", "))
                }
                other => other.to_string(),
            };
            line("value", s);
        }
        if let Some(b) = self.budget_exhausted {
            line("budget exhausted", b.to_string());
        }
        if let Some(b) = &self.lower_bound {
            line("lower bound", b.clone());
        }
        if let Some(l) = self.length {
            line("length", l.to_string());
        }
        if let Some(c) = self.cap_hit {
            line("cap hit", c.to_string());
        }
        if let Some(w) = &self.witness {
            line("witness", format!("{} steps", w.len()));
            for (i, s) in w.iter().enumerate() {
                out.push_str(&format!(
                    "  {}. {}@{}  {}  => {}\n",
                    i + 1,
                    s.transition,
                    s.anchor,
                    s.rule,
                    s.reached
                ));
            }
        }
        if let Some(o) = &self.outputs {
            for f in o {
                out.push_str(&format!("wrote: {f}\n"));
            }
        }
        if let Some(n) = &self.notes {
            for x in n {
                out.push_str(&format!("note: {x}\n"));
            }
        }
        out
    }
}
