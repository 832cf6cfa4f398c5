//! Parameter sweeps: `KEY=START:STOP:STEPS` mutates one numeric value in
//! the raw scenario document, re-resolving it per point. Points are
//! evaluated and emitted in sweep-index order.

use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub key: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let (key, range) = text.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "sweep '{text}' must look like KEY=START:STOP:STEPS"
            ))
        })?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Usage(format!(
                "sweep range '{range}' must look like START:STOP:STEPS"
            )));
        }
        let parse_f = |s: &str, what: &str| {
            s.parse::<f64>()
                .map_err(|e| CliError::Usage(format!("sweep {what} '{s}': {e}")))
        };
        let start = parse_f(parts[0], "start")?;
        let stop = parse_f(parts[1], "stop")?;
        let steps: usize = parts[2]
            .parse()
            .map_err(|e| CliError::Usage(format!("sweep steps '{}': {e}", parts[2])))?;
        if steps < 1 {
            return Err(CliError::Usage("sweep needs at least 1 step".into()));
        }
        Ok(Self {
            key: key.to_string(),
            start,
            stop,
            steps,
        })
    }

    /// The value at sweep index `i`: linear from start to stop inclusive.
    pub fn value_at(&self, i: usize) -> f64 {
        if self.steps == 1 {
            self.start
        } else {
            self.start + (self.stop - self.start) * i as f64 / (self.steps - 1) as f64
        }
    }
}

/// Set the numeric value at a dot-separated path; integer segments index
/// into arrays.
pub fn set_path(doc: &mut Value, path: &str, value: f64) -> Result<(), CliError> {
    let mut cursor = doc;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        if last {
            let slot = match cursor {
                Value::Object(map) => map.get_mut(*seg),
                Value::Array(items) => seg.parse::<usize>().ok().and_then(|idx| items.get_mut(idx)),
                _ => None,
            };
            let slot = slot.ok_or_else(|| {
                CliError::Usage(format!("sweep key '{path}': no value at '{seg}'"))
            })?;
            *slot = serde_json::Number::from_f64(value)
                .map(Value::Number)
                .ok_or_else(|| {
                    CliError::Usage(format!("sweep value {value} is not representable"))
                })?;
        } else {
            cursor = match cursor {
                Value::Object(map) => map.get_mut(*seg),
                Value::Array(items) => seg.parse::<usize>().ok().and_then(|idx| items.get_mut(idx)),
                _ => None,
            }
            .ok_or_else(|| CliError::Usage(format!("sweep key '{path}': no value at '{seg}'")))?;
        }
    }
    Ok(())
}
