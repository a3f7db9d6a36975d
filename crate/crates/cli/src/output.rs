use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use permea_core::num::round_sig;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with floats cut to 12 significant digits.
pub fn to_json<T: Serialize>(report: &T) -> Result<String, CliError> {
    let mut v = serde_json::to_value(report).map_err(|e| CliError::Input(format!("serializing report: {e}")))?;
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write { path: p.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn emit<T: Serialize>(path: Option<&Path>, report: &T) -> Result<(), CliError> {
    write_text(path, &to_json(report)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_untouched() {
        let mut v = serde_json::json!({"a": 7, "b": [1.0000000000001, 2]});
        round_floats(&mut v);
        assert_eq!(v, serde_json::json!({"a": 7, "b": [1.0, 2]}));
    }
}
