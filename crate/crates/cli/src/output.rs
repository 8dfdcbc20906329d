use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::commands::CliError;

/// Relative output paths are placed under this directory when it is set.
pub const OUTPUT_DIR_VAR: &str = "SPINFRAME_OUTPUT_DIR";

pub fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_VAR) {
        Some(dir) if path.is_relative() && !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().unwrap_or_default();
            serde_json::Number::from_f64(round12(x)).map_or(Value::Number(num), Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

pub fn to_json<S: Serialize>(value: &S) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Io(e.to_string()))?;
    serde_json::to_string_pretty(&round_value(v)).map_err(|e| CliError::Io(e.to_string()))
}

/// Writes to `path` (resolved against the output directory) or standard output.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| {
                    if text.ends_with('\n') {
                        Ok(())
                    } else {
                        out.write_all(b"\n")
                    }
                })
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    let full = resolve(path);
    if let Some(parent) = full.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    fs::write(&full, text).map_err(|e| CliError::Io(format!("{}: {e}", full.display())))
}

pub fn create_file(path: &Path) -> Result<fs::File, CliError> {
    let full = resolve(path);
    if let Some(parent) = full.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    fs::File::create(&full).map_err(|e| CliError::Io(format!("{}: {e}", full.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round12(0.577_350_269_189_625_8), 0.577_350_269_19);
        assert_eq!(round12(-1.0), -1.0);
        assert_eq!(round12(1.234_567_890_123_4e-20), 1.234_567_890_12e-20);
        let v = round_value(serde_json::json!({"a": [0.1234567890123456, 3], "b": "x"}));
        assert_eq!(v["a"][0].as_f64(), Some(0.123456789012));
        assert_eq!(v["a"][1].as_u64(), Some(3));
    }
}
