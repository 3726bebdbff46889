use std::fs;

use num_complex::Complex64;
use serde_json::Value;

use crate::CliError;

/// The argument itself when it looks like JSON, otherwise the contents of the file it names.
pub fn load_text(arg: &str) -> Result<String, CliError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| CliError::Input(format!("cannot read {arg}: {e}")))
}

/// A vector given as `[1.0, 2.0]` or `[[re, im], …]` (the two may be mixed).
pub fn parse_vector(arg: &str) -> Result<Vec<Complex64>, CliError> {
    let text = load_text(arg)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("bad vector: {e}")))?;
    let Value::Array(items) = value else {
        return Err(CliError::Input("vector must be a JSON array".into()));
    };
    items
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let bad = || CliError::Input(format!("vector entry {i} must be a number or [re, im]"));
            match v {
                Value::Number(x) => Ok(Complex64::new(x.as_f64().ok_or_else(bad)?, 0.0)),
                Value::Array(p) if p.len() == 2 => {
                    let re = p[0].as_f64().ok_or_else(bad)?;
                    let im = p[1].as_f64().ok_or_else(bad)?;
                    Ok(Complex64::new(re, im))
                }
                _ => Err(bad()),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors() {
        let v = parse_vector("[1, [0.5, -2], 3.25]").unwrap();
        assert_eq!(
            v,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, -2.0),
                Complex64::new(3.25, 0.0)
            ]
        );
        assert!(parse_vector("[\"a\"]").is_err());
        assert!(parse_vector("[[1, 2, 3]]").is_err());
        assert!(parse_vector("/no/such/file").is_err());
    }
}
