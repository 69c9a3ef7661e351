//! Severity-table overrides.
//!
//! A TOML file with one table per corruption kind and one 5-element array per
//! parameter; anything not mentioned keeps its default:
//!
//! ```toml
//! [gaussian_noise]
//! sigma = [0.04, 0.08, 0.12, 0.16, 0.2]
//!
//! [jpeg_compression]
//! quality = [30, 25, 20, 15, 10]
//! ```

use std::fs;
use std::path::Path;

use segrobust_core::corrupt::{CorruptionKind, SeverityTable};
use toml::{Table, Value};

use crate::error::{Error, Result};

pub fn load_severity_table(path: &Path) -> Result<SeverityTable> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    parse_severity_table(&text, path)
}

/// Applies the overrides in `text` on top of the default table.
pub fn parse_severity_table(text: &str, path: &Path) -> Result<SeverityTable> {
    let err = |message: String| Error::Config { path: path.to_path_buf(), message };
    let doc: Table = text.parse().map_err(|e: toml::de::Error| err(e.to_string()))?;
    let mut table = SeverityTable::default();
    for (kind_name, entry) in &doc {
        let kind: CorruptionKind = kind_name.parse().map_err(|_| err(format!("unknown corruption kind `{kind_name}`")))?;
        let Value::Table(params) = entry else {
            return Err(err(format!("`{kind_name}` must be a table of parameter arrays")));
        };
        let mut parsed = Vec::with_capacity(params.len());
        for (name, value) in params {
            parsed.push((name.as_str(), five_numbers(value).ok_or_else(|| {
                err(format!("{kind_name}.{name} must be an array of 5 numbers"))
            })?));
        }
        table.set_many(kind, &parsed).map_err(|e| err(e.to_string()))?;
    }
    Ok(table)
}

fn five_numbers(value: &Value) -> Option<[f64; 5]> {
    let items = value.as_array()?;
    if items.len() != 5 {
        return None;
    }
    let mut out = [0.0; 5];
    for (slot, item) in out.iter_mut().zip(items) {
        *slot = match item {
            Value::Float(f) => *f,
            Value::Integer(i) => *i as f64,
            _ => return None,
        };
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<SeverityTable> {
        parse_severity_table(text, Path::new("severity.toml"))
    }

    #[test]
    fn empty_file_is_default() {
        assert_eq!(parse("").unwrap(), SeverityTable::default());
    }

    #[test]
    fn overrides_apply() {
        let t = parse("[jpeg_compression]\nquality = [30, 25, 20, 15, 10]\n").unwrap();
        assert_eq!(t.values(CorruptionKind::JpegCompression, "quality"), Some([30.0, 25.0, 20.0, 15.0, 10.0]));
        assert_eq!(
            t.values(CorruptionKind::GaussianNoise, "sigma"),
            SeverityTable::default().values(CorruptionKind::GaussianNoise, "sigma")
        );
    }

    #[test]
    fn multi_parameter_kind_validated_as_a_whole() {
        // Flattening `radius` alone would stall levels 1-2; moving `alias_sigma` too keeps it valid.
        let text = "[defocus_blur]\nradius = [3, 3, 6, 8, 10]\nalias_sigma = [0.1, 0.3, 0.5, 0.5, 0.5]\n";
        parse(text).unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "[frost]\nx = [1, 2, 3, 4, 5]\n",
            "[fog]\nsigma = [1, 2, 3, 4, 5]\n",
            "[fog]\nstrength = [1, 2, 3]\n",
            "[fog]\nstrength = [1, 2, \"3\", 4, 5]\n",
            "[gaussian_noise]\nsigma = [0.3, 0.2, 0.1, 0.05, 0.01]\n",
            "fog = 3\n",
            "[fog\n",
        ] {
            assert!(matches!(parse(text), Err(Error::Config { .. })), "{text}");
        }
    }
}
