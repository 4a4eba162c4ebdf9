//! Flat `key = value` text format shared by configs and parameter files.
//! `#`-prefixed lines are metadata comments of the same `key=value` shape.

use super::IoError;

#[derive(Debug, Default)]
pub struct KvFile {
    /// `# key=value` metadata lines, in order.
    pub meta: Vec<(String, String)>,
    /// `key = value` entries, in order.
    pub entries: Vec<(String, String)>,
}

impl KvFile {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn meta_get(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, IoError> {
        self.get(key).ok_or_else(|| IoError::MissingKey(key.into()))
    }
}

/// Parses the flat key-value format from text.
pub fn parse_kv_lines(text: &str) -> Result<KvFile, IoError> {
    let mut out = KvFile::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some((k, v)) = rest.split_once('=') {
                out.meta.push((k.trim().to_string(), v.trim().to_string()));
            }
            // bare comments without '=' are ignored
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| IoError::BadLine {
            line: line_no,
            detail: format!("expected key = value, got {line:?}"),
        })?;
        let key = k.trim();
        if key.is_empty() {
            return Err(IoError::BadLine {
                line: line_no,
                detail: "empty key".into(),
            });
        }
        out.entries.push((key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn parse_f64(key: &str, v: &str) -> Result<f64, IoError> {
    v.parse::<f64>().map_err(|_| IoError::Config(format!(
        "key {key}: expected a number, got {v:?}"
    )))
}

pub fn parse_u64(key: &str, v: &str) -> Result<u64, IoError> {
    v.parse::<u64>().map_err(|_| IoError::Config(format!(
        "key {key}: expected an integer, got {v:?}"
    )))
}

pub fn parse_u32(key: &str, v: &str) -> Result<u32, IoError> {
    v.parse::<u32>().map_err(|_| IoError::Config(format!(
        "key {key}: expected an integer, got {v:?}"
    )))
}

pub fn parse_usize(key: &str, v: &str) -> Result<usize, IoError> {
    v.parse::<usize>().map_err(|_| IoError::Config(format!(
        "key {key}: expected an integer, got {v:?}"
    )))
}

pub fn parse_bool(key: &str, v: &str) -> Result<bool, IoError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(IoError::Config(format!(
            "key {key}: expected true/false, got {v:?}"
        ))),
    }
}
