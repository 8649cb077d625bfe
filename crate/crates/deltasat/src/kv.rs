//! Plain-text `key = value` configuration lines, shared by sweep specs and
//! the CLI config files.

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// keys may repeat (last occurrence wins for consumers that fold into a
/// map). Errors carry the 1-based line number.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("line {}: expected `key = value`", idx + 1));
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(format!("line {}: empty key", idx + 1));
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}
