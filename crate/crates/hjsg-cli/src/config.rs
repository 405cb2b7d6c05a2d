//! Flat key-value configuration files mirroring the CLI flags.
//!
//! Format: one `key = value` pair per line, `#` starts a comment. Keys use
//! the long flag names (`max-level`, `t-final`, ...). Values given on the
//! command line take precedence over the file.

use std::collections::HashMap;
use std::path::Path;

pub fn load(path: &Path) -> Result<HashMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "{}:{}: expected `key = value`, got `{raw}`",
                path.display(),
                lineno + 1
            ));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Fills an unset option from the config map, parsing the stored string.
pub fn fill<T: std::str::FromStr>(
    slot: &mut Option<T>,
    map: &HashMap<String, String>,
    key: &str,
) -> Result<(), String> {
    if slot.is_none() {
        if let Some(raw) = map.get(key) {
            let parsed = raw
                .parse::<T>()
                .map_err(|_| format!("config key `{key}`: cannot parse `{raw}`"))?;
            *slot = Some(parsed);
        }
    }
    Ok(())
}
