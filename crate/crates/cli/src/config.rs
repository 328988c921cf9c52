//! Merges a JSON config file into the argument list. Keys are flag names
//! (`tol`, `max_rounds` or `max-rounds`); flags given on the command line win.

use std::fs;

use serde_json::Value;

fn config_path(args: &[String]) -> Result<Option<String>, String> {
    for (i, a) in args.iter().enumerate() {
        if a == "--config" {
            return args
                .get(i + 1)
                .cloned()
                .map(Some)
                .ok_or_else(|| "--config needs a path".to_string());
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some(p.to_string()));
        }
    }
    Ok(None)
}

fn present(args: &[String], flag: &str) -> bool {
    args.iter()
        .any(|a| a == flag || a.strip_prefix(flag).is_some_and(|rest| rest.starts_with('=')))
}

/// Appends `--key value` for every config entry whose flag is absent. Values
/// may be numbers, strings or booleans (`true` adds a bare switch).
pub fn merge(mut args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args)? else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("config {path} is not JSON: {e}"))?;
    let Value::Object(map) = value else {
        return Err(format!("config {path} must hold a JSON object"));
    };
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" || present(&args, &flag) {
            continue;
        }
        match v {
            Value::Bool(true) => args.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Number(n) => args.extend([flag, n.to_string()]),
            Value::String(s) => args.extend([flag, s]),
            other => return Err(format!("config key {key} has unsupported value {other}")),
        }
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn command_line_wins_over_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"p": 3, "q": 1.5, "max_rounds": 10, "quiet": false}"#).unwrap();
        let args = strings(&["lab", "norm", "--p=2", "--config", path.to_str().unwrap()]);
        let merged = merge(args).unwrap();
        assert!(!merged.contains(&"3".to_string()));
        assert!(merged.windows(2).any(|w| w[0] == "--q" && w[1] == "1.5"));
        assert!(merged.windows(2).any(|w| w[0] == "--max-rounds" && w[1] == "10"));
        assert!(!merged.contains(&"--quiet".to_string()));
    }

    #[test]
    fn no_config_is_a_no_op() {
        let args = strings(&["lab", "norm"]);
        assert_eq!(merge(args.clone()).unwrap(), args);
        assert!(merge(strings(&["lab", "--config"])).is_err());
    }
}
