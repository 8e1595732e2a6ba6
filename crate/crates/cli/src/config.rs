//! JSON config files are turned into flags and spliced in ahead of the
//! user's own flags. The parser lets later occurrences override earlier
//! ones, so flags win on conflict.

use std::ffi::OsString;
use std::fs;

use anyhow::{bail, Context, Result};
use serde_json::Value;

pub const SUBCOMMANDS: [&str; 10] = [
    "count",
    "integrate",
    "kappa",
    "bounds",
    "plotdata",
    "levelset",
    "structure",
    "witness",
    "fieldscan",
    "verify",
];

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn scalar(v: &Value) -> Result<String> {
    Ok(match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Array(xs) => xs.iter().map(scalar).collect::<Result<Vec<_>>>()?.join(","),
        other => bail!("unsupported config value {other}"),
    })
}

/// Flags equivalent to a config object.
pub fn config_flags(obj: &serde_json::Map<String, Value>) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (key, v) in obj {
        if key == "command" || key == "config" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Object(m) if key == "const" => {
                for (name, val) in m {
                    out.push(flag.clone());
                    out.push(format!("{name}={}", scalar(val)?));
                }
            }
            _ => {
                out.push(flag);
                out.push(scalar(v)?);
            }
        }
    }
    Ok(out)
}

/// argv with the config file's flags inserted after the subcommand.
pub fn merged_args(raw: Vec<OsString>) -> Result<Vec<OsString>> {
    let args: Vec<String> = raw
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let Some(path) = config_path(&args) else {
        return Ok(raw);
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing config {path}"))?;
    let Value::Object(obj) = v else {
        bail!("config {path} must hold a JSON object");
    };
    let mut args = args;
    let pos = match args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) {
        Some(p) => p,
        None => {
            let Some(Value::String(cmd)) = obj.get("command") else {
                bail!("no subcommand given on the command line or in the config");
            };
            args.insert(1, cmd.clone());
            1
        }
    };
    let extra = config_flags(&obj)?;
    args.splice(pos + 1..pos + 1, extra);
    Ok(args.into_iter().map(OsString::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flags_from_object() {
        let v = json!({"s": 2, "N": 100, "xi": [0.1, 0.2], "check": true, "const": {"c": 0.1}});
        let f = config_flags(v.as_object().unwrap()).unwrap();
        assert_eq!(
            f,
            vec!["--N", "100", "--check", "--const", "c=0.1", "--s", "2", "--xi", "0.1,0.2"]
        );
    }

    #[test]
    fn inserts_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        fs::write(&p, r#"{"command": "count", "s": 2}"#).unwrap();
        let argv: Vec<OsString> = ["weylbox", "--config", p.to_str().unwrap(), "--s", "3"]
            .iter()
            .map(OsString::from)
            .collect();
        let m: Vec<String> = merged_args(argv)
            .unwrap()
            .iter()
            .map(|a| a.to_string_lossy().into_owned())
            .collect();
        assert_eq!(m[1], "count");
        assert_eq!(&m[2..4], &["--s", "2"]);
        assert_eq!(m.last().unwrap(), "3");
    }
}
