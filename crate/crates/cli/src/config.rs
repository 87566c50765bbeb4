//! `key=value` config files, merged into the argument list ahead of command-line flags.

use std::ffi::OsString;
use std::path::Path;

use crate::CliError;

/// Keys a config file may set; each maps to the flag `--key`.
pub const KEYS: &[&str] = &[
    "samples",
    "out",
    "scheme",
    "theta-gate",
    "axis",
    "phi-b",
    "epsilon",
    "kappa",
    "balanced",
    "params",
    "seed",
    "level",
];

/// Parses one `key=value` per line. Blank lines and `#` comments are skipped;
/// underscores in keys are read as dashes.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key '{key}'",
                lineno + 1
            )));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

pub fn load(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

/// Removes `--config FILE` from `args` and inserts the file's entries as flags right
/// after the subcommand, so explicit flags given later take precedence.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        match arg.to_str() {
            Some("--config") => {
                let value = iter
                    .next()
                    .ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
                config = Some(value);
            }
            Some(s) if s.starts_with("--config=") => config = Some(s["--config=".len()..].into()),
            _ => rest.push(arg),
        }
    }
    let Some(config) = config else {
        return Ok(rest);
    };
    let entries = load(Path::new(&config))?;
    let sub = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|i| i + 2)
        .unwrap_or(rest.len());
    let flags = entries
        .into_iter()
        .map(|(k, v)| OsString::from(format!("--{k}={v}")));
    rest.splice(sub..sub, flags);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_underscores() {
        let entries = parse("# grid\nsamples = 11\n\ntheta_gate=0.5 # half turn\n").unwrap();
        assert_eq!(
            entries,
            vec![
                ("samples".to_string(), "11".to_string()),
                ("theta-gate".to_string(), "0.5".to_string())
            ]
        );
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(matches!(parse("colour=red"), Err(CliError::Usage(_))));
        assert!(matches!(parse("samples"), Err(CliError::Usage(_))));
    }

    #[test]
    fn passes_through_without_config() {
        let args: Vec<OsString> = ["holonomic", "figure1", "--samples", "3"]
            .iter()
            .map(OsString::from)
            .collect();
        assert_eq!(expand(args.clone()).unwrap(), args);
    }
}
