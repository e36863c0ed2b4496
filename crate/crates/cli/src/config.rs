//! `key = value` config files. Keys are the long flag names. Values from the
//! file are spliced in right after the subcommand, ahead of the user's own
//! flags, so that the later command-line occurrence wins.

use std::fs;
use std::path::Path;

use crate::error::CliError;

const SUBCOMMANDS: [&str; 5] = ["exponent", "regime", "finite", "sweep", "verify"];

pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", no + 1)))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", no + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

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

/// `args` with the entries of the `--config` file, if any, inserted.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&args) else { return Ok(args) };
    let text = fs::read_to_string(Path::new(&path)).map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    let entries = parse(&text)?;
    let Some(at) = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else { return Ok(args) };
    let mut out = args[..=at].to_vec();
    out.extend(entries.into_iter().map(|(k, v)| format!("--{k}={v}")));
    out.extend_from_slice(&args[at + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let e = parse("# sweep\np = 2,2\n r_1=1 # trailing\n\nsteps=4\n").unwrap();
        assert_eq!(e, vec![("p".into(), "2,2".into()), ("r-1".into(), "1".into()), ("steps".into(), "4".into())]);
        assert!(parse("nonsense").is_err());
    }
}
