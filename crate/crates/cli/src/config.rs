//! Optional `key=value` configuration files.
//!
//! Each key names a long flag of the subcommand (`x = 1e9` means `--x 1e9`).
//! The file's flags are placed before the ones typed on the command line,
//! and since later occurrences override earlier ones, typed flags win.

use std::ffi::OsString;

/// Parses a configuration file into flag arguments.
pub fn parse(text: &str) -> Result<Vec<OsString>, String> {
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value, got {raw:?}", i + 1))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.starts_with('-') || key.contains(char::is_whitespace) {
            return Err(format!("line {}: bad key {key:?}", i + 1));
        }
        match value {
            "true" => args.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                args.push(format!("--{key}").into());
                args.push(value.into());
            }
        }
    }
    Ok(args)
}

/// Splices `--config FILE` (anywhere after the subcommand) into the argument
/// list, reading the file with `read`.
pub fn expand(args: Vec<OsString>, read: impl Fn(&str) -> std::io::Result<String>) -> Result<Vec<OsString>, String> {
    let mut out = Vec::with_capacity(args.len());
    let mut path = None;
    let mut iter = args.into_iter();
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy().into_owned();
        if s == "--config" {
            path = Some(iter.next().ok_or("--config needs a file")?.to_string_lossy().into_owned());
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            out.push(a);
        }
    }
    let Some(path) = path else { return Ok(out) };
    let text = read(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let extra = parse(&text)?;
    // binary name, then the subcommand, then the file's flags
    let sub = out.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')).map(|i| i + 2);
    let at = sub.ok_or("--config needs a subcommand")?;
    out.splice(at..at, extra);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: &[OsString]) -> Vec<String> {
        v.iter().map(|s| s.to_string_lossy().into_owned()).collect()
    }

    #[test]
    fn parses_pairs_comments_and_booleans() {
        let args = parse("# comment\nq = 3\nx=1e9  # trailing\n\nverbose = true\nquiet=false\n").unwrap();
        assert_eq!(strs(&args), ["--q", "3", "--x", "1e9", "--verbose"]);
        assert!(parse("novalue\n").is_err());
        assert!(parse("--q=3\n").is_err());
    }

    #[test]
    fn file_flags_precede_typed_flags() {
        let args: Vec<OsString> = ["primebias", "count", "--config", "c.txt", "--q", "5"].iter().map(Into::into).collect();
        let out = expand(args, |_| Ok("q=3\nr=2\n".into())).unwrap();
        assert_eq!(strs(&out), ["primebias", "count", "--q", "3", "--r", "2", "--q", "5"]);
    }

    #[test]
    fn missing_file_is_an_error() {
        let args: Vec<OsString> = ["primebias", "count", "--config=nope"].iter().map(Into::into).collect();
        assert!(expand(args, |_| Err(std::io::Error::other("gone"))).is_err());
    }
}
