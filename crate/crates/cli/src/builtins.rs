//! Checked-in inputs addressable by name.

use std::path::Path;

use permea_core::ifs::{IfsSpec, IfsSystem};
use permea_core::obstacles::BmcPattern;

use crate::error::{input, CliError};

pub const IFS: &[(&str, &str)] = &[
    ("sierpinski-triangle", include_str!("../builtins/sierpinski-triangle.json")),
    ("sierpinski-carpet", include_str!("../builtins/sierpinski-carpet.json")),
    ("filled-square", include_str!("../builtins/filled-square.json")),
    ("unit-segment", include_str!("../builtins/unit-segment.json")),
    ("cantor-dust", include_str!("../builtins/cantor-dust.json")),
    ("cantor-line", include_str!("../builtins/cantor-line.json")),
];

pub const PATTERNS: &[(&str, &str)] = &[
    ("bmc", include_str!("../builtins/bmc.json")),
    ("bmc-full", include_str!("../builtins/bmc-full.json")),
    ("bmc-empty", include_str!("../builtins/bmc-empty.json")),
];

/// Obstacle families generated in code rather than read from a file.
pub const GENERATED: &[&str] = &["cantor", "svc", "theta-squares"];

/// Where an input came from, for reports.
#[derive(Clone, Debug, serde::Serialize)]
#[serde(tag = "kind", content = "name", rename_all = "kebab-case")]
pub enum Source {
    Builtin(String),
    File(String),
}

fn lookup<'a>(table: &'a [(&str, &str)], name: &str) -> Option<&'a str> {
    table.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

pub fn ifs_text(arg: &str) -> Option<Result<(Source, String), CliError>> {
    if Path::new(arg).is_file() {
        return Some(read(arg).map(|t| (Source::File(arg.into()), t)));
    }
    lookup(IFS, arg).map(|t| Ok((Source::Builtin(arg.into()), t.to_string())))
}

pub fn parse_ifs(text: &str, label: &str) -> Result<(IfsSpec, IfsSystem), CliError> {
    let spec = IfsSpec::from_json(text).map_err(|e| CliError::Input(format!("{label}: {e}")))?;
    let ifs = spec.build().map_err(|e| CliError::Input(format!("{label}: {e}")))?;
    Ok((spec, ifs))
}

/// An IFS file path or builtin name.
pub fn load_ifs(arg: &str) -> Result<(Source, IfsSpec, IfsSystem), CliError> {
    let (source, text) = ifs_text(arg).unwrap_or_else(|| Err(unknown(arg)))?;
    let (spec, ifs) = parse_ifs(&text, arg)?;
    Ok((source, spec, ifs))
}

/// A pattern file path or builtin name.
pub fn load_pattern(arg: &str) -> Result<(Source, BmcPattern), CliError> {
    let (source, text) = if Path::new(arg).is_file() {
        (Source::File(arg.into()), read(arg)?)
    } else {
        let text = lookup(PATTERNS, arg).ok_or_else(|| unknown(arg))?;
        (Source::Builtin(arg.into()), text.to_string())
    };
    let p = BmcPattern::from_json(&text).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    Ok((source, p))
}

pub fn is_pattern_file(text: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(text)
        .map(|v| v.get("n").is_some() && v.get("cells").is_some())
        .unwrap_or(false)
}

pub fn unknown(arg: &str) -> CliError {
    let mut names: Vec<&str> = IFS.iter().chain(PATTERNS).map(|(n, _)| *n).collect();
    names.extend(GENERATED);
    input(format!("{arg:?} is neither a readable file nor a builtin ({})", names.join(", ")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use permea_core::ifs::catalog;

    #[test]
    fn every_builtin_parses() {
        for (name, text) in IFS {
            parse_ifs(text, name).unwrap();
        }
        for (name, text) in PATTERNS {
            BmcPattern::from_json(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn files_match_catalog() {
        let pairs = [
            ("sierpinski-triangle", catalog::sierpinski_triangle()),
            ("sierpinski-carpet", catalog::sierpinski_carpet()),
            ("filled-square", catalog::filled_square()),
            ("unit-segment", catalog::unit_segment()),
            ("cantor-line", catalog::cantor_line()),
        ];
        for (name, want) in pairs {
            let (_, got) = parse_ifs(lookup(IFS, name).unwrap(), name).unwrap();
            assert_eq!(got.maps(), want.maps(), "{name}");
        }
    }

    #[test]
    fn bmc_file_is_the_pattern() {
        let p = BmcPattern::from_json(lookup(PATTERNS, "bmc").unwrap()).unwrap();
        assert_eq!(p, permea_core::obstacles::bmc_pattern());
        assert_eq!(p.len(), 216);
    }
}
