//! Parsing of count files.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputError {
    NonPositive { line: usize },
    Malformed { line: usize, text: String },
    Empty,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::NonPositive { line } => write!(f, "line {line}: values must be ≥ 1"),
            InputError::Malformed { line, text } => {
                write!(f, "line {line}: expected a positive integer, got `{text}`")
            }
            InputError::Empty => write!(f, "no values in input"),
        }
    }
}

impl std::error::Error for InputError {}

/// One integer per line, optionally preceded by a `count` header.
/// Blank lines are skipped; surrounding whitespace and a trailing comma are
/// tolerated.
pub fn parse_counts(text: &str) -> Result<Vec<u64>, InputError> {
    let mut values = Vec::new();
    let mut seen_content = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim().trim_end_matches(',').trim();
        if line.is_empty() {
            continue;
        }
        let first = !seen_content;
        seen_content = true;
        if first && line.trim_matches('"').eq_ignore_ascii_case("count") {
            continue;
        }
        match line.parse::<i128>() {
            Ok(v) if v < 1 => return Err(InputError::NonPositive { line: i + 1 }),
            Ok(v) => match u64::try_from(v) {
                Ok(v) => values.push(v),
                Err(_) => {
                    return Err(InputError::Malformed {
                        line: i + 1,
                        text: line.to_string(),
                    })
                }
            },
            Err(_) => {
                return Err(InputError::Malformed {
                    line: i + 1,
                    text: line.to_string(),
                })
            }
        }
    }
    if values.is_empty() {
        return Err(InputError::Empty);
    }
    Ok(values)
}
