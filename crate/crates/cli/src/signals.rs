//! Whitespace-separated signal tables, one time step per row. Blank lines
//! and lines starting with `#` are skipped.

use std::path::Path;

use lpvlfr::Signal;

use crate::error::CliError;

pub fn parse_signal(text: &str, dim: usize, origin: &str) -> Result<Signal, CliError> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .enumerate()
            .map(|(col, tok)| {
                tok.parse::<f64>()
                    .map_err(|e| CliError::Parse(format!("{origin}:{}:{}: '{tok}': {e}", lineno + 1, col + 1)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if row.len() != dim {
            return Err(CliError::Parse(format!(
                "{origin}:{}: {} values, expected {dim}",
                lineno + 1,
                row.len()
            )));
        }
        rows.push(row);
    }
    Signal::from_rows(dim, &rows).map_err(|e| CliError::Parse(format!("{origin}: {e}")))
}

pub fn read_signal(path: &Path, dim: usize) -> Result<Signal, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_signal(&text, dim, &path.display().to_string())
}

/// `t y_1 .. y_ny` per row, preceded by a header comment.
pub fn render_output(y: &Signal) -> String {
    let mut out = String::from("# t");
    for i in 1..=y.dim() {
        out.push_str(&format!(" y{i}"));
    }
    out.push('\n');
    for (t, v) in y.samples().iter().enumerate() {
        out.push_str(&t.to_string());
        for x in v.iter() {
            out.push(' ');
            out.push_str(&x.to_string());
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rows_and_skips_comments() {
        let s = parse_signal("# u\n1 2\n\n3.5 -1e-3\n", 2, "u.txt").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.at(1)[1], -1e-3);
    }

    #[test]
    fn reports_position_of_bad_token() {
        let err = parse_signal("1\n2 x\n", 1, "u.txt").unwrap_err().to_string();
        assert!(err.contains("u.txt:2:"), "{err}");
        let err = parse_signal("1\nfoo\n", 1, "u.txt").unwrap_err().to_string();
        assert!(err.contains("u.txt:2:1"), "{err}");
    }

    #[test]
    fn output_table_format() {
        let y = Signal::from_rows(1, &[vec![0.0], vec![0.5]]).unwrap();
        assert_eq!(render_output(&y), "# t y1\n0 0\n1 0.5\n");
    }
}
