//! JSON model files.
//!
//! ```json
//! { "kind": "alpv", "np": 1, "nx": 2, "nu": 1, "ny": 1,
//!   "A": [ [[1, 0], [0, 0.2]], [[0, 2], [1, 1]] ], "B": [...], "C": [...], "D": [...] }
//! { "kind": "lfr", "p": 1, "m": 1, "d": 2, "block_sizes": [2, 3],
//!   "A": [[...], ...], "B": [...], "C": [...], "D": [...] }
//! ```
//!
//! Numbers are written in shortest round-trip form, so reading back a
//! written file reproduces every double exactly.

use std::fmt::Write as _;
use std::path::Path;

use lpvlfr::{AlpvModel, LfrModel, Mat, Model};
use serde::Deserialize;

use crate::error::CliError;

type Rows = Vec<Vec<f64>>;

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawModel {
    Alpv(RawAlpv),
    Lfr(RawLfr),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlpv {
    np: usize,
    nx: usize,
    nu: usize,
    ny: usize,
    #[serde(rename = "A")]
    a: Vec<Rows>,
    #[serde(rename = "B")]
    b: Vec<Rows>,
    #[serde(rename = "C")]
    c: Vec<Rows>,
    #[serde(rename = "D")]
    d: Vec<Rows>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLfr {
    p: usize,
    m: usize,
    d: usize,
    block_sizes: Vec<usize>,
    #[serde(rename = "A")]
    a: Rows,
    #[serde(rename = "B")]
    b: Rows,
    #[serde(rename = "C")]
    c: Rows,
    #[serde(rename = "D")]
    d_matrix: Rows,
}

fn matrix(name: &str, rows: &Rows, nrows: usize, ncols: usize) -> Result<Mat, String> {
    if rows.len() != nrows {
        return Err(format!("{name} has {} rows, expected {nrows}", rows.len()));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        return Err(format!("{name} row {i} has {} entries, expected {ncols}", r.len()));
    }
    Ok(Mat::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn coefficients(name: &str, list: &[Rows], count: usize, nrows: usize, ncols: usize) -> Result<Vec<Mat>, String> {
    if list.len() != count {
        return Err(format!("{name} lists {} matrices, expected np + 1 = {count}", list.len()));
    }
    list.iter()
        .enumerate()
        .map(|(i, rows)| matrix(&format!("{name}[{i}]"), rows, nrows, ncols))
        .collect()
}

fn build(raw: RawModel) -> Result<Model, String> {
    match raw {
        RawModel::Alpv(r) => {
            let k = r.np + 1;
            let model = AlpvModel::with_dims(
                r.nx,
                r.nu,
                r.ny,
                coefficients("A", &r.a, k, r.nx, r.nx)?,
                coefficients("B", &r.b, k, r.nx, r.nu)?,
                coefficients("C", &r.c, k, r.ny, r.nx)?,
                coefficients("D", &r.d, k, r.ny, r.nu)?,
            )
            .map_err(|e| e.to_string())?;
            Ok(Model::Alpv(model))
        }
        RawModel::Lfr(r) => {
            if r.block_sizes.len() != r.d {
                return Err(format!("block_sizes has {} entries, expected d = {}", r.block_sizes.len(), r.d));
            }
            let n: usize = r.block_sizes.iter().sum();
            let model = LfrModel::new(
                r.block_sizes,
                matrix("A", &r.a, n, n)?,
                matrix("B", &r.b, n, r.m)?,
                matrix("C", &r.c, r.p, n)?,
                matrix("D", &r.d_matrix, r.p, r.m)?,
            )
            .map_err(|e| e.to_string())?;
            Ok(Model::Lfr(model))
        }
    }
}

/// Parse a model from text; `origin` labels diagnostics.
pub fn parse_model(text: &str, origin: &str) -> Result<Model, CliError> {
    let raw: RawModel = serde_json::from_str(text).map_err(|e| {
        CliError::Parse(format!("{origin}:{}:{}: {e}", e.line(), e.column()))
    })?;
    build(raw).map_err(|e| CliError::Parse(format!("{origin}: {e}")))
}

pub fn read_model(path: &Path) -> Result<Model, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_model(&text, &path.display().to_string())
}

fn number(v: f64) -> String {
    serde_json::to_string(&v).expect("model entries are finite")
}

fn write_matrix(out: &mut String, x: &Mat, indent: &str) {
    if x.nrows() == 0 {
        out.push_str("[]");
        return;
    }
    out.push_str("[\n");
    for i in 0..x.nrows() {
        let row: Vec<String> = x.row(i).iter().map(|&v| number(v)).collect();
        let sep = if i + 1 < x.nrows() { "," } else { "" };
        let _ = writeln!(out, "{indent}  [{}]{sep}", row.join(", "));
    }
    out.push_str(indent);
    out.push(']');
}

fn write_list(out: &mut String, list: &[Mat]) {
    out.push_str("[\n");
    for (i, x) in list.iter().enumerate() {
        out.push_str("    ");
        write_matrix(out, x, "    ");
        out.push_str(if i + 1 < list.len() { ",\n" } else { "\n" });
    }
    out.push_str("  ]");
}

/// Render a model as a JSON document.
pub fn render_model(model: &Model) -> String {
    let mut out = String::from("{\n");
    match model {
        Model::Alpv(s) => {
            let _ = writeln!(
                out,
                "  \"kind\": \"alpv\",\n  \"np\": {},\n  \"nx\": {},\n  \"nu\": {},\n  \"ny\": {},",
                s.np(),
                s.nx(),
                s.nu(),
                s.ny()
            );
            for (name, list, last) in [("A", s.a(), false), ("B", s.b(), false), ("C", s.c(), false), ("D", s.d(), true)] {
                let _ = write!(out, "  \"{name}\": ");
                write_list(&mut out, list);
                out.push_str(if last { "\n" } else { ",\n" });
            }
        }
        Model::Lfr(m) => {
            let sizes: Vec<String> = m.block_sizes().iter().map(|n| n.to_string()).collect();
            let _ = writeln!(
                out,
                "  \"kind\": \"lfr\",\n  \"p\": {},\n  \"m\": {},\n  \"d\": {},\n  \"block_sizes\": [{}],",
                m.outputs(),
                m.inputs(),
                m.channels(),
                sizes.join(", ")
            );
            for (name, x, last) in [("A", m.a(), false), ("B", m.b(), false), ("C", m.c(), false), ("D", m.d(), true)] {
                let _ = write!(out, "  \"{name}\": ");
                write_matrix(&mut out, x, "  ");
                out.push_str(if last { "\n" } else { ",\n" });
            }
        }
    }
    out.push_str("}\n");
    out
}

pub fn write_model(path: &Path, model: &Model) -> Result<(), CliError> {
    std::fs::write(path, render_model(model)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use lpvlfr::example1;

    #[test]
    fn round_trip_is_exact() {
        for model in [
            Model::Alpv(example1::alpv_sigma()),
            Model::Lfr(example1::lfr_m()),
            Model::Lfr(example1::lfr_m_hat()),
        ] {
            let text = render_model(&model);
            assert_eq!(parse_model(&text, "mem").unwrap(), model);
        }
    }

    #[test]
    fn awkward_doubles_survive() {
        let vals = [0.1 + 0.2, 1e-300, -2.5e17, std::f64::consts::PI, f64::MIN_POSITIVE];
        let m = LfrModel::new(
            vec![1, 1],
            Mat::from_row_slice(2, 2, &vals[..4]),
            Mat::from_row_slice(2, 1, &[vals[4], 0.0]),
            Mat::from_row_slice(1, 2, &[1.0 / 3.0, -0.0]),
            Mat::zeros(1, 1),
        )
        .unwrap();
        let back = parse_model(&render_model(&Model::Lfr(m.clone())), "mem").unwrap();
        let Model::Lfr(b) = back else { panic!("kind changed") };
        for (x, y) in m.a().iter().zip(b.a().iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(m, b);
    }

    #[test]
    fn empty_channels_and_states_round_trip() {
        let m = LfrModel::new(vec![0, 0], Mat::zeros(0, 0), Mat::zeros(0, 2), Mat::zeros(1, 0), Mat::zeros(1, 2))
            .unwrap();
        let model = Model::Lfr(m);
        assert_eq!(parse_model(&render_model(&model), "mem").unwrap(), model);
    }

    #[test]
    fn unknown_fields_and_bad_shapes_rejected() {
        let extra = r#"{"kind": "lfr", "p": 1, "m": 1, "d": 1, "block_sizes": [1],
            "A": [[0]], "B": [[1]], "C": [[1]], "D": [[0]], "E": 3}"#;
        assert!(matches!(parse_model(extra, "x"), Err(CliError::Parse(_))));
        let shape = r#"{"kind": "lfr", "p": 1, "m": 1, "d": 1, "block_sizes": [2],
            "A": [[0]], "B": [[1]], "C": [[1]], "D": [[0]]}"#;
        let err = parse_model(shape, "x").unwrap_err().to_string();
        assert!(err.contains("A has 1 rows"), "{err}");
        let kind = r#"{"kind": "tf"}"#;
        assert!(matches!(parse_model(kind, "x"), Err(CliError::Parse(_))));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_model("{\n  \"kind\": \"alpv\",\n  \"np\": ,\n}", "bad.json").unwrap_err().to_string();
        assert!(err.contains("bad.json:3:9"), "{err}");
    }
}
