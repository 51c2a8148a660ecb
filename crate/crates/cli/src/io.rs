//! Plain-text outputs. Floats use Rust's shortest round-trip formatting, so
//! reading a file back reproduces the written values exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use subsonic_core::flow::FlowField;

pub const FIELD_HEADER: &str = "x1,x2,psi,rho,u,v,mach";

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Nodes in mesh order (`η` fastest).
pub fn field_csv(field: &FlowField) -> String {
    let mesh = &field.mesh;
    let mut out = String::with_capacity(mesh.len() * 120);
    out.push_str(FIELD_HEADER);
    out.push('\n');
    for i in 0..mesh.n_xi {
        for j in 0..mesh.n_eta {
            let k = mesh.index(i, j);
            let (x1, x2) = mesh.node(i, j);
            let _ = writeln!(
                out,
                "{x1},{x2},{},{},{},{},{}",
                field.psi[k],
                field.rho[k],
                field.u[k],
                field.v[k],
                field.mach_sq[k].sqrt()
            );
        }
    }
    out
}

/// Columns of a field CSV, in header order.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTable {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub psi: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub mach: Vec<f64>,
}

pub fn read_field_csv(path: &Path) -> Result<FieldTable> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_field_csv(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse_field_csv(text: &str) -> Result<FieldTable> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default().trim();
    if header != FIELD_HEADER {
        bail!("expected header `{FIELD_HEADER}`, found `{header}`");
    }
    let mut cols: [Vec<f64>; 7] = Default::default();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            bail!("row {} has {} fields, expected 7", n + 2, fields.len());
        }
        for (col, f) in cols.iter_mut().zip(fields) {
            col.push(
                f.trim()
                    .parse()
                    .with_context(|| format!("row {}: `{f}` is not a number", n + 2))?,
            );
        }
    }
    let [x1, x2, psi, rho, u, v, mach] = cols;
    Ok(FieldTable {
        x1,
        x2,
        psi,
        rho,
        u,
        v,
        mach,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_tables() {
        assert!(parse_field_csv("x,y\n1,2\n").is_err());
        assert!(parse_field_csv(&format!("{FIELD_HEADER}\n1,2,3\n")).is_err());
        assert!(parse_field_csv(&format!("{FIELD_HEADER}\n1,2,3,4,5,6,abc\n")).is_err());
        let t = parse_field_csv(&format!("{FIELD_HEADER}\n1,2,3,4,5,6,0.5\n\n")).unwrap();
        assert_eq!(t.mach, vec![0.5]);
    }

    #[test]
    fn shortest_float_formatting_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, f64::MIN_POSITIVE] {
            assert_eq!(format!("{x}").parse::<f64>().unwrap(), x);
        }
    }
}
