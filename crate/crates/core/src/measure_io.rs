//! CSV serialization of empirical conic measures with a JSON sidecar.
//!
//! CSV header `u_1..u_d,v_1..v_d,w`; sidecar `{d, k, N, seed, cone_spec_hash}`
//! written next to the CSV with extension `.json`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{ConeError, Result};
use crate::measures::{Atom, EmpiricalConicMeasure};

/// Significant digits used for all text output.
pub const SIG_DIGITS: usize = 12;

/// `x` rounded to [`SIG_DIGITS`] significant digits, printed in shortest form.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{:.*e}", SIG_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    // Avoid "-0".
    if rounded == 0.0 {
        return "0".into();
    }
    let a = rounded.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSidecar {
    pub d: usize,
    pub k: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub seed: u64,
    pub cone_spec_hash: String,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn io(path: &Path, e: std::io::Error) -> ConeError {
    ConeError::Io(format!("{}: {e}", path.display()))
}

/// CSV text of the atoms.
pub fn measure_csv(m: &EmpiricalConicMeasure) -> String {
    let mut s = String::new();
    let head: Vec<String> = (1..=m.d)
        .map(|i| format!("u_{i}"))
        .chain((1..=m.d).map(|i| format!("v_{i}")))
        .chain(["w".to_string()])
        .collect();
    s.push_str(&head.join(","));
    s.push('\n');
    for a in &m.atoms {
        let row: Vec<String> =
            a.u.iter()
                .chain(&a.v)
                .chain([&a.w])
                .map(|&x| format_sig(x))
                .collect();
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

/// Writes the CSV and its sidecar.
pub fn write_measure(m: &EmpiricalConicMeasure, cone_spec_hash: &str, path: &Path) -> Result<()> {
    std::fs::write(path, measure_csv(m)).map_err(|e| io(path, e))?;
    let side = MeasureSidecar {
        d: m.d,
        k: m.k,
        n: m.total_samples,
        seed: m.seed,
        cone_spec_hash: cone_spec_hash.into(),
    };
    let sp = sidecar_path(path);
    let json = serde_json::to_string_pretty(&side).expect("sidecar serializes");
    std::fs::write(&sp, json + "\n").map_err(|e| io(&sp, e))
}

/// Reads a CSV written by [`write_measure`] and its sidecar. Atom ids are
/// the row indices.
pub fn read_measure(path: &Path) -> Result<(EmpiricalConicMeasure, MeasureSidecar)> {
    let sp = sidecar_path(path);
    let side_text = std::fs::read_to_string(&sp).map_err(|e| io(&sp, e))?;
    let side: MeasureSidecar = serde_json::from_str(&side_text).map_err(|e| ConeError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| io(path, e))?;
    let d = side.d;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| ConeError::Parse {
        line: 1,
        column: 1,
        message: "empty file".into(),
    })?;
    if header.split(',').count() != 2 * d + 1 {
        return Err(ConeError::Parse {
            line: 1,
            column: 1,
            message: format!("header does not match d={d}"),
        });
    }
    let mut atoms = Vec::new();
    for (n, l) in lines {
        if l.trim().is_empty() {
            continue;
        }
        let mut vals = Vec::with_capacity(2 * d + 1);
        let mut col = 1;
        for tok in l.split(',') {
            let v: f64 = tok.trim().parse().map_err(|_| ConeError::Parse {
                line: n + 1,
                column: col,
                message: format!("expected a number, found '{tok}'"),
            })?;
            vals.push(v);
            col += tok.len() + 1;
        }
        if vals.len() != 2 * d + 1 {
            return Err(ConeError::Parse {
                line: n + 1,
                column: 1,
                message: format!("expected {} fields", 2 * d + 1),
            });
        }
        atoms.push(Atom {
            u: vals[..d].to_vec(),
            v: vals[d..2 * d].to_vec(),
            w: vals[2 * d],
            id: atoms.len() as u64,
        });
    }
    let m = EmpiricalConicMeasure {
        d,
        k: side.k,
        atoms,
        total_samples: side.n,
        seed: side.seed,
        degenerate_samples: 0,
    };
    Ok((m, side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biconic::BiconicSet;
    use crate::cone::Cone;
    use crate::measures::empirical_support_measure;

    #[test]
    fn sig_digits() {
        assert_eq!(format_sig(0.25), "0.25");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(-0.0), "0");
        assert_eq!(format_sig(123456789.0123456), "123456789.012");
        assert_eq!(format_sig(2.95113112711234e-17), "2.95113112711e-17");
        assert_eq!(format_sig(-1.5e20), "-1.5e20");
    }

    #[test]
    fn round_trip() {
        let c = Cone::orthant(3).unwrap();
        let m = empirical_support_measure(&c, 1, &BiconicSet::All, 200, 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        write_measure(&m, &c.fingerprint(), &p).unwrap();
        let (back, side) = read_measure(&p).unwrap();
        assert_eq!(side.cone_spec_hash, c.fingerprint());
        assert_eq!(
            (back.d, back.k, back.total_samples, back.seed),
            (3, 1, 200, 4)
        );
        assert_eq!(back.atoms.len(), m.atoms.len());
        for (a, b) in m.atoms.iter().zip(&back.atoms) {
            assert!(a.u.iter().zip(&b.u).all(|(x, y)| (x - y).abs() < 1e-11));
            assert_eq!(a.w, b.w);
        }
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("u_1,u_2,u_3,v_1,v_2,v_3,w\n"));
    }
}
