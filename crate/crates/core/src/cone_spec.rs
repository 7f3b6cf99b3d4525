//! Cone specifications from inline strings and cone files.
//!
//! Inline: `orthant:d | subspace:d,k | circular:d,alpha | rays:path |
//! rotated:base,i,j,theta | dual:base`.
//!
//! File: first non-comment line `d=<int> kind=<orthant|subspace|circular|rays|rotated|dual>`,
//! then kind-specific lines: `k=<int>`, `alpha=<float>`, whitespace-separated
//! rows (generators, subspace basis, circular axis), `plane=<i>,<j>
//! theta=<float> base=<path or inline>`. `#` starts a comment.

use std::path::{Path, PathBuf};

use crate::cone::{make_cone, Cone, ConeSpec};
use crate::error::{ConeError, Result};

fn err(line: usize, column: usize, message: impl Into<String>) -> ConeError {
    ConeError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_f64(tok: &str, line: usize, column: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| err(line, column, format!("expected a number, found '{tok}'")))?;
    if !v.is_finite() {
        return Err(err(line, column, format!("non-finite number '{tok}'")));
    }
    Ok(v)
}

fn parse_usize(tok: &str, line: usize, column: usize) -> Result<usize> {
    tok.parse().map_err(|_| {
        err(
            line,
            column,
            format!("expected a nonnegative integer, found '{tok}'"),
        )
    })
}

/// Parses an inline spec or, when `s` names an existing file, a cone file.
pub fn parse_cone_spec(s: &str) -> Result<ConeSpec> {
    let p = Path::new(s);
    if p.is_file() {
        parse_cone_file(p)
    } else {
        parse_inline(s, Path::new("."))
    }
}

/// Parses and validates.
pub fn load_cone(s: &str) -> Result<(Cone, ConeSpec)> {
    let spec = parse_cone_spec(s)?;
    Ok((make_cone(&spec)?, spec))
}

/// Inline grammar; relative paths resolve against `dir`.
pub fn parse_inline(s: &str, dir: &Path) -> Result<ConeSpec> {
    parse_inline_at(s.trim(), dir, 1, 1)
}

fn parse_inline_at(s: &str, dir: &Path, line: usize, col: usize) -> Result<ConeSpec> {
    let Some((kind, rest)) = s.split_once(':') else {
        return Err(err(
            line,
            col,
            format!("expected '<kind>:<args>', found '{s}'"),
        ));
    };
    let acol = col + kind.len() + 1;
    let args = |n: usize| -> Result<Vec<(&str, usize)>> {
        let mut out = Vec::new();
        let mut c = acol;
        for a in rest.split(',') {
            out.push((a.trim(), c));
            c += a.len() + 1;
        }
        if out.len() != n {
            return Err(err(
                line,
                acol,
                format!("'{kind}' takes {n} argument(s), found {}", out.len()),
            ));
        }
        Ok(out)
    };
    match kind {
        "orthant" => {
            let a = args(1)?;
            Ok(ConeSpec::Orthant {
                dim: parse_usize(a[0].0, line, a[0].1)?,
            })
        }
        "subspace" => {
            let a = args(2)?;
            Ok(ConeSpec::Subspace {
                dim: parse_usize(a[0].0, line, a[0].1)?,
                k: parse_usize(a[1].0, line, a[1].1)?,
                basis: None,
            })
        }
        "circular" => {
            let a = args(2)?;
            Ok(ConeSpec::Circular {
                dim: parse_usize(a[0].0, line, a[0].1)?,
                alpha: parse_f64(a[1].0, line, a[1].1)?,
                axis: None,
            })
        }
        "rays" => {
            let path = resolve(dir, rest.trim());
            let text = read(&path)?;
            if first_content_line(&text).is_some_and(|l| l.starts_with("d=")) {
                parse_cone_text(&text, path.parent().unwrap_or(Path::new(".")))
            } else {
                let rows = parse_rows(&text, 1)?;
                let dim = rows.first().map_or(0, |r| r.len());
                Ok(ConeSpec::Rays {
                    dim,
                    generators: rows,
                })
            }
        }
        "dual" => Ok(ConeSpec::Dual {
            base: Box::new(parse_inline_at(rest.trim(), dir, line, acol)?),
        }),
        "rotated" => {
            // The base may itself contain ':' and ','; the last three fields are i, j, theta.
            let parts: Vec<&str> = rest.rsplitn(4, ',').collect();
            if parts.len() != 4 {
                return Err(err(line, acol, "'rotated' takes base,i,j,theta"));
            }
            let base_str = parts[3];
            let mut c = acol + base_str.len() + 1;
            let i = parse_usize(parts[2].trim(), line, c)?;
            c += parts[2].len() + 1;
            let j = parse_usize(parts[1].trim(), line, c)?;
            c += parts[1].len() + 1;
            let theta = parse_f64(parts[0].trim(), line, c)?;
            let base = parse_base(base_str.trim(), dir, line, acol)?;
            Ok(ConeSpec::Rotated {
                base: Box::new(base),
                plane: (i, j),
                theta,
            })
        }
        other => Err(err(line, col, format!("unknown cone kind '{other}'"))),
    }
}

/// A base cone: an existing file, else an inline spec.
fn parse_base(s: &str, dir: &Path, line: usize, col: usize) -> Result<ConeSpec> {
    let p = resolve(dir, s);
    if p.is_file() {
        parse_cone_file(&p)
    } else {
        parse_inline_at(s, dir, line, col)
    }
}

fn resolve(dir: &Path, s: &str) -> PathBuf {
    let p = Path::new(s);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| ConeError::Io(format!("{}: {e}", path.display())))
}

fn strip_comment(l: &str) -> &str {
    l.split('#').next().unwrap_or("")
}

fn first_content_line(text: &str) -> Option<&str> {
    text.lines()
        .map(|l| strip_comment(l).trim())
        .find(|l| !l.is_empty())
}

/// Whitespace-separated float rows of equal width.
fn parse_rows(text: &str, first_line: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (n, l) in text.lines().enumerate() {
        let line = first_line + n;
        let row = parse_row(strip_comment(l), line)?;
        if row.is_empty() {
            continue;
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(err(
                    line,
                    1,
                    format!("row has {} entries, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

fn tokens(l: &str) -> impl Iterator<Item = (usize, &str)> {
    let base = l.as_ptr() as usize;
    l.split_whitespace()
        .map(move |t| (t.as_ptr() as usize - base + 1, t))
}

fn parse_row(l: &str, line: usize) -> Result<Vec<f64>> {
    tokens(l).map(|(c, t)| parse_f64(t, line, c)).collect()
}

/// Reads a cone file; relative `base=` paths resolve against its directory.
pub fn parse_cone_file(path: &Path) -> Result<ConeSpec> {
    let text = read(path)?;
    parse_cone_text(&text, path.parent().unwrap_or(Path::new(".")))
}

#[derive(Default)]
struct Header {
    dim: Option<usize>,
    kind: Option<(String, usize, usize)>,
    k: Option<usize>,
    alpha: Option<f64>,
    plane: Option<(usize, usize)>,
    theta: Option<f64>,
    base: Option<ConeSpec>,
}

/// Cone file contents.
pub fn parse_cone_text(text: &str, dir: &Path) -> Result<ConeSpec> {
    let mut h = Header::default();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut last_line = 0;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        last_line = line;
        let l = strip_comment(raw);
        if l.trim().is_empty() {
            continue;
        }
        if l.contains('=') {
            for (c, tok) in tokens(l) {
                let Some((key, val)) = tok.split_once('=') else {
                    return Err(err(line, c, format!("expected key=value, found '{tok}'")));
                };
                let vc = c + key.len() + 1;
                match key {
                    "d" => h.dim = Some(parse_usize(val, line, vc)?),
                    "kind" => h.kind = Some((val.to_string(), line, vc)),
                    "k" => h.k = Some(parse_usize(val, line, vc)?),
                    "alpha" => h.alpha = Some(parse_f64(val, line, vc)?),
                    "theta" => h.theta = Some(parse_f64(val, line, vc)?),
                    "plane" => {
                        let Some((i, j)) = val.split_once(',') else {
                            return Err(err(line, vc, "expected plane=<i>,<j>"));
                        };
                        h.plane = Some((
                            parse_usize(i, line, vc)?,
                            parse_usize(j, line, vc + i.len() + 1)?,
                        ));
                    }
                    "base" => h.base = Some(parse_base(val, dir, line, vc)?),
                    other => return Err(err(line, c, format!("unknown key '{other}'"))),
                }
            }
            continue;
        }
        if h.kind.is_none() {
            return Err(err(line, 1, "data row before the 'd=.. kind=..' header"));
        }
        let row = parse_row(l, line)?;
        let d = h.dim.ok_or_else(|| err(line, 1, "missing d="))?;
        if row.len() != d {
            return Err(err(
                line,
                1,
                format!("row has {} entries, expected d={d}", row.len()),
            ));
        }
        rows.push(row);
    }
    let end = last_line.max(1);
    let (kind, kl, kc) = h.kind.clone().ok_or_else(|| err(end, 1, "missing kind="))?;
    let need_dim = || h.dim.ok_or_else(|| err(kl, 1, "missing d="));
    let no_rows = |what: &str| -> Result<()> {
        if rows.is_empty() {
            Ok(())
        } else {
            Err(err(kl, kc, format!("kind '{what}' takes no data rows")))
        }
    };
    let spec = match kind.as_str() {
        "orthant" => {
            no_rows("orthant")?;
            ConeSpec::Orthant { dim: need_dim()? }
        }
        "subspace" => ConeSpec::Subspace {
            dim: need_dim()?,
            k: h.k.ok_or_else(|| err(kl, kc, "subspace needs k="))?,
            basis: (!rows.is_empty()).then(|| rows.clone()),
        },
        "circular" => {
            if rows.len() > 1 {
                return Err(err(kl, kc, "circular takes at most one axis row"));
            }
            ConeSpec::Circular {
                dim: need_dim()?,
                alpha: h
                    .alpha
                    .ok_or_else(|| err(kl, kc, "circular needs alpha="))?,
                axis: rows.first().cloned(),
            }
        }
        "rays" => {
            if rows.is_empty() {
                return Err(err(kl, kc, "rays needs at least one generator row"));
            }
            ConeSpec::Rays {
                dim: need_dim()?,
                generators: rows.clone(),
            }
        }
        "rotated" => {
            no_rows("rotated")?;
            let base = h
                .base
                .clone()
                .ok_or_else(|| err(kl, kc, "rotated needs base="))?;
            if let Some(d) = h.dim {
                if d != base.dim() {
                    return Err(err(
                        kl,
                        1,
                        format!("d={d} but the base cone has dimension {}", base.dim()),
                    ));
                }
            }
            ConeSpec::Rotated {
                base: Box::new(base),
                plane: h.plane.ok_or_else(|| err(kl, kc, "rotated needs plane="))?,
                theta: h.theta.ok_or_else(|| err(kl, kc, "rotated needs theta="))?,
            }
        }
        "dual" => {
            no_rows("dual")?;
            ConeSpec::Dual {
                base: Box::new(
                    h.base
                        .clone()
                        .ok_or_else(|| err(kl, kc, "dual needs base="))?,
                ),
            }
        }
        other => return Err(err(kl, kc, format!("unknown cone kind '{other}'"))),
    };
    Ok(spec)
}
