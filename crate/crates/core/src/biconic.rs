//! Biconic sets: subsets of `R^d × R^d` invariant under independent positive
//! scaling of both arguments.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{ConeError, Result};
use crate::linalg::{self, norm};

/// Spherical cap `{x : ∠(x, center) ≤ theta}` with `∠(o, ·) = π/2`.
/// `center = None` is the whole space.
#[derive(Debug, Clone, PartialEq)]
pub struct Cap {
    pub center: Option<Vec<f64>>,
    pub theta: f64,
}

impl Cap {
    pub fn any() -> Self {
        Cap {
            center: None,
            theta: std::f64::consts::PI,
        }
    }

    pub fn new(center: &[f64], theta: f64) -> Result<Self> {
        if !linalg::all_finite(center) || !theta.is_finite() {
            return Err(ConeError::NonFinite);
        }
        let c = linalg::normalized(center)
            .ok_or_else(|| ConeError::InvalidCone("cap center is zero".into()))?;
        if theta < 0.0 {
            return Err(ConeError::OutOfRange(format!(
                "cap radius {theta} is negative"
            )));
        }
        Ok(Cap {
            center: Some(c),
            theta,
        })
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        let Some(c) = &self.center else { return true };
        if norm(x) == 0.0 {
            return FRAC_PI_2 <= self.theta;
        }
        linalg::angle_between(x, c) <= self.theta
    }

    fn dim(&self) -> Option<usize> {
        self.center.as_ref().map(|c| c.len())
    }
}

pub type BiconicPredicate = Arc<dyn Fn(&[f64], &[f64]) -> Option<bool> + Send + Sync>;

/// A biconic set `η`.
#[derive(Clone)]
pub enum BiconicSet {
    All,
    CapProduct {
        u: Cap,
        v: Cap,
    },
    /// `None` means the predicate is undefined at the given pair (e.g. at `o`).
    Custom {
        name: String,
        predicate: BiconicPredicate,
    },
}

impl fmt::Debug for BiconicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiconicSet({self})")
    }
}

impl fmt::Display for BiconicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cap = |f: &mut fmt::Formatter<'_>, c: &Cap| match &c.center {
            None => write!(f, "any/{}", c.theta),
            Some(v) => {
                let s: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
                write!(f, "{}/{}", s.join(";"), c.theta)
            }
        };
        match self {
            BiconicSet::All => write!(f, "all"),
            BiconicSet::CapProduct { u, v } => {
                write!(f, "cap:")?;
                cap(f, u)?;
                write!(f, "/")?;
                cap(f, v)
            }
            BiconicSet::Custom { name, .. } => write!(f, "custom:{name}"),
        }
    }
}

impl BiconicSet {
    pub fn cap_product(u: Cap, v: Cap) -> Self {
        BiconicSet::CapProduct { u, v }
    }

    pub fn custom(
        name: impl Into<String>,
        p: impl Fn(&[f64], &[f64]) -> Option<bool> + Send + Sync + 'static,
    ) -> Self {
        BiconicSet::Custom {
            name: name.into(),
            predicate: Arc::new(p),
        }
    }

    /// Membership of `(x, y)`.
    #[inline]
    pub fn contains(&self, x: &[f64], y: &[f64]) -> Result<bool> {
        match self {
            BiconicSet::All => Ok(true),
            BiconicSet::CapProduct { u, v } => Ok(u.contains(x) && v.contains(y)),
            BiconicSet::Custom { predicate, .. } => predicate(x, y).ok_or(ConeError::EtaAtOrigin),
        }
    }

    /// Checks that cap centers live in `R^d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        if let BiconicSet::CapProduct { u, v } = self {
            for c in [u, v] {
                if let Some(k) = c.dim() {
                    if k != d {
                        return Err(ConeError::DimensionMismatch {
                            expected: d,
                            got: k,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

fn parse_center(tok: &str, d: Option<usize>) -> Result<Option<Vec<f64>>> {
    let bad = |m: String| ConeError::Parse {
        line: 1,
        column: 1,
        message: m,
    };
    let tok = tok.trim();
    if tok == "any" {
        return Ok(None);
    }
    let (sign, body) = match tok.strip_prefix('-') {
        Some(rest) if !rest.starts_with(|c: char| c.is_ascii_digit() || c == '.') => (-1.0, rest),
        _ => (1.0, tok),
    };
    if body == "ones" {
        let d = d.ok_or_else(|| bad("'ones' needs a known dimension".into()))?;
        return Ok(Some(vec![sign / (d as f64).sqrt(); d]));
    }
    if let Some(i) = body.strip_prefix('e') {
        let d = d.ok_or_else(|| bad("'e<i>' needs a known dimension".into()))?;
        let i: usize = i.parse().map_err(|_| bad(format!("bad axis '{tok}'")))?;
        if i == 0 || i > d {
            return Err(bad(format!("axis index {i} outside 1..={d}")));
        }
        let mut e = vec![0.0; d];
        e[i - 1] = sign;
        return Ok(Some(e));
    }
    let v: std::result::Result<Vec<f64>, _> =
        tok.split(';').map(|x| x.trim().parse::<f64>()).collect();
    v.map(Some)
        .map_err(|_| bad(format!("bad cap center '{tok}'")))
}

impl BiconicSet {
    /// Parses `all` or `cap:<cu>/<θu>/<cv>/<θv>`, where a center is `any`,
    /// `e<i>`, `-e<i>`, `ones`, `-ones`, or a `;`-separated vector.
    pub fn parse(s: &str, d: Option<usize>) -> Result<Self> {
        let bad = |m: String| ConeError::Parse {
            line: 1,
            column: 1,
            message: m,
        };
        let s = s.trim();
        if s == "all" {
            return Ok(BiconicSet::All);
        }
        let rest = s
            .strip_prefix("cap:")
            .or_else(|| s.strip_prefix("cap_product:"))
            .ok_or_else(|| bad(format!("unknown set tag '{s}'")))?;
        let parts: Vec<&str> = rest.split('/').collect();
        if parts.len() != 4 {
            return Err(bad(format!(
                "expected cap:<cu>/<theta_u>/<cv>/<theta_v>, got '{s}'"
            )));
        }
        let theta = |t: &str| -> Result<f64> {
            t.trim()
                .parse()
                .map_err(|_| bad(format!("bad cap radius '{t}'")))
        };
        let mk = |c: Option<Vec<f64>>, t: f64| -> Result<Cap> {
            match c {
                None => Ok(Cap {
                    center: None,
                    theta: t,
                }),
                Some(c) => Cap::new(&c, t),
            }
        };
        let u = mk(parse_center(parts[0], d)?, theta(parts[1])?)?;
        let v = mk(parse_center(parts[2], d)?, theta(parts[3])?)?;
        Ok(BiconicSet::CapProduct { u, v })
    }
}

impl FromStr for BiconicSet {
    type Err = ConeError;

    fn from_str(s: &str) -> Result<Self> {
        BiconicSet::parse(s, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cap_convention_at_origin() {
        let c = Cap::new(&[1.0, 0.0], 0.01).unwrap();
        assert!(!c.contains(&[0.0, 0.0]));
        assert!(Cap::new(&[1.0, 0.0], std::f64::consts::PI)
            .unwrap()
            .contains(&[0.0, 0.0]));
        assert!(Cap::any().contains(&[0.0, 0.0]));
    }

    #[test]
    fn custom_undefined_at_origin() {
        let eta = BiconicSet::custom("first-positive", |x, _| (norm(x) > 0.0).then(|| x[0] > 0.0));
        assert_eq!(
            eta.contains(&[0.0, 0.0], &[1.0, 0.0]),
            Err(ConeError::EtaAtOrigin)
        );
        assert_eq!(eta.contains(&[1.0, 0.0], &[1.0, 0.0]), Ok(true));
    }

    #[test]
    fn parse_and_display() {
        let e = BiconicSet::parse("cap:ones/0.8/-ones/1.2", Some(3)).unwrap();
        let BiconicSet::CapProduct { u, v } = &e else {
            panic!()
        };
        assert!((u.center.as_ref().unwrap()[0] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(v.center.as_ref().unwrap()[2] < 0.0);
        let e = BiconicSet::parse("cap:e1/0.01/any/3.14159", Some(2)).unwrap();
        assert_eq!(e.to_string(), "cap:1;0/0.01/any/3.14159");
        assert!(BiconicSet::parse("cap:e3/0.1/any/1", Some(2)).is_err());
        assert!(BiconicSet::parse("bogus", Some(2)).is_err());
    }

    proptest! {
        #[test]
        fn cap_product_is_scale_invariant(
            x in prop::collection::vec(-1.0..1.0f64, 3),
            y in prop::collection::vec(-1.0..1.0f64, 3),
            l in 1e-3..1e3f64, m in 1e-3..1e3f64,
        ) {
            let eta = BiconicSet::parse("cap:ones/0.9/-e2/1.3", Some(3)).unwrap();
            let xs: Vec<f64> = x.iter().map(|v| v * l).collect();
            let ys: Vec<f64> = y.iter().map(|v| v * m).collect();
            // Skip pairs sitting on a cap boundary to rounding precision.
            let near = |a: &[f64], c: &Cap| c.center.as_ref().is_some_and(|cc| (linalg::angle_between(a, cc) - c.theta).abs() < 1e-9);
            let BiconicSet::CapProduct { u, v } = &eta else { unreachable!() };
            prop_assume!(!near(&x, u) && !near(&y, v));
            prop_assert_eq!(eta.contains(&x, &y).unwrap(), eta.contains(&xs, &ys).unwrap());
        }
    }
}
